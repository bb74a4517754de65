//! Exact finite-state view of the lazy value-guided walk.
//!
//! The walk restricted to positive-value prefixes is a reversible Markov
//! chain. Each non-root node carries the weight of the edge to its parent,
//!
//!   w(y) = pi_ref(y) V(y)   (full path density times value),
//!
//! the stationary mass of a node is its total incident weight over Z_f, and
//! one step moves across an incident edge with probability w / (2 S(node)),
//! staying put with the remaining probability (at least 1/2).
//!
//! Everything here is exact linear algebra on that chain: stationary
//! quantities, step-by-step marginals, Dirichlet forms, conductance, and
//! the low-weight prefix sets that control average-case guarantees.

use std::collections::{BTreeMap, HashMap};

use tree_core::{BaseModel, Seq, TargetDist, TreeError};
use value_oracles::ValueOracle;

pub struct ExactChain {
    nodes: Vec<Seq>,
    index: HashMap<Seq, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    /// w(y): weight of the edge to the parent; 0.0 at the root.
    edge_weight: Vec<f64>,
    /// S(y): total incident edge weight.
    strength: Vec<f64>,
    mu: Vec<f64>,
    z_f: f64,
    horizon: usize,
}

impl ExactChain {
    /// Explore from the root, keeping children with positive conditional
    /// probability and positive value; zero-value subtrees are never
    /// entered. Fails when more than `cap` nodes would be kept.
    pub fn build(
        model: &dyn BaseModel,
        oracle: &dyn ValueOracle,
        cap: usize,
    ) -> Result<Self, TreeError> {
        let horizon = model.horizon();
        let mut nodes = vec![Seq::root()];
        let mut parent = vec![None];
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        let mut edge_weight = vec![0.0];
        let mut log_density = vec![0.0];

        let mut i = 0;
        while i < nodes.len() {
            if nodes[i].depth() < horizon {
                let cond = model.conditionals(&nodes[i]);
                for (a, &p) in cond.iter().enumerate() {
                    if p <= 0.0 {
                        continue;
                    }
                    let child = nodes[i].child(a as u32);
                    let lw = log_density[i] + p.ln() + oracle.log_value(&child);
                    if lw == f64::NEG_INFINITY {
                        continue;
                    }
                    if nodes.len() >= cap {
                        return Err(TreeError::CapExceeded { cap });
                    }
                    nodes.push(child);
                    parent.push(Some(i));
                    children.push(Vec::new());
                    children[i].push(nodes.len() - 1);
                    edge_weight.push(lw.exp());
                    log_density.push(log_density[i] + p.ln());
                }
            }
            i += 1;
        }

        let n = nodes.len();
        let mut strength = vec![0.0; n];
        for v in 1..n {
            strength[v] += edge_weight[v];
            strength[parent[v].expect("non-root")] += edge_weight[v];
        }
        let z_f: f64 = strength.iter().sum();
        // An isolated root (no live children) self-loops forever.
        let mu = if z_f > 0.0 {
            strength.iter().map(|s| s / z_f).collect()
        } else {
            vec![1.0; n]
        };
        let index = nodes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, y)| (y, i))
            .collect();
        Ok(ExactChain {
            nodes,
            index,
            parent,
            children,
            edge_weight,
            strength,
            mu,
            z_f,
            horizon,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the root is always present
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn nodes(&self) -> &[Seq] {
        &self.nodes
    }

    pub fn index_of(&self, y: &Seq) -> Option<usize> {
        self.index.get(y).copied()
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.nodes[i].depth() == self.horizon
    }

    pub fn z_f(&self) -> f64 {
        self.z_f
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Point mass at the root, the walk's starting law.
    pub fn delta_root(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.len()];
        d[0] = 1.0;
        d
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.parent[v]
            .map(|p| (p, self.edge_weight[v]))
            .into_iter()
            .chain(self.children[v].iter().map(|&c| (c, self.edge_weight[c])))
    }

    /// One-step transition probabilities out of `v`, self-loop included.
    pub fn transition_row(&self, v: usize) -> Vec<(usize, f64)> {
        if self.strength[v] == 0.0 {
            return vec![(v, 1.0)];
        }
        let mut row = vec![(v, 0.5)];
        for (u, w) in self.neighbors(v) {
            row.push((u, w / (2.0 * self.strength[v])));
        }
        row
    }

    /// dist * P, one exact step of the chain.
    pub fn step(&self, dist: &[f64]) -> Vec<f64> {
        assert_eq!(dist.len(), self.len());
        let mut out = vec![0.0; self.len()];
        for v in 0..self.len() {
            let p = dist[v];
            if p == 0.0 {
                continue;
            }
            if self.strength[v] == 0.0 {
                out[v] += p;
                continue;
            }
            out[v] += 0.5 * p;
            let scale = p / (2.0 * self.strength[v]);
            for (u, w) in self.neighbors(v) {
                out[u] += scale * w;
            }
        }
        out
    }

    pub fn propagate(&self, dist: &[f64], steps: u64) -> Vec<f64> {
        let mut d = dist.to_vec();
        for _ in 0..steps {
            d = self.step(&d);
        }
        d
    }

    /// max over directed edges of |mu(u) P(u,v) - mu(v) P(v,u)|.
    pub fn detailed_balance_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for v in 1..self.len() {
            let u = self.parent[v].expect("non-root");
            let up = if self.strength[v] > 0.0 {
                self.mu[v] * self.edge_weight[v] / (2.0 * self.strength[v])
            } else {
                0.0
            };
            let down = if self.strength[u] > 0.0 {
                self.mu[u] * self.edge_weight[v] / (2.0 * self.strength[u])
            } else {
                0.0
            };
            worst = worst.max((up - down).abs());
        }
        worst
    }

    /// ||mu P - mu||_1, a direct stationarity check.
    pub fn stationary_l1(&self) -> f64 {
        self.step(&self.mu)
            .iter()
            .zip(&self.mu)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn leaf_mass(&self, dist: &[f64]) -> f64 {
        (0..self.len())
            .filter(|&v| self.is_leaf(v))
            .map(|v| dist[v])
            .sum()
    }

    /// dist restricted to leaves and renormalized; None without leaf mass.
    pub fn leaf_conditional(&self, dist: &[f64]) -> Option<BTreeMap<Seq, f64>> {
        let mass = self.leaf_mass(dist);
        if mass <= 0.0 {
            return None;
        }
        Some(
            (0..self.len())
                .filter(|&v| self.is_leaf(v) && dist[v] > 0.0)
                .map(|v| (self.nodes[v].clone(), dist[v] / mass))
                .collect(),
        )
    }

    pub fn stationary_leaf_conditional(&self) -> Option<BTreeMap<Seq, f64>> {
        self.leaf_conditional(&self.mu)
    }

    pub fn to_map(&self, dist: &[f64]) -> BTreeMap<Seq, f64> {
        self.nodes
            .iter()
            .cloned()
            .zip(dist.iter().copied())
            .collect()
    }

    /// Dirichlet form E(g, g) = 1/2 sum_{u,v} mu(u) P(u,v) (g(u)-g(v))^2,
    /// which collapses to sum over tree edges of w/(2 Z_f) (g(u)-g(v))^2.
    pub fn dirichlet_form(&self, g: &[f64]) -> f64 {
        assert_eq!(g.len(), self.len());
        let mut acc = 0.0;
        for v in 1..self.len() {
            let u = self.parent[v].expect("non-root");
            let d = g[u] - g[v];
            acc += self.edge_weight[v] / (2.0 * self.z_f) * d * d;
        }
        acc
    }

    fn subtree_masses(&self) -> Vec<f64> {
        let mut mass = self.mu.clone();
        // Children precede nothing: nodes are in preorder, so a reverse
        // sweep accumulates each subtree before its parent needs it.
        for v in (1..self.len()).rev() {
            let p = self.parent[v].expect("non-root");
            let m = mass[v];
            mass[p] += m;
        }
        mass
    }

    /// min over non-root full subtrees S of flow(S, S^c) / min(mu S, mu S^c).
    /// These single-edge cuts are the tree's candidate bottlenecks.
    pub fn subtree_conductance(&self) -> f64 {
        let mass = self.subtree_masses();
        let mut best = f64::INFINITY;
        for v in 1..self.len() {
            let cut = self.edge_weight[v] / (2.0 * self.z_f);
            let m = mass[v].min(1.0 - mass[v]);
            if m > 0.0 {
                best = best.min(cut / m);
            }
        }
        best
    }

    /// Exhaustive conductance over every proper nonempty subset. Only
    /// feasible on tiny chains; callers must keep len() small.
    pub fn full_conductance(&self) -> f64 {
        let n = self.len();
        assert!(n <= 20, "2^{n} subsets is past reasonable");
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << n) - 1 {
            let inside = |v: usize| mask >> v & 1 == 1;
            let mut mass = 0.0;
            for v in 0..n {
                if inside(v) {
                    mass += self.mu[v];
                }
            }
            let mut cut = 0.0;
            for v in 1..n {
                if inside(v) != inside(self.parent[v].expect("non-root")) {
                    cut += self.edge_weight[v] / (2.0 * self.z_f);
                }
            }
            let m = mass.min(1.0 - mass);
            if m > 0.0 {
                best = best.min(cut / m);
            }
        }
        best
    }

    /// Target mass of depth-h prefixes whose node weight is small relative
    /// to the leaf weight they sit above:
    /// w(y) < (eta^2 / (4 kappa^2)) * sum_{leaves below y} w(leaf).
    pub fn bad_prefix_mass(
        &self,
        target: &TargetDist,
        h: usize,
        eta: f64,
        kappa: f64,
    ) -> f64 {
        assert!(h >= 1 && h <= self.horizon);
        let mut leaf_below = vec![0.0; self.len()];
        for v in (0..self.len()).rev() {
            if self.is_leaf(v) {
                leaf_below[v] = self.edge_weight[v];
            }
            if let Some(p) = self.parent[v] {
                let m = leaf_below[v];
                leaf_below[p] += m;
            }
        }
        let frac = eta * eta / (4.0 * kappa * kappa);
        let bad: std::collections::HashSet<&Seq> = (1..self.len())
            .filter(|&v| {
                self.nodes[v].depth() == h && self.edge_weight[v] < frac * leaf_below[v]
            })
            .map(|v| &self.nodes[v])
            .collect();
        target
            .iter()
            .filter(|(y, _)| bad.contains(&y.prefix(h)))
            .map(|(_, p)| p)
            .sum()
    }
}
