use rand::Rng;
use tree_core::Seq;

/// One-hidden-layer regressor for prefixes of a single fixed depth.
///
/// Input is the one-hot encoding of y_{1:depth} (depth * alphabet entries,
/// exactly `depth` of them set), hidden layer is rectified, and the scalar
/// output passes through a logistic head, so predictions live in (0, 1).
#[derive(Debug, Clone)]
pub struct MlpValueNet {
    pub(crate) depth: usize,
    pub(crate) alphabet: usize,
    pub(crate) width: usize,
    /// Row-major [width x (depth * alphabet)].
    pub(crate) w1: Vec<f64>,
    pub(crate) b1: Vec<f64>,
    pub(crate) w2: Vec<f64>,
    pub(crate) b2: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl MlpValueNet {
    /// Symmetric uniform fan-in initialization, U(-1/sqrt(fan), 1/sqrt(fan)).
    pub(crate) fn init<R: Rng>(depth: usize, alphabet: usize, width: usize, rng: &mut R) -> Self {
        let in_dim = depth * alphabet;
        let bound1 = 1.0 / (in_dim as f64).sqrt();
        let bound2 = 1.0 / (width as f64).sqrt();
        MlpValueNet {
            depth,
            alphabet,
            width,
            w1: (0..width * in_dim)
                .map(|_| rng.gen_range(-bound1..bound1))
                .collect(),
            b1: (0..width).map(|_| rng.gen_range(-bound1..bound1)).collect(),
            w2: (0..width).map(|_| rng.gen_range(-bound2..bound2)).collect(),
            b2: rng.gen_range(-bound2..bound2),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub(crate) fn in_dim(&self) -> usize {
        self.depth * self.alphabet
    }

    /// Active input coordinates for a prefix; panics off-depth or
    /// off-alphabet, which would silently read garbage weights otherwise.
    pub(crate) fn hot(&self, y: &Seq) -> Vec<usize> {
        assert_eq!(y.depth(), self.depth, "prefix depth mismatch");
        y.actions()
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let a = a as usize;
                assert!(a < self.alphabet, "action outside alphabet");
                j * self.alphabet + a
            })
            .collect()
    }

    /// Hidden pre-activations and the squashed output for one input.
    pub(crate) fn forward_parts(&self, hot: &[usize]) -> (Vec<f64>, f64) {
        let in_dim = self.in_dim();
        let mut z1 = self.b1.clone();
        for (i, z) in z1.iter_mut().enumerate() {
            let row = &self.w1[i * in_dim..(i + 1) * in_dim];
            for &j in hot {
                *z += row[j];
            }
        }
        let mut z2 = self.b2;
        for (i, &z) in z1.iter().enumerate() {
            if z > 0.0 {
                z2 += self.w2[i] * z;
            }
        }
        (z1, sigmoid(z2))
    }

    pub fn predict(&self, y: &Seq) -> f64 {
        self.forward_parts(&self.hot(y)).1
    }

    pub fn param_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + 1
    }

    /// Flat view in (w1, b1, w2, b2) order; the serialization layout.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        flat.extend_from_slice(&self.w1);
        flat.extend_from_slice(&self.b1);
        flat.extend_from_slice(&self.w2);
        flat.push(self.b2);
        flat
    }

    pub(crate) fn from_flat(
        depth: usize,
        alphabet: usize,
        width: usize,
        flat: &[f64],
    ) -> Option<Self> {
        let in_dim = depth * alphabet;
        if flat.len() != width * in_dim + 2 * width + 1 {
            return None;
        }
        let (w1, rest) = flat.split_at(width * in_dim);
        let (b1, rest) = rest.split_at(width);
        let (w2, rest) = rest.split_at(width);
        Some(MlpValueNet {
            depth,
            alphabet,
            width,
            w1: w1.to_vec(),
            b1: b1.to_vec(),
            w2: w2.to_vec(),
            b2: rest[0],
        })
    }

    pub(crate) fn apply_flat(&mut self, flat: &[f64]) {
        let rebuilt = Self::from_flat(self.depth, self.alphabet, self.width, flat)
            .expect("flat length mismatch");
        *self = rebuilt;
    }
}
