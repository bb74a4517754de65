//! Value functions over generation trees.
//!
//! A [`ValueOracle`] assigns a nonnegative value to every node; the exact
//! value of a node is the conditional expectation of the leaf tilt below it,
//! `V(y_{1:h}) = E_{pi_ref}[tau(y_{1:H}) | y_{1:h}]`. Values are carried in
//! log space (`-inf` encodes zero). Besides the exact oracle this crate
//! provides the controlled corruptions used throughout the samplers and chain
//! diagnostics: multiplicative perturbation of a marked action, one-step value
//! delay, geometric decay over a prefix predicate, and leaf overrides.

mod oracle;
mod profile;

pub use oracle::{
    exact_oracle, ClosedFormOracle, DelayedOracle, GeometricOracle, OracleError,
    PerturbedOracle, TableOracle, ValueOracle, WithExactLeaves,
};
pub use profile::{bellman_defect, error_profile, ErrorProfile, DEFECT_DENOM_FLOOR};
