//! Exact solver for the restricted inverse optimal value problem on
//! network-structured linear programs under a weighted l1 norm.
//!
//! Given a feasible solution `x0` of `min c·x, A x = b, x ≥ 0`, a target
//! `K` and positive weights `d`, [`inverse::solve`] finds costs `c*`
//! minimizing `Σ d_j |c*_j − c_j|` such that `x0` is optimal under `c*` and
//! `c*·x0 = K`. `A` is a node-arc incidence matrix (transportation,
//! shortest path or a general network) and all arithmetic is exact.

pub mod cli;
pub mod inverse;
pub mod mcf;
pub mod numeric;
pub mod oracle;
pub mod subproblem;

pub use inverse::{solve, InverseSolution, SolveResult};
pub use numeric::Rational;
pub use subproblem::InverseInstance;
