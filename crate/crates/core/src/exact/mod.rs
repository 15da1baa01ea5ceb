//! Exact Gaussian-integer scalars, vectors and matrices.

mod gauss;
mod hamiltonian;
mod linalg;

pub use gauss::GaussianInt;
pub(crate) use gauss::big_to_f64;
pub use hamiltonian::{split_hamiltonian, HamiltonianSpec};
pub use linalg::{GaussMatrix, GaussVector, IntMatrix};

use crate::error::Result;

/// Exact product `M·v`.
pub fn mat_apply(m: &GaussMatrix, v: &GaussVector) -> Result<GaussVector> {
    m.apply(v)
}

pub fn is_self_adjoint(m: &GaussMatrix) -> bool {
    m.is_self_adjoint()
}

/// True iff `GH − HG = 0` exactly.
pub fn commutes(g: &GaussMatrix, h: &GaussMatrix) -> Result<bool> {
    g.commutes(h)
}
