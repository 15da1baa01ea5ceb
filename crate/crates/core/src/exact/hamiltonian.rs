use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gauss::GaussianInt;
use super::linalg::{GaussMatrix, IntMatrix};
use crate::error::{Error, Result};
use crate::spectral::SpectralData;

/// A self-adjoint Gaussian-integer Hamiltonian together with its split
/// `H = h_S + i·h_A` into a symmetric and an antisymmetric integer part.
///
/// The float eigen-decomposition is computed lazily and cached.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    h: GaussMatrix,
    h_s: IntMatrix,
    h_a: IntMatrix,
    spectrum: OnceLock<SpectralData>,
}

impl HamiltonianSpec {
    pub fn new(h: GaussMatrix) -> Result<Self> {
        split_hamiltonian(h)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(GaussMatrix::from_ints(rows)?)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(GaussMatrix::zeros(dim)).expect("zero matrix is self-adjoint")
    }

    pub fn matrix(&self) -> &GaussMatrix {
        &self.h
    }

    pub fn symmetric_part(&self) -> &IntMatrix {
        &self.h_s
    }

    pub fn antisymmetric_part(&self) -> &IntMatrix {
        &self.h_a
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// `h_S + i·h_A`, rebuilt from the parts.
    pub fn recombine(&self) -> GaussMatrix {
        let n = self.dim();
        let mut m = GaussMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = GaussianInt::new(self.h_s[(i, j)].clone(), self.h_a[(i, j)].clone());
            }
        }
        m
    }

    pub(crate) fn spectrum_cell(&self) -> &OnceLock<SpectralData> {
        &self.spectrum
    }
}

impl PartialEq for HamiltonianSpec {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h
    }
}

impl Eq for HamiltonianSpec {}

impl Serialize for HamiltonianSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.h.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HamiltonianSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h = GaussMatrix::deserialize(d)?;
        HamiltonianSpec::new(h).map_err(serde::de::Error::custom)
    }
}

/// Splits a self-adjoint matrix into `h_S = Re H` and `h_A = Im H`.
pub fn split_hamiltonian(h: GaussMatrix) -> Result<HamiltonianSpec> {
    if let Some((row, col)) = h.first_non_self_adjoint() {
        return Err(Error::NotSelfAdjoint { row, col });
    }
    let n = h.dim();
    let mut h_s = IntMatrix::zeros(n);
    let mut h_a = IntMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let z = &h[(i, j)];
            h_s[(i, j)] = z.re.clone();
            h_a[(i, j)] = z.im.clone();
        }
    }
    debug_assert_eq!(h_s, h_s.transpose());
    debug_assert_eq!(h_a, h_a.transpose().neg());
    Ok(HamiltonianSpec {
        h,
        h_s,
        h_a,
        spectrum: OnceLock::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_x_is_purely_symmetric() {
        let h = HamiltonianSpec::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(h.symmetric_part(), &IntMatrix::from_rows(&[&[0, 1], &[1, 0]]));
        assert!(h.antisymmetric_part().is_zero());
    }

    #[test]
    fn imaginary_offdiagonal_is_antisymmetric() {
        let m = GaussMatrix::from_pairs(&[&[(0, 0), (0, 1)], &[(0, -1), (0, 0)]]).unwrap();
        let h = HamiltonianSpec::new(m.clone()).unwrap();
        assert!(h.symmetric_part().is_zero());
        assert_eq!(h.antisymmetric_part(), &IntMatrix::from_rows(&[&[0, 1], &[-1, 0]]));
        assert_eq!(h.recombine(), m);
    }

    #[test]
    fn real_diagonal() {
        let h = HamiltonianSpec::from_ints(&[&[2, 0], &[0, -1]]).unwrap();
        assert_eq!(h.symmetric_part(), &IntMatrix::from_rows(&[&[2, 0], &[0, -1]]));
        assert!(h.antisymmetric_part().is_zero());
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let m = GaussMatrix::from_pairs(&[&[(0, 0), (0, 1)], &[(0, 1), (0, 0)]]).unwrap();
        assert_eq!(
            split_hamiltonian(m).unwrap_err(),
            Error::NotSelfAdjoint { row: 0, col: 1 }
        );
    }
}
