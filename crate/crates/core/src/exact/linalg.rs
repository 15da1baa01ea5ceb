//! Dense vectors and square matrices over the Gaussian integers.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::gauss::GaussianInt;
use crate::error::{Error, Result};

impl std::fmt::Display for GaussVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, z) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

/// A state vector `ψ^α`, one Gaussian integer per degree of freedom.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GaussVector(pub Vec<GaussianInt>);

impl GaussVector {
    pub fn zeros(dim: usize) -> Self {
        GaussVector(vec![GaussianInt::zero(); dim])
    }

    /// Unit vector `e_k` of length `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[k] = GaussianInt::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        GaussVector(xs.iter().map(|&x| GaussianInt::real(x)).collect())
    }

    pub fn from_pairs(xs: &[(i64, i64)]) -> Self {
        GaussVector(xs.iter().map(|&p| GaussianInt::from(p)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GaussianInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(GaussianInt::is_zero)
    }

    fn check_len(&self, other: &GaussVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &GaussVector) -> Result<GaussVector> {
        self.check_len(other)?;
        Ok(GaussVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &GaussVector) -> Result<GaussVector> {
        self.check_len(other)?;
        Ok(GaussVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn neg(&self) -> GaussVector {
        GaussVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, c: &GaussianInt) -> GaussVector {
        GaussVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul_i(&self) -> GaussVector {
        GaussVector(self.0.iter().map(GaussianInt::mul_i).collect())
    }

    pub fn mul_neg_i(&self) -> GaussVector {
        GaussVector(self.0.iter().map(GaussianInt::mul_neg_i).collect())
    }

    pub fn conj(&self) -> GaussVector {
        GaussVector(self.0.iter().map(GaussianInt::conj).collect())
    }

    /// Hermitian inner product `self† · other = Σ conj(self^α) other^α`.
    pub fn inner(&self, other: &GaussVector) -> Result<GaussianInt> {
        self.check_len(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Bilinear contraction `Σ self^α other^α` with no conjugation.
    pub fn dot(&self, other: &GaussVector) -> Result<GaussianInt> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sqr(&self) -> BigInt {
        self.0.iter().map(GaussianInt::norm_sqr).sum()
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.0.iter().map(GaussianInt::to_complex).collect()
    }
}

impl Index<usize> for GaussVector {
    type Output = GaussianInt;
    fn index(&self, i: usize) -> &GaussianInt {
        &self.0[i]
    }
}

impl IndexMut<usize> for GaussVector {
    fn index_mut(&mut self, i: usize) -> &mut GaussianInt {
        &mut self.0[i]
    }
}

impl From<Vec<GaussianInt>> for GaussVector {
    fn from(v: Vec<GaussianInt>) -> Self {
        GaussVector(v)
    }
}

/// A dense square matrix of Gaussian integers, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussMatrix {
    dim: usize,
    entries: Vec<GaussianInt>,
}

impl GaussMatrix {
    pub fn zeros(dim: usize) -> Self {
        GaussMatrix {
            dim,
            entries: vec![GaussianInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = GaussianInt::one();
        }
        m
    }

    pub fn diagonal(diag: &[GaussianInt]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = d.clone();
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: Vec<Vec<GaussianInt>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(GaussMatrix { dim, entries })
    }

    /// Convenience constructor from `(re, im)` pairs.
    pub fn from_pairs(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&p| GaussianInt::from(p)).collect())
                .collect(),
        )
    }

    /// Convenience constructor for real integer matrices.
    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| GaussianInt::real(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<GaussianInt>> {
        self.entries.chunks(self.dim.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn entries(&self) -> &[GaussianInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GaussianInt::is_zero)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other,
            });
        }
        Ok(())
    }

    /// Exact matrix-vector product.
    pub fn apply(&self, v: &GaussVector) -> Result<GaussVector> {
        self.check_dim(v.len())?;
        let mut out = Vec::with_capacity(self.dim);
        for row in self.entries.chunks(self.dim.max(1)).take(self.dim) {
            let mut acc = GaussianInt::zero();
            for (m, x) in row.iter().zip(&v.0) {
                if !m.is_zero() && !x.is_zero() {
                    acc += m * x;
                }
            }
            out.push(acc);
        }
        Ok(GaussVector(out))
    }

    pub fn mul(&self, other: &GaussMatrix) -> Result<GaussMatrix> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = GaussMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GaussMatrix) -> Result<GaussMatrix> {
        self.check_dim(other.dim)?;
        Ok(GaussMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &GaussMatrix) -> Result<GaussMatrix> {
        self.check_dim(other.dim)?;
        Ok(GaussMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &GaussianInt) -> GaussMatrix {
        GaussMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> GaussMatrix {
        let n = self.dim;
        let mut out = GaussMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// `M^{αβ} = conj(M^{βα})` for every α, β.
    pub fn is_self_adjoint(&self) -> bool {
        self.first_non_self_adjoint().is_none()
    }

    pub(crate) fn first_non_self_adjoint(&self) -> Option<(usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                if self[(i, j)] != self[(j, i)].conj() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Exact commutator `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &GaussMatrix) -> Result<GaussMatrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn commutes(&self, other: &GaussMatrix) -> Result<bool> {
        Ok(self.commutator(other)?.is_zero())
    }

    /// Evaluates the integer-coefficient polynomial `Σ c_k M^k`.
    pub fn polynomial(&self, coeffs: &[GaussianInt]) -> GaussMatrix {
        // Horner: ((c_d M + c_{d-1}) M + ...) + c_0
        let id = GaussMatrix::identity(self.dim);
        let mut acc = GaussMatrix::zeros(self.dim);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self).expect("same dim");
            acc = acc.add(&id.scale(c)).expect("same dim");
        }
        acc
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.entries.iter().map(GaussianInt::to_complex).collect()
    }

    /// Largest `|entry|` as a float, used to scale solver tolerances.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.to_complex().norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for GaussMatrix {
    type Output = GaussianInt;
    fn index(&self, (i, j): (usize, usize)) -> &GaussianInt {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for GaussMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussianInt {
        &mut self.entries[i * self.dim + j]
    }
}

/// Row-major JSON: an array of rows of Gaussian-integer strings.
impl Serialize for GaussMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<GaussianInt>>::deserialize(d)?;
        GaussMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// A dense square matrix of ordinary integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let dim = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), dim, "square input");
                r.iter().map(|&x| BigInt::from(x))
            })
            .collect();
        IntMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Integer matrix-vector product.
    pub fn apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(self
            .entries
            .chunks(self.dim.max(1))
            .take(self.dim)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(m, _)| !m.is_zero())
                    .map(|(m, x)| m * x)
                    .sum()
            })
            .collect())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn apply_identity() {
        let v = GaussVector(vec![g(3, 1), g(-2, 0)]);
        assert_eq!(GaussMatrix::identity(2).apply(&v).unwrap(), v);
    }

    #[test]
    fn apply_pauli_x() {
        let m = GaussMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        let out = m.apply(&GaussVector::from_ints(&[1, 0])).unwrap();
        assert_eq!(out, GaussVector::from_ints(&[0, 1]));
    }

    #[test]
    fn apply_hand_multiplied() {
        // [[1, 1+i], [1-i, 0]] (1, 0) = (1, 1-i)
        let m = GaussMatrix::from_pairs(&[&[(1, 0), (1, 1)], &[(1, -1), (0, 0)]]).unwrap();
        let out = m.apply(&GaussVector::from_ints(&[1, 0])).unwrap();
        assert_eq!(out, GaussVector(vec![g(1, 0), g(1, -1)]));
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let m = GaussMatrix::identity(3);
        assert_eq!(
            m.apply(&GaussVector::zeros(2)),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn self_adjointness() {
        let sx = GaussMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(sx.is_self_adjoint());
        let bad = GaussMatrix::from_pairs(&[&[(0, 0), (0, 1)], &[(0, 1), (0, 0)]]).unwrap();
        assert!(!bad.is_self_adjoint());
        let m = GaussMatrix::from_pairs(&[&[(2, 0), (1, 1)], &[(1, -1), (-3, 0)]]).unwrap();
        assert!(m.is_self_adjoint());
        // an imaginary diagonal entry is never self-adjoint
        let d = GaussMatrix::diagonal(&[g(0, 1)]);
        assert!(!d.is_self_adjoint());
    }

    #[test]
    fn commutation() {
        let h = GaussMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(GaussMatrix::identity(2).commutes(&h).unwrap());
        assert!(h.commutes(&h).unwrap());
        // 3 + 2H + H^2
        let p = h.polynomial(&[g(3, 0), g(2, 0), g(1, 0)]);
        assert_eq!(p, GaussMatrix::from_ints(&[&[4, 2], &[2, 4]]).unwrap());
        assert!(p.commutes(&h).unwrap());
        let sz = GaussMatrix::from_ints(&[&[1, 0], &[0, -1]]).unwrap();
        assert!(!sz.commutes(&h).unwrap());
        assert!(sz.commutes(&GaussMatrix::identity(3)).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![g(1, 0), g(0, 0)], vec![g(1, 0)]];
        assert!(matches!(
            GaussMatrix::from_rows(rows),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = GaussMatrix::from_pairs(&[&[(2, 0), (1, 1)], &[(1, -1), (-3, 0)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["2+0i","1+1i"],["1-1i","-3+0i"]]"#);
        let back: GaussMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
