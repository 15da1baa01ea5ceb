//! Floating-point spectral analysis and the closed-form solution.
//!
//! With `2 sin φ̂ = H`, the leapfrog solution is
//!
//! ```text
//! ψ_n = (2 cos φ̂)⁻¹ ( e^{−inφ̂}[e^{iφ̂}ψ_0 + ψ_1] + (−1)ⁿ e^{inφ̂}[e^{−iφ̂}ψ_0 − ψ_1] )
//! ```
//!
//! evaluated here in the eigenbasis of `H`.

mod cycle;
mod jacobi;

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

pub use cycle::{detect_cycle, is_scalar_multiple, ontology_scan, CycleReport, OntologyReport, SliceClass};
pub use jacobi::symmetric_eigen;

use crate::cmatrix::{inner, norm, CMatrix};
use crate::engine::{evolve, CAHistory};
use crate::error::{Error, Result};
use crate::exact::{GaussMatrix, GaussVector, HamiltonianSpec};

/// Off-diagonal tolerance of the Jacobi sweeps, relative to the matrix norm.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

/// Eigenvalues within this distance of ±2 are treated as sitting on the band edge.
pub const BAND_EDGE_TOLERANCE: f64 = 1e-9;

/// Eigen-decomposition of a self-adjoint Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    /// Dimensionless eigenvalues `lε_α`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, one column per eigenvalue.
    #[serde(serialize_with = "serialize_columns")]
    pub eigenvectors: CMatrix,
    /// All `|lε_α| ≤ 2`.
    pub admissible: bool,
}

fn serialize_columns<S: serde::Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let cols: Vec<Vec<[f64; 2]>> = (0..m.dim())
        .map(|j| m.column(j).iter().map(|z| [z.re, z.im]).collect())
        .collect();
    cols.serialize(s)
}

impl SpectralData {
    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Every `|lε_α| < 2 − margin`.
    pub fn strictly_admissible(&self, margin: f64) -> bool {
        self.max_abs_eigenvalue() < 2.0 - margin
    }

    /// `max |V·diag(lε)·V† − H|`.
    pub fn reconstruction_residual(&self, h: &GaussMatrix) -> f64 {
        let v = &self.eigenvectors;
        let d = CMatrix::from_real_diagonal(&self.eigenvalues);
        v.mul(&d).mul(&v.adjoint()).sub(&CMatrix::from_gauss(h)).max_abs()
    }

    /// Eigenvalues as CSV, columns `index, l_epsilon`.
    pub fn write_eigenvalues_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "l_epsilon"])?;
        for (k, e) in self.eigenvalues.iter().enumerate() {
            w.write_record([k.to_string(), format!("{e:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Eigen-decomposition of a complex self-adjoint matrix through the real
/// symmetric embedding `[[A, −B], [B, A]]` of `H = A + iB`.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.dim();
    let m = 2 * n;
    let mut emb = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            emb[i * m + j] = z.re;
            emb[(i + n) * m + (j + n)] = z.re;
            emb[i * m + (j + n)] = -z.im;
            emb[(i + n) * m + j] = z.im;
        }
    }
    let (eig, vecs) = symmetric_eigen(&emb, m, JACOBI_TOLERANCE);

    // Each eigenvalue of H appears twice; the pair (u, v), (−v, u) maps to
    // one complex vector u + iv up to phase. Keep one per pair by complex
    // Gram-Schmidt in eigenvalue order.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig[a].total_cmp(&eig[b]));
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &k in &order {
        if accepted.len() == n {
            break;
        }
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(vecs[i * m + k], vecs[(i + n) * m + k]))
            .collect();
        for q in &accepted {
            let c = inner(q, &z);
            for (zi, qi) in z.iter_mut().zip(q) {
                *zi -= c * qi;
            }
        }
        let r = norm(&z);
        if r > 0.5 {
            for zi in z.iter_mut() {
                *zi /= r;
            }
            accepted.push(z);
        }
    }
    assert_eq!(accepted.len(), n, "embedding must yield a full complex basis");

    let mut pairs: Vec<(f64, Vec<Complex64>)> = accepted
        .into_iter()
        .map(|z| (inner(&z, &h.apply(&z)).re, z))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vmat = CMatrix::zeros(n);
    for (j, (_, z)) in pairs.iter().enumerate() {
        for i in 0..n {
            vmat[(i, j)] = z[i];
        }
    }
    (pairs.into_iter().map(|p| p.0).collect(), vmat)
}

fn compute_spectrum(h: &HamiltonianSpec) -> SpectralData {
    let (eigenvalues, eigenvectors) = hermitian_eigen(&CMatrix::from_gauss(h.matrix()));
    let admissible = eigenvalues
        .iter()
        .all(|e| e.abs() <= 2.0 + BAND_EDGE_TOLERANCE);
    SpectralData {
        eigenvalues,
        eigenvectors,
        admissible,
    }
}

/// Spectrum of `H`, cached on the Hamiltonian after the first call.
pub fn spectrum(h: &HamiltonianSpec) -> SpectralData {
    h.spectrum_cell().get_or_init(|| compute_spectrum(h)).clone()
}

/// Largest exponential growth rate per step, `arccosh(|lε|/2)` over the
/// eigenvalues outside the band; zero when admissible.
pub fn growth_rate(s: &SpectralData) -> f64 {
    s.eigenvalues
        .iter()
        .filter(|e| e.abs() > 2.0)
        .map(|e| (e.abs() / 2.0).acosh())
        .fold(0.0, f64::max)
}

/// Closed-form evaluator for fixed initial data.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    vectors: CMatrix,
    phis: Vec<Complex64>,
    forward: Vec<Complex64>,
    backward: Vec<Complex64>,
    inadmissible: bool,
}

impl ClosedForm {
    /// Refuses spectra touching the band edge, where `cos φ = 0` makes the
    /// prefactor singular. Spectra beyond the edge are accepted, with
    /// [`ClosedForm::is_inadmissible`] set and a warning logged.
    pub fn new(psi0: &GaussVector, psi1: &GaussVector, h: &HamiltonianSpec) -> Result<Self> {
        let dim = h.dim();
        for v in [psi0, psi1] {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let spec = spectrum(h);
        if let Some(&e) = spec
            .eigenvalues
            .iter()
            .find(|e| (e.abs() - 2.0).abs() <= BAND_EDGE_TOLERANCE)
        {
            return Err(Error::SingularClosedForm { eigenvalue: e });
        }
        let inadmissible = !spec.admissible;
        if inadmissible {
            log::warn!(
                "spectrum leaves the band [−2, 2] (max |lε| = {}); closed form grows exponentially",
                spec.max_abs_eigenvalue()
            );
        }
        let v = &spec.eigenvectors;
        let vh = v.adjoint();
        let c0 = vh.apply(&psi0.to_complex());
        let c1 = vh.apply(&psi1.to_complex());
        let i = Complex64::i();
        let phis: Vec<Complex64> = spec
            .eigenvalues
            .iter()
            .map(|&e| Complex64::new(e / 2.0, 0.0).asin())
            .collect();
        let mut forward = Vec::with_capacity(dim);
        let mut backward = Vec::with_capacity(dim);
        for a in 0..dim {
            let phi = phis[a];
            let two_cos = 2.0 * phi.cos();
            forward.push(((i * phi).exp() * c0[a] + c1[a]) / two_cos);
            backward.push(((-i * phi).exp() * c0[a] - c1[a]) / two_cos);
        }
        Ok(ClosedForm {
            vectors: v.clone(),
            phis,
            forward,
            backward,
            inadmissible,
        })
    }

    pub fn is_inadmissible(&self) -> bool {
        self.inadmissible
    }

    /// `ψ_n` from the closed form.
    pub fn state(&self, n: i64) -> Vec<Complex64> {
        let i = Complex64::i();
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let nf = n as f64;
        let coeffs: Vec<Complex64> = self
            .phis
            .iter()
            .zip(self.forward.iter().zip(&self.backward))
            .map(|(&phi, (&f, &b))| (-i * phi * nf).exp() * f + sign * (i * phi * nf).exp() * b)
            .collect();
        self.vectors.apply(&coeffs)
    }

    /// Upper bound on `‖ψ_n‖` valid for every `n` when all phases are real.
    pub fn norm_bound(&self) -> f64 {
        norm(&self.forward) + norm(&self.backward)
    }
}

/// `ψ_n` evaluated from the closed form.
pub fn closed_form_state(
    psi0: &GaussVector,
    psi1: &GaussVector,
    h: &HamiltonianSpec,
    n: i64,
) -> Result<Vec<Complex64>> {
    Ok(ClosedForm::new(psi0, psi1, h)?.state(n))
}

/// Largest `‖ψ_n^{closed} − ψ_n‖ / ‖ψ_n‖` over a history (zero slices
/// compare absolutely).
pub fn closed_form_deviation(hist: &CAHistory) -> Result<f64> {
    let cf = ClosedForm::new(hist.state(0), hist.state(1), hist.hamiltonian())?;
    let mut worst: f64 = 0.0;
    for (n, s) in hist.states().iter().enumerate() {
        let exact = s.to_complex();
        let approx = cf.state(n as i64);
        let diff: Vec<Complex64> = exact.iter().zip(&approx).map(|(a, b)| a - b).collect();
        let scale = norm(&exact).max(1.0);
        worst = worst.max(norm(&diff) / scale);
    }
    Ok(worst)
}

/// Evolution operators `T(0) … T(k_max)` defined by
/// `ψ_n = T(n+1)ψ_1 + T(n)ψ_0`, generated by integer iteration.
///
/// Column `β` of `T(k)` is slice `k` of the run started from `(e_β, 0)`.
pub fn transfer_columns(h: &HamiltonianSpec, k_max: usize) -> Result<Vec<Vec<GaussVector>>> {
    let dim = h.dim();
    (0..dim)
        .map(|beta| {
            let run = evolve(&GaussVector::basis(dim, beta), &GaussVector::zeros(dim), h, k_max.max(1))?;
            Ok(run.into_states().into_iter().take(k_max + 1).collect())
        })
        .collect()
}

/// `T(k)·ψ` from precomputed columns.
pub fn apply_transfer(columns: &[Vec<GaussVector>], k: usize, psi: &GaussVector) -> GaussVector {
    let dim = psi.len();
    let mut out = GaussVector::zeros(dim);
    for (beta, col) in columns.iter().enumerate() {
        if psi[beta].is_zero() {
            continue;
        }
        out = out.add(&col[k].scale(&psi[beta])).expect("dims");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompositionReport {
    pub m: usize,
    pub n: usize,
    /// `ψ_n = T(n−m+1)ψ_{m+1} + T(n−m)ψ_m` holds exactly with integer `T`.
    pub exact_holds: bool,
    /// Relative deviation of the same identity with `T` from the closed
    /// form; `None` when the spectrum is not strictly inside the band.
    pub closed_form_deviation: Option<f64>,
}

/// Checks the composition law between slices `m < n` of a history.
pub fn composition_check(hist: &CAHistory, m: usize, n: usize) -> Result<CompositionReport> {
    let last = hist.last_index();
    if m >= n || n > last {
        return Err(Error::OutOfRange {
            index: if m >= n { m as i64 } else { n as i64 },
            lo: 0,
            hi: last as i64,
        });
    }
    let h = hist.hamiltonian();
    let k = n - m;
    let cols = transfer_columns(h, k + 1)?;
    let composed = apply_transfer(&cols, k + 1, hist.state(m + 1))
        .add(&apply_transfer(&cols, k, hist.state(m)))?;
    let exact_holds = &composed == hist.state(n);

    let dim = h.dim();
    let closed_form_deviation = if spectrum(h).strictly_admissible(BAND_EDGE_TOLERANCE) {
        let forms: Vec<ClosedForm> = (0..dim)
            .map(|b| ClosedForm::new(&GaussVector::basis(dim, b), &GaussVector::zeros(dim), h))
            .collect::<Result<_>>()?;
        let t_apply = |kk: usize, psi: &GaussVector| -> Vec<Complex64> {
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for (b, cf) in forms.iter().enumerate() {
                let coeff = psi[b].to_complex();
                for (o, x) in out.iter_mut().zip(cf.state(kk as i64)) {
                    *o += coeff * x;
                }
            }
            out
        };
        let a = t_apply(k + 1, hist.state(m + 1));
        let b = t_apply(k, hist.state(m));
        let target = hist.state(n).to_complex();
        let diff: Vec<Complex64> = a
            .iter()
            .zip(&b)
            .zip(&target)
            .map(|((x, y), t)| x + y - t)
            .collect();
        Some(norm(&diff) / norm(&target).max(1.0))
    } else {
        None
    };
    Ok(CompositionReport {
        m,
        n,
        exact_holds,
        closed_form_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::GaussianInt;
    use crate::random::{admissible_hamiltonian, gauss_vector, self_adjoint, task_rng};

    fn pauli() -> HamiltonianSpec {
        HamiltonianSpec::from_ints(&[&[0, 1], &[1, 0]]).unwrap()
    }

    #[test]
    fn pauli_spectrum() {
        let s = spectrum(&pauli());
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!(s.admissible);
    }

    #[test]
    fn diagonal_spectra() {
        let s = spectrum(&HamiltonianSpec::from_ints(&[&[2, 0], &[0, -2]]).unwrap());
        assert_eq!(s.eigenvalues.len(), 2);
        assert!((s.eigenvalues[0] + 2.0).abs() < 1e-12 && (s.eigenvalues[1] - 2.0).abs() < 1e-12);
        assert!(s.admissible);
        assert!(!spectrum(&HamiltonianSpec::from_ints(&[&[3]]).unwrap()).admissible);
    }

    #[test]
    fn reconstruction_residual_on_random_matrices() {
        let mut rng = task_rng(5, 0);
        for dim in 1..=12 {
            let h = self_adjoint(&mut rng, dim, 4);
            let s = spectrum(&h);
            let scale = h.matrix().max_abs().max(1.0);
            assert!(s.reconstruction_residual(h.matrix()) <= 1e-10 * scale);
            let v = &s.eigenvectors;
            let gram = v.adjoint().mul(v).sub(&CMatrix::identity(dim)).max_abs();
            assert!(gram < 1e-10);
        }
    }

    #[test]
    fn degenerate_complex_spectrum() {
        // σ_y ⊕ σ_y has eigenvalues ±1 twice each
        let m = GaussMatrix::from_pairs(&[
            &[(0, 0), (0, -1), (0, 0), (0, 0)],
            &[(0, 1), (0, 0), (0, 0), (0, 0)],
            &[(0, 0), (0, 0), (0, 0), (0, -1)],
            &[(0, 0), (0, 0), (0, 1), (0, 0)],
        ])
        .unwrap();
        let h = HamiltonianSpec::new(m).unwrap();
        let s = spectrum(&h);
        assert!(s.reconstruction_residual(h.matrix()) < 1e-12);
    }

    #[test]
    fn closed_form_pauli() {
        let h = pauli();
        let psi0 = GaussVector::from_ints(&[1, 0]);
        let psi1 = GaussVector::from_ints(&[0, 1]);
        let cf = ClosedForm::new(&psi0, &psi1, &h).unwrap();
        let close = |a: &[Complex64], b: &[Complex64]| {
            a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
        };
        assert!(close(&cf.state(6), &[Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)]));
        assert!(close(&cf.state(0), &psi0.to_complex()));
        assert!(close(&cf.state(1), &psi1.to_complex()));
    }

    #[test]
    fn closed_form_matches_iteration_on_random_admissible() {
        let mut rng = task_rng(9, 1);
        for _ in 0..10 {
            let h = admissible_hamiltonian(&mut rng, 3);
            let psi0 = gauss_vector(&mut rng, 3, 4);
            let psi1 = gauss_vector(&mut rng, 3, 4);
            let run = evolve(&psi0, &psi1, &h, 100).unwrap();
            assert!(closed_form_deviation(&run).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn closed_form_refuses_band_edge() {
        let h = HamiltonianSpec::from_ints(&[&[2]]).unwrap();
        let v = GaussVector::from_ints(&[1]);
        assert!(matches!(
            ClosedForm::new(&v, &v, &h),
            Err(Error::SingularClosedForm { .. })
        ));
    }

    #[test]
    fn closed_form_beyond_band_still_matches() {
        let h = HamiltonianSpec::from_ints(&[&[3]]).unwrap();
        let v = GaussVector::from_ints(&[1]);
        let cf = ClosedForm::new(&v, &v, &h).unwrap();
        assert!(cf.is_inadmissible());
        let run = evolve(&v, &v, &h, 20).unwrap();
        for n in 0..=20 {
            let exact = run.state(n).to_complex()[0];
            assert!((cf.state(n as i64)[0] - exact).norm() <= 1e-9 * exact.norm().max(1.0));
        }
    }

    #[test]
    fn composition_examples() {
        let h = pauli();
        let run = evolve(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &h,
            12,
        )
        .unwrap();
        let r = composition_check(&run, 2, 6).unwrap();
        assert!(r.exact_holds);
        assert!(r.closed_form_deviation.unwrap() < 1e-9);
        assert!(composition_check(&run, 5, 6).unwrap().exact_holds);
        assert!(composition_check(&run, 6, 6).is_err());
        assert!(composition_check(&run, 2, 13).is_err());

        let free = HamiltonianSpec::zero(2);
        let cols = transfer_columns(&free, 6).unwrap();
        for k in 0..=6 {
            let t = apply_transfer(&cols, k, &GaussVector::from_ints(&[3, -1]));
            if k % 2 == 0 {
                assert_eq!(t, GaussVector::from_ints(&[3, -1]));
            } else {
                assert!(t.is_zero());
            }
        }
        let v = GaussVector::from_pairs(&[(1, 2), (0, -1)]);
        let w = GaussVector::from_pairs(&[(4, 0), (1, 1)]);
        let run = evolve(&v, &w, &free, 9).unwrap();
        assert!(composition_check(&run, 3, 8).unwrap().exact_holds);
    }

    #[test]
    fn growth_rate_of_scalar() {
        let h = HamiltonianSpec::from_ints(&[&[3]]).unwrap();
        let rate = growth_rate(&spectrum(&h));
        assert!((rate - (1.5f64).acosh()).abs() < 1e-12);
        assert_eq!(growth_rate(&spectrum(&pauli())), 0.0);
    }

    #[test]
    fn csv_of_eigenvalues() {
        let mut buf = Vec::new();
        spectrum(&HamiltonianSpec::from_ints(&[&[1, 0], &[0, -1]]).unwrap())
            .write_eigenvalues_csv(&mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("index,l_epsilon\n0,-1"));
        let _ = GaussianInt::zero();
    }
}
