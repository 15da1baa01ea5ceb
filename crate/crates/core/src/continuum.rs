//! Bandlimited continuum picture of a discrete history.
//!
//! A window of samples `ψ_n` is mapped to `ψ(t) = Σ_n ψ_n sinc(π(t − nl)/l)`.
//! Sample sequences are finite, so values off the sample grid carry an error
//! estimate built from the first omitted tail terms, and evaluation is only
//! allowed in a central part of the window.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cmatrix::{inner, norm, CMatrix};
use crate::engine::CAHistory;
use crate::error::{Error, Result};

/// Default fraction of the window, around its centre, where evaluation is allowed.
pub const DEFAULT_GUARD_FRACTION: f64 = 0.5;

/// Offsets `t/l` this close to an integer are evaluated as that sample.
const SNAP: f64 = 1e-12;

/// Window of complex samples with the Hamiltonian they evolve under.
#[derive(Clone, Debug)]
pub struct ContinuumSignal {
    samples: Vec<Vec<Complex64>>,
    offset: i64,
    l: f64,
    ham: CMatrix,
    guard_fraction: f64,
    max_amplitude: f64,
}

/// A reconstructed quantity together with its truncation-error estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error_estimate: f64,
}

impl ContinuumSignal {
    /// `samples[k]` is `ψ_{offset+k}`.
    pub fn new(
        samples: Vec<Vec<Complex64>>,
        offset: i64,
        l: f64,
        ham: CMatrix,
        guard_fraction: f64,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Invalid("continuum signal needs at least one sample".into()));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Invalid(format!("scale l must be positive, got {l}")));
        }
        if !(guard_fraction > 0.0 && guard_fraction <= 1.0) {
            return Err(Error::Invalid(format!(
                "guard fraction must lie in (0, 1], got {guard_fraction}"
            )));
        }
        let dim = ham.dim();
        if let Some(bad) = samples.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        let max_amplitude = samples.iter().map(|s| norm(s)).fold(0.0, f64::max);
        Ok(ContinuumSignal {
            samples,
            offset,
            l,
            ham,
            guard_fraction,
            max_amplitude,
        })
    }

    /// Signal of a whole exact history, samples `ψ_0 … ψ_N`.
    pub fn from_history(hist: &CAHistory, guard_fraction: f64) -> Result<Self> {
        Self::new(
            hist.states().iter().map(|s| s.to_complex()).collect(),
            0,
            hist.scale(),
            CMatrix::from_gauss(hist.hamiltonian().matrix()),
            guard_fraction,
        )
    }

    pub fn scale(&self) -> f64 {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.ham.dim()
    }

    pub fn window_len(&self) -> usize {
        self.samples.len()
    }

    /// Sample indices covered, inclusive.
    pub fn sample_range(&self) -> (i64, i64) {
        (self.offset, self.offset + self.samples.len() as i64 - 1)
    }

    /// Allowed times `[t_lo, t_hi]`.
    pub fn guarded_interval(&self) -> (f64, f64) {
        let (a, b) = self.sample_range();
        let centre = 0.5 * (a + b) as f64;
        let half = 0.5 * self.guard_fraction * (b - a) as f64;
        ((centre - half) * self.l, (centre + half) * self.l)
    }

    fn check_guard(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.guarded_interval();
        let eps = SNAP * self.l;
        if t.is_finite() && t >= lo - eps && t <= hi + eps {
            Ok(())
        } else {
            Err(Error::EdgeGuard { t, lo, hi })
        }
    }

    /// `Some(n)` when `t` sits on sample `n`.
    fn snapped(&self, x: f64) -> Option<i64> {
        let r = x.round();
        ((x - r).abs() <= SNAP).then_some(r as i64)
    }

    /// Distances (in samples) from `x` to just outside either end of the window.
    fn tail_distances(&self, x: f64) -> (f64, f64) {
        let (a, b) = self.sample_range();
        (x - (a - 1) as f64, (b + 1) as f64 - x)
    }

    /// `ψ(t)`.
    pub fn value(&self, t: f64) -> Result<Estimate<Vec<Complex64>>> {
        self.check_guard(t)?;
        Ok(self.value_unguarded(t / self.l))
    }

    fn value_unguarded(&self, x: f64) -> Estimate<Vec<Complex64>> {
        let weights = sinc_weights(x, self.offset, self.samples.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (psi, &w) in self.samples.iter().zip(&weights) {
            if w == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(psi) {
                *o += p * w;
            }
        }
        let error_estimate = match self.snapped(x) {
            Some(n) if (self.sample_range().0..=self.sample_range().1).contains(&n) => 0.0,
            _ => self.max_amplitude * tail_estimate(x, self.offset, self.samples.len()),
        };
        Estimate {
            value: out,
            error_estimate,
        }
    }

    /// `d²ψ/dt²` from the twice-differentiated sinc series.
    pub fn second_derivative(&self, t: f64) -> Result<Estimate<Vec<Complex64>>> {
        self.check_guard(t)?;
        let x = t / self.l;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (k, psi) in self.samples.iter().enumerate() {
            let n = self.offset + k as i64;
            let w = PI * PI * sinc_second_derivative(PI * (x - n as f64));
            for (o, p) in out.iter_mut().zip(psi) {
                *o += p * w;
            }
        }
        let (lo, hi) = self.tail_distances(x);
        let scale = 1.0 / (self.l * self.l);
        for o in out.iter_mut() {
            *o *= scale;
        }
        Ok(Estimate {
            value: out,
            error_estimate: scale * 2.0 * self.max_amplitude * (1.0 / lo + 1.0 / hi),
        })
    }

    /// `ψ(t+l) − ψ(t−l) + iĤψ(t)`.
    pub fn modified_schrodinger_residual(&self, t: f64) -> Result<Estimate<Vec<Complex64>>> {
        for s in [t - self.l, t, t + self.l] {
            self.check_guard(s)?;
        }
        let x = t / self.l;
        let plus = self.value_unguarded(x + 1.0);
        let here = self.value_unguarded(x);
        let minus = self.value_unguarded(x - 1.0);
        let h_psi = self.ham.apply(&here.value);
        let i = Complex64::i();
        let value = plus
            .value
            .iter()
            .zip(&minus.value)
            .zip(&h_psi)
            .map(|((p, m), h)| p - m + i * h)
            .collect();
        let h_norm = self.ham.max_abs() * self.dim() as f64;
        Ok(Estimate {
            value,
            error_estimate: plus.error_estimate + minus.error_estimate + h_norm * here.error_estimate,
        })
    }

    /// `½·Re ψ†(t)(ψ(t+l) + ψ(t−l))`.
    pub fn q(&self, t: f64) -> Result<Estimate<f64>> {
        for s in [t - self.l, t, t + self.l] {
            self.check_guard(s)?;
        }
        let x = t / self.l;
        let plus = self.value_unguarded(x + 1.0);
        let here = self.value_unguarded(x);
        let minus = self.value_unguarded(x - 1.0);
        let sum: Vec<Complex64> = plus.value.iter().zip(&minus.value).map(|(a, b)| a + b).collect();
        let value = 0.5 * inner(&here.value, &sum).re;
        let error_estimate = 0.5
            * (here.error_estimate * (norm(&plus.value) + norm(&minus.value))
                + norm(&here.value) * (plus.error_estimate + minus.error_estimate)
                + here.error_estimate * (plus.error_estimate + minus.error_estimate));
        Ok(Estimate { value, error_estimate })
    }

    /// Compares `Q(t)` with its small-`l` expansion `ψ†ψ + (l²/2)·Re ψ†ψ''`.
    pub fn q_expansion(&self, t: f64) -> Result<QExpansion> {
        let q = self.q(t)?;
        let psi = self.value(t)?;
        let d2 = self.second_derivative(t)?;
        let leading = norm(&psi.value).powi(2) + 0.5 * self.l * self.l * inner(&psi.value, &d2.value).re;
        Ok(QExpansion {
            t,
            q: q.value,
            leading,
            difference: q.value - leading,
            error_estimate: q.error_estimate
                + 2.0 * norm(&psi.value) * psi.error_estimate
                + 0.5 * self.l * self.l * (norm(&psi.value) * d2.error_estimate + norm(&d2.value) * psi.error_estimate),
        })
    }

    /// Values, residual norm and `Q` on a grid of times. Residual and `Q`
    /// are `None` where `t ± l` leaves the guarded interval.
    pub fn sweep(&self, ts: &[f64]) -> Result<Vec<ContinuumRow>> {
        ts.iter()
            .map(|&t| {
                let psi = self.value(t)?;
                let residual = self.modified_schrodinger_residual(t).ok();
                let q = self.q(t).ok();
                Ok(ContinuumRow {
                    t,
                    psi: psi.value,
                    psi_error: psi.error_estimate,
                    residual_norm: residual.map(|r| norm(&r.value)),
                    q: q.map(|q| q.value),
                })
            })
            .collect()
    }
}

/// Interpolation weights `sinc(π(x − n))` for `n = offset … offset+len−1`,
/// exact one-hot when `x` sits on a sample.
pub(crate) fn sinc_weights(x: f64, offset: i64, len: usize) -> Vec<f64> {
    let r = x.round();
    if (x - r).abs() <= SNAP {
        let mut w = vec![0.0; len];
        let k = r as i64 - offset;
        if (0..len as i64).contains(&k) {
            w[k as usize] = 1.0;
            return w;
        }
    }
    let m = x.floor();
    let s = (PI * (x - m)).sin();
    (0..len)
        .map(|k| {
            let n = offset + k as i64;
            let sign = if (m as i64 - n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * s / (PI * (x - n as f64))
        })
        .collect()
}

/// `d/dx sinc(π(x − n))`.
pub(crate) fn sinc_derivative_weights(x: f64, offset: i64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| {
            let u = PI * (x - (offset + k as i64) as f64);
            let d = if u.abs() < 1e-3 {
                let u2 = u * u;
                -u / 3.0 + u * u2 / 30.0
            } else {
                let (s, c) = u.sin_cos();
                c / u - s / (u * u)
            };
            PI * d
        })
        .collect()
}

/// First-omitted-term tail estimate for a window `[offset, offset+len−1]`
/// evaluated at `x`, per unit sample amplitude.
pub(crate) fn tail_estimate(x: f64, offset: i64, len: usize) -> f64 {
    let lo = x - (offset - 1) as f64;
    let hi = (offset + len as i64) as f64 - x;
    1.0 / (PI * lo) + 1.0 / (PI * hi)
}

/// `d²/du² (sin u / u)`.
fn sinc_second_derivative(u: f64) -> f64 {
    if u.abs() < 1e-3 {
        let u2 = u * u;
        -1.0 / 3.0 + u2 / 10.0 - u2 * u2 / 168.0
    } else {
        let (s, c) = u.sin_cos();
        -s / u - 2.0 * c / (u * u) + 2.0 * s / (u * u * u)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QExpansion {
    pub t: f64,
    pub q: f64,
    pub leading: f64,
    /// `Q − (ψ†ψ + (l²/2)·Re ψ†ψ'')`, of order `l⁴`.
    pub difference: f64,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuumRow {
    pub t: f64,
    pub psi: Vec<Complex64>,
    pub psi_error: f64,
    pub residual_norm: Option<f64>,
    pub q: Option<f64>,
}

/// `ψ(t)` of a history with the default guard.
pub fn reconstruct(hist: &CAHistory, t: f64) -> Result<Estimate<Vec<Complex64>>> {
    ContinuumSignal::from_history(hist, DEFAULT_GUARD_FRACTION)?.value(t)
}

/// `ψ(t+l) − ψ(t−l) + iĤψ(t)` of a history with the default guard.
pub fn modified_schrodinger_residual(hist: &CAHistory, t: f64) -> Result<Estimate<Vec<Complex64>>> {
    ContinuumSignal::from_history(hist, DEFAULT_GUARD_FRACTION)?.modified_schrodinger_residual(t)
}

/// `½·Re ψ†(t)(ψ(t+l) + ψ(t−l))` of a history with the default guard.
pub fn continuum_q(hist: &CAHistory, t: f64) -> Result<Estimate<f64>> {
    ContinuumSignal::from_history(hist, DEFAULT_GUARD_FRACTION)?.q(t)
}

/// `E` with `lE = arcsin(lε/2)`.
pub fn dispersion(l_epsilon: f64, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Invalid(format!("scale l must be positive, got {l}")));
    }
    if !(l_epsilon.abs() <= 2.0) {
        return Err(Error::Inadmissible { eigenvalue: l_epsilon });
    }
    Ok((l_epsilon / 2.0).asin() / l)
}

/// Eigenvector `v` of `Ĥ` with eigenvalue `lε` and its energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryState {
    pub l_epsilon: f64,
    pub energy: f64,
    pub l: f64,
    pub vector: Vec<Complex64>,
}

impl StationaryState {
    pub fn new(l_epsilon: f64, l: f64, vector: Vec<Complex64>) -> Result<Self> {
        let energy = dispersion(l_epsilon, l)?;
        Ok(StationaryState {
            l_epsilon,
            energy,
            l,
            vector,
        })
    }

    /// One-component state `v = (1)`.
    pub fn scalar(l_epsilon: f64, l: f64) -> Result<Self> {
        Self::new(l_epsilon, l, vec![Complex64::new(1.0, 0.0)])
    }

    /// `ψ_n = e^{−inlE}·v`.
    ///
    /// The phase `n·lE` is split into its rounded product and the exact
    /// rounding remainder so that large `n` keep full relative accuracy.
    pub fn sample(&self, n: i64) -> Vec<Complex64> {
        let theta = self.energy * self.l;
        let nf = n as f64;
        let p = nf * theta;
        let rem = nf.mul_add(theta, -p);
        let (s, c) = p.sin_cos();
        let phase = Complex64::new(c, -s) * Complex64::new(1.0, -rem);
        self.vector.iter().map(|v| v * phase).collect()
    }

    /// The state's continuum signal over samples `lo ..= hi`, with `Ĥ` acting as `lε`.
    pub fn signal(&self, lo: i64, hi: i64, guard_fraction: f64) -> Result<ContinuumSignal> {
        if hi < lo {
            return Err(Error::Invalid(format!("empty sample range {lo}..={hi}")));
        }
        let dim = self.vector.len();
        let mut ham = CMatrix::zeros(dim);
        for k in 0..dim {
            ham[(k, k)] = Complex64::new(self.l_epsilon, 0.0);
        }
        ContinuumSignal::new(
            (lo..=hi).map(|n| self.sample(n)).collect(),
            lo,
            self.l,
            ham,
            guard_fraction,
        )
    }

    /// `e^{−iEt}·v`.
    pub fn exact(&self, t: f64) -> Vec<Complex64> {
        let phase = Complex64::new(0.0, -self.energy * t).exp();
        self.vector.iter().map(|v| v * phase).collect()
    }
}

/// Samples `ψ_0 … ψ_N` of a stationary state.
pub fn stationary_history(state: &StationaryState, steps: usize) -> Vec<Vec<Complex64>> {
    (0..=steps as i64).map(|n| state.sample(n)).collect()
}

/// `max_n ‖ψ_{n+1} − ψ_{n−1} + i·lε·ψ_n‖ / ‖v‖` over interior `n`.
pub fn stationary_discrete_residual(state: &StationaryState, samples: &[Vec<Complex64>]) -> f64 {
    let scale = norm(&state.vector).max(f64::MIN_POSITIVE);
    let i = Complex64::i();
    samples
        .windows(3)
        .map(|w| {
            let r: Vec<Complex64> = (0..w[1].len())
                .map(|a| w[2][a] - w[0][a] + i * state.l_epsilon * w[1][a])
                .collect();
            norm(&r) / scale
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::evolve;
    use crate::exact::{GaussVector, HamiltonianSpec};

    fn pauli_run(steps: usize) -> CAHistory {
        evolve(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &HamiltonianSpec::from_ints(&[&[0, 1], &[1, 0]]).unwrap(),
            steps,
        )
        .unwrap()
    }

    #[test]
    fn interpolates_samples_exactly() {
        let run = pauli_run(40).with_scale(0.5).unwrap();
        let sig = ContinuumSignal::from_history(&run, 0.5).unwrap();
        for n in 10..=30 {
            let v = sig.value(n as f64 * 0.5).unwrap();
            assert_eq!(v.value, run.state(n).to_complex());
            assert_eq!(v.error_estimate, 0.0);
        }
    }

    #[test]
    fn single_sample_at_half_step() {
        let samples: Vec<Vec<Complex64>> = (-4..=4)
            .map(|n| vec![Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0)])
            .collect();
        let sig = ContinuumSignal::new(samples, -4, 1.0, CMatrix::zeros(1), 0.5).unwrap();
        let v = sig.value(0.5).unwrap().value[0];
        assert!((v.re - 2.0 / PI).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn edge_guard() {
        let sig = ContinuumSignal::from_history(&pauli_run(40), 0.5).unwrap();
        assert_eq!(sig.guarded_interval(), (10.0, 30.0));
        assert!(matches!(sig.value(9.5), Err(Error::EdgeGuard { .. })));
        assert!(sig.value(10.0).is_ok());
        assert!(matches!(sig.q(10.0), Err(Error::EdgeGuard { .. })));
    }

    #[test]
    fn residual_at_samples_is_discrete_residual() {
        let run = pauli_run(40);
        let sig = ContinuumSignal::from_history(&run, 0.8).unwrap();
        for n in 6..=34 {
            let r = sig.modified_schrodinger_residual(n as f64).unwrap();
            assert!(norm(&r.value) == 0.0);
        }
        let bad = run.with_slice(20, GaussVector::from_ints(&[5, 5])).unwrap();
        let sig = ContinuumSignal::from_history(&bad, 0.8).unwrap();
        let r = |t: f64| norm(&sig.modified_schrodinger_residual(t).unwrap().value);
        assert!(r(19.0) > 1.0 && r(21.0) > 1.0 && r(20.0) > 1.0);
        assert_eq!(r(10.0), 0.0);
        assert!(r(19.5) > r(10.5));
    }

    #[test]
    fn midpoint_residual_shrinks_with_window() {
        let st = StationaryState::scalar(1.0, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for w in [256i64, 512, 1024, 2048, 4096] {
            let sig = st.signal(-w / 2, w / 2, 0.5).unwrap();
            let r = sig.modified_schrodinger_residual(0.5).unwrap();
            let n = norm(&r.value);
            assert!(n < last, "window {w}: {n} !< {last}");
            assert!(n <= r.error_estimate);
            last = n;
        }
    }

    #[test]
    fn reconstruction_tracks_exponential() {
        let st = StationaryState::scalar(1.0, 1.0).unwrap();
        let sig = st.signal(-2048, 2048, 0.5).unwrap();
        let est = sig.value(0.5).unwrap();
        let err = (est.value[0] - st.exact(0.5)[0]).norm();
        assert!(err <= est.error_estimate && err < 1e-3);
    }

    #[test]
    fn dispersion_values() {
        assert!((dispersion(2.0, 1.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(dispersion(0.0, 0.3).unwrap(), 0.0);
        assert!((dispersion(1.0, 1.0).unwrap() - PI / 6.0).abs() < 1e-15);
        assert!((dispersion(1.0, 0.5).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!(matches!(dispersion(2.1, 1.0), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn stationary_histories_solve_discrete_equation() {
        for le in [0.0, 1.0, 2.0, -1.3, 0.01] {
            let st = StationaryState::scalar(le, 1.0).unwrap();
            let h = stationary_history(&st, 5000);
            assert!(stationary_discrete_residual(&st, &h) <= 1e-12, "lε = {le}");
        }
        let st = StationaryState::scalar(0.0, 1.0).unwrap();
        assert!(stationary_history(&st, 5).iter().all(|s| s[0] == Complex64::new(1.0, 0.0)));
        assert!((2.0 * (PI / 6.0).sin() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_of_stationary_state() {
        let st = StationaryState::scalar(1.0, 1.0).unwrap();
        let sig = st.signal(-2048, 2048, 0.5).unwrap();
        let target = (PI / 6.0).cos();
        for t in [0.0, 0.25, 0.5, 3.3] {
            let q = sig.q(t).unwrap();
            assert!((q.value - target).abs() <= q.error_estimate.max(1e-12), "t = {t}");
        }
        let free = StationaryState::scalar(0.0, 1.0).unwrap().signal(-64, 64, 0.5).unwrap();
        assert!((free.q(0.0).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_expansion_is_fourth_order() {
        let st = StationaryState::scalar(0.4, 1.0).unwrap();
        let le = st.energy * st.l;
        let sig = st.signal(-2048, 2048, 0.5).unwrap();
        let exp = sig.q_expansion(0.0).unwrap();
        let predicted = le.powi(4) / 24.0 - le.powi(6) / 720.0;
        assert!(((exp.difference - predicted) / predicted).abs() < 0.01);
    }

    #[test]
    fn second_derivative_series_matches_closed_form_near_zero() {
        let a = sinc_second_derivative(0.999e-3);
        let b = {
            let u: f64 = 1.001e-3;
            let (s, c) = u.sin_cos();
            -s / u - 2.0 * c / (u * u) + 2.0 * s / (u * u * u)
        };
        assert!((a - b).abs() < 1e-6);
    }
}
