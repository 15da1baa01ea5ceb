//! Position and momentum on a truncated spatial lattice.
//!
//! Sites `r = −R … R` with `X_{rs} = l·r·δ_{rs}` and
//! `P_{rs} = −i(δ_{r,s−1} − δ_{r,s+1})/2l`. Expectation values are computed
//! with stencils; [`build_xp`] returns the dense matrices for inspection.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::cmatrix::{inner, CMatrix};
use crate::error::{Error, Result};

/// Sites within this distance of either edge must be (almost) empty.
pub const GUARD_SITES: usize = 3;
/// Largest amplitude tolerated inside the guard band.
pub const GUARD_THRESHOLD: f64 = 1e-8;
/// Slack allowed in inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-10;

/// Dense `X` and `P` on `2R+1` sites.
pub fn build_xp(half_width: usize, l: f64) -> Result<(CMatrix, CMatrix)> {
    if half_width < 1 {
        return Err(Error::Invalid("lattice half-width must be at least 1".into()));
    }
    check_spacing(l)?;
    let n = 2 * half_width + 1;
    let mut x = CMatrix::zeros(n);
    let mut p = CMatrix::zeros(n);
    for i in 0..n {
        x[(i, i)] = Complex64::new(l * (i as f64 - half_width as f64), 0.0);
        if i + 1 < n {
            p[(i, i + 1)] = Complex64::new(0.0, -1.0 / (2.0 * l));
            p[(i + 1, i)] = Complex64::new(0.0, 1.0 / (2.0 * l));
        }
    }
    Ok((x, p))
}

fn check_spacing(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("lattice spacing must be positive, got {l}")))
    }
}

/// Amplitudes on sites `−R … R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeState {
    amplitudes: Vec<Complex64>,
    l: f64,
}

impl LatticeState {
    /// `amplitudes` must have odd length `2R+1`.
    pub fn new(amplitudes: Vec<Complex64>, l: f64) -> Result<Self> {
        check_spacing(l)?;
        if amplitudes.len() % 2 == 0 {
            return Err(Error::Invalid(format!(
                "lattice needs an odd number of sites, got {}",
                amplitudes.len()
            )));
        }
        Ok(LatticeState { amplitudes, l })
    }

    /// Normalized copy of `amplitudes` placed at sites `first, first+1, …`
    /// inside a lattice of half-width `R`.
    pub fn from_support(first: i64, support: &[Complex64], half_width: usize, l: f64) -> Result<Self> {
        let n = 2 * half_width + 1;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
        for (k, a) in support.iter().enumerate() {
            let idx = first + k as i64 + half_width as i64;
            if !(0..n as i64).contains(&idx) {
                return Err(Error::OutOfRange {
                    index: first + k as i64,
                    lo: -(half_width as i64),
                    hi: half_width as i64,
                });
            }
            amplitudes[idx as usize] = *a;
        }
        Self::new(amplitudes, l)?.normalized()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn spacing(&self) -> f64 {
        self.l
    }

    pub fn half_width(&self) -> usize {
        self.amplitudes.len() / 2
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm_sqr: n * n });
        }
        for a in self.amplitudes.iter_mut() {
            *a /= n;
        }
        Ok(self)
    }

    /// First site inside the guard band holding a non-negligible amplitude.
    pub fn guard_violation(&self) -> Option<(i64, f64)> {
        let r = self.half_width() as i64;
        self.amplitudes.iter().enumerate().find_map(|(i, a)| {
            let site = i as i64 - r;
            let in_band = site.abs() > r - GUARD_SITES as i64;
            (in_band && a.norm() >= GUARD_THRESHOLD).then_some((site, a.norm()))
        })
    }

    fn site(&self, i: usize) -> f64 {
        self.l * (i as f64 - self.half_width() as f64)
    }

    fn apply_p(&self) -> Vec<Complex64> {
        let a = &self.amplitudes;
        let n = a.len();
        let c = Complex64::new(0.0, -1.0 / (2.0 * self.l));
        (0..n)
            .map(|i| {
                let up = if i + 1 < n { a[i + 1] } else { Complex64::new(0.0, 0.0) };
                let down = if i > 0 { a[i - 1] } else { Complex64::new(0.0, 0.0) };
                c * (up - down)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub delta_x: f64,
    pub delta_p: f64,
    pub product: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub commutator_im: f64,
    /// `|⟨[X,P]⟩|/2`.
    pub robertson_rhs: f64,
    /// `|1 + l²⟨P²⟩/2|`, the stated lattice bound.
    pub paper_rhs: f64,
    /// `½|1 + l²⟨P²⟩/2|`, the same bound in the `ΔXΔP ≥ ½` normalization.
    pub paper_rhs_half: f64,
    /// `½|1 − l²⟨P²⟩/2|`, the expansion of the commutator term.
    pub derived_rhs: f64,
    pub satisfied_robertson: bool,
    pub satisfied_paper: bool,
    pub satisfied_paper_half: bool,
    pub satisfied_derived: bool,
}

/// Moments and bounds of a normalized, guarded state.
pub fn uncertainty_report(state: &LatticeState) -> Result<UncertaintyReport> {
    if !state.is_normalized() {
        return Err(Error::NotNormalized {
            norm_sqr: state.norm_sqr(),
        });
    }
    if let Some((site, amplitude)) = state.guard_violation() {
        return Err(Error::BoundaryGuard { site, amplitude });
    }
    Ok(report_unchecked(state))
}

fn report_unchecked(state: &LatticeState) -> UncertaintyReport {
    let a = &state.amplitudes;
    let l = state.l;
    let (mut mx, mut mx2) = (0.0, 0.0);
    for (i, z) in a.iter().enumerate() {
        let x = state.site(i);
        let w = z.norm_sqr();
        mx += w * x;
        mx2 += w * x * x;
    }
    let pa = state.apply_p();
    let mp = inner(a, &pa).re;
    let mp2 = inner(&pa, &pa).re;
    // ⟨[X,P]⟩ = (i/2)·Σ conj(a_r)(a_{r+1} + a_{r−1})
    let hop: f64 = a.windows(2).map(|w| (w[0].conj() * w[1]).re).sum();
    let commutator_im = hop;
    let delta_x = (mx2 - mx * mx).max(0.0).sqrt();
    let delta_p = (mp2 - mp * mp).max(0.0).sqrt();
    let product = delta_x * delta_p;
    let robertson_rhs = commutator_im.abs() / 2.0;
    let paper_rhs = (1.0 + l * l * mp2 / 2.0).abs();
    let paper_rhs_half = paper_rhs / 2.0;
    let derived_rhs = (1.0 - l * l * mp2 / 2.0).abs() / 2.0;
    let ok = |rhs: f64| product >= rhs - INEQUALITY_SLACK;
    UncertaintyReport {
        delta_x,
        delta_p,
        product,
        mean_x: mx,
        mean_p: mp,
        mean_p2: mp2,
        commutator_im,
        robertson_rhs,
        paper_rhs,
        paper_rhs_half,
        derived_rhs,
        satisfied_robertson: ok(robertson_rhs),
        satisfied_paper: ok(paper_rhs),
        satisfied_paper_half: ok(paper_rhs_half),
        satisfied_derived: ok(derived_rhs),
    }
}

/// Discrete Gaussian `exp(−(rl)²/4σ²)·e^{ikrl}`, normalized.
pub fn gaussian_state(half_width: usize, l: f64, sigma: f64, k: f64) -> Result<LatticeState> {
    check_spacing(l)?;
    if !(sigma > 0.0) {
        return Err(Error::Invalid(format!("σ must be positive, got {sigma}")));
    }
    let r = half_width as i64;
    let amps = (-r..=r)
        .map(|s| {
            let x = s as f64 * l;
            Complex64::from_polar((-x * x / (4.0 * sigma * sigma)).exp(), k * x)
        })
        .collect();
    LatticeState::new(amps, l)?.normalized()
}

/// Random normalized state supported on `|r| ≤ R − GUARD_SITES − 1`, with
/// amplitude components uniform in `[−1, 1]` and a random support width.
pub fn random_guarded_state<R: Rng>(rng: &mut R, half_width: usize, l: f64) -> Result<LatticeState> {
    if half_width <= GUARD_SITES {
        return Err(Error::Invalid(format!(
            "half-width {half_width} leaves no sites inside the guard band"
        )));
    }
    let inner_r = (half_width - GUARD_SITES - 1) as i64;
    let lo = rng.gen_range(-inner_r..=inner_r);
    let hi = rng.gen_range(lo..=inner_r);
    loop {
        let support: Vec<Complex64> = (lo..=hi)
            .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect();
        if support.iter().any(|z| z.norm() > 1e-6) {
            return LatticeState::from_support(lo, &support, half_width, l);
        }
    }
}

/// A family of short trial states: `sites` consecutive amplitudes centred on
/// the origin, real or with free phases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TrialFamily {
    pub sites: usize,
    pub complex: bool,
}

impl TrialFamily {
    fn parameter_count(&self) -> usize {
        if self.complex {
            2 * self.sites
        } else {
            self.sites
        }
    }

    fn amplitudes(&self, params: &[f64]) -> Vec<Complex64> {
        (0..self.sites)
            .map(|k| {
                let im = if self.complex { params[self.sites + k] } else { 0.0 };
                Complex64::new(params[k], im)
            })
            .collect()
    }

    fn state(&self, params: &[f64], l: f64, half_width: usize) -> Option<LatticeState> {
        let first = -((self.sites as i64 - 1) / 2);
        LatticeState::from_support(first, &self.amplitudes(params), half_width, l).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinDeltaXResult {
    pub l: f64,
    /// Smallest `ΔX` found among states with `ΔXΔP ≥ (1 − tol)·½|1 + l²⟨P²⟩/2|`.
    pub delta_x_min: f64,
    pub target: f64,
    /// `(found − target)/target`.
    pub relative_discrepancy: f64,
    /// `ΔXΔP` divided by the bound at the optimum; 1 means saturated.
    pub saturation_ratio: f64,
    pub family: TrialFamily,
    pub amplitudes: Vec<Complex64>,
    pub report: UncertaintyReport,
    pub evaluations: usize,
}

/// Constrained minimum of `ΔX` over the given trial families: coarse grid
/// followed by pattern-search refinement of the best grid points.
pub fn min_delta_x_search(
    l: f64,
    half_width: usize,
    families: &[TrialFamily],
    saturation_tolerance: f64,
) -> Result<MinDeltaXResult> {
    check_spacing(l)?;
    if families.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if let Some(f) = families.iter().find(|f| f.sites < 1 || f.sites > 2 * half_width + 1 - 2 * GUARD_SITES) {
        return Err(Error::Invalid(format!(
            "trial family with {} sites does not fit a lattice of half-width {half_width}",
            f.sites
        )));
    }
    let mut evaluations = 0usize;
    let mut objective = |fam: &TrialFamily, p: &[f64]| -> f64 {
        evaluations += 1;
        let Some(st) = fam.state(p, l, half_width) else {
            return f64::INFINITY;
        };
        let r = report_unchecked(&st);
        if r.product >= (1.0 - saturation_tolerance) * r.paper_rhs_half {
            r.delta_x
        } else {
            f64::INFINITY
        }
    };

    let grid: Vec<f64> = (0..=10).map(|k| -1.0 + 0.2 * k as f64).collect();
    let mut best: Option<(f64, TrialFamily, Vec<f64>)> = None;
    for fam in families {
        let dims = fam.parameter_count();
        // The first amplitude is fixed to 1 on the grid (overall scale is free),
        // imaginary parts start on {0, ±0.6}.
        let mut seeds: Vec<(f64, Vec<f64>)> = Vec::new();
        let free = fam.sites - 1;
        let mut idx = vec![0usize; free];
        loop {
            let mut p = vec![0.0; dims];
            p[0] = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                p[k + 1] = grid[i];
            }
            let imag_choices: &[f64] = if fam.complex { &[0.0, 0.6, -0.6] } else { &[0.0] };
            let im_count = if fam.complex { fam.sites } else { 0 };
            let mut jdx = vec![0usize; im_count];
            loop {
                for (k, &j) in jdx.iter().enumerate() {
                    p[fam.sites + k] = imag_choices[j];
                }
                let v = objective(fam, &p);
                if v.is_finite() {
                    seeds.push((v, p.clone()));
                }
                if !advance(&mut jdx, imag_choices.len()) {
                    break;
                }
            }
            if !advance(&mut idx, grid.len()) {
                break;
            }
        }
        seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (v0, p0) in seeds.into_iter().take(5) {
            let (v, p) = pattern_search(|p| objective(fam, p), v0, p0);
            if best.as_ref().map_or(true, |b| v < b.0) {
                best = Some((v, *fam, p));
            }
        }
    }
    let Some((_, family, params)) = best else {
        return Err(Error::EmptyFamily);
    };
    let st = family
        .state(&params, l, half_width)
        .expect("optimum is a valid state");
    let report = report_unchecked(&st);
    let target = l / 2f64.sqrt();
    Ok(MinDeltaXResult {
        l,
        delta_x_min: report.delta_x,
        target,
        relative_discrepancy: (report.delta_x - target) / target,
        saturation_ratio: report.product / report.paper_rhs_half,
        family,
        amplitudes: family.amplitudes(&params),
        report,
        evaluations,
    })
}

/// Odometer increment; false once every digit wrapped.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Compass search with step halving down to `1e-7`.
fn pattern_search<F: FnMut(&[f64]) -> f64>(mut f: F, mut value: f64, mut p: Vec<f64>) -> (f64, Vec<f64>) {
    let mut step = 0.1;
    while step > 1e-7 {
        let mut improved = false;
        for k in 0..p.len() {
            for dir in [1.0, -1.0] {
                let mut q = p.clone();
                q[k] += dir * step;
                let v = f(&q);
                if v < value {
                    value = v;
                    p = q;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (value, p)
}

/// `ΔX` of the symmetric two-site state `(|−1⟩ + |1⟩)/√2`, equal to `l`.
pub fn two_site_delta_x(l: f64) -> Result<f64> {
    let c = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let st = LatticeState::from_support(-1, &[c, z, c], 1 + GUARD_SITES + 1, l)?;
    Ok(uncertainty_report(&st)?.delta_x)
}

/// Analytic momentum of a plane-wave-modulated Gaussian for `σ ≫ l`.
pub fn plane_wave_momentum(k: f64, l: f64) -> f64 {
    (k * l).sin() / l
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::task_rng;

    #[test]
    fn xp_matrices() {
        let (x, p) = build_xp(1, 0.5).unwrap();
        assert_eq!(x[(0, 0)].re, -0.5);
        assert_eq!(x[(1, 1)].re, 0.0);
        assert_eq!(x[(2, 2)].re, 0.5);
        assert_eq!(p[(1, 2)], Complex64::new(0.0, -1.0));
        assert_eq!(p[(1, 0)], Complex64::new(0.0, 1.0));

        let (x, p) = build_xp(5, 0.7).unwrap();
        let comm = x.mul(&p).sub(&p.mul(&x));
        for i in 1usize..10 {
            for j in 0..11 {
                let expected = if i.abs_diff(j) == 1 { Complex64::new(0.0, 0.5) } else { Complex64::new(0.0, 0.0) };
                assert!((comm[(i, j)] - expected).norm() < 1e-15);
            }
        }
        let p2 = p.mul(&p);
        for m in [&x, &p, &p2] {
            assert!(m.hermiticity_defect() < 1e-12);
        }
        // [X,P] is anti-Hermitian, so i[X,P] is Hermitian
        let mut i_comm = CMatrix::zeros(11);
        for r in 0..11 {
            for s in 0..11 {
                i_comm[(r, s)] = comm[(r, s)] * Complex64::i();
            }
        }
        assert!(i_comm.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn stencils_match_dense_matrices() {
        let mut rng = task_rng(2, 0);
        let st = random_guarded_state(&mut rng, 12, 0.3).unwrap();
        let (x, p) = build_xp(12, 0.3).unwrap();
        let a = st.amplitudes();
        let r = uncertainty_report(&st).unwrap();
        assert!((inner(a, &x.apply(a)).re - r.mean_x).abs() < 1e-12);
        assert!((inner(a, &p.apply(a)).re - r.mean_p).abs() < 1e-12);
        assert!((inner(a, &p.mul(&p).apply(a)).re - r.mean_p2).abs() < 1e-10);
        let comm = x.mul(&p).sub(&p.mul(&x));
        assert!((inner(a, &comm.apply(a)).im - r.commutator_im).abs() < 1e-12);
    }

    #[test]
    fn single_site_state() {
        let st = LatticeState::from_support(0, &[Complex64::new(1.0, 0.0)], 6, 1.0).unwrap();
        let r = uncertainty_report(&st).unwrap();
        assert_eq!(r.delta_x, 0.0);
        assert_eq!(r.robertson_rhs, 0.0);
        assert!(r.satisfied_robertson);
        assert!(!r.satisfied_paper_half);
    }

    #[test]
    fn two_site_state() {
        assert!((two_site_delta_x(0.25).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn robertson_on_random_states() {
        let mut rng = task_rng(8, 0);
        for _ in 0..300 {
            let st = random_guarded_state(&mut rng, 10, 1.0).unwrap();
            assert!(uncertainty_report(&st).unwrap().satisfied_robertson);
        }
    }

    #[test]
    fn wide_gaussian_reaches_half() {
        let st = gaussian_state(120, 1.0, 12.0, 0.0).unwrap();
        let r = uncertainty_report(&st).unwrap();
        assert!((r.product - 0.5).abs() / 0.5 < 0.05, "{r:?}");
        assert!((r.delta_x - 12.0).abs() / 12.0 < 0.01);
    }

    #[test]
    fn plane_wave_momentum_matches() {
        let (l, k) = (1.0, 0.7);
        let st = gaussian_state(150, l, 15.0, k).unwrap();
        let r = uncertainty_report(&st).unwrap();
        assert!((r.mean_p - plane_wave_momentum(k, l)).abs() < 1e-3);
    }

    #[test]
    fn guard_and_norm_errors() {
        let mut a = vec![Complex64::new(0.0, 0.0); 13];
        a[0] = Complex64::new(1.0, 0.0);
        let st = LatticeState::new(a, 1.0).unwrap();
        assert!(matches!(uncertainty_report(&st), Err(Error::BoundaryGuard { site: -6, .. })));
        let st = LatticeState::new(vec![Complex64::new(0.5, 0.0); 13], 1.0).unwrap();
        assert!(matches!(uncertainty_report(&st), Err(Error::NotNormalized { .. })));
        assert!(matches!(min_delta_x_search(1.0, 8, &[], 0.0), Err(Error::EmptyFamily)));
    }

    #[test]
    fn constrained_minimum() {
        let fams = [
            TrialFamily { sites: 2, complex: false },
            TrialFamily { sites: 3, complex: false },
            TrialFamily { sites: 4, complex: false },
        ];
        let r = min_delta_x_search(1.0, 8, &fams, 0.0).unwrap();
        assert!(r.report.satisfied_paper_half);
        assert!(r.delta_x_min > 0.79 && r.delta_x_min < 0.82, "{r:?}");
        assert!((r.saturation_ratio - 1.0).abs() < 1e-3);
    }
}
