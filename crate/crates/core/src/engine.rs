//! Discrete dynamics of a single Hamiltonian automaton.
//!
//! The update rule is the second-order leapfrog
//! `ψ_{n+1} = ψ_{n−1} − i·H·ψ_n`, so a trajectory is fixed by the two
//! initial slices `ψ_0, ψ_1`. Everything here is exact Gaussian-integer
//! arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{GaussMatrix, GaussVector, GaussianInt, HamiltonianSpec};
use crate::random::{nonzero_gaussian_int, task_rng};

/// Largest number of slices a stored history may hold.
pub const DEFAULT_HISTORY_CAP: usize = 1 << 22;

/// An ordered run `ψ_0 … ψ_N` together with its Hamiltonian and time scale.
#[derive(Clone, Debug, PartialEq)]
pub struct CAHistory {
    states: Vec<GaussVector>,
    scale: f64,
    ham: HamiltonianSpec,
    solution: bool,
}

impl CAHistory {
    /// Wraps arbitrary slices. The result is not flagged as a solution even
    /// if it happens to satisfy the equations of motion.
    pub fn new(states: Vec<GaussVector>, ham: HamiltonianSpec, scale: f64) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::HistoryTooShort {
                needed: 2,
                found: states.len(),
            });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Invalid(format!("scale l must be positive, got {scale}")));
        }
        for s in &states {
            if s.len() != ham.dim() {
                return Err(Error::DimensionMismatch {
                    expected: ham.dim(),
                    found: s.len(),
                });
            }
        }
        Ok(CAHistory {
            states,
            scale,
            ham,
            solution: false,
        })
    }

    /// Like [`CAHistory::new`], but sets the `solution` flag after checking
    /// every interior slice against the equation of motion.
    pub fn new_checked(states: Vec<GaussVector>, ham: HamiltonianSpec, scale: f64) -> Result<Self> {
        let mut h = Self::new(states, ham, scale)?;
        h.solution = h.first_eom_violation().is_none();
        Ok(h)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Invalid(format!("scale l must be positive, got {scale}")));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn states(&self) -> &[GaussVector] {
        &self.states
    }

    pub fn state(&self, n: usize) -> &GaussVector {
        &self.states[n]
    }

    /// Index `N` of the last slice.
    pub fn last_index(&self) -> usize {
        self.states.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.ham.dim()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn hamiltonian(&self) -> &HamiltonianSpec {
        &self.ham
    }

    pub fn is_solution(&self) -> bool {
        self.solution
    }

    pub fn into_states(self) -> Vec<GaussVector> {
        self.states
    }

    /// `ψ̇_n = ψ_{n+1} − ψ_{n−1}` for `1 ≤ n ≤ N−1`.
    pub fn derivative(&self, n: usize) -> Result<GaussVector> {
        self.check_interior(n)?;
        self.states[n + 1].sub(&self.states[n - 1])
    }

    /// `ψ̇_n + i·H·ψ_n`, zero exactly where the equation of motion holds.
    pub fn eom_residual(&self, n: usize) -> Result<GaussVector> {
        let d = self.derivative(n)?;
        d.add(&self.ham.matrix().apply(&self.states[n])?.mul_i())
    }

    pub fn first_eom_violation(&self) -> Option<usize> {
        (1..self.last_index()).find(|&n| !self.eom_residual(n).expect("interior").is_zero())
    }

    /// Replaces one slice, clearing the `solution` flag.
    pub fn with_slice(&self, n: usize, psi: GaussVector) -> Result<Self> {
        if n > self.last_index() {
            return Err(Error::OutOfRange {
                index: n as i64,
                lo: 0,
                hi: self.last_index() as i64,
            });
        }
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.len(),
            });
        }
        let mut out = self.clone();
        out.states[n] = psi;
        out.solution = false;
        Ok(out)
    }

    /// Time reversal `ψ_n ↦ conj(ψ_{N−n})`, which solves the equation of
    /// motion for `conj(H)` whenever the original solves it for `H`.
    pub fn time_reversed(&self) -> CAHistory {
        let n = self.ham.dim();
        let mut hc = GaussMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                hc[(i, j)] = self.ham.matrix()[(i, j)].conj();
            }
        }
        CAHistory {
            states: self.states.iter().rev().map(GaussVector::conj).collect(),
            scale: self.scale,
            ham: HamiltonianSpec::new(hc).expect("conjugate of self-adjoint is self-adjoint"),
            solution: self.solution,
        }
    }

    fn check_interior(&self, n: usize) -> Result<()> {
        if n == 0 || n >= self.last_index() {
            return Err(Error::OutOfRange {
                index: n as i64,
                lo: 1,
                hi: self.last_index() as i64 - 1,
            });
        }
        Ok(())
    }
}

/// One leapfrog step: `ψ_prev − i·H·ψ_curr`.
pub fn evolve_step(
    psi_prev: &GaussVector,
    psi_curr: &GaussVector,
    ham: &HamiltonianSpec,
) -> Result<GaussVector> {
    let h_psi = ham.matrix().apply(psi_curr)?;
    psi_prev.add(&h_psi.mul_neg_i())
}

/// Iterates the leapfrog `steps` times from `(ψ_0, ψ_1)`, giving `ψ_0 … ψ_{steps}`.
pub fn evolve(
    psi0: &GaussVector,
    psi1: &GaussVector,
    ham: &HamiltonianSpec,
    steps: usize,
) -> Result<CAHistory> {
    evolve_capped(psi0, psi1, ham, steps, DEFAULT_HISTORY_CAP)
}

pub fn evolve_capped(
    psi0: &GaussVector,
    psi1: &GaussVector,
    ham: &HamiltonianSpec,
    steps: usize,
    cap: usize,
) -> Result<CAHistory> {
    if steps < 1 {
        return Err(Error::Invalid("evolve needs at least one step (N ≥ 1)".into()));
    }
    if steps + 1 > cap {
        return Err(Error::HistoryCap { cap });
    }
    for v in [psi0, psi1] {
        if v.len() != ham.dim() {
            return Err(Error::DimensionMismatch {
                expected: ham.dim(),
                found: v.len(),
            });
        }
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(psi0.clone());
    states.push(psi1.clone());
    for n in 2..=steps {
        let next = evolve_step(&states[n - 2], &states[n - 1], ham)?;
        states.push(next);
    }
    Ok(CAHistory {
        states,
        scale: 1.0,
        ham: ham.clone(),
        solution: true,
    })
}

/// The same trajectory written as integer pairs `ψ_n = x_n + i·p_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct XPHistory {
    pub xs: Vec<Vec<BigInt>>,
    pub ps: Vec<Vec<BigInt>>,
    pub ham: HamiltonianSpec,
}

impl XPHistory {
    pub fn recombine(&self) -> Vec<GaussVector> {
        self.xs
            .iter()
            .zip(&self.ps)
            .map(|(x, p)| {
                GaussVector(
                    x.iter()
                        .zip(p)
                        .map(|(a, b)| GaussianInt::new(a.clone(), b.clone()))
                        .collect(),
                )
            })
            .collect()
    }
}

/// Splits a Gaussian vector into its real and imaginary integer parts.
pub fn split_xp(psi: &GaussVector) -> (Vec<BigInt>, Vec<BigInt>) {
    psi.iter().map(|z| (z.re.clone(), z.im.clone())).unzip()
}

fn add3(a: &[BigInt], b: &[BigInt], c: &[BigInt], negate_b: bool) -> Vec<BigInt> {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((a, b), c)| if negate_b { a - b + c } else { a + b + c })
        .collect()
}

/// Leapfrog on the real form
/// `x_{n+1} = x_{n−1} + h_S p_n + h_A x_n`,
/// `p_{n+1} = p_{n−1} − h_S x_n + h_A p_n`.
///
/// Works on `h_S`, `h_A` directly and never forms complex numbers.
pub fn evolve_xp(
    x0: &[BigInt],
    p0: &[BigInt],
    x1: &[BigInt],
    p1: &[BigInt],
    ham: &HamiltonianSpec,
    steps: usize,
) -> Result<XPHistory> {
    if steps < 1 {
        return Err(Error::Invalid("evolve needs at least one step (N ≥ 1)".into()));
    }
    let dim = ham.dim();
    for v in [x0, p0, x1, p1] {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }
    let hs = ham.symmetric_part();
    let ha = ham.antisymmetric_part();
    let mut xs = vec![x0.to_vec(), x1.to_vec()];
    let mut ps = vec![p0.to_vec(), p1.to_vec()];
    for n in 1..steps {
        let (x, p) = (&xs[n], &ps[n]);
        let next_x = add3(&xs[n - 1], &hs.apply(p)?, &ha.apply(x)?, false);
        let next_p = add3(&ps[n - 1], &hs.apply(x)?, &ha.apply(p)?, true);
        xs.push(next_x);
        ps.push(next_p);
    }
    Ok(XPHistory {
        xs,
        ps,
        ham: ham.clone(),
    })
}

/// Windowed action with its per-step summands.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionValue {
    pub value: GaussianInt,
    /// Index of the first summand in `per_step`.
    pub first: usize,
    pub per_step: Vec<GaussianInt>,
}

/// Summand `n` of the action:
/// `(1/2i)(ψ*_n ψ̇_n − ψ̇*_n ψ_n) + ψ*_n H ψ_n`.
///
/// The first bracket equals `2i·Im(ψ*_n ψ̇_n)`, so the division by `2i` is
/// always exact.
pub fn action_summand(hist: &CAHistory, n: usize) -> Result<GaussianInt> {
    let psi = hist.state(n);
    let dot = hist.derivative(n)?;
    let a = psi.inner(&dot)?;
    let b = dot.inner(psi)?;
    let kinetic = (a - b)
        .checked_div(&GaussianInt::new(0, 2))
        .expect("ψ*ψ̇ − ψ̇*ψ is 2i times an integer");
    let potential = psi.inner(&hist.hamiltonian().matrix().apply(psi)?)?;
    Ok(kinetic + potential)
}

/// Sums the action over `lo ..= hi`. Endpoint slices are boundary data, so
/// the window must satisfy `1 ≤ lo ≤ hi ≤ N−1`.
pub fn action_eval(hist: &CAHistory, lo: usize, hi: usize) -> Result<ActionValue> {
    let last = hist.last_index();
    if lo < 1 || hi + 1 > last || lo > hi {
        return Err(Error::OutOfRange {
            index: if lo < 1 || lo > hi { lo as i64 } else { hi as i64 },
            lo: 1,
            hi: last as i64 - 1,
        });
    }
    let per_step = (lo..=hi)
        .map(|n| action_summand(hist, n))
        .collect::<Result<Vec<_>>>()?;
    let value = per_step.iter().cloned().sum();
    Ok(ActionValue {
        value,
        first: lo,
        per_step,
    })
}

/// A one-variable polynomial with integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn from_coeffs(c: &[i64]) -> Self {
        IntPoly(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly(c)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.0
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Formal derivative.
    pub fn derivative(&self) -> IntPoly {
        IntPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }
}

/// Integer-valued variation `[g(f+δf) − g(f−δf)] / 2δf`, and `0` for `δf = 0`.
///
/// `g(f+δ) − g(f−δ)` only contains odd powers of `δ` with even binomial
/// weights, so the division is exact for integer coefficients.
pub fn integer_variation(g: &IntPoly, f: &BigInt, delta: &BigInt) -> BigInt {
    if delta.is_zero() {
        return BigInt::zero();
    }
    let num = g.eval(&(f + delta)) - g.eval(&(f - delta));
    let den = BigInt::from(2) * delta;
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Which of the two independent variables of the action is varied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// `ψ*_n^α`; stationarity gives `ψ̇_n = −iHψ_n`.
    Conj,
    /// `ψ_n^α`; stationarity gives the adjoint equation.
    Plain,
}

/// Local piece of `2i·S` that contains every summand touching slice `n`,
/// with `ψ` and `χ = ψ*` held as independent arrays.
fn doubled_local_action(
    psi: &[GaussVector],
    chi: &[GaussVector],
    ham: &GaussMatrix,
    n: usize,
) -> GaussianInt {
    let two_i = GaussianInt::new(0, 2);
    let mut total = GaussianInt::zero();
    for k in n - 1..=n + 1 {
        let psi_dot = psi[k + 1].sub(&psi[k - 1]).expect("dims");
        let chi_dot = chi[k + 1].sub(&chi[k - 1]).expect("dims");
        let h_psi = ham.apply(&psi[k]).expect("dims");
        total += chi[k].dot(&psi_dot).expect("dims");
        total -= &chi_dot.dot(&psi[k]).expect("dims");
        total += &two_i * &chi[k].dot(&h_psi).expect("dims");
    }
    total
}

/// Exact coefficient of `δ` in the action variation at site `(n, α)`.
///
/// The action is linear in each of `ψ_n^α` and `ψ*_n^α` separately, so the
/// symmetric difference `[S(v+δ) − S(v−δ)] / 2δ` is independent of `δ` and
/// equals the partial derivative. Valid sites are `2 ≤ n ≤ N−2`, which keeps
/// every affected summand inside the action window `1 ..= N−1`.
pub fn variation_coefficient(
    hist: &CAHistory,
    n: usize,
    alpha: usize,
    slot: Slot,
    delta: &GaussianInt,
) -> Result<GaussianInt> {
    let last = hist.last_index();
    if n < 2 || n + 2 > last {
        return Err(Error::OutOfRange {
            index: n as i64,
            lo: 2,
            hi: last as i64 - 2,
        });
    }
    if alpha >= hist.dim() {
        return Err(Error::OutOfRange {
            index: alpha as i64,
            lo: 0,
            hi: hist.dim() as i64 - 1,
        });
    }
    if delta.is_zero() {
        return Ok(GaussianInt::zero());
    }
    let psi: Vec<GaussVector> = hist.states()[n - 2..=n + 2].to_vec();
    let chi: Vec<GaussVector> = psi.iter().map(GaussVector::conj).collect();
    let ham = hist.hamiltonian().matrix();
    let shifted = |sign: bool| {
        let (mut p, mut c) = (psi.clone(), chi.clone());
        let target = match slot {
            Slot::Plain => &mut p[2][alpha],
            Slot::Conj => &mut c[2][alpha],
        };
        if sign {
            *target += delta;
        } else {
            *target -= delta;
        }
        doubled_local_action(&p, &c, ham, 2)
    };
    let diff = shifted(true) - shifted(false);
    // diff = 2δ · (2i · coefficient)
    let den = delta * &GaussianInt::new(0, 4);
    Ok(diff
        .checked_div(&den)
        .expect("the action is linear in each variable"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteVariation {
    pub n: usize,
    pub alpha: usize,
    pub slot: Slot,
    pub delta: GaussianInt,
    pub coefficient: GaussianInt,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StationarityReport {
    pub checked: Vec<SiteVariation>,
    /// Sites `(n, α)` whose coefficient is nonzero.
    pub violations: Vec<(usize, usize)>,
}

impl StationarityReport {
    pub fn is_stationary(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, v: SiteVariation) {
        if !v.coefficient.is_zero() && !self.violations.contains(&(v.n, v.alpha)) {
            self.violations.push((v.n, v.alpha));
        }
        self.checked.push(v);
    }
}

/// Probes `trials` random sites with random nonzero Gaussian-integer
/// variations of both `ψ` and `ψ*`.
pub fn stationarity_check(hist: &CAHistory, trials: usize, rng_seed: u64) -> StationarityReport {
    let mut report = StationarityReport::default();
    let last = hist.last_index();
    if last < 4 {
        return report;
    }
    let mut rng = task_rng(rng_seed, 0);
    for _ in 0..trials {
        let n = rng.gen_range(2..=last - 2);
        let alpha = rng.gen_range(0..hist.dim());
        for slot in [Slot::Conj, Slot::Plain] {
            let delta = nonzero_gaussian_int(&mut rng, 5);
            let coefficient =
                variation_coefficient(hist, n, alpha, slot, &delta).expect("site in range");
            report.push(SiteVariation {
                n,
                alpha,
                slot,
                delta,
                coefficient,
            });
        }
    }
    report
}

/// Evaluates the variation coefficient at every site `2 ≤ n ≤ N−2`, every
/// component and both slots.
pub fn stationarity_scan(hist: &CAHistory) -> StationarityReport {
    let mut report = StationarityReport::default();
    let last = hist.last_index();
    if last < 4 {
        return report;
    }
    let one = GaussianInt::one();
    for n in 2..=last - 2 {
        for alpha in 0..hist.dim() {
            for slot in [Slot::Conj, Slot::Plain] {
                let coefficient =
                    variation_coefficient(hist, n, alpha, slot, &one).expect("site in range");
                report.push(SiteVariation {
                    n,
                    alpha,
                    slot,
                    delta: one.clone(),
                    coefficient,
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    fn pauli() -> HamiltonianSpec {
        HamiltonianSpec::from_ints(&[&[0, 1], &[1, 0]]).unwrap()
    }

    fn pauli_run(steps: usize) -> CAHistory {
        evolve(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &pauli(),
            steps,
        )
        .unwrap()
    }

    #[test]
    fn single_steps_match_hand_iteration() {
        let h = pauli();
        let psi2 = evolve_step(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &h,
        )
        .unwrap();
        assert_eq!(psi2, GaussVector(vec![g(1, -1), g(0, 0)]));
        let psi3 = evolve_step(&GaussVector::from_ints(&[0, 1]), &psi2, &h).unwrap();
        assert_eq!(psi3, GaussVector(vec![g(0, 0), g(0, -1)]));
    }

    #[test]
    fn zero_hamiltonian_returns_previous_slice() {
        let prev = GaussVector::from_pairs(&[(3, -2), (0, 7)]);
        let curr = GaussVector::from_pairs(&[(1, 1), (5, 0)]);
        assert_eq!(
            evolve_step(&prev, &curr, &HamiltonianSpec::zero(2)).unwrap(),
            prev
        );
    }

    #[test]
    fn pauli_sequence() {
        let h = pauli_run(7);
        let psi0 = h.state(0).clone();
        let psi1 = h.state(1).clone();
        assert_eq!(h.state(2), &psi0.scale(&g(1, -1)));
        assert_eq!(h.state(3), &psi1.scale(&g(0, -1)));
        assert_eq!(h.state(4), &psi0.scale(&g(0, -1)));
        assert_eq!(h.state(5), &psi1.scale(&g(-1, -1)));
        assert_eq!(h.state(6), &psi0.neg());
        assert_eq!(h.state(7), &psi1.neg());
        assert!(h.is_solution());
        assert_eq!(h.first_eom_violation(), None);
    }

    #[test]
    fn free_constant_history() {
        let psi = GaussVector::from_pairs(&[(2, 1)]);
        let h = evolve(&psi, &psi, &HamiltonianSpec::zero(1), 10).unwrap();
        assert!(h.states().iter().all(|s| s == &psi));
    }

    #[test]
    fn scalar_unit_hamiltonian() {
        // H = (1), ψ_0 = ψ_1 = 1: ψ_2 = 1 − i, ψ_3 = 1 − i(1 − i) = −i, ψ_4 = (1 − i) − 1 = −i
        let h = HamiltonianSpec::from_ints(&[&[1]]).unwrap();
        let one = GaussVector::from_ints(&[1]);
        let run = evolve(&one, &one, &h, 4).unwrap();
        assert_eq!(run.state(2)[0], g(1, -1));
        assert_eq!(run.state(3)[0], g(0, -1));
        assert_eq!(run.state(4)[0], g(0, -1));
    }

    #[test]
    fn evolve_rejects_bad_input() {
        let h = pauli();
        let v = GaussVector::from_ints(&[1, 0]);
        assert!(evolve(&v, &v, &h, 0).is_err());
        assert!(matches!(
            evolve(&v, &GaussVector::from_ints(&[1]), &h, 3),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            evolve_capped(&v, &v, &h, 10, 5),
            Err(Error::HistoryCap { cap: 5 })
        ));
    }

    #[test]
    fn xp_form_matches_pauli_sequence() {
        let h = pauli();
        let (x0, p0) = split_xp(&GaussVector::from_ints(&[1, 0]));
        let (x1, p1) = split_xp(&GaussVector::from_ints(&[0, 1]));
        let xp = evolve_xp(&x0, &p0, &x1, &p1, &h, 12).unwrap();
        assert_eq!(xp.recombine(), pauli_run(12).into_states());
    }

    #[test]
    fn xp_form_with_antisymmetric_part() {
        let m = GaussMatrix::from_pairs(&[&[(0, 0), (0, 1)], &[(0, -1), (0, 0)]]).unwrap();
        let h = HamiltonianSpec::new(m).unwrap();
        let psi0 = GaussVector::from_pairs(&[(2, -1), (0, 3)]);
        let psi1 = GaussVector::from_pairs(&[(1, 1), (-1, 0)]);
        let (x0, p0) = split_xp(&psi0);
        let (x1, p1) = split_xp(&psi1);
        let xp = evolve_xp(&x0, &p0, &x1, &p1, &h, 30).unwrap();
        assert_eq!(xp.recombine(), evolve(&psi0, &psi1, &h, 30).unwrap().into_states());
        // h_S = 0: x only feeds x and p only feeds p
        let xp_x_only = evolve_xp(&x0, &[0.into(), 0.into()], &x1, &[0.into(), 0.into()], &h, 30)
            .unwrap();
        assert!(xp_x_only.ps.iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn xp_form_free() {
        let h = HamiltonianSpec::zero(2);
        let x0 = vec![BigInt::from(1), BigInt::from(2)];
        let p0 = vec![BigInt::from(-3), BigInt::from(4)];
        let x1 = vec![BigInt::from(5), BigInt::from(6)];
        let p1 = vec![BigInt::from(7), BigInt::from(-8)];
        let xp = evolve_xp(&x0, &p0, &x1, &p1, &h, 9).unwrap();
        for n in 1..9 {
            assert_eq!(xp.xs[n + 1], xp.xs[n - 1]);
            assert_eq!(xp.ps[n + 1], xp.ps[n - 1]);
        }
    }

    #[test]
    fn action_vanishes_per_step_on_solutions() {
        let run = pauli_run(20);
        let a = action_eval(&run, 1, 19).unwrap();
        assert!(a.value.is_zero());
        assert!(a.per_step.iter().all(GaussianInt::is_zero));
    }

    #[test]
    fn action_of_zero_states() {
        let h = pauli();
        let z = GaussVector::zeros(2);
        let run = CAHistory::new(vec![z.clone(); 5], h, 1.0).unwrap();
        assert!(action_eval(&run, 1, 3).unwrap().value.is_zero());
    }

    #[test]
    fn action_of_constant_history_is_potential_only() {
        // dim 1, H = (2), ψ_n = c: each summand is 2|c|²
        let h = HamiltonianSpec::from_ints(&[&[2]]).unwrap();
        let c = GaussVector::from_pairs(&[(3, -2)]);
        let run = CAHistory::new(vec![c; 12], h, 1.0).unwrap();
        let m = 7;
        let a = action_eval(&run, 2, 2 + m - 1).unwrap();
        assert_eq!(a.value, GaussianInt::real(2 * m as i64 * 13));
    }

    #[test]
    fn action_window_bounds() {
        let run = pauli_run(6);
        assert!(action_eval(&run, 0, 3).is_err());
        assert!(action_eval(&run, 1, 6).is_err());
        assert!(action_eval(&run, 4, 3).is_err());
        assert!(action_eval(&run, 1, 5).is_ok());
    }

    #[test]
    fn integer_variation_examples() {
        let sq = IntPoly::monomial(2);
        let cube = IntPoly::monomial(3);
        for f in -10..=10 {
            let f = BigInt::from(f);
            assert_eq!(integer_variation(&sq, &f, &BigInt::one()), BigInt::from(2) * &f);
            assert_eq!(
                integer_variation(&cube, &f, &BigInt::one()),
                BigInt::from(3) * &f * &f + 1
            );
            assert!(integer_variation(&cube, &f, &BigInt::zero()).is_zero());
        }
    }

    #[test]
    fn stationarity_on_solution() {
        let run = pauli_run(24);
        let report = stationarity_check(&run, 50, 3);
        assert_eq!(report.checked.len(), 100);
        assert!(report.is_stationary());
        assert!(stationarity_scan(&run).is_stationary());
    }

    #[test]
    fn variation_coefficient_is_minus_i_times_residual() {
        let h = pauli();
        let run = pauli_run(12);
        let bad = run
            .with_slice(6, run.state(6).add(&GaussVector::from_ints(&[1, 0])).unwrap())
            .unwrap();
        for n in 2..=10 {
            let res = bad.eom_residual(n).unwrap();
            for alpha in 0..2 {
                let c = variation_coefficient(&bad, n, alpha, Slot::Conj, &g(2, -1)).unwrap();
                assert_eq!(c, res[alpha].mul_neg_i(), "n = {n}");
            }
        }
        let _ = h;
    }

    #[test]
    fn corrupted_slice_is_detected_next_to_it() {
        let run = pauli_run(16);
        let c = 8;
        let bad = run
            .with_slice(c, run.state(c).add(&GaussVector::from_ints(&[0, 1])).unwrap())
            .unwrap();
        let report = stationarity_scan(&bad);
        let sites: Vec<usize> = report.violations.iter().map(|&(n, _)| n).collect();
        assert!(sites.contains(&(c - 1)));
        assert!(sites.contains(&(c + 1)));
        assert!(sites.iter().all(|&n| n + 1 >= c && n <= c + 1));
    }

    #[test]
    fn zero_variation_is_a_no_op() {
        let run = pauli_run(8);
        for slot in [Slot::Conj, Slot::Plain] {
            assert!(variation_coefficient(&run, 3, 1, slot, &GaussianInt::zero())
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn time_reversal_for_real_hamiltonian() {
        let run = pauli_run(15);
        let rev = run.time_reversed();
        assert_eq!(rev.hamiltonian(), run.hamiltonian());
        let again = evolve(rev.state(0), rev.state(1), rev.hamiltonian(), 15).unwrap();
        assert_eq!(again.states(), rev.states());
    }
}
