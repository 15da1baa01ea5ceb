//! Many-time multipartite automata.
//!
//! A tensor `Ψ^{α₁…α_m}_{n₁…n_m}` carries one clock `n_k` and one component
//! index `α_k` per subsystem. Storage is dense and row-major with all clock
//! indices first, so the component vector at a fixed clock tuple is
//! contiguous.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::cmatrix::{norm, CMatrix};
use crate::conservation::q_of_g;
use crate::continuum::{sinc_derivative_weights, sinc_weights, tail_estimate, Estimate, StationaryState};
use crate::engine::CAHistory;
use crate::error::{Error, Result};
use crate::exact::{GaussMatrix, GaussVector, GaussianInt, HamiltonianSpec};

/// Largest number of tensor entries accepted.
pub const TENSOR_CAP: usize = 10_000_000;

/// `d/dn[AB]`, the corrected product rule, and the naive Leibniz rule at one
/// interior index, with `ḟ_n = f_{n+1} − f_{n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeibnizReport {
    pub n: usize,
    pub derivative: BigInt,
    pub corrected: BigInt,
    pub naive: BigInt,
    pub corrected_holds: bool,
    pub naive_fails: bool,
}

pub fn leibniz_demo(a: &[BigInt], b: &[BigInt], n: usize) -> Result<LeibnizReport> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if n < 1 || n + 1 >= a.len() {
        return Err(Error::OutOfRange {
            index: n as i64,
            lo: 1,
            hi: a.len() as i64 - 2,
        });
    }
    let (ap, am, bp, bm) = (&a[n + 1], &a[n - 1], &b[n + 1], &b[n - 1]);
    let derivative = ap * bp - am * bm;
    let adot = ap - am;
    let bdot = bp - bm;
    // The two halves sum to an even integer.
    let twice = &adot * (bp + bm) + (ap + am) * &bdot;
    let corrected = twice / 2;
    let naive = &adot * &b[n] + &a[n] * &bdot;
    Ok(LeibnizReport {
        n,
        corrected_holds: corrected == derivative,
        naive_fails: naive != derivative,
        derivative,
        corrected,
        naive,
    })
}

fn row_major_strides(extents: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; extents.len()];
    for k in (0..extents.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * extents[k + 1];
    }
    strides
}

fn checked_product(extents: &[usize]) -> Option<usize> {
    extents.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e))
}

fn decode(mut flat: usize, extents: &[usize]) -> Vec<usize> {
    let mut out = vec![0; extents.len()];
    for k in (0..extents.len()).rev() {
        out[k] = flat % extents[k];
        flat /= extents[k];
    }
    out
}

/// Applies `h` to component axis `axis` of a product-space vector.
fn apply_on_axis(h: &GaussMatrix, axis: usize, dims: &[usize], v: &[GaussianInt]) -> Vec<GaussianInt> {
    let strides = row_major_strides(dims);
    let (d, s) = (dims[axis], strides[axis]);
    let mut out = vec![GaussianInt::zero(); v.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let a = (flat / s) % d;
        let base = flat - a * s;
        for b in 0..d {
            let hab = &h[(a, b)];
            let x = &v[base + b * s];
            if hab.is_zero() || x.is_zero() {
                continue;
            }
            *o += hab * x;
        }
    }
    out
}

/// `Σ_k 1⊗…⊗Ĥ_(k)⊗…⊗1 + ℐ` as one self-adjoint matrix on the product space.
pub fn lifted_hamiltonian(hams: &[HamiltonianSpec], interaction: Option<&GaussMatrix>) -> Result<HamiltonianSpec> {
    let dims: Vec<usize> = hams.iter().map(HamiltonianSpec::dim).collect();
    let total = checked_product(&dims).ok_or(Error::TensorCap {
        entries: usize::MAX,
        cap: TENSOR_CAP,
    })?;
    let mut rows = Vec::with_capacity(total);
    for col in 0..total {
        let mut e = vec![GaussianInt::zero(); total];
        e[col] = GaussianInt::one();
        let mut acc = vec![GaussianInt::zero(); total];
        for (k, h) in hams.iter().enumerate() {
            for (a, x) in acc.iter_mut().zip(apply_on_axis(h.matrix(), k, &dims, &e)) {
                *a += x;
            }
        }
        rows.push(acc);
    }
    // rows currently holds columns
    let mut m = vec![vec![GaussianInt::zero(); total]; total];
    for (c, column) in rows.into_iter().enumerate() {
        for (r, x) in column.into_iter().enumerate() {
            m[r][c] = x;
        }
    }
    let mut lifted = GaussMatrix::from_rows(m)?;
    if let Some(i) = interaction {
        lifted = lifted.add(i)?;
    }
    HamiltonianSpec::new(lifted)
}

#[derive(Clone, Debug)]
pub struct MultiHistory {
    dims: Vec<usize>,
    clocks: Vec<usize>,
    values: Vec<GaussianInt>,
    hams: Vec<HamiltonianSpec>,
    interaction: Option<GaussMatrix>,
    l: f64,
    factors: Option<Vec<CAHistory>>,
}

impl PartialEq for MultiHistory {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self.clocks == other.clocks
            && self.values == other.values
            && self.hams == other.hams
            && self.interaction == other.interaction
    }
}

impl MultiHistory {
    /// `values` are laid out as `[n₁ … n_m, α₁ … α_m]`, row-major.
    pub fn new(
        clocks: Vec<usize>,
        values: Vec<GaussianInt>,
        hams: Vec<HamiltonianSpec>,
        interaction: Option<GaussMatrix>,
        l: f64,
    ) -> Result<Self> {
        if hams.is_empty() {
            return Err(Error::Invalid("a multipartite history needs at least one subsystem".into()));
        }
        if clocks.len() != hams.len() {
            return Err(Error::DimensionMismatch {
                expected: hams.len(),
                found: clocks.len(),
            });
        }
        if clocks.contains(&0) {
            return Err(Error::Invalid("clock windows must be nonempty".into()));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Invalid(format!("scale l must be positive, got {l}")));
        }
        let dims: Vec<usize> = hams.iter().map(HamiltonianSpec::dim).collect();
        let entries = Self::entry_count(&clocks, &dims)?;
        if values.len() != entries {
            return Err(Error::DimensionMismatch {
                expected: entries,
                found: values.len(),
            });
        }
        let interaction = match interaction {
            Some(i) if i.is_zero() => None,
            other => other,
        };
        if let Some(i) = &interaction {
            let d = checked_product(&dims).unwrap_or(usize::MAX);
            if i.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: i.dim(),
                });
            }
            if let Some((row, col)) = i.first_non_self_adjoint() {
                return Err(Error::NotSelfAdjoint { row, col });
            }
        }
        Ok(MultiHistory {
            dims,
            clocks,
            values,
            hams,
            interaction,
            l,
            factors: None,
        })
    }

    fn entry_count(clocks: &[usize], dims: &[usize]) -> Result<usize> {
        let total = checked_product(clocks)
            .and_then(|c| checked_product(dims).and_then(|d| c.checked_mul(d)));
        match total {
            Some(n) if n <= TENSOR_CAP => Ok(n),
            Some(n) => Err(Error::TensorCap {
                entries: n,
                cap: TENSOR_CAP,
            }),
            None => Err(Error::TensorCap {
                entries: usize::MAX,
                cap: TENSOR_CAP,
            }),
        }
    }

    pub fn m(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn clocks(&self) -> &[usize] {
        &self.clocks
    }

    pub fn values(&self) -> &[GaussianInt] {
        &self.values
    }

    pub fn hamiltonians(&self) -> &[HamiltonianSpec] {
        &self.hams
    }

    /// `None` when `ℐ = 0`.
    pub fn interaction(&self) -> Option<&GaussMatrix> {
        self.interaction.as_ref()
    }

    pub fn scale(&self) -> f64 {
        self.l
    }

    /// The single histories this tensor was built from, if any.
    pub fn factors(&self) -> Option<&[CAHistory]> {
        self.factors.as_deref()
    }

    /// Product-space dimension `Π dim_k`.
    pub fn component_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn clock_flat(&self, n: &[usize]) -> Result<usize> {
        if n.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: n.len(),
            });
        }
        let mut flat = 0;
        for (&nk, &ck) in n.iter().zip(&self.clocks) {
            if nk >= ck {
                return Err(Error::OutOfRange {
                    index: nk as i64,
                    lo: 0,
                    hi: ck as i64 - 1,
                });
            }
            flat = flat * ck + nk;
        }
        Ok(flat)
    }

    fn component_flat(&self, alpha: &[usize]) -> Result<usize> {
        if alpha.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: alpha.len(),
            });
        }
        let mut flat = 0;
        for (&a, &d) in alpha.iter().zip(&self.dims) {
            if a >= d {
                return Err(Error::OutOfRange {
                    index: a as i64,
                    lo: 0,
                    hi: d as i64 - 1,
                });
            }
            flat = flat * d + a;
        }
        Ok(flat)
    }

    /// Component vector at clock tuple `n`.
    pub fn slice(&self, n: &[usize]) -> Result<&[GaussianInt]> {
        let d = self.component_dim();
        let c = self.clock_flat(n)?;
        Ok(&self.values[c * d..(c + 1) * d])
    }

    pub fn get(&self, n: &[usize], alpha: &[usize]) -> Result<&GaussianInt> {
        let a = self.component_flat(alpha)?;
        Ok(&self.slice(n)?[a])
    }

    /// Copy with one entry replaced; the result no longer records factors.
    pub fn with_entry(&self, n: &[usize], alpha: &[usize], value: GaussianInt) -> Result<Self> {
        let idx = self.clock_flat(n)? * self.component_dim() + self.component_flat(alpha)?;
        let mut out = self.clone();
        out.values[idx] = value;
        out.factors = None;
        Ok(out)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.clocks != other.clocks || self.dims != other.dims {
            return Err(Error::Invalid("tensors differ in shape".into()));
        }
        if self.hams != other.hams || self.interaction != other.interaction {
            return Err(Error::Invalid("tensors evolve under different Hamiltonians".into()));
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: &GaussianInt, other: &Self, b: &GaussianInt) -> Result<Self> {
        self.same_shape(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(MultiHistory {
            values,
            factors: None,
            ..self.clone()
        })
    }

    /// For `m = 1`, the tensor as an ordinary history.
    pub fn to_history(&self) -> Result<CAHistory> {
        if self.m() != 1 {
            return Err(Error::Invalid(format!("tensor has {} subsystems, not 1", self.m())));
        }
        let d = self.dims[0];
        let states = self
            .values
            .chunks(d)
            .map(|c| GaussVector(c.to_vec()))
            .collect();
        CAHistory::new(states, self.hams[0].clone(), self.l)
    }

    fn is_interior(&self, n: &[usize]) -> bool {
        n.iter().zip(&self.clocks).all(|(&nk, &ck)| nk >= 1 && nk + 1 < ck)
    }

    fn check_interior(&self, n: &[usize]) -> Result<()> {
        self.clock_flat(n)?;
        for (&nk, &ck) in n.iter().zip(&self.clocks) {
            if nk < 1 || nk + 1 >= ck {
                return Err(Error::OutOfRange {
                    index: nk as i64,
                    lo: 1,
                    hi: ck as i64 - 2,
                });
            }
        }
        Ok(())
    }

    fn neighbour(&self, n: &[usize], axis: usize, up: bool) -> Vec<usize> {
        let mut m = n.to_vec();
        if up {
            m[axis] += 1;
        } else {
            m[axis] -= 1;
        }
        m
    }

    /// `Σ_k Ψ̇^(k)` at an interior clock tuple.
    fn total_dot(&self, n: &[usize]) -> Result<Vec<GaussianInt>> {
        let mut acc = vec![GaussianInt::zero(); self.component_dim()];
        for k in 0..self.m() {
            let up = self.slice(&self.neighbour(n, k, true))?;
            let down = self.slice(&self.neighbour(n, k, false))?;
            for ((a, u), d) in acc.iter_mut().zip(up).zip(down) {
                *a += u - d;
            }
        }
        Ok(acc)
    }

    /// `(Σ_k Ĥ_(k) + ℐ)·v` on the product space.
    fn total_hamiltonian_apply(&self, v: &[GaussianInt]) -> Result<Vec<GaussianInt>> {
        let mut acc = vec![GaussianInt::zero(); v.len()];
        for (k, h) in self.hams.iter().enumerate() {
            for (a, x) in acc.iter_mut().zip(apply_on_axis(h.matrix(), k, &self.dims, v)) {
                *a += x;
            }
        }
        if let Some(i) = &self.interaction {
            let iv = i.apply(&GaussVector(v.to_vec()))?;
            for (a, x) in acc.iter_mut().zip(iv.0) {
                *a += x;
            }
        }
        Ok(acc)
    }

    /// `Σ_k Ψ̇^(k) + i(Σ_k Ĥ_(k) + ℐ)Ψ` at clock tuple `n`, every component.
    pub fn eom_residual_vector(&self, n: &[usize]) -> Result<Vec<GaussianInt>> {
        self.check_interior(n)?;
        let dot = self.total_dot(n)?;
        let h = self.total_hamiltonian_apply(self.slice(n)?)?;
        Ok(dot.into_iter().zip(h).map(|(d, x)| d + x.mul_i()).collect())
    }

    /// Every interior clock tuple, in row-major order.
    pub fn interior_sites(&self) -> Vec<Vec<usize>> {
        let total: usize = self.clocks.iter().product();
        (0..total)
            .map(|f| decode(f, &self.clocks))
            .filter(|n| self.is_interior(n))
            .collect()
    }

    /// Residual at every interior site and component.
    pub fn residual_map(&self) -> Result<Vec<ResidualEntry>> {
        let mut out = Vec::new();
        for n in self.interior_sites() {
            for (a, value) in self.eom_residual_vector(&n)?.into_iter().enumerate() {
                out.push(ResidualEntry {
                    clock: n.clone(),
                    alpha: decode(a, &self.dims),
                    value,
                });
            }
        }
        Ok(out)
    }

    /// First interior clock tuple with a nonzero residual.
    pub fn first_eom_violation(&self) -> Result<Option<Vec<usize>>> {
        for n in self.interior_sites() {
            if self.eom_residual_vector(&n)?.iter().any(|x| !x.is_zero()) {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Action summand at one clock tuple:
    /// `Σ_k (1/2i)(Ψ†Ψ̇^(k) − Ψ̇^(k)†Ψ) + Ψ†(Σ_k Ĥ_(k) + ℐ)Ψ`.
    pub fn action_summand(&self, n: &[usize]) -> Result<GaussianInt> {
        self.check_interior(n)?;
        let psi = GaussVector(self.slice(n)?.to_vec());
        let dot = GaussVector(self.total_dot(n)?);
        let kinetic = (psi.inner(&dot)? - dot.inner(&psi)?)
            .checked_div(&GaussianInt::new(0, 2))
            .expect("Ψ†Ψ̇ − Ψ̇†Ψ is 2i times an integer");
        let h = GaussVector(self.total_hamiltonian_apply(&psi.0)?);
        Ok(kinetic + psi.inner(&h)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub clock: Vec<usize>,
    pub alpha: Vec<usize>,
    pub value: GaussianInt,
}

/// `Ψ_{n₁…n_m} = ψ_(1)(n₁) ⊗ … ⊗ ψ_(m)(n_m)` from solution histories.
pub fn build_product(histories: &[CAHistory]) -> Result<MultiHistory> {
    if histories.is_empty() {
        return Err(Error::Invalid("build_product needs at least one history".into()));
    }
    if let Some(k) = histories.iter().position(|h| !h.is_solution()) {
        return Err(Error::NotASolution(k));
    }
    let l = histories[0].scale();
    if histories.iter().any(|h| h.scale() != l) {
        return Err(Error::Invalid("factors use different scales l".into()));
    }
    let clocks: Vec<usize> = histories.iter().map(|h| h.last_index() + 1).collect();
    let dims: Vec<usize> = histories.iter().map(CAHistory::dim).collect();
    let entries = MultiHistory::entry_count(&clocks, &dims)?;
    let d: usize = dims.iter().product();
    let mut values = Vec::with_capacity(entries);
    let total_clock: usize = clocks.iter().product();
    for cf in 0..total_clock {
        let n = decode(cf, &clocks);
        for af in 0..d {
            let alpha = decode(af, &dims);
            let mut x = GaussianInt::one();
            for (k, h) in histories.iter().enumerate() {
                let c = &h.state(n[k])[alpha[k]];
                if c.is_zero() {
                    x = GaussianInt::zero();
                    break;
                }
                x = &x * c;
            }
            values.push(x);
        }
    }
    let hams = histories.iter().map(|h| h.hamiltonian().clone()).collect();
    let mut out = MultiHistory::new(clocks, values, hams, None, l)?;
    out.factors = Some(histories.to_vec());
    Ok(out)
}

/// Extends data on the corner clocks `{0,1}^m` to the full window by running
/// each axis's own leapfrog `Ψ(n+e_k) = Ψ(n−e_k) − iĤ_(k)Ψ(n)`. Only defined
/// without interaction, where the axes decouple.
///
/// `corners` has the usual layout with every clock extent equal to 2.
pub fn evolve_many_time(
    corners: &[GaussianInt],
    hams: &[HamiltonianSpec],
    clocks: &[usize],
    l: f64,
) -> Result<MultiHistory> {
    if clocks.len() != hams.len() {
        return Err(Error::DimensionMismatch {
            expected: hams.len(),
            found: clocks.len(),
        });
    }
    if let Some(&c) = clocks.iter().find(|&&c| c < 2) {
        return Err(Error::Invalid(format!("clock windows need at least 2 slices, got {c}")));
    }
    let dims: Vec<usize> = hams.iter().map(HamiltonianSpec::dim).collect();
    let d: usize = dims.iter().product();
    MultiHistory::entry_count(clocks, &dims)?;
    let mut extents = vec![2usize; clocks.len()];
    let corner_len = (1usize << clocks.len()) * d;
    if corners.len() != corner_len {
        return Err(Error::DimensionMismatch {
            expected: corner_len,
            found: corners.len(),
        });
    }
    let mut values = corners.to_vec();
    for (axis, h) in hams.iter().enumerate() {
        let mut next_extents = extents.clone();
        next_extents[axis] = clocks[axis];
        let strides = row_major_strides(&next_extents);
        let old_strides = row_major_strides(&extents);
        let total: usize = next_extents.iter().product();
        let mut next = Vec::with_capacity(total * d);
        for cf in 0..total {
            let n = decode(cf, &next_extents);
            if n[axis] < 2 {
                let old: usize = n.iter().zip(&old_strides).map(|(a, s)| a * s).sum();
                next.extend_from_slice(&values[old * d..(old + 1) * d]);
            } else {
                let back1 = (cf - strides[axis]) * d;
                let back2 = (cf - 2 * strides[axis]) * d;
                let hpsi = apply_on_axis(h.matrix(), axis, &dims, &next[back1..back1 + d]);
                let slice: Vec<GaussianInt> = next[back2..back2 + d]
                    .iter()
                    .zip(hpsi)
                    .map(|(p, x)| p + &x.mul_neg_i())
                    .collect();
                next.extend(slice);
            }
        }
        values = next;
        extents = next_extents;
    }
    MultiHistory::new(clocks.to_vec(), values, hams.to_vec(), None, l)
}

/// Exact residual of the many-time equation at one site and component.
pub fn multi_eom_residual(psi: &MultiHistory, n: &[usize], alpha: &[usize]) -> Result<GaussianInt> {
    let a = psi.component_flat(alpha)?;
    Ok(psi.eom_residual_vector(n)?.swap_remove(a))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiActionValue {
    pub value: GaussianInt,
    pub per_site: Vec<(Vec<usize>, GaussianInt)>,
}

/// Action summed over the clock box `window[k].0 ..= window[k].1` on every axis.
pub fn multi_action_eval(psi: &MultiHistory, window: &[(usize, usize)]) -> Result<MultiActionValue> {
    if window.len() != psi.m() {
        return Err(Error::DimensionMismatch {
            expected: psi.m(),
            found: window.len(),
        });
    }
    for (&(lo, hi), &c) in window.iter().zip(psi.clocks()) {
        if lo < 1 || lo > hi || hi + 2 > c {
            return Err(Error::OutOfRange {
                index: if lo < 1 || lo > hi { lo as i64 } else { hi as i64 },
                lo: 1,
                hi: c as i64 - 2,
            });
        }
    }
    let extents: Vec<usize> = window.iter().map(|&(lo, hi)| hi - lo + 1).collect();
    let total: usize = extents.iter().product();
    let mut per_site = Vec::with_capacity(total);
    let mut value = GaussianInt::zero();
    for f in 0..total {
        let n: Vec<usize> = decode(f, &extents)
            .into_iter()
            .zip(window)
            .map(|(x, &(lo, _))| x + lo)
            .collect();
        let s = psi.action_summand(&n)?;
        value += s.clone();
        per_site.push((n, s));
    }
    Ok(MultiActionValue { value, per_site })
}

/// Label attached to correlator reports: the per-axis construction is ours.
pub const CORRELATOR_CONSTRUCTION: &str = "per-axis two-time pattern (implementation choice)";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub construction: &'static str,
    /// `ℐ = 0`; otherwise the factorization claim does not apply.
    pub applicable: bool,
    pub sites_checked: usize,
    /// Whether `q_{G₁⊗G₂}(n₁,n₂) = q_{G₁}(n₁)·q_{G₂}(n₂)` on every site; `None`
    /// when the tensor does not record its factors.
    pub factorizes: Option<bool>,
    pub first_failure: Option<Vec<usize>>,
    /// Sites with nonzero `q_{G₁⊗G₂}q_{1⊗1} − q_{G₁⊗1}q_{1⊗G₂}`.
    pub connected_nonzero: usize,
    pub first_connected: Option<(Vec<usize>, GaussianInt)>,
}

/// `Σ_{(a,b)} Ψ(a)†(G₁⊗G₂)Ψ(b)` over `a_k, b_k ∈ {(n_k, n_k−1), (n_k−1, n_k)}`.
fn pair_correlator(psi: &MultiHistory, g1: &GaussMatrix, g2: &GaussMatrix, n: &[usize]) -> Result<GaussianInt> {
    let dims = psi.dims();
    let patterns = |nk: usize| [(nk, nk - 1), (nk - 1, nk)];
    let mut acc = GaussianInt::zero();
    for (a1, b1) in patterns(n[0]) {
        for (a2, b2) in patterns(n[1]) {
            let b = psi.slice(&[b1, b2])?;
            let gb = apply_on_axis(g1, 0, dims, &apply_on_axis(g2, 1, dims, b));
            let a = psi.slice(&[a1, a2])?;
            for (x, y) in a.iter().zip(&gb) {
                if !x.is_zero() && !y.is_zero() {
                    acc += &x.conj() * y;
                }
            }
        }
    }
    Ok(acc)
}

/// Two-subsystem correlator factorization and connected part.
pub fn correlation_check(psi: &MultiHistory, g1: &GaussMatrix, g2: &GaussMatrix) -> Result<CorrelationReport> {
    if psi.m() != 2 {
        return Err(Error::Invalid(format!(
            "pair correlators need 2 subsystems, tensor has {}",
            psi.m()
        )));
    }
    for (g, &d) in [g1, g2].into_iter().zip(psi.dims()) {
        if g.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: g.dim(),
            });
        }
    }
    let applicable = psi.interaction().is_none();
    let (i1, i2) = (GaussMatrix::identity(psi.dims()[0]), GaussMatrix::identity(psi.dims()[1]));
    let mut report = CorrelationReport {
        construction: CORRELATOR_CONSTRUCTION,
        applicable,
        sites_checked: 0,
        factorizes: psi.factors().map(|_| true),
        first_failure: None,
        connected_nonzero: 0,
        first_connected: None,
    };
    for n1 in 1..psi.clocks()[0] {
        for n2 in 1..psi.clocks()[1] {
            let n = [n1, n2];
            let q = pair_correlator(psi, g1, g2, &n)?;
            if let Some(f) = psi.factors() {
                let product = q_of_g(&f[0], g1, n1)? * q_of_g(&f[1], g2, n2)?;
                if product != q {
                    report.factorizes = Some(false);
                    report.first_failure.get_or_insert_with(|| n.to_vec());
                }
            }
            let connected = &q * &pair_correlator(psi, &i1, &i2, &n)?
                - pair_correlator(psi, g1, &i2, &n)? * pair_correlator(psi, &i1, g2, &n)?;
            if !connected.is_zero() {
                report.connected_nonzero += 1;
                report.first_connected.get_or_insert_with(|| (n.to_vec(), connected));
            }
            report.sites_checked += 1;
        }
    }
    Ok(report)
}

/// Floating-point tensor reconstructed separately along each clock axis.
#[derive(Clone, Debug)]
pub struct MultiSignal {
    dims: Vec<usize>,
    clocks: Vec<usize>,
    offsets: Vec<i64>,
    l: f64,
    values: Vec<Complex64>,
    ham: CMatrix,
    guard_fraction: f64,
    max_amplitude: f64,
}

impl MultiSignal {
    pub fn from_history(psi: &MultiHistory, guard_fraction: f64) -> Result<Self> {
        let lifted = lifted_hamiltonian(psi.hamiltonians(), psi.interaction())?;
        Self::new(
            psi.dims().to_vec(),
            psi.clocks().to_vec(),
            vec![0; psi.m()],
            psi.scale(),
            psi.values().iter().map(GaussianInt::to_complex).collect(),
            CMatrix::from_gauss(lifted.matrix()),
            guard_fraction,
        )
    }

    /// Product of stationary states, each sampled on `lo ..= hi`.
    pub fn stationary_product(states: &[StationaryState], lo: i64, hi: i64, guard_fraction: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Invalid("need at least one factor".into()));
        }
        if hi < lo {
            return Err(Error::Invalid(format!("empty sample range {lo}..={hi}")));
        }
        let l = states[0].l;
        if states.iter().any(|s| s.l != l) {
            return Err(Error::Invalid("factors use different scales l".into()));
        }
        let w = (hi - lo + 1) as usize;
        let dims: Vec<usize> = states.iter().map(|s| s.vector.len()).collect();
        let clocks = vec![w; states.len()];
        let entries = MultiHistory::entry_count(&clocks, &dims)?;
        let tables: Vec<Vec<Vec<Complex64>>> = states
            .iter()
            .map(|s| (lo..=hi).map(|n| s.sample(n)).collect())
            .collect();
        let d: usize = dims.iter().product();
        let mut values = Vec::with_capacity(entries);
        for cf in 0..entries / d {
            let n = decode(cf, &clocks);
            for af in 0..d {
                let alpha = decode(af, &dims);
                values.push(
                    (0..states.len())
                        .map(|k| tables[k][n[k]][alpha[k]])
                        .product::<Complex64>(),
                );
            }
        }
        let total_eps: f64 = states.iter().map(|s| s.l_epsilon).sum();
        let mut ham = CMatrix::zeros(d);
        for a in 0..d {
            ham[(a, a)] = Complex64::new(total_eps, 0.0);
        }
        Self::new(dims, clocks, vec![lo; states.len()], l, values, ham, guard_fraction)
    }

    fn new(
        dims: Vec<usize>,
        clocks: Vec<usize>,
        offsets: Vec<i64>,
        l: f64,
        values: Vec<Complex64>,
        ham: CMatrix,
        guard_fraction: f64,
    ) -> Result<Self> {
        if !(guard_fraction > 0.0 && guard_fraction <= 1.0) {
            return Err(Error::Invalid(format!(
                "guard fraction must lie in (0, 1], got {guard_fraction}"
            )));
        }
        let d: usize = dims.iter().product();
        let max_amplitude = values.chunks(d.max(1)).map(norm).fold(0.0, f64::max);
        Ok(MultiSignal {
            dims,
            clocks,
            offsets,
            l,
            values,
            ham,
            guard_fraction,
            max_amplitude,
        })
    }

    fn check_guard(&self, ts: &[f64]) -> Result<()> {
        if ts.len() != self.clocks.len() {
            return Err(Error::DimensionMismatch {
                expected: self.clocks.len(),
                found: ts.len(),
            });
        }
        for ((&t, &c), &o) in ts.iter().zip(&self.clocks).zip(&self.offsets) {
            let (a, b) = (o as f64, (o + c as i64 - 1) as f64);
            let centre = 0.5 * (a + b);
            let half = 0.5 * self.guard_fraction * (b - a);
            let (lo, hi) = ((centre - half) * self.l, (centre + half) * self.l);
            let eps = 1e-12 * self.l;
            if !(t.is_finite() && t >= lo - eps && t <= hi + eps) {
                return Err(Error::EdgeGuard { t, lo, hi });
            }
        }
        Ok(())
    }

    /// Contracts the clock axes against per-axis weight vectors.
    fn contract(&self, weights: &[Vec<f64>]) -> Vec<Complex64> {
        let d: usize = self.dims.iter().product();
        let mut cur = self.values.clone();
        for axis in (0..self.clocks.len()).rev() {
            let c = self.clocks[axis];
            let block = c * d;
            let w = &weights[axis];
            cur = cur
                .chunks(block)
                .flat_map(|chunk| {
                    let mut out = vec![Complex64::new(0.0, 0.0); d];
                    for (j, &wj) in w.iter().enumerate() {
                        if wj == 0.0 {
                            continue;
                        }
                        for (o, x) in out.iter_mut().zip(&chunk[j * d..(j + 1) * d]) {
                            *o += x * wj;
                        }
                    }
                    out
                })
                .collect();
        }
        cur
    }

    fn evaluate(&self, xs: &[f64], derivative_axis: Option<usize>) -> Estimate<Vec<Complex64>> {
        let weights: Vec<Vec<f64>> = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                if derivative_axis == Some(k) {
                    sinc_derivative_weights(x, self.offsets[k], self.clocks[k])
                } else {
                    sinc_weights(x, self.offsets[k], self.clocks[k])
                }
            })
            .collect();
        let lebesgue: Vec<f64> = weights.iter().map(|w| w.iter().map(|x| x.abs()).sum()).collect();
        let mut err = 0.0;
        for (k, &x) in xs.iter().enumerate() {
            let on_sample = derivative_axis != Some(k) && (x - x.round()).abs() <= 1e-12;
            if on_sample {
                continue;
            }
            let others: f64 = lebesgue
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, v)| v)
                .product();
            let tail = tail_estimate(x, self.offsets[k], self.clocks[k]);
            let factor = if derivative_axis == Some(k) { std::f64::consts::PI } else { 1.0 };
            err += factor * tail * others;
        }
        Estimate {
            value: self.contract(&weights),
            error_estimate: self.max_amplitude * err,
        }
    }

    /// `Ψ(t₁, …, t_m)`.
    pub fn value(&self, ts: &[f64]) -> Result<Estimate<Vec<Complex64>>> {
        self.check_guard(ts)?;
        let xs: Vec<f64> = ts.iter().map(|t| t / self.l).collect();
        Ok(self.evaluate(&xs, None))
    }

    /// `Σ_k [Ψ(t + l·e_k) − Ψ(t − l·e_k)] + i(Σ_k Ĥ_(k) + ℐ)Ψ(t)`.
    pub fn residual(&self, ts: &[f64]) -> Result<Estimate<Vec<Complex64>>> {
        self.check_guard(ts)?;
        let xs: Vec<f64> = ts.iter().map(|t| t / self.l).collect();
        let here = self.evaluate(&xs, None);
        let mut acc: Vec<Complex64> = self.ham.apply(&here.value).into_iter().map(|z| z * Complex64::i()).collect();
        let mut err = here.error_estimate * self.ham.max_abs() * self.ham.dim() as f64;
        for k in 0..xs.len() {
            for (sign, shift) in [(1.0, 1.0), (-1.0, -1.0)] {
                let mut ys = xs.clone();
                ys[k] += shift;
                let mut shifted_ts = ts.to_vec();
                shifted_ts[k] += shift * self.l;
                self.check_guard(&shifted_ts)?;
                let v = self.evaluate(&ys, None);
                err += v.error_estimate;
                for (a, x) in acc.iter_mut().zip(v.value) {
                    *a += sign * x;
                }
            }
        }
        Ok(Estimate {
            value: acc,
            error_estimate: err,
        })
    }

    /// `Σ_k ∂Ψ/∂t_k` at `(t, …, t)`.
    pub fn diagonal_derivative(&self, t: f64) -> Result<Estimate<Vec<Complex64>>> {
        let ts = vec![t; self.clocks.len()];
        self.check_guard(&ts)?;
        let x = t / self.l;
        let xs = vec![x; self.clocks.len()];
        let d: usize = self.dims.iter().product();
        let mut acc = vec![Complex64::new(0.0, 0.0); d];
        let mut err = 0.0;
        for k in 0..self.clocks.len() {
            let v = self.evaluate(&xs, Some(k));
            err += v.error_estimate / self.l;
            for (a, z) in acc.iter_mut().zip(v.value) {
                *a += z / self.l;
            }
        }
        Ok(Estimate {
            value: acc,
            error_estimate: err,
        })
    }

    /// `2l·dΨ/dt + i(Σ_k Ĥ_(k) + ℐ)Ψ` along identified clocks `t_k = t`.
    pub fn single_time_residual(&self, t: f64) -> Result<Estimate<Vec<Complex64>>> {
        let psi = self.value(&vec![t; self.clocks.len()])?;
        let dpsi = self.diagonal_derivative(t)?;
        let hpsi = self.ham.apply(&psi.value);
        let value = dpsi
            .value
            .iter()
            .zip(&hpsi)
            .map(|(dp, h)| 2.0 * self.l * dp + Complex64::i() * h)
            .collect();
        Ok(Estimate {
            value,
            error_estimate: 2.0 * self.l * dpsi.error_estimate
                + self.ham.max_abs() * self.ham.dim() as f64 * psi.error_estimate,
        })
    }
}

/// `multi_time_residual_continuum` on an exact tensor with the given guard.
pub fn multi_time_residual_continuum(psi: &MultiHistory, ts: &[f64], guard_fraction: f64) -> Result<Estimate<Vec<Complex64>>> {
    MultiSignal::from_history(psi, guard_fraction)?.residual(ts)
}

/// One row of the single-time limit sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleTimeRow {
    pub l: f64,
    pub residual_norm: f64,
    /// Residual relative to `‖(Σ_k Ĥ_(k))Ψ‖`.
    pub relative: f64,
    /// `|2·Σ_k lE_k − Σ_k lε_k| / |Σ_k lε_k|`, the exact value of `relative`
    /// for an infinite window.
    pub predicted: f64,
    pub error_estimate: f64,
}

/// Single-time limit for scalar stationary factors with physical energies
/// `eps` (so `Ĥ_(k) = l·ε_k`), at `t = 0` for each scale in `ls`.
pub fn single_time_limit(eps: &[f64], ls: &[f64], half_window: i64) -> Result<Vec<SingleTimeRow>> {
    let total_eps: f64 = eps.iter().sum();
    if total_eps == 0.0 {
        return Err(Error::Invalid("energies must not sum to zero".into()));
    }
    ls.iter()
        .map(|&l| {
            let states = eps
                .iter()
                .map(|&e| StationaryState::scalar(l * e, l))
                .collect::<Result<Vec<_>>>()?;
            let sig = MultiSignal::stationary_product(&states, -half_window, half_window, 0.5)?;
            let r = sig.single_time_residual(0.0)?;
            let psi = sig.value(&vec![0.0; eps.len()])?;
            let residual_norm = norm(&r.value);
            let scale = (l * total_eps).abs() * norm(&psi.value);
            let sum_le: f64 = states.iter().map(|s| s.energy * s.l).sum();
            Ok(SingleTimeRow {
                l,
                residual_norm,
                relative: residual_norm / scale,
                predicted: ((2.0 * sum_le - l * total_eps) / (l * total_eps)).abs(),
                error_estimate: r.error_estimate / scale,
            })
        })
        .collect()
}
