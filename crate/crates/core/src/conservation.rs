//! Discrete conservation laws.
//!
//! For any `G` with `[G, H] = 0` the two-slice correlator
//! `q_G(n) = ψ*_n G ψ_{n−1} + ψ*_{n−1} G ψ_n` is the same at every `n` of a
//! solution history. `G = 1` gives the constraint that replaces state
//! normalization.

use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::engine::CAHistory;
use crate::error::{Error, Result};
use crate::exact::{big_to_f64, GaussMatrix, GaussVector, GaussianInt};

fn check_dim(hist: &CAHistory, g: &GaussMatrix) -> Result<()> {
    if g.dim() != hist.dim() {
        return Err(Error::DimensionMismatch {
            expected: hist.dim(),
            found: g.dim(),
        });
    }
    Ok(())
}

fn check_index(n: usize, lo: usize, hi: usize) -> Result<()> {
    if n < lo || n > hi {
        return Err(Error::OutOfRange {
            index: n as i64,
            lo: lo as i64,
            hi: hi as i64,
        });
    }
    Ok(())
}

fn pair_correlator(
    a: &GaussVector,
    b: &GaussVector,
    ga: &GaussVector,
    gb: &GaussVector,
) -> Result<GaussianInt> {
    // a† G b + b† G a, with G·a and G·b supplied
    Ok(a.inner(gb)? + b.inner(ga)?)
}

/// `q_G` at slice `n`, `1 ≤ n ≤ N`.
pub fn q_of_g(hist: &CAHistory, g: &GaussMatrix, n: usize) -> Result<GaussianInt> {
    check_dim(hist, g)?;
    check_index(n, 1, hist.last_index())?;
    let (cur, prev) = (hist.state(n), hist.state(n - 1));
    pair_correlator(cur, prev, &g.apply(cur)?, &g.apply(prev)?)
}

/// The same correlator written with the following slice,
/// `ψ*_{n+1} G ψ_n + ψ*_n G ψ_{n+1}`, for `0 ≤ n ≤ N−1`.
pub fn q_of_g_forward(hist: &CAHistory, g: &GaussMatrix, n: usize) -> Result<GaussianInt> {
    check_dim(hist, g)?;
    check_index(n, 0, hist.last_index() - 1)?;
    q_of_g(hist, g, n + 1)
}

/// `q_G(n)` for every `n = 1 … N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservedSeries {
    #[serde(skip)]
    pub g: GaussMatrix,
    pub values: Vec<GaussianInt>,
    /// Every value has zero imaginary part.
    pub is_real: bool,
}

impl ConservedSeries {
    /// Slice index of `values[k]`.
    pub fn index_of(k: usize) -> usize {
        k + 1
    }

    pub fn is_constant(&self) -> bool {
        self.first_drift().is_none()
    }

    /// First slice index whose value differs from `q_G(1)`.
    pub fn first_drift(&self) -> Option<usize> {
        let first = self.values.first()?;
        self.values
            .iter()
            .position(|v| v != first)
            .map(Self::index_of)
    }

    /// CSV with columns `n, re_q, im_q, constant_so_far`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "re_q", "im_q", "constant_so_far"])?;
        let mut constant = true;
        for (k, v) in self.values.iter().enumerate() {
            constant &= v == &self.values[0];
            w.write_record([
                Self::index_of(k).to_string(),
                v.re.to_string(),
                v.im.to_string(),
                constant.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn conserved_series(hist: &CAHistory, g: &GaussMatrix) -> Result<ConservedSeries> {
    check_dim(hist, g)?;
    let g_psi: Vec<GaussVector> = hist
        .states()
        .iter()
        .map(|s| g.apply(s))
        .collect::<Result<_>>()?;
    let values = (1..=hist.last_index())
        .map(|n| {
            pair_correlator(
                hist.state(n),
                hist.state(n - 1),
                &g_psi[n],
                &g_psi[n - 1],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let is_real = values.iter().all(GaussianInt::is_real);
    Ok(ConservedSeries {
        g: g.clone(),
        values,
        is_real,
    })
}

/// Outcome of checking the conservation law for one `G`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremAReport {
    /// `[G, H] = 0`. When false the law is not expected to hold; the rest of
    /// the report still describes what the history does.
    pub commutes: bool,
    pub history_is_solution: bool,
    /// First interior `n` where `ψ*_n G ψ̇_n + ψ̇*_n G ψ_n ≠ 0`.
    pub first_local_violation: Option<usize>,
    /// First `n` where `q_G(n) ≠ q_G(1)`.
    pub first_drift: Option<usize>,
    pub series: ConservedSeries,
}

impl TheoremAReport {
    /// The law was expected to hold and did.
    pub fn holds(&self) -> bool {
        self.commutes
            && self.history_is_solution
            && self.first_local_violation.is_none()
            && self.first_drift.is_none()
    }

    pub fn precondition_failed(&self) -> bool {
        !self.commutes || !self.history_is_solution
    }
}

/// Local form of the law at interior slice `n`:
/// `ψ*_n G ψ̇_n + ψ̇*_n G ψ_n`.
pub fn local_conservation_term(hist: &CAHistory, g: &GaussMatrix, n: usize) -> Result<GaussianInt> {
    check_dim(hist, g)?;
    let psi = hist.state(n);
    let dot = hist.derivative(n)?;
    Ok(psi.inner(&g.apply(&dot)?)? + dot.inner(&g.apply(psi)?)?)
}

pub fn verify_theorem_a(hist: &CAHistory, g: &GaussMatrix) -> Result<TheoremAReport> {
    check_dim(hist, g)?;
    let commutes = g.commutes(hist.hamiltonian().matrix())?;
    let series = conserved_series(hist, g)?;
    let mut first_local_violation = None;
    for n in 1..hist.last_index() {
        if !local_conservation_term(hist, g, n)?.is_zero() {
            first_local_violation = Some(n);
            break;
        }
    }
    Ok(TheoremAReport {
        commutes,
        history_is_solution: hist.is_solution(),
        first_local_violation,
        first_drift: series.first_drift(),
        series,
    })
}

/// An exact half-integer, stored as twice its value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfInt {
    pub twice: BigInt,
}

impl HalfInt {
    pub fn to_f64(&self) -> f64 {
        big_to_f64(&self.twice) / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_even() {
            write!(f, "{}", &self.twice / 2u32)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `½·Re ψ*_n (ψ_{n+1} + ψ_{n−1})` for `1 ≤ n ≤ N−1`.
pub fn q_symmetrized(hist: &CAHistory, n: usize) -> Result<HalfInt> {
    check_index(n, 1, hist.last_index().saturating_sub(1))?;
    let sum = hist.state(n + 1).add(hist.state(n - 1))?;
    Ok(HalfInt {
        twice: hist.state(n).inner(&sum)?.re,
    })
}
