//! Cycle detection and the ontological-basis test.

use serde::Serialize;

use crate::engine::{evolve_step, CAHistory};
use crate::error::{Error, Result};
use crate::exact::{GaussVector, HamiltonianSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    /// Smallest `k ≥ 1` with `(ψ_k, ψ_{k+1}) = (ψ_0, ψ_1)`.
    pub period: Option<usize>,
    /// Smallest `k ≥ 1` with `(ψ_k, ψ_{k+1}) = (−ψ_0, −ψ_1)`; never set for the zero state.
    pub antiperiod: Option<usize>,
    /// No scanned slice is a superposition of standard basis states.
    pub ontological: bool,
    pub first_superposition_index: Option<usize>,
    /// Number of pair comparisons performed.
    pub steps_scanned: usize,
}

/// How one slice relates to a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "basis_index")]
pub enum SliceClass {
    Zero,
    Multiple(usize),
    Superposition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OntologyReport {
    pub classes: Vec<SliceClass>,
    pub ontological: bool,
    pub first_superposition_index: Option<usize>,
}

/// Exact test for `v = c·b` with `c` a Gaussian rational.
///
/// `b` must be nonzero. Uses the cross products `v_k b_j − v_j b_k` against a
/// pivot `j` with `b_j ≠ 0`.
pub fn is_scalar_multiple(v: &GaussVector, b: &GaussVector) -> bool {
    debug_assert_eq!(v.len(), b.len());
    let Some(j) = b.iter().position(|x| !x.is_zero()) else {
        return v.is_zero();
    };
    let (vj, bj) = (&v[j], &b[j]);
    v.iter()
        .zip(b.iter())
        .all(|(vk, bk)| vk * bj == vj * bk)
}

fn classify(v: &GaussVector, basis: &[GaussVector]) -> SliceClass {
    if v.is_zero() {
        return SliceClass::Zero;
    }
    basis
        .iter()
        .position(|b| is_scalar_multiple(v, b))
        .map_or(SliceClass::Superposition, SliceClass::Multiple)
}

fn standard_class(v: &GaussVector) -> SliceClass {
    let mut support = v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(k, _)| k);
    match (support.next(), support.next()) {
        (None, _) => SliceClass::Zero,
        (Some(k), None) => SliceClass::Multiple(k),
        _ => SliceClass::Superposition,
    }
}

/// Scans `(ψ_k, ψ_{k+1})` for `k = 1 … max_steps`, keeping only two slices
/// in memory, and classifies every visited slice against the standard basis.
pub fn detect_cycle(
    psi0: &GaussVector,
    psi1: &GaussVector,
    ham: &HamiltonianSpec,
    max_steps: usize,
) -> Result<CycleReport> {
    for v in [psi0, psi1] {
        if v.len() != ham.dim() {
            return Err(Error::DimensionMismatch {
                expected: ham.dim(),
                found: v.len(),
            });
        }
    }
    let zero_state = psi0.is_zero() && psi1.is_zero();
    let (neg0, neg1) = (psi0.neg(), psi1.neg());
    let mut first_superposition_index = [psi0, psi1]
        .iter()
        .position(|v| standard_class(v) == SliceClass::Superposition);

    let mut antiperiod = None;
    let mut period = None;
    let mut steps_scanned = 0;
    let mut prev = psi0.clone();
    let mut curr = psi1.clone();
    for k in 1..=max_steps {
        let next = evolve_step(&prev, &curr, ham)?;
        if first_superposition_index.is_none() && standard_class(&next) == SliceClass::Superposition {
            first_superposition_index = Some(k + 1);
        }
        prev = curr;
        curr = next;
        steps_scanned = k;
        // (prev, curr) = (ψ_k, ψ_{k+1})
        if antiperiod.is_none() && !zero_state && prev == neg0 && curr == neg1 {
            antiperiod = Some(k);
        }
        if &prev == psi0 && &curr == psi1 {
            period = Some(k);
            break;
        }
    }
    Ok(CycleReport {
        period,
        antiperiod,
        ontological: first_superposition_index.is_none(),
        first_superposition_index,
        steps_scanned,
    })
}

/// Classifies each slice of `hist` as zero, a multiple of one basis vector,
/// or a superposition.
pub fn ontology_scan(hist: &CAHistory, basis: &[GaussVector]) -> Result<OntologyReport> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    for (i, b) in basis.iter().enumerate() {
        if b.len() != hist.dim() {
            return Err(Error::DimensionMismatch {
                expected: hist.dim(),
                found: b.len(),
            });
        }
        if b.is_zero() {
            return Err(Error::DependentBasis(i, i));
        }
        for (j, c) in basis.iter().enumerate().take(i) {
            if is_scalar_multiple(b, c) {
                return Err(Error::DependentBasis(j, i));
            }
        }
    }
    let classes: Vec<SliceClass> = hist.states().iter().map(|v| classify(v, basis)).collect();
    let first_superposition_index = classes.iter().position(|c| *c == SliceClass::Superposition);
    Ok(OntologyReport {
        ontological: first_superposition_index.is_none(),
        first_superposition_index,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::evolve;
    use crate::exact::GaussianInt;

    fn pauli() -> HamiltonianSpec {
        HamiltonianSpec::from_ints(&[&[0, 1], &[1, 0]]).unwrap()
    }

    #[test]
    fn pauli_cycle() {
        let r = detect_cycle(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &pauli(),
            100,
        )
        .unwrap();
        assert_eq!(r.antiperiod, Some(6));
        assert_eq!(r.period, Some(12));
        assert!(r.ontological);
    }

    #[test]
    fn free_cycles() {
        let h = HamiltonianSpec::zero(2);
        let v = GaussVector::from_pairs(&[(1, 1), (0, 2)]);
        let w = GaussVector::from_ints(&[3, 0]);
        assert_eq!(detect_cycle(&v, &v, &h, 10).unwrap().period, Some(1));
        let r = detect_cycle(&v, &w, &h, 10).unwrap();
        assert_eq!(r.period, Some(2));
        assert_eq!(r.antiperiod, None);
        let z = GaussVector::zeros(2);
        let r = detect_cycle(&z, &z, &h, 10).unwrap();
        assert_eq!((r.period, r.antiperiod), (Some(1), None));
    }

    #[test]
    fn cap_limits_search() {
        let r = detect_cycle(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &pauli(),
            5,
        )
        .unwrap();
        assert_eq!((r.period, r.antiperiod, r.steps_scanned), (None, None, 5));
        let r = detect_cycle(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &pauli(),
            0,
        )
        .unwrap();
        assert_eq!(r.steps_scanned, 0);
    }

    #[test]
    fn ontology_examples() {
        let basis = [GaussVector::basis(2, 0), GaussVector::basis(2, 1)];
        let run = evolve(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &pauli(),
            12,
        )
        .unwrap();
        let r = ontology_scan(&run, &basis).unwrap();
        assert!(r.ontological);
        assert_eq!(r.classes[2], SliceClass::Multiple(0));
        assert_eq!(r.classes[5], SliceClass::Multiple(1));

        let e1 = GaussVector::from_ints(&[1, 0]);
        let run = evolve(&e1, &e1, &pauli(), 4).unwrap();
        let r = ontology_scan(&run, &basis).unwrap();
        assert_eq!(r.first_superposition_index, Some(2));
        assert!(!r.ontological);

        let h1 = HamiltonianSpec::from_ints(&[&[1]]).unwrap();
        let v = GaussVector::from_pairs(&[(2, -1)]);
        let run = evolve(&v, &GaussVector::from_ints(&[5]), &h1, 20).unwrap();
        assert!(ontology_scan(&run, &[v]).unwrap().ontological);
    }

    #[test]
    fn basis_validation() {
        let run = evolve(
            &GaussVector::from_ints(&[1, 0]),
            &GaussVector::from_ints(&[0, 1]),
            &pauli(),
            3,
        )
        .unwrap();
        assert!(matches!(ontology_scan(&run, &[]), Err(Error::EmptyBasis)));
        let b = GaussVector::from_pairs(&[(1, 1), (2, 0)]);
        let dep = b.scale(&GaussianInt::new(0, 3));
        assert!(matches!(
            ontology_scan(&run, &[b, dep]),
            Err(Error::DependentBasis(0, 1))
        ));
    }

    #[test]
    fn multiples_over_gaussian_rationals() {
        let b = GaussVector::from_pairs(&[(2, 0), (0, 2)]);
        let v = GaussVector::from_pairs(&[(1, 1), (-1, 1)]); // (1+i)/2 · b
        assert!(is_scalar_multiple(&v, &b));
        assert!(!is_scalar_multiple(&GaussVector::from_ints(&[1, 1]), &b));
    }
}
