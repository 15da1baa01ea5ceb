//! Small hand-checkable cases run through the public API.

use std::f64::consts::{FRAC_PI_2, PI};

use hamca::conservation::{conserved_series, q_of_g, q_symmetrized, verify_theorem_a};
use hamca::continuum::{dispersion, ContinuumSignal, StationaryState};
use hamca::engine::{action_eval, evolve, evolve_step, evolve_xp, integer_variation, split_xp, stationarity_scan, IntPoly};
use hamca::exact::{commutes, is_self_adjoint, mat_apply, GaussMatrix, GaussVector, GaussianInt, HamiltonianSpec, IntMatrix};
use hamca::multipartite::{build_product, correlation_check, leibniz_demo};
use hamca::spectral::{closed_form_state, composition_check, detect_cycle, ontology_scan, spectrum};
use hamca::uncertainty::{build_xp, two_site_delta_x, uncertainty_report, LatticeState};
use num_bigint::BigInt;
use num_complex::Complex64;

fn g(re: i64, im: i64) -> GaussianInt {
    GaussianInt::new(re, im)
}

fn pauli() -> HamiltonianSpec {
    HamiltonianSpec::from_ints(&[&[0, 1], &[1, 0]]).unwrap()
}

fn pauli_run(steps: usize) -> hamca::engine::CAHistory {
    evolve(&GaussVector::from_ints(&[1, 0]), &GaussVector::from_ints(&[0, 1]), &pauli(), steps).unwrap()
}

#[test]
fn matrix_vector_products() {
    let v = GaussVector::from_pairs(&[(3, 1), (-2, 0)]);
    assert_eq!(mat_apply(&GaussMatrix::identity(2), &v).unwrap(), v);
    assert_eq!(
        mat_apply(pauli().matrix(), &GaussVector::from_ints(&[1, 0])).unwrap(),
        GaussVector::from_ints(&[0, 1])
    );
    let m = GaussMatrix::from_pairs(&[&[(1, 0), (1, 1)], &[(1, -1), (0, 0)]]).unwrap();
    assert_eq!(
        mat_apply(&m, &GaussVector::from_ints(&[1, 0])).unwrap(),
        GaussVector(vec![g(1, 0), g(1, -1)])
    );
}

#[test]
fn self_adjointness_and_split() {
    assert!(is_self_adjoint(pauli().matrix()));
    assert!(!is_self_adjoint(&GaussMatrix::from_pairs(&[&[(0, 0), (0, 1)], &[(0, 1), (0, 0)]]).unwrap()));
    assert!(is_self_adjoint(&GaussMatrix::from_pairs(&[&[(2, 0), (1, 1)], &[(1, -1), (-3, 0)]]).unwrap()));
    let h = HamiltonianSpec::new(GaussMatrix::from_pairs(&[&[(0, 0), (0, 1)], &[(0, -1), (0, 0)]]).unwrap()).unwrap();
    assert!(h.symmetric_part().is_zero());
    assert_eq!(h.antisymmetric_part(), &IntMatrix::from_rows(&[&[0, 1], &[-1, 0]]));
    assert_eq!(&h.recombine(), h.matrix());
}

#[test]
fn polynomials_in_h_commute() {
    let h = pauli();
    let poly = h.matrix().polynomial(&[g(3, 0), g(2, 0), g(1, 0)]);
    for gm in [GaussMatrix::identity(2), h.matrix().clone(), poly] {
        assert!(commutes(&gm, h.matrix()).unwrap());
    }
}

#[test]
fn leapfrog_steps() {
    let h = pauli();
    let psi2 = evolve_step(&GaussVector::from_ints(&[1, 0]), &GaussVector::from_ints(&[0, 1]), &h).unwrap();
    assert_eq!(psi2, GaussVector(vec![g(1, -1), g(0, 0)]));
    let psi3 = evolve_step(&GaussVector::from_ints(&[0, 1]), &psi2, &h).unwrap();
    assert_eq!(psi3, GaussVector(vec![g(0, 0), g(0, -1)]));

    let h1 = HamiltonianSpec::from_ints(&[&[1]]).unwrap();
    let one = GaussVector::from_ints(&[1]);
    let run = evolve(&one, &one, &h1, 40).unwrap();
    assert_eq!(run.state(2), &GaussVector(vec![g(1, -1)]));
    for n in 0..=40 {
        let cf = closed_form_state(&one, &one, &h1, n as i64).unwrap();
        let exact = run.state(n).to_complex();
        assert!((cf[0] - exact[0]).norm() < 1e-9 * exact[0].norm().max(1.0));
    }
}

#[test]
fn real_form_with_antisymmetric_part() {
    let h = HamiltonianSpec::new(GaussMatrix::from_pairs(&[&[(0, 0), (0, 1)], &[(0, -1), (0, 0)]]).unwrap()).unwrap();
    let a = GaussVector::from_pairs(&[(1, 2), (0, -1)]);
    let b = GaussVector::from_pairs(&[(3, 0), (-1, 1)]);
    let (x0, p0) = split_xp(&a);
    let (x1, p1) = split_xp(&b);
    let xp = evolve_xp(&x0, &p0, &x1, &p1, &h, 10).unwrap();
    assert_eq!(xp.recombine(), evolve(&a, &b, &h, 10).unwrap().states().to_vec());
}

#[test]
fn action_on_constant_history() {
    let h = HamiltonianSpec::from_ints(&[&[2]]).unwrap();
    let c = GaussVector::from_pairs(&[(1, 2)]);
    let states = vec![c.clone(); 8];
    let hist = hamca::engine::CAHistory::new(states, h, 1.0).unwrap();
    // ψ̇ = 0 leaves 2·M·|c|² over M summands.
    assert_eq!(action_eval(&hist, 1, 6).unwrap().value, g(2 * 6 * 5, 0));
    assert!(action_eval(&pauli_run(10), 1, 9).unwrap().value.is_zero());
}

#[test]
fn integer_variations() {
    let sq = IntPoly::monomial(2);
    let cube = IntPoly::monomial(3);
    let one = BigInt::from(1);
    for f in -5i64..=5 {
        let fb = BigInt::from(f);
        assert_eq!(integer_variation(&sq, &fb, &one), BigInt::from(2 * f));
        assert_eq!(integer_variation(&cube, &fb, &one), BigInt::from(3 * f * f + 1));
        assert_eq!(integer_variation(&cube, &fb, &BigInt::from(0)), BigInt::from(0));
    }
}

#[test]
fn corrupted_slice_is_localized() {
    let run = pauli_run(16);
    assert!(stationarity_scan(&run).is_stationary());
    let bumped = run.state(8).add(&GaussVector::from_ints(&[1, 0])).unwrap();
    let bad = run.with_slice(8, bumped).unwrap();
    let scan = stationarity_scan(&bad);
    assert!(!scan.is_stationary());
    assert!(scan.violations.iter().all(|&(n, _)| (6..=10).contains(&n)));
}

#[test]
fn conserved_values() {
    let run = pauli_run(30);
    let id = GaussMatrix::identity(2);
    assert!(conserved_series(&run, &id).unwrap().values.iter().all(GaussianInt::is_zero));
    let energy = conserved_series(&run, pauli().matrix()).unwrap();
    assert!(energy.is_constant());
    assert_eq!(energy.values[0], g(2, 0));
    let e1 = GaussVector::from_ints(&[1, 0]);
    let free = evolve(&e1, &e1, &HamiltonianSpec::zero(2), 5).unwrap();
    assert_eq!(q_of_g(&free, &id, 3).unwrap(), g(2, 0));
    assert_eq!(q_symmetrized(&free, 2).unwrap().to_f64(), 1.0);
    assert!((1..30).all(|n| q_symmetrized(&run, n).unwrap().to_f64() == 0.0));

    let sz = GaussMatrix::from_ints(&[&[1, 0], &[0, -1]]).unwrap();
    let r = verify_theorem_a(&evolve(&e1, &e1, &pauli(), 40).unwrap(), &sz).unwrap();
    assert!(r.precondition_failed());
}

#[test]
fn spectra() {
    let s = spectrum(&pauli());
    assert!((s.eigenvalues[0] + 1.0).abs() < 1e-12 && (s.eigenvalues[1] - 1.0).abs() < 1e-12);
    assert!(s.admissible);
    assert!(spectrum(&HamiltonianSpec::from_ints(&[&[2, 0], &[0, -2]]).unwrap()).admissible);
    assert!(!spectrum(&HamiltonianSpec::from_ints(&[&[3]]).unwrap()).admissible);
}

#[test]
fn closed_form_and_composition() {
    let (a, b) = (GaussVector::from_ints(&[1, 0]), GaussVector::from_ints(&[0, 1]));
    let psi6 = closed_form_state(&a, &b, &pauli(), 6).unwrap();
    assert!((psi6[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12 && psi6[1].norm() < 1e-12);
    let run = pauli_run(12);
    assert!(composition_check(&run, 2, 6).unwrap().exact_holds);
    assert!(composition_check(&run, 5, 6).unwrap().exact_holds);
    let free = evolve(&a, &b, &HamiltonianSpec::zero(2), 9).unwrap();
    assert!(composition_check(&free, 1, 9).unwrap().exact_holds);
}

#[test]
fn cycles_and_ontology() {
    let (a, b) = (GaussVector::from_ints(&[1, 0]), GaussVector::from_ints(&[0, 1]));
    let r = detect_cycle(&a, &b, &pauli(), 100).unwrap();
    assert_eq!((r.antiperiod, r.period, r.ontological), (Some(6), Some(12), true));
    let z = HamiltonianSpec::zero(2);
    assert_eq!(detect_cycle(&a, &a, &z, 10).unwrap().period, Some(1));
    assert_eq!(detect_cycle(&a, &b, &z, 10).unwrap().period, Some(2));
    let run = evolve(&a, &a, &pauli(), 6).unwrap();
    assert_eq!(run.state(2), &GaussVector(vec![g(1, 0), g(0, -1)]));
    let basis = [GaussVector::basis(2, 0), GaussVector::basis(2, 1)];
    assert_eq!(ontology_scan(&run, &basis).unwrap().first_superposition_index, Some(2));
}

#[test]
fn sampling_bridge_cases() {
    let samples: Vec<Vec<Complex64>> = (-6..=6)
        .map(|n| vec![Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0)])
        .collect();
    let sig = ContinuumSignal::new(samples, -6, 1.0, hamca::cmatrix::CMatrix::zeros(1), 0.5).unwrap();
    assert!((sig.value(0.5).unwrap().value[0].re - 2.0 / PI).abs() < 1e-15);

    assert!((dispersion(2.0, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert_eq!(dispersion(0.0, 1.0).unwrap(), 0.0);
    assert!((dispersion(1.0, 1.0).unwrap() - PI / 6.0).abs() < 1e-15);

    let free = StationaryState::scalar(0.0, 1.0).unwrap().signal(-32, 32, 0.5).unwrap();
    assert_eq!(free.q(3.0).unwrap().value, 1.0);
    let off = free.q(0.3).unwrap();
    assert!((off.value - 1.0).abs() <= off.error_estimate);
}

#[test]
fn leibniz_cases() {
    let seq = |f: fn(i64) -> i64| -> Vec<BigInt> { (0..8).map(|n| BigInt::from(f(n))).collect() };
    let sq = seq(|n| n * n);
    for n in 1..7 {
        let r = leibniz_demo(&sq, &sq, n).unwrap();
        let nn = BigInt::from(n as i64);
        assert_eq!(r.corrected, BigInt::from(8) * &nn * &nn * &nn + BigInt::from(8) * &nn);
        assert!(r.naive_fails);
    }
    let lin = seq(|n| n);
    let r = leibniz_demo(&lin, &lin, 3).unwrap();
    assert_eq!((r.derivative.clone(), r.corrected.clone(), r.naive.clone()), (BigInt::from(12), BigInt::from(12), BigInt::from(12)));
    let konst = seq(|_| 5);
    assert!(!leibniz_demo(&konst, &sq, 4).unwrap().naive_fails);
}

#[test]
fn products_and_correlators() {
    let run = pauli_run(5);
    let single = build_product(std::slice::from_ref(&run)).unwrap();
    assert_eq!(single.to_history().unwrap().states(), run.states());

    let p = build_product(&[run.clone(), run.clone()]).unwrap();
    assert_eq!(p.get(&[2, 3], &[0, 1]).unwrap(), &(&g(1, -1) * &g(0, -1)));
    let id = GaussMatrix::identity(2);
    let rep = correlation_check(&p, &id, &id).unwrap();
    assert_eq!(rep.factorizes, Some(true));

    let e1 = GaussVector::from_ints(&[1, 0]);
    let other = evolve(&e1, &e1, &pauli(), 5).unwrap();
    let q = build_product(&[other.clone(), run.clone()]).unwrap();
    let r = build_product(&[run, other]).unwrap();
    let entangled = q.linear_combination(&g(1, 0), &r, &g(1, 0)).unwrap();
    assert_eq!(entangled.first_eom_violation().unwrap(), None);
    let h = pauli().matrix().clone();
    let rep = correlation_check(&entangled, &h, &h).unwrap();
    assert!(rep.connected_nonzero > 0);

    let bad = p.with_entry(&[2, 2], &[0, 0], g(7, 0)).unwrap();
    let v = bad.first_eom_violation().unwrap().unwrap();
    assert!(v.iter().all(|&k| (1..=3).contains(&k)));
}

#[test]
fn lattice_operators_and_moments() {
    let l = 0.5;
    let (x, p) = build_xp(1, l).unwrap();
    assert_eq!(x[(0, 0)], Complex64::new(-l, 0.0));
    assert_eq!(x[(2, 2)], Complex64::new(l, 0.0));
    assert_eq!(p[(1, 2)], Complex64::new(0.0, -1.0 / (2.0 * l)));
    assert_eq!(p[(1, 0)], Complex64::new(0.0, 1.0 / (2.0 * l)));

    let st = LatticeState::from_support(0, &[Complex64::new(1.0, 0.0)], 8, 1.0).unwrap();
    let r = uncertainty_report(&st).unwrap();
    assert_eq!(r.delta_x, 0.0);
    assert_eq!(r.robertson_rhs, 0.0);
    assert!(r.satisfied_robertson);

    assert!((two_site_delta_x(1.3).unwrap() - 1.3).abs() < 1e-12);
}
