//! Randomized invariants over generic self-adjoint Hamiltonians, including
//! ones whose spectrum leaves the band.

use hamca::conservation::{conserved_series, q_of_g};
use hamca::continuum::ContinuumSignal;
use hamca::engine::{action_eval, evolve, evolve_xp, split_xp, stationarity_scan};
use hamca::exact::{GaussMatrix, GaussVector, GaussianInt};
use hamca::io::{read_history_jsonl, write_history_jsonl};
use hamca::multipartite::build_product;
use hamca::random::{gauss_vector, gaussian_int, self_adjoint, task_rng};
use hamca::spectral::{apply_transfer, transfer_columns};
use hamca::uncertainty::{random_guarded_state, uncertainty_report};
use proptest::prelude::*;

fn setup(seed: u64, dim: usize, bound: i64) -> (hamca::exact::HamiltonianSpec, GaussVector, GaussVector) {
    let mut r = task_rng(seed, 0);
    let h = self_adjoint(&mut r, dim, bound);
    (h, gauss_vector(&mut r, dim, 4), gauss_vector(&mut r, dim, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gaussian_int_string_round_trip(re in any::<i64>(), im in any::<i64>()) {
        let z = GaussianInt::new(re, im);
        prop_assert_eq!(z.to_string().parse::<GaussianInt>().unwrap(), z);
    }

    #[test]
    fn real_form_matches_complex_form(seed in any::<u64>(), dim in 1usize..6, steps in 1usize..30) {
        let (h, a, b) = setup(seed, dim, 3);
        let run = evolve(&a, &b, &h, steps).unwrap();
        let (x0, p0) = split_xp(&a);
        let (x1, p1) = split_xp(&b);
        let xp = evolve_xp(&x0, &p0, &x1, &p1, &h, steps).unwrap();
        prop_assert_eq!(xp.recombine(), run.states().to_vec());
    }

    #[test]
    fn action_and_stationarity_hold_off_band(seed in any::<u64>(), dim in 1usize..5) {
        let (h, a, b) = setup(seed, dim, 4);
        let run = evolve(&a, &b, &h, 12).unwrap();
        let act = action_eval(&run, 1, 11).unwrap();
        prop_assert!(act.per_step.iter().all(GaussianInt::is_zero));
        prop_assert!(stationarity_scan(&run).is_stationary());
    }

    #[test]
    fn norm_and_energy_conserved_for_any_self_adjoint_h(seed in any::<u64>(), dim in 1usize..5) {
        let (h, a, b) = setup(seed, dim, 4);
        let run = evolve(&a, &b, &h, 40).unwrap();
        for g in [GaussMatrix::identity(dim), h.matrix().clone()] {
            let s = conserved_series(&run, &g).unwrap();
            prop_assert!(s.is_constant());
            prop_assert!(s.is_real);
        }
    }

    #[test]
    fn time_reversal_solves_conjugate_equation(seed in any::<u64>(), dim in 1usize..5) {
        let (h, a, b) = setup(seed, dim, 3);
        let run = evolve(&a, &b, &h, 15).unwrap();
        let rev = run.time_reversed();
        prop_assert_eq!(rev.first_eom_violation(), None);
        let again = evolve(rev.state(0), rev.state(1), rev.hamiltonian(), 15).unwrap();
        prop_assert_eq!(again.states(), rev.states());
        let g = GaussMatrix::identity(dim);
        prop_assert_eq!(q_of_g(&rev, &g, 1).unwrap(), q_of_g(&run, &g, 15).unwrap());
    }

    #[test]
    fn transfer_columns_generate_every_slice(seed in any::<u64>(), dim in 1usize..5, n in 0usize..20) {
        let (h, a, b) = setup(seed, dim, 2);
        let run = evolve(&a, &b, &h, 21).unwrap();
        let cols = transfer_columns(&h, 21).unwrap();
        let rebuilt = apply_transfer(&cols, n + 1, &b).add(&apply_transfer(&cols, n, &a)).unwrap();
        prop_assert_eq!(&rebuilt, run.state(n));
    }

    #[test]
    fn linearity_with_gaussian_coefficients(seed in any::<u64>(), dim in 1usize..5) {
        let mut r = task_rng(seed, 1);
        let h = self_adjoint(&mut r, dim, 3);
        let v: Vec<GaussVector> = (0..4).map(|_| gauss_vector(&mut r, dim, 4)).collect();
        let (c1, c2) = (gaussian_int(&mut r, 3), gaussian_int(&mut r, 3));
        let mix = |x: &GaussVector, y: &GaussVector| x.scale(&c1).add(&y.scale(&c2)).unwrap();
        let x = evolve(&v[0], &v[1], &h, 20).unwrap();
        let y = evolve(&v[2], &v[3], &h, 20).unwrap();
        let z = evolve(&mix(&v[0], &v[2]), &mix(&v[1], &v[3]), &h, 20).unwrap();
        for n in 0..=20 {
            prop_assert_eq!(z.state(n), &mix(x.state(n), y.state(n)));
        }
    }

    #[test]
    fn history_file_round_trip(seed in any::<u64>(), dim in 1usize..5, steps in 1usize..20) {
        let (h, a, b) = setup(seed, dim, 5);
        let run = evolve(&a, &b, &h, steps).unwrap();
        let mut buf = Vec::new();
        write_history_jsonl(&run, &mut buf).unwrap();
        prop_assert_eq!(read_history_jsonl(&buf[..]).unwrap(), run);
    }

    #[test]
    fn interpolation_is_exact_on_samples(seed in any::<u64>(), dim in 1usize..4) {
        let (h, a, b) = setup(seed, dim, 1);
        let run = evolve(&a, &b, &h, 30).unwrap().with_scale(0.7).unwrap();
        let sig = ContinuumSignal::from_history(&run, 0.5).unwrap();
        for n in 8..=22 {
            prop_assert_eq!(sig.value(n as f64 * 0.7).unwrap().value, run.state(n).to_complex());
        }
    }

    #[test]
    fn products_of_solutions_solve_the_joint_equation(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let (h1, a1, b1) = setup(seed, d1, 3);
        let (h2, a2, b2) = setup(seed ^ 0x9e37, d2, 3);
        let p = build_product(&[evolve(&a1, &b1, &h1, 5).unwrap(), evolve(&a2, &b2, &h2, 4).unwrap()]).unwrap();
        prop_assert_eq!(p.first_eom_violation().unwrap(), None);
    }

    #[test]
    fn robertson_holds_on_random_states(seed in any::<u64>(), l in 0.1f64..3.0) {
        let mut r = task_rng(seed, 2);
        let st = random_guarded_state(&mut r, 30, l).unwrap();
        prop_assert!(uncertainty_report(&st).unwrap().satisfied_robertson);
    }
}
