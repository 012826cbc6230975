use std::f64::consts::PI;

use absneg::annealing::{anneal, AnnealConfig};
use absneg::free_geometry::{make_cone_states, ConeFamily};
use absneg::hierarchy::{build_rotation_set, hierarchy_bound_with};
use absneg::quantifiers::Measure;
use absneg::quantum_core::{state_from_bloch, trace_product, BlochVector, UnitarySU2};
use absneg::random::{random_povm, random_state, random_unitary};
use absneg::wigner_frames::{born_probability, build_frame};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quick() -> AnnealConfig {
    AnnealConfig { restarts: 3, steps_per_temp: 60, ..AnnealConfig::default() }
}

fn axis() -> impl Strategy<Value = [f64; 3]> {
    (0.0..PI, 0.0..2.0 * PI).prop_map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn born_rule_prime_dimensions(d in prop::sample::select(vec![2usize, 3, 5, 7]), seed in any::<u64>()) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let f = build_frame(d).unwrap();
        let rho = random_state(d, &mut g);
        let m = random_povm(d, 3, &mut g);
        let u = random_unitary(d, &mut g);
        for e in m.effects() {
            let p = born_probability(&rho, e, &f, &u).unwrap();
            prop_assert!((p - trace_product(rho.matrix(), e.matrix()).re).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn annealed_value_is_basis_independent(theta in 0.0..PI, ax in axis(), angle in 0.0..PI) {
        let cfg = quick();
        let states = make_cone_states(&ConeFamily::quadruplet(theta, 1.0)).unwrap();
        let u = UnitarySU2::from_axis_angle(ax, angle).unwrap();
        let turned: Vec<_> = states.iter().map(|s| state_from_bloch(u.rotate(&s.bloch().unwrap())).unwrap()).collect();
        let a = anneal(&states, &cfg, Measure::Robustness).unwrap().best_value;
        let b = anneal(&turned, &cfg, Measure::Robustness).unwrap().best_value;
        prop_assert!((a - b).abs() < 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn hierarchy_bounds_annealing(v in prop::collection::vec(axis(), 2..=4)) {
        let set = build_rotation_set(1).unwrap();
        let states: Vec<_> = v.iter().map(|p| state_from_bloch(BlochVector::new(p[0], p[1], p[2])).unwrap()).collect();
        let bound = hierarchy_bound_with(&set, &states, Measure::Robustness).unwrap().0;
        let best = anneal(&states, &quick(), Measure::Robustness).unwrap().best_value;
        prop_assert!(bound >= best - 1e-9, "bound {} below annealed {}", bound, best);
    }
}
