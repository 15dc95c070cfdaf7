use num_complex::Complex64;
use proptest::prelude::*;

use qlidar::detection::{parity_expectation, port_distribution, z_expectation};
use qlidar::fock_oracle::simulate;
use qlidar::interferometer::{propagate, MziConfig};
use qlidar::states::{make_state, StateKind, SuperposedState};

fn kind() -> impl Strategy<Value = StateKind> {
    (0usize..6).prop_map(|i| StateKind::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pair_sums_match_fock_space(
        kind in kind(),
        a2 in 0.3f64..6.0,
        a_phase in -3.2f64..3.2,
        z2 in 0.0f64..6.0,
        z_phase in -3.2f64..3.2,
        phi in -3.2f64..3.2,
        r in 0.0f64..0.9,
    ) {
        let a = make_state(kind, Complex64::from_polar(a2.sqrt(), a_phase)).unwrap();
        let b = SuperposedState::coherent(Complex64::from_polar(z2.sqrt(), z_phase));
        let cfg = MziConfig::new(phi, r).unwrap();
        let out = propagate(&a, &b, &cfg);
        let oracle = simulate(&a, &b, &cfg, None).unwrap();
        prop_assert!((parity_expectation(&out) - oracle.parity).abs() < 1e-8);
        prop_assert!((z_expectation(&out) - oracle.z).abs() < 1e-8);
        let dist = port_distribution(&out).unwrap();
        for (n, p) in dist.probs.iter().zip(&oracle.probs).map(|(x, y)| (x, x - y)).enumerate() {
            prop_assert!(p.1.abs() < 1e-8, "n = {n}: {:e}", p.1);
        }
    }

    #[test]
    fn superposition_of_terms_is_handled_generically(
        w in -3.0f64..3.0,
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
        phi in -3.0f64..3.0,
        r in 0.0f64..0.7,
    ) {
        use qlidar::states::CoherentTerm;
        let terms = vec![
            CoherentTerm::new(Complex64::new(1.0, 0.0), Complex64::new(re, im)).unwrap(),
            CoherentTerm::new(Complex64::from_polar(0.7, w), Complex64::new(-im, 0.5 * re)).unwrap(),
        ];
        let Ok(a) = SuperposedState::custom(terms) else { return Ok(()) };
        let b = SuperposedState::coherent(Complex64::new(0.4, -0.9));
        let cfg = MziConfig::new(phi, r).unwrap();
        let out = propagate(&a, &b, &cfg);
        let oracle = simulate(&a, &b, &cfg, None).unwrap();
        prop_assert!((parity_expectation(&out) - oracle.parity).abs() < 1e-8);
        prop_assert!((z_expectation(&out) - oracle.z).abs() < 1e-8);
    }
}
