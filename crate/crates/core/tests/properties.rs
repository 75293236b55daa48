use coherence_qsl::coherence::{closest_incoherent, coherence_skew};
use coherence_qsl::densmat::{affinity, angle, bloch_vector, DensityMatrix};
use coherence_qsl::dynamics::{analytic_state, ChannelSpec, RateModel};
use coherence_qsl::figures::Scenario;
use coherence_qsl::sampling::qubit_from_bloch;
use proptest::prelude::*;

fn bloch_ball() -> impl Strategy<Value = [f64; 3]> {
    (0.0..=1.0f64, -1.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, c, phi)| {
        let s = (1.0 - c * c).sqrt();
        let r = r.cbrt();
        [r * s * phi.cos(), r * s * phi.sin(), r * c]
    })
}

fn qubit() -> impl Strategy<Value = DensityMatrix> {
    bloch_ball().prop_map(qubit_from_bloch)
}

fn channel() -> impl Strategy<Value = ChannelSpec> {
    prop_oneof![
        (0.0..2.0f64, 0.5..4.0f64)
            .prop_map(|(w, g)| ChannelSpec::Dephasing { omega0: w, rate: RateModel::constant(g) }),
        (0.5..4.0f64).prop_map(|g| ChannelSpec::AmplitudeDamping { rate: RateModel::constant(g) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherence_is_bounded(rho in qubit()) {
        let c = coherence_skew(&rho).unwrap().c;
        prop_assert!((-1e-15..=0.5 + 1e-12).contains(&c));
    }

    #[test]
    fn closest_incoherent_state_realizes_the_coherence(rho in qubit()) {
        let c = coherence_skew(&rho).unwrap().c;
        let star = closest_incoherent(&rho).unwrap().to_density();
        let a = affinity(&rho, &star).unwrap();
        prop_assert!((1.0 - a * a - c).abs() < 1e-10);
    }

    #[test]
    fn affinity_is_symmetric_and_bounded(a in qubit(), b in qubit()) {
        let ab = affinity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - affinity(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((affinity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angle_obeys_triangle_inequality(a in qubit(), b in qubit(), c in qubit()) {
        let direct = angle(&a, &c).unwrap();
        prop_assert!(direct <= angle(&a, &b).unwrap() + angle(&b, &c).unwrap() + 1e-12);
    }

    #[test]
    fn bloch_round_trip(v in bloch_ball()) {
        let back = bloch_vector(&qubit_from_bloch(v)).unwrap();
        for k in 0..3 {
            prop_assert!((back[k] - v[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn json_round_trip(rho in qubit()) {
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, rho);
    }

    #[test]
    fn channels_keep_states_physical(rho in qubit(), ch in channel(), t in 0.0..3.0f64) {
        let out = analytic_state(&rho, &ch, t).unwrap();
        prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.purity() <= 1.0 + 1e-12);
    }

    #[test]
    fn speed_limit_never_exceeds_the_duration(
        ch in channel(),
        theta in 0.0..std::f64::consts::PI,
        phase in 0.0..std::f64::consts::TAU,
        tau in 0.1..1.5f64,
    ) {
        let r = Scenario::new(ch, theta).with_phase(phase).report(tau, (1000.0 * tau) as usize + 8).unwrap();
        prop_assert!(r.ratio <= 1.0 + 1e-5);
        prop_assert!(r.path_length + 1e-12 >= r.delta_c.abs());
    }
}
