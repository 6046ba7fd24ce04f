use proptest::prelude::*;
use tfsource_core::fracode::*;
use tfsource_core::multiml::{ml_mode, RegimePolicy};
use tfsource_core::FractionalOrders;

fn orders_strategy() -> impl Strategy<Value = FractionalOrders> {
    (1usize..=3, 0.4f64..0.95, prop::collection::vec((0.2f64..0.8, 0.2f64..1.5), 2)).prop_map(|(m, r1, rest)| {
        let mut rho = vec![r1];
        let mut q = vec![1.0];
        for &(frac, w) in rest.iter().take(m - 1) {
            rho.push(rho.last().unwrap() * frac);
            q.push(w);
        }
        FractionalOrders::new(rho, q).unwrap()
    })
}

fn positive_profile() -> impl Strategy<Value = GProfile> {
    prop_oneof![
        (0.1f64..3.0).prop_map(|value| GProfile::Constant { value }),
        (0.1f64..2.0, -2.0f64..2.0).prop_map(|(amplitude, rate)| GProfile::Exponential { amplitude, rate }),
        (0.1f64..2.0, 0.0f64..2.0).prop_map(|(a, b)| GProfile::Polynomial { coefficients: vec![a, b] }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn b_positive_for_positive_g(o in orders_strategy(), g in positive_profile(), lambda in 0.0f64..500.0, t0 in 0.05f64..1.0) {
        let g = SourceTimeProfile::new(g, 1.0).unwrap();
        prop_assert_eq!(g.kind(), ProfileKind::SignPreserving);
        let r = b_coefficient_report(&o, lambda, &g, t0, &Settings::default()).unwrap();
        prop_assert!(r.value > 0.0);
        prop_assert!(r.min_kernel > 0.0);
        prop_assert!((r.value - r.by_parts).abs() <= 1e-8 * r.value.abs());
    }

    #[test]
    fn constant_source_closed_form(o in orders_strategy(), lambda in 0.0f64..200.0, t0 in 0.05f64..1.0) {
        let g = SourceTimeProfile::new(GProfile::Constant { value: 1.0 }, 1.0).unwrap();
        let s = Settings::default();
        let b = b_coefficient(&o, lambda, &g, t0, &s).unwrap();
        let r1 = o.leading();
        let expect = t0.powf(r1) * ml_mode(&o, r1 + 1.0, lambda, t0, &RegimePolicy::default()).unwrap();
        prop_assert!((b - expect).abs() <= 1e-9 * expect);
        if lambda > 0.0 {
            let h = mode_homogeneous(&o, lambda, t0, &s).unwrap();
            prop_assert!((lambda * b - (1.0 - h)).abs() <= 1e-9);
        }
    }

    /// `lambda |b|` stays within a bounded band for `g = 1`.
    #[test]
    fn scaled_b_bounded(o in orders_strategy(), t0 in 0.2f64..1.0) {
        let g = SourceTimeProfile::new(GProfile::Constant { value: 1.0 }, 1.0).unwrap();
        let s = Settings::default();
        let scaled: Vec<f64> = [1.0, 4.0, 16.0, 64.0, 256.0]
            .iter()
            .map(|&l| l * b_coefficient(&o, l, &g, t0, &s).unwrap())
            .collect();
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().cloned().fold(0.0, f64::max);
        prop_assert!(lo > 0.0 && hi < 1.0 + 1e-12 && hi / lo < 10.0, "{scaled:?}");
    }
}

#[test]
fn trace_tends_to_initial_value() {
    let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap();
    let g = SourceTimeProfile::new(GProfile::Polynomial { coefficients: vec![1.0, 1.0] }, 1.0).unwrap();
    let s = Settings::default();
    for t in [1e-10, 1e-12, 1e-14] {
        let (v, _) = mode_value(&o, 9.0, 0.7, 2.0, &g, t, &s).unwrap();
        assert!((v - 0.7).abs() < 1e-6, "{t}: {v}");
    }
}

#[test]
fn caputo_residual_decreases_under_refinement() {
    let o = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap();
    let g = SourceTimeProfile::new(GProfile::Polynomial { coefficients: vec![1.0, 1.0] }, 1.0).unwrap();
    let s = Settings::default();
    let tails: Vec<f64> = [64usize, 128]
        .iter()
        .map(|&n| {
            let dt = 1.0 / n as f64;
            let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
            let sol = mode_solve(&o, 4.0, 1.0, 0.7, &g, &times, &s).unwrap();
            caputo_l1_residual(&o, &sol, &g, dt, 0.5).unwrap().tail_max
        })
        .collect();
    let order = (tails[0] / tails[1]).log2();
    assert!((order - 1.2).abs() < 0.2, "{tails:?} {order}");
}

#[test]
fn zero_problem_has_zero_residual() {
    let o = FractionalOrders::new(vec![0.6, 0.2], vec![1.0, 2.0]).unwrap();
    let g = SourceTimeProfile::new(GProfile::Constant { value: 1.0 }, 1.0).unwrap();
    let times: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
    let sol = mode_solve(&o, 0.0, 0.0, 0.0, &g, &times, &Settings::default()).unwrap();
    let r = caputo_l1_residual(&o, &sol, &g, 1.0 / 32.0, 0.0).unwrap();
    assert_eq!(r.max_abs, 0.0);
}
