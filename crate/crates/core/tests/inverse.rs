use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfsource_core::fracode::{GProfile, Settings, SourceTimeProfile};
use tfsource_core::inverse::*;
use tfsource_core::torus::{EllipticSymbol, SpectralField};
use tfsource_core::{Complex64, Error, FractionalOrders};

fn orders() -> FractionalOrders {
    FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap()
}

fn linear_g() -> SourceTimeProfile {
    SourceTimeProfile::new(GProfile::Polynomial { coefficients: vec![1.0, 1.0] }, 1.0).unwrap()
}

fn cosine_g(omega: f64) -> SourceTimeProfile {
    SourceTimeProfile::new(GProfile::Cosine { amplitude: 1.0, omega, phase: 0.0 }, 1.0).unwrap()
}

/// Hermitian field with decaying random coefficients.
fn random_field(dim: usize, cutoff: usize, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut f = SpectralField::zeros(dim, cutoff).unwrap();
    let freqs: Vec<Vec<i64>> = f.frequencies().collect();
    for n in freqs {
        let neg: Vec<i64> = n.iter().map(|k| -k).collect();
        if n > neg {
            continue;
        }
        let r2: i64 = n.iter().map(|k| k * k).sum();
        let amp = 1.0 / (1.0 + r2 as f64);
        let v = if n == neg {
            Complex64::new(amp * rng.gen_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0))
        };
        f.set(&n, v).unwrap();
        f.set(&neg, v.conj()).unwrap();
    }
    f
}

fn problem(dim: usize, phi: SpectralField, psi: SpectralField, g: SourceTimeProfile, t0: f64) -> InverseProblem {
    InverseProblem {
        orders: orders(),
        symbol: EllipticSymbol::laplacian(dim).unwrap(),
        g,
        t0,
        phi,
        psi,
        settings: InverseSettings::default(),
    }
}

fn synthesize_psi(dim: usize, phi: &SpectralField, f: &SpectralField, g: &SourceTimeProfile, t0: f64) -> SpectralField {
    let sym = EllipticSymbol::laplacian(dim).unwrap();
    forward_fields(&orders(), &sym, g, phi, f, &[t0], &Settings::default()).unwrap().remove(0)
}

fn rel_err(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn zero_data_gives_zero_solution() {
    let z = SpectralField::zeros(1, 6).unwrap();
    let p = problem(1, z.clone(), z.clone(), linear_g(), 0.5);
    let r = assemble(&p, &[0.25, 1.0]).unwrap();
    assert!(r.is_unique());
    assert!(r.f.coeffs().iter().all(|c| c.norm() == 0.0));
    assert!(r.u.iter().all(|s| s.field.l2_norm() == 0.0));
}

#[test]
fn round_trip_one_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (phi, f_star) = (random_field(1, 16, &mut rng), random_field(1, 16, &mut rng));
    let g = linear_g();
    let psi = synthesize_psi(1, &phi, &f_star, &g, 0.5);
    let r = assemble(&problem(1, phi, psi, g, 0.5), &[0.5]).unwrap();
    assert!(r.is_unique());
    assert!(rel_err(&r.f, &f_star) < 1e-10);
    assert!(r.diagnostics.overdetermination_relative < 1e-12);
    assert!(r.diagnostics.initial_residual < 1e-6);
    assert!(r.f.hermitian_defect() < 1e-12);
    assert!(r.diagnostics.sobolev.passed);
}

#[test]
fn round_trip_two_dimensions_sign_changing_g() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (phi, f_star) = (random_field(2, 4, &mut rng), random_field(2, 4, &mut rng));
    let g = SourceTimeProfile::new(GProfile::Polynomial { coefficients: vec![1.0, -2.0] }, 1.0).unwrap();
    let psi = synthesize_psi(2, &phi, &f_star, &g, 0.1);
    let r = assemble(&problem(2, phi, psi, g, 0.1), &[]).unwrap();
    assert!(r.is_unique());
    assert!(rel_err(&r.f, &f_star) < 1e-9);
}

#[test]
fn reconstruction_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let fields: Vec<SpectralField> = (0..4).map(|_| random_field(1, 8, &mut rng)).collect();
    let (a, b) = (0.7, -1.9);
    let combine = |x: &SpectralField, y: &SpectralField| {
        SpectralField::from_fn(1, 8, |n| x.get(n) * a + y.get(n) * b).unwrap()
    };
    let solve = |phi: &SpectralField, psi: &SpectralField| {
        assemble(&problem(1, phi.clone(), psi.clone(), linear_g(), 0.5), &[]).unwrap().f
    };
    let f1 = solve(&fields[0], &fields[1]);
    let f2 = solve(&fields[2], &fields[3]);
    let f12 = solve(&combine(&fields[0], &fields[2]), &combine(&fields[1], &fields[3]));
    let expect = combine(&f1, &f2);
    for n in expect.frequencies() {
        let scale = f1.get(&n).norm() * a.abs() + f2.get(&n).norm() * b.abs();
        assert!((f12.get(&n) - expect.get(&n)).norm() <= 1e-13 * scale.max(1e-300));
    }
}

#[test]
fn perturbation_amplified_by_inverse_b() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (phi, psi) = (random_field(1, 8, &mut rng), random_field(1, 8, &mut rng));
    let base = assemble(&problem(1, phi.clone(), psi.clone(), linear_g(), 0.5), &[]).unwrap();
    let delta = 1e-6;
    let mut bumped = psi.clone();
    bumped.set(&[5], psi.get(&[5]) + delta).unwrap();
    let r = assemble(&problem(1, phi, bumped, linear_g(), 0.5), &[]).unwrap();
    let rec = base.modes.iter().find(|m| m.classification.n == [5]).unwrap();
    let change = (r.f.get(&[5]) - base.f.get(&[5])).norm();
    assert!((change - delta * rec.amplification).abs() < 1e-8 * change);
    assert_eq!(r.f.get(&[4]), base.f.get(&[4]));
}

#[test]
fn smoothness_policy() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let phi = random_field(2, 2, &mut rng);
    let mut p = problem(2, phi.clone(), phi, linear_g(), 0.5);
    p.settings.tau = Some(1.0);
    let r = assemble(&p, &[]).unwrap();
    assert!(!r.diagnostics.sobolev.passed);
    assert_eq!(r.diagnostics.warnings.len(), 1);
    p.settings.smoothness = SmoothnessPolicy::Error;
    assert!(matches!(assemble(&p, &[]), Err(Error::SmoothnessViolation(_))));
}

fn degenerate_omega() -> f64 {
    bisect_cosine_degeneracy(&orders(), 4.0, 0.5, 1.0, (4.0, 4.5), &Settings::default()).unwrap()
}

#[test]
fn degenerate_mode_dichotomy() {
    let omega = degenerate_omega();
    let g = cosine_g(omega);
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let (phi, f_star) = (random_field(1, 8, &mut rng), random_field(1, 8, &mut rng));
    let psi = synthesize_psi(1, &phi, &f_star, &g, 0.5);

    let p = problem(1, phi.clone(), psi.clone(), g.clone(), 0.5);
    let r = assemble(&p, &[]).unwrap();
    let degenerate: Vec<&Vec<i64>> = r.degenerate_modes.iter().map(|m| &m.n).collect();
    assert_eq!(degenerate, vec![&vec![-2], &vec![2]]);
    assert_eq!(r.f.get(&[2]), Complex64::new(0.0, 0.0));
    for n in r.f.frequencies().filter(|n| n[0].abs() != 2) {
        assert!((r.f.get(&n) - f_star.get(&n)).norm() < 1e-9 * f_star.l2_norm());
    }

    let report = uniqueness_probe(&p, &r, FreeCoefficientPolicy::Constant { re: 1.0, im: 0.0 }, ProbeTolerances::default()).unwrap();
    assert_eq!(report.verdict, UniquenessVerdict::NonUnique, "{report:?}");
    assert!(report.max_difference >= 1.0 - 1e-12);

    let mut bad = psi;
    bad.set(&[2], bad.get(&[2]) + 1.0).unwrap();
    bad.set(&[-2], bad.get(&[-2]) + 1.0).unwrap();
    match assemble(&problem(1, phi, bad, g, 0.5), &[]) {
        Err(Error::IncompatibleData { modes }) => assert_eq!(modes.len(), 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn regular_problem_is_unique() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (phi, psi) = (random_field(1, 8, &mut rng), random_field(1, 8, &mut rng));
    let p = problem(1, phi, psi, linear_g(), 0.5);
    let r = assemble(&p, &[]).unwrap();
    let report = uniqueness_probe(&p, &r, FreeCoefficientPolicy::Constant { re: 3.0, im: 0.0 }, ProbeTolerances::default()).unwrap();
    assert_eq!(report.verdict, UniquenessVerdict::Unique);
    assert!(report.bitwise_equal);
}

#[test]
fn free_coefficient_policy_serde() {
    let p: FreeCoefficientPolicy =
        serde_json::from_str(r#"{"kind":"modes","values":[{"n":[2],"re":0.5}]}"#).unwrap();
    assert_eq!(p.value(&[2]), Complex64::new(0.5, 0.0));
    assert_eq!(p.value(&[3]), Complex64::new(0.0, 0.0));
    let s: InverseSettings = serde_json::from_str("{}").unwrap();
    assert_eq!(s, InverseSettings::default());
}
