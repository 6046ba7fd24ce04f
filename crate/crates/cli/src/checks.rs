//! Property checks shared by `tfsource verify` and the acceptance suite.

use anyhow::{ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use tfsource_core::fracode::{
    b_coefficient, b_coefficient_report, caputo_l1_residual, mode_solve, GProfile, ProfileKind, Settings,
    SourceTimeProfile,
};
use tfsource_core::inverse::{
    assemble, bisect_cosine_degeneracy, forward_fields, uniqueness_probe, FreeCoefficientPolicy, InverseProblem,
    InverseSettings, ProbeTolerances, UniquenessVerdict,
};
use tfsource_core::multiml::{
    ml_asymptotic, ml_bound_check, ml_contour, ml_eval, ml_mode, ml_series_with, series_peak_root, ContourConfig,
    ContourSpec, MlArguments, RegimePolicy,
};
use tfsource_core::torus::{analyze, mode_list, synthesize, EllipticSymbol, SpectralField};
use tfsource_core::{Complex64, Error, FractionalOrders};

use crate::io::random_field;
use crate::stats::{halving_orders, linear_fit, loglog_slope};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: Value,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, measured: Value, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, measured, detail: detail.into() }
    }

    /// A failed check carrying the error that stopped it.
    pub fn errored(name: impl Into<String>, err: &anyhow::Error) -> Self {
        Self::new(name, false, Value::Null, format!("{err:#}"))
    }
}

fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
}

fn with_secondary(z1: f64, secondary: &[f64]) -> Vec<f64> {
    let mut z = vec![z1];
    z.extend(secondary);
    z
}

/// Contour angles and radius for the given arguments; surfaces `ContourViolation`.
pub fn contour_spec(orders: &FractionalOrders, secondary: &[f64], cfg: &ContourConfig) -> Check {
    let bound = secondary.iter().fold(0.0, |a: f64, z| a.max(z.abs()));
    match ContourSpec::select(orders, bound, cfg) {
        Ok(s) => Check::new(
            "contour-spec",
            true,
            json!({ "theta": s.theta, "mu": s.mu, "radius": s.radius, "ray_cutoff": s.ray_cutoff }),
            "contour admissible",
        ),
        Err(e) => Check::new("contour-spec", false, Value::Null, e.to_string()),
    }
}

/// Log-log slopes of `|asymptotic_p - contour|` over `|z_1|` in `[z_min, z_max]`.
pub fn tail_slopes(
    orders: &FractionalOrders,
    beta: f64,
    secondary: &[f64],
    terms: &[usize],
    (z_min, z_max): (f64, f64),
    points: usize,
) -> Result<Vec<(usize, f64, Vec<f64>)>> {
    let mags = log_space(z_min, z_max, points);
    let bound = secondary.iter().fold(0.0, |a: f64, z| a.max(z.abs()));
    let spec = ContourSpec::select(orders, bound, &ContourConfig::default())?;
    let mut errors = vec![Vec::with_capacity(points); terms.len()];
    for &m in &mags {
        let args = MlArguments::real(beta, &with_secondary(-m, secondary))?;
        let c = ml_contour(orders, &args, &spec)?;
        for (j, &p) in terms.iter().enumerate() {
            let a = ml_asymptotic(orders, &args, p, &spec)?;
            errors[j].push((a.value - c.value).norm());
        }
    }
    Ok(terms
        .iter()
        .zip(errors)
        .map(|(&p, e)| {
            let (x, y): (Vec<f64>, Vec<f64>) = mags.iter().zip(&e).filter(|(_, v)| **v > 0.0).map(|(a, b)| (*a, *b)).unzip();
            let slope = if x.len() >= 2 { loglog_slope(&x, &y) } else { f64::NAN };
            (p, slope, e)
        })
        .collect())
}

pub fn tail_order_checks(
    orders: &FractionalOrders,
    beta: f64,
    secondary: &[f64],
    terms: &[usize],
    range: (f64, f64),
    tolerance: f64,
) -> Result<Vec<Check>> {
    let slopes = tail_slopes(orders, beta, secondary, terms, range, 13)?;
    Ok(slopes
        .into_iter()
        .map(|(p, slope, errors)| {
            let expected = -(p as f64 + 1.0);
            Check::new(
                format!("tail-order-p{p}"),
                (slope - expected).abs() <= tolerance,
                json!({ "slope": slope, "expected": expected, "tolerance": tolerance, "errors": errors }),
                format!("slope {slope:.3} vs {expected} over |z1| in [{:e}, {:e}]", range.0, range.1),
            )
        })
        .collect())
}

/// Random decreasing orders with `q_1 = 1`, mirroring the property tests.
fn random_orders(rng: &mut ChaCha8Rng) -> FractionalOrders {
    let m = rng.gen_range(1..=3usize);
    let mut rho = vec![rng.gen_range(0.35..0.95)];
    let mut q = vec![1.0];
    for _ in 1..m {
        let last = *rho.last().unwrap();
        rho.push(last * rng.gen_range(0.15..0.8));
        q.push(rng.gen_range(0.2..2.0));
    }
    FractionalOrders::new(rho, q).expect("strictly decreasing orders")
}

/// Series against contour on random mode arguments inside the overlap zone,
/// where the series converges without catastrophic cancellation.
pub fn regime_agreement(samples: usize, seed: u64, tolerance: f64, min_fraction: f64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let policy = RegimePolicy::default();
    let (mut within, mut explained, mut skipped) = (0usize, 0usize, 0usize);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut drawn = 0;
    while drawn < samples {
        let o = random_orders(&mut rng);
        let beta = rng.gen_range(0.4..2.5);
        let lambda = rng.gen_range(0.0..6.0);
        let t = rng.gen_range(0.05..1.0);
        let args = MlArguments::for_mode(&o, beta, lambda, t)?;
        if series_peak_root(&o, &args).powf(1.0 / o.leading()) > 10.0 {
            skipped += 1;
            continue;
        }
        let Ok(s) = ml_series_with(&o, &args, &policy.series) else {
            skipped += 1;
            continue;
        };
        drawn += 1;
        let spec = ContourSpec::select(&o, args.secondary_bound(), &policy.contour)?;
        let c = ml_contour(&o, &args, &spec)?;
        let diff = (s.value - c.value).norm();
        let rel = diff / s.value.norm();
        worst = worst.max(rel);
        if rel < tolerance {
            within += 1;
        } else {
            let covered = diff <= 4.0 * (s.est_error + c.est_error);
            explained += covered as usize;
            failures.push(json!({
                "rho": o.rho(), "q": o.q(), "beta": beta, "lambda": lambda, "t": t,
                "relative": rel, "series_error": s.est_error, "contour_error": c.est_error, "explained": covered,
            }));
        }
    }
    let fraction = within as f64 / samples as f64;
    let unexplained = failures.len() - explained;
    Ok(Check::new(
        "regime-agreement",
        fraction >= min_fraction && unexplained == 0,
        json!({
            "samples": samples, "within": within, "fraction": fraction, "max_relative": worst,
            "skipped_outside_overlap": skipped, "failures": failures,
        }),
        format!("{within}/{samples} within {tolerance:e}, {unexplained} unexplained"),
    ))
}

/// `E_{1,1}(x) = e^x` and `E_{1/2,1}(-x) = e^{x^2} erfc(x)` on `[0, 5]`.
pub fn classical_identities(points: usize, tolerance: f64) -> Result<Check> {
    let policy = RegimePolicy::default();
    let exp_order = FractionalOrders::single(1.0)?;
    let half = FractionalOrders::single(0.5)?;
    let (mut exp_err, mut erfc_err) = (0.0f64, 0.0f64);
    for i in 0..points {
        let x = 5.0 * i as f64 / (points - 1) as f64;
        let e = ml_eval(&exp_order, &MlArguments::real(1.0, &[x])?, &policy)?.value.re;
        exp_err = exp_err.max((e - x.exp()).abs() / x.exp());
        let h = ml_eval(&half, &MlArguments::real(1.0, &[-x])?, &policy)?.value.re;
        let reference = (x * x).exp() * libm::erfc(x);
        erfc_err = erfc_err.max((h - reference).abs() / reference);
    }
    Ok(Check::new(
        "classical-identities",
        exp_err < tolerance && erfc_err < tolerance,
        json!({ "exp_relative": exp_err, "erfc_relative": erfc_err, "tolerance": tolerance }),
        format!("exp {exp_err:.2e}, erfc {erfc_err:.2e}"),
    ))
}

/// Fitted constant of `|E| <= C / (1 + |z_1|)` along the negative axis.
pub fn bound_constant(orders: &FractionalOrders, beta: f64, secondary: &[f64]) -> Result<Check> {
    let args = MlArguments::real(beta, &with_secondary(-1e3, secondary))?;
    let r = ml_bound_check(orders, &args, &RegimePolicy::default())?;
    Ok(Check::new(
        "decay-bound",
        r.constant.is_finite() && r.abs_value <= r.bound,
        json!({ "constant": r.constant, "abs_value": r.abs_value, "bound": r.bound }),
        format!("C = {:.4}", r.constant),
    ))
}

/// Central differences of `t^{rho_1} E_{rho',rho_1+1}` against
/// `t^{rho_1-1} E_{rho',rho_1}` on an `h`-halving ladder.
pub fn derivative_order(
    combos: &[(FractionalOrders, f64)],
    t: f64,
    h0: f64,
    rungs: usize,
    tolerance: f64,
) -> Result<Check> {
    let policy = RegimePolicy::default();
    let mut table = Vec::new();
    let mut passed = true;
    for (o, lambda) in combos {
        let r1 = o.leading();
        let prim = |s: f64| -> Result<f64> { Ok(s.powf(r1) * ml_mode(o, r1 + 1.0, *lambda, s, &policy)?) };
        let exact = t.powf(r1 - 1.0) * ml_mode(o, r1, *lambda, t, &policy)?;
        let errors = (0..rungs)
            .map(|k| {
                let h = h0 / 2f64.powi(k as i32);
                Ok(((prim(t + h)? - prim(t - h)?) / (2.0 * h) - exact).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let observed = halving_orders(&errors);
        passed &= observed.iter().all(|p| (p - 2.0).abs() <= tolerance);
        table.push(json!({ "rho": o.rho(), "q": o.q(), "lambda": lambda, "errors": errors, "orders": observed }));
    }
    Ok(Check::new(
        "derivative-order",
        passed,
        json!({ "t": t, "h0": h0, "combinations": table }),
        format!("central differences, {rungs} rungs from h = {h0}"),
    ))
}

fn distinct_eigenvalues(symbol: &EllipticSymbol, cutoff: usize) -> Result<Vec<f64>> {
    let mut lambdas: Vec<f64> = mode_list(symbol, cutoff)?.into_iter().map(|m| m.lambda).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    Ok(lambdas)
}

/// Positive kernel at the quadrature nodes and `lambda b(t0)` confined to
/// `[C0, C1]` over the nonzero spectrum, for `g = 1`.
pub fn positivity_sandwich(
    orders: &FractionalOrders,
    symbol: &EllipticSymbol,
    cutoff: usize,
    t0: f64,
    horizon: f64,
    max_ratio: f64,
    settings: &Settings,
) -> Result<Check> {
    let g = SourceTimeProfile::new(GProfile::Constant { value: 1.0 }, horizon)?;
    let mut min_kernel = f64::INFINITY;
    let (mut c0, mut c1) = (f64::INFINITY, 0.0f64);
    let mut count = 0;
    for lambda in distinct_eigenvalues(symbol, cutoff)?.into_iter().filter(|l| *l > 0.0) {
        let r = b_coefficient_report(orders, lambda, &g, t0, settings)?;
        min_kernel = min_kernel.min(r.min_kernel);
        let scaled = lambda * r.value.abs();
        c0 = c0.min(scaled);
        c1 = c1.max(scaled);
        count += 1;
    }
    let ratio = c1 / c0;
    Ok(Check::new(
        "positivity-sandwich",
        min_kernel > 0.0 && ratio < max_ratio,
        json!({ "eigenvalues": count, "min_kernel": min_kernel, "c0": c0, "c1": c1, "ratio": ratio }),
        format!("C0 = {c0:.4}, C1 = {c1:.4}, ratio {ratio:.3}"),
    ))
}

/// `lambda b(t0) -> g(0)` over the top decade of the spectrum.
pub fn large_eigenvalue_limit(
    orders: &FractionalOrders,
    symbol: &EllipticSymbol,
    cutoff: usize,
    g: &SourceTimeProfile,
    t0: f64,
    tolerance: f64,
    settings: &Settings,
) -> Result<Check> {
    let lambdas = distinct_eigenvalues(symbol, cutoff)?;
    let top = *lambdas.last().context("empty spectrum")?;
    let target = g.eval(0.0);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for lambda in lambdas.into_iter().filter(|l| *l >= top / 10.0 && *l > 0.0) {
        let scaled = lambda * b_coefficient(orders, lambda, g, t0, settings)?;
        worst = worst.max((scaled - target).abs());
        rows.push(json!([lambda, scaled]));
    }
    Ok(Check::new(
        "large-eigenvalue-limit",
        worst <= tolerance,
        json!({ "target": target, "max_deviation": worst, "tolerance": tolerance, "samples": rows }),
        format!("max |lambda b - g(0)| = {worst:.4} over lambda in [{:.1}, {top}]", top / 10.0),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderRung {
    pub steps: usize,
    pub dt: f64,
    pub max_abs: f64,
    pub tail_max: f64,
}

#[derive(Debug, Clone)]
pub struct CaputoLadder {
    pub check: Check,
    pub rungs: Vec<LadderRung>,
    /// `(t, T, b, residual)` on the finest rung.
    pub trace: Vec<[f64; 4]>,
}

/// L1 residual of `mode_solve` traces on a `dt`-halving ladder; the observed
/// order on `t >= tail_start` should be `2 - rho_1`.
#[allow(clippy::too_many_arguments)]
pub fn caputo_ladder(
    orders: &FractionalOrders,
    lambda: f64,
    (phi, f): (f64, f64),
    g: &SourceTimeProfile,
    steps: &[usize],
    tail_start: f64,
    tolerance: f64,
    settings: &Settings,
) -> Result<CaputoLadder> {
    let horizon = g.horizon();
    let mut rungs = Vec::new();
    let mut trace = Vec::new();
    for &n in steps {
        let dt = horizon / n as f64;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
        let sol = mode_solve(orders, lambda, phi, f, g, &times, settings)?;
        let r = caputo_l1_residual(orders, &sol, g, dt, tail_start)?;
        trace = std::iter::once([0.0, sol.values[0], sol.b[0], 0.0])
            .chain((1..=n).map(|i| [times[i], sol.values[i], sol.b[i], r.residuals[i - 1]]))
            .collect();
        rungs.push(LadderRung { steps: n, dt, max_abs: r.max_abs, tail_max: r.tail_max });
    }
    let tails: Vec<f64> = rungs.iter().map(|r| r.tail_max).collect();
    let observed = halving_orders(&tails);
    let expected = 2.0 - orders.leading();
    let passed = !observed.is_empty() && observed.iter().all(|p| (p - expected).abs() <= tolerance);
    let check = Check::new(
        "caputo-residual-order",
        passed,
        json!({ "lambda": lambda, "expected": expected, "orders": observed, "rungs": rungs }),
        format!("observed {observed:.3?} vs {expected:.2}"),
    );
    Ok(CaputoLadder { check, rungs, trace })
}

/// Grid round trip and Parseval for a random band-limited field.
pub fn torus_round_trip(dim: usize, cutoff: usize, seed: u64) -> Result<Check> {
    let field = random_field(dim, cutoff, 1.0, 1.0, seed)?;
    let grid = synthesize(&field, 2 * cutoff + 2)?;
    let back = analyze(&grid, cutoff)?;
    let round_trip = back.sub(&field)?.l2_norm() / field.l2_norm();
    let energy = field.l2_norm().powi(2);
    let parseval = (grid.mean_energy() - energy).abs() / energy;
    Ok(Check::new(
        format!("torus-round-trip-{dim}d"),
        round_trip < 1e-12 && parseval < 1e-12,
        json!({ "round_trip": round_trip, "parseval": parseval }),
        format!("round trip {round_trip:.2e}, Parseval {parseval:.2e}"),
    ))
}

pub struct RoundTripCase<'a> {
    pub orders: &'a FractionalOrders,
    pub symbol: &'a EllipticSymbol,
    pub cutoff: usize,
    pub g: &'a SourceTimeProfile,
    pub t0: f64,
    pub seed: u64,
}

fn base_problem(c: &RoundTripCase, phi: SpectralField, psi: SpectralField, settings: &InverseSettings) -> InverseProblem {
    InverseProblem {
        orders: c.orders.clone(),
        symbol: c.symbol.clone(),
        g: c.g.clone(),
        t0: c.t0,
        phi,
        psi,
        settings: settings.clone(),
    }
}

fn synthesize_problem(c: &RoundTripCase, settings: &InverseSettings) -> Result<(InverseProblem, SpectralField)> {
    let dim = c.symbol.dim();
    let phi = random_field(dim, c.cutoff, 1.0, 2.0, c.seed)?;
    let f = random_field(dim, c.cutoff, 1.0, 2.0, c.seed.wrapping_add(1))?;
    let psi = forward_fields(c.orders, c.symbol, c.g, &phi, &f, &[c.t0], &settings.solver)?.remove(0);
    Ok((base_problem(c, phi, psi, settings), f))
}

/// Forward synthesis followed by inversion recovers the source.
pub fn inversion_round_trip(
    c: &RoundTripCase,
    error_tol: f64,
    residual_tol: f64,
    settings: &InverseSettings,
) -> Result<Check> {
    let (problem, f) = synthesize_problem(c, settings)?;
    let r = assemble(&problem, &[])?;
    let error = r.f.sub(&f)?.l2_norm() / f.l2_norm();
    let residual = r.diagnostics.overdetermination_relative;
    Ok(Check::new(
        format!("inversion-round-trip-{}d", c.symbol.dim()),
        error < error_tol && residual < residual_tol && r.is_unique(),
        json!({ "cutoff": c.cutoff, "relative_error": error, "overdetermination_relative": residual,
                "degenerate": r.degenerate_modes.len() }),
        format!("error {error:.2e}, residual {residual:.2e}"),
    ))
}

/// Amplification `|delta f_n| / delta` from perturbing `Psi_n` alone,
/// compared with `1 / |b_n(t0)|` and fitted linearly against `lambda_n`.
pub fn amplification_scaling(
    c: &RoundTripCase,
    delta: f64,
    min_r2: f64,
    settings: &InverseSettings,
) -> Result<Check> {
    let (problem, _) = synthesize_problem(c, settings)?;
    let base = assemble(&problem, &[])?;
    let (mut lambdas, mut amps) = (Vec::new(), Vec::new());
    let mut worst_mismatch = 0.0f64;
    for m in mode_list(c.symbol, c.cutoff)? {
        if m.lambda <= 0.0 || m.n.iter().find(|k| **k != 0).is_some_and(|k| *k < 0) {
            continue;
        }
        let mut perturbed = problem.clone();
        let v = perturbed.psi.get(&m.n);
        perturbed.psi.set(&m.n, v + Complex64::new(delta, 0.0))?;
        let r = assemble(&perturbed, &[])?;
        let amp = (r.f.get(&m.n) - base.f.get(&m.n)).norm() / delta;
        let record = base.modes.iter().find(|x| x.classification.n == m.n).context("mode missing")?;
        let predicted = 1.0 / record.classification.b_t0.abs();
        worst_mismatch = worst_mismatch.max((amp - predicted).abs() / predicted);
        lambdas.push(m.lambda);
        amps.push(amp);
    }
    ensure!(lambdas.len() >= 2, "need at least two nonzero eigenvalues");
    let (slope, intercept, r2) = linear_fit(&lambdas, &amps);
    Ok(Check::new(
        "amplification-scaling",
        r2 > min_r2 && worst_mismatch < 1e-4,
        json!({ "delta": delta, "slope": slope, "intercept": intercept, "r2": r2,
                "max_relative_mismatch": worst_mismatch, "modes": lambdas.len() }),
        format!("slope {slope:.4}, R^2 {r2:.5}, |amp - 1/|b|| <= {worst_mismatch:.1e} relative"),
    ))
}

/// Construction with a single degenerate eigenvalue: `g = cos(omega t)` with
/// `omega` bisected so that `b(t0) = 0` at `lambda = 4` on `T^1`.
pub struct DegenerateCase {
    pub orders: FractionalOrders,
    pub symbol: EllipticSymbol,
    pub g: SourceTimeProfile,
    pub omega: f64,
    pub t0: f64,
    pub cutoff: usize,
}

impl DegenerateCase {
    pub fn build(settings: &Settings) -> Result<Self> {
        let orders = FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5])?;
        let (t0, horizon) = (0.5, 1.0);
        let omega = bisect_cosine_degeneracy(&orders, 4.0, t0, horizon, (4.0, 4.5), settings)?;
        let g = SourceTimeProfile::new(GProfile::Cosine { amplitude: 1.0, omega, phase: 0.0 }, horizon)?;
        Ok(Self { orders, symbol: EllipticSymbol::laplacian(1)?, g, omega, t0, cutoff: 4 })
    }

    pub fn case(&self, seed: u64) -> RoundTripCase<'_> {
        RoundTripCase { orders: &self.orders, symbol: &self.symbol, cutoff: self.cutoff, g: &self.g, t0: self.t0, seed }
    }

    /// Compatible data from a known source, and the same data with `Psi_2`
    /// shifted by `shift`.
    pub fn data(&self, seed: u64, shift: f64, settings: &InverseSettings) -> Result<(InverseProblem, InverseProblem)> {
        let (compatible, _) = synthesize_problem(&self.case(seed), settings)?;
        let mut incompatible = compatible.clone();
        let v = incompatible.psi.get(&[2]);
        incompatible.psi.set(&[2], v + Complex64::new(shift, 0.0))?;
        Ok((compatible, incompatible))
    }
}

/// Regular data give bit-identical sources under two free-coefficient
/// policies; compatible degenerate data give two valid distinct sources and
/// incompatible degenerate data are rejected.
pub fn dichotomy(regular: &RoundTripCase, settings: &InverseSettings) -> Result<Check> {
    let tolerances = ProbeTolerances::default();
    let alternative = FreeCoefficientPolicy::Constant { re: 1.0, im: 0.0 };

    let (problem, _) = synthesize_problem(regular, settings)?;
    let r = assemble(&problem, &[])?;
    let unique = uniqueness_probe(&problem, &r, alternative.clone(), tolerances)?;

    let deg = DegenerateCase::build(&settings.solver)?;
    let (compatible, incompatible) = deg.data(regular.seed, 1e-3, settings)?;
    let rc = assemble(&compatible, &[])?;
    let non_unique = uniqueness_probe(&compatible, &rc, alternative, tolerances)?;
    let rejected = match assemble(&incompatible, &[]) {
        Err(Error::IncompatibleData { modes }) => Some(modes.len()),
        Err(e) => return Err(e.into()),
        Ok(_) => None,
    };
    let degenerate: Vec<&Vec<i64>> = rc.degenerate_modes.iter().map(|m| &m.n).collect();
    let passed = unique.verdict == UniquenessVerdict::Unique
        && non_unique.verdict == UniquenessVerdict::NonUnique
        && rejected.is_some();
    Ok(Check::new(
        "uniqueness-dichotomy",
        passed,
        json!({
            "regular": unique, "omega": deg.omega, "degenerate_modes": degenerate,
            "compatible": non_unique, "incompatible_modes": rejected,
        }),
        format!(
            "regular {:?}, degenerate {:?} on {degenerate:?}, incompatible rejected on {} mode(s)",
            unique.verdict,
            non_unique.verdict,
            rejected.unwrap_or(0)
        ),
    ))
}

/// Whether a profile meets the hypotheses of the large-eigenvalue limit.
pub fn sign_changing(g: &SourceTimeProfile) -> bool {
    g.kind() == ProfileKind::SignChanging
}
