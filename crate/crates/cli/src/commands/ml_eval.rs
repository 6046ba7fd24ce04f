use anyhow::Result;
use serde::Serialize;
use tfsource_core::multiml::{
    ml_asymptotic, ml_contour, ml_eval, ml_series_with, ContourSpec, MlArguments, Regime,
};

use crate::config::ProblemConfig;
use crate::stats::loglog_slope;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub z1: f64,
    pub regime: Regime,
    pub value_re: f64,
    pub value_im: f64,
    pub est_error: f64,
    /// `|series - contour| / |contour|` where both regimes apply.
    pub deviation: Option<f64>,
    /// Whether the deviation is within tolerance or covered by the error estimates.
    pub agrees: bool,
    /// `|asymptotic_p - contour|` for each configured `p`.
    pub asymptotic_error: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub beta: f64,
    pub secondary: Vec<f64>,
    pub tolerance: f64,
    pub rows: Vec<SweepRow>,
    pub failures: usize,
    /// `(p, fitted log-log slope of the p-term remainder)`.
    pub slopes: Vec<(usize, Option<f64>)>,
}

pub fn run_sweep(cfg: &ProblemConfig) -> Result<SweepSummary> {
    let orders = &cfg.orders;
    let policy = cfg.regime();
    let s = &cfg.sweep;
    let secondary = cfg.sweep_secondary();
    let tol = cfg.tolerances.agreement;
    let (lo, hi) = (s.z_min.ln(), s.z_max.ln());
    let mut rows = Vec::with_capacity(s.points);
    for i in 0..s.points {
        let mag = (lo + (hi - lo) * i as f64 / (s.points - 1) as f64).exp();
        let mut z = vec![-mag];
        z.extend(&secondary);
        let args = MlArguments::real(s.beta, &z)?;
        let eval = ml_eval(orders, &args, &policy)?;
        let spec = ContourSpec::select(orders, args.secondary_bound(), &policy.contour)?;
        let contour = ml_contour(orders, &args, &spec).ok();
        let series = ml_series_with(orders, &args, &policy.series).ok();
        let (deviation, agrees) = match (&series, &contour) {
            (Some(sv), Some(cv)) => {
                let diff = (sv.value - cv.value).norm();
                let dev = diff / cv.value.norm();
                (Some(dev), dev <= tol || diff <= 4.0 * (sv.est_error + cv.est_error))
            }
            _ => (None, true),
        };
        let asymptotic_error = s
            .asymptotic_terms
            .iter()
            .map(|&p| {
                let c = contour.as_ref()?;
                let a = ml_asymptotic(orders, &args, p, &spec).ok()?;
                Some((a.value - c.value).norm())
            })
            .collect();
        rows.push(SweepRow {
            z1: -mag,
            regime: eval.regime,
            value_re: eval.value.re,
            value_im: eval.value.im,
            est_error: eval.est_error,
            deviation,
            agrees,
            asymptotic_error,
        });
    }
    let slopes = s
        .asymptotic_terms
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| r.asymptotic_error[j].filter(|e| *e > 0.0).map(|e| (-r.z1, e)))
                .collect();
            let slope = (pts.len() >= 2).then(|| {
                let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                loglog_slope(&x, &y)
            });
            (p, slope)
        })
        .collect();
    let failures = rows.iter().filter(|r| !r.agrees).count();
    Ok(SweepSummary { beta: s.beta, secondary, tolerance: tol, rows, failures, slopes })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sweep_csv(summary: &SweepSummary, terms: &[usize]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> =
        ["z1", "regime", "value_re", "value_im", "est_error", "deviation", "agrees"].map(String::from).to_vec();
    header.extend(terms.iter().map(|p| format!("asymptotic_error_p{p}")));
    w.write_record(&header)?;
    for r in &summary.rows {
        let mut row = vec![
            r.z1.to_string(),
            r.regime.to_string(),
            r.value_re.to_string(),
            r.value_im.to_string(),
            r.est_error.to_string(),
            opt(r.deviation),
            r.agrees.to_string(),
        ];
        row.extend(r.asymptotic_error.iter().map(|e| opt(*e)));
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}
