//! Gauss-Legendre panel rules and an adaptive bisection integrator.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, OnceLock, RwLock};

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes per Gauss-Legendre panel used throughout the crate.
pub const PANEL_NODES: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending in the node.
#[derive(Debug, Clone)]
pub struct LegendreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Cached `n`-point rule.
pub fn legendre_rule(n: usize) -> Arc<LegendreRule> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<LegendreRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.read().unwrap().get(&n) {
        return rule.clone();
    }
    let gl = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let mut pairs: Vec<(f64, f64)> = gl.into_node_weight_pairs().into_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rule = Arc::new(LegendreRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    });
    cache.write().unwrap().entry(n).or_insert(rule).clone()
}

/// Composite rule over consecutive `breaks`, one `PANEL_NODES`-point panel per
/// interval. Returns `(nodes, weights)`.
pub fn composite_rule(breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let rule = legendre_rule(PANEL_NODES);
    let mut xs = Vec::with_capacity(PANEL_NODES * breaks.len());
    let mut ws = Vec::with_capacity(PANEL_NODES * breaks.len());
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            xs.push(mid + half * x);
            ws.push(half * wt);
        }
    }
    (xs, ws)
}

/// Settings for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveSpec {
    pub abs_tol: f64,
    /// Relative to the integral of `|f|`, so that cancelling integrands do
    /// not demand unattainable accuracy.
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-15, rel_tol: 1e-12, max_depth: 60 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    lo: f64,
    hi: f64,
    depth: usize,
    left: f64,
    right: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct PanelCounter {
    rule: Arc<LegendreRule>,
    evals: usize,
}

impl PanelCounter {
    /// `(integral, integral of |f|)` over one panel.
    fn panel<F>(&mut self, f: &mut F, lo: f64, hi: f64) -> Result<(f64, f64)>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut value = 0.0;
        let mut abs_value = 0.0;
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let y = f(mid + half * x)?;
            value += w * y;
            abs_value += w * y.abs();
        }
        self.evals += self.rule.nodes.len();
        Ok((value * half, abs_value * half.abs()))
    }

    fn segment<F>(&mut self, f: &mut F, lo: f64, hi: f64, whole: f64, depth: usize) -> Result<(Segment, f64)>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mid = 0.5 * (lo + hi);
        let (left, la) = self.panel(f, lo, mid)?;
        let (right, ra) = self.panel(f, mid, hi)?;
        let error = (left + right - whole).abs();
        Ok((Segment { lo, hi, depth, left, right, error }, la + ra))
    }
}

/// Globally adaptive bisection with 16-point Gauss-Legendre panels. The local
/// error of a segment is the difference between its one-panel estimate and
/// the sum over its two halves; the segment with the largest error is split
/// until the total error meets the tolerance.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, spec: &AdaptiveSpec) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut counter = PanelCounter { rule: legendre_rule(PANEL_NODES), evals: 0 };
    let mut scale = 0.0;
    let coarse_panels = 8;
    let h = (b - a) / coarse_panels as f64;
    let mut heap = std::collections::BinaryHeap::new();
    for i in 0..coarse_panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == coarse_panels { b } else { lo + h };
        let (whole, _) = counter.panel(&mut f, lo, hi)?;
        let (seg, abs_part) = counter.segment(&mut f, lo, hi, whole, 0)?;
        scale += abs_part;
        heap.push(seg);
    }
    let tol = spec.abs_tol.max(spec.rel_tol * scale);
    let mut total_error: f64 = heap.iter().map(|s: &Segment| s.error).sum();

    while total_error > tol {
        let worst = heap.pop().expect("heap never empties");
        let width = (worst.hi - worst.lo).abs();
        if worst.depth >= spec.max_depth || width <= 4.0 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs()) {
            if worst.depth >= spec.max_depth {
                return Err(Error::QuadratureDivergence { change: total_error, tolerance: tol });
            }
            // cannot split further; accept as is
            total_error -= worst.error;
            let mut frozen = worst;
            frozen.error = 0.0;
            heap.push(frozen);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (l, _) = counter.segment(&mut f, worst.lo, mid, worst.left, worst.depth + 1)?;
        let (r, _) = counter.segment(&mut f, mid, worst.hi, worst.right, worst.depth + 1)?;
        total_error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        if heap.iter().all(|s| s.error == 0.0) {
            break;
        }
    }
    // recompute the error sum to shed accumulated drift
    let error = heap.iter().map(|s| s.error).sum();
    let mut parts: Vec<(f64, f64)> = heap.iter().map(|s| (s.lo, s.left + s.right)).collect();
    parts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value = parts.iter().map(|p| p.1).sum();
    Ok(Integral { value, error, evaluations: counter.evals })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let r = legendre_rule(PANEL_NODES);
        let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn composite_rule_covers_interval() {
        let (xs, ws) = composite_rule(&[0.0, 1.0, 3.0]);
        assert_eq!(xs.len(), 2 * PANEL_NODES);
        let total: f64 = ws.iter().sum();
        assert!((total - 3.0).abs() < 1e-14);
        let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.exp()).sum();
        assert!((s - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // integral of x^{-0.7} over [0,1] is 1/0.3
        let spec = AdaptiveSpec { abs_tol: 1e-13, rel_tol: 1e-12, max_depth: 200 };
        let r = integrate_adaptive(|x| Ok(x.powf(-0.7)), 0.0, 1.0, &spec).unwrap();
        assert!((r.value - 1.0 / 0.3).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn adaptive_boundary_layer() {
        let lam = 1e4;
        let spec = AdaptiveSpec::default();
        let r = integrate_adaptive(|x| Ok((-lam * x).exp()), 0.0, 1.0, &spec).unwrap();
        let exact = (1.0 - (-lam).exp()) / lam;
        assert!(((r.value - exact) / exact).abs() < 1e-11);
    }

    #[test]
    fn adaptive_propagates_errors() {
        let spec = AdaptiveSpec::default();
        let r = integrate_adaptive(
            |x| if x > 0.5 { Err(Error::InvalidArgument("boom".into())) } else { Ok(x) },
            0.0,
            1.0,
            &spec,
        );
        assert!(r.is_err());
    }
}
