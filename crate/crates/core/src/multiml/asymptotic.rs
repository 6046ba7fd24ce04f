use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_complex::Complex64;

use super::contour::{check_contour_args, contour_moments, ContourSpec};
use super::{rgamma, MlArguments, MlValue};
use crate::error::{Error, Result};
use crate::orders::FractionalOrders;

#[derive(Clone, PartialEq, Eq, Hash)]
struct CoefficientKey {
    orders: Vec<u64>,
    beta: u64,
    rest: Vec<String>,
}

fn coefficient_cache() -> &'static RwLock<HashMap<CoefficientKey, Vec<Complex64>>> {
    static CACHE: OnceLock<RwLock<HashMap<CoefficientKey, Vec<Complex64>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `C_1, ..., C_p` of the expansion `E ~ -sum_k C_k z_1^{-k}`. The first two
/// have closed forms; the rest are contour moments of
/// `Q(s) = s - sum_{j>=2} z_j s^{rho_j/rho_1}`.
pub fn asymptotic_coefficients(
    orders: &FractionalOrders,
    beta: f64,
    rest: &[f64],
    p: usize,
    spec: &ContourSpec,
) -> Result<Vec<Complex64>> {
    if rest.len() + 1 != orders.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} secondary arguments for {} orders",
            rest.len(),
            orders.len()
        )));
    }
    let key = CoefficientKey {
        orders: orders.cache_key(),
        beta: beta.to_bits(),
        rest: rest.iter().map(|z| format!("{z:.11e}")).collect(),
    };
    if let Some(c) = coefficient_cache().read().expect("coefficient cache poisoned").get(&key) {
        if c.len() >= p {
            return Ok(c[..p].to_vec());
        }
    }

    let r1 = orders.leading();
    let mut coeffs = vec![Complex64::new(rgamma(beta - r1), 0.0)];
    let c2 = rgamma(beta - 2.0 * r1)
        - rest
            .iter()
            .zip(&orders.rho()[1..])
            .map(|(z, r)| z * rgamma(beta - r1 - r))
            .sum::<f64>();
    coeffs.push(Complex64::new(c2, 0.0));
    if p > 2 {
        let moments = contour_moments(orders, beta, rest, p, spec)?;
        coeffs.extend_from_slice(&moments[2..p]);
    }
    coeffs.truncate(p.max(1));

    let mut cache = coefficient_cache().write().expect("coefficient cache poisoned");
    let entry = cache.entry(key).or_default();
    if entry.len() < coeffs.len() {
        *entry = coeffs.clone();
    }
    Ok(coeffs)
}

/// The truncated inverse-power expansion in `z_1` with `p` terms. The error
/// estimate is the magnitude of the first omitted term.
pub fn ml_asymptotic(
    orders: &FractionalOrders,
    args: &MlArguments,
    p: usize,
    spec: &ContourSpec,
) -> Result<MlValue> {
    let rest = check_contour_args(orders, args, spec)?;
    let (beta, r1) = (args.beta(), orders.leading());
    if !(beta > 2.0 * r1) {
        return Err(Error::HypothesisViolation { beta, rho1: r1 });
    }
    if p == 0 {
        return Err(Error::InvalidArgument("at least one asymptotic term is required".into()));
    }
    let z1 = args.z1();
    if z1.norm() == 0.0 {
        return Err(Error::InvalidArgument("asymptotic expansion needs z1 != 0".into()));
    }
    let coeffs = asymptotic_coefficients(orders, beta, &rest, p + 1, spec)?;
    let inv = z1.inv();
    let mut power = inv;
    let mut value = Complex64::new(0.0, 0.0);
    for c in &coeffs[..p] {
        value -= c * power;
        power *= inv;
    }
    Ok(MlValue { value, est_error: (coeffs[p] * power).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiml::{ml_contour, ContourConfig};

    fn orders() -> FractionalOrders {
        FractionalOrders::new(vec![0.8, 0.3], vec![1.0, 0.5]).unwrap()
    }

    /// `C_k` by expanding `Q^{k-1}` into powers `s^c` and using
    /// `(1/(2 rho pi i)) int exp(s^{1/rho}) s^{(1-beta)/rho + c} ds = 1/Gamma(beta - rho - rho c)`.
    fn closed_form(beta: f64, rho: (f64, f64), z2: f64, k: usize) -> f64 {
        let (r1, r2) = rho;
        let m = k - 1;
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=m {
            if j > 0 {
                binom *= (m - j + 1) as f64 / j as f64;
            }
            let c = (m - j) as f64 + j as f64 * r2 / r1;
            total += binom * (-z2).powi(j as i32) * rgamma(beta - r1 - r1 * c);
        }
        total
    }

    #[test]
    fn contour_coefficients_match_closed_form() {
        let o = orders();
        let spec = ContourSpec::select(&o, 0.5, &ContourConfig::default()).unwrap();
        let c = asymptotic_coefficients(&o, 1.8, &[-0.5], 6, &spec).unwrap();
        // high-precision values of C_1..C_6
        let reference = [
            1.0,
            0.603_016_476_144_950_3,
            -0.251_366_341_809_331_15,
            0.045_827_009_586_246_29,
            0.523_535_555_735_254_3,
            -2.124_526_400_547_019_8,
        ];
        for (k, (ck, r)) in c.iter().zip(reference).enumerate() {
            assert!((ck.re - r).abs() < 1e-10 * (1.0 + r.abs()), "C_{} = {ck} vs {r}", k + 1);
            assert!(ck.im.abs() < 1e-10);
            let oracle = closed_form(1.8, (0.8, 0.3), -0.5, k + 1);
            assert!((ck.re - oracle).abs() < 1e-10 * (1.0 + r.abs()));
        }
    }

    #[test]
    fn leading_term_for_half_order() {
        let o = FractionalOrders::single(0.5).unwrap();
        let args = MlArguments::real(1.5, &[-1e6]).unwrap();
        let spec = ContourSpec::select(&o, 0.0, &ContourConfig::default()).unwrap();
        let v = ml_asymptotic(&o, &args, 1, &spec).unwrap().value.re;
        assert!((v - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn two_terms_match_reference() {
        // high-precision summation of E_{0.5,1.6}(-100)
        let o = FractionalOrders::single(0.5).unwrap();
        let args = MlArguments::real(1.6, &[-100.0]).unwrap();
        let spec = ContourSpec::select(&o, 0.0, &ContourConfig::default()).unwrap();
        let v = ml_asymptotic(&o, &args, 2, &spec).unwrap().value.re;
        let reference = 0.010_444_327_353_759_683;
        assert!((v / reference - 1.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn agrees_with_contour_at_large_argument() {
        let o = orders();
        let z1 = -1e3;
        let args = MlArguments::real(1.8, &[z1, -0.5]).unwrap();
        let spec = ContourSpec::select(&o, 0.5, &ContourConfig::default()).unwrap();
        let c = ml_contour(&o, &args, &spec).unwrap().value.re;
        let a = ml_asymptotic(&o, &args, 2, &spec).unwrap().value.re;
        assert!((a - c).abs() < 10.0 * (1e3f64).powi(-3), "{a} vs {c}");
    }

    #[test]
    fn hypothesis_is_enforced() {
        let o = orders();
        let args = MlArguments::real(1.5, &[-1e3, -0.5]).unwrap();
        let spec = ContourSpec::select(&o, 0.5, &ContourConfig::default()).unwrap();
        assert!(matches!(
            ml_asymptotic(&o, &args, 2, &spec),
            Err(Error::HypothesisViolation { .. })
        ));
    }
}
