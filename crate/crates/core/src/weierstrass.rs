//! Polynomial approximation of `|x|` and `x₊` on `[−1, 1]` by truncating
//! the binomial series of `(1 − t)^{1/2}` at `t = 1 − x²`.
//!
//! With `c_n = (2n)! / ((2n − 1) 4^n (n!)²)` one has
//! `(1 − t)^{1/2} = −Σ c_n tⁿ`, hence
//! `P_N(x) = Σ_m (−1)^{m+1} (Σ_{n=m}^N c_n C(n, m)) x^{2m}`.
//! `P_N(1) = 1` exactly and the worst error sits at `x = 0`, where it equals
//! the series tail `Σ_{n>N} c_n ≍ N^{−1/2}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};

/// Largest accepted `N_terms`; beyond this the monomial coefficients lose
/// too much to cancellation in double precision.
pub const MAX_TERMS: usize = 60;

/// Number of equispaced samples in the sup-error certificate.
pub const SAMPLES: usize = 100_000;

/// Calibrated `C` in `degree ≤ C·ε^{−2/3}` over the reachable range of ε.
/// Re-derived by a unit test from the actual builds.
pub const DEGREE_CONST: f64 = 16.0;

/// Calibrated `K` in `height ≤ exp(K·ε^{−2/3})` over the reachable range.
pub const HEIGHT_CONST: f64 = 3.0;

/// `c_n` in floating point by the ratio `c_{n+1}/c_n = (2n − 1)/(2n + 2)`.
pub fn taylor_coeff(n: usize) -> f64 {
    let mut c = -1.0;
    for k in 0..n {
        c *= (2.0 * k as f64 - 1.0) / (2.0 * k as f64 + 2.0);
    }
    c
}

/// `c_n` exactly from the factorial closed form.
pub fn taylor_coeff_exact(n: usize) -> BigRational {
    let fact = |k: usize| -> BigInt { (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)) };
    let num = fact(2 * n);
    let den = BigInt::from(2 * n as i64 - 1) * (BigInt::one() << (2 * n)) * fact(n) * fact(n);
    BigRational::new(num, den)
}

/// Exact `c_n` by the same ratio recurrence as [`taylor_coeff`].
fn taylor_coeffs_rational(n_max: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut c = -BigRational::one();
    for k in 0..=n_max {
        out.push(c.clone());
        let k = k as i64;
        c = c * BigRational::new(BigInt::from(2 * k - 1), BigInt::from(2 * k + 2));
    }
    out
}

/// A polynomial in the monomial basis with its accounting data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyApprox {
    /// `coefficients[i]` multiplies `x^i`.
    pub coefficients: Vec<f64>,
    pub degree: usize,
    /// `max_i |coefficients[i]|`.
    pub height: f64,
    pub n_terms: usize,
    pub target_eps: Option<f64>,
    /// Largest error over the sample points.
    pub measured_sup_error: f64,
    /// Upper bound for the sup error on all of `[−1, 1]`: sampled maximum,
    /// Markov slack between samples, and the Horner rounding allowance.
    pub certified_sup_error: f64,
}

impl PolyApprox {
    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coefficients, x)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Coefficients of `P_N` as exact rationals.
fn abs_coeffs_exact(n_terms: usize) -> Vec<BigRational> {
    let c = taylor_coeffs_rational(n_terms);
    let mut out = vec![BigRational::zero(); 2 * n_terms + 1];
    for m in 0..=n_terms {
        // Σ_{n=m}^N c_n C(n, m), with C(n, m) built incrementally in n
        let mut binom = BigInt::one();
        let mut s = BigRational::zero();
        for (n, cn) in c.iter().enumerate().skip(m) {
            if n > m {
                binom = binom * BigInt::from(n) / BigInt::from(n - m);
            }
            s += cn * BigRational::from_integer(binom.clone());
        }
        out[2 * m] = if m % 2 == 0 { -s } else { s };
    }
    out
}

fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Sup error of `p` against `target` on `[−1, 1]`, certified separately on
/// `[−1, 0]` and `[0, 1]` where `p − target` is a polynomial of degree
/// `deg`.
fn certify(coeffs: &[f64], target: impl Fn(f64) -> f64) -> (f64, f64) {
    let deg = coeffs.len().saturating_sub(1).max(1) as f64;
    let half = SAMPLES / 2;
    let h = 1.0 / half as f64;
    let abs_coeffs: Vec<f64> = coeffs.iter().map(|a| a.abs()).collect();
    let u = f64::EPSILON / 2.0;
    let k = 2.0 * coeffs.len() as f64;
    let gamma = k * u / (1.0 - k * u);
    let mut overall_meas: f64 = 0.0;
    let mut overall_cert: f64 = 0.0;
    for side in [-1.0, 1.0] {
        let mut meas: f64 = 0.0;
        let mut rounding: f64 = 0.0;
        for i in 0..=half {
            let x = side * i as f64 * h;
            meas = meas.max((horner(coeffs, x) - target(x)).abs());
            rounding = rounding.max(gamma * horner(&abs_coeffs, x.abs()));
        }
        // every point is within h/2 of a sample and, by Markov on an
        // interval of length 1, |E'| ≤ 2 deg² ‖E‖, so
        // ‖E‖ ≤ (meas + rounding) / (1 − h deg²)
        let q = h * deg * deg;
        let bound = if q < 1.0 {
            (meas + rounding) / (1.0 - q)
        } else {
            f64::INFINITY
        };
        overall_meas = overall_meas.max(meas);
        overall_cert = overall_cert.max(bound);
    }
    (overall_meas, overall_cert)
}

fn height(coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

/// `P_N ≈ |x|`, even of degree `2N`.
pub fn build_abs_approx(n_terms: usize) -> Result<PolyApprox> {
    if n_terms == 0 || n_terms > MAX_TERMS {
        return Err(TlabError::validation(format!(
            "N_terms must lie in 1..={MAX_TERMS}, got {n_terms}"
        )));
    }
    let coefficients: Vec<f64> = abs_coeffs_exact(n_terms).iter().map(to_f64).collect();
    let (measured, certified) = certify(&coefficients, f64::abs);
    Ok(PolyApprox {
        degree: 2 * n_terms,
        height: height(&coefficients),
        n_terms,
        target_eps: None,
        measured_sup_error: measured,
        certified_sup_error: certified,
        coefficients,
    })
}

/// `P = ½(P_N + x) ≈ x₊` with the smallest `N` whose certified sup error
/// is at most `eps`.
pub fn build_positive_part(eps: f64) -> Result<PolyApprox> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(TlabError::validation(format!("ε must lie in (0, 1), got {eps}")));
    }
    let mut best = f64::INFINITY;
    for n_terms in 1..=MAX_TERMS {
        let p = positive_part_with_terms(n_terms)?;
        if p.certified_sup_error <= eps {
            return Ok(PolyApprox {
                target_eps: Some(eps),
                ..p
            });
        }
        best = best.min(p.certified_sup_error);
    }
    Err(TlabError::Certification(format!(
        "ε = {eps} is unreachable with at most {MAX_TERMS} terms; smallest achievable ε is {best:.6}"
    )))
}

/// `½(P_N + x)` for a given `N`.
pub fn positive_part_with_terms(n_terms: usize) -> Result<PolyApprox> {
    let abs = build_abs_approx(n_terms)?;
    let mut coefficients: Vec<f64> = abs.coefficients.iter().map(|a| 0.5 * a).collect();
    coefficients[1] += 0.5;
    let (measured, certified) = certify(&coefficients, |x| x.max(0.0));
    Ok(PolyApprox {
        degree: abs.degree,
        height: height(&coefficients),
        n_terms,
        target_eps: None,
        measured_sup_error: measured,
        certified_sup_error: certified,
        coefficients,
    })
}

/// The tail `Σ_{n>N} c_n = P_N(0)`, exactly, as a float.
pub fn series_tail(n_terms: usize) -> f64 {
    let c = taylor_coeffs_rational(n_terms);
    let s: BigRational = c.iter().fold(BigRational::zero(), |acc, x| acc + x);
    to_f64(&(-s).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_coefficients() {
        assert_eq!(taylor_coeff(0), -1.0);
        assert_eq!(taylor_coeff(1), 0.5);
        assert_eq!(taylor_coeff_exact(0), -BigRational::one());
        assert_eq!(taylor_coeff_exact(1), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn recurrence_matches_closed_form() {
        let rec = taylor_coeffs_rational(30);
        for n in 0..=30 {
            assert_eq!(rec[n], taylor_coeff_exact(n), "n = {n}");
            let f = taylor_coeff(n);
            assert!((f - to_f64(&rec[n])).abs() <= 1e-15 * f.abs());
        }
    }

    #[test]
    fn coefficient_decay_exponent() {
        let r = taylor_coeff(20_000) / taylor_coeff(10_000);
        assert!((r / 2f64.powf(-1.5) - 1.0).abs() < 0.01);
    }

    #[test]
    fn abs_approx_shape() {
        let p = build_abs_approx(10).unwrap();
        assert_eq!(p.degree, 20);
        assert!(p.coefficients.iter().skip(1).step_by(2).all(|&a| a == 0.0));
        assert!((p.eval(1.0) - 1.0).abs() < 1e-12);
        assert!((p.eval(0.0) - series_tail(10)).abs() < 1e-15);
        assert!((p.measured_sup_error - series_tail(10)).abs() < 1e-12);
    }

    #[test]
    fn positive_part_at_tenth() {
        let p = build_positive_part(0.1).unwrap();
        assert!(p.certified_sup_error <= 0.1);
        assert!(p.eval(0.0) <= 0.1 && p.eval(-1.0) <= 0.1);
        assert!((p.eval(1.0) - p.eval(-1.0) - 1.0).abs() < 1e-12);
        assert!(p.degree as f64 <= DEGREE_CONST * 0.1f64.powf(-2.0 / 3.0));
    }

    #[test]
    fn unreachable_eps_names_the_floor() {
        let err = build_positive_part(0.02).unwrap_err().to_string();
        assert!(err.contains("smallest achievable"), "{err}");
    }

    #[test]
    fn rejects_too_many_terms() {
        assert!(build_abs_approx(61).is_err());
        assert!(build_abs_approx(0).is_err());
    }

    #[test]
    fn calibration_constants_cover_reachable_range() {
        for &eps in &[0.5, 0.3, 0.2, 0.1, 0.07, 0.06, 0.052] {
            let p = build_positive_part(eps).unwrap();
            let scale = eps.powf(-2.0 / 3.0);
            assert!(p.degree as f64 <= DEGREE_CONST * scale, "degree at ε = {eps}");
            assert!(p.height.ln() <= HEIGHT_CONST * scale, "height at ε = {eps}");
        }
    }
}
