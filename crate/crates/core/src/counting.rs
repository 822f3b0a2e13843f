//! Weighted solution counts for `c₁x₁ + ⋯ + c_sx_s = 0` and the lemmas that
//! transfer counts between `f`, a dense model `g` and a large-value set.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};
use crate::report::{Claim, ClaimKind};
use crate::signal::{
    compensated_sum, convolve, fourier_sup_diff, CompensatedSum, DiscreteSignal, FrequencyGrid,
};

/// Guard for the nested-loop oracle.
pub const BRUTE_LIMIT: f64 = 1e8;

/// Largest wrap modulus accepted.
pub const MAX_WRAP_MODULUS: u64 = 1 << 40;

/// A translation-invariant form `Σ c_i x_i` with `Σ c_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearForm {
    coeffs: Vec<i64>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(TlabError::validation("linear form needs s ≥ 3 coefficients"));
        }
        if coeffs.contains(&0) {
            return Err(TlabError::validation("coefficients must be nonzero"));
        }
        if coeffs.iter().sum::<i64>() != 0 {
            return Err(TlabError::validation("coefficients must sum to zero"));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn s(&self) -> usize {
        self.coeffs.len()
    }

    pub fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::str::FromStr for LinearForm {
    type Err = TlabError;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| TlabError::Parse(format!("bad coefficient `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    Convolution,
    Brute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    /// `Σ_{c·x = 0} w₁(x₁)⋯w_s(x_s)`.
    pub total: f64,
    /// Contribution of the constant tuples `x₁ = ⋯ = x_s`.
    pub diagonal: f64,
    pub method: CountMethod,
    /// Cyclic group size that makes the count free of wraparound.
    pub wrap_modulus: u64,
}

fn check_weights(form: &LinearForm, weights: &[DiscreteSignal]) -> Result<()> {
    if weights.len() != form.s() {
        return Err(TlabError::validation(format!(
            "form has {} coefficients but {} weights were given",
            form.s(),
            weights.len()
        )));
    }
    Ok(())
}

/// Smallest power of two exceeding `Σ|c_i|·max|n| + 1`.
pub fn wrap_modulus(form: &LinearForm, weights: &[DiscreteSignal]) -> Result<u64> {
    let radius = weights.iter().map(|w| w.max_abs_position()).max().unwrap_or(0) as u128;
    let spread: u128 = form.coeffs.iter().map(|c| c.unsigned_abs() as u128).sum::<u128>() * radius;
    let need = spread + 2;
    if need > MAX_WRAP_MODULUS as u128 {
        return Err(TlabError::resource(format!(
            "wrap modulus for spread {spread} exceeds {MAX_WRAP_MODULUS}"
        )));
    }
    Ok((need as u64).next_power_of_two())
}

/// `Σ_n Π_i w_i(n)`.
pub fn diagonal(weights: &[DiscreteSignal]) -> f64 {
    if weights.iter().any(|w| w.is_empty()) {
        return 0.0;
    }
    let lo = weights.iter().map(|w| w.support_lo()).max().unwrap();
    let hi = weights.iter().map(|w| w.support_hi()).min().unwrap();
    compensated_sum((lo..=hi).map(|n| weights.iter().map(|w| w.get(n)).product::<f64>()))
}

/// `F(m) = w(m/c)` when `c | m`, else 0.
fn dilate(w: &DiscreteSignal, c: i64) -> Result<DiscreteSignal> {
    let pairs: Vec<(i64, f64)> = w.nonzero().map(|(n, v)| (c * n, v)).collect();
    DiscreteSignal::from_pairs(&pairs)
}

fn finish(total: f64, weights: &[DiscreteSignal]) -> f64 {
    if weights.iter().all(|w| w.is_nonnegative()) {
        total.max(0.0)
    } else {
        total
    }
}

/// Weighted count by dilation and linear convolution: the count is
/// `(F₁ ∗ ⋯ ∗ F_s)(0)` with `F_i` the dilation of `w_i` by `c_i`.
pub fn count_weighted(form: &LinearForm, weights: &[DiscreteSignal]) -> Result<CountReport> {
    check_weights(form, weights)?;
    let w_mod = wrap_modulus(form, weights)?;
    let diag = diagonal(weights);
    let s = form.s();
    let total = if weights.iter().any(|w| w.is_zero()) {
        0.0
    } else {
        let mut acc = dilate(&weights[0], form.coeffs[0])?;
        for i in 1..s - 1 {
            acc = convolve(&acc, &dilate(&weights[i], form.coeffs[i])?)?;
        }
        let last = dilate(&weights[s - 1], form.coeffs[s - 1])?;
        compensated_sum(last.nonzero().map(|(m, v)| v * acc.get(-m)))
    };
    Ok(CountReport {
        total: finish(total, weights),
        diagonal: diag,
        method: CountMethod::Convolution,
        wrap_modulus: w_mod,
    })
}

/// The same count through the discrete orthogonality relation
/// `(1/W) Σ_j Π_i ŵ_i(c_i j / W)`.
pub fn count_parseval(form: &LinearForm, weights: &[DiscreteSignal]) -> Result<f64> {
    check_weights(form, weights)?;
    let w_mod = wrap_modulus(form, weights)? as usize;
    let grids: Vec<Vec<Complex64>> = weights.iter().map(|w| w.fourier_grid(w_mod)).collect();
    let mut acc = CompensatedSum::new();
    for j in 0..w_mod as i64 {
        let mut prod = Complex64::new(1.0, 0.0);
        for (g, &c) in grids.iter().zip(&form.coeffs) {
            prod *= g[(c * j).rem_euclid(w_mod as i64) as usize];
        }
        acc.add(prod.re);
    }
    Ok(acc.value() / w_mod as f64)
}

/// Nested-loop oracle: the last variable is solved for.
pub fn count_brute(form: &LinearForm, weights: &[DiscreteSignal]) -> Result<CountReport> {
    check_weights(form, weights)?;
    let s = form.s();
    let pts: Vec<Vec<(i64, f64)>> = weights.iter().map(|w| w.nonzero().collect()).collect();
    let work: f64 = pts.iter().map(|p| p.len() as f64).product();
    if work > BRUTE_LIMIT {
        return Err(TlabError::resource(format!(
            "brute-force count needs {work:.3e} tuples, above {BRUTE_LIMIT:.0e}"
        )));
    }
    let last = &weights[s - 1];
    let c_last = form.coeffs[s - 1];
    let mut acc = CompensatedSum::new();
    fn walk(
        i: usize,
        partial: i64,
        prod: f64,
        pts: &[Vec<(i64, f64)>],
        coeffs: &[i64],
        last: &DiscreteSignal,
        c_last: i64,
        acc: &mut CompensatedSum,
    ) {
        if i == coeffs.len() - 1 {
            if partial % c_last == 0 {
                let v = last.get(-partial / c_last);
                if v != 0.0 {
                    acc.add(prod * v);
                }
            }
            return;
        }
        for &(x, v) in &pts[i] {
            walk(i + 1, partial + coeffs[i] * x, prod * v, pts, coeffs, last, c_last, acc);
        }
    }
    walk(0, 0, 1.0, &pts, &form.coeffs, last, c_last, &mut acc);
    Ok(CountReport {
        total: finish(acc.value(), weights),
        diagonal: diagonal(weights),
        method: CountMethod::Brute,
        wrap_modulus: wrap_modulus(form, weights)?,
    })
}

/// Exact count for integer weights (`None` if some weight is not integral
/// or the nested loops would exceed [`BRUTE_LIMIT`]).
pub fn count_integer(form: &LinearForm, weights: &[DiscreteSignal]) -> Option<i128> {
    if weights.len() != form.s() {
        return None;
    }
    let pts: Vec<Vec<(i64, i128)>> = weights
        .iter()
        .map(|w| {
            w.nonzero()
                .map(|(n, v)| (v.fract() == 0.0 && v.abs() < 1e15).then_some((n, v as i128)))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    let s = form.s();
    let work: f64 = pts[..s - 1].iter().map(|p| p.len() as f64).product();
    if work > BRUTE_LIMIT {
        return None;
    }
    let last: std::collections::HashMap<i64, i128> = pts[s - 1].iter().copied().collect();
    let c = &form.coeffs;
    let mut total: i128 = 0;
    let mut stack: Vec<(usize, i64, i128)> = vec![(0, 0, 1)];
    while let Some((i, partial, prod)) = stack.pop() {
        if i == s - 1 {
            if partial % c[s - 1] == 0 {
                if let Some(v) = last.get(&(-partial / c[s - 1])) {
                    total += prod * v;
                }
            }
            continue;
        }
        for &(x, v) in &pts[i] {
            stack.push((i + 1, partial + c[i] * x, prod * v));
        }
    }
    Some(total)
}

/// `|count(f) − count(g)|` against its telescoping bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub count_f: f64,
    pub count_g: f64,
    pub gap: f64,
    /// Certified `‖f̂ − ĝ‖_∞`.
    pub sup_err: f64,
    pub delta: f64,
    pub claim: Claim,
}

/// Certified bound on `|count(f,…,f) − count(g,…,g)|`.
///
/// Telescoping swaps one `f` for `g` at a time. Each term has one factor
/// bounded by `sup_err`, `s − 3` factors bounded by `max(‖f‖₁, ‖g‖₁)` and the
/// remaining two integrated by Cauchy–Schwarz, giving
/// `Δ = sup_err · s · max(‖f‖₁, ‖g‖₁)^{s−3} · max(‖f‖₂, ‖g‖₂)²`.
pub fn transfer_error_bound(
    form: &LinearForm,
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    grid: &FrequencyGrid,
) -> Result<TransferReport> {
    let s = form.s();
    let sup_err = fourier_sup_diff(f, g, grid).certified_upper;
    let l1 = f.lp_norm(1.0)?.max(g.lp_norm(1.0)?);
    let l2 = f.lp_norm(2.0)?.max(g.lp_norm(2.0)?);
    let delta = sup_err * s as f64 * l1.powi(s as i32 - 3) * l2 * l2;
    let count_f = count_weighted(form, &vec![f.clone(); s])?.total;
    let count_g = count_weighted(form, &vec![g.clone(); s])?.total;
    let gap = (count_f - count_g).abs();
    let slack = 1e-6 * count_f.abs().max(count_g.abs()).max(1.0);
    let claim = Claim::le("transfer-bound", ClaimKind::CertifiedBound, gap, delta, slack);
    Ok(TransferReport {
        count_f,
        count_g,
        gap,
        sup_err,
        delta,
        claim,
    })
}

/// Large-value set of a dense model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub delta: f64,
    pub k: usize,
    /// `{x ∈ [N] : g(x) ≥ δ/2}`.
    pub set: Vec<i64>,
    pub size: usize,
    /// `Σ_{x∈[N]} g^k / N`.
    pub c_k: f64,
    /// `(δ/2)^{k/(k−1)} C_k^{−1/(k−1)} N`.
    pub lower_bound: f64,
    /// `Σ_{x∈[N]} g ≥ δN`.
    pub density_ok: bool,
    pub flags: Vec<String>,
    pub claim: Claim,
}

/// Extracts `B = {x ∈ [N] : g(x) ≥ δ/2}` and certifies its size by Hölder:
/// half the mass `δN` sits on `B`, so `δN/2 ≤ |B|^{1−1/k} (C_k N)^{1/k}`.
pub fn threshold_extract(g: &DiscreteSignal, delta: f64, k: usize, n: usize) -> Result<ThresholdReport> {
    if k < 2 {
        return Err(TlabError::validation("threshold extraction needs k ≥ 2"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(TlabError::validation(format!("δ must be positive, got {delta}")));
    }
    if n == 0 {
        return Err(TlabError::validation("N must be positive"));
    }
    let mut flags = Vec::new();
    if g.values().iter().any(|v| *v < 0.0) {
        flags.push("g takes negative values".into());
    }
    let nf = n as f64;
    let inside = g.restricted(1, n as i64);
    if (g.sum() - inside.sum()).abs() > 0.0 {
        flags.push("g has mass outside [N]".into());
    }
    let mass = inside.sum();
    let density_ok = mass >= delta * nf * (1.0 - 1e-12);
    if !density_ok {
        flags.push(format!("density precondition fails: Σg = {mass} < δN = {}", delta * nf));
    }
    let set: Vec<i64> = inside.iter().filter(|&(_, v)| v >= delta / 2.0).map(|(x, _)| x).collect();
    let kf = k as f64;
    let c_k = compensated_sum(inside.values().iter().map(|v| v.max(0.0).powi(k as i32))) / nf;
    let lower_bound = if c_k > 0.0 {
        (delta / 2.0).powf(kf / (kf - 1.0)) * c_k.powf(-1.0 / (kf - 1.0)) * nf
    } else {
        0.0
    };
    let claim = Claim::le(
        "threshold-size",
        ClaimKind::CertifiedBound,
        lower_bound,
        set.len() as f64,
        1e-9 * (lower_bound + 1.0),
    );
    Ok(ThresholdReport {
        delta,
        k,
        size: set.len(),
        set,
        c_k,
        lower_bound,
        density_ok,
        flags,
        claim,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub count_g: f64,
    pub count_b: f64,
    /// `(δ/2)^s · count(1_B)`.
    pub scaled_count_b: f64,
    pub claim: Claim,
}

/// `count(g) ≥ (δ/2)^s count(1_B)`, which holds because `g ≥ δ/2` on `B` and
/// `g ≥ 0` elsewhere.
pub fn count_comparison(form: &LinearForm, g: &DiscreteSignal, b: &ThresholdReport) -> Result<ComparisonReport> {
    let s = form.s();
    let ind_pairs: Vec<(i64, f64)> = b.set.iter().map(|&x| (x, 1.0)).collect();
    let ind = DiscreteSignal::from_pairs(&ind_pairs)?;
    let count_g = count_weighted(form, &vec![g.clone(); s])?.total;
    let count_b = count_weighted(form, &vec![ind; s])?.total;
    let scaled = (b.delta / 2.0).powi(s as i32) * count_b;
    let claim = Claim::le(
        "count-comparison",
        ClaimKind::Exact,
        scaled,
        count_g,
        1e-9 * (count_g.abs() + 1.0),
    );
    Ok(ComparisonReport {
        count_g,
        count_b,
        scaled_count_b: scaled,
        claim,
    })
}

/// `exp(−C / δ^{1/(s−2−ε)})`; `C` is an external constant.
pub fn bloom_constant(delta: f64, s: usize, eps: f64, c_abs: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(TlabError::validation(format!("δ must lie in (0, 1], got {delta}")));
    }
    if s < 3 {
        return Err(TlabError::validation("s must be at least 3"));
    }
    if !(eps > 0.0 && eps < s as f64 - 2.0) {
        return Err(TlabError::validation(format!("ε must lie in (0, s−2), got {eps}")));
    }
    if !(c_abs >= 0.0) || !c_abs.is_finite() {
        return Err(TlabError::validation("C must be a finite non-negative number"));
    }
    Ok((-c_abs / delta.powf(1.0 / (s as f64 - 2.0 - eps))).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(c: &[i64]) -> LinearForm {
        LinearForm::new(c.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_forms() {
        assert!(LinearForm::new(vec![1, -1]).is_err());
        assert!(LinearForm::new(vec![1, 1, -1]).is_err());
        assert!(LinearForm::new(vec![1, 0, -1]).is_err());
        assert!("1,1,-2".parse::<LinearForm>().is_ok());
        assert!("1,x,-2".parse::<LinearForm>().is_err());
    }

    #[test]
    fn three_term_progressions_in_three() {
        let w = DiscreteSignal::interval(3);
        let r = count_weighted(&form(&[1, 1, -2]), &[w.clone(), w.clone(), w.clone()]).unwrap();
        assert_eq!(r.total, 5.0);
        assert_eq!(r.diagonal, 3.0);
        assert_eq!(count_brute(&form(&[1, 1, -2]), &[w.clone(), w.clone(), w]).unwrap().total, 5.0);
    }

    #[test]
    fn point_masses_give_product() {
        let f = form(&[2, 3, -1, -4]);
        let w = DiscreteSignal::delta(7, 1.5);
        let r = count_weighted(&f, &vec![w; 4]).unwrap();
        assert!((r.total - 1.5f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn interval_forty_matches_triple_loop() {
        let n = 40;
        let w = DiscreteSignal::interval(n);
        let r = count_weighted(&form(&[1, 1, -2]), &vec![w; 3]).unwrap();
        let mut brute = 0;
        for x in 1..=n as i64 {
            for y in 1..=n as i64 {
                if (x + y) % 2 == 0 && (1..=n as i64).contains(&((x + y) / 2)) {
                    brute += 1;
                }
            }
        }
        assert_eq!(r.total, brute as f64);
    }

    #[test]
    fn integer_route_agrees() {
        let w = DiscreteSignal::interval(25);
        let f = form(&[3, -1, -2]);
        let exact = count_integer(&f, &vec![w.clone(); 3]).unwrap();
        let r = count_weighted(&f, &vec![w; 3]).unwrap();
        assert_eq!(r.total, exact as f64);
    }

    #[test]
    fn parseval_route_agrees() {
        let w = DiscreteSignal::new(1, vec![0.5, 2.0, 0.0, 1.25, 3.0]).unwrap();
        let f = form(&[1, 2, -3]);
        let a = count_weighted(&f, &vec![w.clone(); 3]).unwrap().total;
        let b = count_parseval(&f, &vec![w; 3]).unwrap();
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn transfer_with_equal_inputs() {
        let w = DiscreteSignal::interval(30);
        let t = transfer_error_bound(&form(&[1, 1, -2]), &w, &w, &FrequencyGrid::new(512).unwrap()).unwrap();
        assert_eq!(t.gap, 0.0);
        assert!(t.claim.pass);
    }

    #[test]
    fn transfer_against_zero() {
        let w = DiscreteSignal::interval(30);
        let t = transfer_error_bound(&form(&[1, 1, -2]), &w, &DiscreteSignal::zero(), &FrequencyGrid::new(512).unwrap())
            .unwrap();
        assert!(t.count_f <= t.sup_err * 3.0 * 30.0 + 1e-9);
        assert!(t.claim.pass);
    }

    #[test]
    fn threshold_on_indicators() {
        let b0 = DiscreteSignal::from_pairs(&[(2, 1.0), (5, 1.0), (9, 1.0)]).unwrap();
        let r = threshold_extract(&b0, 0.3, 2, 10).unwrap();
        assert_eq!(r.set, vec![2, 5, 9]);
        assert!(r.claim.pass);
        let flat = DiscreteSignal::interval(10).scaled(0.7);
        let r = threshold_extract(&flat, 0.7, 2, 10).unwrap();
        assert_eq!(r.size, 10);
        assert!(r.density_ok);
    }

    #[test]
    fn comparison_degenerate_cases() {
        let f = form(&[1, 1, -2]);
        let b0 = DiscreteSignal::from_pairs(&[(1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)]).unwrap();
        let t = threshold_extract(&b0, 0.4, 2, 10).unwrap();
        let c = count_comparison(&f, &b0, &t).unwrap();
        assert_eq!(c.count_g, c.count_b);
        assert!(c.claim.pass);
        let z = DiscreteSignal::zero();
        let t = threshold_extract(&z, 0.4, 2, 10).unwrap();
        let c = count_comparison(&f, &z, &t).unwrap();
        assert_eq!(c.count_g, 0.0);
        assert_eq!(c.count_b, 0.0);
    }

    #[test]
    fn bloom_calculator() {
        assert!((bloom_constant(1.0, 3, 0.5, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(bloom_constant(0.3, 4, 1.0, 0.0).unwrap(), 1.0);
        assert!(bloom_constant(0.2, 3, 0.5, 1.0).unwrap() < bloom_constant(0.4, 3, 0.5, 1.0).unwrap());
        assert!(bloom_constant(0.0, 3, 0.5, 1.0).is_err());
        assert!(bloom_constant(0.5, 3, 1.0, 1.0).is_err());
    }
}
