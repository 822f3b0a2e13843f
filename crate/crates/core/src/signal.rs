//! Finitely supported real functions on the integers.
//!
//! A [`DiscreteSignal`] stores its values on an explicit window
//! `[support_lo, support_hi]`; everything outside the window is zero. Fourier
//! transforms use the additive-combinatorics convention
//! `f̂(α) = Σ_n f(n) e(αn)` with `e(x) = exp(2πix)`, evaluated either directly
//! (compensated summation) or on a uniform grid of `𝕋` through an FFT.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};

/// Output length below which (or sparse work below which) convolution is
/// done by direct summation.
pub const FFT_THRESHOLD: usize = 512;

/// Largest convolution output accepted before reporting a resource error.
pub const MAX_CONVOLUTION_LEN: usize = 1 << 26;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of reals.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// `e(x) = exp(2πix)` with the argument reduced modulo one first.
#[inline]
pub fn unit_phase(x: f64) -> Complex64 {
    let r = x - x.round();
    Complex64::from_polar(1.0, 2.0 * PI * r)
}

/// A finitely supported function `Z → ℝ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSignal {
    support_lo: i64,
    values: Vec<f64>,
}

impl DiscreteSignal {
    /// Builds a signal whose first value sits at `support_lo`.
    pub fn new(support_lo: i64, values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(TlabError::validation(format!(
                "non-finite value at n = {}",
                support_lo + pos as i64
            )));
        }
        Ok(Self { support_lo, values })
    }

    /// The zero signal (empty window).
    pub fn zero() -> Self {
        Self {
            support_lo: 0,
            values: Vec::new(),
        }
    }

    /// Unit mass `v` at `n`.
    pub fn delta(n: i64, v: f64) -> Self {
        Self {
            support_lo: n,
            values: vec![v],
        }
    }

    /// Indicator of the integer interval `[lo, hi]`.
    pub fn indicator(lo: i64, hi: i64) -> Self {
        if hi < lo {
            return Self::zero();
        }
        Self {
            support_lo: lo,
            values: vec![1.0; (hi - lo + 1) as usize],
        }
    }

    /// `1_[N]`, the indicator of `{1, …, N}`.
    pub fn interval(n: usize) -> Self {
        Self::indicator(1, n as i64)
    }

    /// Builds a signal from `(n, value)` pairs; absent positions are zero.
    /// Duplicate positions are rejected.
    pub fn from_pairs(pairs: &[(i64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Ok(Self::zero());
        }
        let lo = pairs.iter().map(|p| p.0).min().unwrap();
        let hi = pairs.iter().map(|p| p.0).max().unwrap();
        let len = usize::try_from(hi - lo + 1)
            .map_err(|_| TlabError::resource("signal window too large"))?;
        if len > MAX_CONVOLUTION_LEN {
            return Err(TlabError::resource(format!("signal window {len} too large")));
        }
        let mut values = vec![0.0; len];
        let mut seen = vec![false; len];
        for &(n, v) in pairs {
            let i = (n - lo) as usize;
            if seen[i] {
                return Err(TlabError::validation(format!("duplicate entry for n = {n}")));
            }
            seen[i] = true;
            values[i] = v;
        }
        Self::new(lo, values)
    }

    pub fn support_lo(&self) -> i64 {
        self.support_lo
    }

    /// Last position of the window (`support_lo - 1` for an empty window).
    pub fn support_hi(&self) -> i64 {
        self.support_lo + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: i64) -> f64 {
        let i = n - self.support_lo;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    /// `(n, f(n))` over the whole window, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.support_lo + i as i64, v))
    }

    /// `(n, f(n))` for the nonzero entries only.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.iter().filter(|&(_, v)| v != 0.0)
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= 0.0)
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.values.iter().copied())
    }

    /// `max |n|` over the nonzero entries (0 for the zero signal).
    pub fn max_abs_position(&self) -> i64 {
        self.nonzero().map(|(n, _)| n.abs()).max().unwrap_or(0)
    }

    /// Drops leading and trailing zeros from the window.
    pub fn trimmed(&self) -> Self {
        let first = self.values.iter().position(|v| *v != 0.0);
        let last = self.values.iter().rposition(|v| *v != 0.0);
        match (first, last) {
            (Some(a), Some(b)) => Self {
                support_lo: self.support_lo + a as i64,
                values: self.values[a..=b].to_vec(),
            },
            _ => Self::zero(),
        }
    }

    /// Restriction to `[lo, hi]`.
    pub fn restricted(&self, lo: i64, hi: i64) -> Self {
        if hi < lo {
            return Self::zero();
        }
        let values = (lo..=hi).map(|n| self.get(n)).collect();
        Self {
            support_lo: lo,
            values,
        }
    }

    /// `n ↦ f(n - k)`.
    pub fn shifted(&self, k: i64) -> Self {
        Self {
            support_lo: self.support_lo + k,
            values: self.values.clone(),
        }
    }

    /// `n ↦ f(-n)`.
    pub fn reflected(&self) -> Self {
        if self.is_empty() {
            return Self::zero();
        }
        let mut values = self.values.clone();
        values.reverse();
        Self {
            support_lo: -self.support_hi(),
            values,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            support_lo: self.support_lo,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self {
            support_lo: self.support_lo,
            values: self.values.iter().map(|&v| op(v)).collect(),
        }
    }

    /// Pointwise combination on the joint window.
    pub fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return Self::zero(),
            (true, false) => return other.map(|b| op(0.0, b)),
            (false, true) => return self.map(|a| op(a, 0.0)),
            _ => {}
        }
        let lo = self.support_lo.min(other.support_lo);
        let hi = self.support_hi().max(other.support_hi());
        let values = (lo..=hi).map(|n| op(self.get(n), other.get(n))).collect();
        Self {
            support_lo: lo,
            values,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b).trimmed()
    }

    /// `f̂(α) = Σ_n f(n) e(αn)` by direct compensated summation.
    pub fn fourier_eval(&self, alpha: f64) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (n, v) in self.nonzero() {
            let z = unit_phase(frac_mul(alpha, n));
            re.add(v * z.re);
            im.add(v * z.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// `f̂(j/M)` for `j = 0..M`, through one FFT of length `M`.
    pub fn fourier_grid(&self, m: usize) -> Vec<Complex64> {
        fourier_grid_of(self.iter().map(|(n, v)| (n, Complex64::new(v, 0.0))), m)
    }

    /// Counting-measure `L^p` norm; `p` may be `f64::INFINITY`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }
}

/// `frac(α·n)` computed without forming a huge product when `n` is large.
#[inline]
pub(crate) fn frac_mul(alpha: f64, n: i64) -> f64 {
    let a = alpha - alpha.floor();
    let x = a * n as f64;
    x - x.floor()
}

/// Grid evaluation of `Σ_n c_n e(jn/M)` for arbitrary complex coefficients.
pub(crate) fn fourier_grid_of<I>(coeffs: I, m: usize) -> Vec<Complex64>
where
    I: IntoIterator<Item = (i64, Complex64)>,
{
    assert!(m >= 1, "grid size must be positive");
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (n, v) in coeffs {
        if v != Complex64::new(0.0, 0.0) {
            buf[n.rem_euclid(m as i64) as usize] += v;
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(m).process(&mut buf);
    buf
}

/// `f̂(α)`; free-function form of [`DiscreteSignal::fourier_eval`].
pub fn fourier_eval(f: &DiscreteSignal, alpha: f64) -> Complex64 {
    f.fourier_eval(alpha)
}

/// Counting-measure `L^p` norm, `p ≥ 1` or `p = ∞`.
pub fn lp_norm(f: &DiscreteSignal, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(TlabError::validation(format!("L^p norm needs p ≥ 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    if p == 1.0 {
        return Ok(compensated_sum(f.values.iter().map(|v| v.abs())));
    }
    if p == 2.0 {
        return Ok(compensated_sum(f.values.iter().map(|v| v * v)).sqrt());
    }
    Ok(compensated_sum(f.values.iter().map(|v| v.abs().powf(p))).powf(1.0 / p))
}

/// Linear convolution `(f ∗ g)(n) = Σ_{a+b=n} f(a) g(b)`.
///
/// Small or sparse products are summed directly; larger ones go through a
/// zero-padded FFT whose length covers the whole output, so no wraparound
/// occurs. When both inputs are nonnegative, FFT round-off below zero is
/// clipped.
pub fn convolve(f: &DiscreteSignal, g: &DiscreteSignal) -> Result<DiscreteSignal> {
    if f.is_empty() || g.is_empty() {
        return Ok(DiscreteSignal::zero());
    }
    let out_len = f.len() + g.len() - 1;
    if out_len > MAX_CONVOLUTION_LEN {
        return Err(TlabError::resource(format!(
            "convolution output length {out_len} exceeds {MAX_CONVOLUTION_LEN}"
        )));
    }
    let lo = f.support_lo + g.support_lo;
    let sparse_work = f.nonzero_count().saturating_mul(g.nonzero_count());
    let values = if out_len <= FFT_THRESHOLD || sparse_work <= FFT_THRESHOLD * FFT_THRESHOLD {
        convolve_direct(f, g, out_len)
    } else {
        let mut v = convolve_fft(&f.values, &g.values, out_len);
        if f.is_nonnegative() && g.is_nonnegative() {
            for x in v.iter_mut() {
                if *x < 0.0 {
                    *x = 0.0;
                }
            }
        }
        v
    };
    DiscreteSignal::new(lo, values)
}

fn convolve_direct(f: &DiscreteSignal, g: &DiscreteSignal, out_len: usize) -> Vec<f64> {
    let mut acc = vec![CompensatedSum::new(); out_len];
    let gz: Vec<(usize, f64)> = g
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(i, v)| (i, *v))
        .collect();
    for (i, &a) in f.values.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for &(j, b) in &gz {
            acc[i + j].add(a * b);
        }
    }
    acc.iter().map(|s| s.value()).collect()
}

pub(crate) fn convolve_fft(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let size = out_len.next_power_of_two();
    let mut fa: Vec<Complex64> = (0..size)
        .map(|i| Complex64::new(a.get(i).copied().unwrap_or(0.0), 0.0))
        .collect();
    let mut fb: Vec<Complex64> = (0..size)
        .map(|i| Complex64::new(b.get(i).copied().unwrap_or(0.0), 0.0))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    planner.plan_fft_inverse(size).process(&mut fa);
    let scale = 1.0 / size as f64;
    fa.iter().take(out_len).map(|z| z.re * scale).collect()
}

/// `M` equally spaced frequencies `j/M` of `𝕋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    m: usize,
}

impl FrequencyGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(TlabError::validation("frequency grid needs M ≥ 1"));
        }
        Ok(Self { m })
    }

    /// `M = max(4096, 8 · support_len)`.
    pub fn default_for(support_len: usize) -> Self {
        Self {
            m: 4096.max(8 * support_len),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn point(&self, j: usize) -> f64 {
        j as f64 / self.m as f64
    }

    /// Every point of `𝕋` lies within this distance of a grid point.
    pub fn lipschitz_radius(&self) -> f64 {
        0.5 / self.m as f64
    }
}

/// Certified enclosure of a Fourier sup-norm computed on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedSup {
    pub grid_max: f64,
    pub lipschitz_slack: f64,
    pub certified_upper: f64,
    pub certified_lower: f64,
    /// Grid frequency where `grid_max` is attained.
    pub argmax: f64,
}

impl CertifiedSup {
    fn exact_zero() -> Self {
        Self {
            grid_max: 0.0,
            lipschitz_slack: 0.0,
            certified_upper: 0.0,
            certified_lower: 0.0,
            argmax: 0.0,
        }
    }
}

/// Certified bracket for `‖f̂ − ĝ‖_∞` over all of `𝕋`.
///
/// The lower end is the grid maximum. The upper end adds the smaller of two
/// valid slacks for `d = f − g` recentred at `c`, the midpoint of its support:
/// the derivative bound `2π Σ|n − c||d(n)|` times the grid radius, and the
/// Bernstein bound for exponential sums of type `2πK` (`K` the half-width of
/// the support), which gives `‖d̂‖_∞ ≤ grid_max / (1 − πK/M)` whenever
/// `πK < M`. A small allowance for FFT round-off is added to both.
pub fn fourier_sup_diff(
    f: &DiscreteSignal,
    g: &DiscreteSignal,
    grid: &FrequencyGrid,
) -> CertifiedSup {
    let d = f.sub(g).trimmed();
    if d.is_zero() {
        return CertifiedSup::exact_zero();
    }
    let values = d.fourier_grid(grid.m);
    let (argmax, grid_max) = values
        .iter()
        .enumerate()
        .map(|(j, z)| (j, z.norm()))
        .fold((0, 0.0), |best, (j, v)| if v > best.1 { (j, v) } else { best });

    let center = 0.5 * (d.support_lo() + d.support_hi()) as f64;
    let half_width = 0.5 * (d.support_hi() - d.support_lo()) as f64;
    let l1 = compensated_sum(d.values.iter().map(|v| v.abs()));
    let moment = compensated_sum(d.iter().map(|(n, v)| (n as f64 - center).abs() * v.abs()));
    let m = grid.m as f64;
    let roundoff = 8.0 * f64::EPSILON * (m.log2() + 1.0) * l1;

    let lipschitz = 2.0 * PI * moment * grid.lipschitz_radius();
    let q = PI * half_width / m;
    let bernstein = if q < 1.0 {
        (grid_max + roundoff) * q / (1.0 - q)
    } else {
        f64::INFINITY
    };
    let slack = lipschitz.min(bernstein) + roundoff;
    CertifiedSup {
        grid_max,
        lipschitz_slack: slack,
        certified_upper: (grid_max + slack).min(l1 + roundoff),
        certified_lower: grid_max,
        argmax: grid.point(argmax),
    }
}

/// Certified bracket for `‖f̂‖_∞`.
pub fn fourier_sup(f: &DiscreteSignal, grid: &FrequencyGrid) -> CertifiedSup {
    fourier_sup_diff(f, &DiscreteSignal::zero(), grid)
}

/// Reads the `n,value` CSV format. Row order is arbitrary and absent `n`
/// means zero.
pub fn read_signal_csv<R: Read>(reader: R) -> Result<DiscreteSignal> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "n" || &headers[1] != "value" {
        return Err(TlabError::Parse(format!(
            "expected header `n,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut pairs = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let n: i64 = rec[0]
            .parse()
            .map_err(|e| TlabError::Parse(format!("bad position `{}`: {e}", &rec[0])))?;
        let v: f64 = rec[1]
            .parse()
            .map_err(|e| TlabError::Parse(format!("bad value `{}`: {e}", &rec[1])))?;
        pairs.push((n, v));
    }
    DiscreteSignal::from_pairs(&pairs)
}

/// Writes nonzero entries as `n,value` with 17 significant digits, which
/// round-trips every `f64` exactly.
pub fn write_signal_csv<W: Write>(f: &DiscreteSignal, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["n", "value"])?;
    for (n, v) in f.nonzero() {
        wtr.write_record([n.to_string(), format!("{v:.16e}")])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<DiscreteSignal> {
    read_signal_csv(std::fs::File::open(path)?)
}

pub fn save_signal(f: &DiscreteSignal, path: impl AsRef<Path>) -> Result<()> {
    write_signal_csv(f, std::fs::File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn fourier_of_unit_mass_at_zero_frequency() {
        let z = DiscreteSignal::delta(3, 1.0).fourier_eval(0.0);
        assert_eq!(z, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn fourier_cancels_at_half() {
        let z = DiscreteSignal::interval(2).fourier_eval(0.5);
        assert!(z.norm() < 1e-15, "{z}");
    }

    #[test]
    fn fourier_matches_plain_summation() {
        // closed form of the geometric sum Σ_{n=1}^{10} e(0.3 n)
        let alpha = 0.3;
        let w = Complex64::from_polar(1.0, 2.0 * PI * alpha);
        let closed = w * (Complex64::new(1.0, 0.0) - w.powu(10)) / (Complex64::new(1.0, 0.0) - w);
        let z = DiscreteSignal::interval(10).fourier_eval(alpha);
        assert!((z - closed).norm() < 1e-12);
    }

    #[test]
    fn empty_signal_transforms_to_zero() {
        assert_eq!(DiscreteSignal::zero().fourier_eval(0.37), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn grid_matches_direct() {
        let f = DiscreteSignal::new(-7, (0..40).map(|i| ((i * 37) % 11) as f64 - 3.0).collect())
            .unwrap();
        let m = 64;
        let grid = f.fourier_grid(m);
        for (j, z) in grid.iter().enumerate() {
            let direct = f.fourier_eval(j as f64 / m as f64);
            assert!((z - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn small_convolution_by_hand() {
        let a = DiscreteSignal::interval(2);
        let c = convolve(&a, &a).unwrap();
        assert_eq!(c.support_lo(), 2);
        assert_eq!(c.values(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn delta_zero_is_identity() {
        let f = DiscreteSignal::new(-3, vec![1.5, 0.0, -2.0, 4.0]).unwrap();
        let c = convolve(&f, &DiscreteSignal::delta(0, 1.0)).unwrap();
        assert_eq!(c, f);
    }

    #[test]
    fn three_by_three_at_four() {
        let a = DiscreteSignal::interval(3);
        let c = convolve(&a, &a).unwrap();
        // brute force: #{(x, y) ∈ [3]² : x + y = 4}
        let brute = (1..=3).flat_map(|x| (1..=3).map(move |y| (x, y))).filter(|(x, y)| x + y == 4).count();
        assert_eq!(c.get(4), brute as f64);
    }

    #[test]
    fn fft_and_direct_convolution_agree() {
        let f = DiscreteSignal::new(1, (0..900).map(|i| ((i * 7919) % 13) as f64 / 13.0).collect())
            .unwrap();
        let g = DiscreteSignal::new(-300, (0..700).map(|i| ((i * 104729) % 17) as f64).collect())
            .unwrap();
        let fast = convolve(&f, &g).unwrap();
        let slow = convolve_direct(&f, &g, f.len() + g.len() - 1);
        let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in fast.values().iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn norms_of_interval() {
        let f = DiscreteSignal::interval(9);
        assert_eq!(lp_norm(&f, 1.0).unwrap(), 9.0);
        assert_close(lp_norm(&f, 2.0).unwrap(), 3.0, 1e-15);
        let g = DiscreteSignal::new(1, vec![3.0, -4.0]).unwrap();
        assert_eq!(lp_norm(&g, f64::INFINITY).unwrap(), 4.0);
        assert_close(lp_norm(&g, 2.0).unwrap(), 5.0, 1e-15);
    }

    #[test]
    fn lp_norm_rejects_small_p() {
        assert!(lp_norm(&DiscreteSignal::interval(3), 0.5).is_err());
        assert!(lp_norm(&DiscreteSignal::interval(3), f64::NAN).is_err());
    }

    #[test]
    fn sup_diff_of_equal_signals_is_zero() {
        let f = DiscreteSignal::interval(12);
        let c = fourier_sup_diff(&f, &f, &FrequencyGrid::new(64).unwrap());
        assert_eq!(c.certified_lower, 0.0);
        assert_eq!(c.certified_upper, 0.0);
    }

    #[test]
    fn sup_of_interval_attained_at_zero() {
        let n = 25;
        let c = fourier_sup(&DiscreteSignal::interval(n), &FrequencyGrid::new(128).unwrap());
        assert!(c.certified_lower >= n as f64 - 1e-9);
        assert!(c.certified_upper >= c.certified_lower);
        assert_eq!(c.argmax, 0.0);
    }

    #[test]
    fn sup_diff_brackets_dense_scan() {
        let f = DiscreteSignal::interval(20);
        let g = f.shifted(1);
        let c = fourier_sup_diff(&f, &g, &FrequencyGrid::new(4096).unwrap());
        let d = f.sub(&g);
        let scan = (0..1_000_000)
            .map(|j| d.fourier_eval(j as f64 / 1e6).norm())
            .fold(0.0f64, f64::max);
        assert!(c.certified_lower <= scan + 1e-9, "{} > {scan}", c.certified_lower);
        assert!(scan <= c.certified_upper, "{scan} > {}", c.certified_upper);
    }

    #[test]
    fn csv_rejects_wrong_header_and_duplicates() {
        assert!(read_signal_csv("x,y\n1,2\n".as_bytes()).is_err());
        assert!(read_signal_csv("n,value\n1,2\n1,3\n".as_bytes()).is_err());
    }

    #[test]
    fn csv_accepts_any_row_order() {
        let f = read_signal_csv("n,value\n5,1.5\n-2,0.25\n".as_bytes()).unwrap();
        assert_eq!(f.support_lo(), -2);
        assert_eq!(f.get(5), 1.5);
        assert_eq!(f.get(0), 0.0);
    }

    #[test]
    fn signal_rejects_non_finite() {
        assert!(DiscreteSignal::new(0, vec![1.0, f64::NAN]).is_err());
        assert!(DiscreteSignal::new(0, vec![f64::INFINITY]).is_err());
    }
}
