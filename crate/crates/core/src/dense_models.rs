//! Bounded approximants `g` for `0 ≤ f ≤ ν`.
//!
//! Three constructions smooth `f` by a Bohr-set average: `f∗σ∗σ` (Green),
//! `f∗σ` tuned for `L²` (Helfgott–de Roton) and `f∗σ` tuned for `L^k`
//! (Naslund). The fourth minimizes `‖f̂ − ĝ‖_∞` directly over
//! `0 ≤ g ≤ 1_[N]` as a linear program on a frequency grid.
//!
//! Every run returns a [`DenseModelReport`] whose claims list the
//! inequalities that were checked on the instance.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};
use crate::lp::{DualSimplex, LpStatus};
use crate::majorants::{higher_correlation, pair_correlation_max, Majorant};
use crate::report::{Claim, ClaimKind};
use crate::signal::{
    compensated_sum, convolve, fourier_grid_of, fourier_sup_diff, CertifiedSup, DiscreteSignal,
    FrequencyGrid,
};
use crate::spectrum::{bohr_enumerate, bohr_measure, spectrum, SpectrumOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Green,
    Hdr,
    Naslund,
    HahnBanach,
}

impl std::str::FromStr for Variant {
    type Err = TlabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "green" => Ok(Variant::Green),
            "hdr" => Ok(Variant::Hdr),
            "naslund" => Ok(Variant::Naslund),
            "hb" | "hahn_banach" => Ok(Variant::HahnBanach),
            other => Err(TlabError::validation(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Grid for certifying `‖f̂ − ĝ‖_∞`; defaults to the size rule of
    /// [`FrequencyGrid::default_for`].
    pub grid_m: Option<usize>,
    pub spectrum: SpectrumOptions,
    /// Constant in Naslund's choice of `ε`.
    pub c_p: f64,
    /// Shift tuples evaluated exhaustively for `l ≥ 3` correlations.
    pub shift_samples: usize,
    pub directions: usize,
    pub lp_grid_m: usize,
    pub lp_tol: f64,
    pub lp_max_iter: usize,
    /// Violated constraints added per round of row generation.
    pub lp_batch: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            grid_m: None,
            spectrum: SpectrumOptions::default(),
            c_p: 1.0,
            shift_samples: 2000,
            directions: 16,
            lp_grid_m: 1024,
            lp_tol: 1e-8,
            lp_max_iter: 200_000,
            lp_batch: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps: Option<f64>,
    pub eta: Option<f64>,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub c_p: Option<f64>,
}

/// Output of the linear-programming construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSummary {
    pub status: LpStatus,
    /// Optimum of the generated LP (a lower bound for the grid problem).
    pub t_star: f64,
    /// Lagrangian bound from the final multipliers.
    pub dual_lower: f64,
    /// `max_j |f̂(α_j) − ĝ(α_j)|` on the LP grid.
    pub grid_error: f64,
    /// `t*·sec(π/D)`.
    pub linearization_upper: f64,
    pub grid_m: usize,
    pub directions: usize,
    pub rows: usize,
    pub rounds: usize,
    pub iterations: usize,
    pub bland_switches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseModelReport {
    pub variant: Variant,
    pub params: ModelParams,
    pub g: DiscreteSignal,
    pub fourier_err: CertifiedSup,
    pub g_linf: f64,
    pub g_l2_over_n: f64,
    pub g_lk_over_n: Option<f64>,
    pub mass_f: f64,
    pub mass_g: f64,
    /// Mass of `g` outside `[1, N]`.
    pub boundary_mass: f64,
    pub n: usize,
    pub spectrum_r: Option<usize>,
    pub spectrum_m: Option<usize>,
    pub bohr_size: Option<usize>,
    pub bohr_floor: Option<f64>,
    pub lp: Option<LpSummary>,
    pub flags: Vec<String>,
    pub claims: Vec<Claim>,
}

impl DenseModelReport {
    pub fn all_claims_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }
}

/// `0 ≤ f(n) ≤ ν(n)` for every `n`.
pub fn validate_majorization(f: &DiscreteSignal, nu: &Majorant) -> bool {
    first_majorization_failure(f, nu).is_none()
}

fn first_majorization_failure(f: &DiscreteSignal, nu: &Majorant) -> Option<i64> {
    f.iter()
        .find(|&(n, v)| v < 0.0 || v > nu.signal().get(n))
        .map(|(n, _)| n)
}

fn require_majorized(f: &DiscreteSignal, nu: &Majorant) -> Result<()> {
    match first_majorization_failure(f, nu) {
        None => Ok(()),
        Some(n) => Err(TlabError::validation(format!(
            "f is not majorized by ν at n = {n} (f = {}, ν = {})",
            f.get(n),
            nu.signal().get(n)
        ))),
    }
}

fn check_unit(name: &str, v: f64, lo_open: f64, hi: f64) -> Result<()> {
    if v > lo_open && v <= hi {
        Ok(())
    } else {
        Err(TlabError::validation(format!("{name} must lie in ({lo_open}, {hi}], got {v}")))
    }
}

fn sum_pow(f: &DiscreteSignal, k: i32) -> f64 {
    compensated_sum(f.values().iter().map(|v| v.powi(k)))
}

fn error_grid(opts: &ModelOptions, f: &DiscreteSignal, g: &DiscreteSignal) -> Result<FrequencyGrid> {
    match opts.grid_m {
        Some(m) => FrequencyGrid::new(m),
        None => {
            let d = f.sub(g).trimmed();
            Ok(FrequencyGrid::default_for(d.len().max(1)))
        }
    }
}

fn mass_outside(g: &DiscreteSignal, n: usize) -> f64 {
    compensated_sum(g.iter().filter(|&(x, _)| x < 1 || x > n as i64).map(|(_, v)| v.abs()))
}

/// State shared by the three convolution constructions.
struct Smoothed {
    g: DiscreteSignal,
    sigma: DiscreteSignal,
    reps: Vec<f64>,
    spectrum_m: usize,
    bohr_size: usize,
    bohr_floor: f64,
    flags: Vec<String>,
}

fn smooth(
    f: &DiscreteSignal,
    nu: &Majorant,
    eps: f64,
    eta: f64,
    powers: usize,
    opts: &ModelOptions,
) -> Result<Smoothed> {
    let large = spectrum(f, nu, eta, &opts.spectrum)?;
    let mut flags = Vec::new();
    if large.capped {
        flags.push(format!(
            "spectrum grid capped at {} (requested {})",
            large.m, large.m_requested
        ));
    }
    let bohr = bohr_enumerate(&large.representatives, eps, nu.n())?;
    let sigma = bohr_measure(&bohr)?;
    let mut g = f.trimmed();
    for _ in 0..powers {
        g = if g.is_empty() { g } else { convolve(&g, &sigma)? };
    }
    Ok(Smoothed {
        g,
        sigma,
        reps: large.representatives,
        spectrum_m: large.m,
        bohr_size: bohr.size(),
        bohr_floor: bohr.pigeonhole_floor,
        flags,
    })
}

/// Claims common to the convolution constructions, checked on `grid`.
fn smoothing_claims(
    f: &DiscreteSignal,
    nu: &Majorant,
    s: &Smoothed,
    eps: f64,
    eta: f64,
    powers: i32,
    grid: &FrequencyGrid,
    fourier_err: &CertifiedSup,
) -> Vec<Claim> {
    let m = grid.m();
    let fv = f.fourier_grid(m);
    let gv = s.g.fourier_grid(m);
    let sv = s.sigma.fourier_grid(m);
    let l1 = nu.l1_mass();
    let f_l1 = f.lp_norm(1.0).unwrap_or(0.0);
    let fp = 1e-9 * (f_l1 + 1.0);
    let threshold = eta * l1;

    let mut off_worst = 0.0f64;
    let mut conv_worst = 0.0f64;
    for j in 0..m {
        let diff = (fv[j] - gv[j]).norm();
        if fv[j].norm() < threshold {
            off_worst = off_worst.max(diff);
        }
        let predicted = fv[j] * sv[j].powi(powers);
        conv_worst = conv_worst.max((gv[j] - predicted).norm());
    }
    let phase_worst = s
        .reps
        .iter()
        .map(|&a| (Complex64::new(1.0, 0.0) - s.sigma.fourier_eval(a)).norm())
        .fold(0.0f64, f64::max);
    let mass_gap = (s.g.sum() - f.sum()).abs();
    vec![
        Claim::le("off-spectrum", ClaimKind::Exact, off_worst, 2.0 * threshold, fp),
        Claim::le(
            "representative-phase",
            ClaimKind::Exact,
            phase_worst,
            2.0 * PI * eps,
            1e-12,
        ),
        Claim::le(
            "mass-transfer",
            ClaimKind::CertifiedBound,
            mass_gap,
            fourier_err.certified_upper,
            fp,
        ),
        Claim::le("convolution-theorem", ClaimKind::Exact, conv_worst, 1e-8 * (f_l1 + 1.0), 0.0),
    ]
}

fn fourier_decay_level(nu: &Majorant, grid: &FrequencyGrid) -> f64 {
    fourier_sup_diff(nu.signal(), &DiscreteSignal::interval(nu.n()), grid).certified_upper
        / nu.n() as f64
}

#[allow(clippy::too_many_arguments)]
fn base_report(
    variant: Variant,
    params: ModelParams,
    f: &DiscreteSignal,
    g: DiscreteSignal,
    fourier_err: CertifiedSup,
    n: usize,
    flags: Vec<String>,
    claims: Vec<Claim>,
) -> DenseModelReport {
    let nf = n as f64;
    DenseModelReport {
        variant,
        params,
        g_linf: g.values().iter().fold(0.0f64, |m, v| m.max(v.abs())),
        g_l2_over_n: sum_pow(&g, 2) / nf,
        g_lk_over_n: None,
        mass_f: f.sum(),
        mass_g: g.sum(),
        boundary_mass: mass_outside(&g, n),
        n,
        spectrum_r: None,
        spectrum_m: None,
        bohr_size: None,
        bohr_floor: None,
        lp: None,
        g,
        fourier_err,
        flags,
        claims,
    }
}

/// `g = f ∗ σ ∗ σ` with `σ` the normalized Bohr set over the
/// `η`-large spectrum of `f`.
pub fn green_model(
    f: &DiscreteSignal,
    nu: &Majorant,
    eps: f64,
    eta: f64,
    opts: &ModelOptions,
) -> Result<DenseModelReport> {
    require_majorized(f, nu)?;
    check_unit("ε", eps, 0.0, 0.5)?;
    check_unit("η", eta, 0.0, 1.0)?;
    let n = nu.n();
    let s = smooth(f, nu, eps, eta, 2, opts)?;
    let grid = error_grid(opts, f, &s.g)?;
    let fourier_err = fourier_sup_diff(f, &s.g, &grid);
    let mut claims = smoothing_claims(f, nu, &s, eps, eta, 2, &grid, &fourier_err);
    let nf = n as f64;
    claims.push(Claim::le(
        "green-fourier-error",
        ClaimKind::CertifiedBound,
        fourier_err.certified_upper,
        8.0 * (eps + eta) * nf,
        0.0,
    ));
    let theta_decay = fourier_decay_level(nu, &grid);
    let g_linf = s.g.values().iter().fold(0.0f64, |m, v| m.max(*v));
    claims.push(Claim::le(
        "green-linf-chain",
        ClaimKind::CertifiedBound,
        g_linf,
        1.0 + theta_decay * nf / s.bohr_size as f64,
        1e-9,
    ));
    let params = ModelParams {
        eps: Some(eps),
        eta: Some(eta),
        k: None,
        p: None,
        theta: Some(theta_decay),
        c_p: None,
    };
    let mut r = base_report(Variant::Green, params, f, s.g.clone(), fourier_err, n, s.flags.clone(), claims);
    fill_bohr(&mut r, &s);
    Ok(r)
}

fn fill_bohr(r: &mut DenseModelReport, s: &Smoothed) {
    r.spectrum_r = Some(s.reps.len());
    r.spectrum_m = Some(s.spectrum_m);
    r.bohr_size = Some(s.bohr_size);
    r.bohr_floor = Some(s.bohr_floor);
}

/// `g = f ∗ σ` with `η = ε`.
pub fn hdr_model(
    f: &DiscreteSignal,
    nu: &Majorant,
    eps: f64,
    opts: &ModelOptions,
) -> Result<DenseModelReport> {
    require_majorized(f, nu)?;
    check_unit("ε", eps, 0.0, 0.5)?;
    let n = nu.n();
    let nf = n as f64;
    let s = smooth(f, nu, eps, eps, 1, opts)?;
    let grid = error_grid(opts, f, &s.g)?;
    let fourier_err = fourier_sup_diff(f, &s.g, &grid);
    let mut claims = smoothing_claims(f, nu, &s, eps, eps, 1, &grid, &fourier_err);

    let nu_sigma = convolve(nu.signal(), &s.sigma)?;
    let g2 = sum_pow(&s.g, 2);
    let nu2 = sum_pow(&nu_sigma, 2);
    let theta_l2 = sum_pow(nu.signal(), 2) / (nf * nf);
    let corr2 = pair_correlation_max(nu) / nf;
    let b = s.bohr_size as f64;
    let rel = 1e-9 * (nu2 + 1.0);
    claims.push(Claim::le("hdr-l2-monotone", ClaimKind::Exact, g2, nu2, rel));
    claims.push(Claim::le(
        "hdr-l2-split",
        ClaimKind::CertifiedBound,
        nu2,
        theta_l2 * nf * nf / b + corr2 * nf,
        rel,
    ));
    claims.push(Claim::le(
        "hdr-l2-chain",
        ClaimKind::CertifiedBound,
        g2,
        theta_l2 * nf * nf / b + 2.0 * corr2 * nf,
        rel,
    ));
    let params = ModelParams {
        eps: Some(eps),
        eta: Some(eps),
        k: None,
        p: None,
        theta: Some(theta_l2),
        c_p: None,
    };
    let mut r = base_report(Variant::Hdr, params, f, s.g.clone(), fourier_err, n, s.flags.clone(), claims);
    fill_bohr(&mut r, &s);
    Ok(r)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Naslund's choice `ε = min(½, (2C_p / log(1/θ))^{1/(p+2)})`.
pub fn naslund_eps(theta: f64, p: f64, c_p: f64) -> f64 {
    (2.0 * c_p / (1.0 / theta).ln()).powf(1.0 / (p + 2.0)).min(0.5)
}

/// Certified upper bounds on the `l`-point correlation constants, `l = 1..=k`.
/// Index 0 is unused.
pub fn correlation_uppers(nu: &Majorant, k: usize, shift_samples: usize) -> Vec<f64> {
    let nf = nu.n() as f64;
    let theta_n = nu.linf();
    let mut up = vec![0.0; k + 1];
    up[1] = nu.l1_mass() / nf;
    if k >= 2 {
        up[2] = pair_correlation_max(nu) / nf;
    }
    for l in 3..=k {
        let (best, _, exhaustive) = higher_correlation(nu, l, shift_samples, 0);
        up[l] = if exhaustive { best / nf } else { theta_n * up[l - 1] };
    }
    up
}

/// `g = f ∗ σ` with `ε = η` chosen from the `L^∞` level of `ν`.
pub fn naslund_model(
    f: &DiscreteSignal,
    nu: &Majorant,
    k: usize,
    p: f64,
    opts: &ModelOptions,
) -> Result<DenseModelReport> {
    require_majorized(f, nu)?;
    if k < 2 {
        return Err(TlabError::validation("Naslund construction needs k ≥ 2"));
    }
    if !(p >= 1.0) {
        return Err(TlabError::validation(format!("p must be ≥ 1, got {p}")));
    }
    if !(opts.c_p > 0.0) {
        return Err(TlabError::validation("C_p must be positive"));
    }
    let n = nu.n();
    let nf = n as f64;
    let theta = nu.linf() / nf;
    if !(theta < 1.0) {
        return Err(TlabError::validation(format!(
            "L∞ level θ = {theta} must be below 1"
        )));
    }
    let eps = naslund_eps(theta, p, opts.c_p);
    let mut flags = Vec::new();
    let log_inv = (1.0 / theta).ln();
    if k as f64 > 0.5 * log_inv.sqrt() {
        flags.push(format!(
            "k = {k} exceeds ½√log(1/θ) = {:.4}",
            0.5 * log_inv.sqrt()
        ));
    }
    let s = smooth(f, nu, eps, eps, 1, opts)?;
    flags.extend(s.flags.iter().cloned());
    let grid = error_grid(opts, f, &s.g)?;
    let fourier_err = fourier_sup_diff(f, &s.g, &grid);
    let mut claims = smoothing_claims(f, nu, &s, eps, eps, 1, &grid, &fourier_err);

    let ki = k as i32;
    let b = s.bohr_size as f64;
    let pair_factor = 2f64.powf(binomial(k, 2));
    let required = k as f64 * pair_factor * theta * nf;
    let bohr_ok = b >= required;
    if !bohr_ok {
        flags.push("unverified boundedness".into());
    }
    claims.push(Claim::le(
        "naslund-bohr-size",
        ClaimKind::Exact,
        required,
        b,
        0.0,
    ));

    let gk = sum_pow(&s.g, ki);
    let nu_sigma = convolve(nu.signal(), &s.sigma)?;
    let nuk = sum_pow(&nu_sigma, ki);
    let up = correlation_uppers(nu, k, opts.shift_samples);
    let theta_n = theta * nf;
    let chain: f64 = (1..=k)
        .map(|l| {
            pair_factor * b.powi(l as i32 - ki) * theta_n.powi(ki - l as i32) * nf * up[l]
        })
        .sum();
    let rel = 1e-9 * (nuk + 1.0);
    claims.push(Claim::le("naslund-lk-monotone", ClaimKind::Exact, gk, nuk, rel));
    claims.push(Claim::le(
        "naslund-lk-collapse",
        ClaimKind::CertifiedBound,
        nuk,
        chain,
        1e-9 * (chain + 1.0),
    ));
    let x = k as f64 * pair_factor * theta_n / b;
    let display = nf * (0..k).map(|e| x.powi(e as i32)).fold(0.0f64, f64::max);
    claims.push(Claim::le("naslund-display-bound", ClaimKind::Exact, gk, display, rel));
    if bohr_ok {
        claims.push(Claim::le(
            "naslund-lk-constant",
            ClaimKind::CertifiedBound,
            gk / nf,
            chain / nf,
            1e-9 * (chain / nf + 1.0),
        ));
    }

    let params = ModelParams {
        eps: Some(eps),
        eta: Some(eps),
        k: Some(k),
        p: Some(p),
        theta: Some(theta),
        c_p: Some(opts.c_p),
    };
    let mut r = base_report(Variant::Naslund, params, f, s.g.clone(), fourier_err, n, flags, claims);
    r.g_lk_over_n = Some(gk / nf);
    fill_bohr(&mut r, &s);
    Ok(r)
}

/// `max_j |f̂(j/M) − ĝ(j/M)|` after clamping `g` to `[0, 1]` on `[1, N]`.
/// Such a `g` is feasible for the linear program, so this is the error a
/// competitor achieves on the LP's own grid.
pub fn clamped_grid_error(f: &DiscreteSignal, g: &DiscreteSignal, n: usize, m: usize) -> f64 {
    let clamped = g.restricted(1, n as i64).map(|v| v.clamp(0.0, 1.0));
    let fv = f.fourier_grid(m);
    let gv = clamped.fourier_grid(m);
    fv.iter()
        .zip(&gv)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Minimizes `max_j |f̂(α_j) − ĝ(α_j)|` over `0 ≤ g ≤ 1_[N]` on the grid
/// `α_j = j/M`, with the modulus linearized along `D` directions.
///
/// On a grid of size `M` the transform of `g` only sees the residues
/// `Σ_{n ≡ r} g(n)`, so the program runs over those sums and spreads each
/// one evenly over its class afterwards. Real `g` makes the transform
/// conjugate-symmetric, so only `j ≤ M/2` is constrained. Constraints are
/// generated lazily: most violated frequencies first.
pub fn hahn_banach_model(
    f: &DiscreteSignal,
    nu: &Majorant,
    opts: &ModelOptions,
) -> Result<DenseModelReport> {
    require_majorized(f, nu)?;
    let dirs = opts.directions;
    if dirs < 3 {
        return Err(TlabError::validation("need at least 3 linearization directions"));
    }
    let m = opts.lp_grid_m;
    if m == 0 {
        return Err(TlabError::validation("LP grid needs M ≥ 1"));
    }
    let n = nu.n();
    let f = f.trimmed();

    let mut counts = vec![0usize; m];
    for x in 1..=n {
        counts[x % m] += 1;
    }
    let residues: Vec<usize> = (0..m).filter(|&r| counts[r] > 0).collect();
    let nv = residues.len();
    let fv = f.fourier_grid(m);
    let f_l1 = f.lp_norm(1.0)?;
    let t_max = f_l1 + n as f64;

    let mut cost = vec![0.0; nv + 1];
    cost[nv] = 1.0;
    let lo = vec![0.0; nv + 1];
    let mut hi: Vec<f64> = residues.iter().map(|&r| counts[r] as f64).collect();
    hi.push(t_max);
    let mut lp = DualSimplex::new(cost, lo, hi)?;

    let cos_tab: Vec<f64> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64).cos()).collect();
    let sin_tab: Vec<f64> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64).sin()).collect();
    let dir: Vec<(f64, f64)> = (0..dirs)
        .map(|d| {
            let th = 2.0 * PI * d as f64 / dirs as f64;
            (th.cos(), th.sin())
        })
        .collect();
    let nearest_dir = |z: Complex64| -> usize {
        let a = z.arg().rem_euclid(2.0 * PI);
        ((a / (2.0 * PI / dirs as f64)).round() as usize) % dirs
    };
    let half = m / 2;
    let tol_abs = opts.lp_tol * (f_l1 + 1.0);

    let mut present: HashSet<(usize, usize)> = HashSet::new();
    let add = |lp: &mut DualSimplex, present: &mut HashSet<(usize, usize)>, j: usize, d: usize| -> Result<()> {
        if !present.insert((j, d)) {
            return Ok(());
        }
        let (c, s) = dir[d];
        let mut row = Vec::with_capacity(nv + 1);
        for &r in &residues {
            let k = (j * r) % m;
            row.push(-(cos_tab[k] * c + sin_tab[k] * s));
        }
        row.push(-1.0);
        let rhs = -(fv[j].re * c + fv[j].im * s);
        lp.add_row(row, f64::NEG_INFINITY, rhs)?;
        Ok(())
    };

    add(&mut lp, &mut present, 0, 0)?;
    let mut by_size: Vec<usize> = (1..=half).collect();
    by_size.sort_by(|&a, &b| fv[b].norm().total_cmp(&fv[a].norm()).then(a.cmp(&b)));
    for &j in by_size.iter().take(opts.lp_batch / 2) {
        add(&mut lp, &mut present, j, nearest_dir(fv[j]))?;
    }

    let mut flags = Vec::new();
    let mut rounds = 0usize;
    let mut status;
    let mut best: Option<(f64, Vec<f64>)> = None;
    loop {
        rounds += 1;
        status = lp.solve(opts.lp_max_iter);
        let x = lp.primal();
        let gres: Vec<f64> = (0..nv).map(|i| x[i].clamp(0.0, counts[residues[i]] as f64)).collect();
        let gv = fourier_grid_of(
            residues.iter().zip(&gres).map(|(&r, &v)| (r as i64, Complex64::new(v, 0.0))),
            m,
        );
        let t = x[nv];
        let grid_err = (0..m).map(|j| (fv[j] - gv[j]).norm()).fold(0.0f64, f64::max);
        if best.as_ref().map_or(true, |(e, _)| grid_err < *e) {
            best = Some((grid_err, gres.clone()));
        }
        if status != LpStatus::Optimal {
            break;
        }
        let mut viol: Vec<(f64, usize, usize)> = (0..=half)
            .filter_map(|j| {
                let z = fv[j] - gv[j];
                let d = nearest_dir(z);
                let v = z.re * dir[d].0 + z.im * dir[d].1 - t;
                (v > tol_abs && !present.contains(&(j, d))).then_some((v, j, d))
            })
            .collect();
        if viol.is_empty() {
            break;
        }
        viol.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, j, d) in viol.iter().take(opts.lp_batch) {
            add(&mut lp, &mut present, j, d)?;
        }
    }
    match status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(TlabError::Internal(
                "linear program reported infeasible although g = clamp(f) is feasible".into(),
            ))
        }
        LpStatus::IterationLimit => flags.push("LP iteration limit reached; best iterate kept".into()),
    }

    let t_star = lp.objective();
    let dual_lower = lp.lagrangian_bound(&lp.row_duals());
    let gres = if status == LpStatus::Optimal {
        let x = lp.primal();
        (0..nv).map(|i| x[i].clamp(0.0, counts[residues[i]] as f64)).collect()
    } else {
        best.map(|b| b.1).unwrap_or_else(|| vec![0.0; nv])
    };
    let mut share = vec![0.0; m];
    for (i, &r) in residues.iter().enumerate() {
        share[r] = gres[i] / counts[r] as f64;
    }
    let g = DiscreteSignal::new(1, (1..=n).map(|x| share[x % m].clamp(0.0, 1.0)).collect())?;
    let gv = g.fourier_grid(m);
    let grid_error = (0..m).map(|j| (fv[j] - gv[j]).norm()).fold(0.0f64, f64::max);
    let sec = 1.0 / (PI / dirs as f64).cos();

    let grid = error_grid(opts, &f, &g)?;
    let fourier_err = fourier_sup_diff(&f, &g, &grid);
    let fp = 1e-7 * (f_l1 + 1.0);
    let mut claims = vec![
        Claim::le("hb-dual-below-primal", ClaimKind::CertifiedBound, dual_lower, t_star, fp),
        Claim::le(
            "hb-grid-linearization",
            ClaimKind::CertifiedBound,
            grid_error,
            t_star * sec,
            fp,
        ),
        Claim::le(
            "mass-transfer",
            ClaimKind::CertifiedBound,
            (g.sum() - f.sum()).abs(),
            fourier_err.certified_upper,
            fp,
        ),
        Claim::le(
            "hb-true-optimum-lower",
            ClaimKind::CertifiedBound,
            dual_lower,
            fourier_err.certified_upper,
            fp,
        ),
    ];
    claims.push(Claim::measured("hb-iterations", ClaimKind::Exact, lp.iterations() as f64));

    let params = ModelParams {
        eps: None,
        eta: None,
        k: None,
        p: None,
        theta: None,
        c_p: None,
    };
    let mut r = base_report(Variant::HahnBanach, params, &f, g, fourier_err, n, flags, claims);
    r.lp = Some(LpSummary {
        status,
        t_star,
        dual_lower,
        grid_error,
        linearization_upper: t_star * sec,
        grid_m: m,
        directions: dirs,
        rows: lp.num_rows(),
        rounds,
        iterations: lp.iterations(),
        bland_switches: lp.bland_switches(),
    });
    Ok(r)
}

/// Dispatches on `variant`. `eps`/`eta` are ignored by the variants that do
/// not use them.
pub fn run_model(
    variant: Variant,
    f: &DiscreteSignal,
    nu: &Majorant,
    eps: f64,
    eta: f64,
    k: usize,
    p: f64,
    opts: &ModelOptions,
) -> Result<DenseModelReport> {
    match variant {
        Variant::Green => green_model(f, nu, eps, eta, opts),
        Variant::Hdr => hdr_model(f, nu, eps, opts),
        Variant::Naslund => naslund_model(f, nu, k, p, opts),
        Variant::HahnBanach => hahn_banach_model(f, nu, opts),
    }
}
