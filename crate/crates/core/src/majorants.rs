//! Desk-scale majorants and the hypotheses they are measured against.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};
use crate::signal::{compensated_sum, fourier_sup_diff, DiscreteSignal, FrequencyGrid};

/// Pair-difference histograms are used for two-point correlations while
/// `|supp ν|²` stays below this.
const PAIR_WORK_LIMIT: usize = 100_000_000;

/// A non-negative weight on `[N]` with total mass comparable to `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Majorant {
    signal: DiscreteSignal,
    n: usize,
    l1_mass: f64,
    /// Construction recipe, e.g. `sparse`.
    pub kind: String,
    /// Seed that produced the support (random constructions only).
    pub seed_used: Option<u64>,
    /// Set when the first draw came out empty and a later seed was used.
    pub resampled: bool,
}

impl Majorant {
    /// Wraps an arbitrary signal after checking the majorant invariants.
    pub fn from_signal(signal: DiscreteSignal, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(TlabError::validation("majorant needs N ≥ 1"));
        }
        let signal = signal.trimmed();
        if let Some((pos, v)) = signal.iter().find(|&(_, v)| v < 0.0) {
            return Err(TlabError::validation(format!("majorant is negative at n = {pos} ({v})")));
        }
        if !signal.is_empty() && (signal.support_lo() < 1 || signal.support_hi() > n as i64) {
            return Err(TlabError::validation(format!(
                "majorant support [{}, {}] is not inside [1, {n}]",
                signal.support_lo(),
                signal.support_hi()
            )));
        }
        let l1_mass = signal.sum();
        let nf = n as f64;
        if !(0.5 * nf..=2.0 * nf).contains(&l1_mass) {
            return Err(TlabError::validation(format!(
                "majorant mass {l1_mass} outside [{}, {}]",
                0.5 * nf,
                2.0 * nf
            )));
        }
        Ok(Self {
            signal,
            n,
            l1_mass,
            kind: "custom".into(),
            seed_used: None,
            resampled: false,
        })
    }

    pub fn signal(&self) -> &DiscreteSignal {
        &self.signal
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l1_mass(&self) -> f64 {
        self.l1_mass
    }

    /// `max ν`.
    pub fn linf(&self) -> f64 {
        self.signal.values().iter().fold(0.0, |m, v| m.max(*v))
    }

    /// Positions where `ν > 0`, increasing.
    pub fn support(&self) -> Vec<i64> {
        self.signal.nonzero().map(|(n, _)| n).collect()
    }

    fn with_kind(mut self, kind: &str) -> Self {
        self.kind = kind.into();
        self
    }
}

/// `ν = 1_[N]`.
pub fn make_uniform(n: usize) -> Result<Majorant> {
    Ok(Majorant::from_signal(DiscreteSignal::interval(n), n)?.with_kind("uniform"))
}

/// `ν = (N/|S|)·1_S` with each `n ∈ [N]` kept independently with probability
/// `N^{exponent − 1}`.
pub fn make_random_sparse(n: usize, exponent: f64, seed: u64) -> Result<Majorant> {
    if n < 4 {
        return Err(TlabError::validation("sparse majorant needs N ≥ 4"));
    }
    if !(exponent > 0.0 && exponent <= 1.0) {
        return Err(TlabError::validation(format!(
            "density exponent must lie in (0, 1], got {exponent}"
        )));
    }
    let prob = (n as f64).powf(exponent - 1.0);
    let mut seed_used = seed;
    let mut resampled = false;
    let support = loop {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_used);
        let s: Vec<usize> = (1..=n).filter(|_| rng.gen::<f64>() < prob).collect();
        if !s.is_empty() {
            break s;
        }
        resampled = true;
        seed_used = seed_used.wrapping_add(1);
    };
    let w = n as f64 / support.len() as f64;
    let mut values = vec![0.0; n];
    for &x in &support {
        values[x - 1] = w;
    }
    let mut m = Majorant::from_signal(DiscreteSignal::new(1, values)?, n)?.with_kind("sparse");
    m.seed_used = Some(seed_used);
    m.resampled = resampled;
    Ok(m)
}

/// `ν(m²) = 2m` for `m² ≤ N`.
pub fn make_squares(n: usize) -> Result<Majorant> {
    if n < 4 {
        return Err(TlabError::validation("squares majorant needs N ≥ 4"));
    }
    let mut values = vec![0.0; n];
    let mut m = 1usize;
    while m * m <= n {
        values[m * m - 1] = 2.0 * m as f64;
        m += 1;
    }
    Ok(Majorant::from_signal(DiscreteSignal::new(1, values)?, n)?.with_kind("squares"))
}

/// Primes up to `n`, by sieve.
pub fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        out.push(p);
        let mut q = p * p;
        while q <= n {
            composite[q] = true;
            q += p;
        }
    }
    out
}

/// `ν(p) ∝ log p` on primes, rescaled to total mass `N`.
pub fn make_weighted_primes(n: usize) -> Result<Majorant> {
    if n < 10 {
        return Err(TlabError::validation("prime majorant needs N ≥ 10"));
    }
    let primes = primes_up_to(n);
    let total = compensated_sum(primes.iter().map(|&p| (p as f64).ln()));
    let scale = n as f64 / total;
    let mut values = vec![0.0; n];
    for &p in &primes {
        values[p - 1] = (p as f64).ln() * scale;
    }
    Ok(Majorant::from_signal(DiscreteSignal::new(1, values)?, n)?.with_kind("primes"))
}

/// Knobs for [`diagnose`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnoseOptions {
    pub k_max: usize,
    pub p_list: Vec<f64>,
    /// Largest number of shift tuples evaluated per correlation order.
    pub shift_samples: usize,
    /// Random-sign masks tried for the restriction estimate (besides `ν`).
    pub restriction_samples: usize,
    pub seed: u64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self {
            k_max: 3,
            p_list: vec![4.0, 6.0],
            shift_samples: 2000,
            restriction_samples: 8,
            seed: 0,
        }
    }
}

/// Measured hypothesis levels of a majorant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantDiagnostics {
    /// Certified upper bound on `‖ν̂ − 1̂_[N]‖_∞ / N`.
    pub theta_decay: f64,
    /// `Σν² / N²`.
    pub theta_l2: f64,
    /// `max ν / N`.
    pub theta_linf: f64,
    /// Largest tested `Σ_n ν(n+m₁)⋯ν(n+m_l) / N` over distinct shifts.
    pub corr: BTreeMap<usize, f64>,
    /// Whether every shift tuple of that order was evaluated.
    pub corr_exhaustive: BTreeMap<usize, bool>,
    pub corr_tuples_tested: BTreeMap<usize, u64>,
    /// Sampled lower estimate of `sup_{|φ| ≤ ν} ∫|φ̂|^p`, times `N / ‖ν‖₁^p`.
    pub restriction_estimate: BTreeMap<String, f64>,
    pub grid_m: usize,
    pub shift_samples: usize,
    pub restriction_samples: usize,
    pub seed: u64,
}

/// Key used for an exponent in [`MajorantDiagnostics::restriction_estimate`].
pub fn p_key(p: f64) -> String {
    format!("{p}")
}

/// Measures every hypothesis level of `ν` used by the dense-model drivers.
pub fn diagnose(
    nu: &Majorant,
    grid: &FrequencyGrid,
    opts: &DiagnoseOptions,
) -> Result<MajorantDiagnostics> {
    if opts.k_max < 2 {
        return Err(TlabError::validation("diagnose needs k_max ≥ 2"));
    }
    for &p in &opts.p_list {
        if p.is_nan() || p < 1.0 {
            return Err(TlabError::validation(format!("restriction exponent must be ≥ 1, got {p}")));
        }
    }
    let nf = nu.n as f64;
    let sig = &nu.signal;
    let decay = fourier_sup_diff(sig, &DiscreteSignal::interval(nu.n), grid);
    let theta_l2 = compensated_sum(sig.values().iter().map(|v| v * v)) / (nf * nf);
    let theta_linf = nu.linf() / nf;

    let mut corr = BTreeMap::new();
    let mut corr_exhaustive = BTreeMap::new();
    let mut corr_tested = BTreeMap::new();
    corr.insert(2, pair_correlation_max(nu) / nf);
    corr_exhaustive.insert(2, true);
    corr_tested.insert(2, nu.n.saturating_sub(1) as u64);
    for l in 3..=opts.k_max {
        let (best, tested, exhaustive) = higher_correlation(nu, l, opts.shift_samples, opts.seed);
        corr.insert(l, best / nf);
        corr_exhaustive.insert(l, exhaustive);
        corr_tested.insert(l, tested);
    }

    let mut restriction_estimate = BTreeMap::new();
    for &p in &opts.p_list {
        let trace = restriction_trace(nu, grid, p, opts.restriction_samples, opts.seed);
        restriction_estimate.insert(p_key(p), *trace.last().unwrap());
    }

    Ok(MajorantDiagnostics {
        theta_decay: decay.certified_upper / nf,
        theta_l2,
        theta_linf,
        corr,
        corr_exhaustive,
        corr_tuples_tested: corr_tested,
        restriction_estimate,
        grid_m: grid.m(),
        shift_samples: opts.shift_samples,
        restriction_samples: opts.restriction_samples,
        seed: opts.seed,
    })
}

/// `max_{m ≠ 0} Σ_n ν(n)ν(n+m)`, computed exactly.
pub fn pair_correlation_max(nu: &Majorant) -> f64 {
    let pts: Vec<(i64, f64)> = nu.signal.nonzero().collect();
    if pts.len() < 2 {
        return 0.0;
    }
    if pts.len().saturating_mul(pts.len()) <= PAIR_WORK_LIMIT {
        let mut hist = vec![0.0f64; nu.n];
        for (i, &(x, a)) in pts.iter().enumerate() {
            for &(y, b) in &pts[i + 1..] {
                hist[(y - x) as usize] += a * b;
            }
        }
        hist.into_iter().fold(0.0, f64::max)
    } else {
        let auto = crate::signal::convolve(&nu.signal, &nu.signal.reflected())
            .expect("autocorrelation fits: support is inside [1, N]");
        (1..nu.n as i64).map(|m| auto.get(m)).fold(0.0, f64::max)
    }
}

/// `Σ_n Π_i ν(n + d_i)` for a shift tuple with `d_0 = 0`.
pub(crate) fn tuple_correlation(dense: &[f64], support: &[i64], shifts: &[i64]) -> f64 {
    let n = dense.len() as i64;
    let mut acc = crate::signal::CompensatedSum::new();
    'outer: for &x in support {
        let mut prod = dense[(x - 1) as usize];
        for &d in &shifts[1..] {
            let y = x + d;
            if y < 1 || y > n {
                continue 'outer;
            }
            let v = dense[(y - 1) as usize];
            if v == 0.0 {
                continue 'outer;
            }
            prod *= v;
        }
        acc.add(prod);
    }
    acc.value()
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    r
}

/// Largest tested `l`-point correlation. Returns `(max, tuples tested,
/// exhaustive)`. Tuples are normalized to `{0 < d₂ < ⋯ < d_l < N}`; when
/// sampling, they are anchored at `l` distinct support points so that every
/// sample has a chance of being nonzero.
pub(crate) fn higher_correlation(nu: &Majorant, l: usize, budget: usize, seed: u64) -> (f64, u64, bool) {
    let n = nu.n as i64;
    let dense: Vec<f64> = (1..=n).map(|x| nu.signal.get(x)).collect();
    let support = nu.support();
    let total = binomial_u128((n - 1).max(0) as u64, (l - 1) as u64);
    if total <= budget as u128 {
        let mut best = 0.0f64;
        let mut tested = 0u64;
        let mut shifts: Vec<i64> = (0..l as i64).collect();
        if l as i64 > n {
            return (0.0, 0, true);
        }
        loop {
            best = best.max(tuple_correlation(&dense, &support, &shifts));
            tested += 1;
            // next combination of {1, …, n−1} in shifts[1..]
            let mut i = l - 1;
            loop {
                if shifts[i] < n - 1 - (l - 1 - i) as i64 {
                    shifts[i] += 1;
                    for j in i + 1..l {
                        shifts[j] = shifts[j - 1] + 1;
                    }
                    break;
                }
                i -= 1;
                if i == 0 {
                    return (best, tested, true);
                }
            }
        }
    }
    if support.len() < l {
        return (0.0, 0, false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (l as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut best = 0.0f64;
    for _ in 0..budget {
        let mut picks: Vec<i64> = Vec::with_capacity(l);
        while picks.len() < l {
            let x = support[rng.gen_range(0..support.len())];
            if !picks.contains(&x) {
                picks.push(x);
            }
        }
        picks.sort_unstable();
        let shifts: Vec<i64> = picks.iter().map(|x| x - picks[0]).collect();
        best = best.max(tuple_correlation(&dense, &support, &shifts));
    }
    (best, budget as u64, false)
}

/// Running maximum of the normalized restriction functional over `ν` and
/// `samples` seeded random-sign masks of `ν`. Entry `i` is the estimate after
/// `i` masks, so the sequence is nondecreasing.
pub fn restriction_trace(
    nu: &Majorant,
    grid: &FrequencyGrid,
    p: f64,
    samples: usize,
    seed: u64,
) -> Vec<f64> {
    let norm = nu.n as f64 / nu.l1_mass.powf(p);
    let m = grid.m();
    let functional = |phi: &DiscreteSignal| -> f64 {
        let vals = phi.fourier_grid(m);
        compensated_sum(vals.iter().map(|z| z.norm().powf(p))) / m as f64 * norm
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = functional(&nu.signal);
    let mut trace = vec![best];
    for _ in 0..samples {
        let signs: Vec<f64> = nu
            .signal
            .values()
            .iter()
            .map(|&v| if rng.gen::<bool>() { v } else { -v })
            .collect();
        let phi = DiscreteSignal::new(nu.signal.support_lo(), signs).expect("finite");
        best = best.max(functional(&phi));
        trace.push(best);
    }
    trace
}
