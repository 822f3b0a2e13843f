//! Large spectra on a fine frequency grid and Bohr sets over them.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TlabError};
use crate::majorants::Majorant;
use crate::signal::DiscreteSignal;

/// Default ceiling on the spectrum grid size.
pub const DEFAULT_M_CAP: usize = 1 << 22;

/// Slack added to `ε` when testing `‖nα‖ ≤ ε`.
pub const BOHR_BOUNDARY_TOL: f64 = 1e-12;

/// Distance from `x` to the nearest integer.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    (x - x.round_ties_even()).abs()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub m_cap: usize,
    /// Refuse to cap the grid instead of flagging it.
    pub strict: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            m_cap: DEFAULT_M_CAP,
            strict: false,
        }
    }
}

/// Frequencies where `|f̂| ≥ η‖ν‖₁`, resolved to grid intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub threshold: f64,
    pub eta: f64,
    /// Grid size actually used.
    pub m: usize,
    /// `⌈4πN/η⌉` before capping.
    pub m_requested: usize,
    pub capped: bool,
    /// Half-open intervals `[a, b)` of length `1/M`, each centred on a grid
    /// point; `a` may be negative for the interval around 0.
    pub intervals: Vec<(f64, f64)>,
    pub representatives: Vec<f64>,
    /// `|f̂|` at each representative, by direct summation.
    pub magnitudes: Vec<f64>,
    pub r: usize,
}

/// Extracts the large spectrum of `f` relative to `ν`.
///
/// The circle is cut into `M = ⌈4πN/η⌉` intervals of length `1/M` centred on
/// the grid points `j/M`; an interval is kept when `|f̂(j/M)| ≥ η‖ν‖₁`, and
/// its grid point is the representative. Each kept value is confirmed by
/// direct summation.
pub fn spectrum(
    f: &DiscreteSignal,
    nu: &Majorant,
    eta: f64,
    opts: &SpectrumOptions,
) -> Result<SpectrumSet> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(TlabError::validation(format!("η must lie in (0, 1], got {eta}")));
    }
    let n = nu.n();
    let f = f.trimmed();
    if !f.is_empty() && (f.support_lo() < 1 || f.support_hi() > n as i64) {
        return Err(TlabError::validation(format!(
            "f must be supported in [1, {n}], found [{}, {}]",
            f.support_lo(),
            f.support_hi()
        )));
    }
    let m_requested = (4.0 * std::f64::consts::PI * n as f64 / eta).ceil() as usize;
    let capped = m_requested > opts.m_cap;
    if capped && opts.strict {
        return Err(TlabError::resource(format!(
            "spectrum grid {m_requested} exceeds cap {}",
            opts.m_cap
        )));
    }
    let m = m_requested.min(opts.m_cap);
    let threshold = eta * nu.l1_mass();
    let mut set = SpectrumSet {
        threshold,
        eta,
        m,
        m_requested,
        capped,
        intervals: Vec::new(),
        representatives: Vec::new(),
        magnitudes: Vec::new(),
        r: 0,
    };
    if f.is_zero() {
        return Ok(set);
    }
    let values = f.fourier_grid(m);
    let screen = threshold * (1.0 - 1e-9);
    let half = 0.5 / m as f64;
    for (j, z) in values.iter().enumerate() {
        if z.norm() < screen {
            continue;
        }
        let alpha = j as f64 / m as f64;
        let exact = f.fourier_eval(alpha).norm();
        if exact >= threshold {
            set.intervals.push((alpha - half, alpha + half));
            set.representatives.push(alpha);
            set.magnitudes.push(exact);
        }
    }
    set.r = set.representatives.len();
    Ok(set)
}

/// `B(S, ε) = {n ∈ [−εN, εN] : ‖nα‖ ≤ ε for all α ∈ S}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BohrSet {
    pub frequencies: Vec<f64>,
    pub eps: f64,
    pub n: usize,
    /// Sorted, symmetric, contains 0.
    pub elements: Vec<i64>,
    /// `½εN⌈2/ε⌉^{−r}`.
    pub pigeonhole_floor: f64,
}

impl BohrSet {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }
}

/// Enumerates `B(S, ε)` by scanning `[−⌊εN⌋, ⌊εN⌋]`.
pub fn bohr_enumerate(freqs: &[f64], eps: f64, n: usize) -> Result<BohrSet> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(TlabError::validation(format!("ε must lie in (0, 1/2], got {eps}")));
    }
    if let Some(a) = freqs.iter().find(|a| !a.is_finite()) {
        return Err(TlabError::validation(format!("non-finite frequency {a}")));
    }
    let radius = (eps * n as f64).floor() as i64;
    let limit = eps + BOHR_BOUNDARY_TOL;
    let elements: Vec<i64> = (-radius..=radius)
        .filter(|&x| freqs.iter().all(|&a| dist_to_int(a * x as f64) <= limit))
        .collect();
    let cells = (2.0 / eps).ceil();
    let pigeonhole_floor = 0.5 * eps * n as f64 * cells.powi(-(freqs.len() as i32));
    Ok(BohrSet {
        frequencies: freqs.to_vec(),
        eps,
        n,
        elements,
        pigeonhole_floor,
    })
}

/// `σ = |B|⁻¹ 1_B`.
pub fn bohr_measure(b: &BohrSet) -> Result<DiscreteSignal> {
    if b.elements.is_empty() {
        return Err(TlabError::validation("Bohr set is empty"));
    }
    let w = 1.0 / b.size() as f64;
    let pairs: Vec<(i64, f64)> = b.elements.iter().map(|&x| (x, w)).collect();
    DiscreteSignal::from_pairs(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorants::{make_random_sparse, make_uniform};

    #[test]
    fn empty_frequency_set() {
        let b = bohr_enumerate(&[], 0.1, 100).unwrap();
        assert_eq!(b.elements, (-10..=10).collect::<Vec<_>>());
    }

    #[test]
    fn half_frequency_keeps_evens() {
        let b = bohr_enumerate(&[0.5], 0.1, 100).unwrap();
        assert_eq!(b.size(), 11);
        assert!(b.elements.iter().all(|x| x % 2 == 0));
    }

    #[test]
    fn thirds_and_halves() {
        let b = bohr_enumerate(&[1.0 / 3.0, 0.5], 0.2, 60).unwrap();
        assert_eq!(b.elements, vec![-12, -6, 0, 6, 12]);
    }

    #[test]
    fn eps_out_of_range() {
        assert!(bohr_enumerate(&[], 0.0, 10).is_err());
        assert!(bohr_enumerate(&[], 0.6, 10).is_err());
    }

    #[test]
    fn measure_is_normalized() {
        let b = bohr_enumerate(&[], 0.1, 100).unwrap();
        let s = bohr_measure(&b).unwrap();
        assert!(s.values().iter().all(|v| *v == 1.0 / 21.0));
        assert!((s.fourier_eval(0.0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measure_close_to_one_on_frequencies() {
        let freqs = [0.1234, 0.377];
        let eps = 0.1;
        let b = bohr_enumerate(&freqs, eps, 500).unwrap();
        let s = bohr_measure(&b).unwrap();
        for a in freqs {
            let z = s.fourier_eval(a);
            assert!((num_complex::Complex64::new(1.0, 0.0) - z).norm() <= 2.0 * std::f64::consts::PI * eps);
        }
    }

    #[test]
    fn interval_spectrum_contains_zero() {
        let nu = make_uniform(50).unwrap();
        let s = spectrum(nu.signal(), &nu, 0.9, &SpectrumOptions::default()).unwrap();
        assert_eq!(s.m, (4.0 * std::f64::consts::PI * 50.0 / 0.9).ceil() as usize);
        assert!(s.representatives.contains(&0.0));
    }

    #[test]
    fn zero_signal_has_empty_spectrum() {
        let nu = make_uniform(50).unwrap();
        let s = spectrum(&DiscreteSignal::zero(), &nu, 0.5, &SpectrumOptions::default()).unwrap();
        assert_eq!(s.r, 0);
    }

    #[test]
    fn strict_cap_is_an_error() {
        let nu = make_uniform(1000).unwrap();
        let opts = SpectrumOptions {
            m_cap: 1024,
            strict: true,
        };
        assert!(matches!(
            spectrum(nu.signal(), &nu, 0.5, &opts),
            Err(TlabError::Resource(_))
        ));
        let loose = spectrum(nu.signal(), &nu, 0.5, &SpectrumOptions { m_cap: 1024, strict: false }).unwrap();
        assert!(loose.capped);
        assert_eq!(loose.m, 1024);
    }

    #[test]
    fn sparse_representatives_recheck() {
        let nu = make_random_sparse(2000, 2.0 / 3.0, 1).unwrap();
        let f = DiscreteSignal::from_pairs(
            &nu.signal().nonzero().step_by(2).collect::<Vec<_>>(),
        )
        .unwrap();
        let s = spectrum(&f, &nu, 0.5, &SpectrumOptions::default()).unwrap();
        assert!(s.r >= 1);
        for &a in &s.representatives {
            assert!(f.fourier_eval(a).norm() >= 0.5 * nu.l1_mass());
        }
    }
}
