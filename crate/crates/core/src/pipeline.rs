//! End-to-end run: majorant, dense subset, dense model, solution counts and
//! the certified inequalities linking them.

use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{
    count_comparison, threshold_extract, transfer_error_bound, ComparisonReport, LinearForm,
    ThresholdReport, TransferReport,
};
use crate::dense_models::{run_model, DenseModelReport, ModelOptions, Variant};
use crate::error::{Result, TlabError};
use crate::majorants::{
    diagnose, make_random_sparse, make_squares, make_uniform, make_weighted_primes, DiagnoseOptions,
    Majorant, MajorantDiagnostics,
};
use crate::report::{failures, report_schema_version, Claim};
use crate::signal::{DiscreteSignal, FrequencyGrid};
use crate::spectrum::SpectrumOptions;

/// Flat, hand-editable run description (TOML on disk).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub n: usize,
    /// `uniform`, `random_sparse`, `squares` or `primes`.
    pub majorant: String,
    /// Support exponent for `random_sparse`.
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    #[serde(default)]
    pub majorant_seed: u64,
    /// Relative density of `A` inside `supp ν`.
    pub delta: f64,
    /// `stride` (every ⌈1/δ⌉-th support point) or `random`.
    #[serde(default = "default_selection")]
    pub selection: String,
    #[serde(default)]
    pub selection_seed: u64,
    pub form: Vec<i64>,
    pub variant: String,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_eps")]
    pub eta: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    /// Grid for certified sup bounds; the size rule applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub strict: bool,
    #[serde(default = "default_shift_samples")]
    pub shift_samples: usize,
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default = "default_lp_grid_m")]
    pub lp_grid_m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<String>,
}

fn default_exponent() -> f64 {
    0.75
}
fn default_selection() -> String {
    "stride".into()
}
fn default_eps() -> f64 {
    0.1
}
fn default_k() -> usize {
    3
}
fn default_p() -> f64 {
    4.0
}
fn default_tol() -> f64 {
    1e-8
}
fn default_shift_samples() -> usize {
    2000
}
fn default_directions() -> usize {
    16
}
fn default_lp_grid_m() -> usize {
    1024
}

impl PipelineConfig {
    /// A config with every optional field at its default.
    pub fn new(n: usize, majorant: &str, delta: f64, form: Vec<i64>, variant: &str) -> Self {
        Self {
            n,
            majorant: majorant.into(),
            exponent: default_exponent(),
            majorant_seed: 0,
            delta,
            selection: default_selection(),
            selection_seed: 0,
            form,
            variant: variant.into(),
            eps: default_eps(),
            eta: default_eps(),
            k: default_k(),
            p: default_p(),
            grid_m: None,
            tol: default_tol(),
            strict: false,
            shift_samples: default_shift_samples(),
            directions: default_directions(),
            lp_grid_m: default_lp_grid_m(),
            report_path: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| TlabError::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| TlabError::Internal(format!("config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(TlabError::validation("n must be positive"));
        }
        if !matches!(self.majorant.as_str(), "uniform" | "random_sparse" | "squares" | "primes") {
            return Err(TlabError::validation(format!("unknown majorant `{}`", self.majorant)));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(TlabError::validation(format!("delta must lie in [0, 1], got {}", self.delta)));
        }
        if !matches!(self.selection.as_str(), "stride" | "random") {
            return Err(TlabError::validation(format!("unknown selection `{}`", self.selection)));
        }
        LinearForm::new(self.form.clone())?;
        self.variant.parse::<Variant>()?;
        if !(self.tol > 0.0) {
            return Err(TlabError::validation("tol must be positive"));
        }
        Ok(())
    }
}

/// Summary of the majorant actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantSummary {
    pub kind: String,
    pub n: usize,
    pub support_size: usize,
    pub l1_mass: f64,
    pub linf: f64,
    pub seed_used: Option<u64>,
    pub resampled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub schema: String,
    pub config: PipelineConfig,
    pub majorant: MajorantSummary,
    pub a_size: usize,
    /// `|A| / |supp ν|`.
    pub a_density: f64,
    /// `Σ_{[N]} f / N`.
    pub f_density: f64,
    pub diagnostics: MajorantDiagnostics,
    pub model: DenseModelReport,
    pub transfer: TransferReport,
    /// Threshold set of `g` at `δ_g = Σ_{[N]} g / N`; absent when `g`
    /// carries no mass on `[N]`.
    pub threshold: Option<ThresholdReport>,
    pub comparison: Option<ComparisonReport>,
    pub claims: Vec<Claim>,
    pub failed: Vec<String>,
    pub flags: Vec<String>,
}

impl PipelineReport {
    pub fn all_claims_pass(&self) -> bool {
        self.failed.is_empty()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

pub fn build_majorant(cfg: &PipelineConfig) -> Result<Majorant> {
    match cfg.majorant.as_str() {
        "uniform" => make_uniform(cfg.n),
        "random_sparse" => make_random_sparse(cfg.n, cfg.exponent, cfg.majorant_seed),
        "squares" => make_squares(cfg.n),
        "primes" => make_weighted_primes(cfg.n),
        other => Err(TlabError::validation(format!("unknown majorant `{other}`"))),
    }
}

/// `A ⊆ supp ν` at relative density `δ`.
pub fn select_subset(support: &[i64], delta: f64, rule: &str, seed: u64) -> Result<Vec<i64>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(TlabError::validation(format!("delta must lie in [0, 1], got {delta}")));
    }
    if delta == 0.0 || support.is_empty() {
        return Ok(Vec::new());
    }
    match rule {
        "stride" => {
            let step = (1.0 / delta).ceil() as usize;
            Ok(support.iter().copied().step_by(step).collect())
        }
        "random" => {
            let want = ((delta * support.len() as f64).round() as usize).min(support.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, support.len(), want).into_vec();
            idx.sort_unstable();
            Ok(idx.into_iter().map(|i| support[i]).collect())
        }
        other => Err(TlabError::validation(format!("unknown selection `{other}`"))),
    }
}

/// Runs every stage; errors carry the name of the stage that raised them.
/// Failed claims are reported, not raised.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineReport> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    let nu = build_majorant(cfg).map_err(|e| e.in_stage("majorant"))?;
    let support = nu.support();
    let a = select_subset(&support, cfg.delta, &cfg.selection, cfg.selection_seed)
        .map_err(|e| e.in_stage("selection"))?;
    let pairs: Vec<(i64, f64)> = a.iter().map(|&x| (x, nu.signal().get(x))).collect();
    let f = DiscreteSignal::from_pairs(&pairs).map_err(|e| e.in_stage("selection"))?;
    let nf = cfg.n as f64;
    let mut flags = Vec::new();
    if a.is_empty() {
        flags.push("A is empty".to_string());
    }

    let grid = match cfg.grid_m {
        Some(m) => FrequencyGrid::new(m).map_err(|e| e.in_stage("config"))?,
        None => FrequencyGrid::default_for(cfg.n),
    };
    let diag_opts = DiagnoseOptions {
        k_max: cfg.k.max(2),
        shift_samples: cfg.shift_samples,
        seed: cfg.majorant_seed,
        ..DiagnoseOptions::default()
    };
    let diagnostics = diagnose(&nu, &grid, &diag_opts).map_err(|e| e.in_stage("diagnose"))?;

    let variant: Variant = cfg.variant.parse().map_err(|e: TlabError| e.in_stage("config"))?;
    let model_opts = ModelOptions {
        grid_m: cfg.grid_m,
        spectrum: SpectrumOptions {
            strict: cfg.strict,
            ..SpectrumOptions::default()
        },
        shift_samples: cfg.shift_samples,
        directions: cfg.directions,
        lp_grid_m: cfg.lp_grid_m,
        ..ModelOptions::default()
    };
    let model = run_model(variant, &f, &nu, cfg.eps, cfg.eta, cfg.k, cfg.p, &model_opts)
        .map_err(|e| e.in_stage("dense_model"))?;
    flags.extend(model.flags.iter().map(|m| format!("dense_model: {m}")));

    let form = LinearForm::new(cfg.form.clone()).map_err(|e| e.in_stage("config"))?;
    let transfer = transfer_error_bound(&form, &f, &model.g, &grid).map_err(|e| e.in_stage("count"))?;
    let g_mass = model.g.restricted(1, cfg.n as i64).sum();
    let (threshold, comparison) = if g_mass > 0.0 {
        let t = threshold_extract(&model.g, g_mass / nf, 2, cfg.n).map_err(|e| e.in_stage("threshold"))?;
        flags.extend(t.flags.iter().map(|m| format!("threshold: {m}")));
        let c = count_comparison(&form, &model.g, &t).map_err(|e| e.in_stage("threshold"))?;
        (Some(t), Some(c))
    } else {
        flags.push("g has no mass on [N]; threshold stage skipped".to_string());
        (None, None)
    };

    let mut claims = model.claims.clone();
    claims.push(transfer.claim.clone());
    if let Some(t) = &threshold {
        claims.push(t.claim.clone());
    }
    if let Some(c) = &comparison {
        claims.push(c.claim.clone());
    }
    let failed = failures(&claims);
    if cfg.strict && !flags.is_empty() {
        return Err(TlabError::resource(format!("strict mode: {}", flags.join("; "))).in_stage("flags"));
    }
    Ok(PipelineReport {
        schema: report_schema_version().to_string(),
        config: cfg.clone(),
        majorant: MajorantSummary {
            kind: nu.kind.clone(),
            n: nu.n(),
            support_size: support.len(),
            l1_mass: nu.l1_mass(),
            linf: nu.linf(),
            seed_used: nu.seed_used,
            resampled: nu.resampled,
        },
        a_size: a.len(),
        a_density: if support.is_empty() { 0.0 } else { a.len() as f64 / support.len() as f64 },
        f_density: f.restricted(1, cfg.n as i64).sum() / nf,
        diagnostics,
        model,
        transfer,
        threshold,
        comparison,
        claims,
        failed,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let mut cfg = PipelineConfig::new(500, "random_sparse", 0.5, vec![1, 1, -2], "hdr");
        cfg.exponent = 2.0 / 3.0;
        cfg.grid_m = Some(8192);
        let text = cfg.to_toml().unwrap();
        assert_eq!(PipelineConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "n = 10\nmajorant = \"uniform\"\ndelta = 1.0\nform = [1, 1, -2]\nvariant = \"green\"\nbogus = 1\n";
        assert!(PipelineConfig::from_toml(text).is_err());
    }

    #[test]
    fn stride_selection() {
        let s: Vec<i64> = (1..=10).collect();
        assert_eq!(select_subset(&s, 0.5, "stride", 0).unwrap(), vec![1, 3, 5, 7, 9]);
        assert_eq!(select_subset(&s, 1.0, "stride", 0).unwrap(), s);
        assert!(select_subset(&s, 0.0, "stride", 0).unwrap().is_empty());
        let r = select_subset(&s, 0.3, "random", 5).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r, select_subset(&s, 0.3, "random", 5).unwrap());
    }

    #[test]
    fn interval_full_density() {
        let cfg = PipelineConfig::new(120, "uniform", 1.0, vec![1, 1, -2], "green");
        let r = run_pipeline(&cfg).unwrap();
        assert_eq!(r.schema, "tlab-report/1");
        assert!(r.transfer.gap <= r.transfer.delta, "{:?}", r.transfer);
        assert_eq!(r.a_size, 120);
        assert!(r.all_claims_pass(), "{:?}", r.failed);
    }

    #[test]
    fn empty_subset_completes() {
        let cfg = PipelineConfig::new(100, "uniform", 0.0, vec![1, 1, -2], "hdr");
        let r = run_pipeline(&cfg).unwrap();
        assert_eq!(r.a_size, 0);
        assert_eq!(r.transfer.count_f, 0.0);
        assert_eq!(r.transfer.count_g, 0.0);
        assert!(!r.flags.is_empty());
    }

    #[test]
    fn stage_tag_on_error() {
        let mut cfg = PipelineConfig::new(100, "random_sparse", 0.5, vec![1, 1, -2], "hdr");
        cfg.exponent = 1.5;
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(err.to_string().contains("[majorant]"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }
}
