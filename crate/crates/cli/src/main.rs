//! `tlab`: command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 resource cap (or any flag
//! under `--strict`), 4 a certified inequality failed, 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tlab_core::convex::{load_points, minimax_solve, project_onto_hull, PointHull, DEFAULT_TOL};
use tlab_core::counting::{count_brute, count_weighted, LinearForm};
use tlab_core::dense_models::{run_model, ModelOptions, Variant};
use tlab_core::majorants::{
    diagnose, make_random_sparse, make_squares, make_uniform, make_weighted_primes, DiagnoseOptions,
    Majorant,
};
use tlab_core::pipeline::{run_pipeline, PipelineConfig};
use tlab_core::report::{failures, report_schema_version};
use tlab_core::signal::{load_signal, save_signal, FrequencyGrid};
use tlab_core::spectrum::{bohr_enumerate, SpectrumOptions};
use tlab_core::weierstrass::build_positive_part;
use tlab_core::{Result, TlabError};

#[derive(Parser)]
#[command(name = "tlab", version, about = "Dense models and certified Fourier bounds on [N]")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Grid size for certified sup-norm bounds.
    #[arg(long = "grid-M", global = true)]
    grid_m: Option<usize>,
    /// Absolute tolerance, scaled by the input size.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Treat every capping or flag as an error.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build or diagnose a majorant.
    #[command(subcommand)]
    Majorant(MajorantCmd),
    /// Enumerate a Bohr set.
    Bohr {
        /// Comma-separated frequencies in [0, 1).
        #[arg(long, value_delimiter = ',')]
        freqs: Vec<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a dense model for f ≤ ν.
    Densify(DensifyArgs),
    /// Count weighted solutions of a linear equation.
    Count {
        #[arg(long)]
        form: String,
        /// One file (used for every variable) or one per variable.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<PathBuf>,
        /// Use the direct enumeration instead of convolution.
        #[arg(long)]
        brute: bool,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Saddle point of a·b over hull(A) × hull(B).
    Minimax {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "B")]
        b: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Nearest point of hull(A) to x, with a separating hyperplane.
    Project {
        #[arg(long)]
        x: PathBuf,
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Certified polynomial approximation of x₊ on [−1, 1].
    Weierstrass {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the end-to-end pipeline from a TOML config.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `report_path` from the config.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MajorantCmd {
    Make {
        /// uniform, sparse, squares or primes.
        #[arg(long)]
        kind: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 0.75)]
        exponent: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Diagnose {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to the largest point of the support.
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long, value_delimiter = ',', default_value = "4,6")]
        p: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        shift_samples: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DensifyArgs {
    #[arg(long)]
    variant: Variant,
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    nu: PathBuf,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 4.0)]
    p: f64,
    #[arg(long, default_value_t = 16)]
    directions: usize,
    #[arg(long = "lp-grid-M", default_value_t = 1024)]
    lp_grid_m: usize,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    g_out: Option<PathBuf>,
}

/// Whether a command's certified claims held, plus anything it flagged.
struct Outcome {
    certified: bool,
    flags: Vec<String>,
}

impl Outcome {
    fn ok() -> Self {
        Self {
            certified: true,
            flags: Vec::new(),
        }
    }
}

fn with_schema(mut doc: Value) -> Value {
    if let Value::Object(map) = &mut doc {
        map.insert("schema".into(), Value::String(report_schema_version().into()));
    }
    doc
}

fn emit(doc: &Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(doc)? + "\n";
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_majorant(path: &Path, n: Option<usize>) -> Result<Majorant> {
    let sig = load_signal(path)?;
    let n = match n {
        Some(n) => n,
        None => usize::try_from(sig.trimmed().support_hi().max(1))
            .map_err(|_| TlabError::validation("majorant support lies below 1"))?,
    };
    Majorant::from_signal(sig, n)
}

fn grid_for(g: &Global, n: usize) -> Result<FrequencyGrid> {
    match g.grid_m {
        Some(m) => FrequencyGrid::new(m),
        None => Ok(FrequencyGrid::default_for(n)),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    match cli.command {
        Command::Majorant(MajorantCmd::Make { kind, n, exponent, out }) => {
            let nu = match kind.as_str() {
                "uniform" => make_uniform(n)?,
                "sparse" | "random_sparse" => make_random_sparse(n, exponent, g.seed)?,
                "squares" => make_squares(n)?,
                "primes" => make_weighted_primes(n)?,
                other => return Err(TlabError::validation(format!("unknown majorant kind `{other}`"))),
            };
            save_signal(nu.signal(), &out)?;
            let mut flags = Vec::new();
            if nu.resampled {
                flags.push("support was resampled to meet the mass window".to_string());
            }
            let doc = json!({
                "kind": nu.kind,
                "n": nu.n(),
                "support_size": nu.support().len(),
                "l1_mass": nu.l1_mass(),
                "linf": nu.linf(),
                "seed_used": nu.seed_used,
                "resampled": nu.resampled,
                "out": out,
            });
            emit(&with_schema(doc), None)?;
            Ok(Outcome {
                certified: true,
                flags,
            })
        }
        Command::Majorant(MajorantCmd::Diagnose {
            input,
            n,
            kmax,
            p,
            shift_samples,
            report,
        }) => {
            let nu = load_majorant(&input, n)?;
            let opts = DiagnoseOptions {
                k_max: kmax,
                p_list: p,
                shift_samples,
                seed: g.seed,
                ..DiagnoseOptions::default()
            };
            let d = diagnose(&nu, &grid_for(g, nu.n())?, &opts)?;
            let mut doc = serde_json::to_value(&d)?;
            doc["n"] = json!(nu.n());
            emit(&with_schema(doc), report.as_deref())?;
            Ok(Outcome::ok())
        }
        Command::Bohr { freqs, eps, n, out } => {
            let b = bohr_enumerate(&freqs, eps, n)?;
            let mut doc = serde_json::to_value(&b)?;
            doc["size"] = json!(b.size());
            let certified = b.size() as f64 >= b.pigeonhole_floor;
            emit(&with_schema(doc), out.as_deref())?;
            Ok(Outcome {
                certified,
                flags: Vec::new(),
            })
        }
        Command::Densify(a) => {
            let nu = load_majorant(&a.nu, a.n)?;
            let f = load_signal(&a.f)?;
            let opts = ModelOptions {
                grid_m: g.grid_m,
                spectrum: SpectrumOptions {
                    strict: g.strict,
                    ..SpectrumOptions::default()
                },
                directions: a.directions,
                lp_grid_m: a.lp_grid_m,
                lp_tol: g.tol,
                ..ModelOptions::default()
            };
            let r = run_model(a.variant, &f, &nu, a.eps, a.eta, a.k, a.p, &opts)?;
            if let Some(path) = &a.g_out {
                save_signal(&r.g, path)?;
            }
            let mut doc = serde_json::to_value(&r)?;
            doc["failed"] = json!(failures(&r.claims));
            emit(&with_schema(doc), a.report.as_deref())?;
            Ok(Outcome {
                certified: r.all_claims_pass(),
                flags: r.flags.clone(),
            })
        }
        Command::Count {
            form,
            weights,
            brute,
            report,
        } => {
            let form: LinearForm = form.parse()?;
            let sigs = weights.iter().map(load_signal).collect::<Result<Vec<_>>>()?;
            let sigs = match sigs.len() {
                1 => vec![sigs[0].clone(); form.s()],
                _ => sigs,
            };
            let r = if brute {
                count_brute(&form, &sigs)?
            } else {
                count_weighted(&form, &sigs)?
            };
            emit(&with_schema(serde_json::to_value(&r)?), report.as_deref())?;
            Ok(Outcome::ok())
        }
        Command::Minimax { a, b, report } => {
            let ha = PointHull::new(load_points(&a)?)?;
            let hb = PointHull::new(load_points(&b)?)?;
            let s = minimax_solve(&ha, &hb, g.tol)?;
            let certified = s.within_tol;
            emit(&with_schema(serde_json::to_value(&s)?), report.as_deref())?;
            Ok(Outcome {
                certified,
                flags: Vec::new(),
            })
        }
        Command::Project { x, a, report } => {
            let pts = load_points(&x)?;
            if pts.len() != 1 {
                return Err(TlabError::validation(format!("expected one point in x, got {}", pts.len())));
            }
            let hull = PointHull::new(load_points(&a)?)?;
            let p = project_onto_hull(&pts[0], &hull, g.tol)?;
            let mut flags = Vec::new();
            if !p.converged {
                flags.push(format!("iteration cap reached with gap {}", p.gap));
            }
            emit(&with_schema(serde_json::to_value(&p)?), report.as_deref())?;
            Ok(Outcome {
                certified: true,
                flags,
            })
        }
        Command::Weierstrass { eps, out } => {
            let p = build_positive_part(eps)?;
            emit(&with_schema(serde_json::to_value(&p)?), out.as_deref())?;
            Ok(Outcome::ok())
        }
        Command::Pipeline { config, report } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if g.grid_m.is_some() {
                cfg.grid_m = g.grid_m;
            }
            cfg.strict |= g.strict;
            let r = run_pipeline(&cfg)?;
            let target = report.or_else(|| cfg.report_path.as_ref().map(PathBuf::from));
            let text = r.to_json()?;
            match target {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(Outcome {
                certified: r.all_claims_pass(),
                flags: r.flags.clone(),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = cli.global.strict;
    match run(cli) {
        Ok(out) => {
            if strict && !out.flags.is_empty() {
                eprintln!("strict mode: {}", out.flags.join("; "));
                return ExitCode::from(3);
            }
            for f in &out.flags {
                eprintln!("warning: {f}");
            }
            if !out.certified {
                eprintln!("certified inequality failed; see report");
                return ExitCode::from(4);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
