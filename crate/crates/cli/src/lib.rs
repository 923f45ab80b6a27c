//! Configuration and orchestration behind the `dunkl` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use dunkl_core::basis::degree_cutoff;
use dunkl_core::schatten::{fit_slope, ratio_curve, threshold, AdmissibleFlags};
use dunkl_core::suites::{run_suites, Suite, SuiteOutcome};
use dunkl_core::{orthonormal_basis, DunklStructure, StructureConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dunkl_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration problems, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(dunkl_core::Error::InvalidParameter(_))
            | CliError::Core(dunkl_core::Error::BeyondCutoff { .. })
            | CliError::Core(dunkl_core::Error::Json(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub const DEFAULT_EPS2_GRID: [f64; 7] = [0.90, 0.93, 0.96, 0.98, 0.99, 0.995, 0.999];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: f64,
    pub q: f64,
    pub r: Vec<f64>,
    #[serde(default = "default_grid")]
    pub eps2_grid: Vec<f64>,
}

fn default_grid() -> Vec<f64> {
    DEFAULT_EPS2_GRID.to_vec()
}

fn default_seed() -> u64 {
    7
}

/// Contents of the JSON configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub kappa: Vec<f64>,
    /// Suites run by `verify` when none is given on the command line; empty means all.
    #[serde(default)]
    pub suites: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub experiment: Option<ExperimentConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn structure_config(&self) -> StructureConfig {
        StructureConfig {
            n: self.n,
            kappa: self.kappa.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.structure_config()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.selected_suites(None)?;
        if let Some(x) = &self.experiment {
            if !(x.p >= 1.0 && x.q >= 1.0) {
                return Err(CliError::Config(format!("experiment needs p, q >= 1 (got {}, {})", x.p, x.q)));
            }
            if x.r.is_empty() || x.r.iter().any(|r| !(*r >= 1.0)) {
                return Err(CliError::Config("experiment r list must be non-empty with every r >= 1".into()));
            }
            if x.eps2_grid.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                return Err(CliError::Config("eps2_grid entries must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    pub fn structure(&self) -> Result<DunklStructure> {
        Ok(self.structure_config().build()?)
    }

    /// Suites from the command line override those in the file.
    pub fn selected_suites(&self, cli: Option<&str>) -> Result<Vec<Suite>> {
        let names: Vec<&str> = match cli {
            Some(s) => s.split(',').map(str::trim).collect(),
            None => self.suites.iter().map(String::as_str).collect(),
        };
        names
            .into_iter()
            .map(|n| n.parse::<Suite>().map_err(|e| CliError::Config(e.to_string())))
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub n: usize,
    pub kappa: Vec<f64>,
    pub passed: bool,
    pub suites: Vec<SuiteOutcome>,
}

impl VerifySummary {
    pub fn table(&self) -> String {
        let mut out = String::new();
        for o in &self.suites {
            let status = match (&o.skipped, o.passed) {
                (Some(_), _) => "SKIP",
                (None, true) => "PASS",
                (None, false) => "FAIL",
            };
            let _ = write!(
                out,
                "{status} {:<12} cases={:<5} max_residual={:.3e} tolerance={:.0e}",
                o.suite.name(),
                o.cases,
                o.max_residual,
                o.tolerance
            );
            if let Some(f) = &o.first_failure {
                let _ = write!(out, "  first failure: {f}");
            }
            if let Some(s) = &o.skipped {
                let _ = write!(out, "  ({s})");
            }
            out.push('\n');
        }
        out
    }
}

pub fn run_verify(cfg: &RunConfig, suite: Option<&str>) -> Result<VerifySummary> {
    let suites = cfg.selected_suites(suite)?;
    let s = cfg.structure()?;
    let outcomes = run_suites(&s, &suites, cfg.seed)?;
    Ok(VerifySummary {
        n: cfg.n,
        kappa: cfg.kappa.clone(),
        passed: outcomes.iter().all(|o| o.passed),
        suites: outcomes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PointFailure {
    pub eps2: f64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub r: f64,
    pub r_star: Option<f64>,
    pub predicted_slope: f64,
    pub fitted_slope: Option<f64>,
    pub stderr: Option<f64>,
    pub admissible_flags: AdmissibleFlags,
    pub csv: String,
    pub failures: Vec<PointFailure>,
    pub fit_error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub n: usize,
    pub kappa: Vec<f64>,
    pub gamma: f64,
    pub p: f64,
    pub q: f64,
    pub r_star: Option<f64>,
    pub scaling_q: Option<f64>,
    pub admissible_flags: AdmissibleFlags,
    /// Inequalities that fail for this `(p, gamma, n)`.
    pub violated: Vec<String>,
    pub runs: Vec<RunSummary>,
}

impl ExperimentSummary {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "n={} gamma={} p={} q={} r_star={}",
            self.n,
            self.gamma,
            self.p,
            self.q,
            self.r_star.map_or("undefined".into(), |v| format!("{v:.6}"))
        );
        for v in &self.violated {
            let _ = writeln!(out, "flag: {v}");
        }
        let _ = writeln!(out, "{:>10} {:>12} {:>12} {:>10}", "r", "predicted", "fitted", "stderr");
        for run in &self.runs {
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
            let _ = writeln!(
                out,
                "{:>10.4} {:>12.4} {:>12} {:>10}",
                run.r,
                run.predicted_slope,
                fmt(run.fitted_slope),
                fmt(run.stderr)
            );
        }
        out
    }

    /// True when every run produced a fitted slope.
    pub fn complete(&self) -> bool {
        self.runs.iter().all(|r| r.fitted_slope.is_some())
    }
}

fn csv_name(r: f64) -> String {
    format!("ratio_r{}.csv", format!("{r:.6}").trim_end_matches('0').trim_end_matches('.'))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Scan each `r`, writing one CSV per `r` and `summary.json` into `out`.
pub fn run_experiment(cfg: &RunConfig, out: &Path) -> Result<ExperimentSummary> {
    let x = cfg
        .experiment
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no experiment section".into()))?;
    fs::create_dir_all(out).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let s = cfg.structure()?;
    let (n, gamma) = (s.n(), s.gamma());
    let th = threshold(x.p, n, gamma, Some(x.q), None)?;
    let mut violated = Vec::new();
    if !th.flags.threshold_defined {
        violated.push(format!("2 gamma < n (p+1)/(p-1) fails: 2 gamma = {}", 2.0 * gamma));
    }
    if !th.flags.sharp_regime {
        violated.push(format!(
            "2 gamma (p-1) < n fails ({} >= {n}): outside the sharp regime, fitted slopes only bound the predicted ones from above",
            2.0 * gamma * (x.p - 1.0)
        ));
    }
    if th.flags.on_scaling_line == Some(false) {
        violated.push(format!("q = {} is off the scaling line (q = {:?})", x.q, th.scaling_q));
    }

    let mut runs = Vec::new();
    let mut files = Vec::new();
    for &r in &x.r {
        let curve = ratio_curve(&s, x.p, x.q, r, &x.eps2_grid);
        let fit = fit_slope(&curve.rows);
        let name = csv_name(r);
        files.push((out.join(&name), curve.to_csv()));
        runs.push(RunSummary {
            r,
            r_star: th.r_star,
            predicted_slope: dunkl_core::schatten::predicted_slope(x.p, n, gamma, r),
            fitted_slope: fit.as_ref().ok().map(|f| f.0),
            stderr: fit.as_ref().ok().map(|f| f.1),
            admissible_flags: th.flags,
            csv: name,
            failures: curve
                .failures
                .iter()
                .map(|(e2, msg)| PointFailure {
                    eps2: *e2,
                    error: msg.clone(),
                })
                .collect(),
            fit_error: fit.err().map(|e| e.to_string()),
        });
    }
    let summary = ExperimentSummary {
        n,
        kappa: cfg.kappa.clone(),
        gamma,
        p: x.p,
        q: x.q,
        r_star: th.r_star,
        scaling_q: th.scaling_q,
        admissible_flags: th.flags,
        violated,
        runs,
    };
    for (path, text) in files {
        write_file(&path, &text)?;
    }
    let json = serde_json::to_string_pretty(&summary).map_err(dunkl_core::Error::from)?;
    write_file(&out.join("summary.json"), &(json + "\n"))?;
    Ok(summary)
}

/// Write the coefficient table of `phi_nu` and `H_nu` for `|nu| <= max_degree`.
pub fn emit_basis(cfg: &RunConfig, max_degree: usize, out: &Path) -> Result<usize> {
    let s = cfg.structure()?;
    let cutoff = degree_cutoff(s.n());
    if max_degree > cutoff {
        return Err(CliError::Config(format!(
            "degree {max_degree} exceeds the cutoff {cutoff} for n = {}",
            s.n()
        )));
    }
    let basis = orthonormal_basis(&s, max_degree)?;
    write_file(out, &basis.to_csv())?;
    Ok(basis.len())
}
