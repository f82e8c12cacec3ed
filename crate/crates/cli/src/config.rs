use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

pub const SCHEMA: &str = "annulus-dilation/v1";

/// Settings that may come from flags or from a config file. Flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[arg(skip)]
    pub schema: Option<String>,
    /// Inner radius of the annulus, 0 < r < 1.
    #[arg(long)]
    pub r: Option<f64>,
    /// Harmonic-measure atoms per circle.
    #[arg(long = "grid-m")]
    pub grid_m: Option<usize>,
    /// Frequency order of the boundary expansions.
    #[arg(long = "freq-n")]
    pub freq_n: Option<usize>,
    /// Half-width of the multi-index box used for verification and Laurent series.
    #[arg(long = "box-k")]
    pub box_k: Option<usize>,
    /// Acceptance tolerance on the dilation residual.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Relative tolerance for commutation tests.
    #[arg(long = "commute-tol")]
    pub commute_tol: Option<f64>,
    /// Terms kept in the annulus kernel series.
    #[arg(long = "misra-terms")]
    pub misra_terms: Option<usize>,
    /// Monomial box of the sampled von Neumann check.
    #[arg(long = "vn-box")]
    pub vn_box: Option<usize>,
    /// Boundary samples per circle of the sampled von Neumann check.
    #[arg(long = "vn-grid")]
    pub vn_grid: Option<usize>,
    /// Points per radial and angular axis of the evaluation table.
    #[arg(long = "eval-grid")]
    pub eval_grid: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Input JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved job settings, echoed in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobConfig {
    pub r: f64,
    pub m: Option<usize>,
    pub grid_m: usize,
    pub freq_n: usize,
    pub box_k: usize,
    pub tol: f64,
    pub commute_tol: f64,
    pub misra_terms: usize,
    pub vn_box: usize,
    pub vn_grid: usize,
    pub eval_grid: usize,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            r: 0.5,
            m: None,
            grid_m: 512,
            freq_n: 64,
            box_k: 3,
            tol: 1e-6,
            commute_tol: 1e-10,
            misra_terms: 200,
            vn_box: 8,
            vn_grid: 256,
            eval_grid: 8,
            seed: 0,
            input: None,
            out: None,
        }
    }
}

macro_rules! apply {
    ($cfg:expr, $o:expr, $($field:ident),*) => {
        $(if let Some(v) = $o.$field.clone() { $cfg.$field = v; })*
    };
}

impl JobConfig {
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, Failure> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            let o: Overrides = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?;
            check_schema(o.schema.as_deref())?;
            cfg.apply(&o);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) {
        apply!(self, o, r, grid_m, freq_n, box_k, tol, commute_tol, misra_terms, vn_box, vn_grid, eval_grid, seed);
        if o.input.is_some() {
            self.input = o.input.clone();
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Failure::Usage(format!("--r must lie in (0, 1), got {}", self.r)));
        }
        for (name, v) in [
            ("--grid-m", self.grid_m),
            ("--freq-n", self.freq_n),
            ("--misra-terms", self.misra_terms),
            ("--vn-grid", self.vn_grid),
            ("--eval-grid", self.eval_grid),
        ] {
            if v == 0 {
                return Err(Failure::Usage(format!("{name} must be positive")));
            }
        }
        if self.grid_m < 2 * self.freq_n + 1 {
            return Err(Failure::Usage(format!(
                "--grid-m {} cannot resolve --freq-n {} (need at least {})",
                self.grid_m,
                self.freq_n,
                2 * self.freq_n + 1
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.commute_tol.is_nan() || self.commute_tol <= 0.0 {
            return Err(Failure::Usage("tolerances must be positive".into()));
        }
        Ok(())
    }
}

pub fn check_schema(schema: Option<&str>) -> Result<(), Failure> {
    match schema {
        None => Ok(()),
        Some(s) if s == SCHEMA => Ok(()),
        Some(s) => Err(Failure::Usage(format!("unsupported schema {s:?}, expected {SCHEMA:?}"))),
    }
}
