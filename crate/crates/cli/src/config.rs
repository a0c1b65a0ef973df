use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use connint::quadrature::QuadratureSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Effective run configuration after merging defaults, the config file and
/// flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub gamma: f64,
    pub bits: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub kmin: usize,
    pub kmax: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            gamma: 1.0,
            bits: 256,
            abs_tol: q.abs_tol,
            rel_tol: q.rel_tol,
            kmin: 0,
            kmax: 6,
            t_min: 0.0,
            t_max: 10.0,
            points: 101,
            seed: 42,
            format: Format::Csv,
            output: None,
            out_dir: None,
        }
    }
}

/// A partial configuration: every field optional. Used for both the TOML
/// file and the command-line overrides.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub bits: Option<usize>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub kmin: Option<usize>,
    pub kmax: Option<usize>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = o.$f.clone() { self.$f = v; } )* };
        }
        take!(gamma, bits, abs_tol, rel_tol, kmin, kmax, t_min, t_max, points, seed, format);
        if o.output.is_some() {
            self.output = o.output.clone();
        }
        if o.out_dir.is_some() {
            self.out_dir = o.out_dir.clone();
        }
    }

    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&Overrides>, flags: &Overrides) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(f) = file {
            cfg.apply(f);
        }
        cfg.apply(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            bail!("gamma must be positive and finite, got {}", self.gamma);
        }
        if self.bits < 64 {
            bail!("bits must be at least 64, got {}", self.bits);
        }
        if self.kmin > self.kmax {
            bail!("kmin {} exceeds kmax {}", self.kmin, self.kmax);
        }
        if !(self.t_min >= 0.0 && self.t_max > self.t_min && self.t_max.is_finite()) {
            bail!("need 0 <= t_min < t_max, got [{}, {}]", self.t_min, self.t_max);
        }
        if self.points < 2 {
            bail!("points must be at least 2, got {}", self.points);
        }
        self.quadrature()?;
        Ok(())
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        QuadratureSpec::new(self.abs_tol, self.rel_tol).map_err(|e| anyhow::anyhow!("quadrature tolerances: {e}"))
    }

    /// Evenly spaced points on `[t_min, t_max]`.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.t_max - self.t_min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.t_min + step * i as f64).collect()
    }

    /// Output file, if any. A relative `--output` lands in the output
    /// directory; with only a directory set, the file is named after the
    /// command.
    pub fn destination(&self, command: &str) -> Option<PathBuf> {
        match (&self.output, &self.out_dir) {
            (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
            (Some(p), _) => Some(p.clone()),
            (None, Some(dir)) => Some(dir.join(format!("{command}.{}", self.format.extension()))),
            (None, None) => None,
        }
    }
}
