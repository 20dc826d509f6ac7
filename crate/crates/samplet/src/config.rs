//! Run configuration: a plain-text `key = value` file with command-line
//! overrides.
//!
//! Blank lines and lines starting with `#` are ignored. Recognized keys:
//!
//! ```text
//! input, output            paths
//! q, leaf_capacity         samplet order and tree leaf size
//! tau                      compression threshold
//! lambda                   ridge parameter (absolute, not divided by N)
//! weight                   constant l1 weight
//! solver                   ridge | fista | mrfista | mrssn | ssn
//! tol, max_iter, max_newton, mu0, outer_steps, active_cap
//! gamma                    auto | positive number
//! diagonal_scaling, rescale
//! seed, threads, grid
//! case, n, noise           benchmark generator settings
//! kernel.<i>.family        matern32 | matern32-literal | exponential | gaussian | periodic | tensor
//! kernel.<i>.length, kernel.<i>.period, kernel.<i>.dim_scaling
//! kernel.<i>.factor.<j>.family / length / period / dim_scaling / dims
//! ```
//!
//! `dims` is a half-open coordinate range such as `0..2`. Tensor factors
//! must partition the coordinates in order.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use samplet_core::{Family, Gamma, KernelSpec, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Ridge,
    Fista,
    Mrfista,
    /// Iteratively regularized semi-smooth Newton.
    Mrssn,
    /// Semi-smooth Newton without continuation.
    Ssn,
}

impl SolverChoice {
    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::Ridge => "ridge",
            SolverChoice::Fista => "fista",
            SolverChoice::Mrfista => "mrfista",
            SolverChoice::Mrssn => "mrssn",
            SolverChoice::Ssn => "ssn",
        }
    }
}

impl FromStr for SolverChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ridge" => SolverChoice::Ridge,
            "fista" => SolverChoice::Fista,
            "mrfista" => SolverChoice::Mrfista,
            "mrssn" => SolverChoice::Mrssn,
            "ssn" => SolverChoice::Ssn,
            _ => return Err(Error::Setting(format!("unknown solver {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseKind {
    Spss,
    Spms,
    Cartoon,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Spss => "spss",
            CaseKind::Spms => "spms",
            CaseKind::Cartoon => "cartoon",
        }
    }
}

impl FromStr for CaseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spss" => CaseKind::Spss,
            "spms" => CaseKind::Spms,
            "cartoon" => CaseKind::Cartoon,
            _ => return Err(Error::Setting(format!("unknown case {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorConfig {
    pub family: String,
    pub length: f64,
    pub period: f64,
    pub dim_scaling: bool,
    pub dims: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub family: String,
    pub length: f64,
    pub period: f64,
    pub dim_scaling: bool,
    pub factors: Vec<FactorConfig>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            family: "matern32".into(),
            length: 0.25,
            period: 1.0,
            dim_scaling: true,
            factors: Vec::new(),
        }
    }
}

impl KernelConfig {
    pub fn to_spec(&self) -> Result<KernelSpec> {
        if self.family == "tensor" {
            if self.factors.is_empty() {
                return Err(Error::Setting("tensor kernel needs factors".into()));
            }
            let factors = self
                .factors
                .iter()
                .map(|f| Ok((radial(&f.family, f.length, f.period, f.dim_scaling)?, f.dims.0..f.dims.1)))
                .collect::<Result<Vec<_>>>()?;
            return Ok(KernelSpec::tensor(factors)?);
        }
        radial(&self.family, self.length, self.period, self.dim_scaling)
    }
}

fn radial(family: &str, length: f64, period: f64, dim_scaling: bool) -> Result<KernelSpec> {
    let fam = Family::parse(family).ok_or_else(|| Error::Setting(format!("unknown kernel family {family:?}")))?;
    let spec = match fam {
        Family::Periodic => KernelSpec::periodic(length, period)?,
        _ => KernelSpec::radial(fam, length)?,
    };
    Ok(spec.with_dim_scaling(dim_scaling))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub kernels: Vec<KernelConfig>,
    pub q: usize,
    pub leaf_capacity: Option<usize>,
    pub tau: f64,
    pub lambda: Option<f64>,
    pub weight: Option<f64>,
    pub solver: Option<SolverChoice>,
    pub tol: f64,
    pub max_iter: usize,
    pub max_newton: usize,
    pub mu0: f64,
    pub outer_steps: usize,
    /// `None` means automatic.
    pub gamma: Option<f64>,
    pub diagonal_scaling: bool,
    pub active_cap: usize,
    pub seed: u64,
    pub threads: usize,
    pub rescale: bool,
    /// Grid points per axis for field output.
    pub grid: Option<usize>,
    pub case: Option<CaseKind>,
    pub n: usize,
    pub noise: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            input: None,
            output: None,
            kernels: vec![KernelConfig::default()],
            q: 3,
            leaf_capacity: None,
            tau: 1e-4,
            lambda: None,
            weight: None,
            solver: None,
            tol: s.tol,
            max_iter: s.max_iter,
            max_newton: s.max_newton,
            mu0: s.mu0,
            outer_steps: s.outer_steps,
            gamma: None,
            diagonal_scaling: s.diagonal_scaling,
            active_cap: s.active_cap,
            seed: 1,
            threads: 1,
            rescale: false,
            grid: None,
            case: None,
            n: 10_000,
            noise: 0.05,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Setting(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Setting(format!("{key}: expected a boolean, found {value:?}"))),
    }
}

fn parse_range(key: &str, value: &str) -> Result<(usize, usize)> {
    let (a, b) = value
        .split_once("..")
        .ok_or_else(|| Error::Setting(format!("{key}: expected a range like 0..2")))?;
    Ok((parse(key, a.trim())?, parse(key, b.trim())?))
}

fn grow<T: Default>(v: &mut Vec<T>, i: usize) -> &mut T {
    if v.len() <= i {
        v.resize_with(i + 1, T::default);
    }
    &mut v[i]
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self {
            family: "matern32".into(),
            length: 0.25,
            period: 1.0,
            dim_scaling: false,
            dims: (0, 0),
        }
    }
}

impl RunConfig {
    /// Reads a config file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut kernels_seen = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Config { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected key = value".into()))?;
            let key = key.trim();
            if key.starts_with("kernel.") && !kernels_seen {
                // a file that names kernels replaces the default list
                self.kernels.clear();
                kernels_seen = true;
            }
            self.set(key, value.trim()).map_err(|e| match e {
                Error::Setting(m) => err(m),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "input" => self.input = Some(value.into()),
            "output" => self.output = Some(value.into()),
            "q" => self.q = parse(key, value)?,
            "leaf_capacity" => self.leaf_capacity = Some(parse(key, value)?),
            "tau" => self.tau = parse(key, value)?,
            "lambda" => self.lambda = Some(parse(key, value)?),
            "weight" => self.weight = Some(parse(key, value)?),
            "solver" => self.solver = Some(value.parse()?),
            "tol" => self.tol = parse(key, value)?,
            "max_iter" => self.max_iter = parse(key, value)?,
            "max_newton" => self.max_newton = parse(key, value)?,
            "mu0" => self.mu0 = parse(key, value)?,
            "outer_steps" => self.outer_steps = parse(key, value)?,
            "gamma" => {
                self.gamma = if value == "auto" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "diagonal_scaling" => self.diagonal_scaling = parse_bool(key, value)?,
            "active_cap" => self.active_cap = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "rescale" => self.rescale = parse_bool(key, value)?,
            "grid" => self.grid = Some(parse(key, value)?),
            "case" => self.case = Some(value.parse()?),
            "n" => self.n = parse(key, value)?,
            "noise" => self.noise = parse(key, value)?,
            _ => return self.set_kernel(key, value),
        }
        Ok(())
    }

    fn set_kernel(&mut self, key: &str, value: &str) -> Result<()> {
        let unknown = || Error::Setting(format!("unknown key {key:?}"));
        let parts: Vec<&str> = key.split('.').collect();
        if parts.first() != Some(&"kernel") || parts.len() < 3 {
            return Err(unknown());
        }
        let i: usize = parts[1].parse().map_err(|_| unknown())?;
        let k = grow(&mut self.kernels, i);
        match parts[2..] {
            ["family"] => k.family = value.into(),
            ["length"] => k.length = parse(key, value)?,
            ["period"] => k.period = parse(key, value)?,
            ["dim_scaling"] => k.dim_scaling = parse_bool(key, value)?,
            ["factor", j, field] => {
                let j: usize = j.parse().map_err(|_| unknown())?;
                let f = grow(&mut k.factors, j);
                match field {
                    "family" => f.family = value.into(),
                    "length" => f.length = parse(key, value)?,
                    "period" => f.period = parse(key, value)?,
                    "dim_scaling" => f.dim_scaling = parse_bool(key, value)?,
                    "dims" => f.dims = parse_range(key, value)?,
                    _ => return Err(unknown()),
                }
            }
            _ => return Err(unknown()),
        }
        Ok(())
    }

    /// Serializes every setting in the file grammar; reading the text back
    /// gives an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(p) = &self.input {
            put("input", p.display().to_string());
        }
        if let Some(p) = &self.output {
            put("output", p.display().to_string());
        }
        put("q", self.q.to_string());
        if let Some(c) = self.leaf_capacity {
            put("leaf_capacity", c.to_string());
        }
        put("tau", fmt_f64(self.tau));
        if let Some(l) = self.lambda {
            put("lambda", fmt_f64(l));
        }
        if let Some(w) = self.weight {
            put("weight", fmt_f64(w));
        }
        if let Some(sv) = self.solver {
            put("solver", sv.name().into());
        }
        put("tol", fmt_f64(self.tol));
        put("max_iter", self.max_iter.to_string());
        put("max_newton", self.max_newton.to_string());
        put("mu0", fmt_f64(self.mu0));
        put("outer_steps", self.outer_steps.to_string());
        put("gamma", self.gamma.map_or_else(|| "auto".into(), fmt_f64));
        put("diagonal_scaling", self.diagonal_scaling.to_string());
        put("active_cap", self.active_cap.to_string());
        put("seed", self.seed.to_string());
        put("threads", self.threads.to_string());
        put("rescale", self.rescale.to_string());
        if let Some(g) = self.grid {
            put("grid", g.to_string());
        }
        if let Some(c) = self.case {
            put("case", c.name().into());
        }
        put("n", self.n.to_string());
        put("noise", fmt_f64(self.noise));
        for (i, k) in self.kernels.iter().enumerate() {
            put(&format!("kernel.{i}.family"), k.family.clone());
            put(&format!("kernel.{i}.length"), fmt_f64(k.length));
            put(&format!("kernel.{i}.period"), fmt_f64(k.period));
            put(&format!("kernel.{i}.dim_scaling"), k.dim_scaling.to_string());
            for (j, f) in k.factors.iter().enumerate() {
                let p = format!("kernel.{i}.factor.{j}");
                put(&format!("{p}.family"), f.family.clone());
                put(&format!("{p}.length"), fmt_f64(f.length));
                put(&format!("{p}.period"), fmt_f64(f.period));
                put(&format!("{p}.dim_scaling"), f.dim_scaling.to_string());
                put(&format!("{p}.dims"), format!("{}..{}", f.dims.0, f.dims.1));
            }
        }
        s
    }

    pub fn kernel_specs(&self) -> Result<Vec<KernelSpec>> {
        if self.kernels.is_empty() {
            return Err(Error::Setting("no kernel configured".into()));
        }
        self.kernels.iter().map(KernelConfig::to_spec).collect()
    }

    pub fn solver_config(&self, lambda: f64) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            max_newton: self.max_newton,
            lambda,
            gamma: self.gamma.map_or(Gamma::Auto, Gamma::Fixed),
            mu0: self.mu0,
            outer_steps: self.outer_steps,
            diagonal_scaling: self.diagonal_scaling,
            active_cap: self.active_cap,
        }
    }

    /// Leaf capacity, defaulting to twice the moment count.
    pub fn leaf_capacity_for(&self, dim: usize) -> usize {
        self.leaf_capacity
            .unwrap_or_else(|| 2 * samplet_core::samplet::moment_dim(dim, self.q))
    }

    /// Solver for `fit`: ridge when there is no l1 weight, IR-MRSSN otherwise.
    pub fn resolved_solver(&self) -> SolverChoice {
        self.solver.unwrap_or(match self.weight {
            Some(w) if w > 0.0 => SolverChoice::Mrssn,
            _ => SolverChoice::Ridge,
        })
    }
}
