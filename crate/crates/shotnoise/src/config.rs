//! Experiment configuration: per-experiment defaults, `key=value` files and
//! overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{AppError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    Darling,
    NuExponential,
    FddInverse,
    ShotnoiseFdd,
    LastOvershoot,
    SelfSimilarity,
    J1Failure,
    Uniformity,
    LemmaL1,
    Srw2d,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::Darling,
        Experiment::NuExponential,
        Experiment::FddInverse,
        Experiment::ShotnoiseFdd,
        Experiment::LastOvershoot,
        Experiment::SelfSimilarity,
        Experiment::J1Failure,
        Experiment::Uniformity,
        Experiment::LemmaL1,
        Experiment::Srw2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Darling => "darling",
            Experiment::NuExponential => "nu-exponential",
            Experiment::FddInverse => "fdd-inverse",
            Experiment::ShotnoiseFdd => "shotnoise-fdd",
            Experiment::LastOvershoot => "last-overshoot",
            Experiment::SelfSimilarity => "self-similarity",
            Experiment::J1Failure => "j1-failure",
            Experiment::Uniformity => "uniformity",
            Experiment::LemmaL1 => "lemma-l1",
            Experiment::Srw2d => "srw2d",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| AppError::UnknownExperiment(name.to_string()))
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::Darling => "L(S_n)/n is asymptotically standard Frechet",
            Experiment::NuExponential => "nu(L^<-(tau))/tau is asymptotically standard exponential",
            Experiment::FddInverse => "finite-dimensional laws of nu(L^<-(tau u))/tau approach the inverse extremal process",
            Experiment::ShotnoiseFdd => "scaled renewal shot noise approaches u^alpha m^<-(u) jointly in u",
            Experiment::LastOvershoot => "(L(last)/tau, L(first exceedance)/tau) approach independent uniform and Pareto(1)",
            Experiment::SelfSimilarity => "pre/post-jump pair of the extremal process scales linearly with the level",
            Experiment::J1Failure => "pre-limit paths jump by exactly 1/tau while the limit has macroscopic jumps",
            Experiment::Uniformity => "deterministic uniform convergence of h(L^<-(tu) - L^<-(ty))/h(L^<-(t)) to u^alpha",
            Experiment::LemmaL1 => "a representation regularizes into a continuous strictly increasing L1 ~ L",
            Experiment::Srw2d => "return times of the planar simple random walk (demo, logarithmic convergence)",
        }
    }

    /// Demo experiments pass on structural checks alone.
    pub fn is_demo(self) -> bool {
        self == Experiment::Srw2d
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Experiment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Pass thresholds. Names double as config keys (`tol.<name>`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Max KS distance for pre-asymptotic renewal quantities.
    pub d_renewal: f64,
    /// Max two-sample KS distance for scaling and cross-oracle checks.
    pub d_scaling: f64,
    /// Min p-value for exact samplers and independence tests.
    pub p_exact: f64,
    /// Max absolute error of empirical joint CDF values.
    pub cdf_abs: f64,
    /// Max uniform deviation at the top of the t-grid.
    pub uniformity_sup: f64,
    /// Max error of the closed-form ratio identity.
    pub ratio_identity: f64,
    /// Max `|L1/L - 1|` at the top of the grid.
    pub ratio_limit: f64,
    /// Max `|h(2x)/h(x) - 1|` at the top of the grid.
    pub slow_variation: f64,
    /// Allowed multiplicative band for the planar walk tail.
    pub srw_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            d_renewal: 0.03,
            d_scaling: 0.02,
            p_exact: 1e-3,
            cdf_abs: 0.01,
            uniformity_sup: 1e-2,
            ratio_identity: 1e-6,
            ratio_limit: 5e-2,
            slow_variation: 1e-2,
            srw_factor: 2.0,
        }
    }
}

/// `d_renewal` for families other than `logpow`, whose pre-asymptotics are slower.
pub const D_RENEWAL_RELAXED: f64 = 0.05;

impl Tolerances {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "d_renewal" => &mut self.d_renewal,
            "d_scaling" => &mut self.d_scaling,
            "p_exact" => &mut self.p_exact,
            "cdf_abs" => &mut self.cdf_abs,
            "uniformity_sup" => &mut self.uniformity_sup,
            "ratio_identity" => &mut self.ratio_identity,
            "ratio_limit" => &mut self.ratio_limit,
            "slow_variation" => &mut self.slow_variation,
            "srw_factor" => &mut self.srw_factor,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(AppError::config(format!("tolerance {key} must be positive, got {value}")));
        }
        let slot = self
            .slot(key)
            .ok_or_else(|| AppError::config(format!("unknown tolerance '{key}'")))?;
        *slot = value;
        Ok(())
    }
}

/// A fully resolved experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// `logpow:<beta>`, `loglog` or `repr:<path>`.
    #[serde(rename = "L")]
    pub l_spec: String,
    pub alpha: f64,
    pub tau: f64,
    pub u_grid: Vec<f64>,
    pub replicas: usize,
    pub seed: u64,
    /// Distance `epsilon` kept from `u` by the uniformity y-grid.
    pub margin: f64,
    pub tolerances: Tolerances,
    /// Output directory; not part of the report body.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker count; never affects results.
    #[serde(skip)]
    pub threads: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 42;
pub const MIN_REPLICAS: usize = 100;

impl ExperimentConfig {
    /// Desk-scale defaults.
    pub fn defaults(experiment: Experiment) -> Self {
        let (tau, u_grid, alpha) = match experiment {
            Experiment::FddInverse => (1e4, vec![0.5, 1.0, 2.0], 1.0),
            Experiment::ShotnoiseFdd => (1e4, vec![0.5, 1.0, 2.0], 1.0),
            Experiment::SelfSimilarity => (1e4, vec![3.0], 1.0),
            Experiment::Uniformity => (1e6, vec![2.0], 1.0),
            Experiment::LemmaL1 => (1e6, vec![1.0], 1.0),
            Experiment::Srw2d => (1e3, vec![0.25, 0.5, 0.75, 1.0], 1.0),
            _ => (1e4, vec![1.0], 1.0),
        };
        ExperimentConfig {
            experiment,
            l_spec: "logpow:1".to_string(),
            alpha,
            tau,
            u_grid,
            replicas: 10_000,
            seed: DEFAULT_SEED,
            margin: 0.5,
            tolerances: Tolerances::default(),
            out: None,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < MIN_REPLICAS {
            return Err(AppError::config(format!(
                "replicas must be at least {MIN_REPLICAS}, got {}",
                self.replicas
            )));
        }
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(AppError::config(format!("tau must be positive and finite, got {}", self.tau)));
        }
        if self.u_grid.is_empty() {
            return Err(AppError::config("u grid must not be empty"));
        }
        if !self.u_grid.iter().all(|u| *u > 0.0 && u.is_finite()) || self.u_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(AppError::config("u grid must be positive and strictly increasing"));
        }
        if !self.alpha.is_finite() {
            return Err(AppError::config("alpha must be finite"));
        }
        if self.threads == Some(0) {
            return Err(AppError::config("threads must be at least 1"));
        }
        if self.experiment == Experiment::Uniformity {
            let u = self.u_grid[self.u_grid.len() - 1];
            if !(self.margin > 0.0 && self.margin < u) {
                return Err(AppError::config("margin must lie in (0, u)"));
            }
        }
        Ok(())
    }
}

/// Settings gathered from flags or a config file; unset fields fall back to
/// the experiment's defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub l_spec: Option<String>,
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub u_grid: Option<Vec<f64>>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    pub margin: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub tolerances: Vec<(String, f64)>,
}

/// Splits `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| AppError::config(format!("line {}: expected key=value, got '{line}'", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(AppError::config(format!("line {}: empty key", i + 1)));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| AppError::config(format!("invalid value for {key}: '{v}'")))
}

/// Integers also accepted in float notation, e.g. `1e4`.
pub fn parse_count(key: &str, v: &str) -> Result<usize> {
    if let Ok(n) = v.trim().parse::<usize>() {
        return Ok(n);
    }
    let x: f64 = parse_num(key, v)?;
    if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
        Ok(x as usize)
    } else {
        Err(AppError::config(format!("{key} must be a nonnegative integer, got '{v}'")))
    }
}

/// Comma-separated list of reals.
pub fn parse_grid(v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|p| parse_num("u", p)).collect()
}

impl Overrides {
    pub fn from_key_values(pairs: &[(String, String)]) -> Result<Self> {
        let mut o = Overrides::default();
        for (k, v) in pairs {
            match k.as_str() {
                "experiment" => o.experiment = Some(v.clone()),
                "L" | "l" => o.l_spec = Some(v.clone()),
                "alpha" => o.alpha = Some(parse_num(k, v)?),
                "tau" => o.tau = Some(parse_num(k, v)?),
                "u" => o.u_grid = Some(parse_grid(v)?),
                "replicas" => o.replicas = Some(parse_count(k, v)?),
                "seed" => o.seed = Some(parse_num(k, v)?),
                "margin" => o.margin = Some(parse_num(k, v)?),
                "out" => o.out = Some(PathBuf::from(v)),
                "threads" => o.threads = Some(parse_count(k, v)?),
                other => match other.strip_prefix("tol.") {
                    Some(name) => o.tolerances.push((name.to_string(), parse_num(k, v)?)),
                    None => return Err(AppError::config(format!("unknown config key '{other}'"))),
                },
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::config(format!("{}: {e}", path.display())))?;
        Self::from_key_values(&parse_key_values(&text)?)
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: Overrides) -> Overrides {
        let mut tolerances = self.tolerances;
        tolerances.extend(over.tolerances);
        Overrides {
            experiment: over.experiment.or(self.experiment),
            l_spec: over.l_spec.or(self.l_spec),
            alpha: over.alpha.or(self.alpha),
            tau: over.tau.or(self.tau),
            u_grid: over.u_grid.or(self.u_grid),
            replicas: over.replicas.or(self.replicas),
            seed: over.seed.or(self.seed),
            margin: over.margin.or(self.margin),
            out: over.out.or(self.out),
            threads: over.threads.or(self.threads),
            tolerances,
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig> {
        let name = self
            .experiment
            .ok_or_else(|| AppError::config("no experiment given (use --experiment)"))?;
        let mut cfg = ExperimentConfig::defaults(Experiment::from_name(&name)?);
        if let Some(l) = self.l_spec {
            cfg.l_spec = l;
        }
        if !cfg.l_spec.trim().starts_with("logpow") {
            cfg.tolerances.d_renewal = D_RENEWAL_RELAXED;
        }
        cfg.alpha = self.alpha.unwrap_or(cfg.alpha);
        cfg.tau = self.tau.unwrap_or(cfg.tau);
        cfg.u_grid = self.u_grid.unwrap_or(cfg.u_grid);
        cfg.replicas = self.replicas.unwrap_or(cfg.replicas);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.margin = self.margin.unwrap_or(cfg.margin);
        cfg.out = self.out;
        cfg.threads = self.threads;
        for (k, v) in &self.tolerances {
            cfg.tolerances.set(k, *v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
