//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::racesim::CarParams;
use crate::search::SearchBudget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Cdbo,
    Cmaes,
    BoCmaes,
    Rembo5,
    Rembo10,
    Random,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Cdbo,
        Method::Cmaes,
        Method::BoCmaes,
        Method::Rembo5,
        Method::Rembo10,
        Method::Random,
    ];

    /// Name used in output files. Plain CMA-ES is labelled `cmaes-std`
    /// because it has no active (negative-weight) update.
    pub fn label(self) -> &'static str {
        match self {
            Method::Cdbo => "cdbo",
            Method::Cmaes => "cmaes-std",
            Method::BoCmaes => "bo-cmaes",
            Method::Rembo5 => "rembo-5d",
            Method::Rembo10 => "rembo-10d",
            Method::Random => "random",
        }
    }

    /// True for the methods that fit a GP and count acquisition evaluations.
    pub fn is_bo(self) -> bool {
        matches!(self, Method::Cdbo | Method::BoCmaes | Method::Rembo5 | Method::Rembo10)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "cdbo" => Method::Cdbo,
            "cmaes" | "cmaes-std" => Method::Cmaes,
            "bo-cmaes" => Method::BoCmaes,
            "rembo-5d" => Method::Rembo5,
            "rembo-10d" => Method::Rembo10,
            "random" => Method::Random,
            other => {
                return Err(Error::Config(format!(
                    "unknown method `{other}` (expected one of cdbo, cmaes, bo-cmaes, rembo-5d, rembo-10d, random)"
                )))
            }
        })
    }
}

/// One method at one policy size, run once per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Bundled track name or path to a track file.
    pub track: String,
    pub method: Method,
    pub kernels: usize,
    pub laps: usize,
    pub warm_starts: usize,
    pub seeds: Vec<u64>,
    pub beta: f64,
    /// Warm-start spread; `None` means `0.05 * max|w0|`.
    pub sigma0: Option<f64>,
    pub lambda_ridge: f64,
    pub af_budget: usize,
    pub adapt_every: usize,
    pub demo_speed: f64,
    /// Keep every k-th simulator step of the demonstration lap.
    pub demo_stride: usize,
    /// Policy kernel length-scale; `None` means the inducing-point spacing.
    pub policy_length_scale: Option<f64>,
    pub car: CarParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            track: "forza-analog".into(),
            method: Method::Cdbo,
            kernels: 10,
            laps: 300,
            warm_starts: 10,
            seeds: vec![0, 1, 2, 3],
            beta: 1.0,
            sigma0: None,
            lambda_ridge: 1e-3,
            af_budget: SearchBudget::DEFAULT_MAX,
            adapt_every: 10,
            demo_speed: 15.0,
            demo_stride: 1,
            policy_length_scale: None,
            car: CarParams::default(),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse `{value}`: {e}")))
}

fn parse_auto(key: &str, value: &str) -> Result<Option<f64>> {
    if value.trim() == "auto" {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}

fn fmt_auto(v: Option<f64>) -> String {
    v.map_or_else(|| "auto".to_string(), |x| x.to_string())
}

fn seed_list(key: &str, value: &str) -> Result<Vec<u64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Sets one key. `repeats = n` is shorthand for `seeds = 0,...,n-1`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "track" => self.track = v.to_string(),
            "method" => self.method = v.parse()?,
            "kernels" => self.kernels = parse_num(key, v)?,
            "laps" => self.laps = parse_num(key, v)?,
            "warm_starts" => self.warm_starts = parse_num(key, v)?,
            "repeats" => {
                let n: u64 = parse_num(key, v)?;
                self.seeds = (0..n).collect();
            }
            "seeds" | "seed" => self.seeds = seed_list(key, v)?,
            "beta" => self.beta = parse_num(key, v)?,
            "sigma0" => self.sigma0 = parse_auto(key, v)?,
            "lambda_ridge" => self.lambda_ridge = parse_num(key, v)?,
            "af_budget" => self.af_budget = parse_num(key, v)?,
            "adapt_every" => self.adapt_every = parse_num(key, v)?,
            "demo_speed" => self.demo_speed = parse_num(key, v)?,
            "demo_stride" => self.demo_stride = parse_num(key, v)?,
            "policy_length_scale" => self.policy_length_scale = parse_auto(key, v)?,
            "car.mass" => self.car.mass = parse_num(key, v)?,
            "car.max_drive_force" => self.car.max_drive_force = parse_num(key, v)?,
            "car.max_brake_force" => self.car.max_brake_force = parse_num(key, v)?,
            "car.drag_coeff" => self.car.drag_coeff = parse_num(key, v)?,
            "car.mu_g" => self.car.mu_g = parse_num(key, v)?,
            "car.v_max_engine" => self.car.v_max_engine = parse_num(key, v)?,
            "car.timestep" => self.car.timestep = parse_num(key, v)?,
            "car.timeout" => self.car.timeout = parse_num(key, v)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn repeats(&self) -> usize {
        self.seeds.len()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.kernels == 0 {
            return fail("kernels must be at least 1".into());
        }
        if self.laps == 0 {
            return fail("laps must be at least 1".into());
        }
        if self.method != Method::Cmaes && self.method != Method::Random {
            if self.warm_starts == 0 {
                return fail("warm_starts must be at least 1".into());
            }
            if self.warm_starts > self.laps {
                return fail(format!(
                    "warm_starts ({}) exceeds laps ({})",
                    self.warm_starts, self.laps
                ));
            }
        }
        if self.seeds.is_empty() {
            return fail("at least one seed is required".into());
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return fail("seeds must be distinct".into());
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return fail(format!("beta must be >= 0, got {}", self.beta));
        }
        if let Some(s) = self.sigma0 {
            if !(s >= 0.0 && s.is_finite()) {
                return fail(format!("sigma0 must be >= 0, got {s}"));
            }
        }
        if !(self.lambda_ridge > 0.0 && self.lambda_ridge.is_finite()) {
            return fail(format!("lambda_ridge must be positive, got {}", self.lambda_ridge));
        }
        if self.demo_stride == 0 {
            return fail("demo_stride must be at least 1".into());
        }
        if self.af_budget == 0 {
            return fail("af_budget must be positive".into());
        }
        if let Some(l) = self.policy_length_scale {
            if !(l > 0.0 && l.is_finite()) {
                return fail(format!("policy_length_scale must be positive, got {l}"));
            }
        }
        let embed = match self.method {
            Method::Rembo5 => 5,
            Method::Rembo10 => 10,
            _ => 0,
        };
        if embed > self.kernels {
            return fail(format!(
                "{} needs at least {embed} kernels, got {}",
                self.method, self.kernels
            ));
        }
        self.car.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// All keys in a stable order, suitable for `parse`.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        let c = &self.car;
        [
            ("track", self.track.clone()),
            ("method", self.method.label().to_string()),
            ("kernels", self.kernels.to_string()),
            ("laps", self.laps.to_string()),
            ("warm_starts", self.warm_starts.to_string()),
            ("seeds", seeds.join(",")),
            ("beta", self.beta.to_string()),
            ("sigma0", fmt_auto(self.sigma0)),
            ("lambda_ridge", self.lambda_ridge.to_string()),
            ("af_budget", self.af_budget.to_string()),
            ("adapt_every", self.adapt_every.to_string()),
            ("demo_speed", self.demo_speed.to_string()),
            ("demo_stride", self.demo_stride.to_string()),
            ("policy_length_scale", fmt_auto(self.policy_length_scale)),
            ("car.mass", c.mass.to_string()),
            ("car.max_drive_force", c.max_drive_force.to_string()),
            ("car.max_brake_force", c.max_brake_force.to_string()),
            ("car.drag_coeff", c.drag_coeff.to_string()),
            ("car.mu_g", c.mu_g.to_string()),
            ("car.v_max_engine", c.v_max_engine.to_string()),
            ("car.timestep", c.timestep.to_string()),
            ("car.timeout", c.timeout.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn to_text(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Splits `key = value` lines, skipping blanks and `#` comments.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// A set of experiments: `method` and `kernels` may list several values
/// (comma separated) and every combination is run with the shared settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub methods: Vec<Method>,
    pub kernels: Vec<usize>,
    pub base: ExperimentConfig,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        let base = ExperimentConfig::default();
        Self {
            methods: vec![base.method],
            kernels: vec![base.kernels],
            base,
        }
    }
}

impl ExperimentPlan {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "method" | "methods" => {
                self.methods = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?;
            }
            "kernels" => {
                self.kernels = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?;
            }
            _ => self.base.set(key, value)?,
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut plan = Self::default();
        for (line, k, v) in parse_pairs(text)? {
            plan.set(&k, &v).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// One config per (method, kernels) pair, methods varying slowest.
    pub fn expand(&self) -> Result<Vec<ExperimentConfig>> {
        if self.methods.is_empty() || self.kernels.is_empty() {
            return Err(Error::Config("at least one method and one kernel count are required".into()));
        }
        let mut out = Vec::new();
        for &method in &self.methods {
            for &kernels in &self.kernels {
                let cfg = ExperimentConfig {
                    method,
                    kernels,
                    ..self.base.clone()
                };
                cfg.validate()?;
                out.push(cfg);
            }
        }
        Ok(out)
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut map: BTreeMap<String, String> = self.base.to_pairs().into_iter().collect();
        let methods: Vec<&str> = self.methods.iter().map(|m| m.label()).collect();
        let kernels: Vec<String> = self.kernels.iter().map(|k| k.to_string()).collect();
        map.insert("method".into(), methods.join(","));
        map.insert("kernels".into(), kernels.join(","));
        map
    }
}
