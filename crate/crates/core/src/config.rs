//! Run configuration files.
//!
//! ```text
//! # comment
//! [run]
//! spec = phi1.stl          # relative to the config file
//! dynamics = double_integrator
//! x0 = 0 0
//! t_max = 30
//! t_e = 1
//! seed = 1
//! trials = 100
//! output = results/phi1
//!
//! [system]                 # optional bound overrides
//! state_lo = -1 -2
//! state_hi = 5 2
//! control_lo = -1
//! control_hi = 1
//!
//! [planner]                # optional
//! explore_iterations = 100
//! max_iterations = 200000
//! dt_min = 0.05
//! dt_max = 1.0
//! partition = 0 2          # explicit time partition
//! partitions = 5           # or: this many equal pieces of [0, partition_until]
//! partition_until = 5
//! max_depth = 8
//! impure_budget = 0.2
//! include_setup = false
//! jobs = 1
//! ```

use std::path::{Path, PathBuf};

use crate::abstraction::{AbstractionOptions, StateBox};
use crate::dynamics::{builtin_dynamics, DynamicsModel};
use crate::error::{Error, Result};
use crate::formula::SpecFile;
use crate::planner::{PlannerConfig, Problem};
use crate::separation::TimePartitionSet;

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionChoice {
    Minimal,
    Explicit(Vec<f64>),
    /// `k` equal pieces of `[0, until]` on top of the minimal set.
    Uniform { k: usize, until: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: PathBuf,
    pub dynamics: String,
    pub x0: Vec<f64>,
    pub t_max: f64,
    pub t_e: f64,
    pub seed: u64,
    pub trials: usize,
    pub output: PathBuf,
    pub state_lo: Option<Vec<f64>>,
    pub state_hi: Option<Vec<f64>>,
    pub control_lo: Option<Vec<f64>>,
    pub control_hi: Option<Vec<f64>>,
    pub explore_iterations: usize,
    pub max_iterations: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub partition: PartitionChoice,
    pub max_depth: u32,
    pub impure_budget: f64,
    pub include_setup: bool,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PlannerConfig::default();
        let a = AbstractionOptions::default();
        RunConfig {
            spec: PathBuf::new(),
            dynamics: String::new(),
            x0: vec![],
            t_max: p.t_max,
            t_e: p.t_e,
            seed: 0,
            trials: 1,
            output: PathBuf::from("out"),
            state_lo: None,
            state_hi: None,
            control_lo: None,
            control_hi: None,
            explore_iterations: p.explore_iterations,
            max_iterations: p.max_iterations,
            dt_min: p.dt_min,
            dt_max: p.dt_max,
            partition: PartitionChoice::Minimal,
            max_depth: a.max_depth,
            impure_budget: a.impure_budget,
            include_setup: false,
            jobs: 1,
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn num<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().map_err(|_| err(line, format!("`{}` expects a number, got `{}`", key, v)))
}

fn nums(v: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    v.split_whitespace().map(|t| num::<f64>(t, line, key)).collect()
}

impl RunConfig {
    /// Parses config text. Relative `spec` paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut section = String::new();
        let mut seen_spec = 0;
        let mut seen_dyn = 0;
        let mut seen_x0 = 0;
        let mut k_parts = None;
        let mut until = None;
        let mut explicit = None;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                section = name.trim().to_string();
                if !["run", "system", "planner"].contains(&section.as_str()) {
                    return Err(err(ln, format!("unknown section [{}]", section)));
                }
                continue;
            }
            let (key, val) = line.split_once('=').ok_or_else(|| err(ln, "expected `key = value`"))?;
            let (key, val) = (key.trim(), val.trim());
            match (section.as_str(), key) {
                ("run", "spec") => {
                    c.spec = base.join(val);
                    seen_spec = ln;
                }
                ("run", "dynamics") => {
                    c.dynamics = val.to_string();
                    seen_dyn = ln;
                }
                ("run", "x0") => {
                    c.x0 = nums(val, ln, key)?;
                    seen_x0 = ln;
                }
                ("run", "t_max") => c.t_max = num(val, ln, key)?,
                ("run", "t_e") => c.t_e = num(val, ln, key)?,
                ("run", "seed") => c.seed = num(val, ln, key)?,
                ("run", "trials") => c.trials = num(val, ln, key)?,
                ("run", "output") => c.output = PathBuf::from(val),
                ("system", "state_lo") => c.state_lo = Some(nums(val, ln, key)?),
                ("system", "state_hi") => c.state_hi = Some(nums(val, ln, key)?),
                ("system", "control_lo") => c.control_lo = Some(nums(val, ln, key)?),
                ("system", "control_hi") => c.control_hi = Some(nums(val, ln, key)?),
                ("planner", "explore_iterations") => c.explore_iterations = num(val, ln, key)?,
                ("planner", "max_iterations") => c.max_iterations = num(val, ln, key)?,
                ("planner", "dt_min") => c.dt_min = num(val, ln, key)?,
                ("planner", "dt_max") => c.dt_max = num(val, ln, key)?,
                ("planner", "partition") => explicit = Some((nums(val, ln, key)?, ln)),
                ("planner", "partitions") => k_parts = Some((num::<usize>(val, ln, key)?, ln)),
                ("planner", "partition_until") => until = Some(num::<f64>(val, ln, key)?),
                ("planner", "max_depth") => c.max_depth = num(val, ln, key)?,
                ("planner", "impure_budget") => c.impure_budget = num(val, ln, key)?,
                ("planner", "include_setup") => {
                    c.include_setup = match val {
                        "true" => true,
                        "false" => false,
                        _ => return Err(err(ln, "`include_setup` expects true or false")),
                    }
                }
                ("planner", "jobs") => c.jobs = num(val, ln, key)?,
                ("", _) => return Err(err(ln, "key outside of a section")),
                (s, k) => return Err(err(ln, format!("unknown key `{}` in [{}]", k, s))),
            }
        }
        let last = text.lines().count().max(1);
        if seen_spec == 0 {
            return Err(err(last, "missing `spec` in [run]"));
        }
        if seen_dyn == 0 {
            return Err(err(last, "missing `dynamics` in [run]"));
        }
        if seen_x0 == 0 {
            return Err(err(last, "missing `x0` in [run]"));
        }
        c.partition = match (explicit, k_parts) {
            (Some(_), Some((_, ln))) => return Err(err(ln, "`partition` and `partitions` are exclusive")),
            (Some((p, _)), None) => PartitionChoice::Explicit(p),
            (None, Some((k, ln))) => {
                if k == 0 {
                    return Err(err(ln, "`partitions` must be at least 1"));
                }
                let until = until.ok_or_else(|| err(ln, "`partitions` needs `partition_until`"))?;
                PartitionChoice::Uniform { k, until }
            }
            (None, None) => PartitionChoice::Minimal,
        };
        if c.trials == 0 {
            return Err(err(last, "`trials` must be at least 1"));
        }
        if !(c.t_e <= c.t_max) {
            return Err(err(last, "`t_e` must not exceed `t_max`"));
        }
        if !(c.dt_min > 0.0 && c.dt_min < c.dt_max) {
            return Err(err(last, "need 0 < dt_min < dt_max"));
        }
        if c.jobs == 0 {
            return Err(err(last, "`jobs` must be at least 1"));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn system(&self) -> Result<DynamicsModel> {
        let mut sys = builtin_dynamics(&self.dynamics)?;
        let pick = |o: &Option<Vec<f64>>, d: &Vec<f64>| o.clone().unwrap_or_else(|| d.clone());
        if self.state_lo.is_some() || self.state_hi.is_some() {
            sys.bounds = StateBox::new(pick(&self.state_lo, &sys.bounds.lo), pick(&self.state_hi, &sys.bounds.hi))?;
        }
        if self.control_lo.is_some() || self.control_hi.is_some() {
            sys.controls =
                StateBox::new(pick(&self.control_lo, &sys.controls.lo), pick(&self.control_hi, &sys.controls.hi))?;
        }
        if sys.bounds.dim() != sys.state_dim() {
            return Err(Error::DimensionMismatch { expected: sys.state_dim(), got: sys.bounds.dim() });
        }
        if sys.controls.dim() != sys.control_dim() {
            return Err(Error::DimensionMismatch { expected: sys.control_dim(), got: sys.controls.dim() });
        }
        Ok(sys)
    }

    /// Loads the specification file and assembles the synthesis problem.
    pub fn problem(&self) -> Result<Problem> {
        let text = std::fs::read_to_string(&self.spec)?;
        let spec = SpecFile::parse(&text)?;
        let sys = self.system()?;
        if spec.predicates.dim() != sys.state_dim() {
            return Err(Error::DimensionMismatch { expected: sys.state_dim(), got: spec.predicates.dim() });
        }
        if self.x0.len() != sys.state_dim() {
            return Err(Error::DimensionMismatch { expected: sys.state_dim(), got: self.x0.len() });
        }
        Ok(Problem { spec: spec.formula, preds: spec.predicates, sys, x0: self.x0.clone() })
    }

    pub fn planner(&self, problem: &Problem, seed: u64) -> Result<PlannerConfig> {
        let partition = match &self.partition {
            PartitionChoice::Minimal => None,
            PartitionChoice::Explicit(p) => Some(TimePartitionSet::new(p.clone())?),
            PartitionChoice::Uniform { k, until } => Some(TimePartitionSet::refined(&problem.spec, *until, k - 1)?),
        };
        Ok(PlannerConfig {
            t_max: self.t_max,
            t_e: self.t_e,
            explore_iterations: self.explore_iterations,
            max_iterations: self.max_iterations,
            dt_min: self.dt_min,
            dt_max: self.dt_max,
            seed,
            partition,
            abstraction: AbstractionOptions { max_depth: self.max_depth, impure_budget: self.impure_budget },
            duration_floor: self.dt_min,
        })
    }
}
