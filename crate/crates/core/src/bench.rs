//! Seeded benchmark sweeps and their reports.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::planner::{prepare, Outcome, Planner, Problem, Setup};
use crate::solution::{check_solution, SolutionFile};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    /// Search time, plus setup when the config asks for it.
    pub time: f64,
    pub setup_time: f64,
    pub tree_size: usize,
    pub iterations: usize,
    /// The written solution passed the independent re-check.
    pub verified: bool,
}

impl TrialRow {
    /// Everything except timings; reruns with the same seed must agree on it.
    pub fn outcome(&self) -> (usize, u64, bool, usize, usize, bool) {
        (self.trial, self.seed, self.success, self.tree_size, self.iterations, self.verified)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over successful trials; `NaN` when there are none.
    pub mean_time: f64,
    pub std_time: f64,
}

pub fn aggregate(rows: &[TrialRow]) -> Aggregate {
    let ok: Vec<f64> = rows.iter().filter(|r| r.success).map(|r| r.time).collect();
    let n = ok.len() as f64;
    let mean = ok.iter().sum::<f64>() / n;
    let var = if ok.len() > 1 { ok.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Aggregate {
        trials: rows.len(),
        successes: ok.len(),
        success_rate: 100.0 * n / rows.len().max(1) as f64,
        mean_time: mean,
        std_time: var.sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub name: String,
    pub rows: Vec<TrialRow>,
    pub aggregate: Aggregate,
    pub setup_seconds: f64,
}

impl BenchReport {
    pub fn to_text(&self) -> String {
        let a = &self.aggregate;
        let mut s = format!("# bench {}\n# setup_seconds {}\n", self.name, self.setup_seconds);
        s.push_str("# trial seed success time setup tree_size iterations verified\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{} {} {} {:.6} {:.6} {} {} {}",
                r.trial, r.seed, r.success as u8, r.time, r.setup_time, r.tree_size, r.iterations, r.verified as u8
            );
        }
        let _ = writeln!(s, "# trials {}", a.trials);
        let _ = writeln!(s, "# success_rate {}", a.success_rate);
        let _ = writeln!(s, "# mean_time {:.6}", a.mean_time);
        let _ = writeln!(s, "# std_time {:.6}", a.std_time);
        s
    }

    /// Parses the rows back; aggregates are recomputed, not read.
    pub fn parse_rows(text: &str) -> Result<Vec<TrialRow>> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::SolutionFormat { line: i + 1, message: "malformed report row".into() };
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 8 {
                return Err(bad());
            }
            let flag = |s: &str| match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(bad()),
            };
            rows.push(TrialRow {
                trial: t[0].parse().map_err(|_| bad())?,
                seed: t[1].parse().map_err(|_| bad())?,
                success: flag(t[2])?,
                time: t[3].parse().map_err(|_| bad())?,
                setup_time: t[4].parse().map_err(|_| bad())?,
                tree_size: t[5].parse().map_err(|_| bad())?,
                iterations: t[6].parse().map_err(|_| bad())?,
                verified: flag(t[7])?,
            });
        }
        Ok(rows)
    }
}

/// One seeded trial on a prepared setup. Successful solutions are written to
/// text, parsed back and re-checked.
pub fn run_trial(problem: &Problem, setup: &Setup, config: &RunConfig, trial: usize) -> Result<(TrialRow, Option<String>)> {
    let seed = config.seed + trial as u64;
    let pc = config.planner(problem, seed)?;
    let outcome = Planner::new(problem, setup, &pc)?.run()?;
    let st = *outcome.stats();
    let extra = if config.include_setup { setup.seconds } else { 0.0 };
    let success = outcome.is_solved() && st.seconds <= config.t_max;
    let (verified, text) = match &outcome {
        Outcome::Solved(sol) => {
            let file = SolutionFile::from_solution(sol, &problem.sys);
            let text = file.to_text(&problem.sys);
            let back = SolutionFile::parse(&text)?;
            let rep = check_solution(&back, &problem.sys, &problem.spec, &problem.preds)?;
            (rep.passed(), Some(text))
        }
        Outcome::NoSolution(_) => (false, None),
    };
    let row = TrialRow {
        trial,
        seed,
        success,
        time: st.seconds + extra,
        setup_time: setup.seconds,
        tree_size: st.tree_size,
        iterations: st.iterations,
        verified,
    };
    Ok((row, text))
}

/// Runs `config.trials` trials with seeds `seed, seed+1, …`, on `jobs`
/// worker threads when more than one is requested.
pub fn run_bench(name: &str, config: &RunConfig) -> Result<(BenchReport, Vec<Option<String>>)> {
    let problem = config.problem()?;
    let setup = prepare(&problem, &config.planner(&problem, config.seed)?)?;
    let run = |i: usize| run_trial(&problem, &setup, config, i);
    let results: Vec<Result<(TrialRow, Option<String>)>> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Config { line: 0, message: e.to_string() })?;
        pool.install(|| (0..config.trials).into_par_iter().map(run).collect())
    } else {
        (0..config.trials).map(run).collect()
    };
    let mut rows = Vec::with_capacity(config.trials);
    let mut texts = Vec::with_capacity(config.trials);
    for r in results {
        let (row, text) = r?;
        rows.push(row);
        texts.push(text);
    }
    let aggregate = aggregate(&rows);
    Ok((BenchReport { name: name.to_string(), rows, aggregate, setup_seconds: setup.seconds }, texts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(trial: usize, success: bool, time: f64) -> TrialRow {
        TrialRow { trial, seed: trial as u64, success, time, setup_time: 0.0, tree_size: 3, iterations: 9, verified: success }
    }

    #[test]
    fn aggregate_of_one_trial_is_the_trial() {
        let a = aggregate(&[row(0, true, 1.5)]);
        assert_eq!((a.success_rate, a.mean_time, a.std_time), (100.0, 1.5, 0.0));
    }

    #[test]
    fn aggregate_recomputes_from_text() {
        let rows = vec![row(0, true, 1.0), row(1, false, 30.0), row(2, true, 2.0)];
        let rep = BenchReport { name: "t".into(), aggregate: aggregate(&rows), rows, setup_seconds: 0.0 };
        let back = BenchReport::parse_rows(&rep.to_text()).unwrap();
        assert_eq!(back, rep.rows);
        let a = aggregate(&back);
        assert_eq!(a.successes, 2);
        assert!((a.mean_time - 1.5).abs() < 1e-12);
        assert!((a.std_time - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
