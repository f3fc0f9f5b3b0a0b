use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stlnn::bench::run_bench;
use stlnn::config::RunConfig;
use stlnn::dynamics::builtin_dynamics;
use stlnn::planner::{prepare, Outcome, Planner};
use stlnn::product::{build_product, WeightParams};
use stlnn::separation::{minimal_partition_points, time_partition, TimePartitionSet};
use stlnn::solution::{check_solution, SolutionFile};
use stlnn::timed::build_automaton;
use stlnn::{Error, SpecFile};

#[derive(Parser)]
#[command(name = "stlnn", version, about = "Controller synthesis for non-nested STL specifications")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one synthesis and write the solution file.
    Synth {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Solution path (default: <output>/solution.txt).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded trials and write a report.
    Bench {
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Report path (default: <output>/report.txt).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write each solution next to the report.
        #[arg(long)]
        solutions: bool,
    },
    /// Re-simulate a solution and evaluate the specification on it.
    Check { solution: PathBuf, spec: PathBuf },
    /// Print the timed automaton of a specification.
    DumpAutomaton {
        spec: PathBuf,
        /// Partition points, e.g. "0 6".
        #[arg(long)]
        partition: Option<String>,
        /// Graphviz output instead of a state table.
        #[arg(long)]
        dot: bool,
    },
    /// Print the predicate abstraction of a run configuration.
    DumpAbstraction { config: PathBuf },
    /// Print the time-partitioned clauses of a specification.
    DumpClauses {
        spec: PathBuf,
        #[arg(long)]
        partition: Option<String>,
    },
    /// Print the first lead of a run configuration.
    DumpLead { config: PathBuf },
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) | Error::NoLead => Failure::Infeasible(e.to_string()),
            Error::Internal(_) => Failure::Rejected(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {}", dir.display(), e)))?;
        }
    }
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn spec(path: &Path) -> Result<SpecFile, Failure> {
    SpecFile::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn config(path: &Path) -> Result<RunConfig, Failure> {
    RunConfig::load(path).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e)))
}

fn partition(s: &SpecFile, text: Option<&str>) -> Result<TimePartitionSet, Failure> {
    match text {
        None => Ok(minimal_partition_points(&s.formula)),
        Some(t) => {
            let pts: Result<Vec<f64>, _> = t.split([' ', ',']).filter(|p| !p.is_empty()).map(str::parse).collect();
            let pts = pts.map_err(|_| Failure::Usage(format!("bad partition `{}`", t)))?;
            Ok(TimePartitionSet::new(pts)?)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Synth { config: path, seed, out } => {
            let cfg = config(&path)?;
            let problem = cfg.problem()?;
            let pc = cfg.planner(&problem, seed.unwrap_or(cfg.seed))?;
            let setup = prepare(&problem, &pc)?;
            match Planner::new(&problem, &setup, &pc)?.run()? {
                Outcome::Solved(sol) => {
                    let text = SolutionFile::from_solution(&sol, &problem.sys).to_text(&problem.sys);
                    let out = out.unwrap_or_else(|| cfg.output.join("solution.txt"));
                    write(&out, &text)?;
                    println!(
                        "solved in {:.3} s ({} iterations, {} vertices), wrote {}",
                        sol.stats.seconds,
                        sol.stats.iterations,
                        sol.stats.tree_size,
                        out.display()
                    );
                    Ok(())
                }
                Outcome::NoSolution(st) => Err(Failure::Infeasible(format!(
                    "no solution after {} iterations ({:.3} s)",
                    st.iterations, st.seconds
                ))),
            }
        }
        Cmd::Bench { config: path, trials, jobs, out, solutions } => {
            let mut cfg = config(&path)?;
            if let Some(t) = trials {
                cfg.trials = t.max(1);
            }
            if let Some(j) = jobs {
                cfg.jobs = j.max(1);
            }
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let (report, texts) = run_bench(&name, &cfg)?;
            let out = out.unwrap_or_else(|| cfg.output.join("report.txt"));
            write(&out, &report.to_text())?;
            if solutions {
                let dir = out.parent().unwrap_or(Path::new("."));
                for (row, text) in report.rows.iter().zip(&texts) {
                    if let Some(t) = text {
                        write(&dir.join(format!("solution_{}.txt", row.seed)), t)?;
                    }
                }
            }
            let a = &report.aggregate;
            println!(
                "{}: success {}/{} ({:.1}%), mean time {:.3} s ± {:.3}, wrote {}",
                name,
                a.successes,
                a.trials,
                a.success_rate,
                a.mean_time,
                a.std_time,
                out.display()
            );
            Ok(())
        }
        Cmd::Check { solution, spec: spec_path } => {
            let file = SolutionFile::parse(&read(&solution)?).map_err(|e| Failure::Usage(e.to_string()))?;
            let s = spec(&spec_path)?;
            let sys = builtin_dynamics(&file.dynamics)?;
            let rep = check_solution(&file, &sys, &s.formula, &s.predicates)?;
            println!("monitor: {}", if rep.monitor { "satisfied" } else { "violated" });
            println!("automaton: {}", if rep.automaton { "accepted" } else { "rejected" });
            if let Some(t) = rep.violation {
                println!("first violation at t = {}", t);
            }
            if rep.passed() {
                println!("PASS");
                Ok(())
            } else {
                Err(Failure::Rejected("FAIL".into()))
            }
        }
        Cmd::DumpAutomaton { spec: path, partition: p, dot } => {
            let s = spec(&path)?;
            let t = partition(&s, p.as_deref())?;
            let ta = build_automaton(&s.formula, Some(&t))?;
            let names = s.predicates.names();
            if dot {
                print!("{}", ta.to_dot(&names));
            } else {
                println!(
                    "# states {} transitions {} horizon {}",
                    ta.num_states(),
                    ta.num_transitions(),
                    ta.horizon()
                );
                for q in 0..ta.num_states() {
                    let init = if ta.initial().contains(&q) { " initial" } else { "" };
                    let acc = if ta.is_accepting(q) { " accepting" } else { "" };
                    println!("state {} inv {}{}{}", q, ta.inv(q), init, acc);
                    for (g, r) in ta.edges(q) {
                        println!("  -> {} on {}", r, g.display_with(&names));
                    }
                }
            }
            Ok(())
        }
        Cmd::DumpAbstraction { config: path } => {
            let cfg = config(&path)?;
            let problem = cfg.problem()?;
            let pc = cfg.planner(&problem, cfg.seed)?;
            let setup = prepare(&problem, &pc)?;
            print!("{}", setup.abstraction.to_text());
            Ok(())
        }
        Cmd::DumpClauses { spec: path, partition: p } => {
            let s = spec(&path)?;
            let t = partition(&s, p.as_deref())?;
            let names = s.predicates.names();
            for c in time_partition(&s.formula, &t)? {
                println!("{}", c.display_with(&names));
            }
            Ok(())
        }
        Cmd::DumpLead { config: path } => {
            let cfg = config(&path)?;
            let problem = cfg.problem()?;
            let pc = cfg.planner(&problem, cfg.seed)?;
            let setup = prepare(&problem, &pc)?;
            let d0 = setup.abstraction.region_of(&problem.x0)?;
            let params = WeightParams { duration_floor: pc.duration_floor, unbounded_until: pc.t_max };
            let p = build_product(setup.automaton.clone(), setup.abstraction.clone(), d0, params)?;
            let lead = p.compute_lead(p.initial())?;
            print!("{}", lead.to_table(&p));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("{}", m);
            ExitCode::from(3)
        }
        Err(Failure::Rejected(m)) => {
            eprintln!("{}", m);
            ExitCode::from(1)
        }
    }
}
