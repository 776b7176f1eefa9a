use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hypercone::agm::{agm_baseline, AgmConfig};
use hypercone::dfw::{solve, CdChoice, ConicProgram, DfwConfig, SolveResult, StepRule};
use hypercone::harness::{
    export_convergence, gen_instances, read_reference, run_bench, run_cd_sensitivity, BenchConfig,
    BenchSolver, BudgetRule, InstanceSpec,
};
use hypercone::{ConeSpec, Error, HyperbolicForm, PolynomialForm};

const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_NO_FEASIBLE: u8 = 4;

#[derive(Parser)]
#[command(name = "hypercone", version, about = "Dual Frank-Wolfe projections onto hyperbolicity cones and p-cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the eigenvalues of x with respect to (p, e), largest first.
    Eig {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Defaults to the all-ones vector.
        #[arg(long, allow_hyphen_values = true)]
        e: Option<String>,
    },
    /// Project a point onto a cone.
    Project {
        #[arg(long)]
        cone: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Solve a quadratic problem read from a problem file.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Time-to-error benchmark over seeded instances.
    Bench {
        #[arg(long)]
        instances: PathBuf,
        /// CSV with instance_id,objective,seconds. Without it, long dfw runs
        /// serve as the reference.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "10,1,0.5,0.1")]
        errors: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Fixed per-instance time budget instead of the reference time.
        #[arg(long)]
        budget_seconds: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
        /// Run the c_D sensitivity protocol with these multiples of the
        /// projection c_D; one report per multiplier.
        #[arg(long, value_delimiter = ',')]
        cd_multipliers: Option<Vec<f64>>,
        /// Directory for per-instance trace and convergence CSVs.
        #[arg(long)]
        traces: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Solver::Dfw)]
        solver: Solver,
        #[arg(long, default_value_t = 1e-3)]
        mu: f64,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Solver {
    Dfw,
    Agm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Step {
    Diminishing,
    Exact,
    Lipschitz,
}

#[derive(Args)]
struct SolveOpts {
    /// `auto` doubles c_D from 1 until a duality-gap certificate holds;
    /// the default is the closed-form bound.
    #[arg(long)]
    cd: Option<String>,
    #[arg(long, value_enum, default_value_t = Step::Exact)]
    step: Step,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long)]
    max_seconds: Option<f64>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Solver::Dfw)]
    solver: Solver,
    #[arg(long, default_value_t = 1e-3)]
    mu: f64,
}

enum Failure {
    Invalid(String),
    Numerical(String),
    NoFeasible(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_invalid_input() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn parse_vector(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| invalid(format!("cannot parse {t:?} as a number"))))
        .collect()
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

impl SolveOpts {
    fn config(&self) -> Result<DfwConfig, Failure> {
        let cd = match self.cd.as_deref() {
            None => CdChoice::ClosedForm,
            Some("auto") => CdChoice::Auto,
            Some(v) => CdChoice::Value(v.parse().map_err(|_| invalid(format!("bad --cd value {v:?}")))?),
        };
        let step_rule = match self.step {
            Step::Diminishing => StepRule::Diminishing,
            Step::Exact => StepRule::ExactLineSearch,
            Step::Lipschitz => StepRule::Lipschitz(None),
        };
        let cfg = DfwConfig {
            cd,
            step_rule,
            fw_gap_tol: self.tol,
            max_iters: self.max_iters,
            max_seconds: self.max_seconds.unwrap_or(f64::INFINITY),
            record_trace: self.trace.is_some(),
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(program: &ConicProgram, res: &SolveResult, opts: &SolveOpts) -> Result<(), Failure> {
    if let (Some(path), Some(trace)) = (&opts.trace, &res.trace) {
        trace.save_csv(path)?;
    }
    let best = res.best.as_ref();
    let distance = match (program.anchor(), best) {
        (Some(x0), Some(b)) => Some(b.x.iter().zip(x0).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt()),
        _ => None,
    };
    let out = json!({
        "solver": "dfw",
        "status": res.status,
        "x": best.map(|b| &b.x),
        "objective": best.map(|b| b.objective),
        "distance": distance,
        "best_iteration": best.map(|b| b.iteration),
        "iterations": res.iterations,
        "fw_gap": res.final_gap,
        "lambda_min": res.final_lambda_min,
        "c_d": res.c_d,
        "elapsed_s": res.elapsed_s,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    if best.is_none() {
        return Err(Failure::NoFeasible("budget exhausted without a feasible iterate".into()));
    }
    Ok(())
}

fn run_agm(cone: &ConeSpec, x0: &[f64], opts: &SolveOpts) -> Result<(), Failure> {
    let form = cone
        .hyperbolic_form()?
        .ok_or_else(|| invalid("the accelerated baseline needs a hyperbolicity cone"))?;
    let mut cfg = AgmConfig::new(opts.mu)?;
    cfg.max_iters = opts.max_iters;
    cfg.max_seconds = opts.max_seconds.unwrap_or(f64::INFINITY);
    cfg.record_trace = opts.trace.is_some();
    let res = agm_baseline(&form, x0, &cfg)?;
    if let (Some(path), Some(trace)) = (&opts.trace, &res.trace) {
        trace.save_csv(path)?;
    }
    let out = json!({
        "solver": "agm",
        "label": res.label,
        "x": res.x,
        "objective": res.objective,
        "distance": (2.0 * res.objective).sqrt(),
        "iterations": res.iterations,
        "elapsed_s": res.elapsed_s,
    });
    println!("{}", serde_json::to_string_pretty(&out).unwrap());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eig { poly, x, e } => {
            let p = PolynomialForm::from_json(&read(&poly)?)?;
            let x = parse_vector(&x)?;
            let e = match e {
                Some(s) => parse_vector(&s)?,
                None => vec![1.0; p.n()],
            };
            let hp = HyperbolicForm::new(p, e)?;
            let spec = hp.eigenvalues(&x)?;
            let line: Vec<String> = spec.values.iter().map(|v| format!("{v}")).collect();
            println!("{}", line.join(","));
            Ok(())
        }
        Command::Project { cone, point, opts } => {
            let spec = ConeSpec::from_json(&read(&cone)?)?;
            let x0 = parse_vector(&point)?;
            if x0.len() != spec.dim() {
                return Err(invalid(format!("point has {} entries, cone dimension is {}", x0.len(), spec.dim())));
            }
            if opts.solver == Solver::Agm {
                return run_agm(&spec, &x0, &opts);
            }
            let program = ConicProgram::projection(x0, spec.build()?)?;
            let res = solve(&program, &opts.config()?)?;
            report(&program, &res, &opts)
        }
        Command::Solve { problem, opts } => {
            if opts.solver == Solver::Agm {
                return Err(invalid("the accelerated baseline only handles projections; use `project`"));
            }
            let program = ConicProgram::from_json(&read(&problem)?)?;
            let res = solve(&program, &opts.config()?)?;
            report(&program, &res, &opts)
        }
        Command::Bench {
            instances,
            reference,
            errors,
            out,
            budget_seconds,
            max_iters,
            cd_multipliers,
            traces,
            solver,
            mu,
        } => {
            let spec = InstanceSpec::from_json(&read(&instances)?)?;
            let points = gen_instances(&spec)?;
            let refs = reference.as_deref().map(read_reference).transpose()?;
            let mut cfg = BenchConfig {
                error_levels: errors,
                budget: budget_seconds.map_or(BudgetRule::ReferenceTime, BudgetRule::Seconds),
                solver: match solver {
                    Solver::Dfw => BenchSolver::Dfw,
                    Solver::Agm => BenchSolver::Agm { mu },
                },
                ..Default::default()
            };
            cfg.dfw.max_iters = max_iters;
            let reports = match cd_multipliers {
                Some(ms) => run_cd_sensitivity(&points, &spec.cone, &ms, &cfg, refs.as_deref())?,
                None => vec![(1.0, run_bench(&points, &spec.cone, &cfg, refs.as_deref())?)],
            };
            let single = reports.len() == 1;
            for (m, rep) in &reports {
                let path = if single { out.clone() } else { suffixed(&out, &format!("cd{m}")) };
                rep.write_csv(std::fs::File::create(&path).map_err(Error::from)?)?;
                for s in &rep.summaries {
                    println!(
                        "c_D x{m}: E = {}%: success {:.1}% rel_time {:.3e} (sample std {:.3e})",
                        s.error_pct, s.success_pct, s.rel_time.mean, s.rel_time.sample_std
                    );
                }
                if let Some(dir) = &traces {
                    std::fs::create_dir_all(dir).map_err(Error::from)?;
                    for (i, tr) in rep.traces.iter().enumerate() {
                        let tag = if single { String::new() } else { format!("_cd{m}") };
                        tr.save_csv(&dir.join(format!("trace_{i}{tag}.csv")))?;
                        let conv = export_convergence(tr);
                        conv.write_csv(
                            std::fs::File::create(dir.join(format!("convergence_{i}{tag}.csv"))).map_err(Error::from)?,
                        )?;
                    }
                }
            }
            Ok(())
        }
    }
}

fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{tag}.{ext}"))
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::NoFeasible(m)) => {
            eprintln!("{m}");
            ExitCode::from(EXIT_NO_FEASIBLE)
        }
    }
}
