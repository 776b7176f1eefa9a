//! Seeded instance generation, time-to-error benchmarking and CSV exports.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agm::{agm_baseline, AgmConfig};
use crate::cones::{ConeOracle, ConeSpec};
use crate::dfw::{compute_cd_projection, fmt_f64, solve, CdChoice, ConicProgram, DfwConfig, SolveTrace};
use crate::error::{Error, Result};

/// Feasibility threshold for counting an iterate as a solution.
pub const FEASIBILITY_THRESHOLD: f64 = -1e-8;
const MAX_CONSECUTIVE_REJECTIONS: usize = 1000;

fn default_reject_threshold() -> f64 {
    -1e-4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub cone: ConeSpec,
    pub seed: u64,
    pub count: usize,
    /// Draws with λ_min above this value are discarded as too close to the cone.
    #[serde(default = "default_reject_threshold")]
    pub reject_threshold: f64,
}

impl InstanceSpec {
    pub fn new(cone: ConeSpec, seed: u64, count: usize) -> Self {
        Self { cone, seed, count, reject_threshold: default_reject_threshold() }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Standard normal points outside the cone. Instance i draws from the
/// ChaCha8 stream `i` of the generator seeded with `seed`, so each instance
/// is reproducible on its own.
pub fn gen_instances(spec: &InstanceSpec) -> Result<Vec<Vec<f64>>> {
    let cone = spec.cone.build()?;
    gen_instances_for(spec, cone.as_ref())
}

pub fn gen_instances_for(spec: &InstanceSpec, cone: &dyn ConeOracle) -> Result<Vec<Vec<f64>>> {
    let dim = cone.dim();
    (0..spec.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            for _ in 0..MAX_CONSECUTIVE_REJECTIONS {
                let x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                if cone.lambda_min(&x)? <= spec.reject_threshold {
                    return Ok(x);
                }
            }
            Err(Error::InstanceGeneration(format!(
                "instance {i}: {MAX_CONSECUTIVE_REJECTIONS} consecutive draws rejected"
            )))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub instance_id: usize,
    pub objective: f64,
    pub seconds: f64,
}

/// Reads a CSV with header `instance_id,objective,seconds`.
pub fn read_reference(path: &Path) -> Result<Vec<ReferenceValue>> {
    parse_reference(std::fs::File::open(path)?)
}

pub fn parse_reference<R: std::io::Read>(r: R) -> Result<Vec<ReferenceValue>> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut out: Vec<ReferenceValue> = Vec::new();
    for row in rd.deserialize() {
        let v: ReferenceValue = row?;
        if !v.objective.is_finite() || !(v.seconds >= 0.0) {
            return Err(Error::InvalidArgument(format!("bad reference row for instance {}", v.instance_id)));
        }
        if out.iter().any(|o| o.instance_id == v.instance_id) {
            return Err(Error::InvalidArgument(format!("duplicate reference for instance {}", v.instance_id)));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn write_reference<W: Write>(w: W, refs: &[ReferenceValue]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in refs {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BudgetRule {
    /// Each run may use as much time as the reference took.
    ReferenceTime,
    Seconds(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BenchSolver {
    Dfw,
    Agm { mu: f64 },
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub solver: BenchSolver,
    pub dfw: DfwConfig,
    pub error_levels: Vec<f64>,
    pub budget: BudgetRule,
    /// Multiplies the projection c_D of each instance.
    pub cd_multiplier: f64,
    /// Settings for the long run used when no reference file is given.
    pub reference_config: DfwConfig,
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            solver: BenchSolver::Dfw,
            dfw: DfwConfig { fw_gap_tol: 1e-9, max_iters: 100_000, ..Default::default() },
            error_levels: vec![10.0, 1.0, 0.5, 0.1],
            budget: BudgetRule::ReferenceTime,
            cd_multiplier: 1.0,
            reference_config: DfwConfig {
                fw_gap_tol: 1e-10,
                max_iters: 1_000_000,
                max_seconds: 60.0,
                ..Default::default()
            },
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceRow {
    pub instance_id: usize,
    pub error_pct: f64,
    pub success: bool,
    pub iteration: Option<usize>,
    pub seconds: Option<f64>,
    pub rel_time: Option<f64>,
    pub reference_objective: f64,
    pub best_objective: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub error_pct: f64,
    pub successes: usize,
    pub total: usize,
    pub success_pct: f64,
    pub rel_time: Stat,
    pub iterations: Stat,
    pub seconds: Stat,
}

/// Mean and sample standard deviation (n − 1 denominator); the deviation is
/// NaN with fewer than two samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub sample_std: f64,
}

impl Stat {
    pub fn of(v: &[f64]) -> Stat {
        let n = v.len() as f64;
        if v.is_empty() {
            return Stat { mean: f64::NAN, sample_std: f64::NAN };
        }
        let mean = v.iter().sum::<f64>() / n;
        let sample_std = if v.len() < 2 {
            f64::NAN
        } else {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Stat { mean, sample_std }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ErrorTargetReport {
    pub summaries: Vec<LevelSummary>,
    pub rows: Vec<InstanceRow>,
    pub traces: Vec<SolveTrace>,
    pub references: Vec<ReferenceValue>,
}

const REPORT_HEADER: [&str; 15] = [
    "row_type",
    "instance_id",
    "error_pct",
    "success",
    "iteration",
    "seconds",
    "rel_time",
    "success_pct",
    "rel_time_mean",
    "rel_time_sample_std",
    "iter_mean",
    "iter_sample_std",
    "seconds_mean",
    "seconds_sample_std",
    "reference_objective",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ErrorTargetReport {
    /// One CSV holding summary rows (statistics over successful instances)
    /// followed by per-instance rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(REPORT_HEADER)?;
        for s in &self.summaries {
            wr.write_record([
                "summary".to_string(),
                String::new(),
                s.error_pct.to_string(),
                format!("{}/{}", s.successes, s.total),
                String::new(),
                String::new(),
                String::new(),
                s.success_pct.to_string(),
                fmt_f64(s.rel_time.mean),
                fmt_f64(s.rel_time.sample_std),
                fmt_f64(s.iterations.mean),
                fmt_f64(s.iterations.sample_std),
                fmt_f64(s.seconds.mean),
                fmt_f64(s.seconds.sample_std),
                String::new(),
            ])?;
        }
        for r in &self.rows {
            wr.write_record([
                "instance".to_string(),
                r.instance_id.to_string(),
                r.error_pct.to_string(),
                r.success.to_string(),
                opt(r.iteration),
                opt(r.seconds.map(fmt_f64)),
                opt(r.rel_time.map(fmt_f64)),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                fmt_f64(r.reference_objective),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn summary(&self, error_pct: f64) -> Option<&LevelSummary> {
        self.summaries.iter().find(|s| s.error_pct == error_pct)
    }
}

pub fn thread_count() -> Option<usize> {
    std::env::var("HYPERCONE_THREADS").ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.or_else(thread_count) {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(f))
}

/// Reference values from long, tight dfw runs.
pub fn self_reference(
    instances: &[Vec<f64>],
    cone: &Arc<dyn ConeOracle>,
    config: &DfwConfig,
    threads: Option<usize>,
) -> Result<Vec<ReferenceValue>> {
    with_pool(threads, || {
        instances
            .par_iter()
            .enumerate()
            .map(|(i, x0)| {
                let prog = ConicProgram::projection(x0.clone(), cone.clone())?;
                let start = Instant::now();
                let res = solve(&prog, config)?;
                let seconds = start.elapsed().as_secs_f64();
                let best = res.best.ok_or_else(|| {
                    Error::InvalidArgument(format!("reference run for instance {i} found no feasible iterate"))
                })?;
                Ok(ReferenceValue { instance_id: i, objective: best.objective, seconds })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

/// Reference values from a closed-form projection, when the cone has one.
pub fn closed_form_reference(instances: &[Vec<f64>], cone: &dyn ConeOracle) -> Option<Vec<ReferenceValue>> {
    instances
        .iter()
        .enumerate()
        .map(|(i, x0)| {
            let start = Instant::now();
            let p = cone.closed_form_projection(x0)?;
            let seconds = start.elapsed().as_secs_f64();
            let objective = 0.5 * p.iter().zip(x0).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            Some(ReferenceValue { instance_id: i, objective, seconds })
        })
        .collect()
}

/// First iterate meeting f ≤ f_ref (100 + E)/100 with λ_min ≥ −1e-8.
pub fn first_hit(trace: &SolveTrace, reference: f64, error_pct: f64) -> Option<(usize, f64)> {
    let target = reference * (100.0 + error_pct) / 100.0;
    trace
        .records
        .iter()
        .find(|r| r.lambda_min >= FEASIBILITY_THRESHOLD && r.primal_obj <= target)
        .map(|r| (r.k, r.elapsed_s))
}

/// Runs the solver on every instance and records, per error level, the first
/// iteration and time at which the reference objective is matched.
pub fn run_bench(
    instances: &[Vec<f64>],
    cone_spec: &ConeSpec,
    config: &BenchConfig,
    reference: Option<&[ReferenceValue]>,
) -> Result<ErrorTargetReport> {
    let cone = cone_spec.build()?;
    let references = match reference {
        Some(r) => {
            let mut v = Vec::with_capacity(instances.len());
            for i in 0..instances.len() {
                v.push(
                    r.iter()
                        .find(|x| x.instance_id == i)
                        .cloned()
                        .ok_or_else(|| Error::InvalidArgument(format!("no reference value for instance {i}")))?,
                );
            }
            v
        }
        None => self_reference(instances, &cone, &config.reference_config, config.threads)?,
    };
    let form = match config.solver {
        BenchSolver::Agm { .. } => Some(cone_spec.hyperbolic_form()?.ok_or_else(|| {
            Error::InvalidArgument("the accelerated baseline needs a hyperbolicity cone".into())
        })?),
        BenchSolver::Dfw => None,
    };

    let traces = with_pool(config.threads, || {
        instances
            .par_iter()
            .zip(&references)
            .map(|(x0, rf)| {
                let budget = match config.budget {
                    BudgetRule::ReferenceTime => rf.seconds,
                    BudgetRule::Seconds(s) => s,
                };
                match config.solver {
                    BenchSolver::Dfw => {
                        let prog = ConicProgram::projection(x0.clone(), cone.clone())?;
                        let cd = compute_cd_projection(cone.interior_point(), x0) * config.cd_multiplier;
                        let cfg = DfwConfig {
                            cd: CdChoice::Value(cd),
                            max_seconds: budget.max(1e-9),
                            record_trace: true,
                            ..config.dfw.clone()
                        };
                        Ok(solve(&prog, &cfg)?.trace.unwrap_or_default())
                    }
                    BenchSolver::Agm { mu } => {
                        let mut cfg = AgmConfig::new(mu)?;
                        cfg.max_iters = config.dfw.max_iters;
                        cfg.max_seconds = budget.max(1e-9);
                        cfg.record_trace = true;
                        Ok(agm_baseline(form.as_ref().unwrap(), x0, &cfg)?.trace.unwrap_or_default())
                    }
                }
            })
            .collect::<Result<Vec<SolveTrace>>>()
    })??;

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &level in &config.error_levels {
        let mut rel = Vec::new();
        let mut its = Vec::new();
        let mut secs = Vec::new();
        for (i, (tr, rf)) in traces.iter().zip(&references).enumerate() {
            let hit = first_hit(tr, rf.objective, level);
            let best = tr
                .records
                .iter()
                .filter(|r| r.lambda_min >= FEASIBILITY_THRESHOLD)
                .map(|r| r.primal_obj)
                .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.min(v))));
            let rel_time = hit.map(|(_, t)| if rf.seconds > 0.0 { t / rf.seconds } else { f64::INFINITY });
            if let Some((k, t)) = hit {
                rel.push(rel_time.unwrap());
                its.push(k as f64);
                secs.push(t);
            }
            rows.push(InstanceRow {
                instance_id: i,
                error_pct: level,
                success: hit.is_some(),
                iteration: hit.map(|h| h.0),
                seconds: hit.map(|h| h.1),
                rel_time,
                reference_objective: rf.objective,
                best_objective: best,
            });
        }
        let total = instances.len();
        summaries.push(LevelSummary {
            error_pct: level,
            successes: rel.len(),
            total,
            success_pct: if total == 0 { 0.0 } else { 100.0 * rel.len() as f64 / total as f64 },
            rel_time: Stat::of(&rel),
            iterations: Stat::of(&its),
            seconds: Stat::of(&secs),
        });
    }
    Ok(ErrorTargetReport { summaries, rows, traces, references })
}

/// Benchmarks each c_D multiplier against the same references.
pub fn run_cd_sensitivity(
    instances: &[Vec<f64>],
    cone_spec: &ConeSpec,
    multipliers: &[f64],
    config: &BenchConfig,
    reference: Option<&[ReferenceValue]>,
) -> Result<Vec<(f64, ErrorTargetReport)>> {
    let cone = cone_spec.build()?;
    let refs = match reference {
        Some(r) => r.to_vec(),
        None => match closed_form_reference(instances, cone.as_ref()) {
            Some(r) => r,
            None => self_reference(instances, &cone, &config.reference_config, config.threads)?,
        },
    };
    multipliers
        .iter()
        .map(|&m| {
            let cfg = BenchConfig { cd_multiplier: m, ..config.clone() };
            Ok((m, run_bench(instances, cone_spec, &cfg, Some(&refs))?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub k: usize,
    pub fw_gap: f64,
    pub rel_obj: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Best feasible objective in the trace; None flags a trace without any
    /// feasible iterate, in which case `rel_obj` is empty throughout.
    pub best_feasible: Option<f64>,
}

/// rel_obj_k = (min_{i≤k, feasible} f_i − f̂)/f̂ with f̂ the best feasible
/// value in the trace. When f̂ = 0 the difference is reported unscaled.
pub fn export_convergence(trace: &SolveTrace) -> ConvergenceTable {
    let best = trace
        .records
        .iter()
        .filter(|r| r.lambda_min >= FEASIBILITY_THRESHOLD)
        .map(|r| r.primal_obj)
        .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.min(v))));
    let mut run: Option<f64> = None;
    let rows = trace
        .records
        .iter()
        .map(|r| {
            if r.lambda_min >= FEASIBILITY_THRESHOLD {
                run = Some(run.map_or(r.primal_obj, |a| a.min(r.primal_obj)));
            }
            let rel_obj = match (run, best) {
                (Some(m), Some(b)) if b > 0.0 => Some((m - b) / b),
                (Some(m), Some(b)) => Some(m - b),
                _ => None,
            };
            ConvergenceRow { k: r.k, fw_gap: r.fw_gap, rel_obj }
        })
        .collect();
    ConvergenceTable { rows, best_feasible: best }
}

impl ConvergenceTable {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "fw_gap", "rel_obj"])?;
        for r in &self.rows {
            wr.write_record([r.k.to_string(), fmt_f64(r.fw_gap), opt(r.rel_obj.map(fmt_f64))])?;
        }
        wr.flush()?;
        Ok(())
    }
}
