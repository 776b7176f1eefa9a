//! Dual Frank-Wolfe for min ½⟨x,Qx⟩ + ⟨c,x⟩ s.t. Tx + b ∈ K.
//!
//! The method runs classical Frank-Wolfe on the dual
//! min h(y) = f*(T*y) + ⟨b,y⟩ over {y ∈ K*, ⟨e,y⟩ ≤ c_D}, whose linear
//! subproblem has a closed form in terms of λ_min and a conjugate vector.
//! Primal iterates are recovered as x = ∇f*(T*y).

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::cones::{ConeOracle, ConeSpec};
use crate::error::{check_dim, check_finite, Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// f(x) = ½⟨x,Qx⟩ + ⟨c,x⟩ with Q symmetric positive definite.
#[derive(Clone, Debug)]
pub struct QuadraticObjective {
    q: Option<DMatrix<f64>>,
    c: Vec<f64>,
    chol: Option<Cholesky<f64, Dyn>>,
    eig_min: f64,
    eig_max: f64,
}

impl QuadraticObjective {
    pub fn identity(c: Vec<f64>) -> Result<Self> {
        check_finite(&c, "c")?;
        Ok(Self { q: None, c, chol: None, eig_min: 1.0, eig_max: 1.0 })
    }

    pub fn new(q: DMatrix<f64>, c: Vec<f64>) -> Result<Self> {
        let n = c.len();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: q.nrows() });
        }
        check_finite(&c, "c")?;
        check_finite(q.as_slice(), "Q")?;
        let asym = (&q - q.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::InvalidArgument(format!("Q is not symmetric (deviation {asym:e})")));
        }
        let eig = SymmetricEigen::new(q.clone()).eigenvalues;
        let eig_min = eig.min();
        let eig_max = eig.max();
        if !(eig_min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Q is not positive definite (smallest eigenvalue {eig_min:e})"
            )));
        }
        let chol = Cholesky::new(q.clone())
            .ok_or_else(|| Error::InvalidArgument("Cholesky factorization of Q failed".into()))?;
        Ok(Self { q: Some(q), c, chol: Some(chol), eig_min, eig_max })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn q(&self) -> Option<&DMatrix<f64>> {
        self.q.as_ref()
    }

    /// Strong convexity modulus, the smallest eigenvalue of Q.
    pub fn mu(&self) -> f64 {
        self.eig_min
    }

    pub fn lambda_max_q(&self) -> f64 {
        self.eig_max
    }

    fn q_mul(&self, x: &[f64]) -> Vec<f64> {
        match &self.q {
            None => x.to_vec(),
            Some(q) => (q * DVector::from_column_slice(x)).as_slice().to_vec(),
        }
    }

    fn q_solve(&self, r: &[f64]) -> Vec<f64> {
        match &self.chol {
            None => r.to_vec(),
            Some(ch) => ch.solve(&DVector::from_column_slice(r)).as_slice().to_vec(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, &self.q_mul(x)) + dot(&self.c, x)
    }

    /// ∇f*(s) = Q⁻¹(s − c).
    pub fn conj_grad(&self, s: &[f64]) -> Vec<f64> {
        let r: Vec<f64> = s.iter().zip(&self.c).map(|(a, b)| a - b).collect();
        self.q_solve(&r)
    }

    /// f*(s) = ½⟨s − c, Q⁻¹(s − c)⟩.
    pub fn conj_value(&self, s: &[f64]) -> f64 {
        let r: Vec<f64> = s.iter().zip(&self.c).map(|(a, b)| a - b).collect();
        0.5 * dot(&r, &self.q_solve(&r))
    }

    /// ⟨u, Q⁻¹u⟩.
    fn inv_quad(&self, u: &[f64]) -> f64 {
        dot(u, &self.q_solve(u))
    }
}

/// The linear map T: R^n → R^m.
#[derive(Clone, Debug)]
pub enum LinearMap {
    Identity(usize),
    Dense(DMatrix<f64>),
}

impl LinearMap {
    pub fn rows(&self) -> usize {
        match self {
            LinearMap::Identity(n) => *n,
            LinearMap::Dense(t) => t.nrows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            LinearMap::Identity(n) => *n,
            LinearMap::Dense(t) => t.ncols(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::Identity(_) => x.to_vec(),
            LinearMap::Dense(t) => (t * DVector::from_column_slice(x)).as_slice().to_vec(),
        }
    }

    pub fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::Identity(_) => y.to_vec(),
            LinearMap::Dense(t) => (t.tr_mul(&DVector::from_column_slice(y))).as_slice().to_vec(),
        }
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        match self {
            LinearMap::Identity(_) => 1.0,
            LinearMap::Dense(t) => t.clone().svd(false, false).singular_values.max(),
        }
    }
}

/// min f(x) s.t. Tx + b ∈ K.
#[derive(Clone, Debug)]
pub struct ConicProgram {
    pub objective: QuadraticObjective,
    pub map: LinearMap,
    pub b: Vec<f64>,
    pub cone: Arc<dyn ConeOracle>,
    anchor: Option<Vec<f64>>,
}

impl ConicProgram {
    pub fn new(
        objective: QuadraticObjective,
        map: LinearMap,
        b: Vec<f64>,
        cone: Arc<dyn ConeOracle>,
    ) -> Result<Self> {
        check_dim(objective.dim(), map.cols())?;
        check_dim(cone.dim(), map.rows())?;
        check_dim(cone.dim(), b.len())?;
        check_finite(&b, "b")?;
        Ok(Self { objective, map, b, cone, anchor: None })
    }

    /// Euclidean projection of x0 onto K: Q = I, c = −x0, T = I, b = 0.
    pub fn projection(x0: Vec<f64>, cone: Arc<dyn ConeOracle>) -> Result<Self> {
        let m = cone.dim();
        check_dim(m, x0.len())?;
        check_finite(&x0, "x0")?;
        let objective = QuadraticObjective::identity(x0.iter().map(|v| -v).collect())?;
        Ok(Self { objective, map: LinearMap::Identity(m), b: vec![0.0; m], cone, anchor: Some(x0) })
    }

    /// The projected point, for projection programs.
    pub fn anchor(&self) -> Option<&[f64]> {
        self.anchor.as_deref()
    }

    /// Objective as reported in traces. For projections this is ½‖x − x0‖²,
    /// which differs from f by the constant ½‖x0‖².
    pub fn reported_objective(&self, x: &[f64]) -> f64 {
        match &self.anchor {
            Some(x0) => 0.5 * x.iter().zip(x0).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
            None => self.objective.value(x),
        }
    }

    pub fn primal_objective(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }

    /// h(y) = f*(T*y) + ⟨b, y⟩.
    pub fn dual_objective(&self, y: &[f64]) -> f64 {
        self.objective.conj_value(&self.map.adjoint(y)) + dot(&self.b, y)
    }

    /// x = ∇f*(T*y).
    pub fn recover_primal(&self, y: &[f64]) -> Vec<f64> {
        self.objective.conj_grad(&self.map.adjoint(y))
    }

    /// Tx + b.
    pub fn slack(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.map.apply(x);
        v.iter_mut().zip(&self.b).for_each(|(a, b)| *a += b);
        v
    }

    /// c_D from the closed forms: the projection bound for projections,
    /// otherwise the quadratic bound with ê solving Tê = e and the largest
    /// ε ∈ {1, 1/2, 1/4, ...} making ê/ε feasible.
    pub fn closed_form_cd(&self) -> Result<f64> {
        let e = self.cone.interior_point().to_vec();
        if let Some(x0) = &self.anchor {
            return Ok(compute_cd_projection(&e, x0));
        }
        let e_hat = match &self.map {
            LinearMap::Identity(_) => e.clone(),
            LinearMap::Dense(t) => {
                let svd = t.clone().svd(true, true);
                let sol = svd
                    .solve(&DVector::from_column_slice(&e), 1e-12)
                    .map_err(|m| Error::InvalidArgument(m.to_string()))?;
                let sol = sol.as_slice().to_vec();
                let res: Vec<f64> = self.map.apply(&sol).iter().zip(&e).map(|(a, b)| a - b).collect();
                if norm(&res) > 1e-9 * (1.0 + norm(&e)) {
                    return Err(Error::InvalidArgument(
                        "no closed-form c_D: e is not in the range of T; use auto".into(),
                    ));
                }
                sol
            }
        };
        let mut eps = 1.0;
        for _ in 0..60 {
            let pt: Vec<f64> = e_hat.iter().map(|v| v / eps).collect();
            if self.cone.lambda_min(&self.slack(&pt))? >= 0.0 {
                return compute_cd_quadratic(self, &e_hat, eps);
            }
            eps *= 0.5;
        }
        Err(Error::InvalidArgument("no feasible scaling of ê found; use auto".into()))
    }
}

/// c_D = ‖e‖‖e − x0‖, floored at 1e-12 so that x0 = e stays well defined.
pub fn compute_cd_projection(e: &[f64], x0: &[f64]) -> f64 {
    let d: Vec<f64> = e.iter().zip(x0).map(|(a, b)| a - b).collect();
    (norm(e) * norm(&d)).max(1e-12)
}

/// c_D = ‖ê‖·sqrt((2f(ê/ε) + ⟨c, Q⁻¹c⟩)·λ_max(Q)) for Tê = e and ê/ε feasible.
pub fn compute_cd_quadratic(program: &ConicProgram, e_hat: &[f64], epsilon: f64) -> Result<f64> {
    check_dim(program.objective.dim(), e_hat.len())?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    let pt: Vec<f64> = e_hat.iter().map(|v| v / epsilon).collect();
    let lm = program.cone.lambda_min(&program.slack(&pt))?;
    if lm < 0.0 {
        return Err(Error::InvalidArgument(format!("ê/ε is infeasible (lambda_min = {lm:e})")));
    }
    let obj = &program.objective;
    let c = obj.c();
    let inner = 2.0 * obj.value(&pt) + obj.inv_quad(c);
    Ok(norm(e_hat) * (inner.max(0.0) * obj.lambda_max_q()).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    Diminishing,
    ExactLineSearch,
    /// Lipschitz-constant step; `None` uses ‖T‖²/µ.
    Lipschitz(Option<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CdChoice {
    /// The closed-form bound for the program.
    ClosedForm,
    /// Doubling from 1 until a duality-gap certificate holds.
    Auto,
    Value(f64),
}

#[derive(Clone, Debug)]
pub struct DfwConfig {
    pub cd: CdChoice,
    pub step_rule: StepRule,
    pub fw_gap_tol: f64,
    pub feas_tol: f64,
    pub max_iters: usize,
    pub max_seconds: f64,
    pub record_trace: bool,
    /// Keep every (x_k, y_k) pair in the trace. Memory heavy.
    pub record_iterates: bool,
    /// Relative duality-gap tolerance accepted by the c_D doubling.
    pub certificate_tol: f64,
    pub max_doublings: usize,
}

impl Default for DfwConfig {
    fn default() -> Self {
        Self {
            cd: CdChoice::ClosedForm,
            step_rule: StepRule::ExactLineSearch,
            fw_gap_tol: 1e-6,
            feas_tol: 1e-8,
            max_iters: 100_000,
            max_seconds: f64::INFINITY,
            record_trace: false,
            record_iterates: false,
            certificate_tol: 1e-6,
            max_doublings: 30,
        }
    }
}

impl DfwConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        pos("fw_gap_tol", self.fw_gap_tol)?;
        pos("feas_tol", self.feas_tol)?;
        pos("max_seconds", self.max_seconds)?;
        pos("certificate_tol", self.certificate_tol)?;
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if let CdChoice::Value(v) = self.cd {
            pos("c_D", v)?;
        }
        if let StepRule::Lipschitz(Some(l)) = self.step_rule {
            pos("Lipschitz constant", l)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub k: usize,
    pub fw_gap: f64,
    pub primal_obj: f64,
    pub lambda_min: f64,
    pub alpha: f64,
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    /// (x_k, y_k) per iteration when requested.
    pub iterates: Vec<(Vec<f64>, Vec<f64>)>,
    /// Label written into metadata, e.g. which solver produced the trace.
    pub solver: String,
}

pub const TRACE_HEADER: [&str; 6] = ["k", "fw_gap", "primal_obj", "lambda_min", "alpha", "elapsed_s"];

impl SolveTrace {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(TRACE_HEADER)?;
        for r in &self.records {
            wr.write_record([
                r.k.to_string(),
                fmt_f64(r.fw_gap),
                fmt_f64(r.primal_obj),
                fmt_f64(r.lambda_min),
                fmt_f64(r.alpha),
                fmt_f64(r.elapsed_s),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BestIterate {
    pub iteration: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Reported objective (½‖x − x0‖² for projections).
    pub objective: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    TimeLimit,
    /// The Frank-Wolfe direction stopped decreasing h while the primal
    /// iterate is still infeasible.
    Stalled,
    /// The slice optimum was reached with an infeasible primal iterate, so
    /// c_D is too small. Only reported inside [`auto_cd`].
    SliceTooSmall,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub best: Option<BestIterate>,
    pub x_last: Vec<f64>,
    pub y_last: Vec<f64>,
    pub iterations: usize,
    pub final_gap: f64,
    pub final_lambda_min: f64,
    pub c_d: f64,
    pub elapsed_s: f64,
    pub trace: Option<SolveTrace>,
}

impl SolveResult {
    /// True when the last iterate met both the gap and feasibility tests.
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Solution of the linear subproblem min ⟨v, s⟩ over the compact slice.
#[derive(Clone, Debug, PartialEq)]
pub struct Subproblem {
    pub s: Vec<f64>,
    pub t_opt: f64,
}

/// t_opt = min(0, λ_min(v)); s = 0 if t_opt = 0, else s = c_D ŝ/⟨e, ŝ⟩
/// with ŝ the conjugate vector at v − t_opt e.
pub fn fw_subproblem(cone: &dyn ConeOracle, v: &[f64], c_d: f64) -> Result<Subproblem> {
    let lm = cone.lambda_min(v)?;
    fw_subproblem_at(cone, v, lm, c_d)
}

fn fw_subproblem_at(cone: &dyn ConeOracle, v: &[f64], lambda_min: f64, c_d: f64) -> Result<Subproblem> {
    if !(c_d > 0.0) {
        return Err(Error::InvalidArgument(format!("c_D = {c_d} must be positive")));
    }
    let t_opt = lambda_min.min(0.0);
    if t_opt == 0.0 {
        return Ok(Subproblem { s: vec![0.0; v.len()], t_opt });
    }
    let e = cone.interior_point();
    let z: Vec<f64> = v.iter().zip(e).map(|(a, b)| a - t_opt * b).collect();
    let s_hat = cone.conjugate_vector(&z)?;
    let es = dot(e, &s_hat);
    if !(es > 0.0) {
        return Err(Error::OracleViolation(format!("<e, s> = {es:e} is not positive")));
    }
    let f = c_d / es;
    Ok(Subproblem { s: s_hat.into_iter().map(|a| a * f).collect(), t_opt })
}

/// ⟨−∇h(y), s − y⟩.
pub fn fw_gap(grad_h: &[f64], y: &[f64], s: &[f64]) -> f64 {
    -grad_h.iter().zip(s.iter().zip(y)).map(|(g, (a, b))| g * (a - b)).sum::<f64>()
}

/// Data the line-search rules need beyond ∇h and d.
pub struct CurvatureContext<'a> {
    pub program: &'a ConicProgram,
    /// L = ‖T‖²/µ, used by the Lipschitz rule when no constant was given.
    pub lipschitz: f64,
}

pub fn step_size(rule: StepRule, k: usize, grad_h: &[f64], d: &[f64], ctx: &CurvatureContext) -> f64 {
    match rule {
        StepRule::Diminishing => 2.0 / (k as f64 + 2.0),
        StepRule::ExactLineSearch => {
            let slope = dot(grad_h, d);
            let curv = ctx.program.objective.inv_quad(&ctx.program.map.adjoint(d));
            if curv <= 0.0 {
                return 1.0;
            }
            (-slope / curv).clamp(0.0, 1.0)
        }
        StepRule::Lipschitz(l) => {
            let l = l.unwrap_or(ctx.lipschitz);
            let dd = dot(d, d);
            if dd == 0.0 {
                return 1.0;
            }
            (-dot(grad_h, d) / (l * dd)).clamp(0.0, 1.0)
        }
    }
}

/// Dual Frank-Wolfe over the slice {y ∈ K*, ⟨e, y⟩ ≤ c_D}. `CdChoice::Auto` delegates to
/// [`auto_cd`].
pub fn solve(program: &ConicProgram, config: &DfwConfig) -> Result<SolveResult> {
    config.validate()?;
    let c_d = match config.cd {
        CdChoice::Value(v) => v,
        CdChoice::ClosedForm => program.closed_form_cd()?,
        CdChoice::Auto => return Ok(auto_cd(program, config)?.0),
    };
    solve_with_cd(program, config, c_d, false)
}

fn solve_with_cd(program: &ConicProgram, config: &DfwConfig, c_d: f64, probe: bool) -> Result<SolveResult> {
    let start = Instant::now();
    let m = program.cone.dim();
    let lipschitz = program.map.op_norm().powi(2) / program.objective.mu();
    let ctx = CurvatureContext { program, lipschitz };
    let mut y = vec![0.0; m];
    let mut trace = config.record_trace.then(|| SolveTrace { solver: "dfw".into(), ..Default::default() });
    let mut best: Option<BestIterate> = None;
    let mut status = SolveStatus::IterationLimit;
    let mut x = program.recover_primal(&y);
    let mut gap = f64::INFINITY;
    let mut lm = f64::NEG_INFINITY;
    let mut iterations = 0;

    for k in 0..config.max_iters {
        iterations = k + 1;
        x = program.recover_primal(&y);
        let v = program.slack(&x);
        lm = program.cone.lambda_min(&v).map_err(|e| e.at(k))?;
        let feasible = lm >= -config.feas_tol;
        let obj = program.reported_objective(&x);
        if feasible && best.as_ref().map_or(true, |b| obj < b.objective) {
            best = Some(BestIterate { iteration: k, x: x.clone(), y: y.clone(), objective: obj });
        }
        let sub = fw_subproblem_at(program.cone.as_ref(), &v, lm, c_d).map_err(|e| e.at(k))?;
        let d: Vec<f64> = sub.s.iter().zip(&y).map(|(a, b)| a - b).collect();
        gap = fw_gap(&v, &y, &sub.s);
        let done = gap <= config.fw_gap_tol && feasible;
        let alpha = if done { 0.0 } else { step_size(config.step_rule, k, &v, &d, &ctx) };
        if let Some(t) = trace.as_mut() {
            t.records.push(TraceRecord {
                k,
                fw_gap: gap,
                primal_obj: obj,
                lambda_min: lm,
                alpha,
                elapsed_s: start.elapsed().as_secs_f64(),
            });
            if config.record_iterates {
                t.iterates.push((x.clone(), y.clone()));
            }
        }
        if done {
            status = SolveStatus::Converged;
            break;
        }
        if probe && gap <= config.fw_gap_tol {
            status = SolveStatus::SliceTooSmall;
            break;
        }
        if alpha == 0.0 && config.step_rule == StepRule::ExactLineSearch {
            status = SolveStatus::Stalled;
            break;
        }
        y.iter_mut().zip(&d).for_each(|(yi, di)| *yi += alpha * di);
        if start.elapsed().as_secs_f64() > config.max_seconds {
            status = SolveStatus::TimeLimit;
            break;
        }
    }
    Ok(SolveResult {
        status,
        best,
        x_last: x,
        y_last: y,
        iterations,
        final_gap: gap,
        final_lambda_min: lm,
        c_d,
        elapsed_s: start.elapsed().as_secs_f64(),
        trace,
    })
}

/// |f(x) + h(y)| relative to 1 + |f(x)|. Zero at a primal-dual optimal pair.
pub fn duality_certificate(program: &ConicProgram, x: &[f64], y: &[f64]) -> f64 {
    let f = program.primal_objective(x);
    (f + program.dual_objective(y)).abs() / (1.0 + f.abs())
}

/// Solves with c_D = 1, 2, 4, ... until the best feasible pair carries a
/// duality-gap certificate within `certificate_tol`. Returns the result and
/// the c_D that produced it.
pub fn auto_cd(program: &ConicProgram, config: &DfwConfig) -> Result<(SolveResult, f64)> {
    config.validate()?;
    let mut c_d = 1.0;
    for _ in 0..=config.max_doublings {
        let res = solve_with_cd(program, config, c_d, true)?;
        if let Some(b) = &res.best {
            if duality_certificate(program, &b.x, &b.y) <= config.certificate_tol {
                return Ok((res, c_d));
            }
        }
        c_d *= 2.0;
    }
    Err(Error::CdExhausted { doublings: config.max_doublings, last: c_d / 2.0 })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixJson {
    Named(String),
    Dense(Vec<Vec<f64>>),
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map(|v| v.len()).unwrap_or(0);
    if r == 0 || c == 0 || rows.iter().any(|v| v.len() != c) {
        return Err(Error::InvalidArgument("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn is_identity_name(s: &str) -> Result<()> {
    if s == "identity" {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("unknown matrix keyword {s:?}")))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ObjectiveJson {
    #[serde(rename = "Q")]
    q: MatrixJson,
    c: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProblemJson {
    objective: ObjectiveJson,
    #[serde(rename = "T")]
    t: MatrixJson,
    #[serde(default)]
    b: Option<Vec<f64>>,
    cone: ConeSpec,
}

impl ConicProgram {
    /// Reads the problem file format
    /// `{"objective": {"Q": "identity" | [[..]], "c": [..]}, "T": "identity" | [[..]], "b": [..], "cone": {..}}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let pj: ProblemJson = serde_json::from_str(s)?;
        let cone = pj.cone.build()?;
        let objective = match &pj.objective.q {
            MatrixJson::Named(n) => {
                is_identity_name(n)?;
                QuadraticObjective::identity(pj.objective.c.clone())?
            }
            MatrixJson::Dense(rows) => QuadraticObjective::new(matrix_from_rows(rows)?, pj.objective.c.clone())?,
        };
        let map = match &pj.t {
            MatrixJson::Named(n) => {
                is_identity_name(n)?;
                LinearMap::Identity(objective.dim())
            }
            MatrixJson::Dense(rows) => LinearMap::Dense(matrix_from_rows(rows)?),
        };
        let b = pj.b.unwrap_or_else(|| vec![0.0; cone.dim()]);
        ConicProgram::new(objective, map, b, cone)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{Orthant, PCone};
    use approx::assert_relative_eq;

    #[test]
    fn conj_grad_examples() {
        let obj = QuadraticObjective::identity(vec![-1.0, 2.0]).unwrap();
        assert_eq!(obj.conj_grad(&[0.0, 0.0]), vec![1.0, -2.0]);
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0]));
        let obj = QuadraticObjective::new(q, vec![0.0, 0.0]).unwrap();
        let x = obj.conj_grad(&[2.0, 4.0]);
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn objective_validation() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(QuadraticObjective::new(q, vec![0.0; 2]).is_err());
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(QuadraticObjective::new(q, vec![0.0; 2]).is_err());
    }

    #[test]
    fn subproblem_examples() {
        let k = Orthant::new(2).unwrap();
        let sub = fw_subproblem(&k, &[1.0, -2.0], 3.0).unwrap();
        assert_eq!(sub.t_opt, -2.0);
        assert_eq!(sub.s, vec![0.0, 3.0]);

        let k = PCone::new(2.0, 2).unwrap();
        let sub = fw_subproblem(&k, &[0.0, 3.0, 4.0], 1.0).unwrap();
        assert_relative_eq!(sub.t_opt, -5.0, epsilon = 1e-14);
        assert_relative_eq!(sub.s[0], 1.0, epsilon = 1e-14);
        let z = [5.0, 3.0, 4.0];
        assert!(dot(&sub.s, &z).abs() < 1e-12);
        assert_relative_eq!(sub.s[1], -0.6, epsilon = 1e-14);
        assert_relative_eq!(sub.s[2], -0.8, epsilon = 1e-14);

        let sub = fw_subproblem(&k, &[2.0, 0.0, 1.0], 1.0).unwrap();
        assert_eq!(sub.t_opt, 0.0);
        assert_eq!(sub.s, vec![0.0; 3]);
    }

    #[test]
    fn step_rules() {
        let cone: Arc<dyn ConeOracle> = Arc::new(Orthant::new(2).unwrap());
        let prog = ConicProgram::projection(vec![-1.0, 2.0], cone).unwrap();
        let ctx = CurvatureContext { program: &prog, lipschitz: 1.0 };
        assert_eq!(step_size(StepRule::Diminishing, 0, &[1.0, 0.0], &[1.0, 0.0], &ctx), 1.0);
        assert_eq!(step_size(StepRule::Diminishing, 2, &[1.0, 0.0], &[1.0, 0.0], &ctx), 0.5);
        assert_eq!(step_size(StepRule::ExactLineSearch, 0, &[1.0, 0.0], &[1.0, 0.0], &ctx), 0.0);
        assert_eq!(step_size(StepRule::ExactLineSearch, 0, &[-0.5, 0.0], &[1.0, 0.0], &ctx), 0.5);
        assert_eq!(step_size(StepRule::Lipschitz(Some(2.0)), 0, &[-1.0, 0.0], &[1.0, 0.0], &ctx), 0.5);
    }

    #[test]
    fn cd_examples() {
        assert_relative_eq!(compute_cd_projection(&[1.0, 1.0], &[-1.0, 2.0]), 10f64.sqrt(), epsilon = 1e-14);
        assert_eq!(compute_cd_projection(&[1.0, 1.0], &[1.0, 1.0]), 1e-12);

        let cone: Arc<dyn ConeOracle> = Arc::new(Orthant::new(2).unwrap());
        let x0 = vec![-1.0, 2.0];
        let prog = ConicProgram::projection(x0.clone(), cone.clone()).unwrap();
        let cd = compute_cd_quadratic(&prog, &[1.0, 1.0], 1.0).unwrap();
        let f_e = prog.primal_objective(&[1.0, 1.0]);
        assert_relative_eq!(cd, 2f64.sqrt() * (2.0 * f_e + 5.0).sqrt(), epsilon = 1e-14);
        assert!(cd >= compute_cd_projection(&[1.0, 1.0], &x0));

        let prog = ConicProgram::new(
            QuadraticObjective::identity(vec![0.0; 2]).unwrap(),
            LinearMap::Identity(2),
            vec![0.0; 2],
            cone.clone(),
        )
        .unwrap();
        assert_relative_eq!(compute_cd_quadratic(&prog, &[1.0, 1.0], 1.0).unwrap(), 2.0, epsilon = 1e-14);

        let prog = ConicProgram::new(
            QuadraticObjective::identity(vec![0.0; 2]).unwrap(),
            LinearMap::Identity(2),
            vec![-3.0, 0.0],
            cone,
        )
        .unwrap();
        assert!(compute_cd_quadratic(&prog, &[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn interior_point_converges_immediately() {
        let cone: Arc<dyn ConeOracle> = Arc::new(Orthant::new(3).unwrap());
        let prog = ConicProgram::projection(vec![1.0, 2.0, 0.5], cone).unwrap();
        let res = solve(&prog, &DfwConfig::default()).unwrap();
        assert_eq!(res.iterations, 1);
        assert!(res.converged());
        assert_eq!(res.best.unwrap().x, vec![1.0, 2.0, 0.5]);
    }

    #[test]
    fn problem_json() {
        let s = r#"{"objective":{"Q":"identity","c":[1.0,-2.0]},"T":"identity","b":[0.0,0.0],"cone":{"kind":"orthant","n":2}}"#;
        let p = ConicProgram::from_json(s).unwrap();
        assert_eq!(p.objective.dim(), 2);
        let s = r#"{"objective":{"Q":[[2,0],[0,2]],"c":[1.0,-2.0]},"T":[[1,0],[0,1],[1,1]],"b":[0,0,0],"cone":{"kind":"orthant","n":3}}"#;
        assert!(ConicProgram::from_json(s).is_ok());
        let s = r#"{"objective":{"Q":"eye","c":[1.0]},"T":"identity","cone":{"kind":"orthant","n":1}}"#;
        assert!(ConicProgram::from_json(s).is_err());
    }
}
