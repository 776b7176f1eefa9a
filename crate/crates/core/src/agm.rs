//! Smoothed maximum eigenvalue and a simplified accelerated-gradient
//! projection baseline built on it.

use std::time::Instant;

use serde::Serialize;

use crate::dfw::{compute_cd_projection, SolveTrace, TraceRecord};
use crate::error::{check_dim, Error, Result};
use crate::spectra::HyperbolicForm;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothingConfig {
    pub mu: f64,
    pub cluster_tol: f64,
}

impl SmoothingConfig {
    pub fn new(mu: f64, cluster_tol: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!("mu = {mu} must be positive")));
        }
        if !(cluster_tol > 0.0 && cluster_tol <= 1e-2) {
            return Err(Error::InvalidArgument(format!("cluster_tol = {cluster_tol} outside (0, 1e-2]")));
        }
        Ok(Self { mu, cluster_tol })
    }

    pub fn with_mu(mu: f64) -> Result<Self> {
        Self::new(mu, 1e-6)
    }
}

/// A group of numerically equal eigenvalues and its softmax weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothedGrad {
    pub grad: Vec<f64>,
    pub clusters: Vec<Cluster>,
}

fn clusters_of(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let spread = values[0] - values[values.len() - 1];
    let thr = tol * spread.max(1.0);
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut sum = values[0];
    let mut count = 1;
    for w in values.windows(2) {
        if w[0] - w[1] <= thr {
            sum += w[1];
            count += 1;
        } else {
            out.push((sum / count as f64, count));
            sum = w[1];
            count = 1;
        }
    }
    out.push((sum / count as f64, count));
    out
}

/// ∇f_µ(x) for f_µ(x) = µ log Σ_j m_j exp(λ_j(x)/µ), with the exponents
/// shifted by λ_max.
pub fn smoothed_grad(hp: &HyperbolicForm, x: &[f64], cfg: &SmoothingConfig) -> Result<Vec<f64>> {
    Ok(smoothed_grad_detail(hp, x, cfg, true)?.grad)
}

/// Same as [`smoothed_grad`] with the clusters exposed. `shift = false`
/// evaluates exp(λ_j/µ) directly and can overflow.
pub fn smoothed_grad_detail(
    hp: &HyperbolicForm,
    x: &[f64],
    cfg: &SmoothingConfig,
    shift: bool,
) -> Result<SmoothedGrad> {
    check_dim(hp.dim(), x.len())?;
    let values = hp.eigenvalues(x)?.values;
    match smoothed_grad_clustered(hp, x, &values, cfg, cfg.cluster_tol, shift) {
        Err(Error::Smoothing(_)) => {
            smoothed_grad_clustered(hp, x, &values, cfg, (cfg.cluster_tol * 10.0).min(1e-2), shift)
        }
        other => other,
    }
}

fn smoothed_grad_clustered(
    hp: &HyperbolicForm,
    x: &[f64],
    values: &[f64],
    cfg: &SmoothingConfig,
    tol: f64,
    shift: bool,
) -> Result<SmoothedGrad> {
    let e = hp.e();
    let groups = clusters_of(values, tol);
    let top = if shift { values[0] } else { 0.0 };
    let raw: Vec<f64> = groups.iter().map(|&(l, m)| m as f64 * ((l - top) / cfg.mu).exp()).collect();
    let total: f64 = raw.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Smoothing(format!("weight sum {total} is not usable")));
    }
    let mut grad = vec![0.0; x.len()];
    let mut clusters = Vec::with_capacity(groups.len());
    for (&(lam, m), &r) in groups.iter().zip(&raw) {
        let weight = r / total;
        clusters.push(Cluster { value: lam, multiplicity: m, weight });
        if weight == 0.0 {
            continue;
        }
        let w: Vec<f64> = x.iter().zip(e).map(|(a, b)| a - lam * b).collect();
        let coeffs = hp.poly().restriction_coeffs(e, &w)?;
        let cm = coeffs[m];
        let size: f64 = coeffs.iter().map(|c| c.abs()).sum();
        if cm.abs() <= 1e-12 * size {
            return Err(Error::Smoothing(format!(
                "derivative of order {m} vanishes at eigenvalue {lam:e}; multiplicity misclassified"
            )));
        }
        // ∇p^{(m-1)} / p^{(m)} = ∇c_{m-1} / (m c_m)
        let g = hp.poly().restriction_coeff_grad(e, &w, m - 1)?;
        let f = weight / (m as f64 * cm);
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a += f * b);
    }
    Ok(SmoothedGrad { grad, clusters })
}

/// f_µ(x) = µ log Σ_i exp(λ_i(x)/µ), evaluated stably.
pub fn smoothed_max(hp: &HyperbolicForm, x: &[f64], mu: f64) -> Result<f64> {
    Ok(log_sum_exp(&hp.eigenvalues(x)?.values, mu))
}

fn log_sum_exp(values: &[f64], mu: f64) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + mu * values.iter().map(|l| ((l - top) / mu).exp()).sum::<f64>().ln()
}

#[derive(Clone, Debug)]
pub struct AgmConfig {
    pub smoothing: SmoothingConfig,
    pub max_iters: usize,
    pub max_seconds: f64,
    pub record_trace: bool,
    /// Weight of the smoothed infeasibility penalty. Defaults to twice the
    /// projection c_D, which bounds the constraint multiplier.
    pub penalty: Option<f64>,
}

impl AgmConfig {
    pub fn new(mu: f64) -> Result<Self> {
        Ok(Self {
            smoothing: SmoothingConfig::with_mu(mu)?,
            max_iters: 5000,
            max_seconds: f64::INFINITY,
            record_trace: false,
            penalty: None,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AgmResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub elapsed_s: f64,
    pub label: &'static str,
    #[serde(skip)]
    pub trace: Option<SolveTrace>,
}

struct Penalized<'a> {
    hp: &'a HyperbolicForm,
    x0: &'a [f64],
    rho: f64,
    smoothing: SmoothingConfig,
}

impl Penalized<'_> {
    // g(x) = f_µ(−x) ≈ −λ_min(x); P(x) = µ log(1 + exp(g/µ)) ≈ max(0, −λ_min(x))
    fn value(&self, x: &[f64]) -> Result<f64> {
        let mu = self.smoothing.mu;
        let neg: Vec<f64> = self.hp.eigenvalues(x)?.values.iter().map(|l| -l).collect();
        let g = log_sum_exp(&neg, mu);
        let pen = g.max(0.0) + mu * (-(g.abs() / mu)).exp().ln_1p();
        Ok(0.5 * dist_sq(x, self.x0) + self.rho * pen)
    }

    fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mu = self.smoothing.mu;
        let neg_x: Vec<f64> = x.iter().map(|v| -v).collect();
        let neg: Vec<f64> = self.hp.eigenvalues(x)?.values.iter().map(|l| -l).collect();
        let g = log_sum_exp(&neg, mu);
        let sig = 1.0 / (1.0 + (-g / mu).exp());
        let dg = smoothed_grad(self.hp, &neg_x, &self.smoothing)?;
        Ok(x.iter()
            .zip(self.x0)
            .zip(&dg)
            .map(|((a, b), d)| a - b - self.rho * sig * d)
            .collect())
    }
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Simplified accelerated baseline for projecting x0 onto Λ(p, e).
///
/// Each iteration runs one step of each of two sub-methods in turn:
/// an accelerated gradient step with backtracking on
/// ½‖x − x0‖² + ρ·softplus_µ(f_µ(−x)), and a radial restoration
/// x + max(0, −λ_min(x)) e that yields a feasible candidate. Momentum is
/// restarted when the penalized objective increases. The best restored
/// candidate is returned.
pub fn agm_baseline(hp: &HyperbolicForm, x0: &[f64], cfg: &AgmConfig) -> Result<AgmResult> {
    check_dim(hp.dim(), x0.len())?;
    let start = Instant::now();
    let mut trace = cfg.record_trace.then(|| SolveTrace { solver: "agm (simplified)".into(), ..Default::default() });
    let e = hp.e();
    if hp.lambda_min(x0)? >= 0.0 {
        if let Some(t) = trace.as_mut() {
            t.records.push(TraceRecord {
                k: 0,
                fw_gap: f64::NAN,
                primal_obj: 0.0,
                lambda_min: hp.lambda_min(x0)?,
                alpha: 0.0,
                elapsed_s: start.elapsed().as_secs_f64(),
            });
        }
        return Ok(AgmResult {
            x: x0.to_vec(),
            objective: 0.0,
            iterations: 0,
            elapsed_s: start.elapsed().as_secs_f64(),
            label: "simplified",
            trace,
        });
    }
    let rho = cfg.penalty.unwrap_or_else(|| 2.0 * compute_cd_projection(e, x0).max(1.0));
    let prob = Penalized { hp, x0, rho, smoothing: cfg.smoothing };

    let restore = |x: &[f64]| -> Result<(Vec<f64>, f64)> {
        let lm = hp.lambda_min(x)?;
        let s = (-lm).max(0.0);
        let xr: Vec<f64> = x.iter().zip(e).map(|(a, b)| a + s * b).collect();
        Ok((xr, lm + s))
    };

    let (mut best_x, _) = restore(x0)?;
    let mut best_obj = 0.5 * dist_sq(&best_x, x0);
    let mut x = x0.to_vec();
    let mut phi_x = prob.value(&x)?;
    let mut yv = x.clone();
    let mut t = 1.0f64;
    let mut lip = 1.0f64;
    let mut iterations = 0;
    for k in 0..cfg.max_iters {
        iterations = k + 1;
        let gy = prob.grad(&yv)?;
        let phi_y = prob.value(&yv)?;
        let gn2: f64 = gy.iter().map(|v| v * v).sum();
        let mut x_new;
        let mut phi_new;
        loop {
            x_new = yv.iter().zip(&gy).map(|(a, g)| a - g / lip).collect::<Vec<_>>();
            phi_new = prob.value(&x_new)?;
            if phi_new <= phi_y - 0.5 * gn2 / lip + 1e-15 * phi_y.abs() || lip > 1e16 {
                break;
            }
            lip *= 2.0;
        }
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if phi_new > phi_x {
            // restart: discard momentum, keep the better point
            t = 1.0;
            yv = x.clone();
        } else {
            let beta = (t - 1.0) / t_new;
            yv = x_new.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
            x = x_new;
            phi_x = phi_new;
            t = t_new;
        }
        lip = (lip * 0.9).max(1.0);

        let (xr, lm) = restore(&x)?;
        let obj = 0.5 * dist_sq(&xr, x0);
        if obj < best_obj {
            best_obj = obj;
            best_x = xr;
        }
        if let Some(tr) = trace.as_mut() {
            tr.records.push(TraceRecord {
                k,
                fw_gap: f64::NAN,
                primal_obj: obj,
                lambda_min: lm,
                alpha: 1.0 / lip,
                elapsed_s: start.elapsed().as_secs_f64(),
            });
        }
        if gn2.sqrt() <= 1e-12 || start.elapsed().as_secs_f64() > cfg.max_seconds {
            break;
        }
    }
    Ok(AgmResult {
        x: best_x,
        objective: best_obj,
        iterations,
        elapsed_s: start.elapsed().as_secs_f64(),
        label: "simplified",
        trace,
    })
}
