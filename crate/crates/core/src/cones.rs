//! Cone oracles: minimum eigenvalue and a unit conjugate vector at boundary
//! points. Frank-Wolfe needs nothing else from a cone.

use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::polyform::PolynomialForm;
use crate::spectra::{multiplicity_of_zero, HyperbolicForm, SpectraTolerances};

/// Relative slack for deciding that a point lies on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-6;

pub trait ConeOracle: Send + Sync + Debug {
    fn dim(&self) -> usize;

    /// The direction e; it lies in the interior.
    fn interior_point(&self) -> &[f64];

    fn lambda_min(&self, x: &[f64]) -> Result<f64>;

    /// A unit vector s in the dual cone with <s, z> = 0, for z on the boundary.
    fn conjugate_vector(&self, z: &[f64]) -> Result<Vec<f64>>;

    /// Minimum eigenvalue for the dual cone, when the dual has a cheap
    /// description. Nonnegative exactly on the dual cone.
    fn dual_lambda_min(&self, _y: &[f64]) -> Option<f64> {
        None
    }

    /// Euclidean projection when a closed form exists.
    fn closed_form_projection(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn label(&self) -> String;
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let n = norm(&v);
    if !(n > 0.0 && n.is_finite()) {
        return None;
    }
    v.iter_mut().for_each(|a| *a /= n);
    Some(v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateVector {
    pub vector: Vec<f64>,
    /// Derivative order r' such that the vector is the normalized gradient
    /// of p^{(r'-1)}.
    pub order: usize,
    /// Numerical multiplicity of the zero eigenvalue.
    pub multiplicity: usize,
    /// Set when no eigenvalue passed the zero test and r was raised to 1.
    pub clamped: bool,
}

/// The hyperbolicity cone Λ(p, e).
#[derive(Clone, Debug)]
pub struct HyperbolicityCone {
    form: HyperbolicForm,
}

impl HyperbolicityCone {
    pub fn new(form: HyperbolicForm) -> Result<Self> {
        Ok(Self { form })
    }

    pub fn from_poly(poly: PolynomialForm, e: Vec<f64>) -> Result<Self> {
        Self::new(HyperbolicForm::new(poly, e)?)
    }

    pub fn form(&self) -> &HyperbolicForm {
        &self.form
    }

    /// Candidates are the normalized gradients of p^{(r'-1)} at z for
    /// r' = 1..=r+1. Each should be a supporting normal; the one closest to
    /// complementarity with z wins. An eigenvalue counted into the
    /// multiplicity although it is not zero, or a zero eigenvalue missed by
    /// the count, then only costs an extra gradient evaluation.
    pub fn conjugate_detail(&self, z: &[f64]) -> Result<ConjugateVector> {
        check_dim(self.dim(), z.len())?;
        check_finite(z, "z")?;
        let spec = self.form.eigenvalues(z)?;
        let lm = spec.lambda_min();
        if lm.abs() > BOUNDARY_TOL * (1.0 + norm(z)) {
            return Err(Error::NotOnBoundary { lambda_min: lm });
        }
        let d = self.form.degree();
        let mut r = multiplicity_of_zero(&spec.values, self.form.tolerances().zero_mult_tol);
        let clamped = r == 0;
        if clamped {
            log::debug!("no zero eigenvalue at tolerance; lambda_min = {lm:e}, using r = 1");
            r = 1;
        }
        match self.pick_candidate(z, 1..=(r + 1).min(d))? {
            Some((vector, order)) => Ok(ConjugateVector { vector, order, multiplicity: r, clamped }),
            None => Err(Error::ConjugateFailure(format!(
                "all derivative gradients up to order {} vanish at z",
                (r + 1).min(d)
            ))),
        }
    }

    fn pick_candidate(&self, z: &[f64], orders: std::ops::RangeInclusive<usize>) -> Result<Option<(Vec<f64>, usize)>> {
        let e = self.form.e();
        let sign = self.form.p_at_e().signum();
        let mut best: Option<(f64, Vec<f64>, usize)> = None;
        for order in orders {
            let g = self.form.poly().restriction_coeff_grad(e, z, order - 1)?;
            let Some(s) = normalize(g.into_iter().map(|v| v * sign).collect()) else {
                continue;
            };
            let es = dot(e, &s);
            if !(es > 1e-12) {
                continue;
            }
            let score = (dot(&s, z) / es).abs();
            if best.as_ref().map_or(true, |b| score < b.0) {
                best = Some((score, s, order));
            }
        }
        Ok(best.map(|(_, s, o)| (s, o)))
    }
}

impl ConeOracle for HyperbolicityCone {
    fn dim(&self) -> usize {
        self.form.dim()
    }

    fn interior_point(&self) -> &[f64] {
        self.form.e()
    }

    fn lambda_min(&self, x: &[f64]) -> Result<f64> {
        self.form.lambda_min(x)
    }

    fn conjugate_vector(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.conjugate_detail(z)?.vector)
    }

    fn label(&self) -> String {
        format!("hyperbolicity(n={}, d={})", self.dim(), self.form.degree())
    }
}

/// The k-th derivative relaxation of the nonnegative orthant in R^n, the
/// hyperbolicity cone of σ_{n,n-k} with e the all-ones vector.
pub fn derivative_relaxation(n: usize, k: usize) -> Result<HyperbolicityCone> {
    if k >= n {
        return Err(Error::InvalidArgument(format!("relaxation order k = {k} must be below n = {n}")));
    }
    HyperbolicityCone::from_poly(PolynomialForm::elesym(n, n - k)?, vec![1.0; n])
}

/// {(x_0, x̄) : x_0 >= ||x̄||_p} in R^{n+1}, with e = (1, 0, ..., 0).
#[derive(Clone, Debug)]
pub struct PCone {
    p: f64,
    n: usize,
    e: Vec<f64>,
}

/// ||v||_p computed on v / max|v_i| to avoid overflow.
pub fn p_norm(v: &[f64], p: f64) -> f64 {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

impl PCone {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p = {p} must be a finite number above 1")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let mut e = vec![0.0; n + 1];
        e[0] = 1.0;
        Ok(Self { p, n, e })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent p / (p - 1).
    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl ConeOracle for PCone {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn interior_point(&self) -> &[f64] {
        &self.e
    }

    fn lambda_min(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(x[0] - p_norm(&x[1..], self.p))
    }

    fn conjugate_vector(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), z.len())?;
        check_finite(z, "z")?;
        let m = z.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m == 0.0 {
            return Ok(self.e.clone());
        }
        let tail = p_norm(&z[1..], self.p);
        if (z[0] - tail).abs() > BOUNDARY_TOL * z[0].abs().max(tail) {
            return Err(Error::NotOnBoundary { lambda_min: z[0] - tail });
        }
        let pm1 = self.p - 1.0;
        let mut s = Vec::with_capacity(z.len());
        s.push((z[0].max(0.0) / m).powf(pm1));
        s.extend(z[1..].iter().map(|&v| -v.signum() * (v.abs() / m).powf(pm1)));
        normalize(s).ok_or_else(|| Error::ConjugateFailure("degenerate p-cone conjugate".into()))
    }

    fn dual_lambda_min(&self, y: &[f64]) -> Option<f64> {
        Some(y[0] - p_norm(&y[1..], self.q()))
    }

    fn label(&self) -> String {
        format!("pcone(p={}, n={})", self.p, self.n)
    }
}

/// The nonnegative orthant with e the all-ones vector.
#[derive(Clone, Debug)]
pub struct Orthant {
    e: Vec<f64>,
}

impl Orthant {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        Ok(Self { e: vec![1.0; n] })
    }
}

impl ConeOracle for Orthant {
    fn dim(&self) -> usize {
        self.e.len()
    }

    fn interior_point(&self) -> &[f64] {
        &self.e
    }

    fn lambda_min(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(x.iter().copied().fold(f64::INFINITY, f64::min))
    }

    fn conjugate_vector(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), z.len())?;
        check_finite(z, "z")?;
        let (idx, min) = z
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        if min.abs() > BOUNDARY_TOL * (1.0 + norm(z)) {
            return Err(Error::NotOnBoundary { lambda_min: min });
        }
        let mut s = vec![0.0; z.len()];
        s[idx] = 1.0;
        Ok(s)
    }

    fn dual_lambda_min(&self, y: &[f64]) -> Option<f64> {
        Some(y.iter().copied().fold(f64::INFINITY, f64::min))
    }

    fn closed_form_projection(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().map(|v| v.max(0.0)).collect())
    }

    fn label(&self) -> String {
        format!("orthant(n={})", self.dim())
    }
}

/// Serialized cone description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeSpec {
    Hyperbolicity {
        poly: PolynomialForm,
        e: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerances: Option<SpectraTolerances>,
    },
    Pcone { p: f64, n: usize },
    Orthant { n: usize },
    DerivativeOrthant { n: usize, k: usize },
}

impl ConeSpec {
    pub fn build(&self) -> Result<Arc<dyn ConeOracle>> {
        Ok(match self {
            ConeSpec::Hyperbolicity { poly, e, tolerances } => {
                let form = HyperbolicForm::with_tolerances(
                    poly.clone(),
                    e.clone(),
                    tolerances.unwrap_or_default(),
                )?;
                Arc::new(HyperbolicityCone::new(form)?)
            }
            ConeSpec::Pcone { p, n } => Arc::new(PCone::new(*p, *n)?),
            ConeSpec::Orthant { n } => Arc::new(Orthant::new(*n)?),
            ConeSpec::DerivativeOrthant { n, k } => Arc::new(derivative_relaxation(*n, *k)?),
        })
    }

    /// The hyperbolic form behind the cone, for specs that have one.
    pub fn hyperbolic_form(&self) -> Result<Option<HyperbolicForm>> {
        Ok(match self {
            ConeSpec::Hyperbolicity { poly, e, tolerances } => Some(HyperbolicForm::with_tolerances(
                poly.clone(),
                e.clone(),
                tolerances.unwrap_or_default(),
            )?),
            ConeSpec::DerivativeOrthant { n, k } => {
                if k >= n {
                    return Err(Error::InvalidArgument(format!("k = {k} must be below n = {n}")));
                }
                Some(HyperbolicForm::new(PolynomialForm::elesym(*n, n - k)?, vec![1.0; *n])?)
            }
            ConeSpec::Orthant { n } => {
                Some(HyperbolicForm::new(PolynomialForm::coordinate_product(*n)?, vec![1.0; *n])?)
            }
            ConeSpec::Pcone { .. } => None,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeSpec::Hyperbolicity { e, .. } => e.len(),
            ConeSpec::Pcone { n, .. } => n + 1,
            ConeSpec::Orthant { n } | ConeSpec::DerivativeOrthant { n, .. } => *n,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A hyperbolic form the caller asserts to be isometric, which makes the
/// spectral projection formula valid.
#[derive(Clone, Debug)]
pub struct IsometricForm(HyperbolicForm);

impl IsometricForm {
    pub fn assume_isometric(form: HyperbolicForm) -> Self {
        Self(form)
    }

    pub fn form(&self) -> &HyperbolicForm {
        &self.0
    }

    /// Σ max(λ_i, 0) ∇λ_i(x). Every eigenvalue that is positive must be
    /// simple; nonpositive eigenvalues do not contribute and may repeat.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        let hp = &self.0;
        let spec = hp.eigenvalues(x)?;
        let lam = &spec.values;
        if spec.lambda_min() >= 0.0 {
            return Ok(x.to_vec());
        }
        let spread = (spec.lambda_max() - spec.lambda_min()).max(f64::MIN_POSITIVE);
        let e = hp.e();
        let mut out = vec![0.0; x.len()];
        for (i, &li) in lam.iter().enumerate() {
            if li <= 0.0 {
                continue;
            }
            let gap = lam
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &lj)| (li - lj).abs())
                .fold(f64::INFINITY, f64::min);
            if gap <= 1e-8 * spread {
                return Err(Error::RepeatedEigenvalues { gap });
            }
            let w: Vec<f64> = x.iter().zip(e).map(|(a, b)| a - li * b).collect();
            let g = hp.poly().grad(&w)?;
            let dp = dot(&g, e);
            for (o, gi) in out.iter_mut().zip(&g) {
                *o += li * gi / dp;
            }
        }
        Ok(out)
    }

    /// sqrt(Σ min(λ_i, 0)^2).
    pub fn dist(&self, x: &[f64]) -> Result<f64> {
        let spec = self.0.eigenvalues(x)?;
        Ok(spec.values.iter().map(|l| l.min(0.0).powi(2)).sum::<f64>().sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pcone_basics() {
        let k = PCone::new(3.0, 2).unwrap();
        assert_relative_eq!(k.lambda_min(&[2.0, 1.0, 1.0]).unwrap(), 2.0 - 2f64.powf(1.0 / 3.0), epsilon = 1e-14);
        assert!(PCone::new(1.0, 2).is_err());
        assert!(PCone::new(2.0, 0).is_err());
        let s = k.conjugate_vector(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s, vec![1.0, 0.0, 0.0]);
        assert!(matches!(k.conjugate_vector(&[1.0, 0.0, 0.0]), Err(Error::NotOnBoundary { .. })));
        let z = [2f64.powf(1.0 / 3.0), 1.0, -1.0];
        let s = k.conjugate_vector(&z).unwrap();
        assert!(dot(&s, &z).abs() < 1e-12);
        assert!(k.dual_lambda_min(&s).unwrap() > -1e-12);
    }

    #[test]
    fn orthant_basics() {
        let k = Orthant::new(3).unwrap();
        assert_eq!(k.lambda_min(&[3.0, -1.0, 2.0]).unwrap(), -1.0);
        assert_eq!(k.conjugate_vector(&[0.0, 2.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(k.conjugate_vector(&[1.0, 2.0, 3.0]).is_err());
        assert_eq!(k.closed_form_projection(&[-1.0, 2.0, 0.5]).unwrap(), vec![0.0, 2.0, 0.5]);
    }

    #[test]
    fn hyperbolic_conjugate_of_orthant_boundary() {
        let k = HyperbolicityCone::from_poly(PolynomialForm::coordinate_product(3).unwrap(), vec![1.0; 3]).unwrap();
        let c = k.conjugate_detail(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(c.multiplicity, 1);
        assert_relative_eq!(c.vector[0], 1.0, epsilon = 1e-14);
        let c = k.conjugate_detail(&[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(c.multiplicity, 2);
        assert_eq!(c.order, 2);
        assert!(dot(&c.vector, &[0.0, 0.0, 2.0]).abs() < 1e-14);
        assert!(matches!(k.conjugate_detail(&[1.0, 1.0, 1.0]), Err(Error::NotOnBoundary { .. })));
    }

    #[test]
    fn cone_spec_json() {
        let s = r#"{"kind":"pcone","p":1.5,"n":4}"#;
        assert_eq!(ConeSpec::from_json(s).unwrap().build().unwrap().dim(), 5);
        let s = r#"{"kind":"hyperbolicity","poly":{"elesym":{"n":4,"k":2}},"e":[1,1,1,1]}"#;
        assert_eq!(ConeSpec::from_json(s).unwrap().build().unwrap().dim(), 4);
        let s = r#"{"kind":"derivative_orthant","n":4,"k":1}"#;
        assert_eq!(ConeSpec::from_json(s).unwrap().dim(), 4);
        assert!(ConeSpec::from_json(r#"{"kind":"derivative_orthant","n":4,"k":4}"#).unwrap().build().is_err());
    }
}
