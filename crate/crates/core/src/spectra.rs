//! Eigenvalues of hyperbolic polynomials: the roots of t -> p(x - t e).

use std::sync::Arc;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::polyform::{PolyBody, PolynomialForm};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraTolerances {
    pub zero_mult_tol: f64,
    pub imag_tol: f64,
}

impl Default for SpectraTolerances {
    fn default() -> Self {
        Self { zero_mult_tol: 1e-6, imag_tol: 1e-6 }
    }
}

impl SpectraTolerances {
    pub fn new(zero_mult_tol: f64, imag_tol: f64) -> Result<Self> {
        for (name, v) in [("zero_mult_tol", zero_mult_tol), ("imag_tol", imag_tol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::InvalidArgument(format!("{name} = {v} outside (0, 1e-2]")));
            }
        }
        Ok(Self { zero_mult_tol, imag_tol })
    }
}

/// Eigenvalues sorted in descending order, together with the factor the
/// input was divided by before root finding (1 when no rescaling happened).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSpectrum {
    pub values: Vec<f64>,
    pub scale_used: f64,
}

impl EigenSpectrum {
    pub fn lambda_max(&self) -> f64 {
        self.values[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

/// A polynomial paired with a direction e at which it does not vanish.
/// Hyperbolicity itself is assumed; a failure to find real roots is reported
/// when it shows up.
#[derive(Clone, Debug)]
pub struct HyperbolicForm {
    poly: Arc<PolynomialForm>,
    e: Vec<f64>,
    p_e: f64,
    grad_e: Vec<f64>,
    tolerances: SpectraTolerances,
}

impl HyperbolicForm {
    pub fn new(poly: PolynomialForm, e: Vec<f64>) -> Result<Self> {
        Self::with_tolerances(poly, e, SpectraTolerances::default())
    }

    pub fn with_tolerances(
        poly: PolynomialForm,
        e: Vec<f64>,
        tolerances: SpectraTolerances,
    ) -> Result<Self> {
        check_dim(poly.n(), e.len())?;
        check_finite(&e, "e")?;
        let p_e = poly.eval(&e)?;
        if p_e == 0.0 || !p_e.is_finite() {
            return Err(Error::ZeroAtDirection);
        }
        let grad_e = poly.grad(&e)?;
        Ok(Self { poly: Arc::new(poly), e, p_e, grad_e, tolerances })
    }

    pub fn poly(&self) -> &PolynomialForm {
        &self.poly
    }

    pub fn e(&self) -> &[f64] {
        &self.e
    }

    pub fn p_at_e(&self) -> f64 {
        self.p_e
    }

    pub fn dim(&self) -> usize {
        self.e.len()
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn tolerances(&self) -> SpectraTolerances {
        self.tolerances
    }

    pub fn eigenvalues(&self, x: &[f64]) -> Result<EigenSpectrum> {
        check_dim(self.dim(), x.len())?;
        check_finite(x, "x")?;
        if let Some(values) = self.closed_form_eigenvalues(x) {
            return Ok(EigenSpectrum { values, scale_used: 1.0 });
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = if norm > 1.0 { norm } else { 1.0 };
        let xs: Vec<f64> = x.iter().map(|v| v / scale).collect();
        let mean = self.grad_e.iter().zip(&xs).map(|(g, v)| g * v).sum::<f64>()
            / (self.degree() as f64 * self.p_e);
        let (mut values, shift) = match self.negated_roots(&xs, mean) {
            Ok(v) => (v, mean),
            Err(_) => (self.negated_roots(&xs, 0.0)?, 0.0),
        };
        // Solve again centered on the smallest eigenvalue and keep, for each
        // eigenvalue, the solve whose center is nearer.
        sort_desc(&mut values);
        let low = values[values.len() - 1];
        if low != shift {
            match self.negated_roots(&xs, low) {
                Ok(mut v) => {
                    sort_desc(&mut v);
                    for (a, b) in values.iter_mut().zip(&v) {
                        if (*b - low).abs() < (*b - shift).abs() {
                            *a = *b;
                        }
                    }
                }
                Err(e) => log::debug!("recentered solve failed: {e}"),
            }
        }
        values.iter_mut().for_each(|v| *v *= scale);
        sort_desc(&mut values);
        Ok(EigenSpectrum { values, scale_used: scale })
    }

    /// Roots of t ↦ p(x − shift·e + t e), negated and shifted back.
    fn negated_roots(&self, x: &[f64], shift: f64) -> Result<Vec<f64>> {
        let xs: Vec<f64> = x.iter().zip(&self.e).map(|(v, e)| v - shift * e).collect();
        let coeffs = self.poly.restriction_coeffs(&self.e, &xs)?;
        Ok(real_roots(&coeffs, self.tolerances.imag_tol)?.into_iter().map(|r| shift - r).collect())
    }

    fn closed_form_eigenvalues(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut values: Vec<f64> = match self.poly.body() {
            PolyBody::LinearFactors(fs) => fs
                .iter()
                .map(|a| {
                    let v: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                    let w: f64 = a.iter().zip(&self.e).map(|(p, q)| p * q).sum();
                    v / w
                })
                .collect(),
            PolyBody::EleSym { k } if *k == self.dim() => {
                let a = self.e[0];
                if !self.e.iter().all(|&v| v == a) {
                    return None;
                }
                x.iter().map(|v| v / a).collect()
            }
            _ => return None,
        };
        sort_desc(&mut values);
        Some(values)
    }

    pub fn lambda_min(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eigenvalues(x)?.lambda_min())
    }

    /// Number of eigenvalues within `tol * max(1, |λ_1|, |λ_d|)` of zero.
    pub fn multiplicity_zero(&self, x: &[f64], tol: f64) -> Result<usize> {
        Ok(multiplicity_of_zero(&self.eigenvalues(x)?.values, tol))
    }
}

pub fn multiplicity_of_zero(values: &[f64], tol: f64) -> usize {
    let first = values.first().copied().unwrap_or(0.0).abs();
    let last = values.last().copied().unwrap_or(0.0).abs();
    let thr = tol * first.max(last).max(1.0);
    values.iter().filter(|v| v.abs() <= thr).count()
}

fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
}

/// Complex roots of c_0 + c_1 t + ... + c_d t^d from the eigenvalues of a
/// balanced companion matrix.
pub fn poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    check_finite(coeffs, "coefficients")?;
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("empty coefficient vector".into()));
    }
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if coeffs[d] == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let zeros = coeffs.iter().take_while(|&&c| c == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let c = &coeffs[zeros..];
    let m = c.len() - 1;
    if m == 0 {
        return Ok(roots);
    }
    if m == 1 {
        roots.push(Complex64::new(-c[0] / c[1], 0.0));
        return Ok(roots);
    }
    let big = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let lead = c[m] / big;
    let mut comp = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        comp[(0, j)] = -(c[m - 1 - j] / big) / lead;
    }
    for i in 1..m {
        comp[(i, i - 1)] = 1.0;
    }
    balance(&mut comp);
    let schur = Schur::try_new(comp, f64::EPSILON, 100 * m.max(10))
        .ok_or_else(|| Error::RootFinder(coeffs.to_vec()))?;
    roots.extend(schur.complex_eigenvalues().iter().copied());
    Ok(roots)
}

/// Parlett-Reinsch diagonal similarity with radix 2.
fn balance(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

fn horner(c: &[f64], t: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &ci in c.iter().rev() {
        dp = dp * t + p;
        p = p * t + ci;
    }
    (p, dp)
}

fn derivative_coeffs(c: &[f64], r: usize) -> Vec<f64> {
    (r..c.len())
        .map(|i| c[i] * ((i - r + 1)..=i).map(|v| v as f64).product::<f64>())
        .collect()
}

/// Newton's method on `c` from `t0`; each step must reduce |c(t)|.
fn newton_polish(c: &[f64], t0: f64, max_iter: usize) -> f64 {
    let mut t = t0;
    let (mut pv, mut dv) = horner(c, t);
    for _ in 0..max_iter {
        if pv == 0.0 || dv == 0.0 || !dv.is_finite() {
            break;
        }
        let cand = t - pv / dv;
        let (pc, dc) = horner(c, cand);
        if !(pc.abs() < pv.abs()) {
            break;
        }
        t = cand;
        pv = pc;
        dv = dc;
    }
    t
}

/// Real roots of a polynomial that is expected to be real-rooted, with
/// multiplicities. Companion eigenvalues that scatter around a multiple
/// root are grouped and replaced by the corresponding root of the
/// (m-1)-th derivative.
pub fn real_roots(coeffs: &[f64], imag_tol: f64) -> Result<Vec<f64>> {
    let approx = poly_roots(coeffs)?;
    let d = approx.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let scale = approx.iter().fold(1.0f64, |a, z| a.max(z.norm()));
    let base = 1e-6 * scale;

    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let nx = p[j];
            p[j] = r;
            j = nx;
        }
        r
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let thr = 2.5 * approx[i].im.abs().max(approx[j].im.abs()) + base;
            if (approx[i] - approx[j]).norm() <= thr {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }

    let mut out = Vec::with_capacity(d);
    for g in groups {
        let m = g.len();
        if m == 1 {
            let z = approx[g[0]];
            if z.im.abs() > imag_tol * (1.0 + z.re.abs()) {
                return Err(Error::NonRealRoot { re: z.re, im: z.im, coeffs: coeffs.to_vec() });
            }
            out.push(newton_polish(coeffs, z.re, 8));
            continue;
        }
        let mean = g.iter().map(|&i| approx[i].re).sum::<f64>() / m as f64;
        let radius = g.iter().map(|&i| (approx[i] - mean).norm()).fold(0.0, f64::max);
        let dm = derivative_coeffs(coeffs, m - 1);
        let mut center = newton_polish(&dm, mean, 60);
        if (center - mean).abs() > 2.0 * radius + base {
            center = mean;
        }
        // A split multiple root spreads like (noise)^{1/m}; wider imaginary parts are genuine.
        let im = g.iter().map(|&i| approx[i].im.abs()).fold(0.0, f64::max);
        let allowed = (imag_tol.max(1e-10f64.powf(1.0 / m as f64))) * (1.0 + center.abs());
        if im > allowed {
            let z = g.iter().map(|&i| approx[i]).max_by(|a, b| a.im.abs().total_cmp(&b.im.abs())).unwrap();
            return Err(Error::NonRealRoot { re: z.re, im: z.im, coeffs: coeffs.to_vec() });
        }
        if m == 2 {
            let (q, _) = horner(coeffs, center);
            let (q2, _) = horner(&derivative_coeffs(coeffs, 2), center);
            let abs_coeffs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
            let (noise, _) = horner(&abs_coeffs, center.abs());
            let noise = 4.0 * d as f64 * f64::EPSILON * noise;
            let disc = if q2 != 0.0 && q.abs() > noise { -2.0 * q / q2 } else { 0.0 };
            if disc > 0.0 {
                let h = disc.sqrt();
                out.push(center - h);
                out.push(center + h);
                continue;
            }
        }
        out.extend(std::iter::repeat(center).take(m));
    }
    Ok(out)
}
