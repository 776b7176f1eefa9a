//! Homogeneous polynomials in three representations: explicit sparse
//! monomials, elementary symmetric polynomials, and products of linear forms.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;
use num_traits::NumAssign;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_finite, Error, Result};

/// Field the evaluators run over. Complex evaluation is needed for the
/// roots-of-unity directional derivatives.
pub trait Scalar: Copy + NumAssign + From<f64> + Send + Sync + Debug + 'static {}
impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Largest `n` for which an elementary symmetric polynomial may be expanded
/// into explicit monomials.
pub const MAX_EXPAND_ELESYM: usize = 20;
const MAX_EXPAND_TERMS: usize = 2_000_000;

/// Relative threshold for discarding the imaginary part of a coefficient
/// recovered by the discrete Fourier transform.
pub const IMAG_RESIDUE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(rename = "exp")]
    pub exponents: Vec<u32>,
    #[serde(rename = "coef")]
    pub coefficient: f64,
}

#[derive(Clone, Debug, PartialEq)]
struct SparseTerm {
    coef: f64,
    // (variable, exponent) for the nonzero exponents only
    vars: Vec<(usize, u32)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PolyBody {
    Sparse(Vec<Monomial>),
    EleSym { k: usize },
    LinearFactors(Vec<Vec<f64>>),
}

/// A homogeneous polynomial on R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct PolynomialForm {
    n: usize,
    degree: usize,
    body: PolyBody,
    terms: Vec<SparseTerm>,
}

impl PolynomialForm {
    pub fn sparse(n: usize, monomials: Vec<Monomial>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPolynomial("n must be positive".into()));
        }
        if monomials.is_empty() {
            return Err(Error::InvalidPolynomial("no monomials".into()));
        }
        let mut degree = None;
        let mut seen = HashMap::new();
        let mut terms = Vec::with_capacity(monomials.len());
        for (idx, m) in monomials.iter().enumerate() {
            if m.exponents.len() != n {
                return Err(Error::InvalidPolynomial(format!(
                    "monomial {idx} has {} exponents, expected {n}",
                    m.exponents.len()
                )));
            }
            if !m.coefficient.is_finite() || m.coefficient == 0.0 {
                return Err(Error::InvalidPolynomial(format!(
                    "monomial {idx} has coefficient {}",
                    m.coefficient
                )));
            }
            let deg: usize = m.exponents.iter().map(|&e| e as usize).sum();
            match degree {
                None => degree = Some(deg),
                Some(d) if d != deg => {
                    return Err(Error::InvalidPolynomial(format!(
                        "not homogeneous: monomial {idx} has degree {deg}, expected {d}"
                    )))
                }
                _ => {}
            }
            if seen.insert(m.exponents.clone(), idx).is_some() {
                return Err(Error::InvalidPolynomial(format!(
                    "duplicate exponent vector {:?}",
                    m.exponents
                )));
            }
            terms.push(SparseTerm {
                coef: m.coefficient,
                vars: m
                    .exponents
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e))
                    .collect(),
            });
        }
        let degree = degree.unwrap_or(0);
        if degree == 0 {
            return Err(Error::InvalidPolynomial("degree must be positive".into()));
        }
        Ok(Self { n, degree, body: PolyBody::Sparse(monomials), terms })
    }

    /// σ_{n,k}, the k-th elementary symmetric polynomial in n variables.
    pub fn elesym(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(Error::InvalidPolynomial(format!(
                "elementary symmetric polynomial needs 1 <= k <= n (n = {n}, k = {k})"
            )));
        }
        Ok(Self { n, degree: k, body: PolyBody::EleSym { k }, terms: Vec::new() })
    }

    /// Product of the linear forms x -> a_j . x.
    pub fn linear_factors(factors: Vec<Vec<f64>>) -> Result<Self> {
        let n = factors.first().map(|f| f.len()).unwrap_or(0);
        if factors.is_empty() || n == 0 {
            return Err(Error::InvalidPolynomial("need at least one nonempty factor".into()));
        }
        for (j, f) in factors.iter().enumerate() {
            if f.len() != n {
                return Err(Error::InvalidPolynomial(format!(
                    "factor {j} has length {}, expected {n}",
                    f.len()
                )));
            }
            if f.iter().any(|v| !v.is_finite()) || f.iter().all(|&v| v == 0.0) {
                return Err(Error::InvalidPolynomial(format!("factor {j} is zero or non-finite")));
            }
        }
        Ok(Self { n, degree: factors.len(), body: PolyBody::LinearFactors(factors), terms: Vec::new() })
    }

    /// x_1 x_2 ... x_n, whose hyperbolicity cone is the nonnegative orthant.
    pub fn coordinate_product(n: usize) -> Result<Self> {
        Self::linear_factors(
            (0..n)
                .map(|i| {
                    let mut a = vec![0.0; n];
                    a[i] = 1.0;
                    a
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn body(&self) -> &PolyBody {
        &self.body
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n, x.len())?;
        Ok(self.eval_generic(x))
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, x.len())?;
        Ok(self.grad_generic(x))
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Result<Complex64> {
        check_dim(self.n, x.len())?;
        Ok(self.eval_generic(x))
    }

    pub fn grad_complex(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.n, x.len())?;
        Ok(self.grad_generic(x))
    }

    pub(crate) fn eval_generic<T: Scalar>(&self, x: &[T]) -> T {
        match &self.body {
            PolyBody::Sparse(_) => {
                let mut acc = T::zero();
                for t in &self.terms {
                    let mut m = T::from(t.coef);
                    for &(i, e) in &t.vars {
                        m *= powu(x[i], e);
                    }
                    acc += m;
                }
                acc
            }
            PolyBody::EleSym { k } => elesym_coeffs(x, *k)[*k],
            PolyBody::LinearFactors(fs) => {
                fs.iter().fold(T::one(), |acc, a| acc * dot_mixed(a, x))
            }
        }
    }

    pub(crate) fn grad_generic<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let n = self.n;
        match &self.body {
            PolyBody::Sparse(_) => {
                let mut g = vec![T::zero(); n];
                let mut pre: Vec<T> = Vec::new();
                for t in &self.terms {
                    let v = t.vars.len();
                    let factors: Vec<T> = t.vars.iter().map(|&(i, e)| powu(x[i], e)).collect();
                    pre.clear();
                    pre.push(T::one());
                    for f in &factors {
                        let last = *pre.last().unwrap();
                        pre.push(last * *f);
                    }
                    let mut suf = T::one();
                    for idx in (0..v).rev() {
                        let (i, e) = t.vars[idx];
                        let d = T::from(t.coef * e as f64) * powu(x[i], e - 1);
                        g[i] += d * pre[idx] * suf;
                        suf *= factors[idx];
                    }
                }
                g
            }
            PolyBody::EleSym { k } => elesym_grad_generic(x, *k),
            PolyBody::LinearFactors(fs) => {
                let v: Vec<T> = fs.iter().map(|a| dot_mixed(a, x)).collect();
                let (pre, suf) = prefix_suffix_products(&v);
                let mut g = vec![T::zero(); n];
                for (j, a) in fs.iter().enumerate() {
                    let w = pre[j] * suf[j + 1];
                    for (gi, &ai) in g.iter_mut().zip(a) {
                        if ai != 0.0 {
                            *gi += T::from(ai) * w;
                        }
                    }
                }
                g
            }
        }
    }

    /// Coefficients of t -> p(x + t e) by sampling at the d-th roots of unity.
    /// The constant and leading coefficients are evaluated directly since the
    /// transform folds them together.
    pub fn dir_deriv_coeffs(&self, e: &[f64], x: &[f64]) -> Result<DirDerivCoeffs> {
        check_dim(self.n, e.len())?;
        check_dim(self.n, x.len())?;
        check_finite(x, "x")?;
        check_finite(e, "e")?;
        let pe = self.eval_generic(e);
        if pe == 0.0 || !pe.is_finite() {
            return Err(Error::ZeroAtDirection);
        }
        let d = self.degree;
        let mut values = vec![0.0; d + 1];
        values[0] = self.eval_generic(x);
        values[d] = pe;
        if d >= 2 {
            let samples: Vec<Complex64> = (0..d)
                .map(|j| {
                    let w = root_of_unity(j, d);
                    let pt: Vec<Complex64> =
                        x.iter().zip(e).map(|(&xi, &ei)| Complex64::new(xi, 0.0) + w * ei).collect();
                    self.eval_generic(&pt)
                })
                .collect();
            let scale = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
            for (i, v) in values.iter_mut().enumerate().take(d).skip(1) {
                let mut c = Complex64::new(0.0, 0.0);
                for (j, s) in samples.iter().enumerate() {
                    c += root_of_unity(d - (i * j) % d, d) * s;
                }
                c /= d as f64;
                accept_real(i, c, scale)?;
                *v = c.re;
            }
        }
        Ok(DirDerivCoeffs { values })
    }

    /// Gradient of x -> p^{(i)}(x), the i-th derivative of p in direction e,
    /// by the roots-of-unity formula applied to the gradient.
    pub fn grad_dir_deriv(&self, e: &[f64], x: &[f64], i: usize) -> Result<Vec<f64>> {
        check_dim(self.n, e.len())?;
        check_dim(self.n, x.len())?;
        let d = self.degree;
        if i >= d {
            return Err(Error::InvalidArgument(format!(
                "derivative order {i} must be below the degree {d}"
            )));
        }
        if i == 0 {
            return Ok(self.grad_generic(x));
        }
        let pe = self.eval_generic(e);
        if pe == 0.0 || !pe.is_finite() {
            return Err(Error::ZeroAtDirection);
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        let mut scale = 0.0f64;
        for j in 0..d {
            let w = root_of_unity(j, d);
            let pt: Vec<Complex64> =
                x.iter().zip(e).map(|(&xi, &ei)| Complex64::new(xi, 0.0) + w * ei).collect();
            let g = self.grad_generic(&pt);
            let coef = root_of_unity(d - (i * j) % d, d);
            for (a, gj) in acc.iter_mut().zip(&g) {
                scale = scale.max(gj.norm());
                *a += coef * gj;
            }
        }
        let factor = factorial(i) / d as f64;
        acc.iter()
            .enumerate()
            .map(|(idx, c)| {
                accept_real(idx, *c / d as f64, scale)?;
                Ok(c.re * factor)
            })
            .collect()
    }

    /// Coefficients of t -> p(x + t e), using exact formulas where the
    /// representation allows and the roots-of-unity transform otherwise.
    pub fn restriction_coeffs(&self, e: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, e.len())?;
        check_dim(self.n, x.len())?;
        match &self.body {
            PolyBody::EleSym { k } => {
                if let Some(a) = uniform_value(e) {
                    let sig = elesym_coeffs(x, *k);
                    return Ok((0..=*k)
                        .map(|i| {
                            let j = k - i;
                            binomial(self.n - j, i) * a.powi(i as i32) * sig[j]
                        })
                        .collect());
                }
            }
            PolyBody::LinearFactors(fs) => {
                let pe: f64 = fs.iter().map(|a| dot(a, e)).product();
                if pe == 0.0 {
                    return Err(Error::ZeroAtDirection);
                }
                let mut c = vec![1.0];
                for a in fs {
                    c = mul_linear(&c, dot(a, x), dot(a, e));
                }
                return Ok(c);
            }
            PolyBody::Sparse(_) => {}
        }
        Ok(self.dir_deriv_coeffs(e, x)?.values)
    }

    /// Gradient of the i-th coefficient of t -> p(x + t e), which equals
    /// the gradient of p^{(i)} divided by i!.
    pub fn restriction_coeff_grad(&self, e: &[f64], x: &[f64], i: usize) -> Result<Vec<f64>> {
        check_dim(self.n, e.len())?;
        check_dim(self.n, x.len())?;
        let d = self.degree;
        if i > d {
            return Err(Error::InvalidArgument(format!("coefficient {i} exceeds degree {d}")));
        }
        if i == d {
            return Ok(vec![0.0; self.n]);
        }
        if i == 0 {
            return Ok(self.grad_generic(x));
        }
        match &self.body {
            PolyBody::EleSym { k } => {
                if let Some(a) = uniform_value(e) {
                    let j = k - i;
                    let f = binomial(self.n - j, i) * a.powi(i as i32);
                    return Ok(elesym_grad_generic(x, j).into_iter().map(|g| f * g).collect());
                }
            }
            PolyBody::LinearFactors(fs) => {
                let polys: Vec<(f64, f64)> = fs.iter().map(|a| (dot(a, x), dot(a, e))).collect();
                let m = polys.len();
                // pre[j] = prod_{l<j}(v_l + t w_l), suf[j] = prod_{l>=j}
                let mut pre = vec![vec![1.0]];
                for &(v, w) in &polys {
                    let next = mul_linear(pre.last().unwrap(), v, w);
                    pre.push(next);
                }
                let mut suf = vec![vec![1.0]; m + 1];
                for j in (0..m).rev() {
                    suf[j] = mul_linear(&suf[j + 1], polys[j].0, polys[j].1);
                }
                let mut g = vec![0.0; self.n];
                for (j, a) in fs.iter().enumerate() {
                    let c = conv_coeff(&pre[j], &suf[j + 1], i);
                    if c != 0.0 {
                        for (gi, &ai) in g.iter_mut().zip(a) {
                            *gi += ai * c;
                        }
                    }
                }
                return Ok(g);
            }
            PolyBody::Sparse(_) => {}
        }
        let f = factorial(i);
        Ok(self.grad_dir_deriv(e, x, i)?.into_iter().map(|g| g / f).collect())
    }

    /// Explicit monomial expansion. Elementary symmetric polynomials are
    /// limited to n <= 20; products of linear forms by the number of terms.
    pub fn expand(&self) -> Result<PolynomialForm> {
        match &self.body {
            PolyBody::Sparse(_) => Ok(self.clone()),
            PolyBody::EleSym { k } => {
                if self.n > MAX_EXPAND_ELESYM {
                    return Err(Error::InvalidArgument(format!(
                        "refusing to expand sigma_{{{},{}}}: n exceeds {MAX_EXPAND_ELESYM}",
                        self.n, k
                    )));
                }
                let mut monomials = Vec::new();
                for mask in 0u32..(1u32 << self.n) {
                    if mask.count_ones() as usize == *k {
                        monomials.push(Monomial {
                            exponents: (0..self.n).map(|i| (mask >> i) & 1).collect(),
                            coefficient: 1.0,
                        });
                    }
                }
                PolynomialForm::sparse(self.n, monomials)
            }
            PolyBody::LinearFactors(fs) => {
                let bound = binomial(self.n + self.degree - 1, self.degree);
                if bound > MAX_EXPAND_TERMS as f64 {
                    return Err(Error::InvalidArgument(format!(
                        "expansion may have {bound} terms"
                    )));
                }
                let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
                acc.insert(vec![0; self.n], 1.0);
                for a in fs {
                    let mut next: HashMap<Vec<u32>, f64> = HashMap::new();
                    for (exp, c) in &acc {
                        for (i, &ai) in a.iter().enumerate() {
                            if ai != 0.0 {
                                let mut e2 = exp.clone();
                                e2[i] += 1;
                                *next.entry(e2).or_insert(0.0) += c * ai;
                            }
                        }
                    }
                    acc = next;
                }
                let mut monomials: Vec<Monomial> = acc
                    .into_iter()
                    .filter(|(_, c)| *c != 0.0)
                    .map(|(exponents, coefficient)| Monomial { exponents, coefficient })
                    .collect();
                monomials.sort_by(|a, b| b.exponents.cmp(&a.exponents));
                PolynomialForm::sparse(self.n, monomials)
            }
        }
    }
}

/// Coefficients c_0..c_d of t -> p(x + t e); c_i = p^{(i)}(x) / i!.
#[derive(Clone, Debug, PartialEq)]
pub struct DirDerivCoeffs {
    pub values: Vec<f64>,
}

impl DirDerivCoeffs {
    /// The directional derivative p^{(i)}(x).
    pub fn derivative(&self, i: usize) -> f64 {
        self.values[i] * factorial(i)
    }
}

fn accept_real(index: usize, c: Complex64, scale: f64) -> Result<()> {
    if c.im.abs() <= IMAG_RESIDUE_TOL * c.re.abs().max(1.0).max(scale) {
        Ok(())
    } else {
        Err(Error::ImaginaryResidue { index, residue: c.im, real: c.re })
    }
}

fn root_of_unity(j: usize, d: usize) -> Complex64 {
    let j = j % d;
    if j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 4 * j == d {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * j == d {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * j == 3 * d {
        return Complex64::new(0.0, -1.0);
    }
    let theta = 2.0 * PI * j as f64 / d as f64;
    Complex64::new(theta.cos(), theta.sin())
}

fn uniform_value(e: &[f64]) -> Option<f64> {
    let a = *e.first()?;
    (a != 0.0 && e.iter().all(|&v| v == a)).then_some(a)
}

fn powu<T: Scalar>(x: T, e: u32) -> T {
    let mut r = T::one();
    for _ in 0..e {
        r *= x;
    }
    r
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_mixed<T: Scalar>(a: &[f64], x: &[T]) -> T {
    let mut s = T::zero();
    for (&ai, &xi) in a.iter().zip(x) {
        if ai != 0.0 {
            s += T::from(ai) * xi;
        }
    }
    s
}

fn prefix_suffix_products<T: Scalar>(v: &[T]) -> (Vec<T>, Vec<T>) {
    let m = v.len();
    let mut pre = vec![T::one(); m + 1];
    for j in 0..m {
        pre[j + 1] = pre[j] * v[j];
    }
    let mut suf = vec![T::one(); m + 1];
    for j in (0..m).rev() {
        suf[j] = suf[j + 1] * v[j];
    }
    (pre, suf)
}

/// Multiply the polynomial `c` (ascending) by (v + t w).
fn mul_linear(c: &[f64], v: f64, w: f64) -> Vec<f64> {
    let mut out = vec![0.0; c.len() + 1];
    for (i, &ci) in c.iter().enumerate() {
        out[i] += ci * v;
        out[i + 1] += ci * w;
    }
    out
}

fn conv_coeff(a: &[f64], b: &[f64], i: usize) -> f64 {
    (0..=i)
        .filter(|&l| l < a.len() && i - l < b.len())
        .map(|l| a[l] * b[i - l])
        .sum()
}

pub(crate) fn factorial(i: usize) -> f64 {
    (1..=i).map(|v| v as f64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r.round()
}

fn truncated_mul<T: Scalar>(a: &[T], b: &[T], k: usize) -> Vec<T> {
    let len = (a.len() + b.len() - 1).min(k + 1);
    let mut out = vec![T::zero(); len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// σ_0..σ_k of x via divide and conquer on prod (1 + x_i s), truncated at
/// degree k. Entries beyond n are zero.
pub(crate) fn elesym_coeffs<T: Scalar>(x: &[T], k: usize) -> Vec<T> {
    fn rec<T: Scalar>(x: &[T], k: usize) -> Vec<T> {
        match x.len() {
            0 => vec![T::one()],
            1 => {
                if k == 0 {
                    vec![T::one()]
                } else {
                    vec![T::one(), x[0]]
                }
            }
            len => {
                let (l, r) = x.split_at(len / 2);
                truncated_mul(&rec(l, k), &rec(r, k), k)
            }
        }
    }
    let mut c = rec(x, k);
    c.resize(k + 1, T::zero());
    c
}

/// ∂σ_k/∂x_i = σ_{k-1}(x without x_i), by forward and backward partial
/// products.
fn elesym_grad_generic<T: Scalar>(x: &[T], k: usize) -> Vec<T> {
    let n = x.len();
    if k == 0 {
        return vec![T::zero(); n];
    }
    let km = k - 1;
    let step = |c: &[T], xi: T| -> Vec<T> {
        let len = (c.len() + 1).min(km + 1);
        let mut out = vec![T::zero(); len];
        for (i, o) in out.iter_mut().enumerate() {
            if i < c.len() {
                *o += c[i];
            }
            if i >= 1 && i - 1 < c.len() {
                *o += c[i - 1] * xi;
            }
        }
        out
    };
    let mut pre = Vec::with_capacity(n + 1);
    pre.push(vec![T::one()]);
    for i in 0..n {
        let next = step(&pre[i], x[i]);
        pre.push(next);
    }
    let mut g = vec![T::zero(); n];
    let mut suf = vec![T::one()];
    for i in (0..n).rev() {
        let p = &pre[i];
        let mut s = T::zero();
        for a in 0..=km {
            let b = km - a;
            if a < p.len() && b < suf.len() {
                s += p[a] * suf[b];
            }
        }
        g[i] = s;
        suf = step(&suf, x[i]);
    }
    g
}

/// σ_{n,k}(x).
pub fn elesym_eval(n: usize, k: usize, x: &[f64]) -> Result<f64> {
    check_dim(n, x.len())?;
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    Ok(elesym_coeffs(x, k)[k])
}

/// ∇σ_{n,k}(x).
pub fn elesym_grad(n: usize, k: usize, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(n, x.len())?;
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    Ok(elesym_grad_generic(x, k))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PolyJson {
    EleSym { elesym: EleSymJson },
    Factors { factors: Vec<Vec<f64>> },
    Sparse { n: usize, d: usize, monomials: Vec<Monomial> },
}

#[derive(Serialize, Deserialize)]
struct EleSymJson {
    n: usize,
    k: usize,
}

impl TryFrom<PolyJson> for PolynomialForm {
    type Error = Error;

    fn try_from(j: PolyJson) -> Result<Self> {
        match j {
            PolyJson::EleSym { elesym } => PolynomialForm::elesym(elesym.n, elesym.k),
            PolyJson::Factors { factors } => PolynomialForm::linear_factors(factors),
            PolyJson::Sparse { n, d, monomials } => {
                let p = PolynomialForm::sparse(n, monomials)?;
                if p.degree != d {
                    return Err(Error::InvalidPolynomial(format!(
                        "declared degree {d} but monomials have degree {}",
                        p.degree
                    )));
                }
                Ok(p)
            }
        }
    }
}

impl From<PolynomialForm> for PolyJson {
    fn from(p: PolynomialForm) -> Self {
        match p.body {
            PolyBody::EleSym { k } => PolyJson::EleSym { elesym: EleSymJson { n: p.n, k } },
            PolyBody::LinearFactors(factors) => PolyJson::Factors { factors },
            PolyBody::Sparse(monomials) => PolyJson::Sparse { n: p.n, d: p.degree, monomials },
        }
    }
}

impl PolynomialForm {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial serializes")
    }
}
