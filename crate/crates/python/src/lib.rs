use std::sync::Arc;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hypercone::agm::{smoothed_grad as core_smoothed_grad, SmoothingConfig};
use hypercone::cones::derivative_relaxation;
use hypercone::dfw::{solve, CdChoice, ConicProgram, DfwConfig, SolveResult, StepRule};
use hypercone::harness::{gen_instances as core_gen_instances, InstanceSpec};
use hypercone::polyform::{elesym_eval as core_elesym_eval, elesym_grad as core_elesym_grad};
use hypercone::{ConeOracle, ConeSpec, Error, HyperbolicForm, HyperbolicityCone, Monomial, Orthant, PCone, PolynomialForm};

fn to_py(e: Error) -> PyErr {
    if e.is_invalid_input() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

#[pyclass(name = "Polynomial", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolynomial {
    inner: PolynomialForm,
}

#[pymethods]
impl PyPolynomial {
    /// Monomials as (exponents, coefficient) pairs.
    #[staticmethod]
    fn sparse(n: usize, monomials: Vec<(Vec<u32>, f64)>) -> PyResult<Self> {
        let ms = monomials
            .into_iter()
            .map(|(exponents, coefficient)| Monomial { exponents, coefficient })
            .collect();
        Ok(Self { inner: PolynomialForm::sparse(n, ms).map_err(to_py)? })
    }

    #[staticmethod]
    fn elesym(n: usize, k: usize) -> PyResult<Self> {
        Ok(Self { inner: PolynomialForm::elesym(n, k).map_err(to_py)? })
    }

    #[staticmethod]
    fn linear_factors(factors: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self { inner: PolynomialForm::linear_factors(factors).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self { inner: PolynomialForm::from_json(s).map_err(to_py)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&x).map_err(to_py)
    }

    fn grad(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.grad(&x).map_err(to_py)
    }

    /// Coefficients of t -> p(x + t e), entry i being p^{(i)}(x)/i!.
    fn dir_deriv_coeffs(&self, e: Vec<f64>, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.dir_deriv_coeffs(&e, &x).map_err(to_py)?.values)
    }

    fn grad_dir_deriv(&self, e: Vec<f64>, x: Vec<f64>, i: usize) -> PyResult<Vec<f64>> {
        self.inner.grad_dir_deriv(&e, &x, i).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Polynomial(n={}, degree={})", self.inner.n(), self.inner.degree())
    }
}

#[pyclass(name = "HyperbolicForm", frozen)]
struct PyHyperbolicForm {
    inner: HyperbolicForm,
}

#[pymethods]
impl PyHyperbolicForm {
    #[new]
    fn new(poly: &PyPolynomial, e: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: HyperbolicForm::new(poly.inner.clone(), e).map_err(to_py)? })
    }

    fn eigenvalues(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.inner.eigenvalues(&x).map_err(to_py)?.values)
    }

    fn lambda_min(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.lambda_min(&x).map_err(to_py)
    }

    #[pyo3(signature = (x, tol = 1e-6))]
    fn multiplicity_zero(&self, x: Vec<f64>, tol: f64) -> PyResult<usize> {
        self.inner.multiplicity_zero(&x, tol).map_err(to_py)
    }

    fn smoothed_grad(&self, x: Vec<f64>, mu: f64) -> PyResult<Vec<f64>> {
        let cfg = SmoothingConfig::with_mu(mu).map_err(to_py)?;
        core_smoothed_grad(&self.inner, &x, &cfg).map_err(to_py)
    }
}

#[pyclass(name = "Cone", frozen)]
struct PyCone {
    inner: Arc<dyn ConeOracle>,
}

#[pymethods]
impl PyCone {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        let spec = ConeSpec::from_json(s).map_err(to_py)?;
        Ok(Self { inner: spec.build().map_err(to_py)? })
    }

    #[staticmethod]
    fn orthant(n: usize) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(Orthant::new(n).map_err(to_py)?) })
    }

    #[staticmethod]
    fn pcone(p: f64, n: usize) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(PCone::new(p, n).map_err(to_py)?) })
    }

    #[staticmethod]
    fn hyperbolic(poly: &PyPolynomial, e: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(HyperbolicityCone::from_poly(poly.inner.clone(), e).map_err(to_py)?) })
    }

    #[staticmethod]
    fn derivative_orthant(n: usize, k: usize) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(derivative_relaxation(n, k).map_err(to_py)?) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn lambda_min(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.lambda_min(&x).map_err(to_py)
    }

    fn conjugate_vector(&self, z: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.conjugate_vector(&z).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Cone({})", self.inner.label())
    }
}

fn config_from(cd: Option<&Bound<'_, PyAny>>, step: &str, tol: f64, max_iters: usize, max_seconds: Option<f64>) -> PyResult<DfwConfig> {
    let cd = match cd {
        None => CdChoice::ClosedForm,
        Some(v) => match v.extract::<f64>() {
            Ok(x) => CdChoice::Value(x),
            Err(_) => match v.extract::<String>()?.as_str() {
                "auto" => CdChoice::Auto,
                other => return Err(PyValueError::new_err(format!("cd must be a number or 'auto', got {other:?}"))),
            },
        },
    };
    let step_rule = match step {
        "exact" => StepRule::ExactLineSearch,
        "diminishing" => StepRule::Diminishing,
        "lipschitz" => StepRule::Lipschitz(None),
        other => return Err(PyValueError::new_err(format!("unknown step rule {other:?}"))),
    };
    let cfg = DfwConfig {
        cd,
        step_rule,
        fw_gap_tol: tol,
        max_iters,
        max_seconds: max_seconds.unwrap_or(f64::INFINITY),
        ..Default::default()
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn result_dict<'py>(py: Python<'py>, res: &SolveResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let best = res.best.as_ref();
    d.set_item("status", format!("{:?}", res.status).to_lowercase())?;
    d.set_item("x", best.map(|b| b.x.clone()))?;
    d.set_item("objective", best.map(|b| b.objective))?;
    d.set_item("y", res.y_last.clone())?;
    d.set_item("iterations", res.iterations)?;
    d.set_item("fw_gap", res.final_gap)?;
    d.set_item("lambda_min", res.final_lambda_min)?;
    d.set_item("c_d", res.c_d)?;
    d.set_item("elapsed_s", res.elapsed_s)?;
    Ok(d)
}

/// Euclidean projection of `x0` onto `cone` by dual Frank-Wolfe.
#[pyfunction]
#[pyo3(signature = (cone, x0, cd = None, step = "exact", tol = 1e-6, max_iters = 100_000, max_seconds = None))]
fn project<'py>(
    py: Python<'py>,
    cone: &PyCone,
    x0: Vec<f64>,
    cd: Option<&Bound<'py, PyAny>>,
    step: &str,
    tol: f64,
    max_iters: usize,
    max_seconds: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_from(cd, step, tol, max_iters, max_seconds)?;
    let prog = ConicProgram::projection(x0, cone.inner.clone()).map_err(to_py)?;
    let res = py.detach(|| solve(&prog, &cfg)).map_err(to_py)?;
    result_dict(py, &res)
}

/// Solves a problem given in the JSON problem format.
#[pyfunction]
#[pyo3(signature = (problem_json, cd = None, step = "exact", tol = 1e-6, max_iters = 100_000, max_seconds = None))]
fn solve_problem<'py>(
    py: Python<'py>,
    problem_json: &str,
    cd: Option<&Bound<'py, PyAny>>,
    step: &str,
    tol: f64,
    max_iters: usize,
    max_seconds: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_from(cd, step, tol, max_iters, max_seconds)?;
    let prog = ConicProgram::from_json(problem_json).map_err(to_py)?;
    let res = py.detach(|| solve(&prog, &cfg)).map_err(to_py)?;
    result_dict(py, &res)
}

#[pyfunction]
fn elesym_eval(n: usize, k: usize, x: Vec<f64>) -> PyResult<f64> {
    core_elesym_eval(n, k, &x).map_err(to_py)
}

#[pyfunction]
fn elesym_grad(n: usize, k: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
    core_elesym_grad(n, k, &x).map_err(to_py)
}

/// Seeded standard-normal points outside the cone described by `cone_json`.
#[pyfunction]
fn gen_instances(cone_json: &str, seed: u64, count: usize) -> PyResult<Vec<Vec<f64>>> {
    let cone = ConeSpec::from_json(cone_json).map_err(to_py)?;
    core_gen_instances(&InstanceSpec::new(cone, seed, count)).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "hypercone")]
fn hypercone_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyHyperbolicForm>()?;
    m.add_class::<PyCone>()?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(solve_problem, m)?)?;
    m.add_function(wrap_pyfunction!(elesym_eval, m)?)?;
    m.add_function(wrap_pyfunction!(elesym_grad, m)?)?;
    m.add_function(wrap_pyfunction!(gen_instances, m)?)?;
    Ok(())
}
