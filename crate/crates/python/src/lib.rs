//! Python bindings: `import cubfuzz`.
//!
//! Ratings travel as lists of ints, profiles and fits as small wrapper classes.

use cubfuzz_core as core;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scale_for(m: usize, ip: Option<usize>, lb: Option<usize>, ub: Option<usize>) -> PyResult<core::RatingScale> {
    let spec = core::config::ScaleSpec {
        m,
        ip,
        lb,
        ub,
        ..Default::default()
    };
    spec.build().map_err(err)
}

fn sample(ratings: Vec<i64>, m: usize) -> PyResult<core::RatingSample> {
    core::RatingSample::new(&ratings, m).map_err(err)
}

fn model(pi: f64, xi: f64, delta: Option<f64>, c: Option<usize>) -> PyResult<core::CubModel> {
    match (delta, c) {
        (None, None) => Ok(core::CubModel::Baseline(core::CubParams::new(pi, xi).map_err(err)?)),
        (Some(d), Some(c)) => Ok(core::CubModel::Shelter(
            core::ShelterParams::new(pi, xi, d, c).map_err(err)?,
        )),
        _ => Err(PyValueError::new_err("delta and c go together")),
    }
}

/// Result of a CUB fit.
#[pyclass(name = "CubFit", frozen)]
struct PyCubFit {
    inner: core::CubFit,
}

#[pymethods]
impl PyCubFit {
    /// `"cub"` or `"cub_shelter"`.
    #[getter]
    fn model(&self) -> &'static str {
        match self.inner.model {
            core::CubModel::Baseline(_) => "cub",
            core::CubModel::Shelter(_) => "cub_shelter",
        }
    }

    /// Parameters by name (pi, xi, or pi_star, xi, delta, shelter, pi1, pi2).
    #[getter]
    fn params(&self) -> Vec<(&'static str, f64)> {
        match self.inner.model {
            core::CubModel::Baseline(p) => vec![("pi", p.pi), ("xi", p.xi)],
            core::CubModel::Shelter(p) => vec![
                ("pi_star", p.pi_star),
                ("xi", p.xi),
                ("delta", p.delta),
                ("shelter", p.shelter as f64),
                ("pi1", p.pi1()),
                ("pi2", p.pi2()),
            ],
        }
    }

    /// Weight of the feeling component (pi, or pi1 with a shelter).
    #[getter]
    fn feeling_weight(&self) -> f64 {
        self.inner.model.feeling_weight()
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.inner.model.xi()
    }

    #[getter]
    fn loglik(&self) -> f64 {
        self.inner.loglik
    }

    #[getter]
    fn bic(&self) -> f64 {
        self.inner.bic
    }

    #[getter]
    fn n_iter(&self) -> usize {
        self.inner.n_iter
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn boundary(&self) -> bool {
        self.inner.boundary
    }

    /// Standard errors by parameter name; `None` for boundary fits.
    #[getter]
    fn std_errors(&self) -> Option<Vec<(&'static str, f64)>> {
        self.inner
            .std_errors
            .as_ref()
            .map(|s| s.names.iter().copied().zip(s.values.iter().copied()).collect())
    }

    /// Probabilities of categories 1..m under the fitted model.
    fn probabilities(&self, m: usize) -> PyResult<Vec<f64>> {
        self.inner.model.probabilities(m).map_err(err)
    }

    fn __repr__(&self) -> String {
        let params: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v:.6}")).collect();
        format!(
            "CubFit({}, {}, loglik={:.6})",
            self.model(),
            params.join(", "),
            self.inner.loglik
        )
    }
}

/// Per-category fuzzy profile of one item.
#[pyclass(name = "FuzzyProfile", frozen)]
struct PyFuzzyProfile {
    inner: core::FuzzyProfile,
}

#[pymethods]
impl PyFuzzyProfile {
    #[getter]
    fn system(&self) -> &'static str {
        self.inner.system.name()
    }

    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.inner.membership().to_vec()
    }

    /// `None` for the membership-only empirical system.
    #[getter]
    fn nu(&self) -> Option<Vec<f64>> {
        self.inner.non_membership().map(<[f64]>::to_vec)
    }

    #[getter]
    fn u(&self) -> Option<Vec<f64>> {
        self.inner.hesitancy().map(<[f64]>::to_vec)
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.degenerate
    }

    /// `(mu, nu, u)` per category.
    fn triples(&self) -> Option<Vec<(f64, f64, f64)>> {
        self.inner
            .triples()
            .map(|ts| ts.into_iter().map(|t| (t.mu, t.nu, t.u)).collect())
    }

    fn __repr__(&self) -> String {
        format!("FuzzyProfile({}, m={})", self.system(), self.inner.m())
    }
}

#[pyfunction]
fn cub_pmf(pi: f64, xi: f64, m: usize, r: usize) -> PyResult<f64> {
    core::cub_pmf(&core::CubParams::new(pi, xi).map_err(err)?, m, r).map_err(err)
}

#[pyfunction]
fn cub_shelter_pmf(pi_star: f64, xi: f64, delta: f64, c: usize, m: usize, r: usize) -> PyResult<f64> {
    core::cub_shelter_pmf(&core::ShelterParams::new(pi_star, xi, delta, c).map_err(err)?, m, r).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (ratings, m, max_iter = 1000, tol = 1e-8))]
fn fit_cub(ratings: Vec<i64>, m: usize, max_iter: usize, tol: f64) -> PyResult<PyCubFit> {
    let opts = core::FitOptions {
        max_iter,
        tol,
        ..Default::default()
    };
    let inner = core::fit_cub(&sample(ratings, m)?, &opts).map_err(err)?;
    Ok(PyCubFit { inner })
}

/// Shelter fit at category `c`, or at the best-BIC category when `c` is None.
#[pyfunction]
#[pyo3(signature = (ratings, m, c = None))]
fn fit_cub_shelter(ratings: Vec<i64>, m: usize, c: Option<usize>) -> PyResult<PyCubFit> {
    let choice = c.map_or(core::ShelterChoice::Auto, core::ShelterChoice::Fixed);
    let inner = core::fit_cub_shelter(&sample(ratings, m)?, choice, &Default::default()).map_err(err)?;
    Ok(PyCubFit { inner })
}

/// `(statistic, p_value)` of the shelter fit against the baseline fit.
#[pyfunction]
fn lr_test(base: PyRef<'_, PyCubFit>, shelter: PyRef<'_, PyCubFit>) -> PyResult<(f64, f64)> {
    let t = core::lr_test(&base.inner, &shelter.inner).map_err(err)?;
    Ok((t.statistic, t.p_value))
}

#[pyfunction]
#[pyo3(signature = (pi, xi, m, n, seed, delta = None, c = None))]
fn simulate(
    pi: f64,
    xi: f64,
    m: usize,
    n: usize,
    seed: u64,
    delta: Option<f64>,
    c: Option<usize>,
) -> PyResult<Vec<usize>> {
    let s = core::simulate(&model(pi, xi, delta, c)?, m, n, seed).map_err(err)?;
    Ok(s.ratings().to_vec())
}

#[pyfunction]
#[pyo3(signature = (ratings, pi1, m, ip = None, lb = None, ub = None))]
fn cub_fuzzy_profile(
    ratings: Vec<i64>,
    pi1: f64,
    m: usize,
    ip: Option<usize>,
    lb: Option<usize>,
    ub: Option<usize>,
) -> PyResult<PyFuzzyProfile> {
    let scale = scale_for(m, ip, lb, ub)?;
    let inner = core::cub_fuzzy_profile(&sample(ratings, m)?.edf(), pi1, &scale).map_err(err)?;
    Ok(PyFuzzyProfile { inner })
}

#[pyfunction]
#[pyo3(signature = (m, epsilon = 1.0, theta = 1.0, eta = 1.0, a = None, b = None))]
fn spline_profile(
    m: usize,
    epsilon: f64,
    theta: f64,
    eta: f64,
    a: Option<usize>,
    b: Option<usize>,
) -> PyResult<PyFuzzyProfile> {
    let scale = scale_for(m, None, None, None)?;
    let d = core::SplineConfig::for_scale(&scale);
    let cfg = core::SplineConfig {
        epsilon,
        theta,
        eta,
        a: a.unwrap_or(d.a),
        b: b.unwrap_or(d.b),
    };
    let inner = core::spline_profile(&scale, &cfg).map_err(err)?;
    Ok(PyFuzzyProfile { inner })
}

#[pyfunction]
#[pyo3(signature = (ratings, m, lb = None, ub = None))]
fn empirical_profile(ratings: Vec<i64>, m: usize, lb: Option<usize>, ub: Option<usize>) -> PyResult<PyFuzzyProfile> {
    let scale = scale_for(m, None, lb, ub)?;
    let inner = core::empirical_profile(&sample(ratings, m)?.edf(), &scale).map_err(err)?;
    Ok(PyFuzzyProfile { inner })
}

#[pyfunction]
fn log_inverse_weights(g: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(core::log_inverse_weights(&g).map_err(err)?.as_slice().to_vec())
}

#[pyfunction]
fn hamming_distance(b: Vec<(f64, f64, f64)>, c: Vec<(f64, f64, f64)>) -> PyResult<f64> {
    let conv = |v: Vec<(f64, f64, f64)>| -> Vec<core::IfsTriple> {
        v.into_iter().map(|(mu, nu, u)| core::IfsTriple { mu, nu, u }).collect()
    };
    core::hamming_distance(&conv(b), &conv(c)).map_err(err)
}

/// Composite indicators of complete rows (one rating per profile) under `weights`.
///
/// Returns a dict with `mu`, `nu`, `u`, `score`, `accuracy` and `items`
/// (a list of per-item dicts with the same keys).
#[pyfunction]
fn composite<'py>(
    py: Python<'py>,
    rows: Vec<Vec<usize>>,
    profiles: Vec<PyRef<'py, PyFuzzyProfile>>,
    weights: Vec<f64>,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    use pyo3::types::PyDict;
    let profiles: Vec<core::FuzzyProfile> = profiles.iter().map(|p| p.inner.clone()).collect();
    let w = core::WeightVector::new(weights).map_err(err)?;
    let c = core::composite(&rows, &profiles, &w).map_err(err)?;
    let to_dict = |i: &core::aggregate::Indicators| -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("mu", i.mu)?;
        d.set_item("nu", i.nu)?;
        d.set_item("u", i.u)?;
        d.set_item("score", i.score)?;
        d.set_item("accuracy", i.accuracy)?;
        Ok(d)
    };
    let out = to_dict(&c.overall)?;
    let items = c.items.iter().map(to_dict).collect::<PyResult<Vec<_>>>()?;
    out.set_item("items", items)?;
    Ok(out)
}

#[pymodule]
fn cubfuzz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCubFit>()?;
    m.add_class::<PyFuzzyProfile>()?;
    m.add_function(wrap_pyfunction!(cub_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(cub_shelter_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(fit_cub, m)?)?;
    m.add_function(wrap_pyfunction!(fit_cub_shelter, m)?)?;
    m.add_function(wrap_pyfunction!(lr_test, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(cub_fuzzy_profile, m)?)?;
    m.add_function(wrap_pyfunction!(spline_profile, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_profile, m)?)?;
    m.add_function(wrap_pyfunction!(log_inverse_weights, m)?)?;
    m.add_function(wrap_pyfunction!(hamming_distance, m)?)?;
    m.add_function(wrap_pyfunction!(composite, m)?)?;
    Ok(())
}
