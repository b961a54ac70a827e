//! Python bindings: the two distributions, outage analysis, special
//! functions, the physical sampler and the validation battery.

use compfade::aef::{AefDist, AefEnvelope};
use compfade::akf::{AkfDist, AkfEnvelope};
use compfade::outage::{gains, outage, HighSnr};
use compfade::validate::{Fault, Level};
use compfade::{mc, params, specfun, AefParams, AkfParams, Error, Format, SeriesControl};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NonConvergence(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for compfade::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn format_of(fmt: u8) -> PyResult<Format> {
    match fmt {
        1 => Ok(Format::FormatI),
        2 => Ok(Format::FormatII),
        _ => Err(PyValueError::new_err(format!("fmt must be 1 or 2, got {fmt}"))),
    }
}

fn ctrl() -> PyResult<SeriesControl> {
    SeriesControl::from_env().py()
}

/// Outcome of a series evaluation.
#[pyclass(frozen, get_all, skip_from_py_object, module = "compfade_py")]
#[derive(Clone, Copy)]
struct SeriesResult {
    value: f64,
    terms_used: usize,
    est_error: f64,
    converged: bool,
}

#[pymethods]
impl SeriesResult {
    fn __float__(&self) -> f64 {
        self.value
    }

    fn __repr__(&self) -> String {
        format!(
            "SeriesResult(value={}, terms_used={}, est_error={:e}, converged={})",
            self.value,
            self.terms_used,
            self.est_error,
            if self.converged { "True" } else { "False" }
        )
    }
}

impl From<compfade::SeriesResult> for SeriesResult {
    fn from(r: compfade::SeriesResult) -> Self {
        SeriesResult { value: r.value, terms_used: r.terms_used, est_error: r.est_error, converged: r.converged }
    }
}

/// Alpha-eta-F distribution of the SNR with mean `gamma_bar`.
#[pyclass(frozen, module = "compfade_py")]
struct Aef {
    dist: AefDist,
}

#[pymethods]
impl Aef {
    #[new]
    #[pyo3(signature = (alpha, eta, mu, ms, fmt = 1, gamma_bar = 1.0))]
    fn new(alpha: f64, eta: f64, mu: f64, ms: f64, fmt: u8, gamma_bar: f64) -> PyResult<Self> {
        let p = AefParams::new(alpha, eta, mu, ms, format_of(fmt)?).py()?;
        Ok(Aef { dist: AefDist::new(p, gamma_bar).py()? })
    }

    #[getter]
    fn gamma_bar(&self) -> f64 {
        self.dist.gamma_bar()
    }

    /// `(h, H)` of the parameter format.
    #[getter]
    fn geometry(&self) -> (f64, f64) {
        let g = self.dist.geometry();
        (g.h, g.big_h)
    }

    #[getter]
    fn upsilon(&self) -> f64 {
        self.dist.upsilon()
    }

    fn snr_pdf(&self, gamma: f64) -> PyResult<f64> {
        self.dist.snr_pdf(gamma).py()
    }

    fn snr_cdf(&self, gamma: f64) -> PyResult<SeriesResult> {
        Ok(self.dist.snr_cdf(gamma, &ctrl()?).py()?.into())
    }

    /// Bound on the CDF series remainder after `k0` terms.
    fn cdf_truncation_bound(&self, gamma: f64, k0: usize) -> PyResult<f64> {
        self.dist.cdf_truncation_bound(gamma, k0).py()
    }

    /// Envelope density for mean envelope power `omega`.
    #[pyo3(signature = (r, omega = 1.0))]
    fn envelope_pdf(&self, r: f64, omega: f64) -> PyResult<f64> {
        AefEnvelope::new(*self.dist.params(), omega).py()?.envelope_pdf(r).py()
    }

    fn outage(&self, gamma_th: f64) -> PyResult<SeriesResult> {
        Ok(outage(&self.dist, gamma_th, &ctrl()?).py()?.into())
    }

    fn asymptotic_outage(&self, gamma_th: f64) -> PyResult<f64> {
        self.dist.asymptotic_outage(gamma_th).py()
    }

    /// `(coding gain, diversity gain)`.
    fn gains(&self, gamma_th: f64) -> PyResult<(f64, f64)> {
        let g = gains(&self.dist, gamma_th).py()?;
        Ok((g.gc, g.gd))
    }

    /// Envelope samples from the physical model (integer `mu` only).
    #[pyo3(signature = (n, seed = 0))]
    fn sample_envelope(&self, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        let phys = mc::make_phys_aef(self.dist.params(), None).py()?;
        mc::sample_aef_envelope(&phys, n, seed).py()
    }

    fn __repr__(&self) -> String {
        let p = self.dist.params();
        let fmt = if p.format == Format::FormatI { 1 } else { 2 };
        format!("Aef(alpha={}, eta={}, mu={}, ms={}, fmt={fmt}, gamma_bar={})", p.alpha, p.eta, p.mu, p.ms, self.dist.gamma_bar())
    }
}

/// Alpha-kappa-F distribution of the SNR with mean `gamma_bar`.
#[pyclass(frozen, module = "compfade_py")]
struct Akf {
    dist: AkfDist,
}

#[pymethods]
impl Akf {
    #[new]
    #[pyo3(signature = (alpha, kappa, mu, ms, gamma_bar = 1.0))]
    fn new(alpha: f64, kappa: f64, mu: f64, ms: f64, gamma_bar: f64) -> PyResult<Self> {
        let p = AkfParams::new(alpha, kappa, mu, ms).py()?;
        Ok(Akf { dist: AkfDist::new(p, gamma_bar).py()? })
    }

    #[getter]
    fn gamma_bar(&self) -> f64 {
        self.dist.gamma_bar()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.dist.omega_norm()
    }

    fn snr_pdf(&self, gamma: f64) -> PyResult<f64> {
        self.dist.snr_pdf(gamma).py()
    }

    /// CDF from the Poisson-weighted series.
    fn snr_cdf(&self, gamma: f64) -> PyResult<SeriesResult> {
        Ok(self.dist.snr_cdf_series(gamma, &ctrl()?).py()?.into())
    }

    /// CDF from the closed forms; falls back to the series near the branch boundary.
    fn snr_cdf_closed(&self, gamma: f64) -> PyResult<SeriesResult> {
        Ok(self.dist.snr_cdf_closed(gamma, &ctrl()?).py()?.into())
    }

    #[pyo3(signature = (r, omega = 1.0))]
    fn envelope_pdf(&self, r: f64, omega: f64) -> PyResult<f64> {
        AkfEnvelope::new(*self.dist.params(), omega).py()?.envelope_pdf(r).py()
    }

    fn outage(&self, gamma_th: f64) -> PyResult<SeriesResult> {
        Ok(outage(&self.dist, gamma_th, &ctrl()?).py()?.into())
    }

    fn asymptotic_outage(&self, gamma_th: f64) -> PyResult<f64> {
        self.dist.asymptotic_outage(gamma_th).py()
    }

    fn gains(&self, gamma_th: f64) -> PyResult<(f64, f64)> {
        let g = gains(&self.dist, gamma_th).py()?;
        Ok((g.gc, g.gd))
    }

    #[pyo3(signature = (n, seed = 0))]
    fn sample_envelope(&self, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        let phys = mc::make_phys_akf(self.dist.params(), None).py()?;
        mc::sample_akf_envelope(&phys, n, seed).py()
    }

    fn __repr__(&self) -> String {
        let p = self.dist.params();
        format!("Akf(alpha={}, kappa={}, mu={}, ms={}, gamma_bar={})", p.alpha, p.kappa, p.mu, p.ms, self.dist.gamma_bar())
    }
}

#[pyfunction]
fn ln_gamma(x: f64) -> PyResult<f64> {
    specfun::ln_gamma(x).py()
}

#[pyfunction]
fn beta(a: f64, b: f64) -> PyResult<f64> {
    specfun::beta(a, b).py()
}

#[pyfunction]
fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> PyResult<SeriesResult> {
    Ok(specfun::gauss_2f1(a, b, c, z, &ctrl()?).py()?.into())
}

#[pyfunction]
fn kummer_1f1(a: f64, b: f64, z: f64) -> PyResult<SeriesResult> {
    Ok(specfun::kummer_1f1(a, b, z, &ctrl()?).py()?.into())
}

#[pyfunction]
fn humbert_psi1(a: f64, b: f64, c: f64, cp: f64, x: f64, y: f64) -> PyResult<SeriesResult> {
    Ok(specfun::humbert_psi1(a, b, c, cp, x, y, &ctrl()?).py()?.into())
}

#[pyfunction]
fn kdf_2_1(a1: f64, a2: f64, b1: f64, c1: f64, x: f64, y: f64) -> PyResult<SeriesResult> {
    Ok(specfun::kdf_2_1(a1, a2, b1, c1, x, y, &ctrl()?).py()?.into())
}

/// Map `eta` from format `fmt` to the other format.
#[pyfunction]
fn convert_format(eta: f64, fmt: u8) -> PyResult<f64> {
    params::convert_format(eta, format_of(fmt)?).py()
}

/// Kolmogorov-Smirnov distance between samples and the SNR CDF of `dist`.
#[pyfunction]
fn ks_distance_snr(samples: Vec<f64>, dist: &Bound<'_, PyAny>) -> PyResult<f64> {
    let emp = mc::EmpiricalDist::new(samples).py()?;
    let c = ctrl()?;
    let (lo, hi) = (emp.min().max(f64::MIN_POSITIVE) * 0.5, emp.max() * 2.0);
    let tab = if let Ok(a) = dist.cast::<Aef>() {
        mc::TabulatedCdf::from_snr(&a.get().dist, lo, hi, mc::TABLE_NODES, &c)
    } else if let Ok(k) = dist.cast::<Akf>() {
        mc::TabulatedCdf::from_snr(&k.get().dist, lo, hi, mc::TABLE_NODES, &c)
    } else {
        return Err(PyValueError::new_err("dist must be an Aef or Akf instance"));
    }
    .py()?;
    mc::ks_distance(&emp, |x| tab.eval(x)).py()
}

/// Run the self-check battery; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (level = "quick", seed = 1))]
fn validate(py: Python<'_>, level: &str, seed: u64) -> PyResult<String> {
    let level = match level {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => return Err(PyValueError::new_err(format!("level must be 'quick' or 'full', got {other:?}"))),
    };
    let report = py.detach(|| compfade::validate::run(level, seed, Fault::None));
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn compfade_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SeriesResult>()?;
    m.add_class::<Aef>()?;
    m.add_class::<Akf>()?;
    m.add_function(wrap_pyfunction!(ln_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_2f1, m)?)?;
    m.add_function(wrap_pyfunction!(kummer_1f1, m)?)?;
    m.add_function(wrap_pyfunction!(humbert_psi1, m)?)?;
    m.add_function(wrap_pyfunction!(kdf_2_1, m)?)?;
    m.add_function(wrap_pyfunction!(convert_format, m)?)?;
    m.add_function(wrap_pyfunction!(ks_distance_snr, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
