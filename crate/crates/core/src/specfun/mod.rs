//! Special functions and convergent-series engines.
//!
//! Every infinite series in the crate is driven by a [`SeriesControl`] and
//! reports a [`SeriesResult`]. A result with `converged == false` is returned
//! instead of a silently truncated value whenever the requested tolerance was
//! not met within `max_terms`.

mod bivariate;
mod gamma;
mod hyp1f1;
mod hyp2f1;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use bivariate::{humbert_psi1, humbert_psi1_with, kdf_2_1, kdf_2_1_with, Summation};
pub use gamma::{beta, digamma, ln_beta, ln_gamma, ln_gamma_signed, ln_pochhammer, pochhammer, rgamma};
pub use hyp1f1::{kummer_1f1, kummer_1f1_scaled};
pub use hyp2f1::{gauss_2f1, gauss_2f1_direct, gauss_2f1_pfaff, gauss_2f1_scaled, PfaffVariant, Z_CUT};

/// Environment variable overriding [`SeriesControl::max_terms`].
pub const MAX_TERMS_ENV: &str = "COMPFADE_MAX_TERMS";

/// Convergence policy shared by all series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Relative tolerance of the estimated error against the partial sum.
    pub rel_tol: f64,
    /// Absolute floor of the tolerance.
    pub abs_tol: f64,
    /// Maximum number of terms per series index.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { rel_tol: 1e-12, abs_tol: 1e-300, max_terms: 100_000 }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return domain(format!("rel_tol must be positive and finite, got {rel_tol}"));
        }
        if !(abs_tol >= 0.0) || !abs_tol.is_finite() {
            return domain(format!("abs_tol must be non-negative and finite, got {abs_tol}"));
        }
        if max_terms == 0 {
            return domain("max_terms must be at least 1");
        }
        Ok(SeriesControl { rel_tol, abs_tol, max_terms })
    }

    /// Default control with `max_terms` taken from `COMPFADE_MAX_TERMS` when set.
    pub fn from_env() -> Result<Self> {
        let mut ctrl = SeriesControl::default();
        if let Ok(raw) = std::env::var(MAX_TERMS_ENV) {
            let n: usize = raw
                .trim()
                .parse()
                .map_err(|_| crate::Error::Domain(format!("{MAX_TERMS_ENV} must be a positive integer, got {raw:?}")))?;
            ctrl = SeriesControl::new(ctrl.rel_tol, ctrl.abs_tol, n)?;
        }
        Ok(ctrl)
    }

    pub fn with_max_terms(self, max_terms: usize) -> Self {
        SeriesControl { max_terms: max_terms.max(1), ..self }
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        SeriesControl { rel_tol, ..self }
    }

    /// Tolerance applicable to a partial sum of the given magnitude.
    pub fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

/// Outcome of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    /// Magnitude of the tail bound (or last accepted term) plus rounding estimate.
    pub est_error: f64,
    pub converged: bool,
}

impl SeriesResult {
    pub fn exact(value: f64) -> Self {
        SeriesResult { value, terms_used: 1, est_error: 0.0, converged: true }
    }

    /// Build a result, enforcing `converged => est_error <= tolerance(value)`.
    pub(crate) fn finish(value: f64, terms_used: usize, est_error: f64, stopped: bool, ctrl: &SeriesControl) -> Self {
        let converged = stopped && value.is_finite() && est_error <= ctrl.tolerance(value);
        SeriesResult { value, terms_used, est_error, converged }
    }

    pub(crate) fn scale(self, factor: f64) -> Self {
        SeriesResult { value: self.value * factor, est_error: self.est_error * factor.abs(), ..self }
    }

    /// Re-check the convergence invariant after the value has been transformed.
    pub(crate) fn recheck(self, ctrl: &SeriesControl) -> Self {
        SeriesResult {
            converged: self.converged && self.value.is_finite() && self.est_error <= ctrl.tolerance(self.value),
            ..self
        }
    }
}

/// A series result carrying a separate exponential scale: the represented
/// number is `series.value * exp(ln_scale)`.
///
/// Hypergeometric values that feed long products (Pfaff prefactors such as
/// `(1 - z)^(-a)` with large `a`) overflow or underflow long before the
/// final quantity does, so callers combine them in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub ln_scale: f64,
    pub series: SeriesResult,
}

impl Scaled {
    pub(crate) fn plain(series: SeriesResult) -> Self {
        Scaled { ln_scale: 0.0, series }
    }

    pub fn value(&self) -> f64 {
        if self.series.value == 0.0 {
            0.0
        } else {
            self.series.value * self.ln_scale.exp()
        }
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(&self) -> f64 {
        self.series.value.abs().ln() + self.ln_scale
    }

    pub fn unscale(self, ctrl: &SeriesControl) -> SeriesResult {
        if self.series.value == 0.0 {
            return self.series;
        }
        self.series.scale(self.ln_scale.exp()).recheck(ctrl)
    }
}

/// Sum `1 + t1 + t2 + ...` where `t_{n+1} = t_n * ratio(n)`.
///
/// `ratio_limit` is the magnitude the term ratio tends to (|z| for 2F1,
/// zero for 1F1); it bounds the geometric tail estimate from below. The sum
/// stops once the tail estimate falls under tolerance for two consecutive
/// terms, or immediately when a term vanishes exactly (terminating series).
pub(crate) fn sum_hypergeometric(ratio: impl FnMut(usize) -> f64, ratio_limit: f64, ctrl: &SeriesControl) -> SeriesResult {
    let s = sum_hypergeometric_scaled(ratio, ratio_limit, ctrl);
    if s.ln_scale == 0.0 {
        s.series
    } else {
        s.unscale(ctrl)
    }
}

/// Partial sums beyond this magnitude are rescaled into `ln_scale`.
const RESCALE_AT: f64 = 1e200;

/// [`sum_hypergeometric`] that cannot overflow: large partial sums are
/// renormalised and the factor carried in the exponent.
pub(crate) fn sum_hypergeometric_scaled(mut ratio: impl FnMut(usize) -> f64, ratio_limit: f64, ctrl: &SeriesControl) -> Scaled {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut sum_abs = 1.0_f64;
    let mut ln_scale = 0.0;
    let mut quiet = 0;
    let mut tail = f64::INFINITY;
    let done = |series, ln_scale| Scaled { ln_scale, series };
    for n in 0..ctrl.max_terms {
        let r = ratio(n);
        term *= r;
        if term == 0.0 {
            let rounding = f64::EPSILON * sum_abs;
            return done(SeriesResult::finish(sum, n + 1, rounding, true, ctrl), ln_scale);
        }
        sum += term;
        sum_abs += term.abs();
        if !sum.is_finite() {
            return done(SeriesResult { value: sum, terms_used: n + 1, est_error: f64::INFINITY, converged: false }, ln_scale);
        }
        if sum_abs > RESCALE_AT {
            term /= RESCALE_AT;
            sum /= RESCALE_AT;
            sum_abs /= RESCALE_AT;
            ln_scale += RESCALE_AT.ln();
        }
        let q = r.abs().max(ratio_limit);
        tail = if q < 1.0 { term.abs() * q / (1.0 - q) } else { f64::INFINITY };
        if tail <= 0.5 * ctrl.tolerance(sum) {
            quiet += 1;
            if quiet >= 2 {
                let est = tail + f64::EPSILON * sum_abs;
                return done(SeriesResult::finish(sum, n + 2, est, true, ctrl), ln_scale);
            }
        } else {
            quiet = 0;
        }
    }
    let series = SeriesResult { value: sum, terms_used: ctrl.max_terms, est_error: tail + f64::EPSILON * sum_abs, converged: false };
    done(series, ln_scale)
}

/// Combine signed log-magnitude terms `sign * exp(ln_coef) * inner` into one
/// scaled result without intermediate overflow.
pub(crate) fn combine_scaled(parts: &[(f64, f64, SeriesResult)], ctrl: &SeriesControl) -> Scaled {
    let live: Vec<_> = parts.iter().filter(|(s, l, r)| *s != 0.0 && l.is_finite() && r.value != 0.0).collect();
    if live.is_empty() {
        let converged = parts.iter().all(|p| p.2.converged);
        let terms = parts.iter().map(|p| p.2.terms_used).sum();
        return Scaled::plain(SeriesResult { value: 0.0, terms_used: terms, est_error: 0.0, converged });
    }
    let top = live.iter().map(|(_, l, r)| l + r.value.abs().ln()).fold(f64::NEG_INFINITY, f64::max);
    let mut value = 0.0;
    let mut err = 0.0;
    let mut mag = 0.0;
    let mut terms = 0;
    let mut converged = true;
    for (sign, ln_coef, inner) in &live {
        let w = (ln_coef - top).exp();
        value += sign * w * inner.value;
        mag += (w * inner.value).abs();
        err += w * inner.est_error;
        terms += inner.terms_used;
        // an inner series that missed its own relative target still carries a
        // usable error estimate; only the combined tolerance decides
        converged &= inner.est_error.is_finite();
    }
    err += f64::EPSILON * mag;
    let series = SeriesResult { value, terms_used: terms, est_error: err, converged };
    let scaled = Scaled { ln_scale: top, series };
    // tolerance is relative, so it can be checked on the scaled representation
    Scaled { series: series.recheck(ctrl), ..scaled }
}

pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}
