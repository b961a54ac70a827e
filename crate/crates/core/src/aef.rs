//! Alpha-eta-F composite distribution: SNR density, CDF series with its
//! truncation bound, and the envelope density.

use crate::error::{domain, Error, Result};
use crate::params::{geometry, upsilon, AefParams, Geometry};
use crate::specfun::{gauss_2f1_scaled, ln_beta, ln_gamma, ln_pochhammer, SeriesControl, SeriesResult};
use crate::{ln_add_exp, SnrDistribution};

/// Parameter-dependent constants shared by the SNR and envelope densities.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Shape {
    params: AefParams,
    geom: Geometry,
    upsilon: f64,
    /// +1 normally; -1 flips the sign of every H^2 (test-harness fault).
    h2_sign: f64,
}

impl Shape {
    fn new(params: AefParams) -> Result<Self> {
        params.validate()?;
        Ok(Shape { params, geom: geometry(&params)?, upsilon: upsilon(&params)?, h2_sign: 1.0 })
    }

    /// `(ln|K|, sign K)` for `K = A^ms / D^(2 mu + ms) * 2F1(...; (2 mu H u / D)^2)`,
    /// `D = 2 mu h u + A`, given `ln u` and `ln A`.
    fn ln_kernel(&self, ln_u: f64, ln_a: f64) -> Result<(f64, f64)> {
        let AefParams { mu, ms, .. } = self.params;
        let Geometry { h, big_h } = self.geom;
        let ln_d = ln_add_exp((2.0 * mu * h).ln() + ln_u, ln_a);
        let z = if big_h == 0.0 || ln_u == f64::NEG_INFINITY {
            0.0
        } else {
            self.h2_sign * (2.0 * ((2.0 * mu * big_h.abs()).ln() + ln_u - ln_d)).exp()
        };
        let f = gauss_2f1_scaled(mu + ms / 2.0, mu + (ms + 1.0) / 2.0, mu + 0.5, z, &SeriesControl::default())?;
        if !f.series.converged {
            return Err(Error::NonConvergence(format!("2F1 in the alpha-eta-F density at z = {z}: {:?}", f.series)));
        }
        let ln = ms * ln_a - (2.0 * mu + ms) * ln_d + f.ln_abs();
        Ok((ln, f.series.value.signum()))
    }

    /// Common density prefactor without the power-of-two factor.
    fn ln_prefactor(&self) -> Result<f64> {
        let AefParams { alpha, mu, ms, .. } = self.params;
        Ok(alpha.ln() + 2.0 * mu * mu.ln() + mu * self.geom.h.ln() - ln_beta(2.0 * mu, ms)?)
    }
}

/// `x^p` on a log scale, with the `x = 0` conventions of a density factor.
/// Returns `None` when the density is zero, `Some(inf)` when it diverges.
fn ln_power(ln_x: f64, p: f64) -> Option<f64> {
    if ln_x == f64::NEG_INFINITY {
        if p > 0.0 {
            None
        } else if p == 0.0 {
            Some(0.0)
        } else {
            Some(f64::INFINITY)
        }
    } else {
        Some(p * ln_x)
    }
}

fn finish_density(ln_pow: Option<f64>, rest: f64, sign: f64) -> f64 {
    match ln_pow {
        None => 0.0,
        Some(p) if p == f64::INFINITY => f64::INFINITY,
        Some(p) => sign * (p + rest).exp(),
    }
}

/// Alpha-eta-F distribution of the instantaneous SNR with mean `gamma_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AefDist {
    shape: Shape,
    gamma_bar: f64,
}

impl AefDist {
    /// Fails when the mean SNR does not exist (`ms <= 2 / alpha`).
    pub fn new(params: AefParams, gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return domain(format!("gamma_bar must be positive and finite, got {gamma_bar}"));
        }
        Ok(AefDist { shape: Shape::new(params)?, gamma_bar })
    }

    pub fn params(&self) -> &AefParams {
        &self.shape.params
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn geometry(&self) -> Geometry {
        self.shape.geom
    }

    pub fn upsilon(&self) -> f64 {
        self.shape.upsilon
    }

    /// Deliberately wrong variant with every `H^2` negated; used to prove
    /// that the validation battery detects formula errors.
    #[doc(hidden)]
    pub fn with_negated_h2(mut self) -> Self {
        self.shape.h2_sign = -self.shape.h2_sign;
        self
    }

    /// `ln((ms - 1) upsilon gamma_bar^(alpha/2))`
    fn ln_a(&self) -> f64 {
        let p = &self.shape.params;
        ((p.ms - 1.0) * self.shape.upsilon).ln() + 0.5 * p.alpha * self.gamma_bar.ln()
    }

    /// `ln X` with `X = mu gamma^(alpha/2) / ((ms - 1) upsilon gamma_bar^(alpha/2))`.
    fn ln_x(&self, gamma: f64) -> f64 {
        let p = &self.shape.params;
        p.mu.ln() + 0.5 * p.alpha * gamma.ln() - self.ln_a()
    }

    /// SNR probability density.
    pub fn snr_pdf(&self, gamma: f64) -> Result<f64> {
        check_point(gamma, "gamma")?;
        let p = &self.shape.params;
        let ln_g = gamma.ln();
        let pow = ln_power(ln_g, p.alpha * p.mu - 1.0);
        if pow.is_none() {
            return Ok(0.0);
        }
        let (ln_k, sign) = self.shape.ln_kernel(0.5 * p.alpha * ln_g, self.ln_a())?;
        let rest = (2.0 * p.mu - 1.0) * std::f64::consts::LN_2 + self.shape.ln_prefactor()? + ln_k;
        Ok(finish_density(pow, rest, sign))
    }

    /// SNR CDF from its k-series, clamped to `[0, 1]`; the clamp distance is
    /// added to `est_error`.
    pub fn snr_cdf(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
        let raw = self.snr_cdf_raw(gamma, ctrl)?;
        let clamped = raw.value.clamp(0.0, 1.0);
        Ok(SeriesResult { value: clamped, est_error: raw.est_error + (raw.value - clamped).abs(), ..raw })
    }

    /// The unclamped k-series.
    pub fn snr_cdf_raw(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
        check_point(gamma, "gamma")?;
        if gamma == 0.0 {
            return Ok(SeriesResult::exact(0.0));
        }
        self.cdf_series(gamma, ctrl, None)
    }

    /// Sum of the first `k0` terms (`k = 0 .. k0 - 1`) of the CDF series.
    pub fn snr_cdf_partial(&self, gamma: f64, k0: usize) -> Result<f64> {
        check_point(gamma, "gamma")?;
        if gamma == 0.0 || k0 == 0 {
            return Ok(0.0);
        }
        Ok(self.cdf_series(gamma, &SeriesControl::default(), Some(k0))?.value)
    }

    fn cdf_series(&self, gamma: f64, ctrl: &SeriesControl, fixed_terms: Option<usize>) -> Result<SeriesResult> {
        let AefParams { mu, ms, .. } = self.shape.params;
        let Geometry { h, big_h } = self.shape.geom;
        let ln_x = self.ln_x(gamma);
        let w = -((2.0 * h).ln() + ln_x).exp(); // -2 h X
        if !w.is_finite() {
            return Ok(SeriesResult::exact(1.0));
        }
        let ln_pre = (2.0 * mu - 1.0) * std::f64::consts::LN_2 + mu * h.ln() - ln_gamma(2.0 * mu)? - ln_gamma(ms)?;
        let ln_h2 = 2.0 * big_h.abs().ln();
        let x = ln_x.exp();
        let q_lim = (2.0 * big_h.abs() * x / (1.0 + 2.0 * h * x)).powi(2);
        let n_max = fixed_terms.unwrap_or(ctrl.max_terms);

        let mut sum = 0.0;
        let mut sum_abs = 0.0;
        let mut err = 0.0;
        let mut converged = true;
        let mut prev = f64::INFINITY;
        let mut quiet = 0;
        let mut tail = f64::INFINITY;
        for k in 0..n_max {
            let kf = k as f64;
            let b = 2.0 * mu + 2.0 * kf;
            let f = gauss_2f1_scaled(b + ms, b, b + 1.0, w, ctrl)?;
            converged &= f.series.converged;
            let h_part = if k == 0 { 0.0 } else { kf * ln_h2 };
            let ln_t = ln_pre + ln_gamma(b + ms)? + h_part - ln_gamma(kf + 1.0)? - ln_pochhammer(mu + 0.5, kf) - (mu + kf).ln()
                + b * ln_x
                + f.ln_abs();
            let sign = f.series.value.signum() * if k % 2 == 1 { self.shape.h2_sign } else { 1.0 };
            let t = if f.series.value == 0.0 { 0.0 } else { sign * ln_t.exp() };
            sum += t;
            sum_abs += t.abs();
            if f.series.value != 0.0 {
                err += t.abs() * f.series.est_error / f.series.value.abs();
            }
            if big_h == 0.0 {
                // H = 0: only the k = 0 term survives
                let est = err + f64::EPSILON * sum_abs;
                return Ok(SeriesResult::finish(sum, 1, est, converged, ctrl));
            }
            if fixed_terms.is_some() {
                continue;
            }
            let q = if prev.is_finite() && prev > 0.0 { (t.abs() / prev).max(q_lim) } else { 1.0 };
            tail = if q < 1.0 { t.abs() * q / (1.0 - q) } else { f64::INFINITY };
            if k >= 1 && t.abs() <= prev && tail <= 0.5 * ctrl.tolerance(sum) {
                quiet += 1;
                if quiet >= 2 {
                    let est = tail + err + f64::EPSILON * sum_abs;
                    return Ok(SeriesResult::finish(sum, k + 1, est, converged, ctrl));
                }
            } else {
                quiet = 0;
            }
            prev = t.abs();
        }
        if fixed_terms.is_some() {
            return Ok(SeriesResult { value: sum, terms_used: n_max, est_error: err, converged });
        }
        Ok(SeriesResult { value: sum, terms_used: n_max, est_error: tail + err, converged: false })
    }

    /// Closed-form upper bound on the CDF remainder `sum_{k >= k0}` left after
    /// keeping the terms `k < k0`.
    ///
    /// The bound contains `2F1(.; .; .; (2 H X)^2)`, which diverges once that
    /// argument reaches 1; such points return a non-convergence error.
    pub fn cdf_truncation_bound(&self, gamma: f64, k0: usize) -> Result<f64> {
        check_point(gamma, "gamma")?;
        if k0 == 0 {
            return domain("truncation bound needs k0 >= 1");
        }
        if gamma == 0.0 {
            return Ok(0.0);
        }
        let AefParams { mu, ms, .. } = self.shape.params;
        let Geometry { h, big_h } = self.shape.geom;
        let ctrl = SeriesControl::default();
        let ln_x = self.ln_x(gamma);
        let x = ln_x.exp();
        let z2 = self.shape.h2_sign * (2.0 * big_h * x).powi(2);
        if z2 >= 1.0 {
            return Err(Error::NonConvergence(format!(
                "truncation bound diverges: (2 H X)^2 = {z2} >= 1 at gamma = {gamma}"
            )));
        }
        let b = 2.0 * mu + 2.0 * k0 as f64;
        let f1 = gauss_2f1_scaled(b + ms, b, b + 1.0, -2.0 * h * x, &ctrl)?;
        let f2 = gauss_2f1_scaled((2.0 * mu + ms) / 2.0, (2.0 * mu + ms + 1.0) / 2.0, (2.0 * mu + 1.0) / 2.0, z2, &ctrl)?;
        if !(f1.series.converged && f2.series.converged) {
            return Err(Error::NonConvergence(format!("truncation bound 2F1 factors: {:?} {:?}", f1.series, f2.series)));
        }
        let ln_pre = (2.0 * mu - 1.0) * std::f64::consts::LN_2 + mu * h.ln() - ln_gamma(2.0 * mu)? - ln_gamma(ms)?;
        let ln_t = ln_pre + f1.ln_abs() + 2.0 * mu * ln_x + ln_gamma(ms + 2.0 * mu)? - (mu + k0 as f64).ln() + f2.ln_abs();
        Ok(ln_t.exp() * f1.series.value.signum() * f2.series.value.signum())
    }
}

impl SnrDistribution for AefDist {
    fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    fn alpha(&self) -> f64 {
        self.shape.params.alpha
    }

    fn snr_pdf(&self, gamma: f64) -> Result<f64> {
        AefDist::snr_pdf(self, gamma)
    }

    fn snr_cdf(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
        AefDist::snr_cdf(self, gamma, ctrl)
    }
}

/// Alpha-eta-F envelope with mean power `omega_power = E[R^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AefEnvelope {
    shape: Shape,
    omega_power: f64,
}

impl AefEnvelope {
    pub fn new(params: AefParams, omega_power: f64) -> Result<Self> {
        if !(omega_power > 0.0 && omega_power.is_finite()) {
            return domain(format!("omega_power must be positive and finite, got {omega_power}"));
        }
        Ok(AefEnvelope { shape: Shape::new(params)?, omega_power })
    }

    pub fn params(&self) -> &AefParams {
        &self.shape.params
    }

    pub fn omega_power(&self) -> f64 {
        self.omega_power
    }

    #[doc(hidden)]
    pub fn with_negated_h2(mut self) -> Self {
        self.shape.h2_sign = -self.shape.h2_sign;
        self
    }

    /// Envelope probability density.
    pub fn envelope_pdf(&self, r: f64) -> Result<f64> {
        check_point(r, "r")?;
        let p = &self.shape.params;
        let ln_r = r.ln();
        let pow = ln_power(ln_r, 2.0 * p.alpha * p.mu - 1.0);
        if pow.is_none() {
            return Ok(0.0);
        }
        let ln_a = ((p.ms - 1.0) * self.shape.upsilon).ln() + 0.5 * p.alpha * self.omega_power.ln();
        let (ln_k, sign) = self.shape.ln_kernel(p.alpha * ln_r, ln_a)?;
        let rest = 2.0 * p.mu * std::f64::consts::LN_2 + self.shape.ln_prefactor()? + ln_k;
        Ok(finish_density(pow, rest, sign))
    }
}

pub(crate) fn check_point(x: f64, name: &str) -> Result<()> {
    if x >= 0.0 && !x.is_nan() {
        Ok(())
    } else {
        domain(format!("{name} must be non-negative, got {x}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Format;

    fn fisher() -> AefDist {
        AefDist::new(AefParams::new(2.0, 1.0, 0.5, 2.0, Format::FormatI).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn fisher_f_spot_values() {
        let d = fisher();
        assert!((d.snr_pdf(1.0).unwrap() - 0.25).abs() < 1e-12);
        let c = d.snr_cdf(1.0, &SeriesControl::default()).unwrap();
        assert!(c.converged);
        assert!((c.value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn zero_and_negative_arguments() {
        let d = AefDist::new(AefParams::new(2.5, 0.3, 2.0, 4.0, Format::FormatI).unwrap(), 1.0).unwrap();
        assert_eq!(d.snr_pdf(0.0).unwrap(), 0.0);
        assert_eq!(d.snr_cdf(0.0, &SeriesControl::default()).unwrap().value, 0.0);
        assert!(d.snr_pdf(-1.0).is_err());
        assert!(d.snr_cdf(-1.0, &SeriesControl::default()).is_err());
    }

    #[test]
    fn eta_symmetry_and_format_invariance() {
        let p = AefParams::new(3.0, 0.25, 1.5, 5.0, Format::FormatI).unwrap();
        let d1 = AefDist::new(p, 2.0).unwrap();
        let d2 = AefDist::new(AefParams { eta: 4.0, ..p }, 2.0).unwrap();
        let d3 = AefDist::new(p.converted().unwrap(), 2.0).unwrap();
        for &g in &[0.01, 0.3, 1.0, 4.0, 50.0] {
            let a = d1.snr_pdf(g).unwrap();
            assert!(((d2.snr_pdf(g).unwrap() - a) / a).abs() < 1e-12);
            assert!(((d3.snr_pdf(g).unwrap() - a) / a).abs() < 1e-10);
        }
    }

    #[test]
    fn extreme_snr_does_not_overflow() {
        let d = AefDist::new(AefParams::new(3.5, 0.2, 2.5, 30.0, Format::FormatI).unwrap(), 1.0).unwrap();
        let v = d.snr_pdf(1e200).unwrap();
        assert!(v.is_finite() && v >= 0.0);
        let c = d.snr_cdf(1e50, &SeriesControl::default()).unwrap();
        assert!((c.value - 1.0).abs() < 1e-9, "{c:?}");
    }

    #[test]
    fn envelope_is_change_of_variables() {
        let p = AefParams::new(2.5, 0.4, 1.5, 3.5, Format::FormatI).unwrap();
        let (gb, om) = (3.0, 0.7);
        let d = AefDist::new(p, gb).unwrap();
        let e = AefEnvelope::new(p, om).unwrap();
        for &r in &[0.05, 0.4, 1.0, 2.2] {
            let want = d.snr_pdf(gb * r * r / om).unwrap() * 2.0 * gb * r / om;
            let got = e.envelope_pdf(r).unwrap();
            assert!(((got - want) / want).abs() < 1e-12, "r = {r}: {got} vs {want}");
        }
        assert_eq!(e.envelope_pdf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn truncation_bound_is_monotone_and_dominates() {
        let d = AefDist::new(AefParams::new(2.0, 0.5, 1.0, 3.0, Format::FormatI).unwrap(), 1.0).unwrap();
        let ctrl = SeriesControl::default();
        let full = d.snr_cdf_raw(0.5, &ctrl).unwrap().value;
        let mut last = f64::INFINITY;
        for k0 in [1, 2, 4, 8, 16] {
            let b = d.cdf_truncation_bound(0.5, k0).unwrap();
            let rem = full - d.snr_cdf_partial(0.5, k0).unwrap();
            assert!(b >= rem.abs() - 1e-15, "k0 = {k0}: bound {b} < remainder {rem}");
            assert!(b <= last);
            last = b;
        }
    }
}
