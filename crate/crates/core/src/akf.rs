//! Alpha-kappa-F composite distribution: SNR density, CDF as a Poisson-weighted
//! series and in closed form, and the envelope density.

use crate::aef::check_point;
use crate::error::{domain, Error, Result};
use crate::params::{omega, AkfParams};
use crate::specfun::{gauss_2f1_scaled, humbert_psi1, kdf_2_1, kummer_1f1_scaled, ln_beta, SeriesControl, SeriesResult};
use crate::{ln_add_exp, SnrDistribution};

/// Relative half-width of the band around `X = 1` where the closed form
/// defers to the series.
pub const GUARD_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Shape {
    params: AkfParams,
    omega: f64,
    /// kappa actually used in the formulas; exactly 0 in the alpha-F limit
    kappa: f64,
}

impl Shape {
    fn new(params: AkfParams) -> Result<Self> {
        params.validate()?;
        let kappa = if params.is_kappa_zero() { 0.0 } else { params.kappa };
        Ok(Shape { params, omega: omega(&params)?, kappa })
    }

    /// `ln K` for `K = A^ms e^{-mu kappa} / D^(mu + ms) 1F1(mu + ms; mu; mu^2 kappa (1 + kappa) u / D)`,
    /// `D = mu (1 + kappa) u + A`.
    fn ln_kernel(&self, ln_u: f64, ln_a: f64) -> Result<f64> {
        let AkfParams { mu, ms, .. } = self.params;
        let k = self.kappa;
        let ln_mu_u = (mu * (1.0 + k)).ln() + ln_u;
        let ln_d = ln_add_exp(ln_mu_u, ln_a);
        let ln_f = if k == 0.0 {
            0.0
        } else {
            // mu kappa * (mu (1+kappa) u / D), bounded by mu kappa
            let z = mu * k * (ln_mu_u - ln_d).exp();
            let f = kummer_1f1_scaled(mu + ms, mu, z, &SeriesControl::default())?;
            if !f.series.converged {
                return Err(Error::NonConvergence(format!("1F1 in the alpha-kappa-F density at z = {z}: {:?}", f.series)));
            }
            f.ln_abs()
        };
        Ok(ms * ln_a - (mu + ms) * ln_d - mu * k + ln_f)
    }

    fn ln_prefactor(&self) -> Result<f64> {
        let AkfParams { alpha, mu, ms, .. } = self.params;
        Ok(alpha.ln() + mu * mu.ln() + mu * (1.0 + self.kappa).ln() - ln_beta(mu, ms)?)
    }
}

fn density(ln_x: f64, power: f64, rest: impl FnOnce() -> Result<f64>) -> Result<f64> {
    if ln_x == f64::NEG_INFINITY {
        if power > 0.0 {
            return Ok(0.0);
        }
        if power < 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok(rest()?.exp());
    }
    Ok((power * ln_x + rest()?).exp())
}

/// Alpha-kappa-F distribution of the instantaneous SNR with mean `gamma_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AkfDist {
    shape: Shape,
    gamma_bar: f64,
}

/// Which expression produced a closed-form CDF value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfBranch {
    /// Kampé de Fériet form, `X < 1`.
    KampeDeFeriet,
    /// Humbert Psi1 form, `X >= 1`.
    Humbert,
    /// Inside the guard band around `X = 1`: the Poisson series.
    Series,
}

impl AkfDist {
    /// Fails when the mean SNR does not exist (`ms <= 2 / alpha`).
    pub fn new(params: AkfParams, gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return domain(format!("gamma_bar must be positive and finite, got {gamma_bar}"));
        }
        Ok(AkfDist { shape: Shape::new(params)?, gamma_bar })
    }

    pub fn params(&self) -> &AkfParams {
        &self.shape.params
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn omega_norm(&self) -> f64 {
        self.shape.omega
    }

    fn ln_a(&self) -> f64 {
        let p = &self.shape.params;
        ((p.ms - 1.0) * self.shape.omega).ln() + 0.5 * p.alpha * self.gamma_bar.ln()
    }

    /// `ln X` with `X = mu (1 + kappa) gamma^(alpha/2) / ((ms - 1) omega gamma_bar^(alpha/2))`.
    pub fn ln_x(&self, gamma: f64) -> f64 {
        let p = &self.shape.params;
        (p.mu * (1.0 + self.shape.kappa)).ln() + 0.5 * p.alpha * gamma.ln() - self.ln_a()
    }

    /// SNR probability density.
    pub fn snr_pdf(&self, gamma: f64) -> Result<f64> {
        check_point(gamma, "gamma")?;
        let p = self.shape.params;
        let ln_g = gamma.ln();
        density(ln_g, 0.5 * p.alpha * p.mu - 1.0, || {
            Ok(self.shape.ln_prefactor()? - std::f64::consts::LN_2 + self.shape.ln_kernel(0.5 * p.alpha * ln_g, self.ln_a())?)
        })
    }

    /// SNR CDF from the Poisson-weighted series, clamped to `[0, 1]`.
    pub fn snr_cdf_series(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
        check_point(gamma, "gamma")?;
        if gamma == 0.0 {
            return Ok(SeriesResult::exact(0.0));
        }
        let AkfParams { mu, ms, .. } = self.shape.params;
        let k = self.shape.kappa;
        let ln_x = self.ln_x(gamma);
        let x = ln_x.exp();
        if !x.is_finite() {
            return Ok(SeriesResult::exact(1.0));
        }
        let ln_mk = (mu * k).ln();
        let mut sum = 0.0;
        let mut sum_abs = 0.0;
        let mut err = 0.0;
        let mut converged = true;
        let mut prev = f64::INFINITY;
        let mut quiet = 0;
        let mut tail = f64::INFINITY;
        let mut ln_fact = 0.0;
        let mut used = 0;
        for t in 0..ctrl.max_terms {
            used = t + 1;
            let tf = t as f64;
            if t > 0 {
                ln_fact += tf.ln();
            }
            let f = gauss_2f1_scaled(mu + ms + tf, mu + tf, mu + tf + 1.0, -x, ctrl)?;
            converged &= f.series.converged;
            let poisson = if t == 0 { -mu * k } else { -mu * k + tf * ln_mk - ln_fact };
            let ln_t = poisson - ln_beta(mu + tf, ms)? - (mu + tf).ln() + (mu + tf) * ln_x + f.ln_abs();
            let term = f.series.value.signum() * ln_t.exp();
            sum += term;
            sum_abs += term.abs();
            if f.series.value != 0.0 {
                err += term.abs() * f.series.est_error / f.series.value.abs();
            }
            if k == 0.0 {
                break;
            }
            let q = if prev.is_finite() && prev > 0.0 { term.abs() / prev } else { 1.0 };
            tail = if q < 1.0 { term.abs() * q / (1.0 - q) } else { f64::INFINITY };
            if tf > mu * k && term.abs() <= prev && tail <= 0.5 * ctrl.tolerance(sum) {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
            prev = term.abs();
            if t + 1 == ctrl.max_terms {
                return Ok(clamp(SeriesResult { value: sum, terms_used: t + 1, est_error: tail + err, converged: false }));
            }
        }
        let tail = if k == 0.0 { 0.0 } else { tail };
        let est = tail + err + f64::EPSILON * sum_abs;
        Ok(clamp(SeriesResult::finish(sum, used, est, converged, ctrl)))
    }

    /// Branch the closed form takes at `gamma`.
    pub fn cdf_branch(&self, gamma: f64) -> CdfBranch {
        let x = self.ln_x(gamma).exp();
        if (x - 1.0).abs() <= GUARD_BAND {
            CdfBranch::Series
        } else if x < 1.0 {
            CdfBranch::KampeDeFeriet
        } else {
            CdfBranch::Humbert
        }
    }

    /// SNR CDF from the Kampé de Fériet (`X < 1`) or Humbert (`X >= 1`)
    /// closed forms; the series is used within the guard band around `X = 1`.
    pub fn snr_cdf_closed(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
        check_point(gamma, "gamma")?;
        if gamma == 0.0 {
            return Ok(SeriesResult::exact(0.0));
        }
        let AkfParams { mu, ms, .. } = self.shape.params;
        let k = self.shape.kappa;
        let ln_x = self.ln_x(gamma);
        let x = ln_x.exp();
        let ln_b = ln_beta(mu, ms)?;
        let r = match self.cdf_branch(gamma) {
            CdfBranch::Series => return self.snr_cdf_series(gamma, ctrl),
            CdfBranch::KampeDeFeriet => {
                let f = kdf_2_1(mu + ms, mu, mu + 1.0, mu, mu * k * x, -x, ctrl)?;
                f.scale((-mu * k - mu.ln() - ln_b + mu * ln_x).exp())
            }
            CdfBranch::Humbert => {
                let first = humbert_psi1(mu, 0.0, 1.0 - ms, mu, -1.0 / x, mu * k, ctrl)?.scale((-mu * k).exp());
                let second = humbert_psi1(mu + ms, ms, 1.0 + ms, mu, -1.0 / x, mu * k, ctrl)?
                    .scale((-mu * k - ms.ln() - ln_b - ms * ln_x).exp());
                let value = first.value - second.value;
                let est = first.est_error + second.est_error + f64::EPSILON * (first.value.abs() + second.value.abs());
                SeriesResult::finish(value, first.terms_used + second.terms_used, est, first.converged && second.converged, ctrl)
            }
        };
        Ok(clamp(r.recheck(ctrl)))
    }
}

fn clamp(r: SeriesResult) -> SeriesResult {
    let c = r.value.clamp(0.0, 1.0);
    SeriesResult { value: c, est_error: r.est_error + (r.value - c).abs(), ..r }
}

impl SnrDistribution for AkfDist {
    fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    fn alpha(&self) -> f64 {
        self.shape.params.alpha
    }

    fn snr_pdf(&self, gamma: f64) -> Result<f64> {
        AkfDist::snr_pdf(self, gamma)
    }

    fn snr_cdf(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
        self.snr_cdf_series(gamma, ctrl)
    }
}

/// Alpha-kappa-F envelope with mean power `omega_power = E[R^2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AkfEnvelope {
    shape: Shape,
    omega_power: f64,
}

impl AkfEnvelope {
    pub fn new(params: AkfParams, omega_power: f64) -> Result<Self> {
        if !(omega_power > 0.0 && omega_power.is_finite()) {
            return domain(format!("omega_power must be positive and finite, got {omega_power}"));
        }
        Ok(AkfEnvelope { shape: Shape::new(params)?, omega_power })
    }

    pub fn params(&self) -> &AkfParams {
        &self.shape.params
    }

    pub fn omega_power(&self) -> f64 {
        self.omega_power
    }

    /// Envelope probability density.
    pub fn envelope_pdf(&self, r: f64) -> Result<f64> {
        check_point(r, "r")?;
        let p = self.shape.params;
        let ln_r = r.ln();
        let ln_a = ((p.ms - 1.0) * self.shape.omega).ln() + 0.5 * p.alpha * self.omega_power.ln();
        density(ln_r, p.alpha * p.mu - 1.0, || Ok(self.shape.ln_prefactor()? + self.shape.ln_kernel(p.alpha * ln_r, ln_a)?))
    }
}
