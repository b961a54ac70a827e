//! Outage probability, its high-SNR asymptote and the coding/diversity gains.
//!
//! At high mean SNR both families satisfy `OP ~ (G_c * gamma_bar)^(-G_d)`.

use serde::{Deserialize, Serialize};

use crate::aef::AefDist;
use crate::akf::AkfDist;
use crate::error::{domain, Result};
use crate::specfun::ln_beta;
use crate::{SeriesControl, SeriesResult, SnrDistribution};

/// Coding gain `gc` (linear SNR units) and diversity gain `gd` (slope).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPair {
    pub gc: f64,
    pub gd: f64,
}

fn check_threshold(gamma_th: f64) -> Result<()> {
    if gamma_th > 0.0 && gamma_th.is_finite() {
        Ok(())
    } else {
        domain(format!("gamma_th must be positive and finite, got {gamma_th}"))
    }
}

/// Exact outage probability `P(gamma < gamma_th)`.
pub fn outage(dist: &impl SnrDistribution, gamma_th: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
    check_threshold(gamma_th)?;
    dist.snr_cdf(gamma_th, ctrl)
}

/// Families with power-law behaviour at both ends of the SNR axis.
pub trait HighSnr: SnrDistribution {
    /// Slope of the outage curve against mean SNR on log-log axes; also the
    /// exponent of the CDF near zero.
    fn diversity_gain(&self) -> f64;

    /// Exponent `p` of the upper tail, `1 - F(gamma) ~ gamma^(-p)`.
    fn tail_exponent(&self) -> f64;

    /// Logarithm of the asymptotic outage probability at `gamma_th`.
    fn ln_asymptotic_outage(&self, gamma_th: f64) -> Result<f64>;

    fn asymptotic_outage(&self, gamma_th: f64) -> Result<f64> {
        self.ln_asymptotic_outage(gamma_th).map(f64::exp)
    }
}

impl HighSnr for AefDist {
    fn diversity_gain(&self) -> f64 {
        self.params().alpha * self.params().mu
    }

    fn tail_exponent(&self) -> f64 {
        0.5 * self.params().alpha * self.params().ms
    }

    fn ln_asymptotic_outage(&self, gamma_th: f64) -> Result<f64> {
        check_threshold(gamma_th)?;
        let p = self.params();
        let h = self.geometry().h;
        let ln_c = (2.0 * p.mu - 1.0) * (2.0 * p.mu).ln() + p.mu * h.ln() - ln_beta(2.0 * p.mu, p.ms)?;
        let ln_ratio = 0.5 * p.alpha * (gamma_th.ln() - self.gamma_bar().ln()) - ((p.ms - 1.0) * self.upsilon()).ln();
        Ok(ln_c + 2.0 * p.mu * ln_ratio)
    }
}

impl HighSnr for AkfDist {
    fn diversity_gain(&self) -> f64 {
        0.5 * self.params().alpha * self.params().mu
    }

    fn tail_exponent(&self) -> f64 {
        0.5 * self.params().alpha * self.params().ms
    }

    fn ln_asymptotic_outage(&self, gamma_th: f64) -> Result<f64> {
        check_threshold(gamma_th)?;
        let p = self.params();
        let ln_c = (p.mu - 1.0) * p.mu.ln() - p.mu * p.kappa - ln_beta(p.mu, p.ms)?;
        let ln_ratio = (1.0 + p.kappa).ln() + 0.5 * p.alpha * (gamma_th.ln() - self.gamma_bar().ln())
            - ((p.ms - 1.0) * self.omega_norm()).ln();
        Ok(ln_c + p.mu * ln_ratio)
    }
}

/// High-SNR outage asymptote of the alpha-eta-F family.
pub fn asymptotic_outage_aef(d: &AefDist, gamma_th: f64) -> Result<f64> {
    d.asymptotic_outage(gamma_th)
}

/// High-SNR outage asymptote of the alpha-kappa-F family.
pub fn asymptotic_outage_akf(d: &AkfDist, gamma_th: f64) -> Result<f64> {
    d.asymptotic_outage(gamma_th)
}

/// Coding and diversity gains such that `(gc * gamma_bar)^(-gd)` is the asymptote.
pub fn gains(dist: &impl HighSnr, gamma_th: f64) -> Result<GainPair> {
    let gd = dist.diversity_gain();
    // asymptote = (gc gamma_bar)^(-gd)  =>  ln gc = -ln(asymptote) / gd - ln gamma_bar
    let gc = (-dist.ln_asymptotic_outage(gamma_th)? / gd - dist.gamma_bar().ln()).exp();
    Ok(GainPair { gc, gd })
}
