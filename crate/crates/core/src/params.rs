//! Shape-parameter bundles, Format I/II geometry and the power normalisers.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{gauss_2f1, kummer_1f1, ln_beta, SeriesControl};

/// Parameterisation of the alpha-eta-F `eta` parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    /// `eta` is the in-phase to quadrature power ratio, `0 < eta < inf`.
    FormatI,
    /// `eta` is the in-phase/quadrature correlation, `-1 < eta < 1`.
    FormatII,
}

impl Format {
    fn check_eta(self, eta: f64) -> Result<()> {
        match self {
            Format::FormatI if eta > 0.0 && eta.is_finite() => Ok(()),
            Format::FormatII if eta > -1.0 && eta < 1.0 => Ok(()),
            Format::FormatI => domain(format!("Format I requires 0 < eta < inf, got {eta}")),
            Format::FormatII => domain(format!("Format II requires -1 < eta < 1, got {eta}")),
        }
    }

    pub fn other(self) -> Format {
        match self {
            Format::FormatI => Format::FormatII,
            Format::FormatII => Format::FormatI,
        }
    }
}

fn check_common(alpha: f64, mu: f64, ms: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive and finite, got {alpha}"));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return domain(format!("mu must be positive and finite, got {mu}"));
    }
    if !(ms > 1.0 && ms.is_finite()) {
        return domain(format!("ms must exceed 1, got {ms}"));
    }
    Ok(())
}

fn check_moment(alpha: f64, ms: f64) -> Result<()> {
    if ms > 2.0 / alpha {
        Ok(())
    } else {
        domain(format!(
            "mean power does not exist: requires ms > 2/alpha, got ms = {ms}, 2/alpha = {}",
            2.0 / alpha
        ))
    }
}

/// Alpha-eta-F shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AefParams {
    pub alpha: f64,
    pub eta: f64,
    pub mu: f64,
    pub ms: f64,
    pub format: Format,
}

impl AefParams {
    pub fn new(alpha: f64, eta: f64, mu: f64, ms: f64, format: Format) -> Result<Self> {
        let p = AefParams { alpha, eta, mu, ms, format };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(self.alpha, self.mu, self.ms)?;
        self.format.check_eta(self.eta)
    }

    /// The same distribution expressed in the other format.
    pub fn converted(&self) -> Result<Self> {
        let eta = convert_format(self.eta, self.format)?;
        AefParams::new(self.alpha, eta, self.mu, self.ms, self.format.other())
    }
}

/// Alpha-kappa-F shape parameters. `kappa = 0` is the alpha-F limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AkfParams {
    pub alpha: f64,
    pub kappa: f64,
    pub mu: f64,
    pub ms: f64,
}

/// Below this `kappa` the closed kappa -> 0 limits replace the general formulas.
pub const KAPPA_ZERO: f64 = 1e-10;

impl AkfParams {
    pub fn new(alpha: f64, kappa: f64, mu: f64, ms: f64) -> Result<Self> {
        let p = AkfParams { alpha, kappa, mu, ms };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(self.alpha, self.mu, self.ms)?;
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return domain(format!("kappa must be non-negative and finite, got {}", self.kappa));
        }
        Ok(())
    }

    pub(crate) fn is_kappa_zero(&self) -> bool {
        self.kappa < KAPPA_ZERO
    }
}

/// The `(h, H)` pair of the alpha-eta-F family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub h: f64,
    pub big_h: f64,
}

/// `(h, H)` for the parameter's format.
pub fn geometry(p: &AefParams) -> Result<Geometry> {
    p.format.check_eta(p.eta)?;
    let eta = p.eta;
    let g = match p.format {
        Format::FormatI => Geometry { h: (2.0 + 1.0 / eta + eta) / 4.0, big_h: (1.0 / eta - eta) / 4.0 },
        Format::FormatII => {
            let d = 1.0 - eta * eta;
            Geometry { h: 1.0 / d, big_h: eta / d }
        }
    };
    Ok(g)
}

/// Map `eta` to the other format: `(1 - eta) / (1 + eta)` (an involution).
pub fn convert_format(eta: f64, from: Format) -> Result<f64> {
    if eta == -1.0 {
        return domain("eta = -1 is a singular point of the format relation");
    }
    from.check_eta(eta)?;
    Ok((1.0 - eta) / (1.0 + eta))
}

/// Normaliser `upsilon` of the alpha-eta-F SNR density; makes `E[gamma] = gamma_bar`.
pub fn upsilon(p: &AefParams) -> Result<f64> {
    p.validate()?;
    check_moment(p.alpha, p.ms)?;
    let Geometry { h, big_h } = geometry(p)?;
    let (a, mu, ms) = (p.alpha, p.mu, p.ms);
    let ctrl = SeriesControl::default();
    let f = gauss_2f1(mu + 1.0 / a, mu + 1.0 / a + 0.5, mu + 0.5, (big_h / h).powi(2), &ctrl)?;
    if !f.converged {
        return Err(Error::NonConvergence(format!("2F1 in upsilon did not converge: {f:?}")));
    }
    let ln_inner = ln_beta(2.0 * mu, ms)? + mu * h.ln() - ln_beta(2.0 * mu + 2.0 / a, ms - 2.0 / a)? - f.value.ln();
    Ok(((2.0 * mu * h / (ms - 1.0)).ln() + 0.5 * a * ln_inner).exp())
}

/// Normaliser `omega` of the alpha-kappa-F SNR density.
pub fn omega(p: &AkfParams) -> Result<f64> {
    p.validate()?;
    check_moment(p.alpha, p.ms)?;
    let (a, k, mu, ms) = (p.alpha, p.kappa, p.mu, p.ms);
    // ln( e^{mu kappa} / 1F1(mu + 2/a; mu; mu kappa) ), zero in the kappa -> 0 limit
    let ln_kummer_ratio = if p.is_kappa_zero() {
        0.0
    } else {
        let f = kummer_1f1(mu + 2.0 / a, mu, mu * k, &SeriesControl::default())?;
        if !f.converged {
            return Err(Error::NonConvergence(format!("1F1 in omega did not converge: {f:?}")));
        }
        mu * k - f.value.ln()
    };
    let ln_inner = ln_beta(mu, ms)? - ln_beta(mu + 2.0 / a, ms - 2.0 / a)? + ln_kummer_ratio;
    let k_eff = if p.is_kappa_zero() { 0.0 } else { k };
    Ok(((mu * (1.0 + k_eff) / (ms - 1.0)).ln() + 0.5 * a * ln_inner).exp())
}
