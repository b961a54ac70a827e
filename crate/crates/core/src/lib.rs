//! Alpha-eta-F and alpha-kappa-F composite fading distributions.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: gamma family, Gauss/Kummer hypergeometric functions and the
//!   two bivariate series (Humbert Psi1, Kampe de Feriet) with explicit
//!   convergence reporting.
//! * [`params`]: shape-parameter bundles, Format I/II geometry and the
//!   normalisation constants `upsilon` / `omega`.
//! * [`aef`] / [`akf`]: envelope and SNR densities, CDF series and closed forms.
//! * [`outage`]: exact and high-SNR outage probability, coding/diversity gains.
//! * [`mc`]: physical-model Monte-Carlo sampler and Kolmogorov-Smirnov machinery.
//! * [`cases`]: special-case reductions and the equivalence lattice.
//! * [`validate`]: the self-check battery behind `compfade validate`.

pub mod aef;
pub mod akf;
pub mod cases;
mod error;
pub mod mc;
pub mod outage;
pub mod params;
pub mod quad;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
pub use params::{AefParams, AkfParams, Format, Geometry};
pub use specfun::{SeriesControl, SeriesResult};

/// Common interface of the two SNR distributions.
pub trait SnrDistribution: Sync {
    /// Mean SNR.
    fn gamma_bar(&self) -> f64;
    /// Nonlinearity exponent.
    fn alpha(&self) -> f64;
    fn snr_pdf(&self, gamma: f64) -> Result<f64>;
    fn snr_cdf(&self, gamma: f64, ctrl: &SeriesControl) -> Result<SeriesResult>;
}

/// `ln(e^a + e^b)` without overflow.
pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}
