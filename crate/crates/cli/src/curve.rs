//! Curve specification and evaluation.

use clap::ValueEnum;
use compfade::aef::{AefDist, AefEnvelope};
use compfade::akf::{AkfDist, AkfEnvelope};
use compfade::outage::{outage, HighSnr};
use compfade::{Error, SeriesControl, SeriesResult};
use rayon::prelude::*;
use serde::Serialize;

use crate::{CliError, Params};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    EnvelopePdf,
    SnrPdf,
    SnrCdf,
    /// Exact outage probability; x is gamma_th / gamma_bar.
    Op,
    /// High-SNR outage asymptote; x is gamma_th / gamma_bar.
    OpAsym,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Grid {
    /// A single point is allowed when `start == stop`.
    pub fn new(start: f64, stop: f64, points: usize, scale: Scale) -> Result<Self, String> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err(format!("grid bounds must be finite, got {start} and {stop}"));
        }
        match points {
            0 => return Err("--points must be at least 1".into()),
            1 if start != stop => return Err("--points 1 requires --from equal to --to".into()),
            1 => {}
            _ if start >= stop => return Err(format!("grid requires --from < --to, got {start} and {stop}")),
            _ => {}
        }
        if scale == Scale::Log && start <= 0.0 {
            return Err(format!("a logarithmic grid needs --from > 0, got {start}"));
        }
        Ok(Grid { start, stop, points, scale })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        let at = |i: usize| {
            let t = i as f64 / last;
            match self.scale {
                Scale::Linear => self.start + (self.stop - self.start) * t,
                Scale::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
            }
        };
        // pin the end points against rounding
        (0..self.points)
            .map(|i| match i {
                0 => self.start,
                _ if i + 1 == self.points => self.stop,
                _ => at(i),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "dist", content = "params", rename_all = "lowercase")]
pub enum SpecParams {
    Aef(compfade::AefParams),
    Akf(compfade::AkfParams),
}

/// Everything that determines a curve.
#[derive(Debug, Clone, Serialize)]
pub struct CurveSpec {
    #[serde(flatten)]
    pub params: SpecParams,
    pub quantity: Quantity,
    /// Envelope power for `envelope-pdf`, mean SNR otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub grid: Grid,
    pub db: bool,
}

impl CurveSpec {
    pub fn new(params: Params, quantity: Quantity, level: f64, grid: Grid, db: bool) -> Result<Self, String> {
        if !(level > 0.0 && level.is_finite()) {
            return Err(format!("mean power must be positive and finite, got {level}"));
        }
        let lowest = grid.start.min(grid.stop);
        match quantity {
            Quantity::Op | Quantity::OpAsym if lowest <= 0.0 => {
                return Err(format!("outage thresholds must be positive, got {lowest}"));
            }
            _ if lowest < 0.0 => return Err(format!("grid must be non-negative, got {lowest}")),
            _ if db && lowest <= 0.0 => return Err("--db needs a strictly positive grid".into()),
            _ => {}
        }
        let envelope = quantity == Quantity::EnvelopePdf;
        Ok(CurveSpec {
            params: match params {
                Params::Aef(p) => SpecParams::Aef(p),
                Params::Akf(p) => SpecParams::Akf(p),
            },
            quantity,
            gamma_bar: (!envelope).then_some(level),
            omega: envelope.then_some(level),
            grid,
            db,
        })
    }

    fn level(&self) -> f64 {
        self.gamma_bar.or(self.omega).unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveRow {
    pub x: f64,
    pub value: f64,
    pub est_error: f64,
    pub converged: bool,
}

fn exact(v: f64) -> SeriesResult {
    SeriesResult { value: v, terms_used: 0, est_error: 0.0, converged: true }
}

fn point<D: HighSnr>(d: &D, q: Quantity, x: f64, ctrl: &SeriesControl) -> compfade::Result<SeriesResult> {
    match q {
        Quantity::SnrPdf => d.snr_pdf(x).map(exact),
        Quantity::SnrCdf => d.snr_cdf(x, ctrl),
        Quantity::Op => outage(d, x * d.gamma_bar(), ctrl),
        Quantity::OpAsym => d.asymptotic_outage(x * d.gamma_bar()).map(exact),
        Quantity::EnvelopePdf => unreachable!("envelope density is handled separately"),
    }
}

/// Evaluate every grid point, in parallel, keeping grid order. Points whose
/// series fails to converge become rows with `converged = false`; any other
/// error aborts.
pub fn evaluate(spec: &CurveSpec, ctrl: &SeriesControl) -> Result<Vec<CurveRow>, CliError> {
    let level = spec.level();
    let eval: Box<dyn Fn(f64) -> compfade::Result<SeriesResult> + Sync> = match (&spec.params, spec.quantity) {
        (SpecParams::Aef(p), Quantity::EnvelopePdf) => {
            let e = AefEnvelope::new(*p, level)?;
            Box::new(move |x| e.envelope_pdf(x).map(exact))
        }
        (SpecParams::Akf(p), Quantity::EnvelopePdf) => {
            let e = AkfEnvelope::new(*p, level)?;
            Box::new(move |x| e.envelope_pdf(x).map(exact))
        }
        (SpecParams::Aef(p), q) => {
            let d = AefDist::new(*p, level)?;
            Box::new(move |x| point(&d, q, x, ctrl))
        }
        (SpecParams::Akf(p), q) => {
            let d = AkfDist::new(*p, level)?;
            Box::new(move |x| point(&d, q, x, ctrl))
        }
    };
    spec.grid
        .values()
        .into_par_iter()
        .map(|x| {
            let shown = if spec.db { 10.0 * x.log10() } else { x };
            match eval(x) {
                Ok(r) => Ok(CurveRow { x: shown, value: r.value, est_error: r.est_error, converged: r.converged }),
                Err(Error::NonConvergence(_)) => {
                    Ok(CurveRow { x: shown, value: f64::NAN, est_error: f64::INFINITY, converged: false })
                }
                Err(e) => Err(CliError::from(e)),
            }
        })
        .collect()
}
