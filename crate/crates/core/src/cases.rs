//! Special cases of the two families and the equivalence lattice between them.

use serde::{Deserialize, Serialize};

use crate::aef::AefDist;
use crate::akf::AkfDist;
use crate::error::{domain, Result};
use crate::{AefParams, AkfParams, Format};

/// Finite stand-in for `ms -> infinity`.
pub const MS_INFINITY_PROXY: f64 = 1e5;

/// Named special cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseId {
    /// Alpha-eta-mu: no shadowing (`ms -> inf`).
    AlphaEtaMu,
    /// Alpha-kappa-mu: no shadowing (`ms -> inf`).
    AlphaKappaMu,
    /// Eta-mu / inverse gamma: linear medium (`alpha = 2`).
    EtaMuInvGamma,
    /// Kappa-mu / inverse gamma: linear medium (`alpha = 2`).
    KappaMuInvGamma,
    /// Alpha-F: `eta = 1` or `kappa = 0`.
    AlphaF,
    /// Fisher-Snedecor F: `alpha = 2` together with the alpha-F limit.
    FisherF,
    /// Alpha-eta / inverse gamma: `mu = 1`.
    AlphaEtaInvGamma,
    /// Alpha-kappa / inverse gamma: `mu = 1`.
    AlphaKappaInvGamma,
}

/// Parameters of either family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilyParams {
    Aef(AefParams),
    Akf(AkfParams),
}

/// `eta` at which the alpha-eta-F family loses its in-phase/quadrature asymmetry.
fn symmetric_eta(format: Format) -> f64 {
    match format {
        Format::FormatI => 1.0,
        Format::FormatII => 0.0,
    }
}

/// Parameter bundle at the limit point of `case`.
pub fn reduce(params: FamilyParams, case: CaseId) -> Result<FamilyParams> {
    use CaseId::*;
    use FamilyParams::{Aef, Akf};
    let out = match (params, case) {
        (Aef(p), AlphaEtaMu) => Aef(AefParams { ms: MS_INFINITY_PROXY, ..p }),
        (Akf(p), AlphaKappaMu) => Akf(AkfParams { ms: MS_INFINITY_PROXY, ..p }),
        (Aef(p), EtaMuInvGamma) => Aef(AefParams { alpha: 2.0, ..p }),
        (Akf(p), KappaMuInvGamma) => Akf(AkfParams { alpha: 2.0, ..p }),
        (Aef(p), AlphaF) => Aef(AefParams { eta: symmetric_eta(p.format), ..p }),
        (Akf(p), AlphaF) => Akf(AkfParams { kappa: 0.0, ..p }),
        (Aef(p), FisherF) => Aef(AefParams { alpha: 2.0, eta: symmetric_eta(p.format), ..p }),
        (Akf(p), FisherF) => Akf(AkfParams { alpha: 2.0, kappa: 0.0, ..p }),
        (Aef(p), AlphaEtaInvGamma) => Aef(AefParams { mu: 1.0, ..p }),
        (Akf(p), AlphaKappaInvGamma) => Akf(AkfParams { mu: 1.0, ..p }),
        (Aef(_), c) => return domain(format!("{c:?} is not a special case of the alpha-eta-F family")),
        (Akf(_), c) => return domain(format!("{c:?} is not a special case of the alpha-kappa-F family")),
    };
    match out {
        Aef(p) => p.validate()?,
        Akf(p) => p.validate()?,
    }
    Ok(out)
}

/// Thresholds for [`check_lattice`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeTolerances {
    /// Alpha-eta-F at `eta = 1` against alpha-kappa-F at `kappa = 0`, `2 mu`.
    pub identity: f64,
    /// Format I against Format II.
    pub format: f64,
    /// Largest allowed PDF change between `ms = 1e5` and `ms = 1e6`.
    pub stabilization: f64,
}

impl Default for LatticeTolerances {
    fn default() -> Self {
        LatticeTolerances { identity: 1e-8, format: 1e-10, stabilization: 1e-4 }
    }
}

/// One lattice check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub name: String,
    /// Maximum pointwise PDF deviation (the last step for stabilization checks).
    pub max_dev: f64,
    pub threshold: f64,
    /// Successive deviations for the stabilization checks, empty otherwise.
    pub ladder: Vec<f64>,
    pub pass: bool,
}

/// Outcome of [`check_lattice`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub checks: Vec<LatticeCheck>,
}

impl LatticeReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Logarithmic SNR grid on `[0.01, 20]`.
pub fn lattice_grid() -> Vec<f64> {
    let n = 40;
    let (a, b) = (0.01_f64.ln(), 20.0_f64.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn max_dev(f: impl Fn(f64) -> Result<f64>, g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    lattice_grid().into_iter().try_fold(0.0_f64, |m, x| Ok(m.max((f(x)? - g(x)?).abs())))
}

fn aef_pdf(p: AefParams) -> Result<impl Fn(f64) -> Result<f64>> {
    let d = AefDist::new(p, 1.0)?;
    Ok(move |g| d.snr_pdf(g))
}

fn akf_pdf(p: AkfParams) -> Result<impl Fn(f64) -> Result<f64>> {
    let d = AkfDist::new(p, 1.0)?;
    Ok(move |g| d.snr_pdf(g))
}

fn ladder_check(name: &str, devs: Vec<f64>, threshold: f64) -> LatticeCheck {
    let last = *devs.last().unwrap_or(&f64::INFINITY);
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    LatticeCheck { name: name.into(), max_dev: last, threshold, pass: decreasing && last <= threshold, ladder: devs }
}

fn single_check(name: &str, dev: f64, threshold: f64) -> LatticeCheck {
    LatticeCheck { name: name.into(), max_dev: dev, threshold, pass: dev <= threshold, ladder: Vec::new() }
}

/// Runs the equivalence battery:
/// (a) alpha-eta-F at `eta = 1`, `mu` equals alpha-kappa-F at `kappa = 0`, `2 mu`;
/// (b, c) each family stabilises as `ms` grows through `1e4, 1e5, 1e6`;
/// (d) Format I and Format II describe the same distribution.
pub fn check_lattice(tol: &LatticeTolerances) -> Result<LatticeReport> {
    let mut checks = Vec::new();

    for &(alpha, mu, ms) in &[(2.5, 1.0, 3.0), (2.0, 0.5, 2.0), (3.5, 1.5, 6.0)] {
        let a = aef_pdf(AefParams::new(alpha, 1.0, mu, ms, Format::FormatI)?)?;
        let k = akf_pdf(AkfParams::new(alpha, 0.0, 2.0 * mu, ms)?)?;
        let name = format!("identity aef(eta=1, mu={mu}) = akf(kappa=0, mu={}) at alpha={alpha}, ms={ms}", 2.0 * mu);
        checks.push(single_check(&name, max_dev(&a, &k)?, tol.identity));
    }

    let ms_ladder = [1e4, 1e5, 1e6];
    let base = AefParams::new(2.5, 0.5, 1.5, 3.0, Format::FormatI)?;
    let aefs = ms_ladder.iter().map(|&ms| aef_pdf(AefParams { ms, ..base })).collect::<Result<Vec<_>>>()?;
    let devs = aefs.windows(2).map(|w| max_dev(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    checks.push(ladder_check("aef stabilises as ms grows (1e4, 1e5, 1e6)", devs, tol.stabilization));

    let base = AkfParams::new(2.5, 1.5, 1.5, 3.0)?;
    let akfs = ms_ladder.iter().map(|&ms| akf_pdf(AkfParams { ms, ..base })).collect::<Result<Vec<_>>>()?;
    let devs = akfs.windows(2).map(|w| max_dev(&w[0], &w[1])).collect::<Result<Vec<_>>>()?;
    checks.push(ladder_check("akf stabilises as ms grows (1e4, 1e5, 1e6)", devs, tol.stabilization));

    for &(alpha, eta, mu, ms) in &[(2.0, 0.5, 1.0, 3.0), (3.0, 2.0, 0.5, 4.0), (1.5, 0.2, 2.5, 5.0)] {
        let p1 = AefParams::new(alpha, eta, mu, ms, Format::FormatI)?;
        let p2 = p1.converted()?;
        let name = format!("format I eta={eta} = format II eta={} at alpha={alpha}, mu={mu}, ms={ms}", p2.eta);
        checks.push(single_check(&name, max_dev(aef_pdf(p1)?, aef_pdf(p2)?)?, tol.format));
    }

    Ok(LatticeReport { checks })
}
