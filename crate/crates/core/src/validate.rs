//! Self-check battery: normalisation, mean power, CDF consistency, closed
//! forms, Monte-Carlo agreement, truncation bound, high-SNR asymptotes, the
//! equivalence lattice and determinism.
//!
//! Every check yields a [`CheckResult`] with the measured worst case; a
//! failing computation is reported as a failed check, never as a panic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aef::AefDist;
use crate::akf::{AkfDist, CdfBranch};
use crate::cases::{check_lattice, LatticeTolerances};
use crate::error::{Error, Result};
use crate::mc::{self, McCheck};
use crate::outage::HighSnr;
use crate::quad::{integrate_log, QuadControl};
use crate::specfun::{gauss_2f1, humbert_psi1, kdf_2_1, kummer_1f1};
use crate::{AefParams, AkfParams, Format, SeriesControl};

/// How much of the battery to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Normalisation on a reduced grid, the lattice and one Monte-Carlo pairing at `n = 1e5`.
    Quick,
    /// Every check, Monte-Carlo at `n = 1e6`.
    Full,
}

/// Deliberate formula errors used to prove that the battery catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    None,
    /// Negate `H^2` everywhere in the alpha-eta-F expressions.
    NegateH2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Worst observed deviation (or statistic).
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Where the worst case occurred, or why the check could not run.
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), measured, threshold, pass: measured <= threshold, detail: detail.into() }
    }

    fn from_result(name: &str, threshold: f64, r: Result<Worst>) -> Self {
        match r {
            Ok(w) => CheckResult::new(name, w.value, threshold, w.at),
            Err(e) => CheckResult { name: name.into(), measured: f64::NAN, threshold, pass: false, detail: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub level: Level,
    pub seed: u64,
    pub fault: Fault,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

/// Largest deviation seen and where.
#[derive(Debug, Clone, PartialEq)]
pub struct Worst {
    pub value: f64,
    pub at: String,
}

impl Worst {
    fn none() -> Self {
        Worst { value: 0.0, at: String::new() }
    }

    fn max(self, other: Worst) -> Worst {
        // NaN deviations must win so that they fail the check
        if other.value > self.value || other.value.is_nan() {
            other
        } else {
            self
        }
    }
}

fn worst_of(items: impl IntoParallelIterator<Item = Result<Worst>>) -> Result<Worst> {
    items.into_par_iter().try_reduce(Worst::none, |a, b| Ok(a.max(b)))
}

/// The 81-point alpha-eta-F grid (all Format I).
pub fn aef_grid() -> Vec<AefParams> {
    let mut out = Vec::new();
    for &alpha in &[1.0, 2.0, 3.5] {
        for &eta in &[0.2, 1.0, 5.0] {
            for &mu in &[0.5, 1.0, 2.5] {
                for &ms in &[2.1, 5.0, 30.0] {
                    if ms > 2.0 / alpha {
                        out.push(AefParams { alpha, eta, mu, ms, format: Format::FormatI });
                    }
                }
            }
        }
    }
    out
}

/// The 81-point alpha-kappa-F grid.
pub fn akf_grid() -> Vec<AkfParams> {
    let mut out = Vec::new();
    for &alpha in &[1.0, 2.0, 3.5] {
        for &kappa in &[0.1, 1.0, 5.0] {
            for &mu in &[0.5, 1.0, 2.5] {
                for &ms in &[2.1, 5.0, 30.0] {
                    if ms > 2.0 / alpha {
                        out.push(AkfParams { alpha, kappa, mu, ms });
                    }
                }
            }
        }
    }
    out
}

/// Corners of the grids, used by the quick level.
fn corners<T: Copy>(grid: &[T]) -> Vec<T> {
    grid.iter().step_by(10).copied().collect()
}

fn aef_dist(p: AefParams, fault: Fault) -> Result<AefDist> {
    let d = AefDist::new(p, 1.0)?;
    Ok(if fault == Fault::NegateH2 { d.with_negated_h2() } else { d })
}

fn akf_dist(p: AkfParams) -> Result<AkfDist> {
    AkfDist::new(p, 1.0)
}

/// Integration range on the SNR axis, relative to the mean.
const LOW: f64 = 1e-20;
const HIGH: f64 = 1e20;

fn quad_ctrl() -> QuadControl {
    QuadControl { rel_tol: 1e-10, abs_tol: 1e-13, max_intervals: 4000 }
}

/// `(int pdf, int gamma pdf)` over `(0, inf)`: adaptive quadrature on
/// `[LOW, HIGH] * gamma_bar` plus power-law end corrections fitted to the
/// density at the cut points.
pub fn moments(d: &impl HighSnr) -> Result<(f64, f64)> {
    let (lo, hi) = (LOW * d.gamma_bar(), HIGH * d.gamma_bar());
    let pdf = |g: f64| d.snr_pdf(g).unwrap_or(f64::NAN);
    let qc = quad_ctrl();
    let mass = integrate_log(pdf, lo, hi, &qc)?;
    let mean = integrate_log(|g| g * pdf(g), lo, hi, &qc)?;
    if !(mass.value.is_finite() && mean.value.is_finite()) {
        return Err(Error::NonConvergence("density quadrature produced a non-finite value".into()));
    }
    // pdf ~ c g^(q-1) near zero, ~ C g^(-p-1) in the tail
    let (q, p) = (d.diversity_gain(), d.tail_exponent());
    let (f_lo, f_hi) = (d.snr_pdf(lo)?, d.snr_pdf(hi)?);
    let mass = mass.value + lo * f_lo / q + hi * f_hi / p;
    let mean = mean.value + lo * lo * f_lo / (q + 1.0) + hi * hi * f_hi / (p - 1.0);
    Ok((mass, mean))
}

/// `int_0^gamma pdf` by quadrature.
pub fn cdf_by_quadrature(d: &impl HighSnr, gamma: f64) -> Result<f64> {
    let lo = LOW * d.gamma_bar();
    let head = lo * d.snr_pdf(lo)? / d.diversity_gain();
    if gamma <= lo {
        return Ok(gamma * d.snr_pdf(gamma)? / d.diversity_gain());
    }
    let body = integrate_log(|g| d.snr_pdf(g).unwrap_or(f64::NAN), lo, gamma, &quad_ctrl())?;
    Ok(head + body.value)
}

/// SNR points at which CDFs are compared.
pub fn cdf_points() -> Vec<f64> {
    let (a, b) = (0.01_f64.ln(), 50.0_f64.ln());
    (0..10).map(|i| (a + (b - a) * i as f64 / 9.0).exp()).collect()
}

fn label_aef(p: &AefParams) -> String {
    format!("aef(alpha={}, eta={}, mu={}, ms={})", p.alpha, p.eta, p.mu, p.ms)
}

fn label_akf(p: &AkfParams) -> String {
    format!("akf(alpha={}, kappa={}, mu={}, ms={})", p.alpha, p.kappa, p.mu, p.ms)
}

/// Scope of the grid-based checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Corners,
    Full,
}

fn grids(scope: Scope) -> (Vec<AefParams>, Vec<AkfParams>) {
    match scope {
        Scope::Full => (aef_grid(), akf_grid()),
        Scope::Corners => (corners(&aef_grid()), corners(&akf_grid())),
    }
}

/// Criteria 1 and 2: total mass within `1e-7` of one, mean within `1e-6` of `gamma_bar`.
pub fn check_moments(scope: Scope, fault: Fault) -> Vec<CheckResult> {
    let (aef, akf) = grids(scope);
    let aef_m: Vec<Result<(f64, f64, String)>> =
        aef.par_iter().map(|p| Ok((moments(&aef_dist(*p, fault)?)?, label_aef(p)))).map(flatten).collect();
    let akf_m: Vec<Result<(f64, f64, String)>> =
        akf.par_iter().map(|p| Ok((moments(&akf_dist(*p)?)?, label_akf(p)))).map(flatten).collect();
    let mut out = Vec::new();
    for (family, m) in [("aef", &aef_m), ("akf", &akf_m)] {
        let mass = worst_of(m.par_iter().map(|r| {
            let (mass, _, at) = r.as_ref().map_err(Clone::clone)?;
            Ok(Worst { value: (mass - 1.0).abs(), at: at.clone() })
        }));
        let mean = worst_of(m.par_iter().map(|r| {
            let (_, mean, at) = r.as_ref().map_err(Clone::clone)?;
            Ok(Worst { value: (mean - 1.0).abs(), at: at.clone() })
        }));
        out.push(CheckResult::from_result(&format!("normalization {family}: |int pdf - 1|"), 1e-7, mass));
        out.push(CheckResult::from_result(&format!("mean power {family}: |int gamma pdf - gamma_bar|"), 1e-6, mean));
    }
    out
}

fn flatten(r: Result<((f64, f64), String)>) -> Result<(f64, f64, String)> {
    r.map(|((a, b), s)| (a, b, s))
}

/// Criterion 3: CDF series against quadrature of the density, and for
/// alpha-kappa-F the closed forms against the series outside the guard band.
pub fn check_cdfs(scope: Scope, fault: Fault, ctrl: &SeriesControl) -> Vec<CheckResult> {
    let (aef, akf) = grids(scope);
    let pts = cdf_points();
    let cdf_dev = |d: &dyn Fn(f64) -> Result<(f64, f64)>, label: String| -> Result<Worst> {
        pts.iter().try_fold(Worst::none(), |w, &g| {
            let (series, quad) = d(g)?;
            Ok(w.max(Worst { value: (series - quad).abs(), at: format!("{label}, gamma={g}") }))
        })
    };
    let aef_w = worst_of(aef.par_iter().map(|p| {
        let d = aef_dist(*p, fault)?;
        cdf_dev(&|g| Ok((converged(d.snr_cdf(g, ctrl)?)?, cdf_by_quadrature(&d, g)?)), label_aef(p))
    }));
    let akf_w = worst_of(akf.par_iter().map(|p| {
        let d = akf_dist(*p)?;
        cdf_dev(&|g| Ok((converged(d.snr_cdf_series(g, ctrl)?)?, cdf_by_quadrature(&d, g)?)), label_akf(p))
    }));
    let closed_w = worst_of(akf.par_iter().map(|p| {
        let d = akf_dist(*p)?;
        pts.iter().try_fold(Worst::none(), |w, &g| {
            if d.cdf_branch(g) == CdfBranch::Series {
                return Ok(w);
            }
            // the double series may stop a little short of the 1e-12 target; its
            // error bound is folded into the deviation instead
            let closed = d.snr_cdf_closed(g, ctrl)?;
            let series = converged(d.snr_cdf_series(g, ctrl)?)?;
            let dev = (closed.value - series).abs() + closed.est_error;
            Ok(w.max(Worst { value: dev, at: format!("{}, gamma={g}, {:?}, converged={}", label_akf(p), d.cdf_branch(g), closed.converged) }))
        })
    }));
    vec![
        CheckResult::from_result("cdf aef: |series - quadrature|", 1e-8, aef_w),
        CheckResult::from_result("cdf akf: |series - quadrature|", 1e-8, akf_w),
        CheckResult::from_result("cdf akf: |closed form - series| outside guard band", 1e-8, closed_w),
    ]
}

fn converged(r: crate::SeriesResult) -> Result<f64> {
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::NonConvergence(format!("series did not converge: {r:?}")))
    }
}

/// Criterion 4: Fisher-Snedecor spot values, `pdf(1) = 0.25` and `cdf(1) = 0.75`.
pub fn check_fisher(fault: Fault, ctrl: &SeriesControl) -> CheckResult {
    let r = (|| -> Result<Worst> {
        let a = aef_dist(AefParams::new(2.0, 1.0, 0.5, 2.0, Format::FormatI)?, fault)?;
        let k = akf_dist(AkfParams::new(2.0, 0.0, 1.0, 2.0)?)?;
        let devs = [
            ("aef pdf", a.snr_pdf(1.0)? - 0.25),
            ("aef cdf", converged(a.snr_cdf(1.0, ctrl)?)? - 0.75),
            ("akf pdf", k.snr_pdf(1.0)? - 0.25),
            ("akf cdf", converged(k.snr_cdf_series(1.0, ctrl)?)? - 0.75),
        ];
        Ok(devs.iter().fold(Worst::none(), |w, (n, d)| w.max(Worst { value: d.abs(), at: n.to_string() })))
    })();
    CheckResult::from_result("fisher-snedecor spot values", 1e-10, r)
}

/// Monte-Carlo configurations: four per family.
pub fn mc_configs() -> (Vec<AefParams>, Vec<AkfParams>) {
    (
        vec![
            AefParams { alpha: 2.0, eta: 0.5, mu: 2.0, ms: 4.0, format: Format::FormatI },
            AefParams { alpha: 3.0, eta: 3.0, mu: 1.0, ms: 6.0, format: Format::FormatI },
            AefParams { alpha: 2.0, eta: -0.4, mu: 1.0, ms: 5.0, format: Format::FormatII },
            AefParams { alpha: 3.0, eta: 0.3, mu: 2.0, ms: 4.0, format: Format::FormatII },
        ],
        vec![
            AkfParams { alpha: 2.0, kappa: 0.5, mu: 2.0, ms: 4.0 },
            AkfParams { alpha: 3.0, kappa: 0.5, mu: 1.0, ms: 5.0 },
            AkfParams { alpha: 2.0, kappa: 3.0, mu: 1.0, ms: 4.0 },
            AkfParams { alpha: 3.0, kappa: 3.0, mu: 2.0, ms: 6.0 },
        ],
    )
}

/// KS threshold for `n` draws: 0.002 at `n = 1e6`, scaling as `1 / sqrt(n)`.
pub fn ks_threshold(n: usize) -> f64 {
    mc::KS_THRESHOLD * (1e6 / n as f64).sqrt()
}

fn mc_results(name: &str, r: Result<McCheck>, threshold: f64) -> Vec<CheckResult> {
    match r {
        Ok(c) => vec![
            CheckResult::new(format!("mc {name}: envelope KS"), c.envelope.ks_stat, threshold, format!("n={}", c.envelope.n)),
            CheckResult::new(format!("mc {name}: snr KS"), c.snr.ks_stat, threshold, format!("n={}", c.snr.n)),
            CheckResult::new(
                format!("mc {name}: |E[R^alpha] / lambda - 1|"),
                (c.mean_r_alpha / c.lambda - 1.0).abs(),
                0.01,
                format!("empirical {} vs {}", c.mean_r_alpha, c.lambda),
            ),
        ],
        Err(e) => vec![CheckResult {
            name: format!("mc {name}: envelope/snr KS"),
            measured: f64::NAN,
            threshold,
            pass: false,
            detail: e.to_string(),
        }],
    }
}

/// Criterion 5: physical sampler against the analytical CDFs.
pub fn check_mc(aef: &[AefParams], akf: &[AkfParams], n: usize, seed: u64, fault: Fault, ctrl: &SeriesControl) -> Vec<CheckResult> {
    let t = ks_threshold(n);
    let mut out = Vec::new();
    for (i, p) in aef.iter().enumerate() {
        let s = seed.wrapping_add(i as u64);
        let r = match fault {
            Fault::None => mc::check_aef(p, n, s, t, ctrl),
            Fault::NegateH2 => mc::check_aef_negated_h2(p, n, s, t, ctrl),
        };
        out.extend(mc_results(&label_aef(p), r, t));
    }
    for (i, p) in akf.iter().enumerate() {
        let r = mc::check_akf(p, n, seed.wrapping_add(100 + i as u64), t, ctrl);
        out.extend(mc_results(&label_akf(p), r, t));
    }
    out
}

/// Criterion 6: remainder of the alpha-eta-F CDF series after `k0` terms never
/// exceeds the closed-form bound. Measured value is the number of violations.
pub fn check_truncation(draws: usize, seed: u64, fault: Fault, ctrl: &SeriesControl) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut attempts = 0;
    while points.len() < draws && attempts < 100 * draws {
        attempts += 1;
        let alpha = rng.random_range(1.0..4.0);
        let eta = rng.random_range(0.1_f64.ln()..10.0_f64.ln()).exp();
        let mu = rng.random_range(0.5..3.0);
        let ms = rng.random_range(2.0 / alpha + 0.5..20.0);
        let gamma = rng.random_range(0.01_f64.ln()..10.0_f64.ln()).exp();
        let Ok(p) = AefParams::new(alpha, eta, mu, ms, Format::FormatI) else { continue };
        let Ok(d) = aef_dist(p, fault) else { continue };
        // keep draws where the bound is finite
        if d.cdf_truncation_bound(gamma, 1).is_ok() {
            points.push((d, gamma));
        }
    }
    let r = (|| -> Result<Worst> {
        let mut violations = 0;
        let mut at = String::new();
        for (d, gamma) in &points {
            let full = d.snr_cdf_raw(*gamma, ctrl)?;
            for k0 in [1, 2, 4, 8, 16] {
                let remainder = (full.value - d.snr_cdf_partial(*gamma, k0)?).abs();
                let bound = d.cdf_truncation_bound(*gamma, k0)?;
                if remainder > bound + full.est_error + 4.0 * f64::EPSILON {
                    violations += 1;
                    at = format!("{}, gamma={gamma}, k0={k0}: {remainder:e} > {bound:e}", label_aef(d.params()));
                }
            }
        }
        if points.len() < draws {
            return Err(Error::Domain(format!("only {} of {draws} valid draws", points.len())));
        }
        Ok(Worst { value: violations as f64, at })
    })();
    CheckResult::from_result(&format!("truncation bound: violations over {draws} draws x 5 cut-offs"), 0.0, r)
}

/// Parameter sets for the high-SNR checks.
pub fn asymptotic_sets() -> (Vec<AefParams>, Vec<AkfParams>) {
    let aef = [(2.0, 0.5, 1.0, 3.0), (3.0, 2.0, 0.5, 4.0), (2.5, 0.3, 1.5, 5.0), (2.0, 1.0, 2.0, 2.5), (3.5, 5.0, 1.0, 3.0), (2.0, 0.2, 0.5, 6.0)]
        .iter()
        .map(|&(alpha, eta, mu, ms)| AefParams { alpha, eta, mu, ms, format: Format::FormatI })
        .collect();
    let akf = [(2.0, 1.0, 1.0, 3.0), (3.0, 0.5, 2.0, 4.0), (2.5, 2.0, 1.5, 5.0), (2.0, 3.0, 1.0, 2.5), (3.5, 0.1, 1.0, 3.0), (3.0, 1.0, 0.5, 5.0)]
        .iter()
        .map(|&(alpha, kappa, mu, ms)| AkfParams { alpha, kappa, mu, ms })
        .collect();
    (aef, akf)
}

/// SNR ratios and tolerances of the asymptote ladder.
pub const LADDER: [(f64, f64); 3] = [(1e3, 0.05), (1e4, 0.01), (1e5, 0.003)];

fn asymptote_worst(d: &dyn Fn(f64) -> Result<(f64, f64, f64)>, label: &str) -> Result<(Worst, Worst)> {
    // returns (ladder excess, slope deviation)
    let mut ladder = Worst::none();
    let mut ops = Vec::new();
    for &(ratio, tol) in &LADDER {
        let (exact, asym, gd) = d(ratio)?;
        ops.push((exact, gd));
        let dev = (exact / asym - 1.0).abs();
        ladder = ladder.max(Worst { value: dev / tol, at: format!("{label}, gamma_bar/gamma_th={ratio:e}: |ratio - 1| = {dev:e}") });
    }
    let (op4, gd) = ops[1];
    let (op5, _) = ops[2];
    let slope = (op4 / op5).log10();
    let slope_dev = (slope / gd - 1.0).abs();
    Ok((ladder, Worst { value: slope_dev, at: format!("{label}: slope {slope} vs G_d {gd}") }))
}

fn high_snr_point(d_at: impl Fn(f64) -> Result<Box<dyn HighSnrDyn>>, ctrl: SeriesControl) -> impl Fn(f64) -> Result<(f64, f64, f64)> {
    move |ratio| {
        let d = d_at(ratio)?;
        Ok((converged(d.cdf(1.0, &ctrl)?)?, d.asym(1.0)?, d.gd()))
    }
}

/// Object-safe view of [`HighSnr`] for the ladder.
trait HighSnrDyn {
    fn cdf(&self, g: f64, ctrl: &SeriesControl) -> Result<crate::SeriesResult>;
    fn asym(&self, g: f64) -> Result<f64>;
    fn gd(&self) -> f64;
}

impl<T: HighSnr> HighSnrDyn for T {
    fn cdf(&self, g: f64, ctrl: &SeriesControl) -> Result<crate::SeriesResult> {
        self.snr_cdf(g, ctrl)
    }
    fn asym(&self, g: f64) -> Result<f64> {
        self.asymptotic_outage(g)
    }
    fn gd(&self) -> f64 {
        self.diversity_gain()
    }
}

/// Criterion 7: exact outage approaches the asymptote along the ladder and
/// its log-log slope between `1e4` and `1e5` matches the diversity gain.
pub fn check_asymptotes(fault: Fault, ctrl: &SeriesControl) -> Vec<CheckResult> {
    let (aef, akf) = asymptotic_sets();
    let mut cases: Vec<(String, Box<dyn Fn(f64) -> Result<(f64, f64, f64)> + Sync + Send>)> = Vec::new();
    for p in aef {
        let f = high_snr_point(
            move |gb| {
                let d = AefDist::new(p, gb)?;
                Ok(Box::new(if fault == Fault::NegateH2 { d.with_negated_h2() } else { d }) as Box<dyn HighSnrDyn>)
            },
            *ctrl,
        );
        cases.push((label_aef(&p), Box::new(f)));
    }
    for p in akf {
        let f = high_snr_point(move |gb| Ok(Box::new(AkfDist::new(p, gb)?) as Box<dyn HighSnrDyn>), *ctrl);
        cases.push((label_akf(&p), Box::new(f)));
    }
    let results: Vec<Result<(Worst, Worst)>> = cases.par_iter().map(|(label, f)| asymptote_worst(f.as_ref(), label)).collect();
    let ladder = results.iter().try_fold(Worst::none(), |w, r| r.as_ref().map(|(l, _)| w.max(l.clone())).map_err(Clone::clone));
    let slope = results.iter().try_fold(Worst::none(), |w, r| r.as_ref().map(|(_, s)| w.max(s.clone())).map_err(Clone::clone));
    vec![
        CheckResult::from_result("asymptotic outage: worst |exact/asym - 1| relative to 5%/1%/0.3% ladder", 1.0, ladder),
        CheckResult::from_result("asymptotic outage: |slope / G_d - 1| between 1e4 and 1e5", 0.02, slope),
    ]
}

/// Criterion 8: the equivalence lattice.
pub fn check_lattice_results() -> Vec<CheckResult> {
    match check_lattice(&LatticeTolerances::default()) {
        Ok(r) => r
            .checks
            .into_iter()
            .map(|c| {
                let detail = if c.ladder.is_empty() { String::new() } else { format!("ladder {:?}", c.ladder) };
                CheckResult { name: format!("lattice: {}", c.name), measured: c.max_dev, threshold: c.threshold, pass: c.pass, detail }
            })
            .collect(),
        Err(e) => vec![CheckResult { name: "lattice".into(), measured: f64::NAN, threshold: 0.0, pass: false, detail: e.to_string() }],
    }
}

/// Criterion 9 (identity part): Psi1 and the Kampé de Fériet function reduce
/// to one-variable functions on their axes.
pub fn check_reductions(ctrl: &SeriesControl) -> CheckResult {
    let r = (|| -> Result<Worst> {
        let mut w = Worst::none();
        let mut push = |name: &str, got: f64, want: f64| {
            w = w.clone().max(Worst { value: ((got - want) / want).abs(), at: name.to_string() });
        };
        let (a, b, c, cp) = (1.3, 0.7, 2.1, 1.6);
        for &x in &[-0.8, -0.3, 0.4, 0.85] {
            push(&format!("psi1 y=0, x={x}"), humbert_psi1(a, b, c, cp, x, 0.0, ctrl)?.value, gauss_2f1(a, b, c, x, ctrl)?.value);
        }
        for &y in &[-6.0, -1.0, 2.0, 9.0] {
            push(&format!("psi1 x=0, y={y}"), humbert_psi1(a, b, c, cp, 0.0, y, ctrl)?.value, kummer_1f1(a, cp, y, ctrl)?.value);
            push(&format!("psi1 b=0, y={y}"), humbert_psi1(a, 0.0, c, cp, 0.6, y, ctrl)?.value, kummer_1f1(a, cp, y, ctrl)?.value);
        }
        let (a1, a2, b1, c1) = (1.2, 2.3, 3.1, 0.9);
        for &y in &[-0.9, -0.2, 0.5, 0.8] {
            push(&format!("kdf x=0, y={y}"), kdf_2_1(a1, a2, b1, c1, 0.0, y, ctrl)?.value, gauss_2f1(a1, a2, b1, y, ctrl)?.value);
        }
        for &x in &[-7.0, -1.5, 0.5, 4.0] {
            push(&format!("kdf y=0, c1=a2, x={x}"), kdf_2_1(a1, a2, b1, a2, x, 0.0, ctrl)?.value, kummer_1f1(a1, b1, x, ctrl)?.value);
        }
        Ok(w)
    })();
    CheckResult::from_result("special functions: reduction identities (relative)", 1e-12, r)
}

/// Criterion 10: sampler output is independent of the partition count.
pub fn check_determinism(seed: u64) -> CheckResult {
    let r = (|| -> Result<Worst> {
        let p = mc::make_phys_aef(&AefParams::new(2.0, 0.5, 2.0, 4.0, Format::FormatI)?, None)?;
        let base = mc::sample_aef_envelope_partitioned(&p, 50_000, seed, 1)?;
        let k = mc::make_phys_akf(&AkfParams::new(2.0, 1.0, 2.0, 4.0)?, None)?;
        let kbase = mc::sample_akf_envelope_partitioned(&k, 50_000, seed, 1)?;
        let mut mismatches = 0;
        for parts in [2, 7, 64] {
            mismatches += usize::from(mc::sample_aef_envelope_partitioned(&p, 50_000, seed, parts)? != base);
            mismatches += usize::from(mc::sample_akf_envelope_partitioned(&k, 50_000, seed, parts)? != kbase);
        }
        mismatches += usize::from(mc::sample_aef_envelope_partitioned(&p, 50_000, seed, 1)? != base);
        Ok(Worst { value: mismatches as f64, at: "partitions 1, 2, 7, 64 and a repeat run".into() })
    })();
    CheckResult::from_result("determinism: mismatching sample streams", 0.0, r)
}

/// Run the battery.
pub fn run(level: Level, seed: u64, fault: Fault) -> ValidationReport {
    let ctrl = SeriesControl::from_env().unwrap_or_default();
    let mut checks = Vec::new();
    let (aef_mc, akf_mc) = mc_configs();
    match level {
        Level::Quick => {
            checks.extend(check_moments(Scope::Corners, fault));
            checks.extend(check_lattice_results());
            checks.extend(check_mc(&aef_mc[..1], &[], 100_000, seed, fault, &ctrl));
        }
        Level::Full => {
            checks.extend(check_moments(Scope::Full, fault));
            checks.extend(check_cdfs(Scope::Full, fault, &ctrl));
            checks.push(check_fisher(fault, &ctrl));
            checks.extend(check_mc(&aef_mc, &akf_mc, 1_000_000, seed, fault, &ctrl));
            checks.push(check_truncation(20, seed, fault, &ctrl));
            checks.extend(check_asymptotes(fault, &ctrl));
            checks.extend(check_lattice_results());
            checks.push(check_reductions(&ctrl));
            checks.push(check_determinism(seed));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    ValidationReport { level, seed, fault, pass, checks }
}
