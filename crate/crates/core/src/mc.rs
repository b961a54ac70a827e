//! Physical-model Monte-Carlo sampler and Kolmogorov-Smirnov machinery.
//!
//! The samplers build the envelope from its Gaussian components and an
//! inverse-Nakagami shadowing factor, so they share no formula with the
//! analytical densities they are used to check.
//!
//! Random streams are counter-based: draw `i` belongs to block `i / 1024`, and
//! every block owns the ChaCha8 stream `(seed, block)`. Output is therefore a
//! pure function of `(config, n, seed)` whatever the number of partitions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aef::{AefDist, AefEnvelope};
use crate::akf::{AkfDist, AkfEnvelope};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, integrate_log, QuadControl};
use crate::{AefParams, AkfParams, Format, SeriesControl, SnrDistribution};

/// Draws per independent random stream.
pub const BLOCK: usize = 1024;

/// Default KS acceptance threshold at `n = 10^6`.
pub const KS_THRESHOLD: f64 = 0.002;

/// Physical alpha-eta-F configuration: `2 * mu_int` clusters of Gaussian pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysAef {
    pub alpha: f64,
    pub mu_int: u32,
    pub format: Format,
    pub eta: f64,
    /// Format I in-phase variance.
    pub sigma_x2: f64,
    /// Format I quadrature variance.
    pub sigma_y2: f64,
    /// Format II common variance.
    pub sigma2: f64,
    pub ms: f64,
}

impl PhysAef {
    pub fn validate(&self) -> Result<()> {
        check_common(self.alpha, self.mu_int, self.ms)?;
        match self.format {
            Format::FormatI => {
                if !(self.sigma_x2 > 0.0 && self.sigma_y2 > 0.0 && self.sigma_x2.is_finite() && self.sigma_y2.is_finite()) {
                    return domain("Format I variances must be positive and finite");
                }
                if ((self.sigma_x2 / self.sigma_y2) / self.eta - 1.0).abs() > 1e-12 {
                    return domain(format!(
                        "Format I requires eta = sigma_x2 / sigma_y2, got eta = {} and ratio {}",
                        self.eta,
                        self.sigma_x2 / self.sigma_y2
                    ));
                }
            }
            Format::FormatII => {
                if !(self.eta > -1.0 && self.eta < 1.0) {
                    return domain(format!("Format II requires -1 < eta < 1, got {}", self.eta));
                }
                if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
                    return domain("Format II variance must be positive and finite");
                }
            }
        }
        Ok(())
    }

    /// Mean of `R^alpha`: the total Gaussian power before the nonlinearity.
    pub fn lambda(&self) -> f64 {
        let clusters = 2.0 * self.mu_int as f64;
        match self.format {
            Format::FormatI => clusters * (self.sigma_x2 + self.sigma_y2),
            Format::FormatII => clusters * 2.0 * self.sigma2,
        }
    }
}

/// Physical alpha-kappa-F configuration: `mu_int` clusters with dominant components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysAkf {
    pub alpha: f64,
    pub mu_int: u32,
    pub sigma2: f64,
    pub kappa: f64,
    /// In-phase means, one per cluster.
    pub p: Vec<f64>,
    /// Quadrature means, one per cluster.
    pub q: Vec<f64>,
    pub ms: f64,
}

impl PhysAkf {
    pub fn validate(&self) -> Result<()> {
        check_common(self.alpha, self.mu_int, self.ms)?;
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return domain("sigma2 must be positive and finite");
        }
        let m = self.mu_int as usize;
        if self.p.len() != m || self.q.len() != m {
            return domain(format!("need {m} dominant components per axis, got {} and {}", self.p.len(), self.q.len()));
        }
        let k = self.kappa_from_means();
        if (k - self.kappa).abs() > 1e-12 * self.kappa.max(1.0) {
            return domain(format!("kappa = {} disagrees with the dominant components ({k})", self.kappa));
        }
        Ok(())
    }

    /// Total dominant power `d^2`.
    pub fn d2(&self) -> f64 {
        self.p.iter().chain(&self.q).map(|v| v * v).sum()
    }

    /// `d^2 / (2 mu sigma^2)` recomputed from the means.
    pub fn kappa_from_means(&self) -> f64 {
        self.d2() / (2.0 * self.mu_int as f64 * self.sigma2)
    }

    /// Mean of `R^alpha`.
    pub fn mean_power(&self) -> f64 {
        2.0 * self.mu_int as f64 * self.sigma2 + self.d2()
    }
}

fn check_common(alpha: f64, mu_int: u32, ms: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive and finite, got {alpha}"));
    }
    if mu_int == 0 {
        return domain("at least one cluster is required");
    }
    if !(ms > 1.0 && ms.is_finite()) {
        return domain(format!("ms must exceed 1, got {ms}"));
    }
    Ok(())
}

fn integer_mu(mu: f64) -> Result<u32> {
    if mu.fract() == 0.0 && mu >= 1.0 && mu <= u32::MAX as f64 {
        Ok(mu as u32)
    } else {
        Err(Error::Unsupported(format!("physical sampler requires integer mu, got {mu}")))
    }
}

fn power_scale(natural: f64, target: Option<f64>) -> Result<f64> {
    match target {
        None => Ok(1.0),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t / natural),
        Some(t) => domain(format!("power target must be positive and finite, got {t}")),
    }
}

/// Physical configuration for alpha-eta-F parameters. Without a power target
/// the quadrature variance (Format I) or common variance (Format II) is 1;
/// with one, all variances are scaled so that `E[R^alpha]` equals it.
pub fn make_phys_aef(params: &AefParams, power_target: Option<f64>) -> Result<PhysAef> {
    params.validate()?;
    let mu_int = integer_mu(params.mu)?;
    let mut phys = match params.format {
        Format::FormatI => PhysAef {
            alpha: params.alpha,
            mu_int,
            format: Format::FormatI,
            eta: params.eta,
            sigma_x2: params.eta,
            sigma_y2: 1.0,
            sigma2: 0.0,
            ms: params.ms,
        },
        Format::FormatII => PhysAef {
            alpha: params.alpha,
            mu_int,
            format: Format::FormatII,
            eta: params.eta,
            sigma_x2: 0.0,
            sigma_y2: 0.0,
            sigma2: 1.0,
            ms: params.ms,
        },
    };
    let s = power_scale(phys.lambda(), power_target)?;
    phys.sigma_x2 *= s;
    phys.sigma_y2 *= s;
    phys.sigma2 *= s;
    phys.validate()?;
    Ok(phys)
}

/// Physical configuration for alpha-kappa-F parameters: `sigma^2 = 1` (before
/// power scaling) and the dominant power split evenly, `p_i = q_i = sqrt(kappa) sigma`.
pub fn make_phys_akf(params: &AkfParams, power_target: Option<f64>) -> Result<PhysAkf> {
    params.validate()?;
    let mu_int = integer_mu(params.mu)?;
    let natural = 2.0 * params.mu * (1.0 + params.kappa);
    let sigma2 = power_scale(natural, power_target)?;
    let mean = (params.kappa * sigma2).sqrt();
    let m = mu_int as usize;
    let phys = PhysAkf {
        alpha: params.alpha,
        mu_int,
        sigma2,
        kappa: params.kappa,
        p: vec![mean; m],
        q: vec![mean; m],
        ms: params.ms,
    };
    phys.validate()?;
    Ok(phys)
}

/// Fill `n` draws block by block. `partitions` only decides how blocks are
/// grouped into parallel tasks; it never changes the output.
fn draw_blocks<F>(n: usize, seed: u64, partitions: usize, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let mut out = vec![0.0; n];
    let blocks = n.div_ceil(BLOCK);
    if blocks == 0 {
        return out;
    }
    let per_task = blocks.div_ceil(partitions.clamp(1, blocks)) * BLOCK;
    out.par_chunks_mut(per_task).enumerate().for_each(|(task, chunk)| {
        let first_block = task * per_task / BLOCK;
        for (i, block) in chunk.chunks_mut(BLOCK).enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((first_block + i) as u64);
            for v in block.iter_mut() {
                *v = draw(&mut rng);
            }
        }
    });
    out
}

fn default_partitions() -> usize {
    rayon::current_num_threads()
}

fn inv_gamma_sampler(ms: f64) -> Result<impl Fn(&mut ChaCha8Rng) -> f64 + Sync> {
    if !(ms > 1.0 && ms.is_finite()) {
        return domain(format!("ms must exceed 1, got {ms}"));
    }
    let g = Gamma::new(ms, 1.0).map_err(|e| Error::Domain(format!("shadowing law: {e}")))?;
    // Z^2 = (ms - 1) / G with G ~ Gamma(ms, 1) has E[Z^2] = 1
    Ok(move |rng: &mut ChaCha8Rng| (ms - 1.0) / g.sample(rng))
}

/// Squared inverse-Nakagami shadowing factor `Z^2` with `E[Z^2] = 1`.
pub fn sample_inv_nakagami_sq(ms: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let z2 = inv_gamma_sampler(ms)?;
    Ok(draw_blocks(n, seed, default_partitions(), z2))
}

/// Alpha-eta-F envelope draws.
pub fn sample_aef_envelope(p: &PhysAef, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_aef_envelope_partitioned(p, n, seed, default_partitions())
}

/// [`sample_aef_envelope`] with an explicit number of parallel partitions.
pub fn sample_aef_envelope_partitioned(p: &PhysAef, n: usize, seed: u64, partitions: usize) -> Result<Vec<f64>> {
    p.validate()?;
    let z2 = inv_gamma_sampler(p.ms)?;
    let clusters = 2 * p.mu_int as usize;
    let inv_alpha = 1.0 / p.alpha;
    // Format I: independent axes. Format II: X = s N1, Y = s (eta N1 + sqrt(1 - eta^2) N2).
    let (sx, sy, mix, rest) = match p.format {
        Format::FormatI => (p.sigma_x2.sqrt(), p.sigma_y2.sqrt(), 0.0, 1.0),
        Format::FormatII => (p.sigma2.sqrt(), p.sigma2.sqrt(), p.eta, (1.0 - p.eta * p.eta).sqrt()),
    };
    Ok(draw_blocks(n, seed, partitions, |rng| {
        let shadow = z2(rng);
        let mut w = 0.0;
        for _ in 0..clusters {
            let n1: f64 = rng.sample(StandardNormal);
            let n2: f64 = rng.sample(StandardNormal);
            let x = sx * n1;
            let y = sy * (mix * n1 + rest * n2);
            w += x * x + y * y;
        }
        (shadow * w).powf(inv_alpha)
    }))
}

/// Alpha-kappa-F envelope draws.
pub fn sample_akf_envelope(p: &PhysAkf, n: usize, seed: u64) -> Result<Vec<f64>> {
    sample_akf_envelope_partitioned(p, n, seed, default_partitions())
}

/// [`sample_akf_envelope`] with an explicit number of parallel partitions.
pub fn sample_akf_envelope_partitioned(p: &PhysAkf, n: usize, seed: u64, partitions: usize) -> Result<Vec<f64>> {
    p.validate()?;
    let z2 = inv_gamma_sampler(p.ms)?;
    let s = p.sigma2.sqrt();
    let inv_alpha = 1.0 / p.alpha;
    Ok(draw_blocks(n, seed, partitions, |rng| {
        let shadow = z2(rng);
        let mut w = 0.0;
        for (pi, qi) in p.p.iter().zip(&p.q) {
            let x = s * rng.sample::<f64, _>(StandardNormal) + pi;
            let y = s * rng.sample::<f64, _>(StandardNormal) + qi;
            w += x * x + y * y;
        }
        (shadow * w).powf(inv_alpha)
    }))
}

/// Sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    samples: Vec<f64>,
}

impl EmpiricalDist {
    /// Sorts the sample. Fails on an empty sample or NaN.
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|v| v.is_nan()) {
            return domain("sample contains NaN");
        }
        samples.par_sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalDist { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.n() - 1]
    }

    /// Sample mean of `x^2`.
    pub fn mean_square(&self) -> f64 {
        self.samples.par_iter().map(|v| v * v).sum::<f64>() / self.n() as f64
    }

    /// Sample mean of `x^p`.
    pub fn mean_pow(&self, p: f64) -> f64 {
        self.samples.par_iter().map(|v| v.powf(p)).sum::<f64>() / self.n() as f64
    }

    /// The same sample under an increasing map.
    pub fn map_increasing(&self, f: impl Fn(f64) -> f64 + Sync) -> Result<Self> {
        EmpiricalDist::new(self.samples.par_iter().map(|&v| f(v)).collect())
    }
}

/// Two-sided Kolmogorov-Smirnov statistic `sup |F_n - F|`.
pub fn ks_distance(emp: &EmpiricalDist, cdf: impl Fn(f64) -> f64 + Sync) -> Result<f64> {
    let n = emp.n() as f64;
    let d = emp
        .samples
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            if f.is_nan() {
                f64::INFINITY
            } else {
                ((i + 1) as f64 / n - f).max(f - i as f64 / n)
            }
        })
        .reduce(|| 0.0, f64::max);
    if d.is_infinite() {
        return domain("reference CDF returned NaN");
    }
    Ok(d)
}

/// Outcome of a goodness-of-fit check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_stat: f64,
    pub n: usize,
    pub threshold: f64,
    pub pass: bool,
}

impl GofReport {
    pub fn new(ks_stat: f64, n: usize, threshold: f64) -> Self {
        GofReport { ks_stat, n, threshold, pass: ks_stat <= threshold }
    }
}

/// CDF tabulated on a logarithmic grid and interpolated with cubic Hermite
/// polynomials in `ln x`, using the density for the slopes. Outside the grid
/// the tails continue as power laws matched to the end points.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    grid: LogGrid,
    f: Vec<f64>,
    /// `dF / d ln x` at the nodes.
    d: Vec<f64>,
}

/// Uniform grid in `ln x`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl LogGrid {
    fn node(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }
}

/// Nodes used when tabulating a CDF for a KS test.
pub const TABLE_NODES: usize = 3000;

impl TabulatedCdf {
    fn grid(lo: f64, hi: f64, len: usize) -> Result<LogGrid> {
        if !(lo > 0.0 && hi > lo && hi.is_finite() && len >= 2) {
            return domain(format!("table range must satisfy 0 < lo < hi, got ({lo}, {hi})"));
        }
        let (a, b) = (lo.ln(), hi.ln());
        Ok(LogGrid { start: a, step: (b - a) / (len - 1) as f64, len })
    }

    /// Tabulate an SNR distribution from its CDF series and density.
    pub fn from_snr(dist: &impl SnrDistribution, lo: f64, hi: f64, len: usize, ctrl: &SeriesControl) -> Result<Self> {
        let g = Self::grid(lo, hi, len)?;
        let rows: Vec<(f64, f64)> = (0..len)
            .into_par_iter()
            .map(|i| {
                let x = g.node(i).exp();
                let f = dist.snr_cdf(x, ctrl)?;
                if !f.converged {
                    return Err(Error::NonConvergence(format!("CDF series at gamma = {x}: {f:?}")));
                }
                Ok((f.value, x * dist.snr_pdf(x)?))
            })
            .collect::<Result<_>>()?;
        let (f, d) = rows.into_iter().unzip();
        Ok(TabulatedCdf { grid: g, f, d })
    }

    /// Tabulate a CDF by cumulative adaptive quadrature of a density on `[0, hi]`.
    /// Mass below `lo` is integrated on a logarithmic scale down to `lo * 1e-12`;
    /// the density must vanish at zero like a positive power.
    pub fn from_density(pdf: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, len: usize) -> Result<Self> {
        let g = Self::grid(lo, hi, len)?;
        let qc = QuadControl { rel_tol: 1e-10, abs_tol: 1e-14, max_intervals: 2000 };
        let head = integrate_log(&pdf, lo * 1e-12, lo, &qc)?.value;
        let pieces: Vec<f64> = (0..len - 1)
            .into_par_iter()
            .map(|i| integrate(|s| s.exp() * pdf(s.exp()), g.node(i), g.node(i + 1), &qc).map(|r| r.value))
            .collect::<Result<_>>()?;
        let mut f = Vec::with_capacity(len);
        f.push(head);
        for p in pieces {
            f.push(f.last().copied().unwrap_or(0.0) + p);
        }
        let d = (0..len).map(|i| g.node(i).exp() * pdf(g.node(i).exp())).collect();
        Ok(TabulatedCdf { grid: g, f, d })
    }

    /// Tabulated value at the right end of the grid.
    pub fn upper_value(&self) -> f64 {
        self.f[self.f.len() - 1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let g = &self.grid;
        let s = x.ln();
        let last = g.len - 1;
        if s <= g.start {
            // F ~ c x^k below the grid
            let (f0, d0) = (self.f[0], self.d[0]);
            if f0 <= 0.0 {
                return 0.0;
            }
            return f0 * ((d0 / f0) * (s - g.start)).exp();
        }
        if s >= g.node(last) {
            // 1 - F ~ c x^-k above the grid
            let (f1, d1) = (self.f[last], self.d[last]);
            let tail = 1.0 - f1;
            if tail <= 0.0 {
                return 1.0;
            }
            return 1.0 - tail * (-(d1 / tail) * (s - g.node(last))).exp();
        }
        let t = (s - g.start) / g.step;
        let i = (t.floor() as usize).min(last - 1);
        let u = t - i as f64;
        let h = g.step;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        (h00 * self.f[i] + h10 * h * self.d[i] + h01 * self.f[i + 1] + h11 * h * self.d[i + 1]).clamp(0.0, 1.0)
    }
}

/// Envelope- and SNR-domain fits of one Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub envelope: GofReport,
    pub snr: GofReport,
    /// Empirical `E[R^2]`, used as the envelope power and SNR normaliser.
    pub omega_emp: f64,
    /// Empirical `E[R^alpha]` against its physical value.
    pub mean_r_alpha: f64,
    pub lambda: f64,
}

fn table_range(emp: &EmpiricalDist) -> (f64, f64) {
    (emp.min() * 0.5, emp.max() * 2.0)
}

fn run_checks(
    r: Vec<f64>,
    alpha: f64,
    lambda: f64,
    envelope_pdf: impl Fn(f64, f64) -> Result<f64> + Sync,
    snr: impl Fn(f64, f64) -> Result<TabulatedCdf>,
    threshold: f64,
) -> Result<McCheck> {
    let emp = EmpiricalDist::new(r)?;
    let n = emp.n();
    let omega = emp.mean_square();
    let mean_r_alpha = emp.mean_pow(alpha);

    let (lo, hi) = table_range(&emp);
    let env = TabulatedCdf::from_density(|x| envelope_pdf(x, omega).unwrap_or(f64::NAN), lo, hi, TABLE_NODES)?;
    let envelope = GofReport::new(ks_distance(&emp, |x| env.eval(x))?, n, threshold);

    // gamma = gamma_bar R^2 / Omega with gamma_bar = 1
    let g = emp.map_increasing(|x| x * x / omega)?;
    let (lo, hi) = table_range(&g);
    let tab = snr(lo, hi)?;
    let snr = GofReport::new(ks_distance(&g, |x| tab.eval(x))?, n, threshold);
    Ok(McCheck { envelope, snr, omega_emp: omega, mean_r_alpha, lambda })
}

/// Sample the physical alpha-eta-F model and compare with the analytical
/// envelope and SNR distributions.
pub fn check_aef(params: &AefParams, n: usize, seed: u64, threshold: f64, ctrl: &SeriesControl) -> Result<McCheck> {
    check_aef_impl(params, n, seed, threshold, ctrl, false)
}

/// [`check_aef`] against analytical expressions with every `H^2` negated.
#[doc(hidden)]
pub fn check_aef_negated_h2(params: &AefParams, n: usize, seed: u64, threshold: f64, ctrl: &SeriesControl) -> Result<McCheck> {
    check_aef_impl(params, n, seed, threshold, ctrl, true)
}

fn check_aef_impl(params: &AefParams, n: usize, seed: u64, threshold: f64, ctrl: &SeriesControl, negate: bool) -> Result<McCheck> {
    let phys = make_phys_aef(params, None)?;
    let r = sample_aef_envelope(&phys, n, seed)?;
    let mut dist = AefDist::new(*params, 1.0)?;
    if negate {
        dist = dist.with_negated_h2();
    }
    run_checks(
        r,
        params.alpha,
        phys.lambda(),
        |x, omega| {
            let env = AefEnvelope::new(*params, omega)?;
            if negate { env.with_negated_h2() } else { env }.envelope_pdf(x)
        },
        |lo, hi| TabulatedCdf::from_snr(&dist, lo, hi, TABLE_NODES, ctrl),
        threshold,
    )
}

/// Sample the physical alpha-kappa-F model and compare with the analytical
/// envelope and SNR distributions.
pub fn check_akf(params: &AkfParams, n: usize, seed: u64, threshold: f64, ctrl: &SeriesControl) -> Result<McCheck> {
    let phys = make_phys_akf(params, None)?;
    let r = sample_akf_envelope(&phys, n, seed)?;
    let dist = AkfDist::new(*params, 1.0)?;
    run_checks(
        r,
        params.alpha,
        phys.mean_power(),
        |x, omega| AkfEnvelope::new(*params, omega)?.envelope_pdf(x),
        |lo, hi| TabulatedCdf::from_snr(&dist, lo, hi, TABLE_NODES, ctrl),
        threshold,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_phys_examples() {
        let p = make_phys_aef(&AefParams::new(2.0, 2.0, 3.0, 4.0, Format::FormatI).unwrap(), None).unwrap();
        assert_eq!((p.sigma_x2, p.sigma_y2, p.mu_int), (2.0, 1.0, 3));
        let k = make_phys_akf(&AkfParams::new(2.0, 1.0, 2.0, 4.0).unwrap(), None).unwrap();
        assert_eq!(k.d2(), 4.0);
        assert!(k.p.iter().chain(&k.q).all(|&v| v == 1.0));
        assert!((k.kappa_from_means() - 1.0).abs() < 1e-12);
        let e = make_phys_aef(&AefParams::new(2.0, 2.0, 1.5, 4.0, Format::FormatI).unwrap(), None).unwrap_err();
        assert!(matches!(e, Error::Unsupported(_)));
    }

    #[test]
    fn power_target_scales_lambda() {
        let p = make_phys_aef(&AefParams::new(3.0, 0.4, 2.0, 4.0, Format::FormatII).unwrap(), Some(5.0)).unwrap();
        assert!((p.lambda() - 5.0).abs() < 1e-12);
        let k = make_phys_akf(&AkfParams::new(2.0, 3.0, 2.0, 4.0).unwrap(), Some(7.0)).unwrap();
        assert!((k.mean_power() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn partitioning_does_not_change_output() {
        let p = make_phys_akf(&AkfParams::new(2.5, 0.5, 2.0, 4.0).unwrap(), None).unwrap();
        let a = sample_akf_envelope_partitioned(&p, 5000, 7, 1).unwrap();
        for parts in [2, 3, 16, 1000] {
            assert_eq!(a, sample_akf_envelope_partitioned(&p, 5000, 7, parts).unwrap());
        }
        assert_ne!(a, sample_akf_envelope_partitioned(&p, 5000, 8, 1).unwrap());
        // a prefix of a longer run is the shorter run
        assert_eq!(a[..3000], sample_akf_envelope_partitioned(&p, 3000, 7, 4).unwrap()[..]);
    }

    #[test]
    fn shadowing_has_unit_mean() {
        let z = sample_inv_nakagami_sq(3.0, 200_000, 1).unwrap();
        let m = z.iter().sum::<f64>() / z.len() as f64;
        assert!((m - 1.0).abs() < 0.01, "mean {m}");
        assert!(sample_inv_nakagami_sq(1.0, 10, 1).is_err());
    }

    #[test]
    fn ks_basics() {
        let e = EmpiricalDist::new(vec![0.3]).unwrap();
        assert_eq!(ks_distance(&e, |_| 0.5).unwrap(), 0.5);
        assert!(matches!(EmpiricalDist::new(vec![]), Err(Error::EmptySample)));
        let n = 10_000;
        let u = EmpiricalDist::new((0..n).map(|i| (i as f64 + 0.5) / n as f64).collect()).unwrap();
        assert!(ks_distance(&u, |x| x.clamp(0.0, 1.0)).unwrap() <= 0.5 / n as f64 + 1e-15);
    }

    #[test]
    fn tabulated_density_matches_closed_form() {
        // Weibull-like density 2x exp(-x^2), CDF 1 - exp(-x^2)
        let t = TabulatedCdf::from_density(|x| 2.0 * x * (-x * x).exp(), 1e-3, 6.0, 400).unwrap();
        for &x in &[1e-4, 0.01, 0.3, 1.0, 2.2, 5.9, 8.0] {
            let want = -(-x * x as f64).exp_m1();
            assert!((t.eval(x) - want).abs() < 1e-8, "x = {x}: {} vs {want}", t.eval(x));
        }
    }

    #[test]
    fn physical_power_law_of_large_numbers() {
        let p = make_phys_aef(&AefParams::new(3.0, 0.5, 2.0, 5.0, Format::FormatI).unwrap(), None).unwrap();
        let r = EmpiricalDist::new(sample_aef_envelope(&p, 200_000, 3).unwrap()).unwrap();
        assert!((r.mean_pow(3.0) / p.lambda() - 1.0).abs() < 0.02);
    }
}
