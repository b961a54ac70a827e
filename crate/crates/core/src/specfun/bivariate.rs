//! Two-variable hypergeometric series: Humbert Psi1 and the Kampé de Fériet
//! function F^{2:0;0}_{1:1;0}.
//!
//! With non-negative arguments every term is non-negative and the double
//! series is summed over anti-diagonals `m + n = d`. A negative argument makes
//! the anti-diagonal sum cancel catastrophically (individual terms grow like
//! `(1 - |x|)^-(a + d)` while the sum stays O(1)), so those cases are summed
//! row by row with the inner single series evaluated in closed form by the
//! one-variable engines, which handle negative arguments through
//! transformations.

use crate::error::{domain, Error, Result};

use super::hyp1f1::kummer_1f1;
use super::hyp2f1::{gauss_2f1, gauss_2f1_scaled};
use super::{is_nonpositive_integer, SeriesControl, SeriesResult};

/// Summation scheme for the double series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summation {
    /// Anti-diagonals for non-negative arguments, rows otherwise.
    Auto,
    /// Expanding anti-diagonals `m + n = d`; stops after two consecutive
    /// diagonals fall under tolerance.
    AntiDiagonal,
    /// Row sums over one index with the inner series in closed form.
    Rows,
}

/// Factor `num / den` that is zero whenever `num` is, even if `den` is too.
fn safe_ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Anti-diagonal summation. `row_start(m)` gives `T(m+1, 0) / T(m, 0)`,
/// `col_step(m, n)` gives `T(m, n+1) / T(m, n)`. `ratio_limit` is the limiting
/// ratio of successive diagonal masses and floors the tail extrapolation.
fn sum_antidiagonal(
    mut row_start: impl FnMut(usize) -> f64,
    mut col_step: impl FnMut(usize, usize) -> f64,
    ratio_limit: f64,
    ctrl: &SeriesControl,
) -> SeriesResult {
    let mut diag: Vec<f64> = vec![1.0]; // diag[m] = T(m, d - m)
    let mut first_col = 1.0; // T(d, 0)
    let mut sum = 1.0;
    let mut sum_abs = 1.0;
    let mut prev_mass = 1.0;
    let mut quiet = 0;
    let mut mass = 1.0;
    for d in 1..ctrl.max_terms {
        // advance every T(m, d-1-m) to T(m, d-m), then append T(d, 0)
        for (m, t) in diag.iter_mut().enumerate() {
            if *t != 0.0 {
                *t *= col_step(m, d - 1 - m);
            }
        }
        if first_col != 0.0 {
            first_col *= row_start(d - 1);
        }
        diag.push(first_col);
        let dsum: f64 = diag.iter().sum();
        mass = diag.iter().map(|t| t.abs()).sum();
        sum += dsum;
        sum_abs += mass;
        if !sum.is_finite() {
            return SeriesResult { value: sum, terms_used: d + 1, est_error: f64::INFINITY, converged: false };
        }
        if mass == 0.0 && diag.iter().all(|t| *t == 0.0) {
            return SeriesResult::finish(sum, d + 1, f64::EPSILON * sum_abs, true, ctrl);
        }
        let q = (mass / prev_mass).max(ratio_limit);
        let tail = if q < 1.0 { mass * q / (1.0 - q) } else { f64::INFINITY };
        if mass <= prev_mass && tail.max(mass) <= 0.5 * ctrl.tolerance(sum) {
            quiet += 1;
            if quiet >= 2 {
                return SeriesResult::finish(sum, d + 1, tail.max(mass) + f64::EPSILON * sum_abs, true, ctrl);
            }
        } else {
            quiet = 0;
        }
        prev_mass = mass;
    }
    SeriesResult { value: sum, terms_used: ctrl.max_terms, est_error: mass + f64::EPSILON * sum_abs, converged: false }
}

/// Inner series value of one row: `series * exp(ln_scale)`.
struct RowValue {
    ln_scale: f64,
    series: SeriesResult,
}

/// Row summation `sum_k c_k * inner(k)` with `c_0 = 1`, `c_{k+1} = c_k * outer_ratio(k)`.
/// `ratio_limit` is the limiting magnitude of the outer ratio.
/// Each row is evaluated with its own control; when the combined estimate
/// misses the tolerance because of cancellation between rows, the rows are
/// re-evaluated once with a correspondingly tighter relative target.
fn sum_rows(
    mut outer_ratio: impl FnMut(usize) -> f64,
    mut inner: impl FnMut(usize, &SeriesControl) -> Result<RowValue>,
    ratio_limit: f64,
    ctrl: &SeriesControl,
) -> Result<SeriesResult> {
    let first = sum_rows_once(&mut outer_ratio, &mut inner, ratio_limit, ctrl, ctrl)?;
    if first.converged || !first.est_error.is_finite() || first.value == 0.0 {
        return Ok(first);
    }
    let amplification = first.est_error / ctrl.tolerance(first.value);
    let tighter = ctrl.with_rel_tol((ctrl.rel_tol / (4.0 * amplification)).max(1e-17));
    sum_rows_once(&mut outer_ratio, &mut inner, ratio_limit, ctrl, &tighter)
}

fn sum_rows_once(
    outer_ratio: &mut impl FnMut(usize) -> f64,
    inner: &mut impl FnMut(usize, &SeriesControl) -> Result<RowValue>,
    ratio_limit: f64,
    ctrl: &SeriesControl,
    inner_ctrl: &SeriesControl,
) -> Result<SeriesResult> {
    let mut ln_c = 0.0_f64;
    let mut s_c = 1.0_f64;
    let mut sum = 0.0;
    let mut sum_abs = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    let mut prev = f64::INFINITY;
    let mut quiet = 0;
    let mut last = f64::INFINITY;
    for k in 0..ctrl.max_terms {
        let row = inner(k, inner_ctrl)?;
        converged &= row.series.est_error.is_finite();
        let w = (ln_c + row.ln_scale).exp();
        let t = s_c * w * row.series.value;
        sum += t;
        sum_abs += t.abs();
        err += w * row.series.est_error;
        if !sum.is_finite() {
            return Ok(SeriesResult { value: sum, terms_used: k + 1, est_error: f64::INFINITY, converged: false });
        }
        let r = outer_ratio(k);
        if r == 0.0 {
            let est = err + f64::EPSILON * sum_abs;
            return Ok(SeriesResult::finish(sum, k + 1, est, converged, ctrl));
        }
        let q = if prev.is_finite() && prev > 0.0 { (t.abs() / prev).max(ratio_limit) } else { 1.0 };
        last = if q < 1.0 { t.abs() * q / (1.0 - q) } else { f64::INFINITY };
        if k >= 2 && t.abs() <= prev && last <= 0.5 * ctrl.tolerance(sum) {
            quiet += 1;
            if quiet >= 2 {
                let est = last + err + f64::EPSILON * sum_abs;
                return Ok(SeriesResult::finish(sum, k + 1, est, converged, ctrl));
            }
        } else {
            quiet = 0;
        }
        prev = t.abs();
        ln_c += r.abs().ln();
        s_c *= r.signum();
    }
    Ok(SeriesResult { value: sum, terms_used: ctrl.max_terms, est_error: last + err, converged: false })
}

fn finite_args(args: &[f64]) -> Result<()> {
    if args.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        domain(format!("bivariate series arguments must be finite, got {args:?}"))
    }
}

/// Supplies 1F1(a + m; c'; y) for m = 0, 1, 2, ... in order.
///
/// For y < 0 and large m both the direct series and its Kummer transform
/// cancel heavily, while the three-term recurrence in `a` is well conditioned
/// (the function oscillates and neither solution dominates). The first two
/// rows come from the series, later ones from the recurrence.
struct KummerRows {
    a: f64,
    cp: f64,
    y: f64,
    prev: Option<(SeriesResult, SeriesResult)>,
    peak: f64,
}

impl KummerRows {
    fn new(a: f64, cp: f64, y: f64) -> Self {
        Self { a, cp, y, prev: None, peak: 0.0 }
    }

    fn get(&mut self, m: usize, ctrl: &SeriesControl) -> Result<SeriesResult> {
        let direct = self.y >= 0.0 || m < 2 || self.prev.is_none();
        let cur = if direct {
            kummer_1f1(self.a + m as f64, self.cp, self.y, ctrl)?
        } else {
            let (lo, hi) = self.prev.expect("checked above");
            // (b - A) M(A - 1) + (2A - b + z) M(A) - A M(A + 1) = 0 with A = a + m - 1
            let am = self.a + m as f64 - 1.0;
            let value = ((2.0 * am - self.cp + self.y) * hi.value + (self.cp - am) * lo.value) / am;
            self.peak = self.peak.max(value.abs());
            let est = hi.est_error.max(lo.est_error) + 4.0 * f64::EPSILON * m as f64 * self.peak;
            SeriesResult { value, terms_used: 1, est_error: est, converged: true }
        };
        if m == 0 {
            self.peak = cur.value.abs();
            self.prev = Some((cur, cur));
        } else if let Some((_, hi)) = self.prev {
            self.prev = Some((hi, cur));
        }
        self.peak = self.peak.max(cur.value.abs());
        Ok(cur)
    }
}

/// Humbert Psi1(a; b; c, c'; x, y) = sum (a)_{m+n} (b)_m / ((c)_m (c')_n) x^m y^n / (m! n!).
pub fn humbert_psi1(a: f64, b: f64, c: f64, cp: f64, x: f64, y: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
    humbert_psi1_with(a, b, c, cp, x, y, Summation::Auto, ctrl)
}

/// [`humbert_psi1`] with an explicit summation scheme.
#[allow(clippy::too_many_arguments)]
pub fn humbert_psi1_with(
    a: f64,
    b: f64,
    c: f64,
    cp: f64,
    x: f64,
    y: f64,
    how: Summation,
    ctrl: &SeriesControl,
) -> Result<SeriesResult> {
    finite_args(&[a, b, c, cp, x, y])?;
    if x.abs() >= 1.0 {
        return domain(format!("Psi1 converges only for |x| < 1, got x = {x}"));
    }
    if is_nonpositive_integer(cp) {
        return domain(format!("Psi1 undefined: c' = {cp} is a non-positive integer"));
    }
    if is_nonpositive_integer(c) && !(is_nonpositive_integer(b) && b >= c) {
        return domain(format!("Psi1 undefined: c = {c} is a non-positive integer not cancelled by b = {b}"));
    }
    if how == Summation::Auto {
        // exact one-variable slices
        if b == 0.0 || x == 0.0 {
            return kummer_1f1(a, cp, y, ctrl);
        }
        if y == 0.0 {
            return gauss_2f1(a, b, c, x, ctrl);
        }
    }
    let how = match how {
        Summation::Auto if x >= 0.0 && y >= 0.0 => Summation::AntiDiagonal,
        Summation::Auto => Summation::Rows,
        other => other,
    };
    match how {
        Summation::AntiDiagonal => Ok(sum_antidiagonal(
            |m| {
                let mf = m as f64;
                safe_ratio((a + mf) * (b + mf) * x, (c + mf) * (mf + 1.0))
            },
            |m, n| {
                let (mf, nf) = (m as f64, n as f64);
                safe_ratio((a + mf + nf) * y, (cp + nf) * (nf + 1.0))
            },
            x.abs(),
            ctrl,
        )),
        _ => {
            // rows over n: sum_n (a)_n y^n / ((c')_n n!) 2F1(a + n, b; c; x)
            let over_n = || {
                sum_rows(
                    |n| {
                        let nf = n as f64;
                        safe_ratio((a + nf) * y, (cp + nf) * (nf + 1.0))
                    },
                    |n, inner| {
                        let s = gauss_2f1_scaled(a + n as f64, b, c, x, inner)?;
                        Ok(RowValue { ln_scale: s.ln_scale, series: s.series })
                    },
                    0.0,
                    ctrl,
                )
            };
            // rows over m: sum_m (a)_m (b)_m x^m / ((c)_m m!) 1F1(a + m; c'; y)
            let over_m = || {
                let mut rec = KummerRows::new(a, cp, y);
                sum_rows(
                    |m| {
                        let mf = m as f64;
                        safe_ratio((a + mf) * (b + mf) * x, (c + mf) * (mf + 1.0))
                    },
                    |m, inner| Ok(RowValue { ln_scale: 0.0, series: rec.get(m, inner)? }),
                    x.abs(),
                    ctrl,
                )
            };
            if x < 0.0 {
                return over_n();
            }
            let first = over_m()?;
            if first.converged || y >= 0.0 {
                return Ok(first);
            }
            // x > 0 > y: the 1F1 rows oscillate in m and may cancel; try the other order
            let second = over_n()?;
            let rel = |r: &SeriesResult| r.est_error / r.value.abs();
            Ok(if rel(&second) < rel(&first) { second } else { first })
        }
    }
}

/// Kampé de Fériet function
/// F^{2:0;0}_{1:1;0}[a1, a2 : - ; - / b1 : c1 ; - ; x, y]
/// = sum (a1)_{m+n} (a2)_{m+n} / ((b1)_{m+n} (c1)_m) x^m y^n / (m! n!).
///
/// Converges for every x and |y| < 1.
pub fn kdf_2_1(a1: f64, a2: f64, b1: f64, c1: f64, x: f64, y: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
    kdf_2_1_with(a1, a2, b1, c1, x, y, Summation::Auto, ctrl)
}

/// [`kdf_2_1`] with an explicit summation scheme.
#[allow(clippy::too_many_arguments)]
pub fn kdf_2_1_with(
    a1: f64,
    a2: f64,
    b1: f64,
    c1: f64,
    x: f64,
    y: f64,
    how: Summation,
    ctrl: &SeriesControl,
) -> Result<SeriesResult> {
    finite_args(&[a1, a2, b1, c1, x, y])?;
    if y.abs() >= 1.0 {
        return Err(Error::NonConvergence(format!("Kampé de Fériet series needs |y| < 1, got y = {y}")));
    }
    if is_nonpositive_integer(b1) || is_nonpositive_integer(c1) {
        return domain(format!("Kampé de Fériet series undefined for b1 = {b1}, c1 = {c1}"));
    }
    if how == Summation::Auto {
        if x == 0.0 {
            return gauss_2f1(a1, a2, b1, y, ctrl);
        }
        if y == 0.0 && c1 == a2 {
            return kummer_1f1(a1, b1, x, ctrl);
        }
    }
    let how = match how {
        Summation::Auto if x >= 0.0 && y >= 0.0 => Summation::AntiDiagonal,
        Summation::Auto => Summation::Rows,
        other => other,
    };
    match how {
        Summation::AntiDiagonal => Ok(sum_antidiagonal(
            |m| {
                let mf = m as f64;
                safe_ratio((a1 + mf) * (a2 + mf) * x, (b1 + mf) * (c1 + mf) * (mf + 1.0))
            },
            |m, n| {
                let s = (m + n) as f64;
                let nf = n as f64;
                safe_ratio((a1 + s) * (a2 + s) * y, (b1 + s) * (nf + 1.0))
            },
            y.abs(),
            ctrl,
        )),
        _ => {
            // rows over m: sum_m (a1)_m (a2)_m x^m / ((b1)_m (c1)_m m!) 2F1(a1 + m, a2 + m; b1 + m; y)
            sum_rows(
                |m| {
                    let mf = m as f64;
                    safe_ratio((a1 + mf) * (a2 + mf) * x, (b1 + mf) * (c1 + mf) * (mf + 1.0))
                },
                |m, inner| {
                    let mf = m as f64;
                    let s = gauss_2f1_scaled(a1 + mf, a2 + mf, b1 + mf, y, inner)?;
                    Ok(RowValue { ln_scale: s.ln_scale, series: s.series })
                },
                0.0,
                ctrl,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{gauss_2f1, kummer_1f1};
    use super::*;

    fn ctrl() -> SeriesControl {
        SeriesControl::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn psi1_slices() {
        let (a, b, c, cp) = (1.3, 0.7, 2.1, 1.6);
        for &x in &[-0.8, -0.2, 0.3, 0.9] {
            let p = humbert_psi1(a, b, c, cp, x, 0.0, &ctrl()).unwrap().value;
            let g = gauss_2f1(a, b, c, x, &ctrl()).unwrap().value;
            assert!(close(p, g, 1e-12), "x = {x}: {p} vs {g}");
        }
        for &y in &[-4.0, 0.5, 8.0] {
            let p = humbert_psi1(a, b, c, cp, 0.0, y, &ctrl()).unwrap().value;
            let k = kummer_1f1(a, cp, y, &ctrl()).unwrap().value;
            assert!(close(p, k, 1e-12), "y = {y}: {p} vs {k}");
        }
    }

    #[test]
    fn psi1_zero_b_ignores_x_even_with_pole_in_c() {
        let want = kummer_1f1(2.5, 2.5, 3.0, &ctrl()).unwrap().value;
        for &x in &[-0.95, -0.5, 0.4] {
            let p = humbert_psi1(2.5, 0.0, -1.0, 2.5, x, 3.0, &ctrl()).unwrap();
            assert!(p.converged);
            assert!(close(p.value, want, 1e-12), "x = {x}");
        }
        assert!(humbert_psi1(2.5, 0.5, -1.0, 2.5, 0.1, 3.0, &ctrl()).is_err());
        assert!(humbert_psi1(2.5, 0.5, 1.0, 2.5, 1.0, 3.0, &ctrl()).is_err());
    }

    #[test]
    fn schemes_agree_on_positive_quadrant() {
        let d = humbert_psi1_with(1.2, 0.8, 1.9, 2.3, 0.6, 2.0, Summation::AntiDiagonal, &ctrl()).unwrap();
        let r = humbert_psi1_with(1.2, 0.8, 1.9, 2.3, 0.6, 2.0, Summation::Rows, &ctrl()).unwrap();
        assert!(close(d.value, r.value, 1e-12), "{d:?} {r:?}");
        let d = kdf_2_1_with(2.0, 1.5, 2.5, 1.5, 1.2, 0.4, Summation::AntiDiagonal, &ctrl()).unwrap();
        let r = kdf_2_1_with(2.0, 1.5, 2.5, 1.5, 1.2, 0.4, Summation::Rows, &ctrl()).unwrap();
        assert!(close(d.value, r.value, 1e-12), "{d:?} {r:?}");
    }

    #[test]
    fn kdf_slices() {
        assert_eq!(kdf_2_1(1.1, 2.2, 3.3, 4.4, 0.0, 0.0, &ctrl()).unwrap().value, 1.0);
        // y = 0 with c1 = a2 collapses to 1F1(a1; b1; x)
        for &x in &[-1.5, 0.7, 2.5] {
            let k = kdf_2_1(1.7, 0.9, 2.6, 0.9, x, 0.0, &ctrl()).unwrap().value;
            let want = kummer_1f1(1.7, 2.6, x, &ctrl()).unwrap().value;
            assert!(close(k, want, 1e-12), "x = {x}");
        }
        for &y in &[-0.9, -0.3, 0.6] {
            let k = kdf_2_1(1.7, 0.9, 2.6, 1.4, 0.0, y, &ctrl()).unwrap().value;
            let want = gauss_2f1(1.7, 0.9, 2.6, y, &ctrl()).unwrap().value;
            assert!(close(k, want, 1e-12), "y = {y}");
        }
        assert!(kdf_2_1(1.0, 1.0, 2.0, 1.0, 0.1, 1.0, &ctrl()).is_err());
    }
}
