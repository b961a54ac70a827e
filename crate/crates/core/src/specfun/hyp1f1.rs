//! Confluent hypergeometric function 1F1(a; b; z).

use crate::error::{domain, Result};

use super::{is_nonpositive_integer, sum_hypergeometric_scaled, Scaled, SeriesControl, SeriesResult};

fn direct(a: f64, b: f64, z: f64, ctrl: &SeriesControl) -> Scaled {
    sum_hypergeometric_scaled(|n| (a + n as f64) / ((b + n as f64) * (n as f64 + 1.0)) * z, 0.0, ctrl)
}

/// Kummer's confluent hypergeometric function 1F1(a; b; z) for real arguments.
///
/// Negative arguments are mapped through Kummer's transformation
/// `1F1(a; b; z) = e^z 1F1(b - a; b; -z)`. The transformed series has terms
/// of one sign beyond index `a - b`, whereas the direct sum alternates with
/// magnitudes up to `e^|z|`. Polynomials (`a` a non-positive integer) are
/// summed directly.
pub fn kummer_1f1(a: f64, b: f64, z: f64, ctrl: &SeriesControl) -> Result<SeriesResult> {
    let s = kummer_1f1_scaled(a, b, z, ctrl)?;
    Ok(if s.ln_scale == 0.0 { s.series } else { s.unscale(ctrl) })
}

/// [`kummer_1f1`] as `series * exp(ln_scale)`, for arguments where the value
/// itself leaves the floating-point range.
pub fn kummer_1f1_scaled(a: f64, b: f64, z: f64, ctrl: &SeriesControl) -> Result<Scaled> {
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return domain(format!("1F1 arguments must be finite, got ({a}; {b}; {z})"));
    }
    if is_nonpositive_integer(b) && !(is_nonpositive_integer(a) && a >= b) {
        return domain(format!("1F1 undefined: b = {b} is a non-positive integer"));
    }
    if z == 0.0 {
        return Ok(Scaled::plain(SeriesResult::exact(1.0)));
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        let inner = direct(b - a, b, -z, ctrl);
        return Ok(Scaled { ln_scale: inner.ln_scale + z, series: inner.series });
    }
    Ok(direct(a, b, z, ctrl))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: f64, b: f64, z: f64) -> f64 {
        let r = kummer_1f1(a, b, z, &SeriesControl::default()).unwrap();
        assert!(r.converged);
        r.value
    }

    #[test]
    fn exponential_reduction() {
        assert!((f(2.0, 2.0, 1.0) - std::f64::consts::E).abs() < 1e-12);
        for &z in &[-30.0, -3.0, 0.5, 25.0] {
            assert!((f(1.7, 1.7, z) / z.exp() - 1.0).abs() < 1e-12, "z = {z}");
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(f(3.1, 0.4, 0.0), 1.0);
    }

    #[test]
    fn negative_argument_against_laguerre_polynomial() {
        // 1F1(-2; 1; z) = L_2(z) = 1 - 2z + z^2/2
        let z = -7.0;
        assert!((f(-2.0, 1.0, z) - (1.0 - 2.0 * z + z * z / 2.0)).abs() < 1e-12);
        // erf relation: 1F1(1/2; 3/2; -x^2) = sqrt(pi) erf(x) / (2x); check at x = 3 via the Kummer path
        let x: f64 = 3.0;
        let erf3 = 0.999_977_909_503_001_4;
        let want = std::f64::consts::PI.sqrt() * erf3 / (2.0 * x);
        assert!((f(0.5, 1.5, -x * x) / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pole_in_b_is_rejected() {
        assert!(kummer_1f1(1.0, -2.0, 0.3, &SeriesControl::default()).is_err());
        assert!(kummer_1f1(-1.0, -2.0, 0.3, &SeriesControl::default()).is_ok());
    }
}
