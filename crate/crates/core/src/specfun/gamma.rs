//! Gamma, beta, Pochhammer and digamma functions.

use std::f64::consts::PI;

use crate::error::{domain, Result};

use super::is_nonpositive_integer;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// zeta(k) for k = 2..=30
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_436,
    1.202_056_903_159_594_285,
    1.082_323_233_711_138_192,
    1.036_927_755_143_369_926,
    1.017_343_061_984_449_14,
    1.008_349_277_381_922_827,
    1.004_077_356_197_944_339,
    1.002_008_392_826_082_214,
    1.000_994_575_127_818_085,
    1.000_494_188_604_119_465,
    1.000_246_086_553_308_048,
    1.000_122_713_347_578_489,
    1.000_061_248_135_058_705,
    1.000_030_588_236_307_02,
    1.000_015_282_259_408_652,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265,
    1.000_001_908_212_716_554,
    1.000_000_953_962_033_873,
    1.000_000_476_932_986_788,
    1.000_000_238_450_502_728,
    1.000_000_119_219_925_965,
    1.000_000_059_608_189_051,
    1.000_000_029_803_503_515,
    1.000_000_014_901_554_828,
    1.000_000_007_450_711_79,
    1.000_000_003_725_334_025,
    1.000_000_001_862_659_724,
    1.000_000_000_931_327_432,
];

/// ln Gamma(1 + e) for |e| <= 0.25 from the zeta Taylor series.
fn ln_gamma_1p(e: f64) -> f64 {
    let mut acc = 0.0;
    let mut p = -e;
    for (i, z) in ZETA.iter().enumerate() {
        p *= -e;
        acc += z * p / (i + 2) as f64;
    }
    -EULER_GAMMA * e + acc
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    // valid for x >= 0.5
    let x = x - 1.0;
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + s.ln()
}

fn stirling_ln_gamma(x: f64) -> f64 {
    // x >= 12: Stirling series with Bernoulli corrections
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let corr = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * 691.0 / 360_360.0)))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + corr
}

fn ln_gamma_pos(x: f64) -> f64 {
    if (x - 1.0).abs() <= 0.25 {
        ln_gamma_1p(x - 1.0)
    } else if (x - 2.0).abs() <= 0.25 {
        let e = x - 2.0;
        ln_gamma_1p(e) + e.ln_1p()
    } else if x < 0.5 {
        // Gamma(x) = Gamma(x + 1) / x keeps the Lanczos sum in its best range
        ln_gamma_pos(x + 1.0) - x.ln()
    } else if x >= 12.0 {
        stirling_ln_gamma(x)
    } else {
        lanczos_ln_gamma(x)
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

/// sin(pi x) with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor(); // r in [0, 2)
    let (s, r) = if r >= 1.0 { (-1.0, r - 1.0) } else { (1.0, r) };
    if r == 0.0 {
        return 0.0;
    }
    let r = if r > 0.5 { 1.0 - r } else { r };
    s * (PI * r).sin()
}

/// `(ln |Gamma(x)|, sign Gamma(x))` for any real `x` that is not a pole.
/// Poles return `(inf, 0.0)`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (ln_gamma_pos(x), 1.0);
    }
    if is_nonpositive_integer(x) {
        return (f64::INFINITY, 0.0);
    }
    // reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    let s = sin_pi(x);
    (PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x), s.signum())
}

/// Reciprocal gamma function, an entire function (zero at the poles of Gamma).
pub fn rgamma(x: f64) -> f64 {
    let (l, s) = ln_gamma_signed(x);
    if s == 0.0 {
        0.0
    } else {
        s * (-l).exp()
    }
}

/// ln B(a, b) for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return domain(format!("beta requires positive arguments, got ({a}, {b})"));
    }
    Ok(ln_gamma_pos(a) + ln_gamma_pos(b) - ln_gamma_pos(a + b))
}

/// Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), computed in log space.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    ln_beta(a, b).map(f64::exp)
}

/// Pochhammer symbol (x)_n = x (x + 1) ... (x + n - 1).
pub fn pochhammer(x: f64, n: u32) -> f64 {
    if n <= 64 {
        return (0..n).map(|k| x + k as f64).product();
    }
    if is_nonpositive_integer(x) && x + n as f64 > 0.0 {
        return 0.0;
    }
    let (l1, s1) = ln_gamma_signed(x + n as f64);
    let (l0, s0) = ln_gamma_signed(x);
    s1 * s0 * (l1 - l0).exp()
}

/// ln (x)_n for x > 0.
pub fn ln_pochhammer(x: f64, n: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        ln_gamma_pos(x + n) - ln_gamma_pos(x)
    }
}

/// Digamma function psi(x) = d/dx ln Gamma(x); infinite at the poles.
pub fn digamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x < 0.0 {
        // psi(1 - x) - psi(x) = pi cot(pi x)
        let s = sin_pi(x);
        let c = sin_pi(x + 0.5);
        return digamma(1.0 - x) - PI * c / s;
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32_760.0)))));
    acc + x.ln() - 0.5 / x - series
}
