//! Property tests for the structural invariants of the library.

use compfade::aef::AefDist;
use compfade::akf::AkfDist;
use compfade::cases::{reduce, CaseId, FamilyParams};
use compfade::outage::{gains, HighSnr};
use compfade::params::{convert_format, geometry, omega, upsilon};
use compfade::specfun::{gauss_2f1_direct, gauss_2f1_pfaff, humbert_psi1, kdf_2_1, kummer_1f1, PfaffVariant};
use compfade::validate::moments;
use compfade::{AefParams, AkfParams, Format, SeriesControl, SnrDistribution};
use proptest::prelude::*;

/// `PROPTEST_CASES` overrides the per-block default.
fn config(cases: u32) -> ProptestConfig {
    let cases = std::env::var("PROPTEST_CASES").ok().and_then(|v| v.parse().ok()).unwrap_or(cases);
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

prop_compose! {
    fn aef_params()(alpha in 0.8..4.0, eta in log_uniform(0.1, 10.0), mu in 0.3..3.0, extra in 0.3..20.0)
        -> AefParams {
        AefParams { alpha, eta, mu, ms: (2.0 / alpha).max(1.0) + extra, format: Format::FormatI }
    }
}

prop_compose! {
    fn akf_params()(alpha in 0.8..4.0, kappa in 0.0..6.0, mu in 0.3..3.0, extra in 0.3..20.0) -> AkfParams {
        AkfParams { alpha, kappa, mu, ms: (2.0 / alpha).max(1.0) + extra }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn series_contract(a in -3.0..5.0, b in 0.1..5.0, z in -30.0..30.0) {
        let ctrl = SeriesControl::default();
        let r = kummer_1f1(a, b, z, &ctrl).unwrap();
        prop_assert!(r.terms_used <= ctrl.max_terms);
        if r.converged {
            prop_assert!(r.est_error <= ctrl.tolerance(r.value));
        }
    }

    #[test]
    fn truncated_series_reports_non_convergence(a in 0.5..3.0, b in 0.5..3.0, z in 5.0..30.0) {
        // a handful of terms cannot reach 1e-12 for these arguments
        let ctrl = SeriesControl::default().with_max_terms(3);
        let r = kummer_1f1(a, b, z, &ctrl).unwrap();
        prop_assert!(!r.converged);
    }

    #[test]
    fn pfaff_agrees_with_direct(a in -2.5..4.0, b in -2.5..4.0, c in 0.3..5.0, z in -0.5..0.0) {
        let ctrl = SeriesControl::default();
        let d = gauss_2f1_direct(a, b, c, z, &ctrl).unwrap();
        for v in [PfaffVariant::OnA, PfaffVariant::OnB] {
            let p = gauss_2f1_pfaff(a, b, c, z, v, &ctrl).unwrap();
            prop_assert!((p.value - d.value).abs() <= 1e-12 * d.value.abs().max(1e-3), "{v:?}: {} vs {}", p.value, d.value);
        }
    }

    #[test]
    fn bivariate_axes(a in 0.2..3.0, b in 0.2..3.0, c in 0.5..4.0, cp in 0.5..4.0, x in -0.9..0.9, y in -8.0..8.0) {
        let ctrl = SeriesControl::default();
        let on_x = humbert_psi1(a, b, c, cp, x, 0.0, &ctrl).unwrap().value;
        prop_assert!(rel(on_x, compfade::specfun::gauss_2f1(a, b, c, x, &ctrl).unwrap().value) < 1e-12);
        let want = kummer_1f1(a, cp, y, &ctrl).unwrap().value;
        prop_assert!((humbert_psi1(a, b, c, cp, 0.0, y, &ctrl).unwrap().value - want).abs() < 1e-12 * want.abs().max(1.0));
        prop_assert!((humbert_psi1(a, 0.0, c, cp, x, y, &ctrl).unwrap().value - want).abs() < 1e-12 * want.abs().max(1.0));
        prop_assert_eq!(kdf_2_1(a, b, c, cp, 0.0, 0.0, &ctrl).unwrap().value, 1.0);
    }

    #[test]
    fn format_conversion_is_an_involution(eta in log_uniform(1e-3, 1e3)) {
        let e2 = convert_format(eta, Format::FormatI).unwrap();
        prop_assert!(e2.abs() < 1.0);
        prop_assert!(rel(convert_format(e2, Format::FormatII).unwrap(), eta) < 1e-12);
    }

    #[test]
    fn geometry_is_format_independent(p in aef_params()) {
        let g1 = geometry(&p).unwrap();
        let g2 = geometry(&p.converted().unwrap()).unwrap();
        prop_assert!(rel(g2.h, g1.h) < 1e-12);
        prop_assert!((g2.big_h - g1.big_h).abs() < 1e-12 * g1.h);
    }

    #[test]
    fn normalisers_positive(p in aef_params(), k in akf_params()) {
        let u = upsilon(&p).unwrap();
        let w = omega(&k).unwrap();
        prop_assert!(u > 0.0 && u.is_finite());
        prop_assert!(w > 0.0 && w.is_finite());
    }

    #[test]
    fn eta_symmetry(p in aef_params(), g in log_uniform(1e-3, 1e2)) {
        let a = AefDist::new(p, 1.0).unwrap().snr_pdf(g).unwrap();
        let b = AefDist::new(AefParams { eta: 1.0 / p.eta, ..p }, 1.0).unwrap().snr_pdf(g).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn format_invariance(p in aef_params(), g in log_uniform(1e-3, 1e2)) {
        let a = AefDist::new(p, 1.0).unwrap().snr_pdf(g).unwrap();
        let b = AefDist::new(p.converted().unwrap(), 1.0).unwrap().snr_pdf(g).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn cross_family_identity(alpha in 0.8_f64..4.0, mu in 0.3..2.0, extra in 0.3..20.0, g in log_uniform(1e-2, 20.0)) {
        let ms = (2.0 / alpha).max(1.0) + extra;
        let a = AefDist::new(AefParams { alpha, eta: 1.0, mu, ms, format: Format::FormatI }, 1.0).unwrap();
        let k = AkfDist::new(AkfParams { alpha, kappa: 0.0, mu: 2.0 * mu, ms }, 1.0).unwrap();
        let (x, y) = (a.snr_pdf(g).unwrap(), k.snr_pdf(g).unwrap());
        prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{x} vs {y}");
    }
}

fn assert_cdf_shape(d: &impl SnrDistribution, ctrl: &SeriesControl) -> Result<(), TestCaseError> {
    prop_assert_eq!(d.snr_cdf(0.0, ctrl).unwrap().value, 0.0);
    let mut prev = 0.0;
    for i in 0..25 {
        let g = 10f64.powf(-3.0 + 0.25 * i as f64);
        let c = d.snr_cdf(g, ctrl).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(c >= prev - 1e-12, "cdf decreases at {g}: {prev} -> {c}");
        prev = c;
    }
    let far = d.snr_cdf(1e12, ctrl).unwrap().value;
    prop_assert!(far > 1.0 - 1e-6, "cdf(1e12) = {far}");
    Ok(())
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn aef_cdf_shape(p in aef_params()) {
        assert_cdf_shape(&AefDist::new(p, 1.0).unwrap(), &SeriesControl::default())?;
    }

    #[test]
    fn akf_cdf_shape(p in akf_params()) {
        assert_cdf_shape(&AkfDist::new(p, 1.0).unwrap(), &SeriesControl::default())?;
    }

    #[test]
    fn aef_truncation_bound_dominates(p in aef_params(), g in log_uniform(1e-2, 10.0)) {
        let d = AefDist::new(p, 1.0).unwrap();
        let ctrl = SeriesControl::default();
        let full = d.snr_cdf_raw(g, &ctrl).unwrap();
        for k0 in 1..=16 {
            if let Ok(bound) = d.cdf_truncation_bound(g, k0) {
                let rem = (full.value - d.snr_cdf_partial(g, k0).unwrap()).abs();
                prop_assert!(rem <= bound + full.est_error + 4.0 * f64::EPSILON, "k0 = {k0}: {rem:e} > {bound:e}");
            }
        }
    }

    #[test]
    fn special_cases_normalised(p in aef_params(), k in akf_params()) {
        use CaseId::*;
        let aef_cases = [AlphaEtaMu, EtaMuInvGamma, AlphaF, FisherF, AlphaEtaInvGamma];
        let akf_cases = [AlphaKappaMu, KappaMuInvGamma, AlphaF, FisherF, AlphaKappaInvGamma];
        for case in aef_cases {
            // alpha = 2 may break ms > 2 / alpha; such reductions are rejected, not miscomputed
            if let Ok(FamilyParams::Aef(q)) = reduce(FamilyParams::Aef(p), case) {
                let (mass, _) = moments(&AefDist::new(q, 1.0).unwrap()).unwrap();
                prop_assert!((mass - 1.0).abs() < 1e-7, "{case:?}: {mass}");
            }
        }
        for case in akf_cases {
            if let Ok(FamilyParams::Akf(q)) = reduce(FamilyParams::Akf(k), case) {
                let (mass, _) = moments(&AkfDist::new(q, 1.0).unwrap()).unwrap();
                prop_assert!((mass - 1.0).abs() < 1e-7, "{case:?}: {mass}");
            }
        }
    }
}

/// `|exact / asymptote - 1|` at `gamma_bar = ratio` and `gamma_th = 1`.
fn asymptote_gap<D: HighSnr>(make: impl Fn(f64) -> D, ratio: f64) -> f64 {
    let d = make(ratio);
    let exact = d.snr_cdf(1.0, &SeriesControl::default()).unwrap().value;
    (exact / d.asymptotic_outage(1.0).unwrap() - 1.0).abs()
}

/// The gap shrinks along the ladder. The exact/asymptote ratio may cross 1
/// near the low end, so a gap already below `CROSSING` there does not count.
fn assert_tightens(gaps: &[f64]) -> Result<(), TestCaseError> {
    const CROSSING: f64 = 1e-3;
    prop_assert!(gaps[2] < gaps[1], "{gaps:?}");
    prop_assert!(gaps[1] < gaps[0] || gaps[0] < CROSSING, "{gaps:?}");
    Ok(())
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn aef_asymptote_tightens(alpha in 1.5..3.5, eta in log_uniform(0.2, 5.0), mu in 0.5..2.0, ms in 2.5..8.0) {
        let p = AefParams { alpha, eta, mu, ms, format: Format::FormatI };
        let make = |gb| AefDist::new(p, gb).unwrap();
        let gaps: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&r| asymptote_gap(make, r)).collect();
        assert_tightens(&gaps)?;
    }

    #[test]
    fn akf_asymptote_tightens(alpha in 1.5..3.5, kappa in 0.1..5.0, mu in 0.5..2.0, ms in 2.5..8.0) {
        let p = AkfParams { alpha, kappa, mu, ms };
        let make = |gb| AkfDist::new(p, gb).unwrap();
        let gaps: Vec<f64> = [1e2, 1e3, 1e4].iter().map(|&r| asymptote_gap(make, r)).collect();
        assert_tightens(&gaps)?;
    }

    #[test]
    fn diversity_gain_ignores_eta_kappa_ms_threshold(
        p in aef_params(), k in akf_params(), eta in log_uniform(0.1, 10.0), kappa in 0.0..5.0, th in log_uniform(0.1, 10.0)
    ) {
        let a1 = gains(&AefDist::new(p, 1e3).unwrap(), 1.0).unwrap();
        let a2 = gains(&AefDist::new(AefParams { eta, ms: p.ms + 3.0, ..p }, 1e3).unwrap(), th).unwrap();
        prop_assert_eq!(a1.gd, a2.gd);
        prop_assert_eq!(a1.gd, p.alpha * p.mu);
        let k1 = gains(&AkfDist::new(k, 1e3).unwrap(), 1.0).unwrap();
        let k2 = gains(&AkfDist::new(AkfParams { kappa, ms: k.ms + 3.0, ..k }, 1e3).unwrap(), th).unwrap();
        prop_assert_eq!(k1.gd, k2.gd);
        prop_assert_eq!(k1.gd, 0.5 * k.alpha * k.mu);
    }

    #[test]
    fn larger_alpha_or_mu_lowers_outage(alpha in 1.0..3.0, eta in log_uniform(0.2, 5.0), kappa in 0.1..5.0, mu in 0.5..2.0, ms in 2.5..8.0) {
        let gb = 1e4;
        let aef = |alpha, mu| AefDist::new(AefParams { alpha, eta, mu, ms, format: Format::FormatI }, gb).unwrap().asymptotic_outage(1.0).unwrap();
        let akf = |alpha, mu| AkfDist::new(AkfParams { alpha, kappa, mu, ms }, gb).unwrap().asymptotic_outage(1.0).unwrap();
        prop_assert!(aef(alpha + 0.5, mu) < aef(alpha, mu));
        prop_assert!(aef(alpha, mu + 0.5) < aef(alpha, mu));
        prop_assert!(akf(alpha + 0.5, mu) < akf(alpha, mu));
        prop_assert!(akf(alpha, mu + 0.5) < akf(alpha, mu));
    }
}

#[test]
fn outage_non_increasing_in_eta_and_kappa() {
    let gb = 1e4;
    for &(alpha, mu, ms) in &[(2.0, 1.0, 3.0), (3.0, 0.5, 5.0), (1.5, 2.0, 4.0)] {
        let mut prev = f64::INFINITY;
        for i in 0..=16 {
            let eta = 0.2 + 0.05 * i as f64;
            let op = AefDist::new(AefParams { alpha, eta, mu, ms, format: Format::FormatI }, gb).unwrap().asymptotic_outage(1.0).unwrap();
            assert!(op <= prev * (1.0 + 1e-12), "eta = {eta}: {op} > {prev}");
            prev = op;
        }
        let mut prev = f64::INFINITY;
        for i in 0..=49 {
            let kappa = 0.1 + 0.1 * i as f64;
            let op = AkfDist::new(AkfParams { alpha, kappa, mu, ms }, gb).unwrap().asymptotic_outage(1.0).unwrap();
            assert!(op <= prev * (1.0 + 1e-12), "kappa = {kappa}: {op} > {prev}");
            prev = op;
        }
    }
}
