//! Monte-Carlo sampler checks against independent references.

use compfade::aef::AefDist;
use compfade::mc::{
    ks_distance, make_phys_aef, make_phys_akf, sample_aef_envelope, sample_aef_envelope_partitioned, sample_akf_envelope,
    sample_inv_nakagami_sq, EmpiricalDist, TabulatedCdf, TABLE_NODES,
};
use compfade::{AefParams, AkfParams, Format, SeriesControl};
use statrs::function::gamma::gamma_ur;

#[test]
fn shadowing_matches_inverse_gamma() {
    for &ms in &[1.5, 4.0, 20.0] {
        let z2 = sample_inv_nakagami_sq(ms, 200_000, 11).unwrap();
        let emp = EmpiricalDist::new(z2).unwrap();
        // P(Z^2 <= t) = P(G >= (ms - 1) / t) for G ~ Gamma(ms, 1)
        let ks = ks_distance(&emp, |t| gamma_ur(ms, (ms - 1.0) / t)).unwrap();
        assert!(ks < 0.005, "ms = {ms}: KS = {ks}");
        if ms > 2.0 {
            assert!((emp.mean_pow(1.0) - 1.0).abs() < 0.02, "ms = {ms}: mean {}", emp.mean_pow(1.0));
        }
    }
    assert!(sample_inv_nakagami_sq(1.0, 10, 0).is_err());
}

#[test]
fn samplers_are_pure_functions_of_the_seed() {
    let p = make_phys_aef(&AefParams::new(3.0, 0.4, 2.0, 5.0, Format::FormatII).unwrap(), None).unwrap();
    let a = sample_aef_envelope(&p, 5000, 3).unwrap();
    assert_eq!(a, sample_aef_envelope(&p, 5000, 3).unwrap());
    assert_ne!(a, sample_aef_envelope(&p, 5000, 4).unwrap());
    // a prefix of a longer run is the shorter run
    let long = sample_aef_envelope_partitioned(&p, 9000, 3, 5).unwrap();
    assert_eq!(&long[..5000], &a[..]);
    assert!(sample_aef_envelope(&p, 0, 3).unwrap().is_empty());
}

#[test]
fn cross_family_samples_agree() {
    // alpha-kappa-F with kappa = 0 and 2 clusters is alpha-eta-F with eta = 1 and 1 cluster
    let (alpha, ms, n) = (2.5, 4.0, 400_000);
    let k = make_phys_akf(&AkfParams::new(alpha, 0.0, 2.0, ms).unwrap(), None).unwrap();
    let r = sample_akf_envelope(&k, n, 21).unwrap();
    let emp = EmpiricalDist::new(r).unwrap();
    let omega = emp.mean_square();
    let g = emp.map_increasing(|x| x * x / omega).unwrap();
    let dist = AefDist::new(AefParams::new(alpha, 1.0, 1.0, ms, Format::FormatI).unwrap(), 1.0).unwrap();
    let tab = TabulatedCdf::from_snr(&dist, g.min() * 0.5, g.max() * 2.0, TABLE_NODES, &SeriesControl::default()).unwrap();
    let ks = ks_distance(&g, |x| tab.eval(x)).unwrap();
    assert!(ks < 2.0 / (n as f64).sqrt(), "KS = {ks}");
}

#[test]
fn fractional_mu_is_rejected() {
    let e = make_phys_aef(&AefParams::new(2.0, 1.0, 1.5, 4.0, Format::FormatI).unwrap(), None).unwrap_err();
    assert!(e.to_string().contains("physical sampler requires integer mu"), "{e}");
    assert!(make_phys_akf(&AkfParams::new(2.0, 1.0, 0.5, 4.0).unwrap(), None).is_err());
}
