//! Comparison against extended-precision reference values in `golden/golden.json`.
//! The file is produced by `golden/gen_golden.py` (mpmath, 100 digits).

use compfade::aef::AefDist;
use compfade::akf::AkfDist;
use compfade::params::{omega, upsilon};
use compfade::specfun::{gauss_2f1, humbert_psi1, kdf_2_1, kummer_1f1, ln_gamma};
use compfade::{AefParams, AkfParams, Format, SeriesControl, SeriesResult};
use serde_json::Value;

fn golden() -> Value {
    let raw = include_str!("golden/golden.json");
    serde_json::from_str(raw).expect("golden file parses")
}

fn num(v: &Value) -> f64 {
    match v {
        Value::String(s) => s.parse().expect("numeric string"),
        Value::Number(n) => n.as_f64().unwrap(),
        other => panic!("not a number: {other}"),
    }
}

fn rel(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn check_table(name: &str, eval: impl Fn(&Value) -> SeriesResult, tol: f64) {
    let g = golden();
    let rows = g[name].as_array().unwrap_or_else(|| panic!("missing table {name}"));
    let mut worst = (0.0, String::new());
    let mut flagged = 0;
    for row in rows {
        let want = num(&row["value"]);
        let got = eval(row);
        // a point may be flagged when cancellation makes the error bound exceed
        // the tolerance, but the bound must then still cover the actual error
        if !got.converged {
            flagged += 1;
            assert!(
                got.est_error.is_finite() && got.est_error >= (got.value - want).abs(),
                "{name}: unconverged result with dishonest bound at {row}: {got:?}"
            );
        }
        let e = rel(got.value, want);
        if e > worst.0 {
            worst = (e, row.to_string());
        }
    }
    assert!(worst.0 <= tol, "{name}: worst relative error {:e} at {}", worst.0, worst.1);
    assert!(flagged * 10 <= rows.len(), "{name}: {flagged} of {} points flagged unconverged", rows.len());
    eprintln!("{name}: {} points, worst relative error {:e}, {flagged} flagged", rows.len(), worst.0);
}

#[test]
fn ln_gamma_matches_oracle() {
    let g = golden();
    for row in g["ln_gamma"].as_array().unwrap() {
        let x = num(&row["x"]);
        let want = num(&row["value"]);
        let got = ln_gamma(x).unwrap();
        // relative 1e-14 on Gamma itself, i.e. absolute on its logarithm near the zeros of ln Gamma
        assert!((got - want).abs() <= 1e-14 * want.abs().max(1.0), "x = {x}: {got} vs {want}");
    }
}

#[test]
fn gauss_2f1_matches_oracle() {
    let c = SeriesControl::default();
    let f = |r: &Value| gauss_2f1(num(&r["a"]), num(&r["b"]), num(&r["c"]), num(&r["z"]), &c).unwrap();
    check_table("gauss_2f1", f, 1e-10);
    check_table("gauss_2f1_degenerate", f, 1e-10);
    let spot = gauss_2f1(0.3, 1.7, 2.2, -3.5, &c).unwrap();
    assert!(rel(spot.value, num(&golden()["gauss_2f1_spot"])) < 1e-12);
}

#[test]
fn kummer_1f1_matches_oracle() {
    let c = SeriesControl::default();
    check_table("kummer_1f1", |r| kummer_1f1(num(&r["a"]), num(&r["b"]), num(&r["z"]), &c).unwrap(), 1e-10);
    let spot = kummer_1f1(3.5, 1.2, 4.0, &c).unwrap();
    assert!(rel(spot.value, num(&golden()["kummer_1f1_spot"])) < 1e-12);
}

#[test]
fn humbert_psi1_matches_oracle() {
    let c = SeriesControl::default();
    check_table(
        "humbert_psi1",
        |r| {
            humbert_psi1(num(&r["a"]), num(&r["b"]), num(&r["c"]), num(&r["cp"]), num(&r["x"]), num(&r["y"]), &c)
                .unwrap()
        },
        1e-10,
    );
}

#[test]
fn kdf_matches_oracle() {
    let c = SeriesControl::default();
    check_table(
        "kdf_2_1",
        |r| kdf_2_1(num(&r["a1"]), num(&r["a2"]), num(&r["b1"]), num(&r["c1"]), num(&r["x"]), num(&r["y"]), &c).unwrap(),
        1e-10,
    );
}

#[test]
fn normalisers_match_oracle() {
    let g = golden();
    let u = upsilon(&AefParams::new(2.0, 1.0 / 3.0, 1.0, 3.0, Format::FormatI).unwrap()).unwrap();
    assert!(rel(u, num(&g["upsilon_a2_eta_third_mu1_ms3"])) < 1e-12, "upsilon = {u}");
    let w = omega(&AkfParams::new(2.0, 2.0, 1.0, 4.0).unwrap()).unwrap();
    assert!(rel(w, num(&g["omega_a2_k2_mu1_ms4"])) < 1e-12, "omega = {w}");
    let w = omega(&AkfParams::new(4.0, 1.0, 2.0, 1.2).unwrap()).unwrap();
    assert!(rel(w, num(&g["omega_a4_k1_mu2_ms1p2"])) < 1e-12, "omega = {w}");
}

#[test]
fn densities_match_oracle() {
    let g = golden();
    let d = AefDist::new(AefParams::new(3.5, 0.5, 1.5, 3.0, Format::FormatI).unwrap(), 2.0).unwrap();
    let v = d.snr_pdf(1.0).unwrap();
    assert!(rel(v, num(&g["aef_pdf_a3p5_eta0p5_mu1p5_ms3_gb2_g1"])) < 1e-11, "aef pdf = {v}");
    let d = AkfDist::new(AkfParams::new(2.0, 2.0, 1.5, 4.0).unwrap(), 1.0).unwrap();
    let v = d.snr_pdf(0.8).unwrap();
    assert!(rel(v, num(&g["akf_pdf_a2_k2_mu1p5_ms4_gb1_g0p8"])) < 1e-11, "akf pdf = {v}");
}
