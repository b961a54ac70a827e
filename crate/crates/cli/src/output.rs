//! CSV, JSON and sample writers. Number formatting never depends on locale.

use std::io::{self, Write};

use serde::Serialize;

use crate::curve::{CurveRow, CurveSpec};

/// Plain decimal in the comfortable range, scientific notation outside it.
/// Both forms round-trip exactly.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_csv(out: &mut impl Write, rows: &[CurveRow]) -> io::Result<()> {
    out.write_all(b"x,value,est_error,converged\n")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", fmt_num(r.x), fmt_num(r.value), fmt_num(r.est_error), r.converged)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Document<'a> {
    spec: &'a CurveSpec,
    rows: &'a [CurveRow],
}

/// `{spec, rows}`; non-finite numbers become `null`.
pub fn write_json(out: &mut impl Write, spec: &CurveSpec, rows: &[CurveRow]) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, &Document { spec, rows }).map_err(io::Error::from)?;
    out.write_all(b"\n")
}

/// Header `r`, then one sample per line.
pub fn write_samples(out: &mut impl Write, samples: &[f64]) -> io::Result<()> {
    out.write_all(b"r\n")?;
    for &s in samples {
        writeln!(out, "{}", fmt_num(s))?;
    }
    Ok(())
}
