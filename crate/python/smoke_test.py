"""Smoke test for the compiled extension.

Build first:
    cargo build -p compfade-py --features extension-module --release
then run:
    python3 python/smoke_test.py
"""

import importlib.util
import json
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    lib = os.environ.get("COMPFADE_PY_LIB") or os.path.join(ROOT, "target", "release", "libcompfade_py.so")
    if not os.path.exists(lib):
        sys.exit(f"extension not found at {lib}; build it first")
    tmp = tempfile.mkdtemp()
    dst = os.path.join(tmp, "compfade_py.so")
    shutil.copy(lib, dst)
    spec = importlib.util.spec_from_file_location("compfade_py", dst)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    cf = load()

    # alpha = 2, eta = 1, mu = 0.5, ms = 2 collapses to an F distribution
    fisher = cf.Aef(2.0, 1.0, 0.5, 2.0)
    r = fisher.snr_cdf(1.0)
    assert r.converged
    close(r.value, 0.75, 1e-10)
    close(float(r), 0.75, 1e-10)

    akf = cf.Akf(2.5, 2.0, 1.5, 4.0, gamma_bar=3.0)
    s, c = akf.snr_cdf(2.0), akf.snr_cdf_closed(2.0)
    close(s.value, c.value, 1e-9)
    gc, gd = akf.gains(1.0)
    close(gd, 2.5 * 1.5 / 2, 1e-12)
    assert gc > 0

    aef = cf.Aef(2.0, 0.5, 1.5, 3.0)
    _, gd = aef.gains(1.0)
    close(gd, 3.0, 1e-12)
    close(aef.outage(1e-4).value, aef.asymptotic_outage(1e-4), 1e-2 * aef.asymptotic_outage(1e-4))

    close(cf.convert_format(cf.convert_format(0.3, 1), 2), 0.3, 1e-14)
    close(cf.gauss_2f1(1.0, 1.0, 2.0, 0.5).value, 2 * math.log(2), 1e-12)
    close(cf.kummer_1f1(1.0, 1.0, 0.7).value, math.exp(0.7), 1e-12)
    close(cf.ln_gamma(5.0), math.log(24.0), 1e-13)

    try:
        cf.Aef(1.0, 1.0, 1.0, 1.5)
    except ValueError as e:
        assert "ms" in str(e)
    else:
        raise AssertionError("invalid parameters accepted")

    d = cf.Aef(2.0, 0.5, 2.0, 4.0)
    x = d.sample_envelope(20000, seed=7)
    assert x == d.sample_envelope(20000, seed=7)
    power = sum(v * v for v in x) / len(x)
    ks = cf.ks_distance_snr([v * v / power for v in x], d)
    assert ks < 0.02, ks

    report = json.loads(cf.validate("quick", 1))
    assert report["pass"], [c["name"] for c in report["checks"] if not c["pass"]]

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
