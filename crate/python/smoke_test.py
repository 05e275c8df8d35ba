"""Smoke test for the cohwit Python extension.

Builds the extension with cargo (unless COHWIT_SKIP_BUILD is set), stages the
shared library as an importable module in a temp dir and exercises the API.

    python3 python/smoke_test.py
"""

import importlib
import json
import os
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    if not os.environ.get("COHWIT_SKIP_BUILD"):
        subprocess.run(["cargo", "build", "-p", "cohwit-py"], cwd=ROOT, check=True)
    target = Path(os.environ.get("CARGO_TARGET_DIR", ROOT / "target")) / "debug"
    candidates = [target / "libcohwit_py.so", target / "libcohwit_py.dylib", target / "cohwit_py.dll"]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("extension library not found under " + str(target))
    stage = Path(tempfile.mkdtemp(prefix="cohwit-py-"))
    suffix = ".pyd" if lib.suffix == ".dll" else sysconfig.get_config_var("EXT_SUFFIX")
    shutil.copy(lib, stage / ("cohwit" + suffix))
    sys.path.insert(0, str(stage))
    return importlib.import_module("cohwit")


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    cw = load_module()
    checks = []

    def check(name, ok):
        checks.append((name, bool(ok)))
        print(("PASS  " if ok else "FAIL  ") + name)

    check("generator(2, 2) is sigma_x", cw.generator(2, 2) == [[0, 1], [1, 0]])
    lam = cw.generator(2, 3)
    check("generator(2, 3) is sigma_y", lam[0][1] == -1j and lam[1][0] == 1j)

    rho = cw.canonical_coherent(3)
    check("canonical_coherent l1", close(rho.l1_coherence(), 2.0 / 3.0))

    w = cw.lemma2_witness(3, 0.0, 2.0)
    rep = w.evaluate(rho)
    check("lemma2 witness detects canonical state", rep.detected and close(rep.value, 3.0))
    check("lemma2 interval", w.interval == (0.0, 2.0))

    p = w.delta_h(1.5)
    diag = cw.incoherent_state(p)
    check("delta_h lands inside interval", not w.evaluate(diag).detected)

    back = cw.Witness.from_json(w.to_json())
    check("witness json round trip", back.rows() == w.rows() and back.interval == w.interval)

    q = cw.qubit_state(0.6, 0.6, 0.3)
    check("qubit witness value", close(cw.qubit_witness(0.0, 1.0, 1.0, 1.0).evaluate(q).value, 0.75))
    check("effectiveness", cw.is_effective_qubit(0.0, 0.0, 1.0) == "Ineffective")

    g = cw.sample_ginibre(4, 42)
    r = g.bloch_vector()
    rebuilt = cw.state_from_bloch(4, r)
    err = max(abs(rebuilt[i][j] - g.rows()[i][j]) for i in range(4) for j in range(4))
    check("bloch vector round trip", err < 1e-12)
    check("theorem2 witness detects", cw.theorem2_witness(g, 0.0).evaluate(g).detected)

    fam = cw.finite_family(4)
    check("finite family size", len(fam) == 12 and fam.detects(g))

    cov = cw.verify_coverage(fam, 200, 7)
    check("coverage passes", cov["passed"] and cov["n_false_alarm"] == 0)

    lem = cw.verify_lemma1(3, 10, 20, 1)
    check("incoherent bound sweep passes", lem["passed"])

    geo = cw.qubit_geometry_check(0.0, 1.0, 1.0, 1.0, 8)
    check("geometry passes", geo["passed"] and geo["n_mismatch"] == 0)

    try:
        cw.DensityMatrix([[1.0, 0.0], [0.0, 1.0]])
        check("invalid state rejected", False)
    except ValueError as e:
        check("invalid state rejected", "trace" in str(e))

    print(json.dumps({"passed": sum(ok for _, ok in checks), "failed": sum(not ok for _, ok in checks)}))
    return 0 if all(ok for _, ok in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
