"""Acceptance criteria. Each test prints one PASS/FAIL line.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest,
where the lines are repeated in the terminal summary.
"""

import contextlib
import io
import math
import time
from fractions import Fraction
from itertools import product

import numpy as np

from qsdecay import cli
from qsdecay.hydrogen import (
    AXES,
    dipole_element,
    energy,
    gordon_closed_form_squared,
    gordon_radial_integral,
    level_orbitals,
    momentum_element,
)
from qsdecay.linewidth import (
    PhysicalConstants,
    diagonal_by_l,
    diagonalize,
    im_z_matrix,
    im_z_momentum_form,
    lifetimes,
)
from qsdecay.resonance import (
    ModelConfig,
    build_model,
    corollary_limit_check,
    decay_fit,
    feshbach_suite,
    resonance_pole,
    z_matrix_toy,
)

RESULTS: list[str] = []


def report(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _cli(*argv: str) -> str:
    buf, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = cli.main(list(argv))
    assert code == 0, err.getvalue()
    return buf.getvalue()


def test_exact_imz_reproduction():
    t0 = time.perf_counter()
    out = _cli("imz", "--n", "3", "--format", "exact")
    elapsed = time.perf_counter() - t0
    rows = [line.split() for line in out.splitlines() if not line.startswith("#")]
    diag = [Fraction(rows[i][i]) for i in range(9)]
    off_zero = all(Fraction(rows[i][k]) == 0 for i in range(9) for k in range(9) if i != k)
    expected = (
        [Fraction(192, 1953125)]
        + [Fraction(738423, 250000000)] * 3
        + [Fraction(49152, 48828125)] * 5
    )
    ok = diag == expected and off_zero and elapsed < 5.0
    report("exact-imz-n3", ok, f"diagonal {'matches' if diag == expected else diag}, {elapsed:.2f}s")


def test_si_lifetimes():
    got = [f"{tau:.5e}" for _, _, tau in lifetimes(im_z_matrix(3)).eigenvalue_lifetimes()]
    # ascending eigenvalue: 3s, 3d, 3p
    want = ["1.58303e-07", "1.54593e-08", "5.26860e-09"]
    report("si-lifetimes-n3", got == want, f"3s={got[0]} 3p={got[2]} 3d={got[1]}")


def test_n2_structure():
    spectrum = diagonalize(im_z_matrix(2))
    R2 = gordon_radial_integral(2, 1, 1, 0).square().to_rational()
    oracle = Fraction(2, 3) * (energy(2) - energy(1)) ** 3 * Fraction(1, 3) * R2
    pairs = spectrum.as_pairs()
    tau = 1 / (PhysicalConstants().rate_unit * float(pairs[-1][0]))
    tau_oracle = 1 / (PhysicalConstants().rate_unit * float(oracle))
    ok = (
        pairs == [(0, 1), (oracle, 3)]
        and abs(tau - tau_oracle) <= 0.01 * tau_oracle
        and abs(tau - 1.60e-9) <= 0.01 * 1.60e-9
    )
    report("n2-structure", ok, f"spectrum={[(str(v), m) for v, m in pairs]}, tau_2p={tau:.5e}s")


def test_gordon_cross_check():
    bad = [n for n in (1, 3, 4, 5, 6, 7, 8)
           if gordon_radial_integral(2, 1, n, 0).square() != gordon_closed_form_squared(n)]
    report("gordon-closed-form", not bad, "exact for n in 1,3..8" if not bad else f"mismatch at {bad}")


def test_selection_rules_and_commutator():
    orbs = [o for n in range(1, 6) for o in level_orbitals(n)]
    zero_pattern = commutator = True
    for a, b in product(orbs, orbs):
        factor = (energy(b.n) - energy(a.n)) / 2
        for axis in AXES:
            x = dipole_element(a, axis, b)
            allowed = abs(a.l - b.l) == 1 and (a.m == b.m if axis == "z" else abs(a.m - b.m) == 1)
            if not allowed and not x.is_zero():
                zero_pattern = False
            if momentum_element(a, axis, b) != (x * factor).times_i(3):
                commutator = False
    forms = all(im_z_matrix(n).exact == im_z_momentum_form(n).exact for n in range(2, 6))
    ok = zero_pattern and commutator and forms
    report(
        "selection-commutator-forms",
        ok,
        f"zero pattern={zero_pattern}, p=(dE/2i)x={commutator}, position==momentum={forms} "
        f"({len(orbs)}^2 pairs)",
    )


def test_positivity():
    positive = all(all(v > 0 for v in diagonalize(im_z_matrix(n)).eigenvalues) for n in (3, 4, 5))
    spec2 = diagonalize(im_z_matrix(2)).per_state
    one_zero = sum(v == 0 for v in spec2) == 1
    structured = True
    for n in range(2, 6):
        M = im_z_matrix(n)
        off = any(not M.exact[a][b].is_zero() for a in range(M.dimension)
                  for b in range(M.dimension) if a != b)
        m_dep = any(len(set(v)) != 1 for v in diagonal_by_l(M).values())
        structured &= not off and not m_dep
    ok = positive and one_zero and structured
    report("positivity", ok, f"pos.def n=3..5={positive}, one zero at n=2={one_zero}, "
                             f"diagonal & m-independent n<=5={structured}")


def test_feshbach_identity():
    t0 = time.perf_counter()
    results = feshbach_suite(seed=7, n_models=100, max_dim=50)
    elapsed = time.perf_counter() - t0
    worst = max(c.residual for _, _, c in results)
    dmax = max(m.dimension for m, _, _ in results)
    ok = len(results) == 100 and dmax <= 50 and worst < 1e-10 and elapsed < 30
    report("feshbach-identity", ok, f"100 models, D<={dmax}, max residual {worst:.2e}, {elapsed:.2f}s")


def test_decay_law():
    t0 = time.perf_counter()
    model = build_model(ModelConfig(g=0.05))
    im_z = float(z_matrix_toy(model)[0, 0].imag)

    fit = decay_fit(model)
    ok_i = fit.relative_error < 0.02

    g_seq = (0.1, 0.05, 0.025)
    pole_err = [abs(-resonance_pole(model.with_g(g)).z.imag / g**2 - im_z) for g in g_seq]
    ok_ii = pole_err[0] > pole_err[1] > pole_err[2]

    devs = [r.deviation for r in corollary_limit_check(model, 1.0, g_seq)]
    ok_iii = devs[0] > devs[1] > devs[2]

    elapsed = time.perf_counter() - t0
    ok = ok_i and ok_ii and ok_iii and elapsed < 120
    report(
        "decay-law",
        ok,
        f"(i) fit rel.err {fit.relative_error:.2%}; (ii) pole err "
        + ", ".join(f"{e:.2e}" for e in pole_err)
        + "; (iii) corollary dev "
        + ", ".join(f"{d:.2e}" for d in devs)
        + f"; {elapsed:.1f}s",
    )


def test_determinism(tmp_path):
    commands = [
        ["simulate", "survival", "--samples", "200"],
        ["simulate", "corollary", "--tau", "1", "--g-list", "0.1,0.05,0.025"],
        ["simulate", "feshbach-check", "--seed", "7", "--models", "20"],
        ["imz", "--n", "4", "--format", "csv"],
        ["lifetimes", "--n", "3", "--format", "csv"],
    ]
    identical = True
    for i, argv in enumerate(commands):
        blobs = []
        for k in range(2):
            path = tmp_path / f"c{i}_{k}.csv"
            with contextlib.redirect_stdout(io.StringIO()), contextlib.redirect_stderr(io.StringIO()):
                assert cli.main(argv + ["--out", str(path)]) == 0
            blobs.append(path.read_bytes())
        identical &= blobs[0] == blobs[1] and len(blobs[0]) > 0
    report("determinism", identical, f"{len(commands)} commands rerun byte-identically")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    failures = 0
    for name, fn in list(globals().items()):
        if not name.startswith("test_"):
            continue
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failures += 1
    raise SystemExit(1 if failures else 0)
