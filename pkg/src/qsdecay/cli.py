"""Command-line front end (``qsdecay``).

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import hydrogen, linewidth, resonance
from .exactcore import ExactScalar, rational_to_str

CONVENTIONS = (
    "# conventions: ImZ prefactor 2/3 (position form), 8/3 (momentum form); "
    "Condon-Shortley phases; lengths in a0/2, energies in 4 Ry"
)

EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 2, 3, 4


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None = None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _scalar_str(x: ExactScalar, as_float: bool) -> str:
    if as_float:
        return f"{float(x):.15g}"
    if x.is_rational():
        return rational_to_str(x.to_rational())
    return str(x).replace(" ", "")


# ---------------------------------------------------------------- hydrogen


def cmd_energies(args) -> int:
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    for n in range(1, args.n_max + 1):
        e = hydrogen.energy(n)
        print(f"{n} {repr(float(e)) if args.float else rational_to_str(e)}")
    return 0


def cmd_radial(args) -> int:
    R = hydrogen.radial(args.n, args.l)
    print(f"# R_{{{args.n},{args.l}}}(r) = prefactor * p(r) * exp(-rate r)")
    print(f"prefactor = {_scalar_str(R.prefactor, args.float)}")
    print(f"rate = {rational_to_str(R.rate)}")
    for k, c in enumerate(R.polynomial.coefficients):
        print(f"coeff[{k}] = {_scalar_str(c, args.float)}")
    print(f"norm = {_scalar_str(R.norm_squared(), args.float)}")
    if args.eval is not None:
        print(f"R({args.eval!r}) = {float(R(args.eval)):.15g}")
    return 0


def cmd_dipole(args) -> int:
    try:
        src = hydrogen.Orbital.parse(args.source)
        tgt = hydrogen.Orbital.parse(args.target)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    v = hydrogen.dipole_element(tgt, args.axis, src)
    as_float = args.float and not args.exact
    label = f"<{tgt}| {args.axis} |{src}>"
    if v.is_zero():
        print(f"{label} = 0")
        return 0
    ang = hydrogen.angular_element(tgt.l, tgt.m, args.axis, src.l, src.m)
    radial = hydrogen.gordon_radial_integral(src.n, src.l, tgt.n, tgt.l)
    phase = "i" if v.imaginary else "1"
    if as_float:
        print(f"{label} = {float(v.value):.15g} * {phase}")
    else:
        print(f"{label} = {_scalar_str(v.value, False)} * {phase}")
        for c, d in v.value.terms:
            print(f"  term coeff={rational_to_str(c)} radicand={d}/1 phase={phase}")
        print(f"  angular factor = {_scalar_str(ang.value, False)} (squared: "
              f"{rational_to_str(ang.value.square().to_rational())})")
        print(f"  radial R^{{{tgt.n},{tgt.l}}}_{{{src.n},{src.l}}} = {_scalar_str(radial, False)}")
    return 0


# ---------------------------------------------------------------- linewidth


def _kappa(name: str) -> linewidth.CutoffFunction:
    return linewidth.CutoffFunction("one" if name == "one" else "quartic")


def cmd_imz(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    build = linewidth.im_z_matrix if args.form == "position" else linewidth.im_z_momentum_form
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        M = build(args.n, _kappa(args.kappa))
    if M.warning:
        print(f"warning: {M.warning}", file=sys.stderr)
    if args.format == "csv":
        spectrum = linewidth.diagonalize(M)
        lines = ["state,l,m,ImZ"]
        for orb, val in zip(M.basis, spectrum.per_state):
            s = rational_to_str(val) if not isinstance(val, float) else repr(val)
            lines.append(f"\"{orb}\",{orb.l},{orb.m},{s}")
        _emit("\n".join(lines) + "\n", args.out)
    elif args.format == "json":
        _emit(M.to_json() + "\n", args.out)
    else:
        if M.exact is None and args.format == "exact":
            print("# note: cutoff is not identically one; entries are floating point")
        _emit(M.to_text(), args.out)
    return 0


def cmd_lifetimes(args) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    constants = linewidth.read_constants(args.constants) if args.constants else linewidth.PhysicalConstants()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        M = linewidth.im_z_matrix(args.n, _kappa(args.kappa))
    report = linewidth.lifetimes(M, constants)
    if args.format == "csv":
        _emit(report.to_csv(), args.out)
    elif args.format == "json":
        _emit(report.to_json() + "\n", args.out)
    else:
        _emit(report.to_text(), args.out)
    return 0


# ---------------------------------------------------------------- simulate


def _model(args) -> resonance.ToyModel:
    cfg = resonance.read_config(args.config) if args.config else resonance.ModelConfig()
    if getattr(args, "g", None) is not None:
        cfg = cfg.with_g(args.g)
    return resonance.build_model(cfg)


def cmd_survival(args) -> int:
    model = _model(args)
    Z = resonance.z_matrix_toy(model)
    im = float(np.max(np.linalg.eigvals(Z).imag))
    t_max = args.t_max if args.t_max is not None else (
        2.0 / (model.g**2 * im) if model.g > 0 and im > 0 else 100.0
    )
    times = np.linspace(0.0, t_max, args.samples)
    phi = model.vacuum_state(int(model.level_states[0]))
    series = resonance.survival_amplitude(model, phi, times=times)
    _emit(series.to_csv(), args.out)
    return 0


def cmd_pole(args) -> int:
    model = _model(args)
    Z = resonance.z_matrix_toy(model)
    result = resonance.resonance_pole(model)
    lines = [
        f"E_j = {model.E_j!r}",
        f"g = {model.g!r}",
        f"Z_toy = {float(Z[0, 0].real)!r} {float(Z[0, 0].imag)!r}",
        f"minus_im_pole_over_g2 = {(-result.z.imag / model.g**2 if model.g else 0.0)!r}",
    ]
    _emit("\n".join(lines) + "\n" + result.to_text(), args.out)
    return 0


def cmd_corollary(args) -> int:
    model = _model(args)
    try:
        g_list = [float(t) for t in args.g_list.split(",")]
    except ValueError:
        raise UsageError(f"--g-list must be comma separated numbers, got {args.g_list!r}") from None
    rows = resonance.corollary_limit_check(model, args.tau, g_list)
    _emit(resonance.corollary_to_csv(rows), args.out)
    return 0


def cmd_feshbach_check(args) -> int:
    lines = ["model,dimension,z_re,z_im,scalar_residual,reconstruction_residual"]
    worst = 0.0
    for i, (model, z, check) in enumerate(resonance.feshbach_suite(args.seed, args.models)):
        worst = max(worst, check.residual)
        lines.append(
            f"{i},{model.dimension},{z.real!r},{z.imag!r},{check.scalar!r},{check.reconstruction!r}"
        )
    lines.append(f"# max_residual = {worst!r}")
    _emit("\n".join(lines) + "\n", args.out)
    if args.out:
        print(f"max_residual = {worst!r}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsdecay", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("energies", help="hydrogen energies -1/(4 n^2)")
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--float", action="store_true")
    s.set_defaults(func=cmd_energies)

    s = sub.add_parser("radial", help="exact radial function R_{n,l}")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--eval", type=float)
    s.add_argument("--float", action="store_true")
    s.set_defaults(func=cmd_radial)

    s = sub.add_parser("dipole", help="dipole matrix element <to| r_axis |from>")
    s.add_argument("--from", dest="source", required=True, metavar="n,l,m")
    s.add_argument("--to", dest="target", required=True, metavar="n,l,m")
    s.add_argument("--axis", choices=("x", "y", "z"), required=True)
    s.add_argument("--exact", action="store_true", help="exact output (default)")
    s.add_argument("--float", action="store_true", help="15 significant digits")
    s.set_defaults(func=cmd_dipole)

    s = sub.add_parser("imz", help="Im Z matrix on a hydrogen level")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kappa", choices=("one", "quartic"), default="one")
    s.add_argument("--format", choices=("exact", "csv", "json"), default="exact")
    s.add_argument("--form", choices=("position", "momentum"), default="position")
    s.add_argument("--out")
    s.set_defaults(func=cmd_imz)

    s = sub.add_parser("lifetimes", help="SI lifetimes of a hydrogen level")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--constants", help="key=value file: alpha, m_kg, c_mps, hbar_Js")
    s.add_argument("--kappa", choices=("one", "quartic"), default="one")
    s.add_argument("--format", choices=("text", "csv", "json"), default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_lifetimes)

    sim = sub.add_parser("simulate", help="toy-model experiments")
    simsub = sim.add_subparsers(dest="experiment", required=True)

    def common(sp):
        sp.add_argument("--config", help="model config (key = value); default two-level model")
        sp.add_argument("--out")

    s = simsub.add_parser("survival")
    common(s)
    s.add_argument("--g", type=float)
    s.add_argument("--t-max", type=float)
    s.add_argument("--samples", type=int, default=401)
    s.set_defaults(func=cmd_survival)

    s = simsub.add_parser("pole")
    common(s)
    s.add_argument("--g", type=float)
    s.set_defaults(func=cmd_pole)

    s = simsub.add_parser("corollary")
    common(s)
    s.add_argument("--tau", type=float, required=True)
    s.add_argument("--g-list", required=True)
    s.set_defaults(func=cmd_corollary)

    s = simsub.add_parser("feshbach-check")
    common(s)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--models", type=int, default=100)
    s.set_defaults(func=cmd_feshbach_check)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    print(CONVENTIONS, file=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, resonance.ConfigError, resonance.ModelError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"qsdecay: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (resonance.ConvergenceError, resonance.FeshbachError, ArithmeticError) as exc:
        print(f"qsdecay: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"qsdecay: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
