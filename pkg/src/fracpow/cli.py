"""Command-line harness emitting CSV artifacts for the study experiments.

Subcommands: roots, spectrum, gamma, approx-error, converge, mesh.
Every CSV starts with '#' comment lines echoing the resolved
configuration; floats are printed with 12 significant digits and all
summations run in a fixed order, so identical flags give byte-identical
output.  Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

import argparse
import os
import sys

import numpy as np

from . import exact, fem, geometry, rational, stepper
from .errors import (
    ConstructionError,
    DivergenceError,
    EigenSolverError,
    MeshFormatError,
    MeshValidationError,
    ParameterError,
    RootSearchError,
    SolverError,
)

_NUMERICAL_ERRORS = (
    ConstructionError,
    DivergenceError,
    EigenSolverError,
    MeshFormatError,
    MeshValidationError,
    RootSearchError,
    SolverError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _emit(out, config_pairs, columns, rows):
    lines = [f"# {key}={_fmt(val)}" for key, val in config_pairs]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _float_list(text):
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise _UsageError(f"expected a comma-separated number list, got {text!r}") from None


def _int_list(text):
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise _UsageError(f"expected a comma-separated integer list, got {text!r}") from None


def _load_config(path):
    values = {}
    try:
        with open(path) as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise _UsageError(f"{path}:{line_no}: expected key=value")
                key, _, val = line.partition("=")
                values[key.strip()] = val.strip()
    except OSError as err:
        raise _UsageError(f"cannot read config file: {err}") from None
    return values


def _resolve(args, config, name, conv=str, default=None, required=False):
    """Flag value if given, else config-file value, else default."""
    val = getattr(args, name.replace("-", "_"), None)
    if val is not None:
        return val
    if name in config:
        return conv(config[name])
    if required and default is None:
        raise _UsageError(f"missing required option --{name}")
    return default


def _check_threads():
    raw = os.environ.get("FRACPOW_THREADS")
    if raw is None:
        return
    try:
        n = int(raw)
    except ValueError:
        raise _UsageError(f"FRACPOW_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise _UsageError(f"FRACPOW_THREADS must be >= 1, got {n}")
    # solver loops are sequential; a cap >= 1 is honoured trivially


def _continuous_lambda1(g):
    return exact.robin_roots(g, 1).roots[0] ** 2


def _resolve_mu(mu_text, fallback):
    """Parse --mu: 'auto' defers to the fallback callable."""
    if mu_text is None or mu_text == "auto":
        return float(fallback())
    try:
        return float(mu_text)
    except ValueError:
        raise _UsageError(f"--mu expects 'auto' or a number, got {mu_text!r}") from None


def _cmd_roots(args, config):
    gs = _resolve(args, config, "g", _float_list, required=True)
    if not gs:
        raise _UsageError("--g list is empty")
    rows = []
    for g in gs:
        rr = exact.robin_roots(g, 3)
        for k in (1, 3):
            rows.append((_fmt(g), k, rr.roots[k - 1]))
    _emit(args.out, [("command", "roots"), ("g", ",".join(_fmt(g) for g in gs))],
          ["g", "k", "nu"], rows)
    return 0


def _cmd_spectrum(args, config):
    gs = _resolve(args, config, "g", _float_list, default=[10.0])
    levels = _resolve(args, config, "level", _int_list, default=[1, 2, 3])
    tol = 1e-6
    rows = []
    failures = []
    for g in gs:
        lam1 = _continuous_lambda1(g)
        prev_upper = None
        for level in levels:
            mesh = geometry.quarter_disk_mesh(level)
            op = fem.assemble(mesh, fem.ProblemCoefficients(g=g))
            bounds = op.spectrum(tol=tol)
            ratio = "" if prev_upper is None else bounds.upper / prev_upper
            prev_upper = bounds.upper
            rows.append((_fmt(g), level, bounds.lower, bounds.upper, lam1, ratio))
            rel = abs(bounds.lower - lam1) / lam1
            if rel > 0.01:
                failures.append(f"g={g} level={level}: lower off by {rel:.3%}")
    _emit(
        args.out,
        [("command", "spectrum"), ("g", ",".join(_fmt(g) for g in gs)),
         ("levels", ",".join(str(l) for l in levels)), ("tol", tol)],
        ["g", "level", "lower", "upper", "lambda1_continuous", "upper_ratio"],
        rows,
    )
    if failures:
        raise EigenSolverError("; ".join(failures))
    return 0


def _cmd_gamma(args, config):
    alphas = _resolve(args, config, "alpha", _float_list, default=[0.25, 0.5, 0.75])
    ms = _resolve(args, config, "M", _int_list, default=[5, 10, 20, 40])
    g = _resolve(args, config, "g", float, default=10.0)
    mu = _resolve_mu(_resolve(args, config, "mu"), lambda: _continuous_lambda1(g))
    rows = []
    for m in ms:
        for alpha in alphas:
            approx = rational.build_negative_power(1.0 - alpha, mu, m)
            rows.append((m, alpha, rational.gamma_bar(approx).value))
    _emit(
        args.out,
        [("command", "gamma"), ("mu", mu),
         ("alpha", ",".join(_fmt(a) for a in alphas)),
         ("M", ",".join(str(m) for m in ms))],
        ["M", "alpha", "gamma_bar"],
        rows,
    )
    return 0


def _cmd_approx_error(args, config):
    quantity = _resolve(args, config, "quantity", str, default="power-error")
    ms = _resolve(args, config, "M", _int_list, default=[5, 10, 20, 40])
    g = _resolve(args, config, "g", float, default=10.0)
    mu = _resolve_mu(_resolve(args, config, "mu"), lambda: _continuous_lambda1(g))
    z_min = _resolve(args, config, "z-min", float, default=mu)
    z_max = _resolve(args, config, "z-max", float, default=7.5e4)
    points = _resolve(args, config, "points", int, default=100)
    if z_min <= 0.0 or z_max <= z_min:
        raise _UsageError("need 0 < z-min < z-max")
    if points < 2:
        raise _UsageError("need at least two sample points")
    z = np.geomspace(z_min, z_max, points)

    header = [("command", "approx-error"), ("quantity", quantity), ("mu", mu),
              ("M", ",".join(str(m) for m in ms)),
              ("z_min", z_min), ("z_max", z_max), ("points", points)]
    columns = ["z"]
    series = []
    if quantity == "power-error":
        beta = _resolve(args, config, "beta", float, default=0.5)
        header.append(("beta", beta))
        target = z ** (-beta)
        for m in ms:
            approx = rational.build_negative_power(beta, mu, m)
            series.append(np.abs(rational.eval_scalar(approx, z) - target))
            columns.append(f"err_M{m}")
    elif quantity == "growth":
        alpha = _resolve(args, config, "alpha", float, default=0.5)
        header.append(("alpha", alpha))
        for m in ms:
            approx = rational.build_negative_power(1.0 - alpha, mu, m)
            gbar = rational.gamma_bar(approx).value
            series.append(z * rational.eval_scalar(approx, z))
            columns.append(f"zR_M{m}")
            series.append(np.full_like(z, gbar))
            columns.append(f"gbar_M{m}")
    elif quantity in ("resolvent-error", "resolvent-value"):
        alpha = _resolve(args, config, "alpha", float, default=0.5)
        nu = _resolve(args, config, "nu", float, required=True)
        header.extend([("alpha", alpha), ("nu", nu)])
        target = 1.0 / (nu + z**alpha)
        for m in ms:
            approx = rational.build_resolvent(alpha, nu, mu, m)
            vals = rational.eval_scalar(approx, z)
            series.append(np.abs(vals - target) if quantity == "resolvent-error" else vals)
            columns.append(f"{'err' if quantity == 'resolvent-error' else 'R'}_M{m}")
        if quantity == "resolvent-value":
            series.append(target)
            columns.append("target")
    else:
        raise _UsageError(f"unknown quantity {quantity!r}")

    rows = [tuple([zi] + [s[i] for s in series]) for i, zi in enumerate(z)]
    _emit(args.out, header, columns, rows)
    return 0


def _cmd_converge(args, config):
    scheme = _resolve(args, config, "scheme", str, default="explicit")
    if scheme not in ("explicit", "implicit"):
        raise _UsageError(f"--scheme must be explicit or implicit, got {scheme!r}")
    alpha = _resolve(args, config, "alpha", float, default=0.5)
    g = _resolve(args, config, "g", float, default=10.0)
    level = _resolve(args, config, "level", int, default=2)
    ms = _resolve(args, config, "M", _int_list, default=[5, 10, 20, 40])
    ns = _resolve(args, config, "N", _int_list, default=[25, 50, 100, 200])
    sigma = _resolve(args, config, "sigma", float, default=1.0)
    t_final = _resolve(args, config, "T", float, default=0.25)
    mu_text = _resolve(args, config, "mu")

    spec = exact.ExactSolutionSpec.for_parameters(g, alpha, t_final)
    mesh = geometry.quarter_disk_mesh(level)
    op = fem.assemble(mesh, fem.ProblemCoefficients(g=g))
    mu = _resolve_mu(mu_text, lambda: op.spectrum().safe_lower)

    def radius(x, y):
        return np.sqrt(x * x + y * y)

    def u_at(t):
        return lambda x, y: exact.exact_solution(spec, radius(x, y), t)

    w0 = fem.l2_project(u_at(0.0), mesh, op.mass)

    rows = []
    for m in ms:
        for n in ns:
            if n == 0:
                eps2 = fem.l2_error(w0, u_at(0.0), mesh)
                _, eps_inf = fem.error_norms(w0, u_at(0.0), mesh, op.mass)
                rows.append((scheme, level, _fmt(alpha), _fmt(g), _fmt(sigma), m, 0,
                             0.0, eps2, eps_inf, 1, "projection-only"))
                continue
            kind = stepper.SchemeKind.EXPLICIT if scheme == "explicit" else stepper.SchemeKind.IMPLICIT_WEIGHTED
            cfg = stepper.SchemeConfig(
                tau=t_final / n, steps=n, quad_order=m, alpha=alpha,
                kind=kind, sigma=sigma, mu=mu,
            )
            run = stepper.run_explicit if scheme == "explicit" else stepper.run_implicit
            res = run(op, w0, None, cfg, exact=u_at(t_final))
            cert = res.certificate
            rows.append((scheme, level, _fmt(alpha), _fmt(g), _fmt(sigma), m, n,
                         cfg.tau, res.errors[0], res.errors[1],
                         int(bool(cert.ok)), cert.as_text()))
    _emit(
        args.out,
        [("command", "converge"), ("scheme", scheme), ("alpha", alpha), ("g", g),
         ("level", level), ("sigma", sigma), ("T", t_final), ("mu", mu),
         ("M", ",".join(str(m) for m in ms)), ("N", ",".join(str(n) for n in ns)),
         ("exact_reference", "J0(nu1 r) + 1.5 J0(nu3 r), first/third Robin roots")],
        ["scheme", "level", "alpha", "g", "sigma", "M", "N", "tau",
         "eps2", "eps_inf", "cert_ok", "certificate"],
        rows,
    )
    return 0


def _cmd_mesh(args, config):
    level = _resolve(args, config, "level", int, required=True)
    out = _resolve(args, config, "out", str, required=True)
    mesh = geometry.quarter_disk_mesh(level)
    geometry.write_mesh(mesh, out)
    sys.stdout.write(
        f"vertices {mesh.n_vertices} triangles {mesh.n_triangles} "
        f"edges {len(mesh.boundary_edges)}\n"
    )
    return 0


_COMMANDS = {
    "roots": _cmd_roots,
    "spectrum": _cmd_spectrum,
    "gamma": _cmd_gamma,
    "approx-error": _cmd_approx_error,
    "converge": _cmd_converge,
    "mesh": _cmd_mesh,
}


def _build_parser():
    parser = _Parser(prog="fracpow", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add(name, **flags):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--out", default=None)
        for flag, conv in flags.items():
            p.add_argument(f"--{flag}", type=conv, default=None, dest=flag.replace("-", "_"))
        return p

    add("roots", g=_float_list)
    add("spectrum", g=_float_list, level=_int_list)
    add("gamma", alpha=_float_list, M=_int_list, mu=str, g=float)
    add(
        "approx-error",
        quantity=str, beta=float, alpha=float, nu=float, mu=str, g=float,
        M=_int_list, **{"z-min": float, "z-max": float, "points": int},
    )
    add(
        "converge",
        scheme=str, alpha=float, g=float, level=int, M=_int_list, N=_int_list,
        sigma=float, T=float, mu=str,
    )
    add("mesh", level=int)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        _check_threads()
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required (roots, spectrum, gamma, "
                              "approx-error, converge, mesh)")
        config = _load_config(args.config) if args.config else {}
        return _COMMANDS[args.command](args, config)
    except _UsageError as err:
        sys.stderr.write(f"usage error: {err}\n")
        return 1
    except ParameterError as err:
        sys.stderr.write(f"parameter error: {err}\n")
        return 1
    except _NUMERICAL_ERRORS as err:
        sys.stderr.write(f"numerical failure: {err}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
