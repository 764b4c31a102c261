"""Command-line front end.

Every subcommand echoes its parameters and emits a machine-readable
report (JSON by default, CSV for sweeps, or a human summary).  Exit
codes: 0 success, 2 parameter/validation error, 1 computation failure.
"""

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, is_dataclass

import numpy as np

from . import __version__, asymptotics, designbounds, levenshtein, oracle, orthopoly
from . import pmspace, potentials, selfcheck
from .ulb import UlbReport, improve_with_qj, test_functions, ulb, ulb_odd_branch
from .errors import (
    ConditionError,
    ConvergenceError,
    DegreeOverflowError,
    DomainError,
    MonotonicityError,
    ParameterError,
    UlbkitError,
)

SCHEMA_VERSION = 1

_VALIDATION_ERRORS = (
    ParameterError,
    DegreeOverflowError,
    DomainError,
    MonotonicityError,
    argparse.ArgumentTypeError,
)


def _jsonable(obj):
    if is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return None  # keep the reports strict JSON
    if isinstance(obj, pmspace.Family):
        return obj.value
    return obj


def _add_space_args(p):
    p.add_argument("--space", required=True, choices=["sphere", "hamming", "johnson", "projective"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, help="Hamming alphabet size")
    p.add_argument("--w", type=int, help="Johnson weight")
    p.add_argument("--field-dim", type=int, choices=[1, 2, 4], help="projective field dimension")


def _space_from(args) -> pmspace.SpaceDescriptor:
    kw = {"n": args.n}
    if args.space == "hamming":
        if args.q is None:
            raise ParameterError("hamming needs --q")
        kw["q"] = args.q
    elif args.space == "johnson":
        if args.w is None:
            raise ParameterError("johnson needs --w")
        kw["w"] = args.w
    elif args.space == "projective":
        if args.field_dim is None:
            raise ParameterError("projective needs --field-dim")
        kw["field_dim"] = args.field_dim
    return pmspace.make_space(args.space, **kw)


def _add_potential_args(p):
    p.add_argument("--potential", choices=["riesz", "gaussian", "log", "monomial", "series"])
    p.add_argument("--p", type=float, help="riesz power")
    p.add_argument("--c", type=float, help="gaussian rate")
    p.add_argument("--j", type=int, help="monomial power")
    p.add_argument("--coeffs", type=str, help="comma-separated series coefficients")


def _potential_from(args) -> potentials.Potential:
    if args.potential is None:
        raise ParameterError("a --potential is required")
    name = args.potential
    if name == "riesz":
        if args.p is None:
            raise ParameterError("riesz needs --p")
        return potentials.builtin("riesz", p=args.p)
    if name == "gaussian":
        if args.c is None:
            raise ParameterError("gaussian needs --c")
        return potentials.builtin("gaussian", c=args.c)
    if name == "log":
        return potentials.builtin("log")
    if name == "monomial":
        if args.j is None:
            raise ParameterError("monomial needs --j")
        return potentials.builtin("monomial", j=args.j)
    if args.coeffs is None:
        raise ParameterError("series needs --coeffs")
    return potentials.builtin("series", coeffs=_floats(args.coeffs))


def _add_common(p):
    p.add_argument("--format", choices=["json", "csv", "human"], default="json")
    p.add_argument("--out", type=str, help="write the report to this path")
    p.add_argument("--abs-tol", type=float, default=1e-9)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--convention", choices=["sum", "mean"], default="sum")
    p.add_argument("--seed", type=int, default=0)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ParameterError(f"bad number list {text!r}") from exc


def _int_range(text):
    """lo:hi[:step] or a comma list; must be nonempty."""
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        out = list(range(lo, hi + 1, step))
    else:
        out = [int(x) for x in text.split(",") if x.strip() != ""]
    if not out:
        raise ParameterError(f"empty range {text!r}")
    return out


def _poly_from(args) -> orthopoly.PolyCoeffs:
    if args.poly is None:
        raise ParameterError("a --poly coefficient list is required")
    return orthopoly.PolyCoeffs(_floats(args.poly), args.poly_basis)


def _echo(args):
    skip = {"func", "out", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _rule_payload(rule):
    return {
        "M": rule.M,
        "tau": rule.tau,
        "k": rule.k,
        "epsilon": rule.epsilon,
        "s": rule.s,
        "nodes": _jsonable(rule.nodes),
        "weights": _jsonable(rule.weights),
        "power_sum_residual": rule.power_sum_residual,
        "odd_branch": rule.odd_branch,
    }


def _report_payload(rep: UlbReport):
    out = {
        "space": rep.space.label(),
        "M": rep.M,
        "value_sum": rep.value_sum,
        "value_mean": rep.value_mean,
        "energy_convention": rep.energy_convention,
        "value": rep.value,
        "odd_branch": rep.odd_branch,
        "rule": _rule_payload(rep.rule),
        "certificate_monomial_coeffs": _jsonable(rep.certificate.coeffs),
        "certificate_checks": _jsonable(rep.certificate_checks),
    }
    if rep.improvement:
        out["improvement"] = _jsonable(rep.improvement)
    return out


# --- subcommand handlers -----------------------------------------------------


def _cmd_ulb(args):
    space = _space_from(args)
    h = _potential_from(args)
    ms = _int_range(args.M)
    branch = ulb_odd_branch if args.odd_branch else ulb

    def solve(m):
        rep = branch(space, m, h, args.convention, abs_tol=args.abs_tol, rel_tol=args.rel_tol)
        return _report_payload(rep)

    workers = max(1, int(os.environ.get("ULBKIT_THREADS", "1")))
    if workers > 1 and len(ms) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(solve, ms))
    else:
        reports = [solve(m) for m in ms]
    return {"reports": reports} if len(ms) > 1 else reports[0]


def _cmd_quadrature(args):
    space = _space_from(args)
    return _rule_payload(levenshtein.quadrature_rule(space, args.M))


def _cmd_lev_bound(args):
    space = _space_from(args)
    return {
        "space": space.label(),
        "tau": args.tau,
        "s": args.s,
        "bound": levenshtein.lev_bound(space, args.tau, args.s),
    }


def _cmd_design_bound(args):
    space = _space_from(args)
    return {
        "space": space.label(),
        "tau": args.tau,
        "bound": levenshtein.design_bound(space, args.tau),
    }


def _cmd_testfns(args):
    space = _space_from(args)
    rep = test_functions(space, args.M, range(0, args.jmax + 1))
    return {
        "space": space.label(),
        "M": rep.M,
        "s": rep.s,
        "tau": rep.tau,
        "j": list(rep.js),
        "P": list(rep.values),
        "first_negative_j": rep.first_negative_j,
    }


def _cmd_improve(args):
    space = _space_from(args)
    h = _potential_from(args)
    rep = improve_with_qj(space, args.M, h, args.degree, eta=args.eta, convention=args.convention)
    return _report_payload(rep)


def _cmd_design_energy(args):
    space = _space_from(args)
    h = _potential_from(args)
    subset = None
    if args.I:
        vals = _floats(args.I)
        if len(vals) != 2:
            raise ParameterError("--I takes an interval as two numbers lo,hi")
        subset = (vals[0], vals[1])
    query = designbounds.DesignEnergyQuery(
        space, args.tau, args.M, h, _poly_from(args), args.direction, subset=subset
    )
    fn = designbounds.design_lower_bound if args.direction == "lower" else designbounds.design_upper_bound
    return {"space": space.label(), "direction": args.direction, "bound": fn(query)}


def _cmd_separated_energy(args):
    space = _space_from(args)
    h = _potential_from(args)
    query = designbounds.DesignEnergyQuery(
        space, 0, args.M, h, _poly_from(args), "separated_upper", separation=args.s
    )
    return {"space": space.label(), "s": args.s, "bound": designbounds.separated_upper_bound(query)}


def _load_code(space, args):
    if args.config:
        return oracle.named_config(space, args.config)
    if args.points_json:
        with open(args.points_json) as fh:
            data = json.load(fh)
        pts = data["points"] if isinstance(data, dict) else data
        return oracle.make_code(space, np.asarray(pts))
    raise ParameterError("need --config or --points-json")


def _cmd_oracle(args):
    sub = args.oracle_cmd
    if sub in ("energy", "strength", "named"):
        space = _space_from(args)
        if sub == "named":
            code = oracle.named_config(space, args.config)
            return {"space": space.label(), "config": args.config, "M": code.size,
                    "points": _jsonable(code.points)}
        code = _load_code(space, args)
        if sub == "energy":
            h = _potential_from(args)
            val = oracle.energy(space, code, h, args.convention)
            return {"space": space.label(), "M": code.size, "convention": args.convention,
                    "energy": val}
        s, ell, u = oracle.separation(space, code)
        return {"space": space.label(), "M": code.size,
                "strength": oracle.design_strength(space, code, args.tau_max),
                "separation": s, "min_t": ell, "max_t": u}
    h = _potential_from(args)
    if sub == "minimize":
        code, val, info = oracle.minimize_sphere(
            args.n, args.M, h, restarts=args.restarts, seed=args.seed
        )
        return {"space": f"S^{args.n - 1}", "M": args.M, "energy_sum": val,
                "points": _jsonable(code.points), "restart_energies": _jsonable(info["restart_energies"])}
    code, val = oracle.exhaustive_hamming(args.n, args.M, h, args.convention)
    return {"space": f"H({args.n},2)", "M": args.M, "energy": val,
            "convention": args.convention, "words": _jsonable(code.points)}


_ASY_COLS = ("n", "M", "s", "alpha_0", "rho_0_M", "remainder", "limit", "ratio1", "ratio2")


def _cmd_asymptotics(args):
    h = _potential_from(args)
    query = asymptotics.AsymptoticQuery(
        args.family, args.tau, h, delta=args.delta, rho=args.rho,
        n_range=tuple(_int_range(args.n_range)) if args.n_range else (),
    )
    rows = asymptotics.sweep(query)
    table = []
    for row in rows:
        if "skipped" in row:
            table.append({"n": row["n"], "skipped": row["skipped"]})
        else:
            table.append({c: row[c] for c in _ASY_COLS} | {"clamped": row["clamped"]})
    out = {"family": args.family, "tau": args.tau, "delta": args.delta, "rows": table}
    try:
        out["limit"] = asymptotics.limit_expression(query)
    except ParameterError:
        out["limit"] = None
    return out


def _cmd_selfcheck(args):
    ok, results = selfcheck.run_all()
    return {
        "healthy": ok,
        "checks": [{"name": n, "ok": o, "detail": d} for n, o, d in results],
    }


# --- wiring ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ulbkit",
        description="Energy bounds for codes in polynomial metric spaces",
    )
    ap.add_argument("--version", action="version", version=f"ulbkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ulb", help="universal lower energy bound")
    _add_space_args(p), _add_potential_args(p), _add_common(p)
    p.add_argument("--M", required=True, help="cardinality, range lo:hi[:step], or comma list")
    p.add_argument("--odd-branch", action="store_true")
    p.set_defaults(func=_cmd_ulb)

    p = sub.add_parser("quadrature", help="1/M-quadrature rule")
    _add_space_args(p), _add_common(p)
    p.add_argument("--M", type=int, required=True)
    p.set_defaults(func=_cmd_quadrature)

    p = sub.add_parser("lev-bound", help="cardinality bound at a separation")
    _add_space_args(p), _add_common(p)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.set_defaults(func=_cmd_lev_bound)

    p = sub.add_parser("design-bound", help="minimum design cardinality bound")
    _add_space_args(p), _add_common(p)
    p.add_argument("--tau", type=int, required=True)
    p.set_defaults(func=_cmd_design_bound)

    p = sub.add_parser("testfns", help="improvability test functions")
    _add_space_args(p), _add_common(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--jmax", type=int, default=10)
    p.set_defaults(func=_cmd_testfns)

    p = sub.add_parser("improve", help="improve the bound with a degree-j polynomial")
    _add_space_args(p), _add_potential_args(p), _add_common(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--degree", type=int, required=True, help="degree j of the improving polynomial")
    p.add_argument("--eta", type=float)
    p.set_defaults(func=_cmd_improve)

    p = sub.add_parser("design-energy", help="energy bounds for designs")
    _add_space_args(p), _add_potential_args(p), _add_common(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--direction", choices=["lower", "upper"], required=True)
    p.add_argument("--poly", type=str, help="comma-separated coefficients")
    p.add_argument("--poly-basis", choices=["monomial", "q"], default="monomial")
    p.add_argument("--I", type=str, help="inner-product interval lo,hi")
    p.set_defaults(func=_cmd_design_energy)

    p = sub.add_parser("separated-energy", help="upper energy bound at fixed separation")
    _add_space_args(p), _add_potential_args(p), _add_common(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--poly", type=str)
    p.add_argument("--poly-basis", choices=["monomial", "q"], default="monomial")
    p.set_defaults(func=_cmd_separated_energy)

    p = sub.add_parser("oracle", help="ground-truth energies and configurations")
    osub = p.add_subparsers(dest="oracle_cmd", required=True)
    for name in ("energy", "strength", "named"):
        op = osub.add_parser(name)
        _add_space_args(op), _add_common(op)
        op.add_argument("--config", type=str)
        op.add_argument("--points-json", type=str)
        if name == "energy":
            _add_potential_args(op)
        if name == "strength":
            op.add_argument("--tau-max", type=int, default=8)
        op.set_defaults(func=_cmd_oracle)
    for name in ("minimize", "exhaustive"):
        op = osub.add_parser(name)
        _add_potential_args(op), _add_common(op)
        op.add_argument("--n", type=int, required=True)
        op.add_argument("--M", type=int, required=True)
        if name == "minimize":
            op.add_argument("--restarts", type=int, default=20)
        op.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("asymptotics", help="fixed-level large-dimension sweep")
    _add_potential_args(p), _add_common(p)
    p.add_argument("--family", choices=["sphere", "hamming"], required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--rho", type=float)
    p.add_argument("--n-range", type=str, help="lo:hi[:step]")
    p.set_defaults(func=_cmd_asymptotics)

    p = sub.add_parser("selfcheck", help="run the built-in invariant suite")
    _add_common(p)
    p.set_defaults(func=_cmd_selfcheck)

    return ap


def _emit(args, payload) -> str:
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "ulbkit", "version": __version__},
        "command": args.command,
        "params": _jsonable(_echo(args)),
        "result": _jsonable(payload),
    }
    fmt = getattr(args, "format", "json")
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        rows = payload.get("rows") if isinstance(payload, dict) else None
        if rows is None:
            rows = payload.get("reports", [payload]) if isinstance(payload, dict) else [payload]
        buf = io.StringIO()
        cols = sorted({k for r in rows for k in r})
        writer = csv.DictWriter(buf, fieldnames=cols)
        writer.writeheader()
        for r in rows:
            writer.writerow({k: r.get(k, "") for k in cols})
        return buf.getvalue()
    lines = [f"ulbkit {__version__} :: {args.command}"]
    lines += [f"  {k} = {v}" for k, v in report["params"].items()]
    lines.append("result:")
    lines.append(json.dumps(report["result"], indent=2, sort_keys=True))
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        payload = args.func(args)
    except _VALIDATION_ERRORS as exc:
        _fail(args, exc)
        return 2
    except (ConvergenceError, ConditionError, UlbkitError) as exc:
        _fail(args, exc)
        return 1
    except Exception as exc:  # keep failures machine-readable
        _fail(args, exc)
        return 1
    text = _emit(args, payload)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "selfcheck":
        return 0 if payload["healthy"] else 1
    return 0


def _fail(args, exc):
    obj = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "ulbkit", "version": __version__},
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }
    sys.stderr.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    sys.exit(main())
