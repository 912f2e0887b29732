"""Command line entry point: ``dhh <command> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .diffmod import Bimodule, DiffAlgebra, DiffModule, DiffRing
from .diffpoly import derivation_solve, enveloping_window_check, hh_windowed, resolution_maps
from .errors import AxiomViolation, DHHError, ParseError
from .hochschild import cohomology, hochschild_complex
from .instances import PRESETS, preset
from .linfp import is_prime
from .spectral import absolute_hh, coinv_complex, fix_complex
from .verify import SUITES, run_suite

COMMANDS = ("validate", "complex", "cohomology", "verify", "poly", "report")


# ------------------------------------------------------------------ config


def _array(obj, path, ndim):
    try:
        a = np.asarray(obj, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: expected an integer array") from exc
    if a.ndim != ndim:
        raise ParseError(f"{path}: expected {ndim} dimensions, got {a.ndim}")
    return a


def _section(doc, key):
    sec = doc.get(key)
    if not isinstance(sec, dict):
        raise ParseError(f"missing table {key!r}")
    return sec


def _actions(sec, path, k, dim):
    if "action" in sec:
        return [_array(a, f"{path}.action[{i}]", 2) for i, a in enumerate(sec["action"])]
    if k.dim != 1:
        raise ParseError(f"{path}.action is required when dim k > 1")
    return [np.eye(dim, dtype=np.int64)]


def parse_config(doc: dict):
    """Instance document -> (A, M, options).  Raises ParseError or AxiomViolation."""
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a table")
    if "preset" in doc:
        A, M = load_preset(doc["preset"])
        return A, M, doc.get("options", {})
    p = doc.get("p")
    if not isinstance(p, int) or not is_prime(p) or p > 251:
        raise ParseError(f"p must be a prime <= 251, got {p!r}")
    ring = _section(doc, "ring")
    rdim = ring.get("dim", 1)
    if rdim == 1 and "mult" not in ring:
        k = DiffRing(p, np.ones((1, 1, 1), dtype=np.int64), [1], ring.get("sigma", [[1]]), name=f"F{p}")
    else:
        k = DiffRing(p, _array(ring.get("mult"), "ring.mult", 3), _array(ring.get("unit"), "ring.unit", 1),
                     _array(ring.get("sigma"), "ring.sigma", 2), name=ring.get("name", "k"))
    alg = _section(doc, "algebra")
    adim = int(alg.get("dim", 0))
    amod = DiffModule(k, _actions(alg, "algebra", k, adim), _array(alg.get("sigma"), "algebra.sigma", 2))
    A = DiffAlgebra(amod, _array(alg.get("mult"), "algebra.mult", 3), _array(alg.get("unit"), "algebra.unit", 1),
                    name=alg.get("name", "A"))
    mod = _section(doc, "module")
    mdim = int(mod.get("dim", 0))
    mmod = DiffModule(k, _actions(mod, "module", k, mdim), _array(mod.get("sigma"), "module.sigma", 2))
    M = Bimodule(A, mmod, [_array(x, "module.left", 2) for x in mod.get("left", [])],
                 [_array(x, "module.right", 2) for x in mod.get("right", [])], name=mod.get("name", "M"))
    for obj, dim, key in ((k, rdim, "ring"), (A, adim, "algebra"), (M, mdim, "module")):
        if obj.dim != dim:
            raise ParseError(f"{key}.dim = {dim} does not match the data ({obj.dim})")
    for obj in (k, A, M):
        rep = obj.validate()
        if not rep:
            raise AxiomViolation(rep)
    return A, M, doc.get("options", {})


def to_config(A, M) -> dict:
    """Instance document for (A, M); parse_config inverts it."""
    k = A.ring
    return {
        "p": A.p,
        "ring": {"dim": k.dim, "mult": k.mult.tolist(), "unit": k.unit.tolist(), "sigma": k.sigma.tolist(),
                 "name": k.name},
        "algebra": {"dim": A.dim, "mult": A.mult.tolist(), "unit": A.unit.tolist(),
                    "sigma": A.sigma.tolist(), "action": [a.tolist() for a in A.module.act], "name": A.name},
        "module": {"dim": M.dim, "left": [x.tolist() for x in M.left], "right": [x.tolist() for x in M.right],
                   "sigma": M.sigma.tolist(), "action": [a.tolist() for a in M.module.act], "name": M.name},
    }


def load_preset(name):
    if name not in PRESETS:
        raise ParseError(f"unknown preset {name!r}; known presets: {', '.join(sorted(PRESETS))}")
    return preset(name)


def load_input(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return parse_config(doc)


# ------------------------------------------------------------------ runners


def _echo(A, M, source):
    return {"source": source, "p": A.p, "dim_k": A.ring.dim, "dim_A": A.dim, "dim_M": M.dim,
            "algebra": A.name, "module": M.name}


def run_validate(A, M, args):
    checks = {}
    for key, obj in (("ring", A.ring), ("algebra", A), ("module", M)):
        rep = obj.validate()
        checks[key] = {"ok": rep.ok, "failure": rep.failure}
    checks["inversive"] = {"ok": bool(A.ring.inversive and A.inversive and M.inversive), "failure": ""}
    return {"checks": checks}, all(c["ok"] for c in checks.values())


def run_complex(A, M, args):
    c = hochschild_complex(A, M, args.max_degree)
    rep = c.check()
    diffs = [{"n": n, "shape": list(d.shape), "matrix": d.tolist()} for n, d in enumerate(c.differentials)]
    return {"dims": [c.dim(n) for n in range(c.top + 1)], "differentials": diffs,
            "check": {"ok": rep.ok, "failure": rep.failure}}, rep.ok


def dims_table(A, M, D):
    c = hochschild_complex(A, M, D)
    rep = absolute_hh(A, M, D, c)
    internal = cohomology(c)
    fixc = cohomology(fix_complex(c), check_stable=False).dims
    coinvc = cohomology(coinv_complex(c), check_stable=False).dims
    rows = []
    for n in range(D + 1):
        rows.append({"n": n, "internal": internal.dims[n], "fix_complex": fixc[n], "coinv_complex": coinvc[n],
                     "fix_of_HH": internal.fix_dims[n], "coinv_of_HH": internal.coinv_dims[n],
                     "hyper": rep.hyper[n]})
    return rows, rep


def run_cohomology(A, M, args):
    rows, _ = dims_table(A, M, args.max_degree)
    return {"max_degree": args.max_degree, "table": rows}, True


def run_report(A, M, args):
    rows, rep = dims_table(A, M, args.max_degree)
    ses = [t.as_dict() for t in rep.ses if t.positions]
    ok = all(t.exact and t.dimension_identity for t in rep.ses) and rep.les.exact
    return {"max_degree": args.max_degree, "table": rows, "ses": ses, "les": rep.les.as_dict(),
            "readings": {"fix_complex": rep.fix_of_complex, "hyper": rep.hyper}}, ok


def run_verify(args):
    out = run_suite(args.suite, trials=args.trials, seed=args.seed, max_degree=args.max_degree)
    return out, out["ok"]


def run_poly(args):
    r, d, p = args.order, args.degree, args.p
    der = derivation_solve(p, r, d)
    _, _, res = resolution_maps(p, r, d)
    hh = hh_windowed(p, r, d)
    pairs, rk, window = enveloping_window_check(p, r, d)
    out = {
        "p": p, "order": r, "degree": d,
        "derivations": {"dim": der.dim, "window_count": der.window_count, "classical_dim": der.classical_dim,
                        "shift_forced": der.shift_forced},
        "resolution": res.as_dict(),
        "hh": {"hh0": hh.hh0_dim, "hh1": hh.hh1_dim, "expected0": hh.expected0, "expected1": hh.expected1,
               "f_star_zero": hh.f_star_zero, "g_star_zero": hh.g_star_zero},
        "enveloping": {"pairs": pairs, "rank": rk, "window": window},
    }
    ok = (der.dim == der.window_count and der.shift_forced and res.ok and hh.ok
          and pairs == rk == window)
    return out, ok


# ------------------------------------------------------------------ output


def _text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key, val in obj.items():
            if isinstance(val, (dict, list)) and val and not _flat(val):
                lines.append(f"{pad}{key}:")
                lines.extend(_text(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(val)}")
    elif isinstance(obj, list):
        for val in obj:
            if isinstance(val, dict) and val and all(not isinstance(v, (dict, list)) for v in val.values()):
                lines.append(f"{pad}- " + ", ".join(f"{k}: {_scalar(v)}" for k, v in val.items()))
            elif isinstance(val, (dict, list)) and not _flat(val):
                lines.append(f"{pad}-")
                lines.extend(_text(val, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(val)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat(val):
    if isinstance(val, dict):
        return False
    return all(not isinstance(v, (dict, list)) for v in val)


def _scalar(val):
    if isinstance(val, list):
        return "[" + ", ".join(_scalar(v) for v in val) + "]"
    if isinstance(val, bool):
        return "yes" if val else "no"
    return str(val)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def render_json(report) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def render_text(report) -> str:
    return "\n".join(_text(_jsonable(report))) + "\n"


# ------------------------------------------------------------------ main


def build_parser():
    ap = argparse.ArgumentParser(prog="dhh", description="Internal Hochschild cohomology of finite difference algebras.")
    ap.add_argument("--version", action="version", version=f"dhh {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--input", metavar="FILE", help="JSON instance document")
    src.add_argument("--preset", metavar="NAME", help=f"one of: {', '.join(sorted(PRESETS))}")
    ap.add_argument("--max-degree", type=int, default=4, metavar="D")
    ap.add_argument("--suite", choices=SUITES, default="complex")
    ap.add_argument("--trials", type=int, default=20, metavar="N")
    ap.add_argument("--seed", type=int, default=0, metavar="S")
    ap.add_argument("--order", type=int, default=2, metavar="r")
    ap.add_argument("--degree", type=int, default=2, metavar="d")
    ap.add_argument("--p", type=int, default=2, help="prime for the poly pipeline")
    ap.add_argument("--format", choices=("text", "json"), default="json")
    ap.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identity)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.max_degree < 1:
            raise ParseError("--max-degree must be >= 1")
        if args.command == "verify":
            body, ok = run_verify(args)
            report = {"command": "verify", "version": __version__, **body}
        elif args.command == "poly":
            if not is_prime(args.p):
                raise ParseError(f"--p must be prime, got {args.p}")
            body, ok = run_poly(args)
            report = {"command": "poly", "version": __version__, **body}
        else:
            if args.input:
                A, M, _ = load_input(args.input)
                source = args.input
            elif args.preset:
                A, M = load_preset(args.preset)
                source = f"preset:{args.preset}"
            else:
                raise ParseError(f"{args.command} needs --input FILE or --preset NAME")
            runner = {"validate": run_validate, "complex": run_complex, "cohomology": run_cohomology,
                      "report": run_report}[args.command]
            body, ok = runner(A, M, args)
            report = {"command": args.command, "version": __version__, "instance": _echo(A, M, source), **body}
    except AxiomViolation as exc:
        sys.stderr.write(f"dhh: invalid instance: {exc.report}\n")
        return 2
    except DHHError as exc:
        sys.stderr.write(f"dhh: {type(exc).__name__}: {exc}\n")
        return 2
    report["ok"] = bool(ok)
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 3)
    if args.format == "json":
        sys.stdout.write(render_json(report))
        sys.stderr.write(render_text(report))
    else:
        sys.stdout.write(render_text(report))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
