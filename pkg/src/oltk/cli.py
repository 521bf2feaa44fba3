"""Command-line front end: JSON in, JSON out.

Exit status 0 on success, 1 when an input cannot be read or parsed, 2 on a
precondition violation (an error object is printed on stdout) and 3 when an
internal consistency check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import selftest
from .errors import InternalConsistencyError, PreconditionError
from .exposure import counterexample_sequence, nabla2_failure_blocks, sep_space_check, strongly_exposed_classify
from .level import dual_k_interval, dual_modular_P, dual_norm, level_decompose
from .modular import k_interval, luxemburg_norm, orlicz_norm, theta
from .orlicz import OrliczFunction, delta2, is_strictly_convex, nabla2
from .rearrange import mpt, rearrangement
from .step import StepFunction, Weight

COMMANDS = ("rearrange", "norm", "dual", "kset", "level", "classify", "counterexample", "check-space", "selftest")


@dataclass(frozen=True)
class RunConfig:
    bisect_rtol: float = 1e-10
    assert_tol: float = 1e-8
    grid: int = 64
    seed: int = 0
    output: str | None = None


class InputError(Exception):
    """An input file is missing, unreadable or not valid JSON."""


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become the strings ``Infinity``, ``-Infinity``, ``NaN``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), ensure_ascii=False, allow_nan=False)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: {e}") from None


def _parse(path: str | None, flag: str, build):
    if path is None:
        raise PreconditionError(f"{flag} is required", field=flag.lstrip("-"))
    data = _load_json(path)
    if not isinstance(data, dict):
        raise PreconditionError(f"{flag}: expected a JSON object", field=flag.lstrip("-"))
    try:
        return build(data)
    except PreconditionError:
        raise
    except (TypeError, ValueError) as e:
        raise PreconditionError(f"{flag}: {e}", field=flag.lstrip("-")) from None


def _phi(args) -> OrliczFunction:
    return _parse(args.phi, "--phi", OrliczFunction.from_dict)


def _omega(args) -> Weight:
    return _parse(args.omega, "--omega", Weight.from_dict)


def _input(args) -> StepFunction:
    return _parse(args.input, "--in", StepFunction.from_dict)


# commands ------------------------------------------------------------------


def cmd_rearrange(args, cfg: RunConfig) -> dict:
    f = _input(args)
    return {"rearranged": rearrangement(f).to_dict(), "sigma": mpt(f).to_list()}


def cmd_norm(args, cfg: RunConfig) -> dict:
    F, w, f = _phi(args), _omega(args), _input(args)
    out: dict = {}
    if args.which in ("luxemburg", "both"):
        out["luxemburg"] = luxemburg_norm(F, w, f, rtol=cfg.bisect_rtol)
    if args.which in ("orlicz", "both"):
        if f.is_zero:
            out.update({"orlicz": 0.0, "k_star": math.nan, "k_star_star": math.nan, "case": None})
        else:
            K = k_interval(F, w, f, rtol=cfg.bisect_rtol)
            out.update({"orlicz": K.attained_norm, "k_star": K.k_star, "k_star_star": K.k_star_star, "case": K.case_tag})
        out["theta"] = theta(F, w, f)
    return out


def cmd_kset(args, cfg: RunConfig) -> dict:
    F, w, x = _phi(args), _omega(args), _input(args)
    return k_interval(F, w, x, rtol=cfg.bisect_rtol).to_dict()


def cmd_dual(args, cfg: RunConfig) -> dict:
    G = _parse(args.psi, "--psi", OrliczFunction.from_dict)
    w, f = _omega(args), _input(args)
    out = {"P": dual_modular_P(G, w, f), "dual_norm": dual_norm(G, w, f, rtol=cfg.bisect_rtol)}
    if not f.is_zero:
        out["k"] = dual_k_interval(G.conjugate, G, w, f, rtol=cfg.bisect_rtol).to_dict()
    return out


def cmd_level(args, cfg: RunConfig) -> dict:
    w, f = _omega(args), _input(args)
    return level_decompose(rearrangement(f), w).to_dict()


def cmd_classify(args, cfg: RunConfig) -> dict:
    F, w, x = _phi(args), _omega(args), _input(args)
    return strongly_exposed_classify(F, w, x, tol=cfg.assert_tol).to_dict()


def cmd_counterexample(args, cfg: RunConfig) -> dict:
    F, w, x = _phi(args), _omega(args), _input(args)
    if args.n < 1:
        raise PreconditionError("--n must be a positive integer", field="n")
    vd = strongly_exposed_classify(F, w, x, tol=cfg.assert_tol)
    if vd.counterexample_recipe is None:
        raise PreconditionError(f"no counterexample recipe for verdict {vd.verdict}", field="in", code="no-recipe")
    xn = counterexample_sequence(F, w, x, vd, args.n)
    return {"recipe": vd.counterexample_recipe, "n": args.n, "x_n": xn.to_dict()}


def cmd_check_space(args, cfg: RunConfig) -> dict:
    F = _phi(args)
    ok, reasons = sep_space_check(F)
    out = {
        "strongly_exposed_space": ok,
        "failed": reasons,
        "delta2": delta2(F),
        "nabla2": nabla2(F),
        "strictly_convex": is_strictly_convex(F),
    }
    if "∇₂" in reasons:
        w = _omega(args) if args.omega else Weight.constant(1.0)
        bc = nabla2_failure_blocks(F, w, args.n or 25)
        out["blocks"] = {
            "n_blocks": len(bc.u),
            "P": dual_modular_P(F.conjugate, w, bc.f),
            "P_scaled_1.1": dual_modular_P(F.conjugate, w, bc.f * 1.1),
            **bc.to_dict(),
        }
    return out


def cmd_selftest(args, cfg: RunConfig) -> dict:
    return selftest.summary(selftest.run(seed=cfg.seed, n=args.n or 20, grid=cfg.grid, tol=cfg.assert_tol))


HANDLERS = {
    "rearrange": cmd_rearrange,
    "norm": cmd_norm,
    "dual": cmd_dual,
    "kset": cmd_kset,
    "level": cmd_level,
    "classify": cmd_classify,
    "counterexample": cmd_counterexample,
    "check-space": cmd_check_space,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="oltk", description="Orlicz-Lorentz toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--phi", help="Orlicz function JSON")
    ap.add_argument("--psi", help="complementary Orlicz function JSON")
    ap.add_argument("--omega", help="weight JSON")
    ap.add_argument("--in", dest="input", help="step function JSON")
    ap.add_argument("--which", choices=("luxemburg", "orlicz", "both"), default="both")
    ap.add_argument("--tol", type=float, help="assertion tolerance (default 1e-8, or OLTK_TOL)")
    ap.add_argument("--bisect-tol", type=float, default=1e-10, help="relative bisection tolerance")
    ap.add_argument("--grid", type=int, default=64, help="oracle grid size")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=None, help="sequence index, block count or selftest size")
    ap.add_argument("--out", help="also write the JSON result to this path")
    return ap


def config_from_args(args) -> RunConfig:
    tol = args.tol
    if tol is None:
        env = os.environ.get("OLTK_TOL")
        tol = float(env) if env else 1e-8
    return RunConfig(bisect_rtol=args.bisect_tol, assert_tol=tol, grid=args.grid, seed=args.seed, output=args.out)


def dispatch(command: str, args, cfg: RunConfig) -> tuple[int, str]:
    """Run one command; return ``(exit status, JSON text)``."""
    if command == "counterexample" and args.n is None:
        args.n = 50
    try:
        result = HANDLERS[command](args, cfg)
    except InputError as e:
        print(f"oltk: {e}", file=sys.stderr)
        return 1, dumps({"code": "parse-error", "message": str(e), "offending_field": None})
    except PreconditionError as e:
        return 2, dumps(e.to_dict())
    except InternalConsistencyError as e:
        print(f"oltk: internal consistency check failed: {e}", file=sys.stderr)
        return 3, dumps({"code": "internal", "message": str(e), "offending_field": None})
    if command == "selftest" and result["failed"]:
        return 3, dumps(result)
    return 0, dumps(result)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError:
        print("oltk: OLTK_TOL is not a number", file=sys.stderr)
        return 1
    status, text = dispatch(args.command, args, cfg)
    print(text)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
