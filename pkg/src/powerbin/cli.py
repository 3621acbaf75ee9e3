"""Command-line front end: ``price``, ``validate`` and ``converge``.

Exit codes: 0 ok or PASS, 1 validation FAIL, 2 contract file does not
parse, 3 numeric failure, 4 oracle cannot handle the contract, 5 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

from .contractfile import ContractFileError, ParsedContract, load_contract
from .contracts import closed_form_price
from .core import MarketParams
from .oracles import McConfig, QuadratureConfig, UnsupportedContract, mc_price, quad_price
from .products.convergence import CSV_HEADER, convergence_study

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_NUMERIC, EXIT_UNSUPPORTED, EXIT_IO = range(6)
SEED_ENV = "POWERBIN_SEED"
MC_SIGMAS = 3.0
QUAD_FACTOR = 10.0
# a constant payoff has a rounding-level SE; gaps below this count as zero
MC_ROUNDING = 64 * sys.float_info.epsilon


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _Exit(EXIT_PARSE, f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _load(path: str) -> ParsedContract:
    try:
        return load_contract(path)
    except ContractFileError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc}") from None
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None


def _numeric(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (UnsupportedContract, TypeError) as exc:
        raise _Exit(EXIT_UNSUPPORTED, str(exc)) from None
    except (ArithmeticError, ValueError) as exc:
        raise _Exit(EXIT_NUMERIC, f"numeric failure: {exc}") from None


def _emit(report: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(report, indent=2) + "\n")
        return
    for key, value in report.items():
        if isinstance(value, dict):
            out.write(f"{key}:\n")
            for k, v in value.items():
                out.write(f"  {k}: {_fmt(v) if isinstance(v, float) else v}\n")
        else:
            out.write(f"{key}: {_fmt(value) if isinstance(value, float) else value}\n")


def cmd_price(args, out) -> int:
    pc = _load(args.file)
    res = _numeric(closed_form_price, pc.contract, pc.x, pc.t, pc.params, pc.J)
    _emit({"kind": pc.kind, "value": res.value, "diagnostics": dict(res.diagnostics)}, args.format, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    pc = _load(args.file)
    if args.paths < 2:
        raise _Exit(EXIT_PARSE, f"--paths must be >= 2, got {args.paths}")
    if not args.rel_tol > 0.0:
        raise _Exit(EXIT_PARSE, f"--rel-tol must be > 0, got {args.rel_tol}")
    cf = _numeric(closed_form_price, pc.contract, pc.x, pc.t, pc.params, pc.J).value
    report: dict = {"kind": pc.kind, "closed_form": cf}
    passed = True
    if args.oracle in ("quad", "both"):
        q = _numeric(quad_price, pc.contract, pc.x, pc.t, pc.params, QuadratureConfig(rel_tol=args.rel_tol))
        rel = abs(cf - q.value) / max(abs(q.value), 1e-300)
        ok = rel <= QUAD_FACTOR * args.rel_tol
        passed &= ok
        report["quad"] = {"value": q.value, "abs_gap": abs(cf - q.value), "rel_gap": rel, "verdict": "PASS" if ok else "FAIL"}
    if args.oracle in ("mc", "both"):
        paths = args.paths + (args.paths % 2)
        cfg = McConfig(paths=paths, seed=args.seed)
        m = _numeric(mc_price, pc.contract, pc.x, pc.t, pc.params, cfg, J=pc.J)
        gap = abs(cf - m.value)
        floor = MC_ROUNDING * max(abs(cf), abs(m.value))
        z = gap / m.stderr if m.stderr > 0.0 else (0.0 if gap == 0.0 else math.inf)
        ok = z <= MC_SIGMAS or gap <= floor
        passed &= ok
        report["mc"] = {
            "value": m.value,
            "stderr": m.stderr,
            "abs_gap": gap,
            "gap_over_se": z,
            "paths": paths,
            "seed": args.seed,
            "verdict": "PASS" if ok else "FAIL",
        }
    report["result"] = "PASS" if passed else "FAIL"
    _emit(report, args.format, out)
    return EXIT_OK if passed else EXIT_FAIL


def _ladder(text: str) -> list[int]:
    try:
        ladder = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise _Exit(EXIT_PARSE, f"--ladder must be comma-separated integers, got {text!r}") from None
    if not ladder or any(n < 2 for n in ladder):
        raise _Exit(EXIT_PARSE, f"--ladder entries must be >= 2, got {text!r}")
    return ladder


def convergence_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        ratio = "" if r.error_ratio_vs_prev is None else repr(r.error_ratio_vs_prev)
        w.writerow([r.n, repr(r.V_n), repr(r.V_continuous), repr(r.abs_error), repr(r.rel_error), ratio])
    return buf.getvalue()


def cmd_converge(args, out) -> int:
    ladder = _ladder(args.ladder)
    try:
        params = MarketParams(args.r, args.q, args.sigma)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from None
    rows = _numeric(convergence_study, args.product, ladder, args.x, params, args.K, args.T)
    text = convergence_csv(rows)
    if args.out in (None, "-"):
        out.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}") from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="powerbin", description="Closed-form option prices and their numerical checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price a contract file")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_price)

    v = sub.add_parser("validate", help="compare the closed form with the oracles")
    v.add_argument("file")
    v.add_argument("--oracle", choices=("mc", "quad", "both"), default="both")
    v.add_argument("--paths", type=int, default=1_000_000)
    v.add_argument("--seed", type=int, default=None, help=f"default 0, or ${SEED_ENV}")
    v.add_argument("--rel-tol", type=float, default=1e-8)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("converge", help="discrete vs continuous geometric Asian, as CSV")
    c.add_argument("--product", choices=("fixed", "floating"), default="fixed")
    c.add_argument("--ladder", default="8,16,32,64,128")
    c.add_argument("--x", type=float, default=100.0)
    c.add_argument("--K", type=float, default=100.0)
    c.add_argument("--r", type=float, default=0.05)
    c.add_argument("--q", type=float, default=0.0)
    c.add_argument("--sigma", type=float, default=0.2)
    c.add_argument("--T", type=float, default=1.0)
    c.add_argument("--out", default=None, help="CSV path; stdout when omitted")
    c.set_defaults(func=cmd_converge)
    return ap


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        return args.func(args, out)
    except _Exit as exc:
        err.write(f"powerbin: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
