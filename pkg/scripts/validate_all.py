"""Run ``powerbin validate`` on every contract file in a directory.

    python3 scripts/validate_all.py [tests/data] [--paths 1000000] [--seed 0]

The quadrature oracle is skipped for continuous Asians, which it cannot
price.  Exits 1 if any contract fails.
"""

import argparse
import io
import json
import sys
from pathlib import Path

from powerbin import cli
from powerbin.contractfile import ContractFileError, load_contract


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", nargs="?", default=str(Path(__file__).resolve().parent.parent / "tests" / "data"))
    ap.add_argument("--paths", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    failed = 0
    for path in sorted(Path(args.directory).glob("*.yaml")):
        try:
            kind = load_contract(path).kind
        except ContractFileError as exc:
            print(f"SKIP {path.name}: {exc}")
            continue
        oracle = "mc" if kind.startswith("cont_asian") else "both"
        out, err = io.StringIO(), io.StringIO()
        argv = ["validate", str(path), "--oracle", oracle, "--paths", str(args.paths), "--seed", str(args.seed), "--format", "json"]
        code = cli.main(argv, out, err)
        if code not in (0, 1):
            print(f"ERROR {path.name}: exit {code}: {err.getvalue().strip()}")
            failed += 1
            continue
        rep = json.loads(out.getvalue())
        parts = [f"closed {rep['closed_form']:.10g}"]
        if "quad" in rep:
            parts.append(f"quad rel gap {rep['quad']['rel_gap']:.2e}")
        if "mc" in rep:
            parts.append(f"mc {rep['mc']['value']:.6g} +/- {rep['mc']['stderr']:.2g} ({rep['mc']['gap_over_se']:.2f} SE)")
        print(f"{rep['result']} {path.name}: " + ", ".join(parts))
        failed += rep["result"] != "PASS"
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
