"""Print discrete-vs-continuous geometric Asian convergence for both strike styles.

    python3 scripts/convergence_table.py [--ladder 8,16,32,64,128,256,512]
"""

import argparse

from powerbin.core import MarketParams
from powerbin.products import convergence_study


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ladder", default="8,16,32,64,128,256,512")
    ap.add_argument("--x", type=float, default=100.0)
    ap.add_argument("--K", type=float, default=100.0)
    ap.add_argument("--r", type=float, default=0.05)
    ap.add_argument("--q", type=float, default=0.0)
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--T", type=float, default=1.0)
    args = ap.parse_args()
    ladder = [int(v) for v in args.ladder.split(",")]
    params = MarketParams(args.r, args.q, args.sigma)
    for kind in ("fixed", "floating"):
        rows = convergence_study(kind, ladder, args.x, params, args.K, args.T)
        print(f"{kind} strike, continuous limit {rows[0].V_continuous:.10f}")
        print(f"{'n':>6} {'V_n':>14} {'abs_error':>12} {'rel_error':>12} {'ratio':>7}")
        for r in rows:
            ratio = "" if r.error_ratio_vs_prev is None else f"{r.error_ratio_vs_prev:.4f}"
            print(f"{r.n:>6} {r.V_n:>14.10f} {r.abs_error:>12.4e} {r.rel_error:>12.4e} {ratio:>7}")
        print()


if __name__ == "__main__":
    main()
