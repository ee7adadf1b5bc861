"""Run the standard benchmark grid and write one CSV per family.

Timings are machine-dependent; only the harness shape and success counts are
meant to be compared.  A full run solves 240 games; pass --quick to run only
the smallest spec of each family.
"""
import argparse
from pathlib import Path

from seqpath.bench import bench_rows, rows_to_csv
from seqpath.generate import GenSpec

ROWS = {
    "type_a": [GenSpec("A", (2, 10, 10)), GenSpec("A", (2, 15, 15)),
               GenSpec("A", (2, 20, 20)), GenSpec("A", (2, 25, 25))],
    "type_b": [GenSpec("B", (2, 2, 5, 3)), GenSpec("B", (2, 2, 2, 5, 3)),
               GenSpec("B", (2, 2, 2, 2, 5, 3)), GenSpec("B", (2, 2, 2, 2, 2, 5, 3))],
    "type_c": [GenSpec("C", (2, 2), layers=3), GenSpec("C", (2, 2), layers=4),
               GenSpec("C", (3, 3), layers=2), GenSpec("C", (2, 2, 2), layers=2)],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--methods", default="entb-z,entb-w")
    ap.add_argument("--out", default="bench_out")
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    methods = tuple(args.methods.split(","))
    for family, specs in ROWS.items():
        rows = []
        for spec in specs[:1] if args.quick else specs:
            spec = GenSpec(spec.kind, spec.actions, layers=spec.layers, seed=args.seed)
            rows += bench_rows(spec, args.count, methods, args.jobs)
            print(f"{spec.label()}: " + ", ".join(f"{r['method']} {r['successes']}/{r['total']} "
                                                  f"avg {r['time_avg']}s" for r in rows[-len(methods):]),
                  flush=True)
        (out / f"{family}.csv").write_text(rows_to_csv(rows))


if __name__ == "__main__":
    main()
