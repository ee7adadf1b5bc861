"""Trace one built-in game and dump the path as TSV.

    python3 scripts/trace_fixture.py FA2 --formulation w --seed 3 --out fa2.tsv
"""
import argparse
import sys

from seqpath.fixtures import FIXTURE_NAMES, fixture, match_equilibrium_class
from seqpath.homotopy import SolverConfig
from seqpath.tracer import trace


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("name", choices=FIXTURE_NAMES)
    ap.add_argument("--formulation", choices=["z", "w"], default="z")
    ap.add_argument("--weighting", choices=["reach", "plain"], default="reach")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="TSV path (stdout if omitted)")
    args = ap.parse_args(argv)

    fx = fixture(args.name)
    cfg = SolverConfig(formulation=args.formulation, alpha_weighting=args.weighting, seed=args.seed)
    r = trace(fx.game, cfg)
    tsv = r.trace.to_tsv(fx.game.action_labels())
    if args.out:
        with open(args.out, "w") as f:
            f.write(tsv)
    else:
        sys.stdout.write(tsv)
    cls = match_equilibrium_class(fx, r.assessment, 1e-4) if r.assessment is not None and fx.classes else None
    print(f"{args.name}: success={r.success} steps={r.iterations} attempts={r.attempts} "
          f"time={r.wall_time:.2f}s class={cls}", file=sys.stderr)
    return 0 if r.success else 1


if __name__ == "__main__":
    sys.exit(main())
