"""Distance to the exact equilibrium on the two games with known solutions:
logit AQRE at increasing gamma_max versus the entropy-barrier path."""
import numpy as np

from seqpath.aqre import AqreConfig, aqre_trace
from seqpath.bench import solve
from seqpath.fixtures import fixture


def main():
    for name in ("F1", "F2"):
        fx = fixture(name)
        exact = fx.classes[0].representative(fx.game, 0.5).profile
        print(f"{name}  (sup-norm error of the profile)")
        for gmax in (1e1, 1e2, 1e3, 1e4):
            r = aqre_trace(fx.game, AqreConfig(gamma_max=gmax))
            print(f"  aqre  gamma_max={gmax:<8g} {np.abs(r.assessment.profile - exact).max():.3e}  "
                  f"steps={r.iterations}")
        for method in ("entb-z", "entb-w"):
            out = solve(fx.game, method)
            print(f"  {method:<22} {np.abs(out.assessment.profile - exact).max():.3e}  steps={out.iterations}")


if __name__ == "__main__":
    main()
