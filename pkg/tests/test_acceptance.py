"""Acceptance criteria 1-10, one PASS/FAIL line each.

Under pytest the lines are printed in the terminal summary; running this file
directly prints them as each criterion finishes.
"""
from __future__ import annotations

import os
import sys
import time
from dataclasses import replace

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import oracle  # noqa: E402
from conftest import random_beliefs, random_profile  # noqa: E402
from seqpath.aqre import aqre_trace  # noqa: E402
from seqpath.assessment import (  # noqa: E402
    Assessment, bayes_beliefs, conditional_payoffs, expected_payoff, infoset_reach_probability,
    partial_payoff, partial_payoffs, reach_probability, reach_probability_excluding,
)
from seqpath.bench import bench_rows, rows_to_csv, solve  # noqa: E402
from seqpath.checker import check_sequential  # noqa: E402
from seqpath.fixtures import FIXTURE_NAMES, fixture, match_equilibrium_class  # noqa: E402
from seqpath.game import validate_perfect_recall  # noqa: E402
from seqpath.generate import GenSpec, batch, expected_infoset_counts, generate  # noqa: E402
from seqpath.homotopy import EntropyHomotopy, SolverConfig  # noqa: E402
from seqpath.tracer import trace  # noqa: E402

RESULTS: dict[int, tuple[bool, str]] = {}
METHODS = ("entb-z", "entb-w")


def _beta(game, profile, I, a):
    return float(profile[game.infoset(I).action_index(a)])


def _exact_solutions(name, targets, tol=1e-4, max_time=10.0):
    game = fixture(name).game
    notes, ok = [], True
    for method in METHODS:
        out = solve(game, method, seed=0)
        errs = [abs(_beta(game, out.assessment.profile, I, a) - v) for I, a, v in targets]
        good = out.success and max(errs) <= tol and out.wall_time <= max_time
        ok &= good
        notes.append(f"{method} err {max(errs):.1e} in {out.wall_time:.2f}s")
    return ok, "; ".join(notes)


def criterion_1():
    return _exact_solutions("F1", [("1:I2", "L", 2 / 7), ("2:I1", "U", 1 / 8)])


def criterion_2():
    return _exact_solutions("F2", [("1:I2", "A", 2 / 3), ("2:I1", "C", 2 / 3)])


def criterion_3(seeds=range(10), margin=1e-4):
    ok, notes = True, []
    for name in ("F3", "F4", "FA1", "FA2"):
        fx = fixture(name)
        for method in METHODS:
            hits = 0
            for s in seeds:
                out = solve(fx.game, method, seed=s)
                hits += out.success and match_equilibrium_class(fx, out.assessment, margin) is not None
            ok &= hits >= 0.9 * len(seeds)
            notes.append(f"{name}/{method[-1]} {hits}/{len(seeds)}")
    return ok, " ".join(notes)


def criterion_4():
    accepted = rejected = total = 0
    for fx in (fixture(n) for n in FIXTURE_NAMES):
        for cls in fx.classes:
            for r in np.linspace(0.05, 0.95, 10):
                a = cls.representative(fx.game, r)
                v = check_sequential(fx.game, a)
                total += 1
                accepted += v.accepted
                if not v.accepted:
                    continue
                idx = int(np.argmax(v.certificate.lam))
                I = fx.game.infoset(int(fx.game.infoset_of_index()[idx]))
                beta = a.profile.copy()
                rest = [k for k in range(I.offset, I.offset + len(I.actions)) if k != idx]
                s = beta[rest].sum()
                beta[rest] = 0.9 * (beta[rest] / s if s > 0 else 1.0 / len(rest))
                beta[idx] = 0.1
                rejected += not check_sequential(fx.game, Assessment(beta, a.beliefs)).accepted
    horse = fixture("F3").game
    beta = horse.profile_from_dict({"1:I1": "D", "2:I1": "c", "3:I1": "L"})
    v = check_sequential(horse, Assessment(beta, horse.beliefs_from_dict({"3:I1": [1.0, 0.0]})))
    dcl = (not v.accepted) and (v.violation.infoset, v.violation.better, v.violation.worse) == ("2:I1", "d", "c")
    ok = accepted == total and rejected == total and dcl
    return ok, f"accepted {accepted}/{total}, forced rejected {rejected}/{total}, (D,c,L) rejected: {dcl}"


def criterion_5():
    fx = fixture("F1")
    game = fx.game
    exact = fx.classes[0].representative(game, 0.5).profile
    aq = aqre_trace(game).assessment.profile
    en = solve(game, "entb-z", seed=0).assessment.profile
    k = game.infoset("2:I1").action_index("U")
    sup = float(np.abs(aq - exact).max())
    e_aq, e_en = abs(aq[k] - exact[k]), abs(en[k] - exact[k])
    ok = sup <= 2e-3 and e_en * 10 <= e_aq
    return ok, f"aqre sup error {sup:.2e}; error on U: aqre {e_aq:.2e} vs entb {e_en:.2e}"


def criterion_6(n_points=20):
    # complementarity identity at every point a Z trace evaluates
    worst_id = 0.0
    orig = EntropyHomotopy.transforms

    def spy(self, x, t):
        nonlocal worst_id
        tr = orig(self, x, t)
        if self.formulation == "z" and t > 0:
            worst_id = max(worst_id, float(np.abs(tr.w * tr.lam / t - 1.0).max()))
        return tr

    EntropyHomotopy.transforms = spy
    try:
        for name in FIXTURE_NAMES:
            trace(fixture(name).game, SolverConfig(formulation="z"))
    finally:
        EntropyHomotopy.transforms = orig

    rng = np.random.default_rng(2024)
    worst_start = worst_jac = 0.0
    for name in FIXTURE_NAMES:
        game = fixture(name).game
        for form in ("z", "w"):
            for _ in range(n_points):
                prior = random_profile(game, rng, floor=0.02)
                hom = EntropyHomotopy(game, form, prior=prior, alpha=rng.uniform(-1e-2, 1e-2, game.m0))
                worst_start = max(worst_start, float(np.abs(hom.residual(hom.start_point(), 1.0)).max()))
                t = rng.uniform(0.05, 0.95)
                x = rng.normal(0, 0.8, game.m0) if form == "z" else rng.uniform(0.25, 1.2, game.m0)
                J = hom.jacobian(x, t)
                y = np.append(x, t)
                F = np.empty_like(J)
                for j in range(game.m0 + 1):
                    h = 1e-6 * max(1.0, abs(y[j]))
                    e = np.zeros_like(y)
                    e[j] = h
                    F[:, j] = (hom.residual((y + e)[:-1], (y + e)[-1])
                               - hom.residual((y - e)[:-1], (y - e)[-1])) / (2 * h)
                worst_jac = max(worst_jac, float(np.abs(J - F).max() / max(1.0, np.abs(J).max())))
    ok = worst_id <= 1e-12 and worst_start <= 1e-12 and worst_jac <= 1e-5
    return ok, f"w*lam/t rel err {worst_id:.1e}, start residual {worst_start:.1e}, jacobian rel err {worst_jac:.1e}"


def criterion_7(n=50, tol=1e-10):
    worst = 0.0
    quotient = 0.0
    for i, name in enumerate(FIXTURE_NAMES):
        game = fixture(name).game
        rng = np.random.default_rng(100 + i)
        for _ in range(n):
            beta, mu = random_profile(game, rng), random_beliefs(game, rng)
            cu = conditional_payoffs(game, beta, mu)
            errs = [abs(reach_probability(game, beta, h) - oracle.reach(h, beta)) for h in game.nodes]
            for I in game.infosets:
                errs.append(abs(infoset_reach_probability(game, beta, I) - oracle.infoset_reach(I, beta)))
                for h in I.members:
                    errs.append(abs(reach_probability_excluding(game, beta, I, I.actions[0], h)
                                    - oracle.reach_excluding(h, beta, I)))
                for k, a in enumerate(I.actions):
                    errs.append(abs(cu[I.offset + k] - oracle.conditional_action_payoff(game, beta, mu, I, a)))
                    errs.append(abs(partial_payoff(game, beta, I, a) - oracle.partial_payoff(game, beta, I, a)))
            errs += [abs(expected_payoff(game, beta, p) - oracle.expected_payoff(game, beta, p))
                     for p in range(1, game.n + 1)]
            errs += list(np.abs(bayes_beliefs(game, beta) - oracle.bayes(game, beta)))
            worst = max(worst, max(errs))
            # quotient identity on the same (totally mixed) profile
            mu_b = bayes_beliefs(game, beta)
            U = partial_payoffs(game, beta)
            cu_b = conditional_payoffs(game, beta, mu_b)
            for I in game.infosets:
                om = infoset_reach_probability(game, beta, I)
                quotient = max(quotient, float(np.abs(cu_b[I.span] - U[I.span] / om).max()))
    ok = worst <= tol and quotient <= tol
    return ok, f"max oracle deviation {worst:.1e}, quotient identity {quotient:.1e}"


BENCH_GRID = [
    ("A", (2, 10, 10), 1, (1, 1, 2)),
    ("B", (2, 2, 5, 3), 1, (1, 2, 2, 5)),
    ("C", (2, 2), 3, (11, 21)),
]


def criterion_8():
    ok, notes = True, []
    for kind, actions, layers, want in BENCH_GRID:
        for game, _ in batch(GenSpec(kind, actions, layers=layers, seed=8), 3):
            got = tuple(len(game.player_infosets(i)) for i in range(1, game.n + 1))
            ok &= got == want and validate_perfect_recall(game).ok
        notes.append(f"{kind}{want}")
    spec = GenSpec("A", (2, 10, 10))
    ok &= generate(spec).m0 == 32 and expected_infoset_counts(spec) == (1, 1, 2)
    return ok, ("counts and recall ok for " if ok else "mismatch among ") + " ".join(notes)


def criterion_9(count=10):
    spec = GenSpec("A", (2, 3, 3), seed=0)
    ok, notes = True, []
    for method in METHODS:
        accepted, below = 0, 0
        for game, s in batch(spec, count):
            out = solve(game, method, seed=s)
            accepted += out.success
            below += out.extra.get("t", 1.0) < 1e-5
        ok &= accepted >= 0.9 * count and below >= 0.9 * count
        notes.append(f"{method}: accepted {accepted}/{count}, t<1e-5 {below}/{count}")
    return ok, "; ".join(notes)


def criterion_10():
    labels_equal = []
    for name in ("F3", "FA2"):
        game = fixture(name).game
        for method in ("entb-z", "entb-w", "aqre"):
            a, b = solve(game, method, seed=7), solve(game, method, seed=7)
            labs = game.action_labels()
            same = a.trace.to_tsv(labs) == b.trace.to_tsv(labs) and np.array_equal(
                a.assessment.profile, b.assessment.profile)
            labels_equal.append(same)
    spec = GenSpec("A", (2, 3, 3), seed=3)
    drop = ("time_avg", "time_min", "time_max")
    strip = lambda rows: rows_to_csv([{k: ("" if k in drop else v) for k, v in r.items()} for r in rows])
    c1, c2, c3 = strip(bench_rows(spec, 4)), strip(bench_rows(spec, 4)), strip(bench_rows(spec, 4, jobs=2))
    ok = all(labels_equal) and c1 == c2 == c3
    return ok, f"traces identical {sum(labels_equal)}/{len(labels_equal)}, bench CSV (time columns excluded) identical: {c1 == c2 == c3}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def run(k: int) -> tuple[bool, str]:
    start = time.perf_counter()
    ok, detail = CRITERIA[k]()
    RESULTS[k] = (bool(ok), f"{detail} [{time.perf_counter() - start:.1f}s]")
    return RESULTS[k]


def line(k: int) -> str:
    ok, detail = RESULTS[k]
    return f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {detail}"


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k):
    ok, detail = run(k)
    assert ok, detail


if __name__ == "__main__":
    for k in CRITERIA:
        run(k)
        print(line(k), flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
