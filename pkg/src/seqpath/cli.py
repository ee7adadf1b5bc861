"""Command-line interface: solve, check, generate, bench, fixtures.

Exit codes: 0 accepted / ok, 1 checker rejected, 2 unreadable input,
3 path-following failure.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .assessment import Assessment, bayes_beliefs
from .bench import METHODS, bench_rows, rows_to_csv, solve
from .checker import MissingBeliefError, check_eps_gamma, check_sequential
from .fixtures import FIXTURE_NAMES, fixture
from .game import GameError, GameTree
from .generate import GenSpec, expected_infoset_counts, generate
from .homotopy import SolverConfig
from .io import load_game, save_game, serialize_game

EXIT_OK, EXIT_REJECTED, EXIT_INPUT, EXIT_TRACE = 0, 1, 2, 3


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _load(path: str) -> GameTree:
    try:
        return load_game(path)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except (OSError, GameError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read game {path}: {e}") from None


def _ints(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from None


def _spec(kind, n, m, a, layers, seed, zero_mode) -> GenSpec:
    actions = _ints(a)
    if n is not None and n != len(actions):
        raise click.BadParameter(f"--n {n} does not match {len(actions)} action counts")
    try:
        spec = GenSpec(kind.upper(), actions, layers=layers, seed=seed, zero_mode=zero_mode)
    except ValueError as e:
        raise click.BadParameter(str(e)) from None
    counts = _ints(m)
    if counts is not None and counts != expected_infoset_counts(spec):
        raise click.BadParameter(f"--m {m} does not match the information-set counts "
                                 f"{expected_infoset_counts(spec)} of this spec")
    return spec


def _report(game: GameTree, assessment: Assessment | None) -> dict:
    if assessment is None:
        return {}
    return {"profile": game.profile_to_dict(assessment.profile),
            "beliefs": game.beliefs_to_dict(assessment.beliefs)}


seed_option = click.option("--seed", type=int, default=0, envvar="SEQPATH_SEED", show_default=True,
                           help="Master seed (env SEQPATH_SEED).")
spec_options = [
    click.option("--type", "kind", type=click.Choice(["A", "B", "C", "a", "b", "c"]), required=True),
    click.option("--n", type=int, default=None, help="Player count (checked against --a)."),
    click.option("--m", default=None, help="Expected information-set counts, e.g. 1,1,2 (checked)."),
    click.option("--a", "actions", required=True, help="Actions per player, e.g. 2,3,3."),
    click.option("--layers", type=int, default=1, show_default=True),
    click.option("--zero-mode", type=click.Choice(["game", "entry"]), default="game", show_default=True),
]


def with_spec_options(f):
    for opt in reversed(spec_options):
        f = opt(f)
    return f


@click.group()
def main():
    """Sequential equilibria of extensive-form games by path following."""


@main.command("solve")
@click.argument("game_file")
@click.option("--method", type=click.Choice(METHODS), default="entb-z", show_default=True)
@seed_option
@click.option("--kappa", type=float, default=3.0, show_default=True)
@click.option("--t-end", type=float, default=1e-5, show_default=True)
@click.option("--trace-out", type=click.Path(dir_okay=False), default=None, help="Write the path as TSV.")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
def solve_cmd(game_file, method, seed, kappa, t_end, trace_out, as_json):
    """Compute a sequential equilibrium of GAME_FILE."""
    game = _load(game_file)
    try:
        cfg = SolverConfig(kappa=kappa, t_end=t_end)
    except ValueError as e:
        raise click.BadParameter(str(e)) from None
    out = solve(game, method, seed, cfg)
    if trace_out and len(out.trace):
        Path(trace_out).write_text(out.trace.to_tsv(game.action_labels()))
    report = {
        "game": game.name, "method": method, "seed": seed,
        "status": "accepted" if out.success else ("rejected" if out.verdict is not None else "failed"),
        "iterations": out.iterations, "wall_time": round(out.wall_time, 6),
        "message": out.message, **{k: v for k, v in out.extra.items()},
        **_report(game, out.assessment),
    }
    if out.verdict is not None:
        report["verdict"] = out.verdict.describe(game)
    if as_json:
        click.echo(json.dumps(report, indent=1))
    else:
        for k, v in report.items():
            if k in ("profile", "beliefs"):
                click.echo(f"{k}:")
                for name, vals in v.items():
                    click.echo(f"  {name}: " + ", ".join(f"{a}={p:.6f}" for a, p in vals.items()))
            else:
                click.echo(f"{k}: {v}")
    if out.success:
        sys.exit(EXIT_OK)
    sys.exit(EXIT_REJECTED if out.verdict is not None else EXIT_TRACE)


def _read_assessment(game: GameTree, path: str) -> Assessment:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read assessment {path}: {e}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("profile"), dict):
        raise InputError("assessment must be an object with a 'profile' object")
    beliefs = doc.get("beliefs")
    if beliefs is not None and not isinstance(beliefs, dict):
        raise InputError("'beliefs' must be an object")
    try:
        beta = game.profile_from_dict(doc["profile"])
        mu = game.beliefs_from_dict(beliefs or {})
        # sets without given beliefs take Bayes beliefs where the profile reaches them
        bayes = bayes_beliefs(game, beta, strict=False)
        mu = np.where(np.isnan(mu), bayes, mu)
    except (GameError, KeyError, ValueError, TypeError) as e:
        raise InputError(f"invalid assessment: {e}") from None
    return Assessment(beta, mu)


@main.command("check")
@click.argument("game_file")
@click.argument("assessment_file")
@click.option("--tol", type=float, default=None, help="Tolerance (default 1e-6 times the payoff range).")
@click.option("--eps", type=float, default=None, help="Run the eps-gamma check with this eps.")
@click.option("--gamma", type=float, default=None, help="Run the eps-gamma check with this gamma.")
def check_cmd(game_file, assessment_file, tol, eps, gamma):
    """Verify an assessment; exit 0 if accepted, 1 if rejected."""
    game = _load(game_file)
    a = _read_assessment(game, assessment_file)
    tol = tol if tol is not None else 1e-6 * max(game.payoff_range(), 1.0)
    try:
        if eps is not None or gamma is not None:
            verdict = check_eps_gamma(game, a, eps or 0.0, gamma or 0.0, tol)
        else:
            verdict = check_sequential(game, a, tol)
    except (MissingBeliefError, ValueError) as e:
        raise InputError(str(e)) from None
    click.echo(verdict.describe(game))
    sys.exit(EXIT_OK if verdict.accepted else EXIT_REJECTED)


@main.command("generate")
@with_spec_options
@seed_option
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (stdout if omitted).")
def generate_cmd(kind, n, m, actions, layers, zero_mode, seed, out):
    """Generate a random Type A/B/C game as JSON."""
    spec = _spec(kind, n, m, actions, layers, seed, zero_mode)
    game = generate(spec)
    counts = ",".join(str(len(game.player_infosets(i))) for i in range(1, game.n + 1))
    click.echo(f"{spec.label()}  information sets per player: ({counts})  m0={game.m0}", err=True)
    if out:
        save_game(game, out)
    else:
        click.echo(serialize_game(game))


@main.command("bench")
@with_spec_options
@seed_option
@click.option("--count", type=int, default=10, show_default=True)
@click.option("--methods", default="entb-z,entb-w", show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="CSV file (stdout if omitted).")
def bench_cmd(kind, n, m, actions, layers, zero_mode, seed, count, methods, jobs, out):
    """Solve COUNT generated games per method and summarize as CSV."""
    spec = _spec(kind, n, m, actions, layers, seed, zero_mode)
    meths = tuple(x.strip() for x in methods.split(",") if x.strip())
    bad = [x for x in meths if x not in METHODS]
    if bad:
        raise click.BadParameter(f"unknown methods {bad}")
    text = rows_to_csv(bench_rows(spec, count, meths, jobs))
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("fixtures")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Write <name>.json files here.")
def fixtures_cmd(out):
    """List the built-in games and their equilibrium classes."""
    for name in FIXTURE_NAMES:
        fx = fixture(name)
        classes = ", ".join(c.name for c in fx.classes) or "-"
        click.echo(f"{name}: {fx.game.name}  m0={fx.game.m0}  classes: {classes}")
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            save_game(fx.game, Path(out) / f"{name}.json")


if __name__ == "__main__":
    main()
