"""Command-line front end: figure tables and per-model queries as CSV or SVG.

Every run is fixed by (subcommand, parameters, seed, reps).  The first line
of each CSV records them; standard errors sit next to every Monte Carlo
column.  ``ROUGHPROB_SEED`` and ``ROUGHPROB_OUTDIR`` override the default
seed and output directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import bookmaker, duel, extreme_value, gentlemans_bet, kelly, nature, skill_game, tournament
from .core import ConvergenceError, DomainError, ErrorModel, QuadratureSpec, RngStream

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4

# options that do not change the numbers and so stay out of the params record
_PLUMBING = {"command", "config", "seed", "reps", "out", "format", "workers", "func"}


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    x: str | None = None
    series: list[str] = field(default_factory=list)
    group: str | None = None


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    parameters: dict
    seed: int
    reps: int
    output_path: str | None
    format: str = "csv"


def _grid(lo: float, hi: float, n: int) -> list[float]:
    return [float(v) for v in np.linspace(lo, hi, n)]


def _spec(args) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=args.tol, rel_tol=args.tol)


def _stream(args, k: int = 0) -> RngStream:
    return RngStream(args.seed).child(k)


# ---------------------------------------------------------------------------
# figure tables


def fig2_left(args) -> Table:
    rows = []
    for s in args.sigma_over_L:
        u = s * s
        rows.append([s, u, bookmaker.h(min(u, 1 / 9))])
    return Table(["sigma_over_L", "u", "h"], rows, x="sigma_over_L", series=["h"])


def fig2_right(args) -> Table:
    spec = _spec(args)
    rows = []
    for u in args.u:
        for r in args.r:
            rows.append([u, r, bookmaker.h_star(u, r, spec=spec),
                         bookmaker.h_star(u, r, clipped=True, spec=spec),
                         bookmaker.h_star_second_order(u, r)])
    return Table(["u", "r", "h_star", "h_star_clipped", "h_star_second_order"], rows,
                 x="r", series=["h_star"], group="u")


def fig3(args) -> Table:
    spec = _spec(args)
    rows = []
    for sa in args.sigma_A:
        for sb in args.sigma_B:
            perc = skill_game.SkillPerception(sa, sb, args.zeta)
            rows.append([sa, sb, skill_game.expected_gain(perc, spec)])
    return Table(["sigma_A", "sigma_B", "gain"], rows, x="sigma_B", series=["gain"], group="sigma_A")


def fig4(args) -> Table:
    rows = []
    for s in args.sigma:
        for d in args.delta:
            rows.append([s, d, kelly.expected_growth(kelly.KellySetting(d, s))])
    return Table(["sigma", "delta", "growth"], rows, x="delta", series=["growth"], group="sigma")


def fig5(args) -> Table:
    spec = _spec(args)
    rows = []
    for i, s in enumerate(args.sigma):
        est = extreme_value.simulate_choice_cost(s, args.reps, _stream(args, i),
                                                 tail_tol=args.tail_tol, workers=args.workers)
        integral = extreme_value.choice_cost_integral(s, spec) if s > 0 else 0.0
        rows.append([s, est.mean, est.std_error, integral, extreme_value.choice_cost_exact(s)])
    return Table(["sigma", "cost_mc", "cost_mc_se", "cost_integral", "cost_exact"], rows,
                 x="sigma", series=["cost_mc", "cost_exact"])


def fig6(args) -> Table:
    rows = []
    for i, s in enumerate(args.sigma):
        a = extreme_value.simulate_auction(s, args.reps, _stream(args, i),
                                           tail_tol=args.tail_tol, workers=args.workers)
        sealed, vickrey = extreme_value.auction_gains_exact(s)
        rows.append([s, a.mean_sealed, a.se_sealed, a.mean_vickrey, a.se_vickrey,
                     a.mean_gap, a.se_gap, sealed, vickrey])
    return Table(["sigma", "sealed_mc", "sealed_mc_se", "vickrey_mc", "vickrey_mc_se",
                  "gap_mc", "gap_mc_se", "sealed_exact", "vickrey_exact"], rows,
                 x="sigma", series=["sealed_mc", "vickrey_mc"])


# ---------------------------------------------------------------------------
# model queries


def _noise(kind: str, rms: float) -> ErrorModel:
    return ErrorModel.normal(rms) if kind == "normal" else ErrorModel.uniform_rms(rms)


def cmd_bet(args) -> Table:
    est = gentlemans_bet.simulate_expected_gain(
        args.p_true, _noise(args.noise, args.sigma_A), _noise(args.noise, args.sigma_B),
        args.kappa, args.reps, _stream(args), args.correlation, args.workers)
    exact = gentlemans_bet.expected_gain_analytic(args.sigma_A, args.sigma_B, args.kappa)
    return Table(["gain_exact", "gain_mc", "gain_mc_se"], [[exact, est.mean, est.std_error]])


def cmd_bookie(args) -> Table:
    pop = bookmaker.GamblerPopulation(args.p_gamb, args.L, args.kappa)
    policy = bookmaker.Policy(args.policy)
    belief = bookmaker.BookmakerBelief(args.p_true, args.sigma)
    if policy is bookmaker.Policy.KNOWN_P:
        x1, x2 = bookmaker.policy_interval(policy, args.p_true, pop)
        exact = bookmaker.gain_known_p(args.p_gamb - args.p_true, args.L, args.kappa)
    elif policy is bookmaker.Policy.SYMMETRIC_CONSENSUS:
        x1, x2 = bookmaker.policy_interval(policy, args.p_true, pop)
        exact = bookmaker.mean_gain(bookmaker.SpreadInterval(x1, x2), args.p_true, pop)
    else:
        x1, x2 = bookmaker.policy_interval(policy, args.p_true, pop, args.sigma)
        exact = (bookmaker.expected_gain_noisy_book(args.sigma, pop)
                 if args.p_true == args.p_gamb else math.nan)
    est = bookmaker.simulate_bookmaker(args.p_true, pop, belief, policy, args.reps,
                                       _stream(args), args.workers)
    return Table(["x1", "x2", "gain_exact", "gain_mc", "gain_mc_se"],
                 [[x1, x2, exact, est.mean, est.std_error]])


def cmd_skill(args) -> Table:
    perc = skill_game.SkillPerception(args.sigma_A, args.sigma_B, args.zeta)
    gain = skill_game.expected_gain(perc, _spec(args))
    est = skill_game.simulate_match_rate(perc, args.window, args.reps, _stream(args), args.workers)
    return Table(["gain_quadrature", "gain_mc", "gain_mc_se"], [[gain, est.mean, est.std_error]])


def cmd_kelly(args) -> Table:
    setting = kelly.KellySetting(args.delta, args.sigma)
    est = kelly.simulate_expected_growth(setting, args.reps, _stream(args), args.workers)
    return Table(["optimal_known", "growth_exact", "growth_mc", "growth_mc_se"],
                 [[max(0.0, 2 * args.delta ** 2), kelly.expected_growth(setting),
                   est.mean, est.std_error]])


def cmd_duel(args) -> Table:
    na, nb = _noise(args.noise, args.sigma_A), _noise(args.noise, args.sigma_B)
    spec = QuadratureSpec(abs_tol=args.tol, rel_tol=args.tol, max_subdivisions=4000)
    q = duel.expected_win_prob(args.rho_A, args.rho_B, na, nb, spec=spec)
    est = duel.simulate_win_prob(args.rho_A, args.rho_B, na, nb, args.reps, _stream(args), args.workers)
    return Table(["win_known", "win_quadrature", "win_mc", "win_mc_se"],
                 [[duel.win_prob_known(args.rho_A, args.rho_B), q, est.mean, est.std_error]])


def cmd_evt(args) -> Table:
    s = args.sigma
    cost = extreme_value.simulate_choice_cost(s, args.reps, _stream(args, 0),
                                              tail_tol=args.tail_tol, workers=args.workers)
    a = extreme_value.simulate_auction(s, args.reps, _stream(args, 1),
                                       tail_tol=args.tail_tol, workers=args.workers)
    sealed, vickrey = extreme_value.auction_gains_exact(s)
    integral = extreme_value.choice_cost_integral(s, _spec(args)) if s > 0 else 0.0
    return Table(["cost_exact", "cost_integral", "cost_mc", "cost_mc_se",
                  "sealed_exact", "sealed_mc", "sealed_mc_se",
                  "vickrey_exact", "vickrey_mc", "vickrey_mc_se"],
                 [[extreme_value.choice_cost_exact(s), integral, cost.mean, cost.std_error,
                   sealed, a.mean_sealed, a.se_sealed, vickrey, a.mean_vickrey, a.se_vickrey]])


def cmd_tournament(args) -> Table:
    if args.records:
        recs = tournament.read_records(args.records)
        total, n = tournament.score_records(recs)
        return Table(["n_forecasts", "total_score", "mean_score"], [[n, total, total / n if n else math.nan]])
    you = tournament.ContestantModel.normal(args.rms_you)
    rival = tournament.ContestantModel.normal(args.rms_rival)
    p = tournament.uniform_p(args.p_lo, args.p_hi)
    est = tournament.simulate_tournament(args.n_questions, you, rival, p, args.reps,
                                         _stream(args, 0), args.workers)
    bias_you, rms_you = tournament.clamp_bias(you, p, stream=_stream(args, 1))
    bias_rival, rms_rival = tournament.clamp_bias(rival, p, stream=_stream(args, 2))
    return Table(["win_prob_you", "win_prob_you_se", "bias_you", "realized_rms_you",
                  "bias_rival", "realized_rms_rival"],
                 [[est.mean, est.std_error, bias_you, rms_you, bias_rival, rms_rival]])


def cmd_nature(args) -> Table:
    theta = nature.UtilityQuad(args.a, args.b, args.c, args.d)
    noise = _noise(args.noise, args.sigma)
    if args.p_range:
        lo, hi = args.p_range
        est = nature.expected_cost(nature.uniform_p_true(lo, hi), noise, theta, args.reps,
                                   _stream(args), args.workers)
        exact = math.nan
    else:
        est = nature.expected_cost(args.p_true, noise, theta, args.reps, _stream(args), args.workers)
        exact = nature.expected_cost_fixed(args.p_true, noise, theta)
    return Table(["p_crit", "z", "cost_exact", "cost_mc", "cost_mc_se"],
                 [[nature.p_crit(theta), theta.z, exact, est.mean, est.std_error]])


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if v == 0:
        return "0"
    return f"{v:.9g}"


def params_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _PLUMBING}


def render_csv(table: Table, args) -> str:
    buf = io.StringIO()
    params = json.dumps(params_of(args), sort_keys=True, separators=(",", ":"))
    buf.write(f"# seed={args.seed} reps={args.reps} version={__version__} "
              f"command={args.command} params={params}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_svg(table: Table, args, path: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "roughprob"
    if table.x is None:
        raise DomainError(f"'{args.command}' produces a single row; use --format csv")
    cols = {c: i for i, c in enumerate(table.columns)}
    data = np.array(table.rows, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    groups = [None] if table.group is None else sorted(set(data[:, cols[table.group]]))
    for g in groups:
        sel = data if g is None else data[data[:, cols[table.group]] == g]
        for s in table.series:
            label = s if g is None else f"{table.group}={g:g}"
            if len(table.series) > 1 and g is not None:
                label += f" {s}"
            ax.plot(sel[:, cols[table.x]], sel[:, cols[s]], label=label)
    ax.set_xlabel(table.x)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _output_path(args) -> Path | None:
    if args.out:
        return Path(args.out)
    outdir = os.environ.get("ROUGHPROB_OUTDIR")
    if outdir:
        return Path(outdir) / f"{args.command}.{args.format}"
    return None


# ---------------------------------------------------------------------------
# parser


def _default_seed() -> int:
    env = os.environ.get("ROUGHPROB_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise DomainError(f"ROUGHPROB_SEED must be an integer, got {env!r}")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed())
    common.add_argument("--reps", type=_positive_int, default=10**5)
    common.add_argument("--tol", type=float, default=1e-9, help="quadrature tolerance")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "svg"), default="csv")
    common.add_argument("--workers", type=_positive_int, default=1)

    p = argparse.ArgumentParser(prog="roughprob", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", default=None, help="JSON RunConfig file")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("fig2-left", fig2_left, "bookmaker gain h(u) against its error")
    sp.add_argument("--sigma-over-L", dest="sigma_over_L", type=float, nargs="+",
                    default=_grid(0, 1 / 3, 41))
    sp = add("fig2-right", fig2_right, "bookmaker gain h*(u, r) against gamblers' bias")
    sp.add_argument("--u", type=float, nargs="+", default=[0.0, 1 / 36, 2 / 36])
    sp.add_argument("--r", type=float, nargs="+", default=_grid(-0.5, 0.5, 21))
    sp = add("fig3", fig3, "skill-game gain against opponent error")
    sp.add_argument("--sigma-A", dest="sigma_A", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    sp.add_argument("--sigma-B", dest="sigma_B", type=float, nargs="+", default=_grid(0, 2, 21))
    sp.add_argument("--zeta", choices=("normal", "uniform"), default="normal")
    sp = add("fig4", fig4, "Kelly growth rate against edge")
    sp.add_argument("--sigma", type=float, nargs="+", default=[0.0, 0.02, 0.05, 0.1])
    sp.add_argument("--delta", type=float, nargs="+", default=_grid(-0.1, 0.2, 31))
    for name, func, help_ in (("fig5", fig5, "mean cost of choosing the best-looking item"),
                              ("fig6", fig6, "auction mean gains, sealed bid and second price")):
        sp = add(name, func, help_)
        sp.add_argument("--sigma", type=float, nargs="+", default=_grid(0, 1, 11))
        sp.add_argument("--tail-tol", dest="tail_tol", type=float, default=extreme_value.TAIL_TOL)

    sp = add("bet", cmd_bet, "two-person bet at the mid price")
    sp.add_argument("--p-true", dest="p_true", type=float, default=0.5)
    sp.add_argument("--sigma-A", dest="sigma_A", type=float, default=0.05)
    sp.add_argument("--sigma-B", dest="sigma_B", type=float, default=0.1)
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("--correlation", type=float, default=0.0)
    sp.add_argument("--noise", choices=("normal", "uniform"), default="normal")

    sp = add("bookie", cmd_bookie, "bookmaker spread and mean gain")
    sp.add_argument("--p-true", dest="p_true", type=float, default=0.5)
    sp.add_argument("--p-gamb", dest="p_gamb", type=float, default=0.5)
    sp.add_argument("--L", type=float, default=0.2)
    sp.add_argument("--kappa", type=float, default=1.0)
    sp.add_argument("--sigma", type=float, default=0.0)
    sp.add_argument("--policy", choices=[p_.value for p_ in bookmaker.Policy], default="known-p")

    sp = add("skill", cmd_skill, "even-odds betting on a skill game")
    sp.add_argument("--sigma-A", dest="sigma_A", type=float, default=0.5)
    sp.add_argument("--sigma-B", dest="sigma_B", type=float, default=1.0)
    sp.add_argument("--zeta", choices=("normal", "uniform"), default="normal")
    sp.add_argument("--window", type=float, default=20.0)

    sp = add("kelly", cmd_kelly, "Kelly growth under a misjudged edge")
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--sigma", type=float, default=0.05)

    sp = add("duel", cmd_duel, "duel win probability with misjudged accuracy")
    sp.add_argument("--rho-A", dest="rho_A", type=float, default=2.0)
    sp.add_argument("--rho-B", dest="rho_B", type=float, default=3.0)
    sp.add_argument("--sigma-A", dest="sigma_A", type=float, default=0.05)
    sp.add_argument("--sigma-B", dest="sigma_B", type=float, default=0.05)
    sp.add_argument("--noise", choices=("normal", "uniform"), default="normal")

    sp = add("evt", cmd_evt, "choice cost and auction gains at one error level")
    sp.add_argument("--sigma", type=float, default=0.5)
    sp.add_argument("--tail-tol", dest="tail_tol", type=float, default=extreme_value.TAIL_TOL)

    sp = add("tournament", cmd_tournament, "Brier tournament win probability, or score a record file")
    sp.add_argument("--n-questions", dest="n_questions", type=_positive_int, default=100)
    sp.add_argument("--rms-you", dest="rms_you", type=float, default=0.15)
    sp.add_argument("--rms-rival", dest="rms_rival", type=float, default=0.20)
    sp.add_argument("--p-lo", dest="p_lo", type=float, default=0.2)
    sp.add_argument("--p-hi", dest="p_hi", type=float, default=0.8)
    sp.add_argument("--records", default=None, help="file of 'q,outcome' lines to score")

    sp = add("nature", cmd_nature, "cost of a misjudged rain probability")
    for k, v in (("a", 4.0), ("b", 0.0), ("c", 1.0), ("d", 3.0)):
        sp.add_argument(f"--{k}", type=float, default=v)
    sp.add_argument("--p-true", dest="p_true", type=float, default=0.6)
    sp.add_argument("--p-range", dest="p_range", type=float, nargs=2, default=None,
                    help="draw p_true uniformly from this range instead")
    sp.add_argument("--sigma", type=float, default=0.05)
    sp.add_argument("--noise", choices=("normal", "uniform"), default="normal")
    return p


def _config_argv(path: str) -> list[str]:
    """Turn a JSON RunConfig into argv tokens (explicit flags given later win)."""
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise SystemExit(f"roughprob: cannot read config {path}: {e}")
    argv = []
    if "subcommand" in cfg:
        argv.append(str(cfg["subcommand"]))
    mapping = {"seed": "--seed", "reps": "--reps", "output_path": "--out", "format": "--format"}
    for key, flag in mapping.items():
        if cfg.get(key) is not None:
            argv += [flag, str(cfg[key])]
    for key, val in (cfg.get("parameters") or {}).items():
        argv.append("--" + key.replace("_", "-"))
        argv += [str(v) for v in val] if isinstance(val, list) else [str(val)]
    return argv


def _split_config(argv: list[str]) -> tuple[str | None, list[str]]:
    rest, path = [], None
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            path = next(it, None)
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        else:
            rest.append(tok)
    return path, rest


def _merge(cfg_argv: list[str], argv: list[str], commands) -> list[str]:
    """Place config tokens after the subcommand so that later command-line flags override them."""
    cfg_cmd = cfg_argv[0] if cfg_argv and cfg_argv[0] in commands else None
    cfg_flags = cfg_argv[1:] if cfg_cmd else cfg_argv
    cmd_pos = next((i for i, t in enumerate(argv) if t in commands), None)
    if cmd_pos is None:
        if cfg_cmd is None:
            return argv + cfg_flags
        return argv + [cfg_cmd] + cfg_flags
    return argv[:cmd_pos + 1] + cfg_flags + argv[cmd_pos + 1:]


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
    except DomainError as e:
        print(f"roughprob: {e}", file=sys.stderr)
        return EXIT_USAGE
    config_path, argv = _split_config(argv)
    if config_path is not None:
        commands = parser._subparsers._group_actions[0].choices
        try:
            argv = _merge(_config_argv(config_path), argv, commands)
        except SystemExit as e:
            print(e, file=sys.stderr)
            return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        RngStream(args.seed)
        table = args.func(args)
        path = _output_path(args)
        if args.format == "svg":
            if path is None:
                parser.error("--format svg needs --out or ROUGHPROB_OUTDIR")
            path.parent.mkdir(parents=True, exist_ok=True)
            render_svg(table, args, path)
        else:
            text = render_csv(table, args)
            if path is None:
                stdout.write(text)
            else:
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(text)
    except DomainError as e:
        print(f"roughprob: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as e:
        print(f"roughprob: {e} (estimate {e.estimate:.6g}, error {e.error:.3g})", file=sys.stderr)
        return EXIT_CONVERGENCE
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
