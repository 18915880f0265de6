"""Print each model's closed form next to its Monte Carlo estimate."""

import argparse

from roughprob import extreme_value as ev, gentlemans_bet as gb, kelly, skill_game as sg
from roughprob import bookmaker as bk
from roughprob.core import ErrorModel, RngStream


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--reps", type=int, default=10**5)
    args = ap.parse_args(argv)
    root = RngStream(args.seed)
    rows = []

    est = gb.simulate_expected_gain(0.5, ErrorModel.normal(0.02), ErrorModel.normal(0.1),
                                    reps=args.reps, stream=root.child(0))
    rows.append(("bet gain (0.02, 0.1)", gb.expected_gain_analytic(0.02, 0.1), est))

    pop = bk.GamblerPopulation(0.5, 0.2)
    est = bk.simulate_bookmaker(0.5, pop, bk.BookmakerBelief(0.5, 0.03), bk.Policy.NOISY_YSTAR,
                                args.reps, root.child(1))
    rows.append(("noisy bookmaker gain", bk.expected_gain_noisy_book(0.03, pop), est))

    perc = sg.SkillPerception(0.5, 1.0)
    est = sg.simulate_match_rate(perc, reps=args.reps, stream=root.child(2))
    rows.append(("skill gain (0.5, 1)", sg.expected_gain(perc), est))

    setting = kelly.KellySetting(0.05, 0.05)
    est = kelly.simulate_expected_growth(setting, args.reps, root.child(3))
    rows.append(("Kelly growth (0.05, 0.05)", kelly.expected_growth(setting), est))

    est = ev.simulate_choice_cost(0.5, args.reps, root.child(4))
    rows.append(("choice cost 0.5", ev.choice_cost_exact(0.5), est))

    print(f"{'quantity':28s} {'exact':>12s} {'monte carlo':>12s} {'se':>10s} {'z':>6s}")
    for name, exact, e in rows:
        z = (e.mean - exact) / e.std_error if e.std_error else 0.0
        print(f"{name:28s} {exact:12.6g} {e.mean:12.6g} {e.std_error:10.2g} {z:6.2f}")


if __name__ == "__main__":
    main()
