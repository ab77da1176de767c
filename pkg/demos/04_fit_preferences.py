"""Fit connection preferences to a scale-free degree pattern.

A coarse grid pass followed by local refinement searches the preference
space (level sign and weight, difference sign and weight) for the blend
whose generated networks best match a scale-free target. The budget here
is kept small so the demo runs in seconds; raise it for a tighter fit.
"""

import argparse

from prefnet import (
    RULE_PREFERENCES,
    RngPolicy,
    Scenario,
    ba_target,
    degree_distribution,
    evaluate,
    optimize,
)


def main():
    cli = argparse.ArgumentParser(description=__doc__)
    cli.add_argument("--budget", type=int, default=120, help="objective evaluations")
    cli.add_argument("--replicates", type=int, default=3,
                     help="networks averaged per evaluation")
    cli.add_argument("--seed", type=int, default=0, help="master seed")
    args = cli.parse_args()

    sc = Scenario(master_seed=args.seed)
    target = degree_distribution(
        ba_target(sc.node_count, 20, RngPolicy(sc.master_seed).stream("optimizer", 0))
    )

    result = optimize(sc, target, budget=args.budget, replicates=args.replicates)
    best = result.best
    print(f"budget {args.budget} x {args.replicates} replicates "
          f"-> {result.evaluations} evaluations, {len(result.log)} network builds")
    print(f"best preference: level {best.preference.level:+d} "
          f"w={best.preference.level_weight:.3f}, "
          f"difference {best.preference.difference:+d} "
          f"w={best.preference.difference_weight:.3f}")
    print(f"mean divergence {best.objective:.4f} "
          f"(std {best.objective_std:.4f} over {best.replicates} replicates)")

    print()
    print("pure rules on the same target, same replicate streams:")
    for rule, pref in RULE_PREFERENCES.items():
        mean, _ = evaluate(pref, target, sc, replicates=args.replicates)
        marker = "  <- beaten" if best.objective < mean else ""
        print(f"  {rule.value:>3}: {mean:.4f}{marker}")


if __name__ == "__main__":
    main()
