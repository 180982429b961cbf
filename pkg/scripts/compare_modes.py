#!/usr/bin/env python
"""Run both sequences on a horn inclusion instance and compare stage growth.

The plain mode keeps gluing fresh cells for every commuting square, so its
middles grow fast; the free mode coequalizes the redundant cells away. The
script prints both cardinality profiles and then verifies the stagewise
comparison map.
"""

import argparse

from nwfs import OrdinalBudget, build_comparison, run_free, run_plain
from nwfs.catalog import get_category, get_gens, representable, terminal_presheaf
from nwfs.core import PresheafMap


def terminal_map(X) -> PresheafMap:
    T = terminal_presheaf(X.base)
    return PresheafMap(X, T, {a: {x: 0 for x in X.carrier[a]} for a in X.base.objects})


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--successors", type=int, default=4)
    parser.add_argument("--blocks", type=int, default=1)
    args = parser.parse_args()

    base = get_category("delta<=1")
    gens = get_gens("horns<=1")
    g = terminal_map(representable(base, "1"))
    budget = OrdinalBudget(successors_per_block=args.successors, omega_blocks=args.blocks)

    free = run_free(gens, g, budget=budget, stop_at_convergence=False)
    plain = run_plain(gens, g, budget=budget, stop_at_convergence=False)

    print(f"{'stage':>5}  {'ordinal':<8} {'plain':>7} {'free':>7}")
    for i in range(len(plain.stages)):
        print(
            f"{i:>5}  {plain.stages[i].ordinal:<8}"
            f" {plain.stages[i].mid.total_size:>7} {free.stages[i].mid.total_size:>7}"
        )

    report = build_comparison(free, plain)
    verdict = "verified" if report.ok else "FAILED"
    print(f"\ncomparison map: {verdict} on {len(report.maps)} stages, all components surjective")


if __name__ == "__main__":
    main()
