#!/usr/bin/env python
"""Audit the law battery: clean rules should pass, every mutant should fail.

Runs the built-in factorisation rules against the exhaustive arrow corpus,
then each deliberately broken variant, and prints one verdict per rule with
the first counterexample when there is one.
"""

import argparse

from nwfs import MUTANT_COUNT, check_laws, exhaustive_arrows, mutant_rule
from nwfs.rules import cograph_rule, graph_rule, trivial_left_rule, trivial_right_rule


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-total", type=int, default=4, help="arrow corpus size bound")
    args = parser.parse_args()

    sample = exhaustive_arrows(args.max_total)
    print(f"corpus: {len(sample)} arrows (carriers up to {args.max_total} elements)\n")

    clean = [graph_rule(), cograph_rule(), trivial_left_rule(), trivial_right_rule()]
    for rule in clean:
        report = check_laws([rule], sample)
        bad = report.counterexamples
        print(f"{rule.name:<24} {'ok' if not bad else 'FAILED (unexpected!)'}")

    print()
    for i in range(MUTANT_COUNT):
        rule = mutant_rule(i)
        report = check_laws([rule], sample)
        bad = report.counterexamples
        if bad:
            first = bad[0]
            print(f"{rule.name:<24} caught by {first.law} on {first.arrow}")
        else:
            print(f"{rule.name:<24} NOT CAUGHT (unexpected!)")


if __name__ == "__main__":
    main()
