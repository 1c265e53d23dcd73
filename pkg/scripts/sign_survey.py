#!/usr/bin/env python3
"""Sweep the sign-formula scenario matrix and print one summary row per
family: scenario count, worst formula-vs-oracle error, observed signs.

Usage: python scripts/sign_survey.py [max_degree] [eta_cap]
"""

import collections
import sys
import time

from weilchar import checks, signcalc, weil


def main(max_degree: int, eta_cap: int) -> None:
    t0 = time.time()
    worst = collections.defaultdict(float)
    counts = collections.Counter()
    signs = collections.defaultdict(set)
    for p in (3, 5):
        for label, sc in checks.sign_branch_scenarios(p, max_degree=max_degree, eta_cap=eta_cap):
            bb = signcalc.build_block(sc)
            bv = signcalc.block_sign_formula(sc)
            oracle = weil.WeilModel(bb.space).trace_omega(bb.op)
            worst[label] = max(worst[label], abs(bv.value - oracle))
            counts[label] += 1
            signs[label].add(bv.sign)
    print("%-30s %5s %10s %s" % ("family", "n", "worst err", "signs seen"))
    for label in sorted(counts):
        print("%-30s %5d %10.2e %s" % (label, counts[label], worst[label], sorted(signs[label])))
    print("%d scenarios in %.1fs" % (sum(counts.values()), time.time() - t0))


if __name__ == "__main__":
    md = int(sys.argv[1]) if len(sys.argv) > 1 else 2
    cap = int(sys.argv[2]) if len(sys.argv) > 2 else 12
    main(md, cap)
