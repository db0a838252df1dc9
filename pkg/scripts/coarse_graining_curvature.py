"""Scalar curvature before and after seeded qubit depolarizing channels.

Raw values are reported; curvatures of different dimensions are not normalized against each other.
"""

import numpy as np

from qig.channels import depolarizing_channel
from qig.geometry import coarse_graining_curvature_probe
from qig.linalg import random_density
from qig.monotone import F_KM, F_MIN


def main():
    tally = {True: 0, False: 0, None: 0}
    for seed in range(20):
        D = random_density(seed, 2, 0.1).data
        p = float(np.random.default_rng(seed).uniform(0.1, 0.9))
        for f in (F_MIN, F_KM):
            r = coarse_graining_curvature_probe(D, f, depolarizing_channel(p))
            tally[r.conjecture_holds] += 1
            print(f"seed={seed:2d} p={p:.2f} f={f.label:4s} up={r.scal_upstream:+.6f} "
                  f"down={r.scal_downstream:+.6f} holds={r.conjecture_holds}")
    print(f"increase: {tally[True]}  decrease: {tally[False]}  within gauge: {tally[None]}")


if __name__ == "__main__":
    main()
