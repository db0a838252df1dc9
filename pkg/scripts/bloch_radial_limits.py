"""Tangential metric coefficient toward the pure qubit states for every catalog function.

Prints the closed-form split at a few radii and the verdict of the radial limit probe,
which should converge exactly when f(0) > 0.
"""

from qig.metric import bloch_split, radial_limit_probe
from qig.monotone import catalog


def main():
    radii = (0.1, 0.5, 0.9, 0.99)
    print("f          " + "  ".join(f"tang(r={r:g})" for r in radii) + "   f(0)    verdict")
    for f in catalog():
        tang = [bloch_split(f, r).tangential for r in radii]
        rep = radial_limit_probe(f)
        flag = "" if rep.consistent else "  (inconsistent)"
        print(f"{f.label:10s} " + "  ".join(f"{v:11.5f}" for v in tang) + f"   {rep.f_at_zero:.3f}   {rep.verdict}{flag}")


if __name__ == "__main__":
    main()
