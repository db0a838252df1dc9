"""Qubit minimal-metric scalar curvature at seeded interior points (expected value 6)."""

import numpy as np

from qig.geometry import Chart, scalar_curvature
from qig.monotone import F_MIN


def main(count: int = 20, seed: int = 9):
    rng = np.random.default_rng(seed)
    chart = Chart(2)
    worst = 0.0
    for _ in range(count):
        x = rng.uniform(-0.75, 0.75, 3)
        while np.linalg.norm(x) >= 0.75:
            x = rng.uniform(-0.75, 0.75, 3)
        rep = scalar_curvature(chart, F_MIN, x)
        worst = max(worst, abs(rep.value - 6))
        print(f"|x|={np.linalg.norm(x):.3f}  Scal={rep.value:.9f}  gauge={rep.error_gauge:.2e}")
    print(f"max deviation from 6: {worst:.2e}")


if __name__ == "__main__":
    main()
