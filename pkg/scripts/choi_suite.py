"""Rank of the Choi map's value on rank-one projections.

Scans a structured grid of real and phased vectors plus random ones and
groups every vector whose image drops below rank three by the moduli
``|xi_i|^2``. Diagonal unitaries commute with the map, so phases only move
a vector within its group.
"""

import itertools

import numpy as np

from posmap.linalg import numerical_rank, random_unit
from posmap.mapcore import choi_example


def main(n_random=20000, seed=0):
    phi = choi_example()
    rng = np.random.default_rng(seed)
    grid = np.linspace(-1, 1, 9)
    phases = np.exp(2j * np.pi * np.arange(4) / 4)
    cands = []
    for a, b, c in itertools.product(grid, repeat=3):
        for p, q in itertools.product(phases, repeat=2):
            v = np.array([a, b * p, c * q])
            if np.linalg.norm(v) > 0:
                cands.append(v / np.linalg.norm(v))
    cands += [random_unit(3, rng) for _ in range(n_random)]
    low = {}
    for v in cands:
        r = numerical_rank(phi(np.outer(v, v.conj())))
        if r < 3:
            key = tuple(float(m) for m in np.round(np.abs(v) ** 2, 6))
            low.setdefault(key, [r, 0])[1] += 1
    print(f"checked {len(cands)} vectors")
    for key, (r, n) in sorted(low.items()):
        print(f"|xi|^2 = {key}: rank {r}, {n} hits")


if __name__ == "__main__":
    main()
