"""Deterministic map collections for regression runs."""

from __future__ import annotations

import numpy as np

from .mapcore import LinearMap, choi_example, random_decomposable, scale_add, trace_map

SHAPES = ((2, 2), (2, 3), (3, 2), (3, 3))


def cyclic_diagonal_map(a: float, b: float, c: float) -> LinearMap:
    """``X -> D(X) - X`` on 3 x 3 matrices, ``E_ii`` feeding ``a, c, b`` to outputs ``i, i+1, i+2``.

    ``(2, 0, 1)`` is the Choi map.
    """
    blk = np.zeros((3, 3, 3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            blk[i, j, i, j] = -1.0
        for off, w in ((0, a), (1, c), (2, b)):
            blk[i, i, (i + off) % 3, (i + off) % 3] += w
    return LinearMap(blk, name=f"cyclic({a:g},{b:g},{c:g})")


def decomposability_corpus(seed: int = 0) -> list:
    """Return ``[(label, map)]``: CP, co-CP and mixed sums plus Choi-type maps.

    521 maps; identical for identical ``seed``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for n in range(120):
        k, h = SHAPES[n % 4]
        out.append((f"cp-{n}", random_decomposable(k, h, rng, 1 + n % 3, 0)))
    for n in range(120):
        k, h = SHAPES[n % 4]
        out.append((f"cocp-{n}", random_decomposable(k, h, rng, 0, 1 + n % 3)))
    for n in range(220):
        k, h = SHAPES[n % 4]
        out.append((f"sum-{n}", random_decomposable(k, h, rng, 1 + n % 2, 1 + (n // 2) % 2)))
    out.append(("choi", choi_example()))
    for n, t in enumerate(np.linspace(0.01, 0.3, 20)):
        out.append((f"choi+trace-{n}", scale_add(1.0, choi_example(), float(t), trace_map(3))))
    for n in range(40):
        a = 1.0 + rng.uniform(0.0, 1.0)
        b = rng.uniform(0.0, 2.0)
        c = (2.0 - a) ** 2 / b * rng.uniform(0.2, 1.5) if b > 0 else 1.0
        out.append((f"cyclic-{n}", cyclic_diagonal_map(a, b, c)))
    return out
