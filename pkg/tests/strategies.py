"""Hypothesis strategies for matrices and maps."""

import numpy as np
from hypothesis import strategies as st

from posmap.linalg import random_complex
from posmap.mapcore import LinearMap, from_cokraus, from_kraus, random_kraus_op

dims = st.integers(min_value=1, max_value=4)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def hermitian(draw, lo=1, hi=5):
    n = draw(st.integers(lo, hi))
    rng = np.random.default_rng(draw(seeds))
    G = random_complex((n, n), rng)
    return (G + G.conj().T) / 2


@st.composite
def hp_maps(draw, lo=1, hi=3):
    k, h = draw(st.integers(lo, hi)), draw(st.integers(lo, hi))
    rng = np.random.default_rng(draw(seeds))
    G = random_complex((k, k, h, h), rng)
    return LinearMap((G + G.transpose(1, 0, 3, 2).conj()) / 2)


@st.composite
def kraus_maps(draw, lo=2, hi=4, co=False):
    k, h = draw(st.integers(lo, hi)), draw(st.integers(lo, hi))
    rng = np.random.default_rng(draw(seeds))
    A = random_kraus_op(k, h, rng)
    return (from_cokraus(A) if co else from_kraus(A)), A


def face_cp_map(k, h, rng, n_ops=2):
    """CP map sending xi xi* to a positive multiple of xx*, with (phi, xi, x)."""
    from posmap.linalg import random_unit
    from posmap.mapcore import from_kraus_list

    xi, x = random_unit(k, rng), random_unit(h, rng)
    P = np.eye(k) - np.outer(xi, xi.conj())
    ops = []
    for _ in range(n_ops):
        c = complex(rng.standard_normal() + 1j * rng.standard_normal())
        ops.append(random_complex((h, k), rng) @ P / np.sqrt(k) + c * np.outer(x, xi.conj()))
    return from_kraus_list(ops), xi, x


def lemma_instance(case, n, rng):
    """``(x, y, A, expected_type_name)`` for the admissible forms, or a rejected form."""
    x, y = random_complex(n, rng), random_complex(n, rng)
    mu = np.exp(2j * np.pi * rng.uniform())
    if case == "a":
        if rng.uniform() < 0.5:
            return x, y, mu * np.outer(x, y.conj()), "IndepXY"
        return x, y, mu * np.outer(y, x.conj()), "IndepXY"
    if case == "b":
        c = complex(rng.standard_normal(), rng.standard_normal())
        return x, c * x, complex(rng.standard_normal(), rng.standard_normal()) * np.outer(x, x.conj()), "DepX"
    if case == "c":
        z = np.zeros(n, dtype=complex)
        return z, y, complex(rng.standard_normal(), rng.standard_normal()) * np.outer(y, y.conj()), "DepY"
    if case == "d":
        z = np.zeros(n, dtype=complex)
        u = random_complex(n, rng)
        u = u / np.linalg.norm(u)
        return z, z.copy(), complex(rng.standard_normal(), rng.standard_normal()) * np.outer(u, u.conj()), "BothZero"
    # rejected forms, one of several kinds
    sub = rng.integers(4)
    if sub == 0:  # independent pair, coefficient off the unit circle
        return x, y, (1.5 + rng.uniform()) * mu * np.outer(x, y.conj()), "NoCase"
    if sub == 1:  # independent pair, generic A
        return x, y, random_complex((n, n), rng), "NoCase"
    if sub == 2:  # dependent pair with a cross term
        return x, 0.5 * x, mu * np.outer(x, random_complex(n, rng).conj()), "NoCase"
    z = np.zeros(n, dtype=complex)  # both zero, A of rank two
    return z, z.copy(), np.diag([1.0, 1.0] + [0.0] * (n - 2)) * (1 + 0j), "NoCase"
