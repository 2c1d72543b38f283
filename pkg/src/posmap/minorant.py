"""Seeds, the Kraus/co-Kraus minorants built from them, and domination tests.

Given a seed ``(xi, x, lam)`` with ``phi(xi xi*) x = lam x`` and ``lam > 0``,
the operators

    B eta = lam^{-1/2} phi(eta xi*) x
    C eta = lam^{-1/2} phi(xi conj(eta)*) x

define a completely positive ``psi(X) = B X B*`` and a completely copositive
``chi(X) = C X^T C*``. ``psi <= phi`` holds exactly when
``|<y, phi(eta xi*) x>|^2 <= lam <y, phi(eta eta*) y>`` for all ``eta, y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import blockform, faces
from .errors import DimensionMismatch, InvalidSeed, MethodUnavailable, ZeroMap
from .linalg import DEFAULT_TOL, ToleranceConfig, as_ket, hermitian_part, random_unit, top_eigpair
from .mapcore import LinearMap, apply, from_cokraus, from_kraus, norm, scale_add
from .positivity import min_product_value, min_schmidt_k_value, product_value

METHODS = ("map_difference_seesaw", "inequality_sampling", "wu_criterion")


@dataclass(frozen=True)
class MinorantSeed:
    xi: np.ndarray
    x: np.ndarray
    lam: float


def _check_seed(phi: LinearMap, seed: MinorantSeed, tol: ToleranceConfig) -> None:
    if not seed.lam > 0:
        raise InvalidSeed(f"seed eigenvalue must be positive, got {seed.lam}")
    Y = apply(phi, np.outer(seed.xi, np.conj(seed.xi)))
    resid = np.linalg.norm(Y @ seed.x - seed.lam * seed.x)
    if resid > tol.eps_eq * max(1.0, seed.lam, float(np.linalg.norm(Y, 2))):
        raise InvalidSeed(f"phi(xi xi*) x != lam x (residual {resid:.3e})")


def seed_from(phi: LinearMap, xi) -> MinorantSeed | None:
    """Top eigenpair of ``phi(xi xi*)`` for unit ``xi``, or None when not positive."""
    xi = as_ket(xi) / np.linalg.norm(xi)
    lam, x = top_eigpair(apply(phi, np.outer(xi, xi.conj())))
    return MinorantSeed(xi=xi, x=x, lam=lam) if lam > 0 else None


def basis_seeds(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """Seeds at every standard basis vector whose top eigenvalue is significant."""
    cutoff = tol.eps_psd * max(1.0, norm(phi))
    seeds = []
    for i in range(phi.k):
        s = seed_from(phi, np.eye(phi.k)[i])
        if s is not None and s.lam > cutoff:
            seeds.append(s)
    return seeds


def find_seed(phi: LinearMap, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0, tries: int = 100) -> MinorantSeed:
    """Deterministic seed choice.

    Among standard basis vectors the one with the largest top eigenvalue
    wins (lowest index on ties); random unit vectors are tried only when no
    basis vector gives a positive eigenvalue.
    """
    cands = basis_seeds(phi, tol)
    if cands:
        return max(cands, key=lambda s: (s.lam, -int(np.argmax(np.abs(s.xi)))))
    cutoff = tol.eps_psd * max(1.0, norm(phi))
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        s = seed_from(phi, random_unit(phi.k, rng))
        if s is not None and s.lam > cutoff:
            return s
    raise ZeroMap("no seed with positive eigenvalue: the map vanishes on tested projections")


def build_B(phi: LinearMap, seed: MinorantSeed, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Column j is ``lam^{-1/2} phi(e_j xi*) x``."""
    _check_seed(phi, seed, tol)
    # phi(e_j xi*) = sum_l conj(xi_l) phi(E_jl)
    cols = np.einsum("l,jlab,b->aj", np.conj(seed.xi), phi.blocks, seed.x)
    return cols / np.sqrt(seed.lam)


def build_C(phi: LinearMap, seed: MinorantSeed, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Column j is ``lam^{-1/2} phi(xi e_j*) x`` (conj(e_j) = e_j)."""
    _check_seed(phi, seed, tol)
    # phi(xi e_j*) = sum_l xi_l phi(E_lj)
    cols = np.einsum("l,ljab,b->aj", seed.xi, phi.blocks, seed.x)
    return cols / np.sqrt(seed.lam)


def apply_C(C: np.ndarray, eta) -> np.ndarray:
    """Action of the minorant operator ``C`` on a general vector.

    ``C`` is stored through its columns on the standard basis; the defining
    formula conjugates ``eta`` coordinatewise before pairing, and since the
    map ``eta -> xi conj(eta)*`` is linear, ``C eta`` is the matrix product.
    """
    return C @ as_ket(eta)


def build_psi(phi: LinearMap, seed: MinorantSeed, tol: ToleranceConfig = DEFAULT_TOL) -> LinearMap:
    return from_kraus(build_B(phi, seed, tol), name="psi")


def build_chi(phi: LinearMap, seed: MinorantSeed, tol: ToleranceConfig = DEFAULT_TOL) -> LinearMap:
    return from_cokraus(build_C(phi, seed, tol), name="chi")


@dataclass
class DominationReport:
    """Verdict on ``rho <= phi``.

    ``worst_violation`` is the smallest ``<y, (phi - rho)(eta eta*) y>`` seen
    over unit ``eta, y``; ``witness`` is the ``(eta, y)`` attaining it when
    domination fails.
    """

    holds: bool
    method: str
    worst_violation: float
    witness: tuple | None = None
    details: dict = field(default_factory=dict)


def difference_value(phi: LinearMap, rho: LinearMap, eta, y) -> float:
    """``<y, (phi - rho)(eta eta*) y>`` for unit-normalized ``eta, y``."""
    eta = as_ket(eta) / np.linalg.norm(eta)
    y = as_ket(y) / np.linalg.norm(y)
    return product_value(phi, eta, y) - product_value(rho, eta, y)


def _structured_etas(k: int) -> list:
    I = np.eye(k, dtype=complex)
    out = [I[i] for i in range(k)]
    for i, j in itertools.combinations(range(k), 2):
        for c in (1, -1, 1j, -1j):
            out.append((I[i] + c * I[j]) / np.sqrt(2))
    return out


class _Inequality:
    """The scalar inequality ``|<y, phi(eta s*) x>|^2 <= lam <y, phi(eta eta*) y>``.

    ``kind`` selects ``s*`` placement: ``psi`` uses ``phi(eta xi*)`` and
    ``chi`` uses ``phi(xi eta*)``. Values are divided by ``lam`` so they
    equal ``<y, (phi - rho)(eta eta*) y>`` for the matching minorant.
    """

    def __init__(self, phi: LinearMap, seed: MinorantSeed, kind: str):
        self.phi, self.seed, self.kind = phi, seed, kind
        xi, x = seed.xi, seed.x
        if kind == "psi":
            # phi(eta xi*) x = sum_i eta_i c_i with c_i = sum_l conj(xi_l) phi(E_il) x
            self.cols = np.einsum("l,ilab,b->ai", np.conj(xi), phi.blocks, x)
        else:
            # phi(xi eta*) x = sum_j conj(eta_j) d_j with d_j = sum_l xi_l phi(E_lj) x
            self.cols = np.einsum("l,ljab,b->aj", xi, phi.blocks, x)

    def image(self, eta):
        return self.cols @ (eta if self.kind == "psi" else np.conj(eta))

    def gap_matrix(self, eta) -> np.ndarray:
        """``phi(eta eta*) - aa*/lam``; PSD for every ``eta`` iff domination."""
        a = self.image(eta)
        Y = apply(self.phi, np.outer(eta, np.conj(eta)))
        return hermitian_part(Y - np.outer(a, a.conj()) / self.seed.lam)

    def value(self, eta, y) -> float:
        a = self.image(eta)
        return float(
            np.vdot(y, apply(self.phi, np.outer(eta, np.conj(eta))) @ y).real
            - abs(np.vdot(y, a)) ** 2 / self.seed.lam
        )

    def eta_form(self, y) -> np.ndarray:
        """Hermitian form ``F`` with ``value(eta, y) = <eta', F eta'>``.

        ``eta' = conj(eta)`` for ``psi`` and ``eta' = eta`` for ``chi``.
        """
        phi = self.phi
        # <y, phi(eta eta*) y> = sum_ij eta_i conj(eta_j) N_ij
        N = np.einsum("a,ijab,b->ij", np.conj(y), phi.blocks, y)
        g = self.cols.conj().T @ y  # conj(<y, c_i>)
        if self.kind == "psi":
            # in eta' = conj(eta): sum eta'_j conj(eta'_i) N_ij = <eta', N^T eta'>
            # |<y, a>|^2 = |sum_i eta_i <y,c_i>|^2 = <eta', g g* eta'>
            return hermitian_part(N.T - np.outer(g, g.conj()) / self.seed.lam)
        # chi: a = sum_j conj(eta_j) d_j; <y,a> = sum conj(eta_j) conj(g_j); |.|^2 = <eta, g g* eta>
        return hermitian_part(N.T.conj() - np.outer(g, g.conj()) / self.seed.lam).conj().T

    def worst_y(self, eta) -> tuple[float, np.ndarray]:
        w, V = np.linalg.eigh(self.gap_matrix(eta))
        return float(w[0]), V[:, 0]


def _polish(ineq: _Inequality, eta, sweeps: int, tol: ToleranceConfig):
    """Alternate exact minimizations over ``y`` and ``eta``."""
    val, y = ineq.worst_y(eta)
    for _ in range(sweeps):
        F = ineq.eta_form(y)
        w, V = np.linalg.eigh(F)
        z = V[:, 0]
        eta_new = np.conj(z) if ineq.kind == "psi" else z
        new_val, y = ineq.worst_y(eta_new)
        eta = eta_new
        if val - new_val < tol.opt_tol:
            val = min(val, new_val)
            break
        val = new_val
    return val, eta, y


def _eta_candidates(k: int, rng, samples: int) -> list:
    return _structured_etas(k) + [random_unit(k, rng) for _ in range(samples)]


def _threshold(phi: LinearMap, tol: ToleranceConfig) -> float:
    return tol.eps_psd * max(1.0, norm(phi))


def _by_inequality(phi, seed, kind, tol, budget, rng_seed):
    ineq = _Inequality(phi, seed, kind)
    rng = np.random.default_rng(rng_seed)
    best = (np.inf, None, None)
    for eta in _eta_candidates(phi.k, rng, budget):
        y_rand = random_unit(phi.h, rng)
        for val, e, y in (
            (ineq.value(eta, y_rand), eta, y_rand),
            _polish(ineq, eta, sweeps=tol.max_iters // 10 + 1, tol=tol),
        ):
            if val < best[0]:
                best = (val, e, y)
    return best


def _by_wu(phi, seed, kind, tol, budget, rng_seed):
    """Per-eta decision of the matrix inequality through its block form."""
    member, _ = faces.in_G(phi, seed.xi, seed.x, tol)
    if not member:
        raise MethodUnavailable("wu_criterion needs phi in the face G_{xi,x} of the seed")
    ineq = _Inequality(phi, seed, kind)
    rng = np.random.default_rng(rng_seed)
    holds = True
    worst = (np.inf, None, None)
    etas = _eta_candidates(phi.k, rng, budget)
    # polished candidates from the scalar form widen the net over eta
    etas += [_polish(ineq, e, sweeps=tol.max_iters // 10 + 1, tol=tol)[1] for e in etas]
    for eta in etas:
        c = blockform.extract_components(phi, seed.xi, seed.x, eta, tol)
        psil, chil = blockform.check_wu(c, seed.lam, tol)
        ok = psil if kind == "psi" else chil
        val, y = ineq.worst_y(eta)
        if not ok:
            holds = False
        if val < worst[0]:
            worst = (val, eta, y)
    return holds, worst


def dominates(
    phi: LinearMap,
    rho: LinearMap,
    method: str = "map_difference_seesaw",
    tol: ToleranceConfig = DEFAULT_TOL,
    budget: int = 50,
    seed: MinorantSeed | None = None,
    kind: str | None = None,
    rng_seed: int = 0,
) -> DominationReport:
    """Test ``rho <= phi`` in the cone of positive maps.

    Methods:
        ``map_difference_seesaw``: see-saw minimum of ``phi - rho`` over
        product vectors (``budget`` restarts).
        ``inequality_sampling``: for ``rho`` built from ``seed`` (``kind`` is
        ``"psi"`` or ``"chi"``), sample the scalar inequality over structured
        and random ``eta`` with the worst ``y`` solved exactly, then polish.
        ``wu_criterion``: decide the matrix inequality per sampled ``eta``
        through its block form; needs ``phi`` in ``G_{xi,x}``.

    A failure verdict always carries an ``(eta, y)`` witness.
    """
    if phi.blocks.shape != rho.blocks.shape:
        raise DimensionMismatch("maps must have equal dimensions")
    if method not in METHODS:
        raise MethodUnavailable(f"unknown method {method!r}")
    thr = _threshold(phi, tol)
    if method == "map_difference_seesaw":
        rep = min_product_value(scale_add(1.0, phi, -1.0, rho), tol, restarts=budget, seed=rng_seed)
        xi, y = rep.witness[0]
        holds = rep.best_value >= -thr
        return DominationReport(
            holds=holds,
            method=method,
            worst_violation=rep.best_value,
            witness=None if holds else (xi, y),
            details={"restarts": rep.restarts_used, "converged": rep.converged},
        )
    if seed is None or kind not in ("psi", "chi"):
        raise MethodUnavailable(f"{method} needs the seed and kind ('psi' or 'chi') of the minorant")
    if method == "inequality_sampling":
        val, eta, y = _by_inequality(phi, seed, kind, tol, budget, rng_seed)
        holds = val >= -thr
        return DominationReport(
            holds=holds,
            method=method,
            worst_violation=val,
            witness=None if holds else (eta, y),
        )
    holds, (val, eta, y) = _by_wu(phi, seed, kind, tol, budget, rng_seed)
    if not holds and val >= -thr:
        # block-form verdict disagrees with the spectral gap; report both
        return DominationReport(holds=False, method=method, worst_violation=val, witness=(eta, y), details={"borderline": True})
    return DominationReport(
        holds=holds,
        method=method,
        worst_violation=val,
        witness=None if holds else (eta, y),
    )


def proportionality_residual(phi: LinearMap, rho: LinearMap) -> tuple[float, float]:
    """Best ``c`` minimizing ``||rho - c phi||`` and the residual relative to ``||phi||``."""
    a = phi.blocks.ravel()
    b = rho.blocks.ravel()
    nphi = np.linalg.norm(a)
    c = float(np.vdot(a, b).real / nphi**2)
    return c, float(np.linalg.norm(b - c * a) / nphi)


@dataclass
class FalsifierResult:
    verdict: str
    certificate: tuple | None = None
    tried: list = field(default_factory=list)


def extremality_falsifier(
    phi: LinearMap,
    tol: ToleranceConfig = DEFAULT_TOL,
    budget: int = 50,
    rng_seed: int = 0,
) -> FalsifierResult:
    """Look for a non-proportional minorant among the psi/chi of basis seeds.

    ``falsified`` comes with ``(rho, residual)``: ``rho <= phi`` held and
    ``rho`` is not a multiple of ``phi``, so ``phi`` is not extremal.
    ``not_falsified`` proves nothing.
    """
    if norm(phi) == 0:
        raise ZeroMap("the zero map has no extremality question")
    seeds = basis_seeds(phi, tol)
    if not seeds:
        seeds = [find_seed(phi, tol)]
    tried = []
    thr = max(tol.eps_eq, 1e-6)
    for s in seeds:
        for kind, builder in (("psi", build_psi), ("chi", build_chi)):
            rho = builder(phi, s, tol)
            rep = dominates(phi, rho, "map_difference_seesaw", tol, budget, rng_seed=rng_seed)
            entry = {"xi": s.xi, "kind": kind, "holds": rep.holds, "worst": rep.worst_violation}
            if rep.holds:
                c, resid = proportionality_residual(phi, rho)
                entry["residual"] = resid
                tried.append(entry)
                if resid > thr:
                    return FalsifierResult("falsified", (rho, resid), tried)
            else:
                tried.append(entry)
    return FalsifierResult("not_falsified", None, tried)


@dataclass
class T2PosReport:
    hypothesis_met: bool
    evidence_value: float
    copositive_hypothesis_met: bool
    co_evidence_value: float
    violations: list = field(default_factory=list)
    seeds_checked: int = 0
    status: str = ""


def verify_t2pos(
    phi: LinearMap,
    tol: ToleranceConfig = DEFAULT_TOL,
    budget: int = 50,
    rng_seed: int = 0,
) -> T2PosReport:
    """Check that 2-positivity evidence comes with the seed inequality holding.

    For a 2-positive map every basis seed must satisfy the psi inequality;
    when the map is also 2-copositive the chi inequality is checked too. Any
    violation found is reported as a numerical red flag. Maps without
    2-positivity evidence are skipped with status ``"hypothesis not met"``.
    """
    from .mapcore import compose_transpose

    thr = _threshold(phi, tol)
    if min(phi.k, phi.h) < 2:
        ev = min_product_value(phi, tol, budget, rng_seed).best_value
        co_ev = min_product_value(compose_transpose(phi), tol, budget, rng_seed).best_value
    else:
        ev = min_schmidt_k_value(phi, 2, tol, budget, rng_seed).best_value
        co_ev = min_schmidt_k_value(compose_transpose(phi), 2, tol, budget, rng_seed).best_value
    pos, copos = ev >= -thr, co_ev >= -thr
    rep = T2PosReport(pos, ev, copos, co_ev)
    if not pos:
        rep.status = "hypothesis not met"
        return rep
    seeds = basis_seeds(phi, tol)
    for s in seeds:
        for kind in ("psi", "chi") if copos else ("psi",):
            val, eta, y = _by_inequality(phi, s, kind, tol, budget, rng_seed)
            if val < -thr:
                rep.violations.append({"kind": kind, "xi": s.xi, "eta": eta, "y": y, "value": val})
    rep.seeds_checked = len(seeds)
    rep.status = "red flag" if rep.violations else "consistent"
    return rep
