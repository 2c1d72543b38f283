"""Acceptance criteria 1-10, one test each.

Every test records a single PASS/FAIL line; pytest prints them in the
terminal summary. Run ``python tests/test_acceptance.py`` to execute the
criteria outside pytest.
"""

import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from acceptance_log import record
from posmap.blockform import decompose_at, psd_via_form
from posmap.corpus import decomposability_corpus
from posmap.decomp import Decomposed, WitnessFound, classify_decomposability, ppt_witness_search
from posmap.faces import choi_exceptional_projections, find_G_membership
from posmap.linalg import ToleranceConfig, numerical_rank, partial_transpose_first, random_complex, random_unit
from posmap.mapcore import (
    LinearMap,
    choi_example,
    from_cokraus,
    from_kraus,
    from_kraus_list,
    random_kraus_op,
    to_choi,
    transpose_map,
)
from posmap.minorant import METHODS, build_chi, build_psi, dominates, seed_from, verify_t2pos
from posmap.parallelogram import from_map, reconstruct
from posmap.positivity import is_completely_copositive, is_completely_positive, min_product_value, min_schmidt_k_value
from posmap.rank1 import CoKraus, Kraus, NotRankOne, classify_rank1, lemma_classify, lemma_rank_scan, phase_aligned_error
from strategies import face_cp_map, lemma_instance

ROOT = Path(__file__).resolve().parent.parent
SHAPES = [(k, h) for k in (2, 3, 4) for h in (2, 3, 4)]


def _check(number, title, checks, detail=""):
    failed = [name for name, ok in checks if not ok]
    record(number, title, not failed, detail + (f" failed: {', '.join(failed)}" if failed else ""))
    assert not failed, failed


def test_criterion_01_choi_rank_suite():
    t0 = time.perf_counter()
    phi = choi_example()
    tol = ToleranceConfig(eps_rank=1e-8)
    E11 = np.diag([1.0, 0, 0])
    listed = choi_exceptional_projections(tol)
    listed_P = [e.P for e in listed]
    rng = np.random.default_rng(1)
    ranks = []
    for _ in range(1000):
        xi = random_unit(3, rng)
        P = np.outer(xi, xi.conj())
        assert min(np.abs(P - Q).max() for Q in listed_P) > 1e-3
        ranks.append(numerical_rank(phi(P), tol))
    dt = time.perf_counter() - t0
    _check(
        1,
        "Choi map rank suite",
        [
            ("phi(E11) = diag(1,1,0)", np.allclose(phi(E11), np.diag([1, 1, 0]))),
            ("four listed projections", len(listed) == 4 and all(e.rank == 2 for e in listed)),
            ("1000 random give rank 3", all(r == 3 for r in ranks)),
            ("runtime < 5 s", dt < 5),
        ],
        f"{dt:.2f}s",
    )


def test_criterion_02_choi_classification():
    t0 = time.perf_counter()
    phi = choi_example()
    J = to_choi(phi)
    cp_ok, cp_min = is_completely_positive(phi)
    co_ok, co_min = is_completely_copositive(phi)
    pos = min_product_value(phi, restarts=50)
    two = min_schmidt_k_value(phi, 2, restarts=50)
    r1 = classify_rank1(phi)
    face = find_G_membership(phi, restarts=200)
    wit = ppt_witness_search(phi)
    witness_ok = False
    if isinstance(wit, WitnessFound):
        W = wit.W
        witness_ok = (
            np.linalg.eigvalsh(W)[0] >= -1e-10
            and np.linalg.eigvalsh(partial_transpose_first(W, 3, 3))[0] >= -1e-10
            and np.trace(J @ W).real < -1e-6
        )
    dt = time.perf_counter() - t0
    _check(
        2,
        "Choi map classification",
        [
            ("not CP", not cp_ok and cp_min < -1e-6),
            ("not co-CP", not co_ok and co_min < -1e-6),
            ("positive", pos.restarts_used >= 50 and pos.best_value >= -1e-9),
            ("not 2-positive", two.best_value < -1e-6),
            ("NotRankOne(E11)", isinstance(r1, NotRankOne) and np.allclose(r1.witness, np.diag([1, 0, 0]))),
            ("no G-face", face.found is None and face.restarts == 200),
            ("verified PPT witness", witness_ok),
            ("runtime < 60 s", dt < 60),
        ],
        f"Tr(JW)={getattr(wit, 'value', float('nan')):.6f} 2-pos={two.best_value:.6f} {dt:.1f}s",
    )


def test_criterion_03_rank_one_recovery():
    rng = np.random.default_rng(3)
    wrong, worst = [], 0.0
    for co in (False, True):
        for n in range(200):
            k, h = SHAPES[n % len(SHAPES)]
            A = random_kraus_op(k, h, rng)
            phi = from_cokraus(A) if co else from_kraus(A)
            cls = classify_rank1(phi, seed=n)
            want = CoKraus if co else Kraus
            if not isinstance(cls, want):
                wrong.append((co, n, type(cls).__name__))
                continue
            err = phase_aligned_error(cls.C if co else cls.B, A)
            worst = max(worst, err)
    _check(
        3,
        "rank-one classifier recovery",
        [("zero misclassifications", not wrong), ("generator error <= 1e-8", worst <= 1e-8)],
        f"400 maps, worst phase-aligned error {worst:.1e}",
    )


def test_criterion_04_block_form_equivalence():
    rng = np.random.default_rng(4)
    tol = ToleranceConfig(eps_psd=1e-8)
    disagree = 0
    for n in range(2000):
        d = 2 + n % 5
        G = random_complex((d, d), rng)
        kind = n % 3
        if kind == 0:
            H = (G + G.conj().T) / 2
        elif kind == 1:
            G = G[:, : rng.integers(1, d + 1)]
            H = G @ G.conj().T
        else:
            H = (G + G.conj().T) / 2
            H = H - (np.linalg.eigvalsh(H)[0] + rng.choice([-1e-3, 1e-3])) * np.eye(d)
        x = random_unit(d, rng)
        spectral = np.linalg.eigvalsh(H)[0] >= -tol.eps_psd
        disagree += psd_via_form(decompose_at(H, x, tol), tol) != spectral
    _check(4, "block-form PSD test equals spectral test", [("zero disagreements", disagree == 0)], f"2000 matrices, {disagree} disagreements")


def test_criterion_05_domination_methods_agree():
    rng = np.random.default_rng(5)
    split = []
    tally = {}
    for n in range(100):
        k, h = [(2, 2), (2, 3), (3, 2), (3, 3)][n % 4]
        phi, xi, _ = face_cp_map(k, h, rng, 1 + n % 3)
        s = seed_from(phi, xi)
        for kind, build in (("psi", build_psi), ("chi", build_chi)):
            rho = build(phi, s)
            v = tuple(dominates(phi, rho, m, seed=s, kind=kind, rng_seed=n).holds for m in METHODS)
            tally[(kind, v[0])] = tally.get((kind, v[0]), 0) + 1
            if len(set(v)) != 1:
                split.append((n, kind, v))
    _check(5, "three domination methods agree in constructed faces", [("identical verdicts", not split)], f"{tally}")


def test_criterion_06_t2pos_harness():
    rng = np.random.default_rng(6)
    violations = 0
    statuses = set()
    for n in range(100):
        k, h = [(2, 2), (2, 3), (3, 2), (3, 3)][n % 4]
        phi = from_kraus_list([random_complex((h, k), rng) / np.sqrt(k) for _ in range(1 + n % 3)])
        rep = verify_t2pos(phi, rng_seed=n)
        violations += len(rep.violations)
        statuses.add(rep.status)
    choi = verify_t2pos(choi_example())
    tr = verify_t2pos(transpose_map(3))
    _check(
        6,
        "2-positivity harness",
        [
            ("zero violations on CP maps", violations == 0 and statuses == {"consistent"}),
            ("Choi map skipped", choi.status == "hypothesis not met"),
            ("transpose map skipped", tr.status == "hypothesis not met"),
        ],
    )


def test_criterion_07_parallelogram_round_trip():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    maps = [choi_example()]
    for n in range(199):
        k, h = 1 + n % 4, 1 + (n // 4) % 4
        G = random_complex((k, k, h, h), rng)
        maps.append(LinearMap((G + G.transpose(1, 0, 3, 2).conj()) / 2))
    worst = max(float(np.abs(reconstruct(from_map(phi), samples=10, seed=i).blocks - phi.blocks).max()) for i, phi in enumerate(maps))
    dt = time.perf_counter() - t0
    _check(7, "reconstruction round trip", [("blockwise <= 1e-9", worst <= 1e-9), ("runtime < 10 s", dt < 10)], f"worst {worst:.1e}, {dt:.2f}s")


def test_criterion_08_rank_lemma_oracle():
    rng = np.random.default_rng(8)
    fail_scan, fail_cls = [], []
    for case in "abcd":
        for n in range(500):
            x, y, A, name = lemma_instance(case, 2 + n % 3, rng)
            ok, _ = lemma_rank_scan(x, y, A, lam_samples=16, seed=n)
            if not ok:
                fail_scan.append((case, n))
            if type(lemma_classify(x, y, A, lam_samples=16, seed=n)).__name__ != name:
                fail_cls.append((case, n))
    missed = 0
    for n in range(500):
        x, y, A, _ = lemma_instance("reject", 2 + n % 3, rng)
        ok, (lam, r) = lemma_rank_scan(x, y, A, lam_samples=16, seed=n)
        missed += ok or r < 2
    _check(
        8,
        "rank-one lemma oracle",
        [
            ("2000 admissible pass the scan", not fail_scan),
            ("classifier round trip", not fail_cls),
            ("500 rejected give rank >= 2", missed == 0),
        ],
    )


def test_criterion_09_decomposability_duality():
    corpus = decomposability_corpus(0)
    tight = 1e-10
    both, bad_witness, bad_decomp = [], [], []
    counts = {}
    for label, phi in corpus:
        out = classify_decomposability(phi)
        counts[out["verdict"]] = counts.get(out["verdict"], 0) + 1
        p, d = out["primal"], out["dual"]
        if isinstance(p, Decomposed) and isinstance(d, WitnessFound):
            both.append(label)
        if isinstance(d, WitnessFound):
            J = to_choi(phi)
            W = d.W
            ok = (
                np.linalg.eigvalsh(W)[0] >= -tight
                and np.linalg.eigvalsh(partial_transpose_first(W, phi.k, phi.h))[0] >= -tight
                and abs(np.trace(W).real - 1) <= 1e-12
                and np.trace(J @ W).real < 0
            )
            if not ok:
                bad_witness.append(label)
        if isinstance(p, Decomposed):
            J = to_choi(phi)
            ok = (
                np.linalg.eigvalsh(p.S1)[0] >= -1e-8
                and np.linalg.eigvalsh(p.S2)[0] >= -1e-8
                and np.linalg.norm(J - p.S1 - partial_transpose_first(p.S2, phi.k, phi.h)) <= 1e-8
            )
            if not ok:
                bad_decomp.append(label)
    _check(
        9,
        "decomposability duality on corpus",
        [
            (">= 500 maps", len(corpus) >= 500),
            ("never both verdicts", not both),
            ("witnesses verified", not bad_witness),
            ("decompositions verified", not bad_decomp),
        ],
        f"{len(corpus)} maps {counts}",
    )


def test_criterion_10_cli_determinism(tmp_path):
    corpus = sorted((ROOT / "corpus").glob("*.json"))
    assert corpus, "run scripts/make_corpus.py first"
    runs = []
    for r in range(2):
        outs = []
        for path in corpus:
            rep = tmp_path / f"{r}-{path.name}"
            proc = subprocess.run(
                [sys.executable, "-m", "posmap", "analyze", str(path), "--all", "--json", str(rep)],
                capture_output=True,
                env={**os.environ, "POSMAP_SEED": "0"},
            )
            outs.append((proc.returncode, proc.stdout, rep.read_bytes()))
        runs.append(outs)
    _check(
        10,
        "analyze --all byte-identical across runs",
        [("exit codes 0", all(o[0] == 0 for o in runs[0] + runs[1])), ("identical output", runs[0] == runs[1])],
        f"{len(corpus)} corpus files",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
