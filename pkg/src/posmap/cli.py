"""Command-line front end.

    posmap gen KIND [params] -o FILE
    posmap analyze FILE [--positivity] [--k-pos S] [--co] [--cp] [--cocp]
                        [--schwarz] [--rank1] [--faces] [--decomp] [--minorant]
                        [--all] [--expect-positive] [--json OUT]
    posmap tabulate FILE -o TABLE
    posmap reconstruct SPEC -o FILE

Exit codes: 0 success, 1 usage or input error, 2 expectation failure.
The default seed is 0 unless ``POSMAP_SEED`` is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, decomp, faces, minorant, positivity, rank1
from .errors import IdentityViolated, PosmapError
from .linalg import ToleranceConfig, partial_transpose_first, random_complex, random_unit
from .mapcore import (
    LinearMap,
    choi_example,
    compose_transpose,
    from_cokraus,
    from_functional,
    from_kraus,
    identity_map,
    norm,
    random_decomposable,
    random_kraus_op,
    to_choi,
    transpose_map,
)
from .mapfile import decode_matrix, dumps, encode_matrix, jsonable, read_map, write_map
from .parallelogram import QuadraticFunction, reconstruct, required_vectors, tabulated

GEN_KINDS = ("choi", "transpose", "identity", "kraus", "cokraus", "functional", "random_pos")
ANALYSES = ("positivity", "k_positivity", "k_copositivity", "cp", "cocp", "schwarz", "rank1", "faces", "decomp", "minorant")
TABLE_FORMAT = "posmap-tabulation"


def default_seed() -> int:
    raw = os.environ.get("POSMAP_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise PosmapError(f"POSMAP_SEED must be an integer, got {raw!r}") from None


# --- gen -----------------------------------------------------------------


def generate(kind: str, k: int = 3, h: int | None = None, seed: int = 0, n_kraus: int = 2, n_cokraus: int = 2, fmt: str = "decimal"):
    """Build a map of the given kind and the metadata recorded with it."""
    h = k if h is None else h
    if k < 1 or h < 1:
        raise PosmapError("dimensions must be positive")
    rng = np.random.default_rng(seed)
    meta = {"name": kind}
    if kind == "choi":
        return choi_example(), meta
    if kind == "identity":
        meta["params"] = {"dim": k}
        return identity_map(k), meta
    if kind == "transpose":
        meta["params"] = {"dim": k}
        return transpose_map(k), meta
    meta["params"] = {"k": k, "h": h, "seed": seed}
    if kind in ("kraus", "cokraus"):
        A = random_kraus_op(k, h, rng)
        meta["generator"] = encode_matrix(A, fmt)
        return (from_kraus(A) if kind == "kraus" else from_cokraus(A)), meta
    if kind == "functional":
        G = random_complex((k, k), rng)
        M = G @ G.conj().T / k
        q = random_unit(h, rng)
        meta["generator"] = {"M": encode_matrix(M, fmt), "q": encode_matrix(q[:, None], fmt)}
        return from_functional(M, np.outer(q, q.conj())), meta
    if kind == "random_pos":
        if n_kraus < 0 or n_cokraus < 0 or n_kraus + n_cokraus == 0:
            raise PosmapError("random_pos needs at least one Kraus or co-Kraus term")
        meta["params"].update({"n_kraus": n_kraus, "n_cokraus": n_cokraus})
        return random_decomposable(k, h, rng, n_kraus, n_cokraus), meta
    raise PosmapError(f"unknown kind {kind!r}; choose from {', '.join(GEN_KINDS)}")


# --- analyses ------------------------------------------------------------


def _vec(v):
    return None if v is None else np.asarray(v, dtype=complex)


def _entry(analysis, verdict, evidence, witness=None):
    out = {"analysis": analysis, "verdict": verdict, "evidence": evidence}
    if witness is not None:
        out["witness"] = witness
    return out


def _threshold(phi, tol):
    return tol.eps_psd * max(1.0, norm(phi))


def run_positivity(phi, tol, seed, restarts):
    rep = positivity.min_product_value(phi, tol, restarts, seed)
    neg = rep.best_value < -_threshold(phi, tol)
    xi, y = rep.witness[0]
    return _entry(
        "positivity",
        "not positive (certificate)" if neg else "positive (evidence)",
        {"min_product_value": rep.best_value, "restarts": rep.restarts_used, "converged": rep.converged},
        {"xi": xi, "y": y} if neg else None,
    )


def _kpos(name, label, phi, s, tol, seed, restarts):
    s = min(s, phi.k, phi.h)
    rep = positivity.min_schmidt_k_value(phi, s, tol, restarts, seed)
    neg = rep.best_value < -_threshold(phi, tol)
    return _entry(
        name,
        f"not {s}-{label} (certificate)" if neg else f"{s}-{label} (evidence)",
        {"s": s, "min_value": rep.best_value, "restarts": rep.restarts_used},
        {"schmidt_pairs": [{"xi": a, "y": b} for a, b in rep.witness]} if neg else None,
    )


def run_cp(phi, tol):
    ok, lo = positivity.is_completely_positive(phi, tol)
    return _entry("cp", "CP" if ok else "not CP", {"min_eig_choi": lo})


def run_cocp(phi, tol):
    ok, lo = positivity.is_completely_copositive(phi, tol)
    return _entry("cocp", "co-CP" if ok else "not co-CP", {"min_eig_partial_transpose": lo})


def run_schwarz(phi, tol, seed):
    cfg = positivity.SchwarzConfig()
    a = positivity.schwarz_defect(phi, cfg, tol, seed)
    b = positivity.schwarz_co_defect(phi, cfg, tol, seed)
    parts = []
    parts.append("locally CP (evidence)" if a.best_gamma is not None else "no gamma on grid for the CP inequality")
    parts.append("locally co-CP (evidence)" if b.best_gamma is not None else "no gamma on grid for the co-CP inequality")
    return _entry(
        "schwarz",
        "; ".join(parts),
        {
            "gamma_grid": list(cfg.gamma_grid),
            "best_gamma": a.best_gamma,
            "best_gamma_co": b.best_gamma,
            "worst_min_eig": [w for _, w in a.worst],
            "worst_min_eig_co": [w for _, w in b.worst],
            "grid_note": "grid range is a fixed convention, not derived",
        },
    )


def run_rank1(phi, tol, seed, meta):
    cls = rank1.classify_rank1(phi, tol, seed=seed)
    ev = {}
    gen = meta.get("generator") if isinstance(meta.get("generator"), list) else None
    if isinstance(cls, rank1.NotRankOne):
        ev["observed_rank"] = cls.observed_rank
        if cls.residuals:
            ev["residuals"] = cls.residuals
        return _entry("rank1", f"NotRankOne (rank {cls.observed_rank})", ev, {"projection": cls.witness})
    rebuilt = rank1.rebuild(cls)
    ev["reconstruction_residual"] = float(np.abs(rebuilt.blocks - phi.blocks).max(initial=0.0))
    if isinstance(cls, rank1.Kraus):
        ev["B"] = cls.B
        if gen is not None:
            ev["phase_aligned_error"] = rank1.phase_aligned_error(cls.B, decode_matrix(gen))
        return _entry("rank1", "Kraus", ev)
    if isinstance(cls, rank1.CoKraus):
        ev["C"] = cls.C
        if gen is not None:
            ev["phase_aligned_error"] = rank1.phase_aligned_error(cls.C, decode_matrix(gen))
        return _entry("rank1", "CoKraus", ev)
    ev["M"], ev["Q"] = cls.M, cls.Q
    return _entry("rank1", "Functional", ev)


def run_faces(phi, tol, seed, restarts):
    if norm(phi) == 0:
        return _entry("faces", "zero map (in every face)", {})
    res = faces.find_G_membership(phi, tol, restarts, seed)
    ev = {"restarts": res.restarts, "best_second_eigenvalue": res.best_second}
    if res.found is None:
        return _entry("faces", "no G-face found (evidence)", ev)
    xi, x, lam = res.found
    ev["lambda"] = lam
    return _entry("faces", "in a G-face", ev, {"xi": xi, "x": x})


def run_decomp(phi, tol, seed):
    out = decomp.classify_decomposability(phi, tol, seed=seed)
    primal, dual = out["primal"], out["dual"]
    ev = {}
    wit = None
    if isinstance(primal, decomp.Decomposed):
        ev["residual"] = primal.residual
        ev["min_eig_S1"] = float(np.linalg.eigvalsh(primal.S1)[0])
        ev["min_eig_S2"] = float(np.linalg.eigvalsh(primal.S2)[0])
    else:
        ev["best_residual"] = primal.best_residual
    if isinstance(dual, decomp.WitnessFound):
        ev["witness_value"] = dual.value
        W = dual.W
        ev["min_eig_W"] = float(np.linalg.eigvalsh(W)[0])
        ev["min_eig_PT_W"] = float(np.linalg.eigvalsh(partial_transpose_first(W, phi.k, phi.h))[0])
        wit = {"W": W}
    else:
        ev["best_witness_value"] = dual.best_witness_value
    verdict = {
        "decomposable": "decomposable (certificate)",
        "nondecomposable": "nondecomposable (certificate)",
        "inconclusive": "inconclusive",
    }[out["verdict"]]
    return _entry("decomp", verdict, ev, wit)


def run_minorant(phi, tol, seed, restarts):
    if norm(phi) == 0:
        return _entry("minorant", "zero map", {})
    s = minorant.find_seed(phi, tol, seed)
    ev = {"seed_xi": s.xi, "seed_x": s.x, "seed_lambda": s.lam}
    wit = {}
    for kind, builder in (("psi", minorant.build_psi), ("chi", minorant.build_chi)):
        rho = builder(phi, s, tol)
        rep = minorant.dominates(phi, rho, "map_difference_seesaw", tol, restarts, rng_seed=seed)
        ev[f"{kind}_dominated"] = rep.holds
        ev[f"{kind}_worst"] = rep.worst_violation
        if rep.witness is not None:
            wit[kind] = {"eta": rep.witness[0], "y": rep.witness[1]}
    fal = minorant.extremality_falsifier(phi, tol, restarts, rng_seed=seed)
    ev["extremality"] = fal.verdict
    if fal.certificate is not None:
        ev["proportionality_residual"] = fal.certificate[1]
    verdict = "not extremal (certificate)" if fal.verdict == "falsified" else "extremality not falsified"
    return _entry("minorant", verdict, ev, wit or None)


def analyze(phi: LinearMap, meta: dict, selected, tol: ToleranceConfig, seed: int, restarts: int = 50, s: int = 2, face_restarts: int = 200) -> dict:
    """Run the selected analyses in the fixed order of ``ANALYSES``."""
    results = []
    for name in ANALYSES:
        if name not in selected:
            continue
        if name == "positivity":
            results.append(run_positivity(phi, tol, seed, restarts))
        elif name == "k_positivity":
            results.append(_kpos(name, "positive", phi, s, tol, seed, restarts))
        elif name == "k_copositivity":
            results.append(_kpos(name, "copositive", compose_transpose(phi), s, tol, seed, restarts))
        elif name == "cp":
            results.append(run_cp(phi, tol))
        elif name == "cocp":
            results.append(run_cocp(phi, tol))
        elif name == "schwarz":
            results.append(run_schwarz(phi, tol, seed))
        elif name == "rank1":
            results.append(run_rank1(phi, tol, seed, meta))
        elif name == "faces":
            results.append(run_faces(phi, tol, seed, face_restarts))
        elif name == "decomp":
            results.append(run_decomp(phi, tol, seed))
        elif name == "minorant":
            results.append(run_minorant(phi, tol, seed, restarts))
    return {
        "version": __version__,
        "seed": seed,
        "tolerances": tol.as_dict(),
        "map": {"dim_in": phi.k, "dim_out": phi.h, "name": meta.get("name")},
        "results": jsonable(results),
    }


def render_text(report: dict) -> str:
    m = report["map"]
    lines = [f"map {m.get('name') or '(unnamed)'}: {m['dim_in']} -> {m['dim_out']}  seed={report['seed']}  version={report['version']}"]
    for r in report["results"]:
        lines.append(f"  {r['analysis']:<15} {r['verdict']}")
        for key, val in r["evidence"].items():
            if isinstance(val, (int, float, str, bool)) or val is None:
                lines.append(f"      {key} = {val!r}")
    return "\n".join(lines) + "\n"


# --- tabulate / reconstruct ----------------------------------------------


def tabulate_map(phi: LinearMap, fmt: str = "decimal") -> dict:
    entries = []
    for v in required_vectors(phi.k):
        Y = phi(np.outer(v, v.conj()))
        entries.append({"vector": encode_matrix(v[None, :], fmt)[0], "value": encode_matrix(Y, fmt)})
    return {"format": TABLE_FORMAT, "version": 1, "dim_in": phi.k, "dim_out": phi.h, "float_format": fmt, "entries": entries}


def quadratic_from_table(doc) -> QuadraticFunction:
    if not isinstance(doc, dict) or doc.get("format") != TABLE_FORMAT:
        raise PosmapError("not a tabulation file")
    k, h = int(doc["dim_in"]), int(doc["dim_out"])
    entries = []
    for e in doc.get("entries", []):
        v = decode_matrix([e["vector"]])[0]
        entries.append((v, decode_matrix(e["value"])))
    return tabulated(k, h, entries)


def builtin_quadratic(name: str, k: int, h: int) -> QuadraticFunction:
    if name == "tracemap":
        return QuadraticFunction(k, h, lambda eta: np.vdot(eta, eta).real * np.eye(h), positive=True)
    raise PosmapError(f"unknown built-in quadratic function {name!r}")


# --- argument parsing ----------------------------------------------------


def _add_tol(p):
    p.add_argument("--eps-psd", type=float, default=1e-8)
    p.add_argument("--eps-rank", type=float, default=1e-8)
    p.add_argument("--eps-eq", type=float, default=1e-8)
    p.add_argument("--opt-tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=None)


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(args.eps_psd, args.eps_rank, args.eps_eq, args.opt_tol, args.max_iters)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="posmap", description="Analyze linear maps between matrix algebras.")
    ap.add_argument("--version", action="version", version=f"posmap {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a map file")
    g.add_argument("kind", choices=GEN_KINDS)
    g.add_argument("-o", "--out", required=True)
    g.add_argument("--dim", type=int, default=None, help="dimension for identity/transpose")
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--h", type=int, default=None)
    g.add_argument("--n-kraus", type=int, default=2)
    g.add_argument("--n-cokraus", type=int, default=2)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--float-format", choices=("decimal", "hex"), default="decimal")

    a = sub.add_parser("analyze", help="run analyses on a map file")
    a.add_argument("path")
    for flag in ("positivity", "co", "cp", "cocp", "schwarz", "rank1", "faces", "decomp", "minorant", "all"):
        a.add_argument(f"--{flag}", action="store_true")
    a.add_argument("--k-pos", type=int, default=None, metavar="S")
    a.add_argument("--restarts", type=int, default=50)
    a.add_argument("--face-restarts", type=int, default=200)
    a.add_argument("--expect-positive", action="store_true")
    a.add_argument("--json", default=None, metavar="OUT", help="write the machine report ('-' for stdout)")
    _add_tol(a)

    t = sub.add_parser("tabulate", help="tabulate eta -> phi(eta eta*) at the vectors reconstruct needs")
    t.add_argument("path")
    t.add_argument("-o", "--out", required=True)
    t.add_argument("--float-format", choices=("decimal", "hex"), default="decimal")

    r = sub.add_parser("reconstruct", help="rebuild a map from a quadratic function")
    r.add_argument("spec", help="'tracemap' or a tabulation file")
    r.add_argument("-o", "--out", required=True)
    r.add_argument("--k", type=int, default=2)
    r.add_argument("--h", type=int, default=None)
    r.add_argument("--float-format", choices=("decimal", "hex"), default="decimal")
    _add_tol(r)
    return ap


def _selected(args) -> tuple[set, int]:
    sel = set()
    s = args.k_pos if args.k_pos is not None else 2
    if args.all:
        sel = set(ANALYSES)
    if args.positivity:
        sel.add("positivity")
    if args.k_pos is not None:
        sel.add("k_positivity")
    if args.co:
        sel.add("k_copositivity")
    for name in ("cp", "cocp", "schwarz", "rank1", "faces", "decomp", "minorant"):
        if getattr(args, name):
            sel.add(name)
    if args.expect_positive:
        sel.add("positivity")
    return sel, s


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    try:
        seed = args.seed if getattr(args, "seed", None) is not None else default_seed()
        if args.cmd == "gen":
            k = args.dim if args.dim is not None else args.k
            h = args.dim if args.dim is not None else args.h
            phi, meta = generate(args.kind, k, h, seed, args.n_kraus, args.n_cokraus, args.float_format)
            write_map(args.out, phi, args.float_format, meta)
            return 0
        if args.cmd == "analyze":
            phi, meta = read_map(args.path)
            sel, s = _selected(args)
            if not sel:
                print("posmap analyze: no analysis selected", file=sys.stderr)
                return 1
            if s < 1:
                raise PosmapError("--k-pos must be at least 1")
            report = analyze(phi, meta, sel, _tol(args), seed, args.restarts, s, args.face_restarts)
            doc = dumps(report)
            if args.json == "-":
                sys.stdout.write(doc)
            else:
                sys.stdout.write(render_text(report))
                if args.json:
                    Path(args.json).write_text(doc, encoding="utf-8")
            if args.expect_positive:
                pos = next(r for r in report["results"] if r["analysis"] == "positivity")
                if pos["verdict"].startswith("not positive"):
                    return 2
            return 0
        if args.cmd == "tabulate":
            phi, _ = read_map(args.path)
            Path(args.out).write_text(dumps(tabulate_map(phi, args.float_format)), encoding="utf-8")
            return 0
        if args.cmd == "reconstruct":
            if Path(args.spec).is_file():
                Rf = quadratic_from_table(json.loads(Path(args.spec).read_text(encoding="utf-8")))
            else:
                Rf = builtin_quadratic(args.spec, args.k, args.h if args.h is not None else args.k)
            phi = reconstruct(Rf, _tol(args), seed=seed)
            write_map(args.out, phi, args.float_format, {"name": "reconstructed", "source": str(args.spec)})
            return 0
    except IdentityViolated as e:
        msg = f"posmap: {e}"
        if e.pair is not None:
            a, b = e.pair
            msg += f"\n  pair: a={np.round(a, 12).tolist()} b={np.round(b, 12).tolist()}"
        print(msg, file=sys.stderr)
        return 1
    except (PosmapError, OSError, KeyError, json.JSONDecodeError) as e:
        print(f"posmap: {e}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
