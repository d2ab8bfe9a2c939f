"""Command-line driver: group arithmetic, constants, and audit runs.

Exit codes: 0 success, 1 audit failure, 2 bad matrix or input, 3 runtime domain error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .dynamics import (
    ChartEscapeError,
    DomainError,
    EmbeddedManifold1D,
    identity_map,
    iterate,
    make_affine_on_chart,
    make_broken_fixture,
    make_navas_action,
    make_trivial_perturbed,
    quadratic_map,
    random_small_map,
    sine_map,
)
from .group import DimensionError, IntegerMatrix, Word, conjugate_power, from_word, is_identity, to_word
from .spectral import NotHyperbolicError, compute_constants, compute_splitting
from .verify import (
    CSV_HEADER,
    AuditRecord,
    action_estimators,
    audit_lemma_Ck,
    audit_lemma_hyp,
    bonatti_records,
    measure_hypotheses,
    rigidity_sweep,
)

EXIT_OK, EXIT_AUDIT, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3


def matrix_hash(A: IntegerMatrix) -> str:
    return hashlib.sha256(A.to_text().encode()).hexdigest()[:16]


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_matrix(desc, base: Path) -> IntegerMatrix:
    if isinstance(desc, str):
        return IntegerMatrix.read(base / desc)
    return IntegerMatrix(tuple(tuple(r) for r in desc))


def _build_map(desc: Optional[dict], m: EmbeddedManifold1D, rng: np.random.Generator):
    desc = desc or {"kind": "identity"}
    kind = desc.get("kind", "identity")
    if kind == "identity":
        return identity_map()
    if kind == "quadratic":
        return quadratic_map(float(desc["c"]), m)
    if kind == "sine":
        return sine_map(float(desc["scale"]), float(desc.get("phase", 0.0)), m)
    if kind == "random":
        return random_small_map(rng, float(desc["size"]), m)
    raise ValueError(f"unknown map kind {kind!r}")


def build_action(config: dict, base: Path, grid: int, tol_rel: float, seed: int):
    """ActionInstance described by a verify config (see README for the schema)."""
    rng = np.random.default_rng(seed)
    family = config["family"]
    A = _load_matrix(config["matrix"], base) if "matrix" in config else IntegerMatrix(((2,),))
    mspec = config.get("manifold", {"kind": "interval", "lo": 0.0, "hi": 1.0})
    if mspec.get("kind", "interval") == "circle":
        m = EmbeddedManifold1D.circle(grid)
    else:
        m = EmbeddedManifold1D.interval(mspec.get("lo", 0.0), mspec.get("hi", 1.0), grid)
    if family == "trivial_perturbed":
        return make_trivial_perturbed(A, m, _build_map(config.get("f"), m, rng))
    if family == "navas":
        return make_navas_action(A, config.get("lambda"), config.get("v", 1.0), config.get("x_max", 0.9),
                                 grid, tol_rel)
    if family == "affine":
        working = config.get("working")
        return make_affine_on_chart(config.get("lambda", 2.0), config.get("shifts", [1.0]),
                                    tuple(config.get("chart", (0.0, 1.0))), A,
                                    None if working is None else tuple(working), grid, tol_rel)
    if family == "broken":
        bump = config.get("bump", {})
        return make_broken_fixture(m, bump.get("center", 0.5), bump.get("width", 0.1), bump.get("amp", 1e-4),
                                   _build_map(config.get("f"), m, rng))
    raise ValueError(f"unknown family {family!r}")


def _header(A: IntegerMatrix, constants_hash: str, grid: int, seed: int) -> dict:
    return {"tool": "abcrigid", "version": __version__, "matrix_hash": matrix_hash(A),
            "constants_hash": constants_hash, "grid": grid, "seed": seed}


def _csv(rows, header, meta: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={v}" for k, v in sorted(meta.items())) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------------------


def cmd_group(args) -> int:
    A = IntegerMatrix.read(args.matrix)
    if args.action == "normalize":
        g = from_word(Word.parse(" ".join(args.word)), A)
        print(f"normal form: {g}")
        print(f"word: {to_word(g)}")
        print("identity" if is_identity(g) else "not identity")
    else:
        exps = conjugate_power(A, args.i, args.k)
        print(str(Word(tuple((j + 1, e) for j, e in enumerate(exps)))))
    return EXIT_OK


def _overrides(args) -> dict:
    return {k: getattr(args, k) for k in ("eta1", "eps0", "eps1") if getattr(args, k, None) is not None}


def cmd_constants(args) -> int:
    A = IntegerMatrix.read(args.matrix)
    try:
        S = compute_splitting(A, args.delta, args.tol_split)
    except NotHyperbolicError as exc:
        sys.stdout.write(_dump({"error": "not_hyperbolic", "report": exc.report.to_dict()}))
        print(exc.report.verdict, file=sys.stderr)
        return EXIT_INPUT
    estimators = None
    if args.config:
        cfg_path = Path(args.config)
        config = json.loads(cfg_path.read_text())
        act = build_action(config, cfg_path.parent, args.grid, args.tol_rel, args.seed)
        estimators = action_estimators(act)
    C = compute_constants(A, S, A.n, args.ell, args.alpha, _overrides(args), estimators, partial=True)
    doc = {"meta": _header(A, C.digest(), args.grid, args.seed), "constants": C.to_dict(),
           "splitting": {"dim_u": S.dim_u, "dim_s": S.dim_s}}
    text = _dump(doc)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "constants.json").write_text(text)
    return EXIT_OK


def run_verify(config: dict, base: Path, grid: int, tol_rel: float, seed: int, alpha: float,
               ell: Optional[int] = None, delta: float = 1e-9, tol_split: float = 1e-9):
    """Run every audit for one configured action; returns (records, sweep, summary dict)."""
    act = build_action(config, base, grid, tol_rel, seed)
    if ell is not None and ell != act.ell:
        raise ValueError(f"--ell {ell} does not match the manifold (ell={act.ell})")
    S = compute_splitting(act.A, delta, tol_split)
    overrides = dict(config.get("overrides", {}))
    C = compute_constants(act.A, S, act.n, act.ell, config.get("alpha", alpha), overrides,
                          action_estimators(act))
    hyp = measure_hypotheses(act, C)
    rng = np.random.default_rng(seed)
    xs = act.manifold.grid()
    npts = min(int(config.get("audit_points", 64)), len(xs))
    pts = np.sort(rng.choice(xs, size=npts, replace=False))

    records: list[AuditRecord] = []
    rel = act.relation_residual_field(xs)
    for i, r in enumerate(rel, 1):
        at = int(np.argmax(r))
        records.append(AuditRecord(f"relation_{i}", float(xs[at]), float(r[at]), tol_rel))
    Ak = act.A.power(C.k)
    for i, row in enumerate(Ak, 1):
        maps = [iterate(act.g[j], 1 if e > 0 else -1) for j, e in enumerate(row) for _ in range(abs(e))]
        if maps:
            records += bonatti_records(maps, act.manifold, C.eta, pts, hyp.holds, label=f"bonatti_{i}")
    records += audit_lemma_hyp(act, C, pts, hyp)
    records += audit_lemma_Ck(act, C, pts, hyp)
    sweep = rigidity_sweep(act, C, S, steps=int(config.get("steps", 1)), hyp=hyp)
    records.append(sweep.record)
    failures = sum(r.failed for r in records)
    summary = {
        "meta": _header(act.A, C.digest(), grid, seed),
        "family": config["family"],
        "action": act.params,
        "constants": C.to_dict(),
        "distances": act.generator_distances(),
        "relation_residuals": [float(r.max()) for r in rel],
        "sweep": sweep.summary(),
        "verdict": sweep.verdict,
        "audits": {"total": len(records), "failed": failures,
                   "hypothesis_violated": sum(r.tag == "hypothesis_violated" for r in records)},
    }
    return records, sweep, summary


def cmd_verify(args) -> int:
    cfg_path = Path(args.config)
    config = json.loads(cfg_path.read_text())
    if args.matrix:
        config["matrix"] = str(Path(args.matrix).resolve())
    records, sweep, summary = run_verify(config, cfg_path.parent, args.grid, args.tol_rel, args.seed,
                                         args.alpha, args.ell, args.delta, args.tol_split)
    meta = summary["meta"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "audits.csv").write_text(_csv([r.row() for r in records], CSV_HEADER, meta))
    (out / "sweep.csv").write_text(_csv(sweep.rows(), ["x", "j", "pi_u", "pi_s"], meta))
    (out / "summary.json").write_text(_dump(summary))
    print(f"verdict: {summary['verdict']}  audits: {summary['audits']['total']}  "
          f"failed: {summary['audits']['failed']}")
    return EXIT_AUDIT if summary["audits"]["failed"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--matrix", help="integer matrix file (n, then n rows)")
    common.add_argument("--alpha", type=float, default=0.25)
    common.add_argument("--ell", type=int, default=None, help="embedding dimension (default: 1, or the manifold's)")
    common.add_argument("--grid", type=int, default=4096)
    common.add_argument("--tol-rel", type=float, default=1e-8)
    common.add_argument("--tol-split", type=float, default=1e-9)
    common.add_argument("--delta", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="abcrigid", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"abcrigid {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", parents=[common], help="arithmetic in Gamma_A")
    gsub = g.add_subparsers(dest="action", required=True)
    norm = gsub.add_parser("normalize", help="normal form and identity test of a word")
    norm.add_argument("word", nargs="*", default=[])
    cp = gsub.add_parser("conj-power", help="exponents of a^k b_i a^-k")
    cp.add_argument("--i", type=int, required=True)
    cp.add_argument("--k", type=int, required=True)
    g.set_defaults(func=cmd_group)

    c = sub.add_parser("constants", parents=[common], help="splitting constants as JSON")
    c.add_argument("--config", default=None, help="action config used to estimate eta1/eps0/eps1")
    for name in ("eta1", "eps0", "eps1"):
        c.add_argument(f"--{name}", type=float, default=None)
    c.set_defaults(func=cmd_constants)

    v = sub.add_parser("verify", parents=[common], help="audit an action family")
    v.add_argument("--config", required=True)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.out is None:
        args.out = "."
    if args.command in ("group", "constants") and not args.matrix:
        parser.error("--matrix is required")
    if args.command == "constants" and args.ell is None:
        args.ell = 1
    for name in ("grid", "tol_rel", "tol_split", "delta"):
        if getattr(args, name) <= 0:
            parser.error(f"--{name.replace('_', '-')} must be positive")
    try:
        return args.func(args)
    except NotHyperbolicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ChartEscapeError, DomainError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, DimensionError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
