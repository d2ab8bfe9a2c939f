"""Pointwise audits of the displacement estimates, and empirical constants.

Every audited inequality is written as ``lhs < bound``.  An inequality whose
two sides are both zero counts as passing.  Inequalities that only hold under
the C^1-closeness hypotheses are tagged ``hypothesis_violated`` (not
``fail``) when the measured distances break those hypotheses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .dynamics import (
    ActionInstance,
    EmbeddedManifold1D,
    SmoothMap,
    c1_distance_to_identity,
    compose,
    displacement_field,
    iterate,
    orbit,
    row_bound_stats,
    sine_family,
)
from .spectral import COMPUTED, EMPIRICAL, ConstantsBundle, Splitting, compute_constants, compute_splitting

__all__ = [
    "AuditRecord",
    "SweepReport",
    "HypothesisCheck",
    "measure_hypotheses",
    "audit_bonatti",
    "audit_lemma_hyp",
    "audit_lemma_Ck",
    "max_displacement_search",
    "rigidity_sweep",
    "estimate_eta1",
    "eta1_bound",
    "estimate_eps0",
    "estimate_eps1",
    "action_estimators",
    "constants_for_action",
]

PASS, FAIL, HYPOTHESIS_VIOLATED = "pass", "fail", "hypothesis_violated"
DISPLACEMENTS_ZERO = "displacements_zero"
EXPANSION_DETECTED = "expansion_detected"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class AuditRecord:
    lemma: str
    x: float
    lhs: float
    bound: float
    hypotheses_hold: bool = True
    context: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.bound - self.lhs

    @property
    def passed(self) -> bool:
        return self.margin > 0 or (self.lhs == 0 and self.bound == 0)

    @property
    def tag(self) -> str:
        if not self.hypotheses_hold:
            return HYPOTHESIS_VIOLATED
        return PASS if self.passed else FAIL

    @property
    def failed(self) -> bool:
        return self.tag == FAIL

    def row(self) -> list:
        return [self.lemma, repr(float(self.x)), repr(float(self.lhs)), repr(float(self.bound)),
                repr(float(self.margin)), str(self.passed).lower(), self.tag]


CSV_HEADER = ["lemma", "x", "lhs", "bound", "margin", "pass", "tag"]


@dataclass(frozen=True)
class HypothesisCheck:
    d_f: float
    d_fk: float
    d_g: tuple[float, ...]
    eta: float
    eps: Optional[float]

    @property
    def holds(self) -> bool:
        if not (self.d_fk < self.eta and self.d_f < self.eta):
            return False
        if self.eps is None:
            return True
        return max((self.d_f,) + self.d_g) < self.eps

    def to_dict(self) -> dict:
        return {"d_f": self.d_f, "d_fk": self.d_fk, "d_g": list(self.d_g), "eta": self.eta,
                "eps": self.eps, "holds": self.holds}


def measure_hypotheses(act: ActionInstance, constants: ConstantsBundle,
                       grid: Optional[int] = None) -> HypothesisCheck:
    m = act.manifold
    d_f = c1_distance_to_identity(act.f, m, grid)
    d_fk = c1_distance_to_identity(iterate(act.f, constants.k), m, grid)
    d_g = tuple(c1_distance_to_identity(g, m, grid) for g in act.g)
    return HypothesisCheck(d_f, d_fk, d_g, constants.eta, constants.eps)


# ---------------------------------------------------------------------------
# composition of maps close to the identity


def bonatti_ratio(maps: Sequence[SmoothMap], m: EmbeddedManifold1D, xs) -> tuple[np.ndarray, np.ndarray]:
    """(lhs, sup_i ||(f_i - id)(x)||) on xs, lhs = ||(f_1...f_N - id)(x) - sum_i (f_i - id)(x)||."""
    xs = np.asarray(xs, dtype=float)
    base = m.embed(xs)
    disp = np.stack([m.embed(h(xs)) - base for h in maps])
    total = m.embed(compose(*maps)(xs)) - base
    lhs = np.linalg.norm(total - disp.sum(axis=0), axis=-1)
    scale = np.max(np.linalg.norm(disp, axis=-1), axis=0)
    return lhs, scale


def audit_bonatti(maps: Sequence[SmoothMap], m: EmbeddedManifold1D, eta: float = 1.0,
                  grid: Optional[int] = None, eps1: Optional[float] = None) -> tuple[AuditRecord, float]:
    """Worst grid record of the composition-versus-sum estimate, and the empirical eta.

    empirical eta = sup_x lhs(x) / sup_i ||(f_i - id)(x)||, with 0/0 read as 0.
    """
    xs = m.grid(grid)
    lhs, scale = bonatti_ratio(maps, m, xs)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(scale > 0, lhs / np.where(scale > 0, scale, 1.0), np.where(lhs > 0, np.inf, 0.0))
    empirical = float(np.max(ratio))
    holds = True
    if eps1 is not None:
        holds = max(c1_distance_to_identity(h, m, grid) for h in maps) < eps1
    bound = eta * scale
    margin = bound - lhs
    # zero/zero points pass and never count as worst
    margin = np.where((lhs == 0) & (bound == 0), np.inf, margin)
    i = int(np.argmin(margin))
    rec = AuditRecord("bonatti", float(xs[i]), float(lhs[i]), float(bound[i]), holds,
                      {"N": len(maps), "eta": eta})
    return rec, empirical


def bonatti_records(maps: Sequence[SmoothMap], m: EmbeddedManifold1D, eta: float, xs,
                    holds: bool, label: str = "bonatti") -> list[AuditRecord]:
    lhs, scale = bonatti_ratio(maps, m, xs)
    return [AuditRecord(label, float(x), float(l), float(eta * s), holds) for x, l, s in zip(xs, lhs, scale)]


# ---------------------------------------------------------------------------
# displacement-matrix estimates along f-orbits


def _Ak(act: ActionInstance, k: int) -> np.ndarray:
    return np.array(act.A.power(k), dtype=float)


def audit_lemma_hyp(act: ActionInstance, constants: ConstantsBundle, x,
                    hyp: Optional[HypothesisCheck] = None) -> list[AuditRecord]:
    """||D(x)_j - A^k D(y)_j|| < eta sqrt(n ell) (2 max_j ||D(x)_j|| + max_j ||D(y)_j||),  y = f^k(x).

    ``x`` may be a scalar or an array; one record per (point, column).
    """
    hyp = hyp or measure_hypotheses(act, constants)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    k = constants.k
    ys = iterate(act.f, k)(xs)
    Dx, Dy = displacement_field(act, xs), displacement_field(act, ys)
    Ak = _Ak(act, k)
    pred = np.einsum("ab,gbj->gaj", Ak, Dy)
    lhs = np.linalg.norm(Dx - pred, axis=1)                       # (G, ell)
    cx = np.max(np.linalg.norm(Dx, axis=1), axis=1)
    cy = np.max(np.linalg.norm(Dy, axis=1), axis=1)
    bound = constants.eta * math.sqrt(act.n * act.ell) * (2 * cx + cy)
    out = []
    for g, xv in enumerate(xs):
        for j in range(act.ell):
            out.append(AuditRecord("lemma_hyp", float(xv), float(lhs[g, j]), float(bound[g]), hyp.holds,
                                   {"j": j, "y": float(ys[g]), "k": k}))
    return out


def audit_lemma_Ck(act: ActionInstance, constants: ConstantsBundle, x,
                   hyp: Optional[HypothesisCheck] = None) -> list[AuditRecord]:
    """max_i ||D(x)_i|| < C_k max_j ||D(f^k x)_j||  (rows on the left, columns on the right)."""
    hyp = hyp or measure_hypotheses(act, constants)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ys = iterate(act.f, constants.k)(xs)
    Dx, Dy = displacement_field(act, xs), displacement_field(act, ys)
    lhs = np.max(np.linalg.norm(Dx, axis=2), axis=1)
    bound = constants.C_k * np.max(np.linalg.norm(Dy, axis=1), axis=1)
    return [AuditRecord("lemma_Ck", float(xv), float(l), float(b), hyp.holds, {"y": float(y)})
            for xv, l, b, y in zip(xs, lhs, bound, ys)]


# ---------------------------------------------------------------------------
# maximal displacement and the orbit argument


@dataclass
class SweepReport:
    points: np.ndarray
    # values[g, j, 0] = ||pi_u D(x_g)_j||, values[g, j, 1] = ||pi_s D(x_g)_j||
    values: np.ndarray
    index: int
    column: int
    component: str
    verdict: Optional[str] = None
    orbit: list = field(default_factory=list)
    orbit_values: list = field(default_factory=list)
    factor: Optional[float] = None
    factor_variant: Optional[float] = None
    record: Optional[AuditRecord] = None
    variant_record: Optional[AuditRecord] = None
    variant_verdict: Optional[str] = None
    hypotheses: Optional[HypothesisCheck] = None

    @property
    def z(self) -> float:
        return float(self.points[self.index])

    @property
    def sup(self) -> float:
        return float(self.values[self.index, self.column, 0 if self.component == "u" else 1])

    def rows(self) -> list[list]:
        out = []
        for g, x in enumerate(self.points):
            for j in range(self.values.shape[1]):
                out.append([repr(float(x)), j, repr(float(self.values[g, j, 0])), repr(float(self.values[g, j, 1]))])
        return out

    def summary(self) -> dict:
        return {
            "argmax": {"index": self.index, "z": self.z, "column": self.column, "component": self.component},
            "sup": self.sup,
            "verdict": self.verdict,
            "orbit": [float(p) for p in self.orbit],
            "orbit_values": [float(v) for v in self.orbit_values],
            "factor": self.factor,
            "factor_variant": self.factor_variant,
            "variant": None if self.variant_record is None else {
                "verdict": self.variant_verdict, "lhs": self.variant_record.lhs,
                "bound": self.variant_record.bound, "tag": self.variant_record.tag},
            "hypotheses": None if self.hypotheses is None else self.hypotheses.to_dict(),
            "grid_points": int(len(self.points)),
        }


def _projected_norms(D: np.ndarray, S: Splitting) -> np.ndarray:
    """(G, ell, 2) array of ||pi_u D_j|| and ||pi_s D_j||."""
    pu = np.linalg.norm(np.einsum("ab,gbj->gaj", S.proj_u, D), axis=1)
    ps = np.linalg.norm(np.einsum("ab,gbj->gaj", S.proj_s, D), axis=1)
    return np.stack([pu, ps], axis=-1)


def max_displacement_search(act: ActionInstance, splitting: Splitting, grid: Optional[int] = None) -> SweepReport:
    """Exhaustive grid argmax of the projected column norms.

    Ties go to the lowest grid index, then the lowest column, then u before s,
    which is exactly the first maximum in C order of the (G, ell, 2) table.
    """
    xs = act.manifold.grid(grid)
    values = _projected_norms(displacement_field(act, xs), splitting)
    g, j, c = np.unravel_index(int(np.argmax(values)), values.shape)
    return SweepReport(xs, values, int(g), int(j), "u" if c == 0 else "s")


def rigidity_sweep(act: ActionInstance, constants: ConstantsBundle, splitting: Splitting,
                   grid: Optional[int] = None, steps: int = 1,
                   hyp: Optional[HypothesisCheck] = None) -> SweepReport:
    """Locate the maximal projected displacement and push it one k-stride along the orbit.

    Unstable maximum: walk backward to x = f^-k(z); the estimates force
    ||pi_u D(x)_j1|| > (theta_u - drift) sup, which exceeds sup.  Stable maximum:
    walk forward to y = f^k(z) and audit the factor theta_s + drift.  That factor
    is below 1, so it never beats the supremum and the verdict is ``inconclusive``;
    the reflected factor 2 - theta_s - drift is audited alongside as
    ``variant_record`` / ``variant_verdict`` and does not affect the verdict.
    """
    rep = max_displacement_search(act, splitting, grid)
    rep.hypotheses = hyp or measure_hypotheses(act, constants, grid)
    sup = rep.sup
    k = constants.k
    if sup == 0:
        rep.verdict = DISPLACEMENTS_ZERO
        rep.orbit = [rep.z]
        rep.orbit_values = [0.0]
        rep.record = AuditRecord("sweep", rep.z, 0.0, 0.0, rep.hypotheses.holds)
        return rep
    drift = constants.drift
    if rep.component == "u":
        rep.orbit = orbit(act, rep.z, steps, -k)
        rep.factor = constants.theta_u - drift
        proj = splitting.proj_u
    else:
        rep.orbit = orbit(act, rep.z, steps, k)
        rep.factor = constants.theta_s + drift
        rep.factor_variant = 2 - constants.theta_s - drift
        proj = splitting.proj_s
    D = displacement_field(act, rep.orbit)
    rep.orbit_values = [float(v) for v in np.linalg.norm(proj @ D[:, :, rep.column].T, axis=0)]
    measured = rep.orbit_values[1] if len(rep.orbit_values) > 1 else rep.orbit_values[0]
    holds = rep.hypotheses.holds
    ctx = {"sup": sup, "column": rep.column}

    def verdict(factor):
        if not holds:
            return HYPOTHESIS_VIOLATED
        return EXPANSION_DETECTED if factor * sup > sup else INCONCLUSIVE

    rep.record = AuditRecord("sweep_" + rep.component, rep.z, rep.factor * sup, measured, holds,
                             {**ctx, "factor": rep.factor})
    rep.verdict = verdict(rep.factor)
    if rep.factor_variant is not None:
        rep.variant_record = AuditRecord("sweep_s_variant", rep.z, rep.factor_variant * sup, measured, holds,
                                         {**ctx, "factor": rep.factor_variant})
        rep.variant_verdict = verdict(rep.factor_variant)
    return rep


# ---------------------------------------------------------------------------
# empirical constants


class Eta1Estimate(NamedTuple):
    d_f: float
    d_fk: float


def estimate_eta1(f: SmoothMap, k: int, m: EmbeddedManifold1D, grid: Optional[int] = None) -> Eta1Estimate:
    """Measured (d(f, id), d(f^k, id)); the instance complies when d_fk < eta."""
    if k < 1:
        raise ValueError("k must be >= 1")
    d_f = c1_distance_to_identity(f, m, grid)
    d_fk = d_f if k == 1 else c1_distance_to_identity(iterate(f, k), m, grid)
    return Eta1Estimate(d_f, d_fk)


def eta1_bound(eta: float, k: int, m: EmbeddedManifold1D) -> float:
    """Largest t with  c k t + (1 + t)^k - 1 < eta  (c = 1 on an interval, pi on the circle).

    That expression bounds d(f^k, id) whenever d(f, id) <= t: the displacement of
    f^k is at most k times that of f (the circle chord-to-arc factor is pi/2,
    counted twice because the tangent also rotates) and |(f^k)' - 1| is at most
    (1 + t)^k - 1.  The root is below eta, so d(f, id) < eta holds as well.
    """
    c = 1.0 if m.kind == "interval" else math.pi
    # expm1/log1p keep (1 + t)^k - 1 accurate when t is tiny
    root = brentq(lambda t: c * k * t + math.expm1(k * math.log1p(t)) - eta, 0.0, eta,
                  xtol=1e-15 * eta, rtol=1e-15)
    return root * (1 - 1e-12)


def estimate_eps0(h: SmoothMap, eta: float, m: EmbeddedManifold1D, grid: Optional[int] = None,
                  radii: int = 2000, points: int = 512) -> float:
    """Largest sampled radius r with |h(x+y) - h(x) - h'(x) y| <= eta |y| for all sampled |y| <= r.

    Radii are geometric from 1e-9 to the chart radius; x runs over a subgrid of
    at most ``points`` points; on an interval only x + y inside the chart count.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    R = m.chart_radius
    rs = R * np.logspace(-9, 0, radii)
    xs = m.grid(grid)
    if len(xs) > points:
        xs = xs[np.linspace(0, len(xs) - 1, points).round().astype(int)]
    hx, dx = h(xs), h.derivative(xs)
    ok = np.ones(len(rs), dtype=bool)
    for sign in (1.0, -1.0):
        y = sign * rs[None, :]
        pts = xs[:, None] + y
        valid = np.ones_like(pts, dtype=bool) if m.kind == "circle" else (pts >= m.lo) & (pts <= m.hi)
        if h.domain is not None:
            valid &= (pts >= h.domain[0]) & (pts <= h.domain[1])
        safe = np.where(valid, pts, xs[:, None])
        rem = np.abs(h(safe) - hx[:, None] - dx[:, None] * y)
        bad = valid & (rem > eta * np.abs(y))
        ok &= ~bad.any(axis=0)
    if not ok[0]:
        return 0.0
    first_bad = np.argmin(ok) if not ok.all() else len(ok)
    return float(rs[first_bad - 1])


def estimate_eps1(N: int, eta: float, m: EmbeddedManifold1D, grid: Optional[int] = None,
                  scales: Optional[Sequence[float]] = None) -> float:
    """Empirical threshold for the composition estimate over the sine scaling family.

    Scales are tried from small to large; the answer is the measured C^1 size of
    the family at the largest scale below which every composition of N maps has
    empirical eta < eta.
    """
    scales = sorted(np.logspace(-7, -1, 25) if scales is None else scales)
    best = 0.0
    for s in scales:
        maps = sine_family(float(s), N, m)
        _, emp = audit_bonatti(maps, m, eta, grid)
        if not emp < eta:
            break
        best = max(c1_distance_to_identity(h, m, grid) for h in maps)
    return best


def action_estimators(act: ActionInstance, grid: Optional[int] = None):
    """Estimator callables for compute_constants, bound to this action's manifold and f.

    eta1 comes from :func:`eta1_bound` (a proven bound, tagged computed); eps0 is
    measured on f^k and eps1 on the sine family with N maps (both empirical).
    """
    m = act.manifold
    return {
        "eta1": lambda ctx: (eta1_bound(ctx["eta"], ctx["k"], m), COMPUTED),
        "eps0": lambda ctx: (estimate_eps0(iterate(act.f, ctx["k"]), ctx["eta"], m, grid), EMPIRICAL),
        "eps1": lambda ctx: (estimate_eps1(ctx["N"], ctx["eta"], m, grid), EMPIRICAL),
    }


def constants_for_action(act: ActionInstance, alpha: float = 0.25, overrides=None, grid: Optional[int] = None,
                         delta: float = 1e-9, tol_split: float = 1e-9) -> tuple[Splitting, ConstantsBundle]:
    """Splitting of A plus the full constant bundle with empirical estimators attached."""
    S = compute_splitting(act.A, delta, tol_split)
    C = compute_constants(act.A, S, act.n, act.ell, alpha, overrides, action_estimators(act, grid))
    return S, C
