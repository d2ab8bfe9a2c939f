"""Hyperbolicity check, invariant splitting and the expansion constants of A.

The splitting R^n = E^u + E^s is read off two sorted real Schur forms (one
with the eigenvalues outside the unit circle first, one with those inside
first).  Each leading Schur block spans an invariant subspace with an
orthonormal basis, and the restricted operator ``basis.T @ A @ basis`` is that
block, so powers of A on E^u and E^s are taken on the small blocks without
ever forming a large A^k.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np
import scipy.linalg

from .group import IntegerMatrix

__all__ = [
    "SpectralError",
    "NotHyperbolicError",
    "KSearchError",
    "HyperbolicityReport",
    "Splitting",
    "ConstantsBundle",
    "check_hyperbolic",
    "compute_splitting",
    "find_k",
    "compute_constants",
    "operator_norm",
]

HYPERBOLIC = "hyperbolic"
HAS_UNIT_MODULUS = "has_unit_modulus"
INDETERMINATE = "indeterminate"


class SpectralError(ArithmeticError):
    """Eigen-solver failure."""


class NotHyperbolicError(ValueError):
    def __init__(self, report: "HyperbolicityReport"):
        super().__init__(f"matrix is not hyperbolic: {report.verdict} (gap={report.gap:.3e})")
        self.report = report


class KSearchError(RuntimeError):
    pass


def _as_float(A) -> np.ndarray:
    if isinstance(A, IntegerMatrix):
        return np.array(A.entries, dtype=float)
    return np.asarray(A, dtype=float)


@dataclass(frozen=True)
class HyperbolicityReport:
    eigen_moduli: tuple[float, ...]
    gap: float
    verdict: str
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


def _has_certified_unit_root(A: IntegerMatrix) -> bool:
    """Exact check for an eigenvalue on the unit circle.

    A unit-modulus algebraic integer is either a root of unity (cyclotomic
    factor of the characteristic polynomial) or a conjugate of a Salem number
    (self-reciprocal factor of degree >= 4); the second case is settled with
    50-digit root finding.
    """
    import sympy

    x = sympy.Symbol("x")
    charpoly = sympy.Matrix(A.tolist()).charpoly(x)
    for factor, _ in sympy.factor_list(charpoly.as_expr())[1]:
        poly = sympy.Poly(factor, x)
        if poly.degree() < 1:
            continue
        if poly.is_cyclotomic:
            return True
        coeffs = poly.all_coeffs()
        if poly.degree() >= 4 and coeffs in (coeffs[::-1], [-c for c in coeffs[::-1]]):
            roots = poly.nroots(n=50)
            if any(abs(abs(complex(r)) - 1) < 1e-40 for r in roots):
                return True
    return False


def check_hyperbolic(A: IntegerMatrix, delta: float = 1e-9) -> HyperbolicityReport:
    """Numerical unit-circle test with an explicit indeterminate band of width ``delta``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    M = _as_float(A)
    try:
        eig = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigenvalue computation failed: {exc}") from exc
    residual = min(np.linalg.svd(M - lam * np.eye(len(M)), compute_uv=False)[-1] for lam in eig)
    if not np.isfinite(eig).all() or residual > 1e-6 * max(1.0, np.linalg.norm(M, 2)):
        raise SpectralError(f"eigenvalues not trustworthy, smallest-singular-value residual {residual:.3e}")
    moduli = tuple(sorted((float(abs(l)) for l in eig), reverse=True))
    gap = min(abs(m - 1.0) for m in moduli)
    if gap > delta:
        verdict = HYPERBOLIC
    elif isinstance(A, IntegerMatrix) and _has_certified_unit_root(A):
        verdict = HAS_UNIT_MODULUS
    else:
        verdict = INDETERMINATE
    return HyperbolicityReport(moduli, float(gap), verdict, delta)


@dataclass(frozen=True, eq=False)
class Splitting:
    """A-invariant splitting with orthonormal bases and spectral projectors."""

    matrix: np.ndarray
    basis_u: np.ndarray
    basis_s: np.ndarray
    proj_u: np.ndarray
    proj_s: np.ndarray
    # restrictions of A to E^u / E^s written in the orthonormal bases
    block_u: np.ndarray
    block_s: np.ndarray

    @property
    def dim_u(self) -> int:
        return self.basis_u.shape[1]

    @property
    def dim_s(self) -> int:
        return self.basis_s.shape[1]

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def residuals(self) -> dict[str, float]:
        A, Pu, Ps = self.matrix, self.proj_u, self.proj_s
        eye = np.eye(self.n)
        return {
            "sum": float(np.linalg.norm(Pu + Ps - eye, 2)),
            "product": float(np.linalg.norm(Pu @ Ps, 2)),
            "commute_u": float(np.linalg.norm(A @ Pu - Pu @ A, 2)),
            "commute_s": float(np.linalg.norm(A @ Ps - Ps @ A, 2)),
            "idempotent_u": float(np.linalg.norm(Pu @ Pu - Pu, 2)),
            "idempotent_s": float(np.linalg.norm(Ps @ Ps - Ps, 2)),
        }


def compute_splitting(A: IntegerMatrix, delta: float = 1e-9, tol_split: float = 1e-9) -> Splitting:
    report = check_hyperbolic(A, delta)
    if report.verdict != HYPERBOLIC:
        raise NotHyperbolicError(report)
    M = _as_float(A)
    n = len(M)
    Tu, Zu, dim_u = scipy.linalg.schur(M, output="real", sort="ouc")
    Ts, Zs, dim_s = scipy.linalg.schur(M, output="real", sort="iuc")
    if dim_u + dim_s != n:
        raise SpectralError(f"Schur reordering split {dim_u}+{dim_s} != {n}")
    U, S = Zu[:, :dim_u], Zs[:, :dim_s]
    basis = np.hstack([U, S])
    # coordinates of e_1..e_n in the (U | S) basis
    coords = np.linalg.solve(basis, np.eye(n))
    proj_u = U @ coords[:dim_u]
    proj_s = S @ coords[dim_u:]
    split = Splitting(M, U, S, proj_u, proj_s, Tu[:dim_u, :dim_u].copy(), Ts[:dim_s, :dim_s].copy())
    worst = max(split.residuals().values())
    if worst > tol_split:
        raise SpectralError(f"splitting residual {worst:.3e} exceeds tol_split={tol_split:.1e}")
    return split


def restricted_singular_values(S: Splitting, k: int) -> tuple[Optional[float], Optional[float]]:
    """(sigma_min of A^k on E^u, sigma_max of A^k on E^s); None for a trivial subspace."""
    smin = smax = None
    if S.dim_u:
        smin = float(np.linalg.svd(np.linalg.matrix_power(S.block_u, k), compute_uv=False)[-1])
    if S.dim_s:
        smax = float(np.linalg.svd(np.linalg.matrix_power(S.block_s, k), compute_uv=False)[0])
    return smin, smax


def find_k(A: IntegerMatrix, S: Splitting, cap: int = 64,
           slack: float = 1e-9) -> tuple[int, Optional[float], Optional[float]]:
    """Least k with A^k expanding on E^u and contracting on E^s; returns (k, theta_u, theta_s).

    theta is the midpoint between 1 and the restricted extreme singular value,
    so both inequalities hold strictly.  A singular value within ``slack`` of 1
    does not count: [[-2, -2], [-5, -2]] has sigma_min exactly 1, which rounds
    either way in floating point.
    """
    history = []
    for k in range(1, cap + 1):
        smin, smax = restricted_singular_values(S, k)
        history.append((k, smin, smax))
        if (smin is None or smin > 1 + slack) and (smax is None or smax < 1 - slack):
            theta_u = None if smin is None else (1 + smin) / 2
            theta_s = None if smax is None else (1 + smax) / 2
            return k, theta_u, theta_s
    tail = ", ".join(f"k={k}: smin={a}, smax={b}" for k, a, b in history[-3:])
    raise KSearchError(f"no expanding/contracting power up to k={cap} ({tail})")


def operator_norm(Ak) -> float:
    """Largest singular value."""
    M = np.atleast_2d(np.asarray(Ak, dtype=float))
    return float(np.linalg.svd(M, compute_uv=False)[0])


COMPUTED = "computed"
EMPIRICAL = "empirical"
USER_SUPPLIED = "user_supplied"
UNRESOLVED = "unresolved"
ABSENT = "absent"


@dataclass(frozen=True)
class ConstantsBundle:
    n: int
    ell: int
    k: int
    theta_u: Optional[float]
    theta_s: Optional[float]
    N: int
    alpha: float
    norm_Ak: float
    C_k: float
    eta: float
    eta1: Optional[float] = None
    eps0: Optional[float] = None
    eps1: Optional[float] = None
    eps: Optional[float] = None
    provenance: Mapping[str, str] = field(default_factory=dict)

    @property
    def expansion_margin(self) -> float:
        """min over defined members of {theta_u - 1, 1 - theta_s}."""
        vals = []
        if self.theta_u is not None:
            vals.append(self.theta_u - 1)
        if self.theta_s is not None:
            vals.append(1 - self.theta_s)
        return min(vals)

    @property
    def drift(self) -> float:
        """2 eta sqrt(n ell) (2 C_k + 1), the slack in the maximal-displacement step."""
        return 2 * self.eta * math.sqrt(self.n * self.ell) * (2 * self.C_k + 1)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["provenance"] = dict(sorted(self.provenance.items()))
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def compute_constants(
    A: IntegerMatrix,
    S: Splitting,
    n: Optional[int] = None,
    ell: int = 1,
    alpha: float = 0.25,
    overrides: Optional[Mapping[str, float]] = None,
    estimators: Optional[Mapping[str, Callable[[dict], tuple[float, str]]]] = None,
    partial: bool = False,
    k_cap: int = 64,
) -> ConstantsBundle:
    """Run the constant pipeline.

    ``overrides`` may fix eta1/eps0/eps1 (tagged user_supplied).  Otherwise
    ``estimators`` maps the same names to callables taking a context dict
    (eta, k, N, n, ell) and returning ``(value, tag)``.  With ``partial=True`` missing ones are left unresolved.
    """
    if not 0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    n = A.n if n is None else n
    if n != A.n:
        raise ValueError(f"n={n} does not match matrix dimension {A.n}")
    k, theta_u, theta_s = find_k(A, S, cap=k_cap)
    Ak = A.power(k)
    N = max(sum(abs(x) for x in row) for row in Ak) + 1
    norm_Ak = operator_norm(Ak)
    C_k = (norm_Ak + alpha) / (1 - 2 * alpha)
    margin = min(v for v in (None if theta_u is None else theta_u - 1,
                             None if theta_s is None else 1 - theta_s) if v is not None)
    root = math.sqrt(n * ell)
    eta_sup = min(alpha / root, margin / (2 * root * (2 * C_k + 1)))
    eta = eta_sup / 2

    overrides = dict(overrides or {})
    estimators = dict(estimators or {})
    values: dict[str, Optional[float]] = {}
    provenance = {"k": COMPUTED, "N": COMPUTED, "alpha": USER_SUPPLIED, "C_k": COMPUTED, "eta": COMPUTED,
                  "theta_u": COMPUTED if theta_u is not None else ABSENT,
                  "theta_s": COMPUTED if theta_s is not None else ABSENT}
    for name in ("eta1", "eps0", "eps1"):
        if overrides.get(name) is not None:
            values[name] = float(overrides[name])
            provenance[name] = USER_SUPPLIED
        elif name in estimators:
            value, tag = estimators[name]({"eta": eta, "k": k, "N": N, "n": n, "ell": ell})
            values[name] = float(value)
            provenance[name] = tag
        elif partial:
            values[name] = None
            provenance[name] = UNRESOLVED
        else:
            raise ValueError(f"{name} not supplied and no estimator attached")
    resolved = [v for v in values.values() if v is not None]
    eps = min(resolved) if len(resolved) == 3 else None
    provenance["eps"] = COMPUTED if eps is not None else UNRESOLVED
    return ConstantsBundle(n=n, ell=ell, k=k, theta_u=theta_u, theta_s=theta_s, N=N, alpha=alpha,
                           norm_Ak=norm_Ak, C_k=C_k, eta=eta, eps=eps, provenance=provenance, **values)
