"""One-dimensional manifolds, C^1 maps with derivatives, and Gamma_A actions.

Points are chart coordinates (floats or numpy arrays).  On the circle the
chart has period 1, maps are lifts with h(x + 1) = h(x) + 1, and the
embedding into R^2 is x -> (cos 2 pi x, sin 2 pi x).  All displacements and
C^1 distances are measured in the embedding, so on the circle the
displacement of x by h is a chord, not an arc.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .group import IntegerMatrix

__all__ = [
    "DomainError",
    "ChartEscapeError",
    "EmbeddedManifold1D",
    "SmoothMap",
    "ActionInstance",
    "DisplacementMatrix",
    "identity_map",
    "compose",
    "iterate",
    "c1_distance_to_identity",
    "c1_distance",
    "displacement_matrix",
    "displacement_field",
    "make_trivial_perturbed",
    "make_navas_action",
    "make_affine_on_chart",
    "orbit",
    "row_bound_stats",
]


class DomainError(ValueError):
    pass


class ChartEscapeError(DomainError):
    pass


@dataclass(frozen=True)
class EmbeddedManifold1D:
    kind: str = "interval"
    lo: float = 0.0
    hi: float = 1.0
    grid_resolution: int = 4096

    def __post_init__(self):
        if self.kind not in ("interval", "circle"):
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        if self.kind == "circle" and (self.lo, self.hi) != (0.0, 1.0):
            raise ValueError("the circle chart is fixed to [0, 1)")
        if not self.lo < self.hi:
            raise ValueError("need lo < hi")
        if self.grid_resolution < 2:
            raise ValueError("grid_resolution must be >= 2")

    @classmethod
    def circle(cls, grid_resolution: int = 4096) -> "EmbeddedManifold1D":
        return cls("circle", 0.0, 1.0, grid_resolution)

    @classmethod
    def interval(cls, lo: float = 0.0, hi: float = 1.0, grid_resolution: int = 4096) -> "EmbeddedManifold1D":
        return cls("interval", float(lo), float(hi), grid_resolution)

    @property
    def ell(self) -> int:
        return 1 if self.kind == "interval" else 2

    @property
    def chart_radius(self) -> float:
        return self.hi - self.lo if self.kind == "interval" else 0.5

    def with_resolution(self, grid_resolution: int) -> "EmbeddedManifold1D":
        return EmbeddedManifold1D(self.kind, self.lo, self.hi, grid_resolution)

    def grid(self, resolution: Optional[int] = None) -> np.ndarray:
        res = resolution or self.grid_resolution
        if self.kind == "interval":
            return np.linspace(self.lo, self.hi, res)
        return np.arange(res) / res

    def embed(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "interval":
            return x[..., None]
        t = 2 * np.pi * x
        return np.stack([np.cos(t), np.sin(t)], axis=-1)

    def unit_tangent(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "interval":
            return np.ones(x.shape + (1,))
        t = 2 * np.pi * x
        return np.stack([-np.sin(t), np.cos(t)], axis=-1)

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "circle":
            return np.isfinite(x)
        return (x >= self.lo - tol) & (x <= self.hi + tol)


@dataclass(frozen=True, eq=False)
class SmoothMap:
    """Orientation-preserving C^1 map given in chart coordinates.

    ``domain`` restricts where ``func`` may be evaluated; leaving it raises
    :class:`ChartEscapeError`.  ``inv`` is an optional closed-form inverse
    (itself a SmoothMap); without it the inverse is found by bisection.
    """

    func: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    name: str = "h"
    domain: Optional[tuple[float, float]] = None
    inv: Optional["SmoothMap"] = None
    meta: dict = field(default_factory=dict)

    def _check(self, x: np.ndarray) -> None:
        if self.domain is None:
            return
        lo, hi = self.domain
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        bad = (x < lo - tol) | (x > hi + tol)
        if np.any(bad):
            where = float(np.asarray(x)[bad].ravel()[0])
            raise ChartEscapeError(f"{self.name} evaluated at x={where!r} outside [{lo}, {hi}]")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        self._check(x)
        return self.func(x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        self._check(x)
        return self.deriv(x)

    def inverse(self) -> "SmoothMap":
        if self.inv is not None:
            return self.inv
        fwd = self

        def solve(y):
            y = np.asarray(y, dtype=float)
            lo, hi = y - 2.0, y + 2.0
            if fwd.domain is not None:
                lo = np.maximum(lo, fwd.domain[0])
                hi = np.minimum(hi, fwd.domain[1])
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                below = fwd.func(mid) < y
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            return 0.5 * (lo + hi)

        return SmoothMap(solve, lambda y: 1.0 / fwd.deriv(solve(y)), name=f"{self.name}^-1", inv=self)


def identity_map() -> SmoothMap:
    m = SmoothMap(lambda x: x + 0.0, lambda x: np.ones_like(x), name="id")
    object.__setattr__(m, "inv", m)
    return m


def compose(*maps: SmoothMap) -> SmoothMap:
    """compose(f, g, h)(x) = f(g(h(x))); domains are checked at every step."""
    if not maps:
        return identity_map()
    if len(maps) == 1:
        return maps[0]
    seq = list(maps)

    def func(x):
        for m in reversed(seq):
            x = m(x)
        return x

    def deriv(x):
        d = np.ones_like(np.asarray(x, dtype=float))
        for m in reversed(seq):
            d = d * m.derivative(x)
            x = m(x)
        return d

    name = "∘".join(m.name for m in seq)
    out = SmoothMap(func, deriv, name=name)
    if all(m.inv is not None for m in seq):
        inv = SmoothMap(lambda y: _apply_seq([m.inv for m in seq], y),
                        lambda y: _deriv_seq([m.inv for m in seq], y),
                        name=f"({name})^-1", inv=out)
        object.__setattr__(out, "inv", inv)
    return out


def _apply_seq(seq: Sequence[SmoothMap], x):
    for m in seq:
        x = m(x)
    return x


def _deriv_seq(seq: Sequence[SmoothMap], x):
    d = np.ones_like(np.asarray(x, dtype=float))
    for m in seq:
        d = d * m.derivative(x)
        x = m(x)
    return d


def iterate(h: SmoothMap, k: int) -> SmoothMap:
    """h^k for any integer k."""
    if k == 0:
        return identity_map()
    base = h if k > 0 else h.inverse()
    out = compose(*([base] * abs(k)))
    if abs(k) > 1:
        object.__setattr__(out, "name", f"{h.name}^{k}")
    return out


# ---------------------------------------------------------------------------
# C^1 distances


def _c1_terms(h: SmoothMap, g: SmoothMap, m: EmbeddedManifold1D, xs) -> np.ndarray:
    hx, gx = h(xs), g(xs)
    pos = np.linalg.norm(m.embed(hx) - m.embed(gx), axis=-1)
    dh = h.derivative(xs)[..., None] * m.unit_tangent(hx)
    dg = g.derivative(xs)[..., None] * m.unit_tangent(gx)
    return pos + np.linalg.norm(dh - dg, axis=-1)


def c1_distance(h: SmoothMap, g: SmoothMap, m: EmbeddedManifold1D, grid: Optional[int] = None) -> float:
    """Grid value of sup_x ||h(x) - g(x)|| + ||D_x h - D_x g||.

    A lower bound for the true supremum that converges as the grid is refined.
    """
    return float(np.max(_c1_terms(h, g, m, m.grid(grid))))


def c1_distance_to_identity(h: SmoothMap, m: EmbeddedManifold1D, grid: Optional[int] = None) -> float:
    return c1_distance(h, identity_map(), m, grid)


def check_diffeomorphism(h: SmoothMap, m: EmbeddedManifold1D, *, partial: bool = False,
                         tol_map: float = 1e-9, fd_tol: float = 1e-5, grid: Optional[int] = None) -> None:
    """Raise DomainError unless h is an increasing C^1 self-map of m with a consistent derivative."""
    xs = m.grid(grid)
    if h.domain is not None:
        xs = xs[(xs >= h.domain[0]) & (xs <= h.domain[1])]
    hx, dx = h(xs), h.derivative(xs)
    if not np.all(np.isfinite(hx)) or not np.all(np.isfinite(dx)):
        raise DomainError(f"{h.name} is not finite on the grid")
    if np.any(dx <= 0) or np.any(np.diff(hx) <= 0):
        raise DomainError(f"{h.name} is not strictly increasing")
    if not partial:
        if m.kind == "interval":
            ends = np.array([m.lo, m.hi])
            if np.max(np.abs(h(ends) - ends)) > tol_map:
                raise DomainError(f"{h.name} does not map [{m.lo}, {m.hi}] onto itself")
        elif np.max(np.abs(h(xs + 1.0) - hx - 1.0)) > tol_map:
            raise DomainError(f"{h.name} is not a degree-one circle lift")
    step = 1e-6 * m.chart_radius
    lo_ok = xs - step >= (h.domain[0] if h.domain else -np.inf)
    hi_ok = xs + step <= (h.domain[1] if h.domain else np.inf)
    if m.kind == "interval":
        lo_ok &= xs - step >= m.lo
        hi_ok &= xs + step <= m.hi
    up = np.where(hi_ok, xs + step, xs)
    down = np.where(lo_ok, xs - step, xs)
    fd = (h(up) - h(down)) / (up - down)
    err = np.max(np.abs(fd - dx))
    if err > fd_tol:
        raise DomainError(f"{h.name}: derivative disagrees with finite differences by {err:.2e}")


# ---------------------------------------------------------------------------
# displacement matrices


class _RowBoundStats:
    """Running tally of max_i ||row_i|| <= sqrt(ell) max_j ||col_j|| checks."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.checked = 0
        self.violations = 0

    def record(self, D: np.ndarray) -> None:
        D = np.asarray(D, dtype=float)
        if D.ndim == 2:
            D = D[None]
        ell = D.shape[-1]
        rows = np.max(np.linalg.norm(D, axis=2), axis=1)
        cols = np.max(np.linalg.norm(D, axis=1), axis=1)
        bound = math.sqrt(ell) * cols
        self.checked += len(D)
        self.violations += int(np.sum(rows > bound * (1 + 1e-12) + 1e-300))


row_bound_stats = _RowBoundStats()


@dataclass(frozen=True, eq=False)
class DisplacementMatrix:
    """n x ell matrix whose row i is g_i(x) - x in the embedding."""

    entries: np.ndarray
    base_point: float

    @property
    def row_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, axis=1)

    @property
    def col_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, axis=0)

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def row_bound_holds(self) -> bool:
        ell = self.entries.shape[1]
        return bool(self.row_norms.max() <= math.sqrt(ell) * self.col_norms.max() * (1 + 1e-12))

    def is_zero(self) -> bool:
        return not np.any(self.entries)


# ---------------------------------------------------------------------------
# actions


@dataclass(frozen=True, eq=False)
class ActionInstance:
    """rho(a) = f and rho(b_i) = g[i-1] acting on ``manifold``.

    ``partial`` marks actions whose maps are only defined near the chart (germs
    or affine charts): they are not self-maps of the manifold, and points may
    leave the chart as long as every map stays inside its own domain.
    """

    A: IntegerMatrix
    manifold: EmbeddedManifold1D
    f: SmoothMap
    g: tuple[SmoothMap, ...]
    partial: bool = False
    name: str = "action"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(self.g))
        if len(self.g) != self.A.n:
            raise ValueError(f"need {self.A.n} maps g_i, got {len(self.g)}")

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def ell(self) -> int:
        return self.manifold.ell

    def relation_maps(self, i: int) -> tuple[SmoothMap, SmoothMap]:
        """(f g_i f^-1, prod_j g_j^A[i][j]) for 0-based i."""
        lhs = compose(self.f, self.g[i], self.f.inverse())
        row = self.A.entries[i]
        rhs = compose(*[iterate(self.g[j], row[j]) for j in range(self.n) if row[j]])
        return lhs, rhs

    def relation_residual_field(self, xs=None) -> np.ndarray:
        """||f g_i f^-1 (x) - prod_j g_j^A_ij (x)|| on xs, shape (n, len(xs))."""
        xs = self.manifold.grid() if xs is None else np.asarray(xs, dtype=float)
        m = self.manifold
        out = []
        for i in range(self.n):
            lhs, rhs = self.relation_maps(i)
            try:
                diff = m.embed(lhs(xs)) - m.embed(rhs(xs))
            except ChartEscapeError as exc:
                raise ChartEscapeError(f"relation {i + 1} ({lhs.name} vs {rhs.name}): {exc}") from exc
            out.append(np.linalg.norm(diff, axis=-1))
        return np.array(out)

    def relation_residuals(self, xs=None) -> list[float]:
        """Sup over xs of the relation residual, one value per generator b_i."""
        return [float(r.max()) for r in self.relation_residual_field(xs)]

    def commutator_residual(self, xs=None) -> float:
        xs = self.manifold.grid() if xs is None else np.asarray(xs, dtype=float)
        m = self.manifold
        worst = 0.0
        for i in range(self.n):
            for j in range(i + 1, self.n):
                d = m.embed(self.g[i](self.g[j](xs))) - m.embed(self.g[j](self.g[i](xs)))
                worst = max(worst, float(np.max(np.linalg.norm(d, axis=-1))))
        return worst

    def validate(self, tol_rel: float = 1e-8, xs=None) -> None:
        res = self.relation_residuals(xs)
        if max(res) > tol_rel:
            raise DomainError(f"{self.name}: relation residuals {res} exceed tol_rel={tol_rel}")
        com = self.commutator_residual(xs)
        if com > tol_rel:
            raise DomainError(f"{self.name}: commutator residual {com:.3e} exceeds tol_rel={tol_rel}")

    def generator_distances(self, grid: Optional[int] = None) -> dict[str, float]:
        out = {"f": c1_distance_to_identity(self.f, self.manifold, grid)}
        for i, g in enumerate(self.g, 1):
            out[f"g{i}"] = c1_distance_to_identity(g, self.manifold, grid)
        return out

    def distance_to_trivial(self, grid: Optional[int] = None) -> float:
        """d_C1(rho, id) over the generating set {a, b_1..b_n}."""
        return max(self.generator_distances(grid).values())


def displacement_field(act: ActionInstance, xs) -> np.ndarray:
    """D(x) for every x in xs, shape (len(xs), n, ell)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    m = act.manifold
    if not act.partial and not np.all(m.contains(xs, tol=1e-9)):
        raise DomainError("base point off the manifold")
    base = m.embed(xs)
    D = np.stack([m.embed(g(xs)) - base for g in act.g], axis=1)
    row_bound_stats.record(D)
    return D


def displacement_matrix(act: ActionInstance, x: float) -> DisplacementMatrix:
    return DisplacementMatrix(displacement_field(act, [x])[0], float(x))


def orbit(act: ActionInstance, x0: float, steps: int, stride: int) -> list[float]:
    """[x0, f^stride(x0), f^(2 stride)(x0), ...] with ``steps`` strides; negative stride walks backward."""
    if stride == 0:
        raise ValueError("stride must be non-zero")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    h = iterate(act.f, stride)
    pts = [float(x0)]
    for _ in range(steps):
        nxt = h(pts[-1])
        nxt = float(nxt)
        if not act.partial and not act.manifold.contains(nxt, tol=1e-9):
            raise ChartEscapeError(f"orbit left the manifold at {nxt!r}")
        pts.append(nxt)
    return pts


# ---------------------------------------------------------------------------
# map families


def translation(c: float, domain=None) -> SmoothMap:
    fwd = SmoothMap(lambda x: x + c, lambda x: np.ones_like(x), name=f"x+{c:g}", domain=domain)
    back = SmoothMap(lambda x: x - c, lambda x: np.ones_like(x), name=f"x-{c:g}", domain=domain, inv=fwd)
    object.__setattr__(fwd, "inv", back)
    return fwd


def scaling(lam: float, domain=None) -> SmoothMap:
    fwd = SmoothMap(lambda x: lam * x, lambda x: np.full_like(x, lam), name=f"{lam:g}x", domain=domain)
    back = SmoothMap(lambda x: x / lam, lambda x: np.full_like(x, 1 / lam), name=f"x/{lam:g}",
                     domain=domain, inv=fwd)
    object.__setattr__(fwd, "inv", back)
    return fwd


def sine_map(scale: float, phase: float, m: EmbeddedManifold1D) -> SmoothMap:
    """Boundary-fixing sinusoidal perturbation of the identity.

    circle:   x + scale * sin(2 pi (x + phase))
    interval: x + scale * L * (cos(2 pi phase) - cos(2 pi (t + phase))) / 2,  t = (x - lo) / L
    """
    if m.kind == "circle":
        w = 2 * np.pi
        return SmoothMap(lambda x: x + scale * np.sin(w * (x + phase)),
                         lambda x: 1 + scale * w * np.cos(w * (x + phase)),
                         name=f"sine({scale:g},{phase:g})")
    lo, L = m.lo, m.hi - m.lo
    c0 = np.cos(2 * np.pi * phase)
    return SmoothMap(
        lambda x: x + scale * L * (c0 - np.cos(2 * np.pi * ((x - lo) / L + phase))) / 2,
        lambda x: 1 + scale * np.pi * np.sin(2 * np.pi * ((x - lo) / L + phase)),
        name=f"sine({scale:g},{phase:g})")


def sine_family(scale: float, count: int, m: EmbeddedManifold1D) -> list[SmoothMap]:
    """``count`` sine maps with phases spread over half a period.

    On the circle with count=2 these are x + s sin(2 pi x) and x + s cos(2 pi x).
    """
    return [sine_map(scale, i / (2 * count), m) for i in range(count)]


def bump_map(center: float, width: float, amp: float) -> SmoothMap:
    """x + amp * beta((x - center) / width) with the C-infinity bump beta(s) = exp(1 - 1/(1 - s^2))."""

    def beta(s):
        inside = np.abs(s) < 1
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.exp(1 - 1 / (1 - s * s))
        return np.where(inside, val, 0.0)

    def dbeta(s):
        inside = np.abs(s) < 1
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            val = np.exp(1 - 1 / (1 - s * s)) * (-2 * s / (1 - s * s) ** 2)
        return np.where(inside, val, 0.0)

    return SmoothMap(lambda x: x + amp * beta((x - center) / width),
                     lambda x: 1 + amp / width * dbeta((x - center) / width),
                     name=f"bump({center:g},{width:g},{amp:g})")


def quadratic_map(c: float, m: EmbeddedManifold1D) -> SmoothMap:
    """x + c (x - lo)(hi - x) / L on an interval, fixing both ends; |c| < 1 keeps it a diffeomorphism."""
    lo, hi = m.lo, m.hi
    L = hi - lo
    return SmoothMap(lambda x: x + c * (x - lo) * (hi - x) / L,
                     lambda x: 1 + c * (hi + lo - 2 * x) / L,
                     name=f"quad({c:g})")


def random_small_map(rng: np.random.Generator, size: float, m: EmbeddedManifold1D) -> SmoothMap:
    """A random boundary-respecting map with amplitude drawn from (-size, size)."""
    amp = float(rng.uniform(-size, size))
    if m.kind == "interval" and rng.random() < 0.5:
        return quadratic_map(amp, m)
    return sine_map(amp, float(rng.random()), m)


def _navas_maps(lam: float, v: float):
    log_lam = math.log(lam)

    def F(x):
        return x / (1 + x * log_lam)

    def dF(x):
        return 1 / (1 + x * log_lam) ** 2

    def Finv(y):
        return y / (1 - y * log_lam)

    def dFinv(y):
        return 1 / (1 - y * log_lam) ** 2

    def _tail(x, sign):
        # sign * v * exp(-1/x), with the x = 0 limit 0
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.where(x > 0, sign * v * np.exp(-1 / np.where(x > 0, x, 1.0)), 0.0)

    def _g(x, sign):
        return x / (1 + x * np.log1p(_tail(x, sign)))

    def _dg(x, sign):
        gx = _g(x, sign)
        ratio = np.where(x > 0, gx / np.where(x > 0, x, 1.0), 1.0)
        return ratio ** 2 / (1 + _tail(x, sign))

    fmap = SmoothMap(F, dF, name="F", domain=(0.0, math.inf))
    finv = SmoothMap(Finv, dFinv, name="F^-1", domain=(0.0, (1 - 1e-12) / log_lam), inv=fmap)
    object.__setattr__(fmap, "inv", finv)
    ginv_hi = math.inf if v <= 1 else (1 - 1e-12) / math.log(v)
    gmap = SmoothMap(lambda x: _g(x, 1.0), lambda x: _dg(x, 1.0), name="G", domain=(0.0, math.inf))
    ginv = SmoothMap(lambda x: _g(x, -1.0), lambda x: _dg(x, -1.0), name="G^-1",
                     domain=(0.0, ginv_hi), inv=gmap)
    object.__setattr__(gmap, "inv", ginv)
    return fmap, gmap


def navas_conjugate(lam: float, v: float) -> tuple[SmoothMap, SmoothMap]:
    """(F, G): y -> lam y and y -> y + v conjugated by phi(x) = exp(1/x)."""
    if lam <= 1:
        raise ValueError("lambda must exceed 1")
    if v <= 0:
        raise ValueError("v must be positive")
    return _navas_maps(lam, v)


def make_trivial_perturbed(A: IntegerMatrix, m: EmbeddedManifold1D, f: Optional[SmoothMap] = None,
                           check: bool = True) -> ActionInstance:
    """rho(a) = f, rho(b_i) = id: satisfies every relation for any diffeomorphism f."""
    f = identity_map() if f is None else f
    if check:
        check_diffeomorphism(f, m)
    return ActionInstance(A, m, f, tuple(identity_map() for _ in range(A.n)), name="trivial_perturbed",
                          params={"f": f.name})


def make_navas_action(A: IntegerMatrix | int = 2, lam: Optional[float] = None, v: float = 1.0,
                      x_max: float = 0.9, grid_resolution: int = 4096, tol_rel: float = 1e-8,
                      validate: bool = True) -> ActionInstance:
    """The affine action of BS(1, n) conjugated by exp(1/x), living on [0, x_max]."""
    if isinstance(A, int):
        A = IntegerMatrix(((A,),))
    if A.n != 1 or A.entries[0][0] < 2:
        raise ValueError("Navas family needs A = [n] with n >= 2")
    n = A.entries[0][0]
    lam = float(n) if lam is None else float(lam)
    if not 0 < x_max < 1:
        raise ValueError("x_max must lie in (0, 1)")
    F, G = navas_conjugate(lam, v)
    m = EmbeddedManifold1D.interval(0.0, x_max, grid_resolution)
    act = ActionInstance(A, m, F, (G,), partial=True, name="navas",
                         params={"lambda": lam, "v": v, "x_max": x_max})
    if validate:
        act.validate(tol_rel)
    return act


def make_affine_on_chart(lam: float, shifts: Sequence[float], chart: tuple[float, float] = (0.0, 1.0),
                         A: Optional[IntegerMatrix] = None, working: Optional[tuple[float, float]] = None,
                         grid_resolution: int = 4096, tol_rel: float = 1e-8) -> ActionInstance:
    """x -> lam x and x -> x + v_i on a chart; requires A v = lam v.

    ``working`` bounds where the maps may be evaluated; any composition leaving
    it raises ChartEscapeError.  Without it the maps are defined on all of R.
    """
    shifts = [float(s) for s in shifts]
    if A is None:
        if len(shifts) != 1 or float(lam) != round(lam):
            raise ValueError("pass A explicitly unless lambda is an integer and n = 1")
        A = IntegerMatrix(((int(round(lam)),),))
    Av = np.array(A.entries, dtype=float) @ np.array(shifts)
    if np.max(np.abs(Av - lam * np.array(shifts))) > tol_rel * max(1.0, np.max(np.abs(Av))):
        raise ValueError("shifts must form an eigenvector of A for eigenvalue lambda")
    if working is not None and not (working[0] <= chart[0] and chart[1] <= working[1]):
        raise ValueError("working interval must contain the chart")
    m = EmbeddedManifold1D.interval(chart[0], chart[1], grid_resolution)
    f = scaling(lam, working)
    g = tuple(translation(c, working) for c in shifts)
    for i, gi in enumerate(g, 1):
        object.__setattr__(gi, "name", f"g{i}")
        object.__setattr__(gi.inv, "name", f"g{i}^-1")
    act = ActionInstance(A, m, f, g, partial=True, name="affine",
                         params={"lambda": lam, "shifts": shifts, "chart": list(chart),
                                 "working": None if working is None else list(working)})
    act.validate(tol_rel)
    return act


def make_broken_fixture(m: Optional[EmbeddedManifold1D] = None, center: float = 0.5, width: float = 0.1,
                        amp: float = 1e-4, f: Optional[SmoothMap] = None) -> ActionInstance:
    """Deliberately *not* an action of BS(1,2): f = id and g a small bump, so f g f^-1 = g != g^2."""
    m = m or EmbeddedManifold1D.interval()
    A = IntegerMatrix(((2,),))
    return ActionInstance(A, m, identity_map() if f is None else f, (bump_map(center, width, amp),),
                          name="broken", params={"center": center, "width": width, "amp": amp})
