"""Exact arithmetic in the abelian-by-cyclic groups Gamma_A.

Gamma_A = < a, b_1..b_n | b_i b_j = b_j b_i,  a b_i a^-1 = prod_j b_j^A[i][j] >

Elements are stored in semidirect-product normal form ``(shift, translation)``
where ``shift`` is the exponent of ``a`` and ``translation`` lives in the
direct-limit module Z[1/det A]^n inside Q^n.  The product is

    (k1, w1) * (k2, w2) = (k1 + k2, w1 + B^k1 w2),     B = transpose(A).

The transpose is forced by the relation: conjugating b_i by a must produce the
translation whose coordinates are *row* i of A, i.e. B e_i.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, lcm
from typing import Sequence

__all__ = [
    "DimensionError",
    "IntegerMatrix",
    "GroupElement",
    "Word",
    "multiply",
    "from_word",
    "to_word",
    "conjugate_power",
    "is_identity",
    "relators",
]


class DimensionError(ValueError):
    """Elements or letters that do not belong to the same Gamma_A."""


FracMatrix = tuple[tuple[Fraction, ...], ...]


def _matmul(X: Sequence[Sequence], Y: Sequence[Sequence]) -> tuple:
    return tuple(
        tuple(sum(X[i][t] * Y[t][j] for t in range(len(Y))) for j in range(len(Y[0])))
        for i in range(len(X))
    )


def _eye(n: int, one=1) -> tuple:
    return tuple(tuple(one if i == j else 0 * one for j in range(n)) for i in range(n))


def _matpow(M: Sequence[Sequence], k: int, one=1) -> tuple:
    result = _eye(len(M), one)
    base = tuple(tuple(r) for r in M)
    while k:
        if k & 1:
            result = _matmul(result, base)
        base = _matmul(base, base)
        k >>= 1
    return result


def _frac_inverse(M: Sequence[Sequence[int]]) -> FracMatrix:
    """Gauss-Jordan inverse over Q."""
    n = len(M)
    aug = [[Fraction(M[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                c = aug[r][col]
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def _bareiss_det(M: Sequence[Sequence[int]]) -> int:
    n = len(M)
    a = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class IntegerMatrix:
    """Non-singular square integer matrix, row-major."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise DimensionError("matrix must be square and non-empty")
        object.__setattr__(self, "entries", rows)
        if _bareiss_det(rows) == 0:
            raise ValueError("matrix is singular")

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def det(self) -> int:
        return _bareiss_det(self.entries)

    def power(self, k: int) -> tuple[tuple[int, ...], ...]:
        """Exact A^k for k >= 0."""
        if k < 0:
            raise ValueError("use transpose_power for negative exponents")
        return _matpow(self.entries, k)

    def transpose_power(self, k: int) -> FracMatrix:
        """Exact B^k, B = A^T, any integer k."""
        return _transpose_power(self.entries, k)

    def to_text(self) -> str:
        lines = [str(self.n)] + [" ".join(str(x) for x in row) for row in self.entries]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntegerMatrix":
        tokens = text.split()
        if not tokens:
            raise ValueError("empty matrix text")
        n = int(tokens[0])
        body = [int(t) for t in tokens[1:]]
        if n < 1 or len(body) != n * n:
            raise ValueError(f"expected {n * n} entries after the dimension, got {len(body)}")
        return cls(tuple(tuple(body[i * n:(i + 1) * n]) for i in range(n)))

    @classmethod
    def read(cls, path) -> "IntegerMatrix":
        with open(path) as fh:
            return cls.from_text(fh.read())

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


@lru_cache(maxsize=4096)
def _transpose_power(entries: tuple, k: int) -> FracMatrix:
    B = tuple(zip(*entries))
    if k >= 0:
        P = _matpow(B, k)
        return tuple(tuple(Fraction(x) for x in row) for row in P)
    return _matpow(_frac_inverse(B), -k, Fraction(1))


def _apply(M: FracMatrix, w: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((M[i][j] * w[j] for j in range(len(w))), Fraction(0)) for i in range(len(M)))


@dataclass(frozen=True)
class GroupElement:
    """An element (shift, translation) of Gamma_A."""

    matrix: IntegerMatrix
    shift: int
    translation: tuple[Fraction, ...]

    def __post_init__(self):
        t = tuple(Fraction(x) for x in self.translation)
        if len(t) != self.matrix.n:
            raise DimensionError(f"translation has length {len(t)}, expected {self.matrix.n}")
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "shift", int(self.shift))

    @classmethod
    def identity(cls, A: IntegerMatrix) -> "GroupElement":
        return cls(A, 0, (0,) * A.n)

    @classmethod
    def a(cls, A: IntegerMatrix, power: int = 1) -> "GroupElement":
        return cls(A, power, (0,) * A.n)

    @classmethod
    def b(cls, A: IntegerMatrix, i: int, power: int = 1) -> "GroupElement":
        if not 1 <= i <= A.n:
            raise DimensionError(f"generator b{i} out of range for n={A.n}")
        return cls(A, 0, tuple(power if j == i - 1 else 0 for j in range(A.n)))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def inverse(self) -> "GroupElement":
        Bk = self.matrix.transpose_power(-self.shift)
        return GroupElement(self.matrix, -self.shift, tuple(-x for x in _apply(Bk, self.translation)))

    def __pow__(self, e: int) -> "GroupElement":
        base = self if e >= 0 else self.inverse()
        result = GroupElement.identity(self.matrix)
        for _ in range(abs(e)):
            result = result * base
        return result

    def is_identity(self) -> bool:
        return is_identity(self)

    def __str__(self) -> str:
        w = ", ".join(str(x) for x in self.translation)
        return f"({self.shift}, [{w}])"


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    """Product g*h in normal form."""
    if g.matrix != h.matrix:
        raise DimensionError("elements belong to different groups")
    Bk = g.matrix.transpose_power(g.shift)
    moved = _apply(Bk, h.translation)
    return GroupElement(g.matrix, g.shift + h.shift, tuple(x + y for x, y in zip(g.translation, moved)))


def is_identity(g: GroupElement) -> bool:
    return g.shift == 0 and all(x == 0 for x in g.translation)


_TOKEN = re.compile(r"^(a|b(\d*))(?:\^([+-]?\d+))?$")


@dataclass(frozen=True)
class Word:
    """Run-length encoded word; generator 0 is ``a``, generator i >= 1 is ``b_i``.

    Adjacent runs with the same generator are merged and zero exponents dropped
    on construction, so equal reduced words compare equal.
    """

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        stack: list[list[int]] = []
        for gen, exp in self.letters:
            gen, exp = int(gen), int(exp)
            if gen < 0:
                raise ValueError(f"bad generator index {gen}")
            if exp == 0:
                continue
            if stack and stack[-1][0] == gen:
                stack[-1][1] += exp
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([gen, exp])
        object.__setattr__(self, "letters", tuple((g, e) for g, e in stack))

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse tokens like ``a``, ``a^-1``, ``b1^3``, ``b2^-2``; bare ``b`` means ``b1``."""
        letters = []
        for tok in text.replace("*", " ").split():
            m = _TOKEN.match(tok)
            if m is None:
                raise ValueError(f"cannot parse token {tok!r}")
            gen = 0 if m.group(1) == "a" else int(m.group(2) or 1)
            if gen == 0 and m.group(1) != "a":
                raise ValueError(f"generator index must be >= 1 in {tok!r}")
            letters.append((gen, int(m.group(3) or 1)))
        return cls(tuple(letters))

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        out = []
        for g, e in self.letters:
            name = "a" if g == 0 else f"b{g}"
            out.append(name if e == 1 else f"{name}^{e}")
        return " ".join(out)


def from_word(w: Word | str, A: IntegerMatrix) -> GroupElement:
    """Evaluate a word in Gamma_A."""
    if isinstance(w, str):
        w = Word.parse(w)
    result = GroupElement.identity(A)
    for gen, exp in w.letters:
        if gen == 0:
            letter = GroupElement.a(A, exp)
        elif gen <= A.n:
            letter = GroupElement.b(A, gen, exp)
        else:
            raise DimensionError(f"generator b{gen} out of range for n={A.n}")
        result = result * letter
    return result


def to_word(g: GroupElement) -> Word:
    """Canonical word a^-m (prod_j b_j^u_j) a^(m+shift) with m >= 0 minimal."""
    A = g.matrix
    m = 0
    u = g.translation
    while any(x.denominator != 1 for x in u):
        m += 1
        u = _apply(A.transpose_power(m), g.translation)
    letters = [(0, -m)]
    letters += [(j + 1, int(x)) for j, x in enumerate(u)]
    letters.append((0, m + g.shift))
    return Word(tuple(letters))


def conjugate_power(A: IntegerMatrix, i: int, k: int) -> tuple[int, ...]:
    """Exponents of a^k b_i a^-k in the b_j, i.e. row i of A^k (1-based i)."""
    if not 1 <= i <= A.n:
        raise DimensionError(f"generator index {i} out of range for n={A.n}")
    if k < 1:
        raise ValueError("k must be >= 1")
    return tuple(A.power(k)[i - 1])


def relators(A: IntegerMatrix) -> list[Word]:
    """Defining relators of Gamma_A as words that must evaluate to the identity."""
    out = []
    n = A.n
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out.append(Word(((i, 1), (j, 1), (i, -1), (j, -1))))
    for i in range(1, n + 1):
        rhs = Word(tuple((j + 1, A.entries[i - 1][j]) for j in range(n)))
        out.append(Word(((0, 1), (i, 1), (0, -1))) + rhs.inverse())
    return out


def denominator_bound_ok(g: GroupElement) -> bool:
    """Every translation denominator divides some power of det(A)."""
    d = abs(g.matrix.det)
    den = lcm(*(x.denominator for x in g.translation)) if g.translation else 1
    while den > 1:
        c = gcd(den, d)
        if c == 1:
            return False
        den //= c
    return True


def words_equal(u: Word, v: Word, A: IntegerMatrix) -> bool:
    return is_identity(from_word(u + v.inverse(), A))


def random_word(rng, n: int, length: int, max_exp: int = 3) -> Word:
    """Random word with ``length`` runs; ``rng`` is a numpy Generator."""
    letters = []
    for _ in range(length):
        gen = int(rng.integers(0, n + 1))
        exp = int(rng.integers(1, max_exp + 1)) * (1 if rng.random() < 0.5 else -1)
        letters.append((gen, exp))
    return Word(tuple(letters))
