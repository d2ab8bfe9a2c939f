import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abcrigid.group import IntegerMatrix
from abcrigid.spectral import (
    COMPUTED,
    UNRESOLVED,
    USER_SUPPLIED,
    KSearchError,
    NotHyperbolicError,
    check_hyperbolic,
    compute_constants,
    compute_splitting,
    find_k,
    operator_norm,
)

from .oracles import integer_matrix_power, power_iteration_norm


def quadratic_moduli(rows):
    (a, b), (c, d) = rows
    tr, det = a + d, a * d - b * c
    disc = tr * tr - 4 * det
    if disc >= 0:
        r = math.sqrt(disc)
        return sorted([abs((tr + r) / 2), abs((tr - r) / 2)], reverse=True)
    return [math.sqrt(abs(det))] * 2


def test_eigen_moduli_2345(A2345):
    rep = check_hyperbolic(A2345)
    assert rep.verdict == "hyperbolic"
    assert rep.eigen_moduli == pytest.approx([7.274917217635375, 0.2749172176353749], abs=1e-12)
    assert rep.eigen_moduli == pytest.approx(quadratic_moduli(A2345.tolist()), abs=1e-9)


@pytest.mark.parametrize("rows", [((0, 1), (-1, 0)), ((0, 1), (2, 1)), ((1, 1), (0, 1)), ((-1,),)])
def test_unit_modulus(rows):
    A = IntegerMatrix(rows)
    assert check_hyperbolic(A).verdict == "has_unit_modulus"
    with pytest.raises(NotHyperbolicError) as err:
        compute_splitting(A)
    assert err.value.report.verdict == "has_unit_modulus"


def test_salem_factor_detected():
    # companion matrix of Lehmer's polynomial: two real roots off the circle, eight on it
    coeffs = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]
    n = 10
    rows = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        rows[i + 1][i] = 1
    for i in range(n):
        rows[i][n - 1] = -coeffs[n - i]
    A = IntegerMatrix(tuple(map(tuple, rows)))
    assert check_hyperbolic(A).verdict == "has_unit_modulus"


def test_delta_must_be_positive(A2345):
    with pytest.raises(ValueError):
        check_hyperbolic(A2345, delta=0)


def test_splitting_2345(A2345):
    S = compute_splitting(A2345)
    assert (S.dim_u, S.dim_s) == (1, 1)
    assert max(S.residuals().values()) < 1e-12
    assert find_k(A2345, S)[0] == 1


def random_hyperbolic(rng, n):
    while True:
        rows = rng.integers(-5, 6, size=(n, n))
        if abs(np.linalg.det(rows)) < 0.5:
            continue
        if np.min(np.abs(np.abs(np.linalg.eigvals(rows)) - 1)) > 0.05:
            return IntegerMatrix(tuple(tuple(int(x) for x in r) for r in rows))


def test_projectors_random(rng):
    for _ in range(100):
        A = random_hyperbolic(rng, int(rng.integers(1, 5)))
        S = compute_splitting(A)
        M = np.array(A.entries, dtype=float)
        scale = max(1.0, np.linalg.norm(M, 2)) * max(1.0, np.linalg.norm(S.proj_u, 2))
        for name, val in S.residuals().items():
            assert val < 1e-9 * scale, (A, name, val)
        # invariance of the bases
        for B in (S.basis_u, S.basis_s):
            if B.size:
                assert np.linalg.norm(M @ B - B @ (B.T @ M @ B)) < 1e-9 * scale


def test_sampled_expansion(rng):
    for _ in range(20):
        A = random_hyperbolic(rng, int(rng.integers(2, 5)))
        S = compute_splitting(A)
        C = compute_constants(A, S, partial=True)
        Ak = np.array(A.power(C.k), dtype=float)
        if S.dim_u:
            u = S.basis_u @ rng.normal(size=(S.dim_u, 1000))
            assert np.all(np.linalg.norm(Ak @ u, axis=0) > C.theta_u * np.linalg.norm(u, axis=0))
        if S.dim_s:
            s = S.basis_s @ rng.normal(size=(S.dim_s, 1000))
            assert np.all(np.linalg.norm(Ak @ s, axis=0) < C.theta_s * np.linalg.norm(s, axis=0))


def oracle_k(A, S, cap=64):
    """Least k via SVD of exact integer powers restricted with the orthonormal bases."""
    for k in range(1, cap + 1):
        Ak = np.array(integer_matrix_power(A.tolist(), k), dtype=float)
        ok = True
        if S.dim_u:
            ok &= np.linalg.svd(S.basis_u.T @ Ak @ S.basis_u, compute_uv=False)[-1] > 1
        if S.dim_s:
            ok &= np.linalg.svd(S.basis_s.T @ Ak @ S.basis_s, compute_uv=False)[0] < 1
        if ok:
            return k


@pytest.mark.parametrize("rows, k", [(((2, 10), (0, 3)), 3), (((1, 1), (1, 0)), 1), (((2,),), 1)])
def test_k_minimal(rows, k):
    A = IntegerMatrix(rows)
    S = compute_splitting(A)
    assert find_k(A, S)[0] == k == oracle_k(A, S)


def test_k_random_against_oracle(rng):
    for _ in range(30):
        A = random_hyperbolic(rng, int(rng.integers(2, 4)))
        S = compute_splitting(A)
        assert find_k(A, S)[0] == oracle_k(A, S)


def test_k_cap():
    A = IntegerMatrix(((2, 10), (0, 3)))
    with pytest.raises(KSearchError):
        find_k(A, compute_splitting(A), cap=2)


def test_operator_norm():
    assert operator_norm([[16, 21], [28, 37]]) == pytest.approx(53.385338679770996, rel=1e-14)
    M = [[3, -1, 2], [0, 4, 1], [5, 2, -2]]
    assert operator_norm(M) == pytest.approx(power_iteration_norm(M), rel=1e-12)


def test_constants_bs12(bs12):
    C = compute_constants(bs12, compute_splitting(bs12), alpha=0.25, ell=1, partial=True)
    assert (C.k, C.theta_u, C.theta_s, C.C_k, C.N, C.eta) == (1, 1.5, None, 4.5, 3, 0.0125)
    assert C.provenance["eps"] == UNRESOLVED
    assert C.provenance["theta_s"] == "absent"


def test_constants_2345(A2345):
    S = compute_splitting(A2345)
    C = compute_constants(A2345, S, overrides={"eta1": 1e-3, "eps0": 2e-3, "eps1": 5e-4})
    assert C.N == 10 and C.k == 1
    assert C.eps == 5e-4
    assert C.provenance["eps0"] == USER_SUPPLIED and C.provenance["eps"] == COMPUTED
    lam_u = (7 + math.sqrt(57)) / 2
    assert C.theta_u == pytest.approx((1 + lam_u) / 2, rel=1e-12)
    assert C.norm_Ak == pytest.approx(power_iteration_norm(A2345.tolist()), rel=1e-12)


def test_constants_need_estimates(bs12):
    with pytest.raises(ValueError):
        compute_constants(bs12, compute_splitting(bs12))


def test_estimator_context(bs12):
    seen = {}

    def est(ctx):
        seen.update(ctx)
        return 0.5 * ctx["eta"], "empirical"

    C = compute_constants(bs12, compute_splitting(bs12), estimators={"eta1": est, "eps0": est, "eps1": est})
    assert seen == {"eta": 0.0125, "k": 1, "N": 3, "n": 1, "ell": 1}
    assert C.eps == 0.00625 and C.provenance["eps1"] == "empirical"


@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.6, -0.1])
def test_alpha_range(bs12, alpha):
    with pytest.raises(ValueError):
        compute_constants(bs12, compute_splitting(bs12), alpha=alpha, partial=True)


@settings(max_examples=60, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5),
       st.floats(0.01, 0.49), st.integers(1, 3))
def test_constant_invariants(a, b, c, d, alpha, ell):
    if a * d - b * c == 0:
        return
    A = IntegerMatrix(((a, b), (c, d)))
    if check_hyperbolic(A).verdict != "hyperbolic":
        return
    S = compute_splitting(A)
    C = compute_constants(A, S, alpha=alpha, ell=ell, partial=True)
    assert C.eta > 0 and C.C_k > C.norm_Ak
    assert C.eta * math.sqrt(2 * ell) < alpha
    assert C.drift < C.expansion_margin
    if C.theta_u is not None:
        assert C.theta_u > 1 and C.theta_u - C.drift > 1
    if C.theta_s is not None:
        assert C.theta_s < 1 and C.theta_s + C.drift < 1
    assert C.N == max(abs(a0) + abs(b0) for a0, b0 in A.power(C.k)) + 1
    assert C.digest() == compute_constants(A, S, alpha=alpha, ell=ell, partial=True).digest()


def test_borderline_singular_value_skipped():
    # sigma_min(A) = 1 exactly; k = 1 would give theta_u = 1 and eta = 0
    A = IntegerMatrix(((-2, -2), (-5, -2)))
    S = compute_splitting(A)
    k, theta_u, _ = find_k(A, S)
    assert k == 2 and theta_u > 1
