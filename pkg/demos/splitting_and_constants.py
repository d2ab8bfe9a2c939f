"""Hyperbolic splitting and the constant bundle for a few matrices."""
import numpy as np

from abcrigid.group import IntegerMatrix
from abcrigid.spectral import NotHyperbolicError, check_hyperbolic, compute_constants, compute_splitting

for rows in [((2,),), ((2, 3), (4, 5)), ((2, 10), (0, 3)), ((0, 1), (-1, 0))]:
    A = IntegerMatrix(rows)
    rep = check_hyperbolic(A)
    print(f"A = {rows}: moduli {np.round(rep.eigen_moduli, 6).tolist()}, verdict {rep.verdict}")
    try:
        S = compute_splitting(A)
    except NotHyperbolicError:
        print("  no splitting\n")
        continue
    C = compute_constants(A, S, partial=True)
    print(f"  dim E^u = {S.dim_u}, dim E^s = {S.dim_s}, worst projector residual "
          f"{max(S.residuals().values()):.1e}")
    print(f"  k = {C.k}, theta_u = {C.theta_u}, theta_s = {C.theta_s}, N = {C.N}")
    print(f"  C_k = {C.C_k:.6g}, eta = {C.eta:.6g}, unresolved: "
          f"{[k for k, v in C.provenance.items() if v == 'unresolved']}\n")

# [[2, 10], [0, 3]] needs k = 3: its large off-diagonal entry makes A and A^2
# shrink some unstable vectors before the eigenvalues take over.
