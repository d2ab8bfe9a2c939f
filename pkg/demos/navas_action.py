"""The affine action of BS(1, 2) conjugated by exp(1/x) near 0."""
import numpy as np

from abcrigid.dynamics import c1_distance_to_identity, make_navas_action

act = make_navas_action(2, x_max=0.9)
F, G = act.f, act.g[0]

xs = np.array([1e-3, 0.05, 0.2, 0.5, 0.9])
print("x        F(x)        G(x)")
for x in xs:
    print(f"{x:<8g} {float(F(x)):.8f}  {float(G(x)):.8f}")

for h in (1e-4, 1e-6):
    print(f"slopes at {h:g}: F {float(F(h)) / h:.7f}  G {float(G(h)) / h:.7f}")

print("sup |F G F^-1 - G^2| on [0.05, 0.9]:", act.relation_residuals(np.linspace(0.05, 0.9, 2000))[0])

# tangent to the identity at 0, but far from it across the chart
for cut in (0.05, 0.2, 0.9):
    shrunk = make_navas_action(2, x_max=cut)
    print(f"on [0, {cut}]: d(F, id) = {c1_distance_to_identity(shrunk.f, shrunk.manifold):.4f}, "
          f"d(G, id) = {c1_distance_to_identity(shrunk.g[0], shrunk.manifold):.4f}")
