"""Audits and the maximal-displacement sweep on three families.

A trivial perturbation has nothing to find.  The affine action of BS(1, 2) is
far from the identity, so its failures are attributed to the hypotheses.  The
broken fixture is small but not an action, and the sweep flags it.
"""
import numpy as np

from abcrigid.dynamics import EmbeddedManifold1D, make_affine_on_chart, make_broken_fixture, \
    make_trivial_perturbed, quadratic_map
from abcrigid.group import IntegerMatrix
from abcrigid.verify import audit_lemma_Ck, audit_lemma_hyp, constants_for_action, rigidity_sweep

I = EmbeddedManifold1D.interval()
families = {
    "trivial": make_trivial_perturbed(IntegerMatrix(((2,),)), I, quadratic_map(1e-3, I)),
    "affine": make_affine_on_chart(2.0, [1.0]),
    "broken": make_broken_fixture(),
}

for name, act in families.items():
    S, C = constants_for_action(act)
    rep = rigidity_sweep(act, C, S)
    h = rep.hypotheses
    print(f"{name}: eps = {C.eps:.3g} ({C.provenance['eps0']}/{C.provenance['eps1']} estimates)")
    print(f"  d(f,id) = {h.d_f:.3g}, d(f^k,id) = {h.d_fk:.3g}, d(g,id) = {max(h.d_g):.3g}, hypotheses hold: {h.holds}")
    print(f"  sup displacement {rep.sup:.3g} at x = {rep.z:.4f} ({rep.component}), verdict {rep.verdict}")
    if rep.record is not None and rep.sup:
        print(f"  predicted {rep.record.lhs:.4g} vs measured {rep.record.bound:.4g} one stride away")
    pts = np.linspace(0.1, 0.9, 5)
    tags = [r.tag for r in audit_lemma_hyp(act, C, pts, h) + audit_lemma_Ck(act, C, pts, h)]
    print(f"  pointwise audits: {dict((t, tags.count(t)) for t in sorted(set(tags)))}\n")
