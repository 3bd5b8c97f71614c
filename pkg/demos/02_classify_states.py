"""Classify states into the triad: PPT, SPC, invariant under realignment.

Run:  python demos/02_classify_states.py
"""

from triadops import (
    canonical,
    ccnr_entanglement_flag,
    classify,
    random_invariant,
    random_ppt,
    random_separable,
    random_spc,
)


def show(name, gamma):
    c = classify(gamma)
    flags = "".join(
        ch if on else "-"
        for ch, on in (("P", c.ppt), ("S", c.spc), ("I", c.invariant))
    )
    print(f"{name:28s} flags={flags}  ccnr={c.ccnr_value:.6f}  "
          f"min_eig(PT)={c.residuals.ppt_min_eigenvalue:+.3e}")


print("flags: P = positive partial transpose, S = SPC, I = invariant\n")

show("classical diagonal (k=2)", canonical("classical_diag", 2))
show("maximally entangled (k=2)", canonical("bell", 2))
show("identity plus projector", canonical("identity_plus_u", 2))
show("werner alpha=+0.5 (k=3)", canonical("werner", 3, alpha=0.5))
show("werner alpha=-0.9 (k=3)", canonical("werner", 3, alpha=-0.9))
show("random separable (k=3)", random_separable(3, 5, seed=1)[0])
show("random SPC (k=3)", random_spc(3, seed=1))
show("random invariant (k=3)", random_invariant(3, seed=1))
show("random PPT (k=3)", random_ppt(3, seed=1))

print("\nThe CCNR flag is sound but not complete: a value above 1 certifies")
print("entanglement, a value at or below 1 decides nothing.")
bell = canonical("bell", 2)
print("bell flagged entangled:", ccnr_entanglement_flag(bell))
sep, _ = random_separable(2, 3, seed=2)
print("separable flagged entangled:", ccnr_entanglement_flag(sep))
