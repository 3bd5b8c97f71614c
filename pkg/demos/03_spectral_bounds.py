"""Operator-norm bounds: unconditional ones and the triad-only one.

Every PSD operator obeys
    ||PT(g)||   <= min(||g_A||, ||g_B||, ||R(g)||)
    ||R(g)||^2  <= ||g_A|| * ||g_B||
and membership in any triad class upgrades the first bound to g itself:
    ||g||       <= min(||g_A||, ||g_B||, ||R(g)||).

The last bound genuinely needs the class membership: a generic density
matrix violates it routinely, as the sweep below shows.

Run:  python demos/03_spectral_bounds.py
"""

from triadops import (
    bound_gamma_pt,
    bound_realign_sq,
    bound_triad,
    classify,
    norms,
    random_density,
    random_invariant,
    random_ppt,
    random_spc,
    realign,
    reduced_a,
    reduced_b,
)

print("== unconditional bounds on 200 random densities (k=3) ==")
margins_pt, margins_sq = [], []
for seed in range(200):
    g = random_density(3, 9, seed)
    margins_pt.append(bound_gamma_pt(g).margin)
    margins_sq.append(bound_realign_sq(g).margin)
print(f"partial-transpose bound:  min margin {min(margins_pt):+.3e}")
print(f"realignment-square bound: min margin {min(margins_sq):+.3e}")

print("\n== the state bound needs a triad class ==")
violations = 0
for seed in range(200):
    g = random_density(3, 9, seed)
    lhs = norms(g).operator_norm
    rhs = min(
        norms(reduced_a(g)).operator_norm,
        norms(reduced_b(g)).operator_norm,
        norms(realign(g)).operator_norm,
    )
    if lhs > rhs + 1e-12:
        violations += 1
print(f"generic densities violating the state bound: {violations}/200")

for name, gen in (
    ("PPT", random_ppt),
    ("SPC", random_spc),
    ("invariant", random_invariant),
):
    margins = []
    for seed in range(100):
        g = gen(3, seed)
        margins.append(bound_triad(g, classify(g)).margin)
    print(f"{name:10s} states: min margin {min(margins):+.3e}  (never negative)")
