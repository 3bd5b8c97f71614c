"""Tour of the index-permutation contractions and the star product.

Run:  python demos/01_contractions_tour.py
"""

import numpy as np

from triadops import (
    BipartiteOperator,
    LocalOperator,
    canonical,
    contraction_by_permutation,
    flip,
    kron,
    norms,
    partial_transpose,
    realign,
    rng_from_seed,
    star_product,
)

rng = rng_from_seed(0)
k = 3


def rand_local(k):
    return rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))


print("== the flip operator ==")
f = flip(2)
print(f.mat.real.astype(int))
a, b = rand_local(2), rand_local(2)
swapped = f.mat @ np.kron(a, b) @ f.mat
print("F (a x b) F == b x a:", np.allclose(swapped, np.kron(b, a)))
print("F^2 == Id:", np.allclose(f.mat @ f.mat, np.eye(4)))

print("\n== partial transpose detects entanglement ==")
bell = canonical("bell", 2)
pt = partial_transpose(bell)
print("eigenvalues of the partially transposed maximally entangled state:")
print(np.round(np.linalg.eigvalsh(pt.mat), 6))

print("\n== realignment is an isometric involution ==")
g = BipartiteOperator(rand_local(k * k), k, k)
r = realign(g)
print("||R(g)||_F == ||g||_F:", np.isclose(norms(r).frobenius_norm, norms(g).frobenius_norm))
print("R(R(g)) == g:", np.allclose(realign(r).mat, g.mat))

print("\n== any of the 24 slot permutations ==")
sigma = (1, 4, 3, 2)  # right multiplication by the flip
lhs = contraction_by_permutation(sigma, g).mat
print("L_(24)(g) == g F:", np.allclose(lhs, g.mat @ flip(k).mat))

print("\n== star product contracts the inner factors ==")
a2, b2 = rand_local(2), rand_local(k)
c2, d2 = rand_local(k), rand_local(2)
gamma = kron(LocalOperator(a2), LocalOperator(b2))
delta = kron(LocalOperator(c2), LocalOperator(d2))
prod = star_product(gamma, delta)
print(
    "(a x b) * (c x d) == tr(b c^T) a x d:",
    np.allclose(prod.mat, np.trace(b2 @ c2.T) * np.kron(a2, d2)),
)
print("realignment is multiplicative over the star product:",
      np.allclose(realign(star_product(g, g)).mat, realign(g).mat @ realign(g).mat))
