"""Hodge decomposition on a jittered flat torus.

A random 1-cochain splits into an exact part (a coboundary), a coexact part
(the adjoint coboundary of a 2-cochain) and a harmonic part, mutually
orthogonal in the Whitney inner product. The harmonic space has the
dimension of the first Betti number.
"""
import numpy as np

from cochaincalc import Cochain, HodgeContext, flat_torus, hodge_decompose
from cochaincalc.hodge import orthogonality_residual

mesh = flat_torus(1.0, 1.0, res=6, jitter=0.3, seed=4)
ctx = HodgeContext(mesh.complex, mesh.realization)
print("simplex counts", mesh.complex.shape, "Betti numbers", ctx.betti())
print("harmonic dimensions", [ctx.harmonic_basis(j).shape[1] for j in range(3)])

c = np.random.default_rng(1).normal(size=mesh.complex.count(1))
dec = hodge_decompose(Cochain(1, c), ctx)
M = ctx.mass(1)
for name, part in zip(("exact", "harmonic", "coexact"), dec.parts()):
    print(f"  |{name}| = {M.norm(part):.4f}")
print(f"  |c| = {M.norm(c):.4f}, root sum of squares of the parts = "
      f"{np.sqrt(sum(M.norm(p) ** 2 for p in dec.parts())):.4f}")
print(f"orthogonality and reconstruction residual: {orthogonality_residual(dec, ctx, 1, c):.1e}")

H = ctx.harmonic_basis(1)
print("star maps harmonic 1-cochains to harmonic ones and squares to -1:",
      np.allclose(ctx.star(1) @ (ctx.star(1) @ H), -H, atol=1e-10))
