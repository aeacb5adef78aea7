"""Period matrices of triangulated surfaces.

Harmonic 1-cochains are split into holomorphic and antiholomorphic parts by
the star; normalizing the a-periods of the holomorphic ones gives the period
matrix. On flat tori the result is exact on any triangulation, since the
Whitney forms of the coordinate differentials are harmonic. On a
conformally deformed torus it converges to the smooth value, and on a
genus-2 surface it is a symmetric 2 x 2 matrix with positive definite
imaginary part.
"""
import numpy as np

from cochaincalc import (HodgeContext, HomologyBasis, flat_torus, genus2_surface, lattice_torus,
                         period_matrix, validate_riemann_relations)
from cochaincalc.convergence import run_convergence


def pi_of(mesh):
    ctx = HodgeContext(mesh.complex, mesh.realization)
    return period_matrix(ctx, HomologyBasis.from_cycles(mesh.cycles, mesh.complex)), ctx


print("flat tori (exact on every triangulation):")
for label, mesh, expected in [
        ("1 x 1", flat_torus(1, 1, 4), 1j),
        ("1 x 2", flat_torus(1, 2, 4), 2j),
        ("1 x 1, jittered", flat_torus(1, 1, 4, jitter=0.3, seed=2), 1j),
        ("equilateral", lattice_torus(1, np.exp(1j * np.pi / 3), 6), np.exp(1j * np.pi / 3))]:
    P, _ = pi_of(mesh)
    print(f"  {label:16s} Pi = {P.matrix[0, 0]:.12f}  error {abs(P.matrix[0, 0] - expected):.1e}")

print("\nconformally deformed square torus (smooth value i):")
rep = run_convergence("periods", [2, 3, 4, 5], "conformal")
for r in rep.records:
    print(f"  res {2 ** r['level']:3d}: error {r['error']:.2e}")
print(f"  order in the mesh size: {rep.slope:.2f}")

print("\ngenus 2 (two square tori joined at a cut-out cell):")
P, ctx = pi_of(genus2_surface(6))
print(np.array2string(P.matrix, precision=6, suppress_small=True))
print(f"  symmetry residual {P.symmetry_residual:.1e}, min eigenvalue of Im Pi "
      f"{P.min_imag_eigenvalue:.4f}")
hb = HomologyBasis.from_cycles(genus2_surface(6).cycles)
rep = validate_riemann_relations(P.splitting.holomorphic, hb, ctx)
print(f"  bilinear relation residual {rep.bilinear_residual:.1e}, "
      f"norm formula error {rep.max_norm_error:.1e}")
