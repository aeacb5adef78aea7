"""Simplicial cochain calculus: Whitney forms, cup product, combinatorial star,
Hodge decomposition and period matrices of triangulated surfaces."""
from .complex import (Cochain, FundamentalClass, SimplicialComplex, basis_cochain, betti_numbers,
                      boundary_matrix, build_complex, coboundary_matrix, fundamental_class)
from .cup import (InnerProductMatrix, associativity_defect, cup, cup_cochains, pairing_matrix,
                  wedge_pairing_matrix, whitney_cup_cochains, whitney_mass_matrix)
from .exceptions import (ComplexError, GeometryError, MeshFormatError, OrientationError,
                         PeriodError, SeriesDivergenceError)
from .geometry import (GeometricRealization, Mesh, circle, conformal_torus, flat_torus,
                       genus2_surface, interval, lattice_torus, mesh_and_fullness, subdivide, subdivide_mesh)
from .hodge import (HodgeContext, WeightedCochainGraph, delta_star, harmonic_basis,
                    hodge_decompose, laplacian, neumann_inverse, star)
from .periods import (HomologyBasis, canonical_basis, complexify_and_split, period_matrix,
                      periods, validate_riemann_relations)
from .whitney import (WhitneyForm, de_rham, de_rham_whitney, exterior_d, integrate_product,
                      wedge, whitney_embed)

__version__ = "0.1.0"
