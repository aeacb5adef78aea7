"""Exception types raised by the library."""


class ComplexError(ValueError):
    """Malformed simplicial complex input."""


class OrientationError(ValueError):
    """Complex is not a closed orientable manifold."""


class GeometryError(ValueError):
    """Degenerate or inconsistent geometric realization."""


class SeriesDivergenceError(RuntimeError):
    """Neumann series for an inverse inner product does not converge."""


class PeriodError(ValueError):
    """Invalid homology basis or failed holomorphic splitting."""


class MeshFormatError(ValueError):
    """Mesh document violates the JSON schema."""
