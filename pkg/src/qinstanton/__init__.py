"""Exact symbolic checks for q-deformed algebras, forms and ADHM monads."""
from .kernels import BACKEND
from .ncengine import NCPoly, Presentation, check_local_confluence, complete, hilbert_dimensions
from .qalgebras import AlgebraId, StructureReport, build
from .scalar import GaussianRational, PMode, Scalar, q, qpow, spow

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "NCPoly",
    "Presentation",
    "check_local_confluence",
    "complete",
    "hilbert_dimensions",
    "AlgebraId",
    "StructureReport",
    "build",
    "GaussianRational",
    "PMode",
    "Scalar",
    "q",
    "qpow",
    "spow",
    "__version__",
]
