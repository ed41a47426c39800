"""Select the rewriting backend at import time.

The compiled extension is used when it is importable; set
``QINSTANTON_BACKEND=python`` to force the pure-Python kernels.
"""
import os

_choice = os.environ.get("QINSTANTON_BACKEND", "auto").lower()

if _choice == "python":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        if _choice == "cython":
            raise
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
ReductionLimit = _impl.ReductionLimit
find_redex = _impl.find_redex
is_irreducible = _impl.is_irreducible
suffix_reducible = _impl.suffix_reducible
reduce_terms = _impl.reduce_terms
multiply_terms = _impl.multiply_terms
irreducible_words = _impl.irreducible_words

__all__ = [
    "BACKEND",
    "ReductionLimit",
    "find_redex",
    "is_irreducible",
    "suffix_reducible",
    "reduce_terms",
    "multiply_terms",
    "irreducible_words",
]
