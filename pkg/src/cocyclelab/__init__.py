"""Group cohomology with coefficients in finite-dimensional modules.

Exact rational arithmetic where the inputs allow it, floating point with
explicit tolerances otherwise.
"""
from .cohomology import InhomCocycle, coboundary_membership, h1, harmonic_decomposition, hn
from .groups import (FiniteSupportMeasure, FiniteTableGroup, FreeAbelianGroup, FreeGroup,
                     HeisenbergGroup, PresentedGroup, ProductGroup, Subgroup)
from .reps import Representation
from .stationarity import cesaro_projection
from .words import Word

__version__ = "0.1.0"

__all__ = [
    "FiniteSupportMeasure", "FiniteTableGroup", "FreeAbelianGroup", "FreeGroup", "HeisenbergGroup",
    "InhomCocycle", "PresentedGroup", "ProductGroup", "Representation", "Subgroup", "Word",
    "cesaro_projection", "coboundary_membership", "h1", "harmonic_decomposition", "hn",
]
