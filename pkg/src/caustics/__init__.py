"""Exact computation of the class of caustics by reflection of plane
algebraic curves, over Q(i) with dynamic evaluation for algebraic data."""

__version__ = "0.1.0"

from .gaussian import GaussianRational, QI_I, QI_ONE, QI_ZERO
from .context import (ExtensionContext, ExtElem, NeedMoreTerms, SplitRequest,
                      adjoin_root, invert_or_split, run_split, trivial_context)
from .upoly import (QI_DOM, PolyDomain, UniPoly, gcd_field, gcd_poly_ring,
                    resultant, squarefree_decomposition, squarefree_part)
