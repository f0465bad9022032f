"""Exact algebra for connected sums in Pin(2)-monopole Floer homology."""

from .ring_core import Monomial, RingElement, UPolynomial, parse_ring
from .modules import CatalogId, DiagramModule, ModulePresentation, catalog, present_to_diagram

__version__ = "0.1.0"
