"""Exact computations with bigraded spectral sequences over Z.

Subpackages build on one another: ``zlinalg`` (finitely generated
abelian groups, subgroups, subquotients), ``zdiagrams`` (Z-indexed
diagrams, limits, colimits, towers), ``spectral`` (pages, page turning,
morphisms), ``excouple`` (regular exact couples, abutments, extensions),
``solvers`` (two-row deduction, five-term sequence), and ``cli``.
"""

from .zlinalg import FPAbGroup, Hom, Subgroup, subquotient
from .zdiagrams import Tail, ZDiagram, ZDiagramMorphism
from .spectral import Page, SpectralSequence, SSMorphism
from .excouple import Bidegrees, ExactCouple, CoupleMorphism, demo_couple

__all__ = [
    "FPAbGroup",
    "Hom",
    "Subgroup",
    "subquotient",
    "Tail",
    "ZDiagram",
    "ZDiagramMorphism",
    "Page",
    "SpectralSequence",
    "SSMorphism",
    "Bidegrees",
    "ExactCouple",
    "CoupleMorphism",
    "demo_couple",
]

__version__ = "0.1.0"
