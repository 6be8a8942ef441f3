"""Exact orbit classification for paramodular groups.

Isotropic lines and maximal isotropic subspaces of Q^{2g} under the
paramodular group, with and without canonical level structure.
"""

from paramod.errors import ParamodError
from paramod.polarization import PolarizationType, make_polarization
from paramod.group import GroupElement, GroupKind

__all__ = [
    "GroupElement",
    "GroupKind",
    "ParamodError",
    "PolarizationType",
    "make_polarization",
]

__version__ = "0.1.0"
