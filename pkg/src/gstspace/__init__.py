"""Influence and pairwise independence in the symmetric n-player cause/effect game."""
from __future__ import annotations

__version__ = "0.1.0"

from .model import GameSpec, tequila
from .points import boundary_point, membership, theta_roots
from .quadform import hessian, inertia_of_H, psi

__all__ = [
    "GameSpec",
    "tequila",
    "psi",
    "hessian",
    "inertia_of_H",
    "membership",
    "theta_roots",
    "boundary_point",
    "__version__",
]
