"""Exact computation of psi/kappa/Theta intersection numbers via deformed cut-and-join operators."""
from __future__ import annotations

from .cache import TauCache
from .cutjoin import apply_W, apply_W_dressed, assemble_W, coeff_A, coeff_C
from .polyring import GradedPoly
from .recursion import (IntersectionQuery, compute_tau, free_energy, intersection_number, verify_translation,
                        verify_virasoro)
from .series import ParamSeries, build_f, build_h
from .volumes import volume_polynomial

__version__ = "0.1.0"

__all__ = [
    "GradedPoly",
    "ParamSeries",
    "TauCache",
    "IntersectionQuery",
    "apply_W",
    "apply_W_dressed",
    "assemble_W",
    "build_f",
    "build_h",
    "coeff_A",
    "coeff_C",
    "compute_tau",
    "free_energy",
    "intersection_number",
    "verify_translation",
    "verify_virasoro",
    "volume_polynomial",
]
