"""Symbolic and numerical engine for the q-deformed real line."""

from .exactnum import CplxRat, make_q, qpow, z_of
from .params import Params
from .algebra import AlgebraElement, DoubledElement, normal_order

__all__ = [
    "AlgebraElement",
    "CplxRat",
    "DoubledElement",
    "Params",
    "make_q",
    "normal_order",
    "qpow",
    "z_of",
]

__version__ = "0.1.0"
