"""Synthesis of rotation-gate quantum circuits from decision diagrams."""
from .angle import Angle, AngleError, PI, ZERO, HALF_PI
from .rbdd import Diagram, Manager, TERMINAL
from .factor import BiDecomp, CascadeExpr, Leaf, bi_decompose, eval_form, factor

__all__ = [
    "Angle", "AngleError", "PI", "ZERO", "HALF_PI",
    "Diagram", "Manager", "TERMINAL",
    "BiDecomp", "CascadeExpr", "Leaf", "bi_decompose", "eval_form", "factor",
]
__version__ = "0.1.0"
