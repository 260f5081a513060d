"""Exact verification of local-model chart equations: polynomial arithmetic,
Gröbner bases, exterior-algebra worst terms, chart ideals and geometric checks."""

from .exterior_wedge import ChartSpec, IndexSet
from .groebner import Budget, BudgetExceeded, Ideal, groebner, ideal_equal
from .poly_core import GF, QQ, LaurentPi, MonomialOrder, Poly, PolyRing, Var, var
from .report import CheckResult, VerificationReport

__version__ = "0.1.0"

__all__ = ["ChartSpec", "IndexSet", "Budget", "BudgetExceeded", "Ideal", "groebner",
           "ideal_equal", "GF", "QQ", "LaurentPi", "MonomialOrder", "Poly", "PolyRing",
           "Var", "var", "CheckResult", "VerificationReport"]
