"""Finite Kac algebras, their crossed-product towers, relative commutants and Drinfeld doubles."""

from .algebra_zoo import builtin, function_algebra, group_algebra, load_algebra
from .commutant import block_decomposition, q
from .crossed import SlotAlgebra, interval_algebra, tensor_algebra
from .drinfeld import compare, drinfeld_double
from .hopf_core import KacAlgebra, dual, verify_kac_axioms

__all__ = [
    "KacAlgebra",
    "SlotAlgebra",
    "block_decomposition",
    "builtin",
    "compare",
    "drinfeld_double",
    "dual",
    "function_algebra",
    "group_algebra",
    "interval_algebra",
    "load_algebra",
    "q",
    "tensor_algebra",
    "verify_kac_axioms",
]
