"""Fibonacci-type sequences, Kronecker quiver representations and cokernel bundle arithmetic."""

from .decomp import Decomposition, compose, decompose, fibonacci_chain, mutate_shape, shape_of_fibonacci
from .kronrep import (
    KroneckerRep,
    RepFormatError,
    canonical_rep,
    direct_sum,
    end_dim,
    euler_form,
    ext_dim,
    fibonacci_block,
    hom_dim,
    hom_ext,
    hom_space,
    is_isomorphic,
    orbit_codim,
    random_rep,
    rep_from_json,
    rep_to_json,
)
from .linalg import DEFAULT_PRIME, FieldSpec
from .sequence import Ratio, Shape, fib_table, fib_value, pell_solutions, ratio_compare, tits_form

__version__ = "0.1.0"
