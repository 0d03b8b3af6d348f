"""Entanglement invariants of multipartite qudit states.

Invariants are kernel dimensions of contraction maps, evaluated exactly over
a large prime field.  The package classifies states, finds maximally
entangled classes, builds short symmetric states, and runs random walks
through class space with absorbing Markov chain analysis.

The scikit-learn wrappers live in :mod:`mectools.estimators` and are not
imported here to keep start-up fast.
"""

__version__ = "0.1.0"

from ._validation import PRIME, SECOND_PRIME, DimensionError, check_dims
from .antichains import InvariantFamily, enumerate_family
from .constructions import SymmetricSpec, s3_symmetric_state, sn_symmetric_state, symmetric_length
from .formulas import conjectured_min_length, conjectured_principal, max_location, principal_table, recurrence_check
from .invariants import InvariantVector, constraint_matrix, invariant_vector, kernel_dim, principal_invariant
from .markov import StochasticMatrix, expected_steps, fundamental_matrix
from .registry import ClassRegistry, enumerate_patterns, is_mes, mec_signature, min_length
from .tensor import State, Support, random_state, truncate
from .walks import forward_walk, reverse_walk, run_ensemble

__all__ = [
    "PRIME",
    "SECOND_PRIME",
    "ClassRegistry",
    "DimensionError",
    "InvariantFamily",
    "InvariantVector",
    "State",
    "StochasticMatrix",
    "Support",
    "SymmetricSpec",
    "check_dims",
    "conjectured_min_length",
    "conjectured_principal",
    "constraint_matrix",
    "enumerate_family",
    "enumerate_patterns",
    "expected_steps",
    "forward_walk",
    "fundamental_matrix",
    "invariant_vector",
    "is_mes",
    "kernel_dim",
    "max_location",
    "mec_signature",
    "min_length",
    "principal_invariant",
    "principal_table",
    "random_state",
    "recurrence_check",
    "reverse_walk",
    "run_ensemble",
    "s3_symmetric_state",
    "sn_symmetric_state",
    "symmetric_length",
    "truncate",
]
