"""scikit-learn style wrappers around the invariant engine and class registry.

Samples are rows of GF(p) coefficients in offset order (shape
``(n_samples, prod(dims))``), or a stack of tensors of shape
``(n_samples, *dims)``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import PRIME, check_dims, check_prime
from .antichains import enumerate_family
from .invariants import dense_invariants, dense_principal
from .registry import ClassRegistry, mec_signature
from .tensor import Support


def check_states(X, dims, prime: int = PRIME) -> np.ndarray:
    """Validate samples and return them as residues of shape ``(n, *dims)``."""
    dims = check_dims(dims)
    X = np.asarray(X)
    if X.ndim == len(dims) + 1 and X.shape[1:] == dims:
        X = X.reshape(X.shape[0], -1)
    X = check_array(X, dtype=np.int64, ensure_2d=True)
    if X.shape[1] != math.prod(dims):
        raise ValueError(f"expected {math.prod(dims)} coefficients per sample for dims {dims}, got {X.shape[1]}")
    return np.mod(X, prime).reshape((X.shape[0],) + dims)


def support_of(sample) -> Support:
    sample = np.asarray(sample)
    return Support.from_offsets(sample.shape, np.flatnonzero(sample.reshape(-1)).tolist())


class InvariantVectorizer(TransformerMixin, BaseEstimator):
    """Map coefficient tensors to their invariant vectors.

    Parameters
    ----------
    dims : tuple of int
        Dimension vector shared by all samples.
    prime : int, default 2147483647
        Field characteristic.
    principal_only : bool, default False
        Output only the principal invariant (one column).
    """

    def __init__(self, dims=(2, 2, 2), prime: int = PRIME, principal_only: bool = False):
        self.dims = dims
        self.prime = prime
        self.principal_only = principal_only

    def fit(self, X, y=None):
        check_prime(self.prime)
        self.dims_ = check_dims(self.dims)
        check_states(X, self.dims_, self.prime)
        self.family_ = None if self.principal_only else enumerate_family(len(self.dims_))
        self.n_features_out_ = 1 if self.principal_only else len(self.family_)
        return self

    def transform(self, X):
        check_is_fitted(self, "dims_")
        states = check_states(X, self.dims_, self.prime)
        if self.principal_only:
            return np.array([[dense_principal(s, self.prime)] for s in states], dtype=np.int64)
        return np.array([dense_invariants(s, self.family_, self.prime) for s in states], dtype=np.int64).reshape(
            len(states), self.n_features_out_
        )


class EntanglementClassifier(ClusterMixin, BaseEstimator):
    """Group samples into entanglement classes by exact invariant vector.

    ``fit`` files every sample in a :class:`~mectools.registry.ClassRegistry`
    and assigns canonical labels; ``predict`` returns -1 for vectors never
    seen during ``fit``.
    """

    def __init__(self, dims=(2, 2, 2), prime: int = PRIME, seed: int = 0):
        self.dims = dims
        self.prime = prime
        self.seed = seed

    def fit(self, X, y=None):
        self.vectorizer_ = InvariantVectorizer(self.dims, self.prime).fit(X)
        vectors = self.vectorizer_.transform(X)
        states = check_states(X, self.vectorizer_.dims_, self.prime)
        reg = ClassRegistry(self.vectorizer_.dims_, self.prime)
        for vec, state in zip(vectors, states):
            reg.observe(tuple(vec), support_of(state), confirm=False)
        reg.mec_signature = mec_signature(reg.dims, self.seed, self.prime)
        self.registry_ = reg.canonicalize()
        self.mec_signature_ = reg.mec_signature
        self.labels_ = self._label(vectors)
        return self

    def _label(self, vectors) -> np.ndarray:
        lab = self.registry_.labels()
        return np.array([lab.get(tuple(int(x) for x in v), -1) for v in vectors], dtype=np.int64)

    def predict(self, X):
        check_is_fitted(self, "registry_")
        return self._label(self.vectorizer_.transform(X))

    def is_mes(self, X) -> np.ndarray:
        check_is_fitted(self, "registry_")
        target = np.array(self.mec_signature_.vector)
        return np.all(self.vectorizer_.transform(X) == target, axis=1)
