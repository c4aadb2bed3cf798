"""Truncated SVD of the sketch and the estimates read off from it.

The estimator is deliberately simple: compute a dense SVD of the sketch,
truncate at the numerical rank, and report the singular values and right
singular vectors as the estimates for the original data matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass
class SpectralEstimate:
    """Truncated SVD of a sketch.

    singular_values  descending, strictly above tol_used * largest
    right_vectors    n x rank, orthonormal columns
    eigenvalues      elementwise squares of singular_values
    left_vectors     m x rank, retained only on request
    """

    singular_values: np.ndarray
    right_vectors: np.ndarray
    eigenvalues: np.ndarray
    rank: int
    tol_used: float
    left_vectors: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "tol_used": self.tol_used,
            "singular_values": [float(s) for s in self.singular_values],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "right_vectors": [[float(x) for x in row] for row in self.right_vectors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def numerical_rank(singular_values, tol: float) -> int:
    """Count of singular values strictly above tol * largest (0 if all zero)."""
    s = np.asarray(singular_values, dtype=float)
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol!r}")
    if s.size == 0:
        return 0
    if np.any(s < 0) or np.any(s[:-1] < s[1:]):
        raise ValueError("singular values must be nonnegative and sorted descending")
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


DEFAULT_TOL = 1e-8


def sketched_svd(Y: np.ndarray, tol: float = DEFAULT_TOL, keep_left: bool = False) -> SpectralEstimate:
    """Dense SVD of the sketch, truncated at the numerical rank.

    The spectrum of the implicit data matrix is estimated by the sketch's
    own singular values / right singular vectors.  SVD failures propagate
    as numpy.linalg.LinAlgError.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {Y.shape}")
    if not np.all(np.isfinite(Y)):
        raise ValueError("sketch contains non-finite entries")
    U, s, Vt = np.linalg.svd(Y, full_matrices=False)
    r = numerical_rank(s, tol)
    sv = s[:r].copy()
    return SpectralEstimate(
        singular_values=sv,
        right_vectors=Vt[:r].T.copy(),
        eigenvalues=sv**2,
        rank=r,
        tol_used=tol,
        left_vectors=U[:, :r].copy() if keep_left else None,
    )


def align_signs(reference: np.ndarray, estimate: np.ndarray) -> np.ndarray:
    """Flip estimate columns whose inner product with the reference is negative.

    A zero inner product leaves the column unchanged.
    """
    reference = np.asarray(reference, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if reference.shape != estimate.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {estimate.shape}")
    dots = np.sum(reference * estimate, axis=0)
    return estimate * np.where(dots < 0.0, -1.0, 1.0)


def eigen_estimates(estimate: SpectralEstimate) -> np.ndarray:
    """Eigenvalue estimates for the data Gram matrix: squared singular values."""
    return estimate.singular_values**2
