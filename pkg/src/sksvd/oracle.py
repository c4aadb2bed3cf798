"""Dense ground truth and perturbation diagnostics, for verification only.

Everything here materializes matrices that the streaming path never
builds, so it is restricted to desk scale by the memory budget.  The
diagnostics expose the quantities that drive the error guarantees: the
operator's deviation from an isometry, its projection onto the data's
left singular subspace, the induced symmetric perturbation E of the data
Gram matrix, and the compressed Gram matrix M whose eigenvalues coincide
with the sketch's squared singular values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .budget import check_budget
from .jl import IDENTITY, SketchConfig, materialize_phi
from .spectral import DEFAULT_TOL, SpectralEstimate, numerical_rank
from .turnstile import MatrixUpdate


@dataclass
class OracleDecomposition:
    """Materialized data matrix with its truncated SVD (rank k)."""

    X: np.ndarray      # N x n
    U: np.ndarray      # N x k, orthonormal columns
    sigma: np.ndarray  # descending positive singular values, length k
    V: np.ndarray      # n x k, orthonormal columns
    k: int

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.sigma**2


@dataclass
class PerturbationDiagnostics:
    """Scalar norms and matrices governing the spectral error.

    delta_phi_norm  2-norm of (gram of the operator) - identity, over the
                    full ambient space; >= 1 whenever m < N (null space),
                    diagnostic only
    projected_norm  same deviation restricted to the data's left singular
                    subspace; this is the quantity the guarantees bound by eps
    E_norm          2-norm of the induced perturbation of the data Gram matrix
    M               k x k compressed sketch Gram matrix, symmetric
    """

    delta_phi_norm: float
    projected_norm: float
    E_norm: float
    M: np.ndarray


def materialize_X(updates: Iterable[MatrixUpdate], N: int, n: int, budget_mb=None) -> np.ndarray:
    """Accumulate a turnstile update log into a dense N x n matrix."""
    check_budget(N * n * 8, f"dense {N}x{n} data matrix", budget_mb)
    X = np.zeros((N, n))
    for u in updates:
        X[u.row, u.col] += u.delta
    return X


def exact_svd(X: np.ndarray, tol: float = DEFAULT_TOL) -> OracleDecomposition:
    """Dense SVD of the materialized data, truncated at the numerical rank."""
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix contains non-finite entries")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    k = numerical_rank(s, tol)
    return OracleDecomposition(X=X, U=U[:, :k].copy(), sigma=s[:k].copy(),
                               V=Vt[:k].T.copy(), k=k)


def _sym_norm(A: np.ndarray) -> float:
    """2-norm of a symmetric matrix via a dense symmetric eigensolve."""
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvalsh(A))))


def perturbation_diagnostics(config: SketchConfig, oracle: OracleDecomposition,
                             Y: np.ndarray, phi: np.ndarray | None = None,
                             budget_mb=None) -> PerturbationDiagnostics:
    """Diagnostics relating a sketch Y to the dense oracle of its data.

    Pass ``phi`` to reuse an already-materialized operator.
    """
    if phi is None:
        phi = materialize_phi(config, budget_mb=budget_mb)
    m, N = phi.shape
    Y = np.asarray(Y, dtype=float)

    sv = np.linalg.svd(phi, compute_uv=False)
    gram_eigs = np.concatenate([sv**2, np.zeros(max(N - m, 0))])
    delta_phi_norm = float(np.max(np.abs(gram_eigs - 1.0))) if N > 0 else 0.0

    # G = (phi U)^T (phi U) - I is the operator gram deviation seen by the
    # left singular subspace; it deviates from zero by at most eps on the
    # good event.
    PU = phi @ oracle.U
    G = PU.T @ PU - np.eye(oracle.k)
    projected_norm = _sym_norm(G)

    # E = V Sigma G Sigma V^T, the symmetric perturbation added to the
    # data Gram matrix by sketching; n x n by construction.
    core = (oracle.sigma[:, None] * G) * oracle.sigma[None, :]
    E = oracle.V @ core @ oracle.V.T
    E_norm = _sym_norm(E)

    Z = Y @ oracle.V
    M = Z.T @ Z
    return PerturbationDiagnostics(delta_phi_norm=delta_phi_norm,
                                   projected_norm=projected_norm,
                                   E_norm=E_norm, M=M)


def weyl_check(oracle: OracleDecomposition, diagnostics: PerturbationDiagnostics,
               estimate: SpectralEstimate) -> bool:
    """Deterministic eigenvalue bound: |estimated - true| <= ||E||_2, all indices.

    Holds for every realization of the operator (not just the good event),
    so a failure indicates a bug rather than bad luck.  Allows a relative
    1e-9 plus absolute 1e-12 slack for floating point.
    """
    lam = oracle.eigenvalues
    lam_est = estimate.eigenvalues
    if len(lam) != len(lam_est):
        raise ValueError(f"length mismatch: {len(lam)} true vs {len(lam_est)} estimated "
                         "(truncate both to the certified length first)")
    slack = diagnostics.E_norm * 1e-9 + 1e-12
    return bool(np.all(np.abs(lam_est - lam) <= diagnostics.E_norm + slack))


def subspace_embedding_check(config: SketchConfig, oracle: OracleDecomposition,
                             eps: float, phi: np.ndarray | None = None,
                             budget_mb=None) -> bool:
    """Whether the operator is an eps-isometry on the data's column span.

    Equivalent to the for-all-x two-sided norm bound on that subspace:
    checks that every singular value of (operator @ U) lies within
    [sqrt(1-eps), sqrt(1+eps)].
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    if phi is None:
        phi = materialize_phi(config, budget_mb=budget_mb)
    if config.family.variant == IDENTITY:
        return True  # exact isometry
    sv = np.linalg.svd(phi @ oracle.U, compute_uv=False)
    smin = float(sv[-1]) if phi.shape[0] >= oracle.k else 0.0
    smax = float(sv[0]) if sv.size else 1.0
    return bool(math.sqrt(1.0 - eps) - 1e-12 <= smin and smax <= math.sqrt(1.0 + eps) + 1e-12)
