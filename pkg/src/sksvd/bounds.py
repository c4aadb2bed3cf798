"""Theoretical error envelopes and per-index certification.

Two guarantees are certified, both relative.  Singular values: each ratio
estimated/true must lie in [sqrt(1-eps), sqrt(1+eps)].  Right singular
vectors: the Euclidean error of each sign-aligned vector must not exceed

    min( sqrt(2),
         eps * sqrt(1+eps)/sqrt(1-eps)
             * max_{i != j} sqrt(2) s_i s_j / min_{c in [-1,1]} |s_i^2 - s_j^2 (1+c eps)| )

evaluated on the true spectrum.  The vector bound degrades to the trivial
sqrt(2) cap when singular values are close - the relative gaps attached
to each certificate say which indices are ill-conditioned in this sense.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .oracle import OracleDecomposition
from .spectral import SpectralEstimate, align_signs

# absolute slack absorbing floating-point evaluation of the envelopes themselves
ENVELOPE_SLACK = 1e-12

SQRT2 = math.sqrt(2.0)


def value_envelope(eps: float) -> tuple[float, float]:
    """Admissible range of (estimated / true) singular value ratios."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    return math.sqrt(1.0 - eps), math.sqrt(1.0 + eps)


def min_over_c_denominator(sigma_i: float, sigma_j: float, eps: float) -> float:
    """Exact minimum over c in [-1, 1] of |sigma_i^2 - sigma_j^2 (1 + c eps)|.

    The argument is linear in c, so the minimum is 0 when sigma_i^2 lies
    inside the interval sigma_j^2 [1-eps, 1+eps] and is attained at an
    endpoint otherwise.
    """
    if not (sigma_i > 0 and sigma_j > 0):
        raise ValueError(f"singular values must be positive, got {sigma_i!r}, {sigma_j!r}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    a = float(sigma_i) * float(sigma_i)
    b = float(sigma_j) * float(sigma_j)
    lo, hi = b * (1.0 - eps), b * (1.0 + eps)
    if lo <= a <= hi:
        return 0.0
    return min(abs(a - lo), abs(a - hi))


def vector_error_bound(singular_values, eps: float, j: int) -> float:
    """Envelope on the Euclidean error of the j-th right singular vector.

    ``j`` is a 0-based index into the descending true spectrum.  A zero
    denominator for any competing index collapses the bound to sqrt(2);
    a singleton spectrum has no competing index and its one-dimensional
    row space is preserved exactly, so the bound is 0.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("singular_values must be a nonempty 1-d sequence")
    if np.any(s <= 0):
        raise ValueError("singular values must be positive")
    if not 0 <= j < s.size:
        raise IndexError(f"index {j} out of range [0, {s.size})")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    if s.size == 1:
        return 0.0
    prefactor = eps * math.sqrt(1.0 + eps) / math.sqrt(1.0 - eps)
    worst = 0.0
    for i in range(s.size):
        if i == j:
            continue
        den = min_over_c_denominator(s[i], s[j], eps)
        if den == 0.0:
            return SQRT2
        worst = max(worst, SQRT2 * float(s[i]) * float(s[j]) / den)
    return float(min(SQRT2, prefactor * worst))


def eigenvalue_envelope_check(lambda_true, lambda_est, eps: float) -> np.ndarray:
    """Per-index test that estimated/true eigenvalue ratios lie in [1-eps, 1+eps]."""
    lt = np.asarray(lambda_true, dtype=float)
    le = np.asarray(lambda_est, dtype=float)
    if lt.shape != le.shape:
        raise ValueError(f"length mismatch: {lt.shape} vs {le.shape}")
    if np.any(lt <= 0):
        raise ValueError("true eigenvalues must be positive")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    ratio = le / lt
    return (ratio >= 1.0 - eps - ENVELOPE_SLACK) & (ratio <= 1.0 + eps + ENVELOPE_SLACK)


@dataclass
class SpectrumGaps:
    """Relative eigenvalue gaps min_{i != j} |lambda_i - lambda_j| / |lambda_j|."""

    relative_gaps: np.ndarray


def relative_gaps(eigenvalues) -> SpectrumGaps:
    """Diagnostic gaps explaining loose vector bounds (empty for k <= 1)."""
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    if lam.size <= 1:
        return SpectrumGaps(relative_gaps=np.zeros(0))
    diffs = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(diffs, np.inf)
    return SpectrumGaps(relative_gaps=np.min(diffs, axis=1) / np.abs(lam))


@dataclass
class IndexRecord:
    """Certification outcome for one spectral index (0-based)."""

    j: int
    sigma_true: float | None
    sigma_est: float | None
    ratio: float | None
    ratio_lo: float
    ratio_hi: float
    value_pass: bool
    vector_err: float | None
    vector_bound: float | None
    vector_pass: bool
    note: str | None = None


@dataclass
class ErrorCertificate:
    """Per-index comparison of estimates against the oracle and the envelopes."""

    records: list[IndexRecord]
    eps: float
    overall_pass: bool
    rank_oracle: int
    rank_estimate: int
    gaps: SpectrumGaps | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "eps": self.eps,
            "overall_pass": self.overall_pass,
            "rank_oracle": self.rank_oracle,
            "rank_estimate": self.rank_estimate,
            "records": [
                {
                    "j": r.j,
                    "sigma_true": r.sigma_true,
                    "sigma_est": r.sigma_est,
                    "ratio": r.ratio,
                    "ratio_lo": r.ratio_lo,
                    "ratio_hi": r.ratio_hi,
                    "value_pass": r.value_pass,
                    "vector_err": r.vector_err,
                    "vector_bound": r.vector_bound,
                    "vector_pass": r.vector_pass,
                    "note": r.note,
                }
                for r in self.records
            ],
        }
        if self.gaps is not None:
            d["relative_gaps"] = [float(g) for g in self.gaps.relative_gaps]
        d.update(self.meta)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def certify(oracle: OracleDecomposition, estimate: SpectralEstimate,
            eps: float, meta: dict | None = None) -> ErrorCertificate:
    """Certify a spectral estimate against the oracle at distortion eps.

    Estimate columns are sign-aligned to the oracle's before measuring
    vector errors.  Indices beyond min(oracle rank, estimate rank) are
    reported as rank-mismatch failures.  ``meta`` (seed, trial id, ...)
    is echoed into the serialized report.
    """
    if oracle.k < 1:
        raise ValueError("oracle rank must be at least 1")
    if oracle.V.shape[0] != estimate.right_vectors.shape[0]:
        raise ValueError(
            f"dimension mismatch: oracle has {oracle.V.shape[0]} columns of data, "
            f"estimate has {estimate.right_vectors.shape[0]}"
        )
    lo, hi = value_envelope(eps)
    L = min(oracle.k, estimate.rank)
    aligned = align_signs(oracle.V[:, :L], estimate.right_vectors[:, :L]) if L else None

    records = []
    for j in range(max(oracle.k, estimate.rank)):
        if j >= L:
            side = "estimate" if j >= estimate.rank else "oracle"
            records.append(IndexRecord(
                j=j,
                sigma_true=float(oracle.sigma[j]) if j < oracle.k else None,
                sigma_est=float(estimate.singular_values[j]) if j < estimate.rank else None,
                ratio=None, ratio_lo=lo, ratio_hi=hi, value_pass=False,
                vector_err=None, vector_bound=None, vector_pass=False,
                note=f"rank mismatch: index {j} missing from {side}",
            ))
            continue
        st = float(oracle.sigma[j])
        se = float(estimate.singular_values[j])
        ratio = se / st
        value_pass = (lo - ENVELOPE_SLACK <= ratio <= hi + ENVELOPE_SLACK)
        err = float(np.linalg.norm(oracle.V[:, j] - aligned[:, j]))
        bound = vector_error_bound(oracle.sigma, eps, j)
        records.append(IndexRecord(
            j=j, sigma_true=st, sigma_est=se, ratio=ratio,
            ratio_lo=lo, ratio_hi=hi, value_pass=value_pass,
            vector_err=err, vector_bound=bound,
            vector_pass=bool(err <= bound + ENVELOPE_SLACK),
            note="singleton spectrum: row space preserved exactly" if oracle.k == 1 else None,
        ))

    overall = all(r.value_pass and r.vector_pass for r in records)
    return ErrorCertificate(
        records=records, eps=eps, overall_pass=overall,
        rank_oracle=oracle.k, rank_estimate=estimate.rank,
        gaps=relative_gaps(oracle.eigenvalues), meta=dict(meta or {}),
    )
