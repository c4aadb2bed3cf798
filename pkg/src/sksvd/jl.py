"""Seed-keyed generation of random sketching operators.

The operator is an ``m x N`` random matrix drawn from a family with the
distributional Johnson-Lindenstrauss property: for any fixed vector x,

    Pr[ | ||Ax||^2 - ||x||^2 | > eps ||x||^2 ]  <=  2 exp(-m f(eps)).

The matrix itself is never stored.  Each column is produced on demand by
a counter-based generator (numpy Philox) keyed by ``(seed, column)``, so
any column can be regenerated in O(m) without touching the others, and
the result is bit-identical across calls and processes for a pinned
numpy version.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .budget import check_budget

GAUSSIAN = "gaussian"
RADEMACHER = "rademacher"
SPARSE_SIGN = "sparse_sign"
IDENTITY = "identity"  # test-only: not a random family, m must equal N

_VARIANTS = (GAUSSIAN, RADEMACHER, SPARSE_SIGN, IDENTITY)

_MAX_SEED = 2**64


@dataclass(frozen=True)
class JlFamily:
    """Distribution family of the sketching operator.

    ``s`` is the sparsity parameter of ``sparse_sign`` (one entry in s is
    nonzero on average); it is ignored by the other variants.
    """

    variant: str = GAUSSIAN
    s: int = 3

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown family {self.variant!r}, expected one of {_VARIANTS}")
        if self.variant == SPARSE_SIGN and (not isinstance(self.s, int) or self.s < 1):
            raise ValueError(f"sparse_sign sparsity must be a positive integer, got {self.s!r}")


@dataclass(frozen=True)
class SketchConfig:
    """Immutable description of a sketching operator plus accuracy targets.

    seed    64-bit key of the column generator
    family  operator distribution
    m       sketch rows
    N       ambient rows of the data matrix
    n       data columns (sensors / vertices)
    eps     target relative distortion, in (0, 1)
    delta   target failure probability, in (0, 1)
    k_hint  expected rank, if known (<= n)
    """

    seed: int
    family: JlFamily = field(default_factory=JlFamily)
    m: int = 1
    N: int = 1
    n: int = 1
    eps: float = 0.5
    delta: float = 0.05
    k_hint: int | None = None

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed < _MAX_SEED:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        for name in ("m", "N", "n"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        for name in ("eps", "delta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {v!r}")
        if self.k_hint is not None and not (isinstance(self.k_hint, int) and 1 <= self.k_hint <= self.n):
            raise ValueError(f"k_hint must be in [1, n], got {self.k_hint!r}")
        if self.family.variant == IDENTITY and self.m != self.N:
            raise ValueError("identity family requires m == N")

    def to_dict(self) -> dict:
        """Canonical JSON object; field order is part of the format."""
        d = {"seed": self.seed, "family": self.family.variant}
        if self.family.variant == SPARSE_SIGN:
            d["s"] = self.family.s
        d.update({"m": self.m, "N": self.N, "n": self.n, "eps": self.eps, "delta": self.delta})
        if self.k_hint is not None:
            d["k_hint"] = self.k_hint
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "SketchConfig":
        fam = JlFamily(d["family"], d.get("s", 3))
        return cls(seed=d["seed"], family=fam, m=d["m"], N=d["N"], n=d["n"],
                   eps=d["eps"], delta=d["delta"], k_hint=d.get("k_hint"))

    @classmethod
    def from_json(cls, text: str) -> "SketchConfig":
        return cls.from_dict(json.loads(text))


def concentration_exponent(family: JlFamily, eps: float) -> float:
    """Tail exponent f(eps) of the family's squared-norm concentration bound.

    For the subgaussian families (gaussian, rademacher, sparse_sign) this
    is the classical eps^2/4 - eps^3/6; it is strictly positive on (0, 1).
    The identity override is deterministic and has no tail exponent.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    if family.variant == IDENTITY:
        raise ValueError("identity is a test override, not a random family")
    return eps * eps / 4.0 - eps**3 / 6.0


def required_measurements(k: int, eps: float, delta: float,
                          family: JlFamily = JlFamily(), exponent=None) -> int:
    """Sketch rows sufficient to preserve a rank-k spectrum at (eps, delta).

    Evaluates ceil((k ln(42/eps) + ln(2/delta)) / f(eps/sqrt 2)).  Natural
    logarithms throughout.  ``exponent`` overrides the family's default
    tail exponent f (a callable of eps), for plugging in other families.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie strictly inside (0, 1), got {delta!r}")
    f = exponent if exponent is not None else (lambda e: concentration_exponent(family, e))
    numerator = k * math.log(42.0 / eps) + math.log(2.0 / delta)
    return math.ceil(numerator / f(eps / math.sqrt(2.0)))


def _column_rng(seed: int, col_index: int) -> np.random.Generator:
    # Philox is counter-based: keying on (seed, column) gives O(m) random
    # access to any column without generating its predecessors.
    key = np.array([seed, col_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def phi_column(config: SketchConfig, col_index: int) -> np.ndarray:
    """Column ``col_index`` of the sketching operator, regenerated on demand.

    Pure function of (seed, family, m, col_index); bit-identical on every
    call.  Scaling is chosen so E||column||_2^2 = 1 for each family.
    """
    if not 0 <= col_index < config.N:
        raise IndexError(f"column index {col_index} out of range [0, {config.N})")
    m = config.m
    variant = config.family.variant
    if variant == IDENTITY:
        col = np.zeros(m)
        col[col_index] = 1.0
        return col
    rng = _column_rng(config.seed, col_index)
    if variant == GAUSSIAN:
        return rng.standard_normal(m) / math.sqrt(m)
    if variant == RADEMACHER:
        signs = 2.0 * rng.integers(0, 2, size=m) - 1.0
        return signs / math.sqrt(m)
    # sparse_sign: +-sqrt(s/m) with probability 1/(2s) each, else 0
    s = config.family.s
    u = rng.random(m)
    mag = math.sqrt(s / m)
    half = 1.0 / (2.0 * s)
    return np.where(u < half, mag, np.where(u >= 1.0 - half, -mag, 0.0))


def materialize_phi(config: SketchConfig, budget_mb=None) -> np.ndarray:
    """Dense m x N operator whose i-th column equals phi_column(config, i).

    Oracle-side only; subject to the materialization budget.
    """
    check_budget(config.m * config.N * 8, f"dense {config.m}x{config.N} operator", budget_mb)
    out = np.empty((config.m, config.N))
    for j in range(config.N):
        out[:, j] = phi_column(config, j)
    return out
