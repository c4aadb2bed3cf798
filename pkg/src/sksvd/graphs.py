"""Dynamic graph streams sketched through the implicit incidence matrix.

A weighted undirected graph on n vertices is presented as a stream of
edge updates (u, v, delta).  The implicit data matrix is the incidence
matrix with one row per unordered vertex pair - n(n-1)/2 rows, far too
many to store, which is exactly why the sketch generates operator
columns on demand.  Orientation is fixed by canonical vertex order (the
smaller endpoint gets +delta) so streams are replayable and states
mergeable.

The Gram matrix of the incidence matrix is the graph Laplacian for
unit weights, so the sketch's squared singular values estimate Laplacian
eigenvalues and its right singular vectors estimate the eigenvectors.
For non-unit weights the incidence Gram carries squared weights off the
diagonal and differs from degree-minus-adjacency; certification is
against the incidence Gram, and the oracle reports both so the
discrepancy is visible.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .budget import check_budget
from .errors import StreamFormatError
from .jl import JlFamily, SketchConfig, phi_column, required_measurements
from .spectral import DEFAULT_TOL, SpectralEstimate, sketched_svd
from .turnstile import SketchState, new_sketch, snapshot


@dataclass(frozen=True)
class EdgeUpdate:
    u: int
    v: int
    delta: float


@dataclass
class GraphSketch:
    vertices: int
    inner: SketchState


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def graph_config(vertices: int, eps: float, delta: float, seed: int,
                 k: int | None = None, m: int | None = None,
                 family: JlFamily = JlFamily()) -> SketchConfig:
    """Sketch config for a graph stream: N = n(n-1)/2 rows, one column per vertex.

    ``m`` is computed from ``k`` (default: the maximum possible rank n-1)
    when not given explicitly.
    """
    if vertices < 2:
        raise ValueError(f"need at least 2 vertices, got {vertices}")
    if m is None:
        m = required_measurements(k if k is not None else vertices - 1, eps, delta, family)
    return SketchConfig(seed=seed, family=family, m=m, N=pair_count(vertices),
                        n=vertices, eps=eps, delta=delta, k_hint=k)


def new_graph_sketch(config: SketchConfig) -> GraphSketch:
    if config.N != pair_count(config.n):
        raise ValueError(
            f"graph config needs N = n(n-1)/2 = {pair_count(config.n)}, got N = {config.N}"
        )
    return GraphSketch(vertices=config.n, inner=new_sketch(config))


def edge_row_index(u: int, v: int, n: int) -> int:
    """Row of the unordered pair {u, v} in the lexicographic pair enumeration.

    Bijective from unordered pairs onto [0, n(n-1)/2).
    """
    if not (isinstance(u, (int, np.integer)) and isinstance(v, (int, np.integer))):
        raise ValueError(f"vertex ids must be integers, got {u!r}, {v!r}")
    if u == v:
        raise ValueError(f"self-loop ({u}, {v}) is not a valid edge")
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"vertex pair ({u}, {v}) out of range [0, {n})")
    a, b = (u, v) if u < v else (v, u)
    return a * n - a * (a + 1) // 2 + (b - a - 1)


def apply_edge_update(g: GraphSketch, e: EdgeUpdate) -> GraphSketch:
    """Apply one edge update: +delta times the pair's operator column to the
    smaller endpoint's sketch column, -delta to the larger's."""
    n = g.vertices
    r = edge_row_index(e.u, e.v, n)  # validates the pair
    if isinstance(e.delta, bool) or not isinstance(e.delta, (int, float, np.floating)) \
            or not math.isfinite(e.delta):
        raise ValueError(f"delta must be finite, got {e.delta!r}")
    a, b = min(e.u, e.v), max(e.u, e.v)
    col = phi_column(g.inner.config, r)
    g.inner.Y[:, a] += e.delta * col
    g.inner.Y[:, b] -= e.delta * col
    g.inner.updates_applied += 2  # one edge touches two entries of the incidence matrix
    return g


def graph_spectrum(g: GraphSketch, tol: float = DEFAULT_TOL) -> SpectralEstimate:
    """Laplacian spectrum estimate: eigenvalues from squared singular values,
    eigenvectors from right singular vectors of the sketch."""
    return sketched_svd(snapshot(g.inner), tol)


@dataclass
class GraphOracle:
    """Dense ground truth for a replayed edge stream.

    laplacian       degree-minus-adjacency form, n x n
    incidence_gram  X^T X of the materialized incidence matrix; equals the
                    laplacian exactly for unit weights
    incidence       materialized incidence matrix, n(n-1)/2 x n
    components      connected components among vertices, counting edges with
                    nonzero final weight
    """

    laplacian: np.ndarray
    incidence_gram: np.ndarray
    incidence: np.ndarray
    components: int

    @property
    def rank(self) -> int:
        return self.laplacian.shape[0] - self.components


def oracle_laplacian(updates: Iterable[EdgeUpdate], n: int, strict: bool = True,
                     budget_mb=None) -> GraphOracle:
    """Replay an edge stream into the dense Laplacian and incidence matrix.

    Final edge weights must be nonnegative for a well-formed graph; with
    ``strict`` a violation raises, otherwise it warns and proceeds.
    """
    N = pair_count(n)
    check_budget(N * n * 8, f"dense {N}x{n} incidence matrix", budget_mb)
    X = np.zeros((N, n))
    weights: dict[tuple[int, int], float] = {}
    for e in updates:
        r = edge_row_index(e.u, e.v, n)
        a, b = min(e.u, e.v), max(e.u, e.v)
        X[r, a] += e.delta
        X[r, b] -= e.delta
        weights[(a, b)] = weights.get((a, b), 0.0) + e.delta

    negative = {pair: w for pair, w in weights.items() if w < 0.0}
    if negative:
        msg = f"negative final edge weights: {sorted(negative.items())[:5]}"
        if strict:
            raise ValueError(msg)
        warnings.warn(msg)

    A = np.zeros((n, n))
    rows, cols = [], []
    for (a, b), w in weights.items():
        if w != 0.0:
            A[a, b] = A[b, a] = w
            rows.append(a)
            cols.append(b)
    L = np.diag(A.sum(axis=1)) - A
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    c, _ = connected_components(adj, directed=False)
    return GraphOracle(laplacian=L, incidence_gram=X.T @ X, incidence=X, components=int(c))


def iter_edge_updates(lines: Iterable[str]) -> Iterator[EdgeUpdate]:
    """Parse a JSON-lines edge stream: {"u": int, "v": int, "delta": float}."""
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StreamFormatError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or set(obj) != {"u", "v", "delta"}:
            raise StreamFormatError(f'line {lineno}: expected {{"u", "v", "delta"}}, got {line!r}')
        u, v, delta = obj["u"], obj["v"], obj["delta"]
        if isinstance(u, bool) or isinstance(v, bool) or isinstance(delta, bool) \
                or not isinstance(u, int) or not isinstance(v, int) \
                or not isinstance(delta, (int, float)):
            raise StreamFormatError(f"line {lineno}: wrong field types in {line!r}")
        yield EdgeUpdate(u=u, v=v, delta=float(delta))
