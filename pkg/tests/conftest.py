import numpy as np
import pytest

from sksvd import JlFamily, SketchConfig


def planted_matrix(N, n, sigmas, rng):
    """Random N x n matrix with the given singular values, via QR factors."""
    sig = np.asarray(sigmas, dtype=float)
    k = sig.size
    U, _ = np.linalg.qr(rng.standard_normal((N, k)))
    V, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return (U * sig) @ V.T, U, V


def identity_config(n_side, n_cols, **kw):
    """Config whose operator is the identity (test override), m = N."""
    base = dict(seed=0, family=JlFamily("identity"), m=n_side, N=n_side,
                n=n_cols, eps=0.5, delta=0.05)
    base.update(kw)
    return SketchConfig(**base)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
