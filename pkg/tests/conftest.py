"""Shared fixtures and independent oracles.

The 2x2 helpers below are deliberate re-derivations: adjugate inverse and
Cayley-Hamilton square root, no eigendecomposition.  They exist so the
library's spectral path can be checked against arithmetic that shares none
of its code.
"""

from __future__ import annotations

import numpy as np
import pytest

from qhmeans import PositiveDefiniteMatrix, pd

REF_A1 = np.diag([4.0, 1.0])
REF_A2 = 0.5 * np.array([[5.0, 3.0], [3.0, 5.0]])
REF_BARYCENTER = np.array([[2.99035, 0.634419], [0.634419, 1.72151]])
REF_ONE_STEP = np.array([[3.02915, 0.673215], [0.673215, 1.68272]])

# Frozen against the Cayley-Hamilton oracle below.
REF_PHI_A1_A2 = 0.5827389570061385
REF_OBJECTIVE_AT_I = 0.5


def inv2(M):
    """Adjugate inverse of a 2x2 matrix."""
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det


def sqrt2(M):
    """Cayley-Hamilton principal square root of a 2x2 PSD matrix."""
    tr = M[0, 0] + M[1, 1]
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    s = np.sqrt(det)
    return (M + s * np.eye(2)) / np.sqrt(tr + 2 * s)


def geomean2(A, B):
    """Geometric mean of 2x2 PD matrices via the closed-form square root."""
    r = sqrt2(A)
    ri = inv2(r)
    return r @ sqrt2(ri @ B @ ri) @ r


def hellinger_phi2(A, B):
    """phi with the square-root generator on 2x2 inputs, oracle path."""
    return np.trace(0.5 * (A + B) - geomean2(A, B)).real


def random_pd_np(rng, dim, spread=1.0):
    """Well-conditioned random PD matrix as a plain complex array."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(g)
    eigs = np.exp(rng.uniform(-spread, spread, size=dim))
    return (q * eigs) @ q.conj().T


def random_hermitian_np(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (g + g.conj().T) / 2
    return h / np.linalg.norm(h)


def random_unitary_np(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def ref_pair():
    return pd(REF_A1), pd(REF_A2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def assert_pd(M) -> PositiveDefiniteMatrix:
    return pd(M)
