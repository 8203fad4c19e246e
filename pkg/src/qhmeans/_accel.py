"""Hot numeric kernels, JIT-compiled when numba is usable.

Two inner loops dominate solver runtime: the quadrature sum behind the
barycenter gradient, and the weighted-geometric-mean step of the fixed-point
iterations.  Both exist twice here: a vectorized pure-numpy version (always
available, used as the reference in tests and benchmarks) and a numba version
compiled on first use.

Set QHMEANS_DISABLE_NUMBA=1 to force the pure-numpy path; the active choice
is exposed as BACKEND.  Both paths agree to floating-point roundoff.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_disabled() -> bool:
    return os.environ.get("QHMEANS_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
        "on",
    }


def grad_quad_sum_numpy(X, inv_mats, weights, nodes, qweights):
    """sum_j w_j sum_k q_k l_k (Z*)^{-1} Z^{-1},  Z = (1-l_k) X A_j^{-1} + l_k I.

    Z* equals (1-l) A_j^{-1} X + l I, so the product realizes the squared
    absolute value |(1-l) A_j^{-1} X + l I|^{-2} without matrix square roots.
    """
    d = X.shape[0]
    B = np.matmul(X, inv_mats)
    lam = nodes[None, :, None, None]
    Z = (1.0 - lam) * B[:, None, :, :] + lam * np.eye(d, dtype=np.complex128)
    Zi = np.linalg.inv(Z)
    terms = np.conj(np.swapaxes(Zi, -1, -2)) @ Zi
    coeff = weights[:, None] * (qweights * nodes)[None, :]
    return np.einsum("jk,jkab->ab", coeff, terms)


def power_mean_step_numpy(X, mats, weights, s):
    """sum_j w_j X #_s A_j with X #_s A = X^{1/2} (X^{-1/2} A X^{-1/2})^s X^{1/2}."""
    w, U = np.linalg.eigh(X)
    root = (U * np.sqrt(w)) @ U.conj().T
    iroot = (U * (1.0 / np.sqrt(w))) @ U.conj().T
    M = iroot @ mats @ iroot
    e, V = np.linalg.eigh(M)
    powered = (V * (e**s)[:, None, :]) @ np.conj(np.swapaxes(V, -1, -2))
    mean = np.einsum("j,jab->ab", weights, powered)
    return root @ mean @ root


def _inv_gauss_jordan(Z):
    # Hand-rolled pivoted Gauss-Jordan: inside the JIT kernel this avoids a
    # per-node LAPACK call, which dominates at the small dimensions used here.
    d = Z.shape[0]
    a = Z.copy()
    out = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        out[i, i] = 1.0
    for col in range(d):
        piv = col
        best = abs(a[col, col])
        for r in range(col + 1, d):
            cand = abs(a[r, col])
            if cand > best:
                best = cand
                piv = r
        if piv != col:
            for c in range(d):
                a[col, c], a[piv, c] = a[piv, c], a[col, c]
                out[col, c], out[piv, c] = out[piv, c], out[col, c]
        scale = 1.0 / a[col, col]
        for c in range(d):
            a[col, c] *= scale
            out[col, c] *= scale
        for r in range(d):
            if r == col:
                continue
            factor = a[r, col]
            if factor != 0:
                for c in range(d):
                    a[r, c] -= factor * a[col, c]
                    out[r, c] -= factor * out[col, c]
    return out


def _grad_quad_sum_loops(X, inv_mats, weights, nodes, qweights):
    d = X.shape[0]
    m = inv_mats.shape[0]
    acc = np.zeros((d, d), dtype=np.complex128)
    Z = np.empty((d, d), dtype=np.complex128)
    for j in range(m):
        B = X @ inv_mats[j]
        for k in range(nodes.shape[0]):
            lam = nodes[k]
            for r in range(d):
                for c in range(d):
                    Z[r, c] = (1.0 - lam) * B[r, c]
                Z[r, r] += lam
            Zi = _inv_gauss_jordan(Z)
            coeff = weights[j] * qweights[k] * lam
            for r in range(d):
                for c in range(d):
                    s = 0.0 + 0.0j
                    for p in range(d):
                        s += np.conj(Zi[p, r]) * Zi[p, c]
                    acc[r, c] += coeff * s
    return acc


def _power_mean_step_loops(X, mats, weights, s):
    d = X.shape[0]
    w, U = np.linalg.eigh(X)
    root = (U * np.sqrt(w).astype(np.complex128)) @ np.conj(U.T)
    iroot = (U * (1.0 / np.sqrt(w)).astype(np.complex128)) @ np.conj(U.T)
    acc = np.zeros((d, d), dtype=np.complex128)
    for j in range(mats.shape[0]):
        M = iroot @ mats[j] @ iroot
        M = (M + np.conj(M.T)) / 2.0
        e, V = np.linalg.eigh(M)
        powered = (V * (e**s).astype(np.complex128)) @ np.conj(V.T)
        acc += weights[j] * powered
    return root @ acc @ root


BACKEND = "numpy"
grad_quad_sum = grad_quad_sum_numpy
power_mean_step = power_mean_step_numpy
grad_quad_sum_numba = None
power_mean_step_numba = None

if not _numba_disabled():
    try:
        from numba import njit

        _inv_gauss_jordan = njit(cache=True, inline="always")(_inv_gauss_jordan)
        grad_quad_sum_numba = njit(cache=True)(_grad_quad_sum_loops)
        power_mean_step_numba = njit(cache=True)(_power_mean_step_loops)
        grad_quad_sum = grad_quad_sum_numba
        power_mean_step = power_mean_step_numba
        BACKEND = "numba"
    except ImportError:
        pass
