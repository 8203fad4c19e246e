"""Kubo-Ando means and the divergences built from them.

The central quantity is phi(A, B) = Tr((1-c) A + c B - A sigma B) for a mean
sigma with weight c.  Three algebraically equivalent evaluation paths are
provided (direct, through g, through an operator Bregman divergence); tests
hold them to pairwise agreement, so a regression in any one path is caught
by the others.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import (
    CommutativityError,
    DimensionMismatchError,
    DomainError,
    UnsupportedGeneratorError,
)
from .generators import DivergenceSpec, Generator, is_mean_normalized
from .hermitian import (
    HermitianMatrix,
    MatrixLike,
    PositiveDefiniteMatrix,
    _apply_spectral_raw,
    _mat,
    frechet_derivative,
    inv_sqrt_pd,
    pd,
    sqrt_pd,
)

COMMUTE_RTOL = 1e-8


def _check_dims(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def _middle_term(A: PositiveDefiniteMatrix, B: MatrixLike) -> np.ndarray:
    """A^{-1/2} B A^{-1/2}, the congruence that normalizes the first slot."""
    s = inv_sqrt_pd(A).mat
    b = _mat(B)
    _check_dims(s, b)
    m = s @ b @ s
    return (m + m.conj().T) / 2


def kubo_ando_mean(A: MatrixLike, B: MatrixLike, gen: Generator) -> PositiveDefiniteMatrix:
    """Operator mean A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}.

    Args:
        A, B: positive definite matrices of equal dimension.
        gen: a mean-normalized generator (f(1) = 1, weight in (0,1)).
    """
    if not is_mean_normalized(gen):
        raise UnsupportedGeneratorError(
            f"{type(gen).__name__} is not mean-normalized; "
            "operator means need f(1) = 1 and weight in (0,1)"
        )
    A = pd(A)
    middle = _apply_spectral_raw(_middle_term(A, pd(B)), gen.f)
    r = sqrt_pd(A).mat
    return PositiveDefiniteMatrix(r @ middle @ r)


def phi(A: MatrixLike, B: MatrixLike, spec: DivergenceSpec) -> float:
    """Divergence Tr((1-c) A + c B - A sigma B); nonnegative, zero iff A = B."""
    A, B = pd(A), pd(B)
    mean = kubo_ando_mean(A, B, spec.generator).mat
    val = (1 - spec.c) * np.trace(A.mat) + spec.c * np.trace(B.mat) - np.trace(mean)
    return float(val.real)


def g_of(spec: DivergenceSpec, x):
    """Scalar g(x) = (1-c) + c x - f(x); vanishes at 1, nonnegative on (0,inf)."""
    xs = np.asarray(x, dtype=np.float64)
    if np.any(xs <= 0):
        raise DomainError("g is only defined on (0, infinity)")
    vals = (1 - spec.c) + spec.c * xs - spec.generator.f(xs)
    return float(vals) if xs.ndim == 0 else vals


def phi_via_g(A: MatrixLike, B: MatrixLike, spec: DivergenceSpec) -> float:
    """Evaluate phi as Tr[A g(A^{-1/2} B A^{-1/2})]."""
    A = pd(A)
    gmat = _apply_spectral_raw(_middle_term(A, pd(B)), lambda w: g_of(spec, w))
    return float(np.trace(A.mat @ gmat).real)


def maximal_f_divergence(A: MatrixLike, B: MatrixLike, f: Callable) -> float:
    """Tr A f(A^{-1/2} B A^{-1/2}) for an arbitrary scalar f.

    No sign guarantee: with f(x) = x log x this is negative at (I, I/e), and
    with f(x) = x^2 it is Tr A > 0 on the diagonal, so it only becomes a
    genuine divergence for f of the g form above.
    """
    A = pd(A)
    fmat = _apply_spectral_raw(_middle_term(A, pd(B)), f)
    return float(np.trace(A.mat @ fmat).real)


def operator_bregman(
    h: Callable,
    h_prime: Callable,
    X: MatrixLike,
    Y: MatrixLike,
) -> HermitianMatrix:
    """Operator-valued Bregman divergence h(X) - h(Y) - Dh(Y)[X - Y].

    Dh(Y) is evaluated by divided differences in the eigenbasis of Y; the
    result is positive semidefinite for operator convex h.
    """
    X, Y = pd(X), pd(Y)
    _check_dims(X.mat, Y.mat)
    hX = _apply_spectral_raw(X.mat, h)
    hY = _apply_spectral_raw(Y.mat, h)
    dh = frechet_derivative(h, h_prime, Y, X.mat - Y.mat).mat
    return HermitianMatrix(hX - hY - dh)


def phi_via_bregman(A: MatrixLike, B: MatrixLike, spec: DivergenceSpec) -> float:
    """Evaluate phi as Tr[A H_h(A^{-1/2} B A^{-1/2}, I)] with h = -f."""
    A = pd(A)
    gen = spec.generator
    middle = PositiveDefiniteMatrix(_middle_term(A, pd(B)))
    eye = PositiveDefiniteMatrix(np.eye(A.dim))
    breg = operator_bregman(
        lambda w: -np.asarray(gen.f(w), dtype=np.float64),
        lambda w: -np.asarray(gen.f_prime(w), dtype=np.float64),
        middle,
        eye,
    )
    return float(np.trace(A.mat @ breg.mat).real)


def commutative_phi(A: MatrixLike, B: MatrixLike, gen: Generator) -> float:
    """Divergence Tr[(f(1)-f'(1)) A + f'(1) B - A f(A^{-1} B)] for commuting
    positive definite A, B and a strictly concave C^1 generator.

    For the log generator this is the relative entropy
    Tr(A (log A - log B) + B - A).
    """
    A, B = pd(A), pd(B)
    _check_dims(A.mat, B.mat)
    comm = np.linalg.norm(A.mat @ B.mat - B.mat @ A.mat)
    bound = COMMUTE_RTOL * np.linalg.norm(A.mat) * np.linalg.norm(B.mat)
    if comm > bound:
        raise CommutativityError(
            f"inputs do not commute: ||AB - BA||_F = {comm:.3e} exceeds {bound:.3e}"
        )
    # For commuting arguments A^{-1} B equals the Hermitian congruence
    # A^{-1/2} B A^{-1/2}, which keeps the evaluation in spectral calculus.
    middle = _middle_term(A, B)
    f1 = float(np.asarray(gen.f(1.0), dtype=np.float64))
    fp1 = float(np.asarray(gen.f_prime(1.0), dtype=np.float64))
    fmat = _apply_spectral_raw(middle, gen.f)
    val = (
        (f1 - fp1) * np.trace(A.mat)
        + fp1 * np.trace(B.mat)
        - np.trace(A.mat @ fmat)
    )
    return float(val.real)


def classical_hellinger(p, q) -> float:
    """Squared Hellinger distance (1/2) sum (sqrt(p_i) - sqrt(q_i))^2."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise DimensionMismatchError("probability vectors must be equal-length 1-d")
    if np.any(p < 0) or np.any(q < 0):
        raise DomainError("probability vectors must be nonnegative")
    for name, v in (("p", p), ("q", q)):
        if abs(v.sum() - 1.0) > 1e-10:
            raise DomainError(f"{name} sums to {v.sum()!r}, expected 1")
    return float(0.5 * np.sum((np.sqrt(p) - np.sqrt(q)) ** 2))
