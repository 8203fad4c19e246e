"""Complex Hermitian / positive definite matrix types and spectral calculus.

All matrix functions go through a single primitive, the eigendecomposition:
dimensions here are small enough that correctness and auditability beat
Pade or scaling-and-squaring schemes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ComputationError, DimensionMismatchError, DomainError

HERMITIAN_ATOL = 1e-12
# Scale-aware positivity floor: min eigenvalue must exceed this fraction of
# the largest one, so well-conditioned matrices are never spuriously rejected
# whatever their overall scale.  The floor sits below the conditioning-warning
# threshold so near-singular (but numerically positive) inputs are accepted
# with a warning rather than silently rejected.
PD_REL_FLOOR = 1e-15
COND_WARN_THRESHOLD = 1e14


class ConditioningWarning(UserWarning):
    """The input is close to singular; the result may have lost precision."""


MatrixLike = Union["HermitianMatrix", np.ndarray, list]


def _as_square_complex(entries) -> np.ndarray:
    mat = np.asarray(entries, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {mat.shape}")
    return mat


def _mat(x: MatrixLike) -> np.ndarray:
    """Raw complex ndarray behind a matrix wrapper (or array-like)."""
    if isinstance(x, HermitianMatrix):
        return x.mat
    return _as_square_complex(x)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A d x d complex matrix, symmetrized to (M + M*)/2 on construction.

    Symmetrizing instead of rejecting absorbs the floating-point drift that
    iterative matrix algebra accumulates.
    """

    mat: np.ndarray

    def __post_init__(self):
        mat = _as_square_complex(self.mat)
        mat = (mat + mat.conj().T) / 2
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def trace(self) -> float:
        return float(np.trace(self.mat).real)


@dataclass(frozen=True, eq=False)
class PositiveDefiniteMatrix(HermitianMatrix):
    """Hermitian matrix whose smallest eigenvalue is strictly positive."""

    def __post_init__(self):
        super().__post_init__()
        w = np.linalg.eigvalsh(self.mat)
        if w[0] <= 0 or w[0] <= PD_REL_FLOOR * abs(w[-1]):
            raise DomainError(
                f"matrix is not positive definite: min eigenvalue {w[0]:.3e}, "
                f"max eigenvalue {w[-1]:.3e}"
            )


def herm(entries: MatrixLike) -> HermitianMatrix:
    """Construct a HermitianMatrix from any square array-like."""
    if isinstance(entries, PositiveDefiniteMatrix):
        return entries
    if isinstance(entries, HermitianMatrix):
        return entries
    return HermitianMatrix(np.asarray(entries))


def pd(entries: MatrixLike) -> PositiveDefiniteMatrix:
    """Construct a PositiveDefiniteMatrix from any square array-like."""
    if isinstance(entries, PositiveDefiniteMatrix):
        return entries
    return PositiveDefiniteMatrix(_mat(entries))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in ascending order plus the unitary of eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reassemble(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


def eig_hermitian(H: MatrixLike) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix, eigenvalues ascending."""
    mat = _mat(herm(H))
    try:
        w, U = np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise ComputationError(
            f"eigendecomposition failed to converge for\n{mat!r}"
        ) from exc
    return SpectralDecomposition(eigenvalues=w, eigenvectors=U)


def _apply_spectral_raw(mat: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """U diag(fn(w)) U* without wrapper overhead; fn must be finite on w."""
    w, U = np.linalg.eigh(mat)
    with np.errstate(all="ignore"):
        fw = np.asarray(fn(w), dtype=np.float64)
    bad = ~np.isfinite(fw)
    if bad.any():
        raise DomainError(
            f"function is not finite at eigenvalue(s) {w[bad].tolist()}"
        )
    return (U * fw) @ U.conj().T


def apply_spectral(A: MatrixLike, fn: Callable) -> HermitianMatrix:
    """Apply a scalar function to a matrix through its eigendecomposition.

    Args:
        A: positive definite matrix (the spectrum must lie in fn's domain).
        fn: real scalar function, vectorized over a 1-d eigenvalue array.

    Returns:
        HermitianMatrix U diag(fn(lambda)) U*; commutes with A.
    """
    return HermitianMatrix(_apply_spectral_raw(_mat(A), fn))


def _warn_if_ill_conditioned(w: np.ndarray) -> None:
    if w[0] > 0 and w[-1] / w[0] > COND_WARN_THRESHOLD:
        warnings.warn(
            f"condition number {w[-1] / w[0]:.3e} exceeds {COND_WARN_THRESHOLD:.0e}; "
            "spectral results may lose precision",
            ConditioningWarning,
            stacklevel=3,
        )


def _pd_spectral(A: MatrixLike, fn: Callable) -> PositiveDefiniteMatrix:
    mat = _mat(pd(A))
    w, U = np.linalg.eigh(mat)
    _warn_if_ill_conditioned(w)
    return PositiveDefiniteMatrix((U * fn(w)) @ U.conj().T)


def sqrt_pd(A: MatrixLike) -> PositiveDefiniteMatrix:
    """Principal matrix square root of a positive definite matrix."""
    return _pd_spectral(A, np.sqrt)


def inv_sqrt_pd(A: MatrixLike) -> PositiveDefiniteMatrix:
    """Inverse matrix square root of a positive definite matrix."""
    return _pd_spectral(A, lambda w: 1.0 / np.sqrt(w))


def inv_pd(A: MatrixLike) -> PositiveDefiniteMatrix:
    """Inverse of a positive definite matrix."""
    return _pd_spectral(A, lambda w: 1.0 / w)


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: {a.shape} vs {b.shape}"
        )


def loewner_leq(A: MatrixLike, B: MatrixLike, tol: float = 1e-10) -> bool:
    """True iff A <= B in the Loewner order, i.e. min eig(B - A) >= -tol."""
    a, b = _mat(A), _mat(B)
    _check_same_dim(a, b)
    diff = b - a
    diff = (diff + diff.conj().T) / 2
    return bool(np.linalg.eigvalsh(diff)[0] >= -tol)


def frobenius_dist(A: MatrixLike, B: MatrixLike) -> float:
    """Frobenius distance ||A - B||_F."""
    a, b = _mat(A), _mat(B)
    _check_same_dim(a, b)
    return float(np.linalg.norm(a - b))


def thompson_dist(A: MatrixLike, B: MatrixLike) -> float:
    """Thompson metric max_i |log lambda_i(A^{-1/2} B A^{-1/2})|."""
    a, b = pd(A), pd(B)
    _check_same_dim(a.mat, b.mat)
    s = inv_sqrt_pd(a).mat
    w = np.linalg.eigvalsh(s @ b.mat @ s)
    if w[0] <= 0:
        raise DomainError("Thompson metric requires positive definite inputs")
    return float(np.max(np.abs(np.log(w))))


def is_positive_definite(H: MatrixLike, tol: float = 1e-12) -> bool:
    """True iff the smallest eigenvalue of a Hermitian matrix exceeds tol."""
    return bool(np.linalg.eigvalsh(_mat(herm(H)))[0] > tol)


def frechet_derivative(
    fn: Callable,
    fn_prime: Callable,
    X: MatrixLike,
    Y: MatrixLike,
) -> HermitianMatrix:
    """Derivative of the matrix function fn at X in direction Y.

    Uses the divided-difference (Daleckii-Krein) formula in the eigenbasis
    of X, with fn'(lambda) on near-degenerate eigenvalue pairs.
    """
    x, y = _mat(X), _mat(Y)
    _check_same_dim(x, y)
    w, U = np.linalg.eigh((x + x.conj().T) / 2)
    fw = np.asarray(fn(w), dtype=np.float64)
    dw = np.asarray(fn_prime(w), dtype=np.float64)
    if not (np.isfinite(fw).all() and np.isfinite(dw).all()):
        raise DomainError("function or derivative not finite on the spectrum")
    num = fw[:, None] - fw[None, :]
    den = w[:, None] - w[None, :]
    scale = np.maximum(np.abs(w[:, None]), np.abs(w[None, :]))
    degenerate = np.abs(den) <= 1e-10 * np.maximum(scale, 1.0)
    ratio = np.where(degenerate, 0.0, num / np.where(degenerate, 1.0, den))
    table = np.where(degenerate, (dw[:, None] + dw[None, :]) / 2, ratio)
    inner = U.conj().T @ y @ U
    return HermitianMatrix(U @ (table * inner) @ U.conj().T)
