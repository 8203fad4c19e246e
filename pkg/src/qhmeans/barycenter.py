"""Barycenters on the positive definite cone and the associated mean equations.

The barycenter of matrices A_1..A_m with weights w under the divergence phi
is the unique minimizer of X -> sum_j w_j phi(A_j, X).  Its gradient has an
exact quadrature form over the generator's representing measure, which both
the descent solver and the stationarity residual share.  The fixed-point
solvers iterate the power-mean equation and the noncommutative mean equation;
for commuting inputs all of these agree, and the gap between the barycenter
and the mean-equation solution quantifies noncommutativity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._accel import grad_quad_sum, power_mean_step
from .errors import (
    DimensionMismatchError,
    DomainError,
    NonConvergenceError,
    UnsupportedGeneratorError,
)
from .generators import DivergenceSpec, Generator
from .hermitian import (
    HermitianMatrix,
    MatrixLike,
    PositiveDefiniteMatrix,
    _mat,
    frobenius_dist,
    pd,
    thompson_dist,
)
from .measures import DEFAULT_QUAD_ORDER, Measure, quadrature

# Gradient integrals use a coarser default than scalar generator evaluation:
# the integrand's poles sit far from [0,1] for moderately conditioned
# ensembles, so 64 nodes already reach well below the solver tolerances.
GRADIENT_QUAD_ORDER = 64

_MIN_STEP = 1e-18


@dataclass(frozen=True, eq=False)
class WeightedEnsemble:
    """Positive definite matrices A_1..A_m with positive weights summing to 1."""

    matrices: tuple
    weights: np.ndarray

    def __post_init__(self):
        mats = tuple(pd(A) for A in self.matrices)
        if not mats:
            raise DomainError("an ensemble needs at least one matrix")
        dim = mats[0].dim
        if any(A.dim != dim for A in mats):
            raise DimensionMismatchError("all ensemble matrices must share a dimension")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (len(mats),):
            raise DimensionMismatchError(
                f"{len(mats)} matrices but weight vector of shape {w.shape}"
            )
        if np.any(w <= 0):
            raise DomainError("ensemble weights must be strictly positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"ensemble weights sum to {w.sum()!r}, expected 1")
        w.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.matrices[0].dim

    @property
    def size(self) -> int:
        return len(self.matrices)

    def arithmetic_mean(self) -> PositiveDefiniteMatrix:
        acc = sum(w * A.mat for w, A in zip(self.weights, self.matrices))
        return PositiveDefiniteMatrix(acc)


def ensemble(matrices: Sequence[MatrixLike], weights: Sequence[float]) -> WeightedEnsemble:
    """Convenience constructor accepting raw arrays."""
    return WeightedEnsemble(tuple(matrices), np.asarray(weights, dtype=np.float64))


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 500
    residual_tol: float = 1e-8
    line_search_shrink: float = 0.5
    armijo_c: float = 1e-4
    initial_guess: Optional[PositiveDefiniteMatrix] = None
    damping: float = 1.0
    quad_order: int = GRADIENT_QUAD_ORDER

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if self.residual_tol <= 0:
            raise DomainError("residual_tol must be positive")
        if not 0.0 < self.line_search_shrink < 1.0:
            raise DomainError("line_search_shrink must lie in (0,1)")
        if not 0.0 < self.armijo_c < 0.5:
            raise DomainError("armijo_c must lie in (0, 0.5)")
        if not 0.0 < self.damping <= 1.0:
            raise DomainError("damping must lie in (0, 1]")
        if self.quad_order < 2:
            raise DomainError("quad_order must be at least 2")


@dataclass(frozen=True, eq=False)
class SolverReport:
    """Outcome of a solver run.

    objective_trace holds per-iteration objective values for the descent
    solver and relative step sizes for the fixed-point solvers.
    """

    solution: PositiveDefiniteMatrix
    iterations: int
    final_residual: float
    objective_trace: list
    converged: bool


class _Workspace:
    """Per-solve immutable precomputation shared by objective and gradient."""

    def __init__(self, ens: WeightedEnsemble, spec: DivergenceSpec, quad_order: int):
        self.ens = ens
        self.spec = spec
        mu = spec.generator.representing_measure()
        if mu is None:
            raise UnsupportedGeneratorError(
                f"{type(spec.generator).__name__} carries no representing measure; "
                "the barycenter gradient needs one"
            )
        rule = quadrature(mu, quad_order)
        self.nodes = np.ascontiguousarray(rule.nodes)
        self.qweights = np.ascontiguousarray(rule.weights)
        self.weights = np.ascontiguousarray(ens.weights)
        self.mats = np.ascontiguousarray(
            np.stack([A.mat for A in ens.matrices]).astype(np.complex128)
        )
        self.inv_mats = np.ascontiguousarray(np.linalg.inv(self.mats))
        iroots = []
        for A in ens.matrices:
            w, U = np.linalg.eigh(A.mat)
            iroots.append((U * (1.0 / np.sqrt(w))) @ U.conj().T)
        self.inv_roots = np.stack(iroots)
        self.const = float(
            (1 - spec.c) * sum(w * np.trace(A.mat).real for w, A in zip(ens.weights, ens.matrices))
        )
        self.c = spec.c

    def objective(self, X: np.ndarray) -> float:
        f = self.spec.generator.f
        total = self.const + self.c * float(np.trace(X).real)
        M = self.inv_roots @ X @ self.inv_roots
        M = (M + np.conj(np.swapaxes(M, -1, -2))) / 2
        e, V = np.linalg.eigh(M)
        fe = np.asarray(f(e), dtype=np.float64)
        fM = (V * fe[:, None, :]) @ np.conj(np.swapaxes(V, -1, -2))
        means = np.einsum("jab,jba->j", fM, self.mats).real
        return total - float(np.dot(self.weights, means))

    def gradient(self, X: np.ndarray) -> np.ndarray:
        acc = grad_quad_sum(X, self.inv_mats, self.weights, self.nodes, self.qweights)
        G = self.c * np.eye(X.shape[0], dtype=np.complex128) - acc
        return (G + G.conj().T) / 2


def objective(ens: WeightedEnsemble, X: MatrixLike, spec: DivergenceSpec) -> float:
    """Weighted divergence sum F(X) = sum_j w_j phi(A_j, X)."""
    ws = _Workspace(ens, spec, GRADIENT_QUAD_ORDER)
    return ws.objective(_as_state(ens, X))


def _as_state(ens: WeightedEnsemble, X: MatrixLike) -> np.ndarray:
    Xm = _mat(pd(X))
    if Xm.shape[0] != ens.dim:
        raise DimensionMismatchError(
            f"ensemble dimension {ens.dim} vs argument dimension {Xm.shape[0]}"
        )
    return np.ascontiguousarray(Xm.astype(np.complex128))


def euclidean_gradient(
    ens: WeightedEnsemble,
    X: MatrixLike,
    spec: DivergenceSpec,
    quad_order: int = GRADIENT_QUAD_ORDER,
) -> HermitianMatrix:
    """Euclidean gradient G of the barycenter objective at X.

    G = c I - sum_j w_j integral of l |(1-l) A_j^{-1} X + l I|^{-2} dmu(l),
    evaluated on the representing measure's quadrature nodes; the directional
    derivative in any Hermitian direction Y is Tr(G Y).
    """
    ws = _Workspace(ens, spec, quad_order)
    return HermitianMatrix(ws.gradient(_as_state(ens, X)))


def residual(
    ens: WeightedEnsemble,
    X: MatrixLike,
    spec: DivergenceSpec,
    quad_order: int = GRADIENT_QUAD_ORDER,
) -> float:
    """Frobenius norm of the stationarity defect at X (zero at the barycenter)."""
    return float(np.linalg.norm(euclidean_gradient(ens, X, spec, quad_order).mat))


def frechet_derivative_fmu(
    mu: Measure,
    X: MatrixLike,
    Y: MatrixLike,
    order: int = DEFAULT_QUAD_ORDER,
) -> HermitianMatrix:
    """Derivative of the matrix generator X -> f_mu(X) in direction Y.

    Quadrature form: integral of l ((1-l) X + l I)^{-1} Y ((1-l) X + l I)^{-1};
    agrees with the divided-difference evaluation of the same derivative.
    """
    Xm = _mat(pd(X))
    Ym = _mat(Y)
    if Xm.shape != Ym.shape:
        raise DimensionMismatchError(f"dimension mismatch: {Xm.shape} vs {Ym.shape}")
    rule = quadrature(mu, order)
    l = rule.nodes[:, None, None]
    eye = np.eye(Xm.shape[0], dtype=np.complex128)
    R = np.linalg.inv((1 - l) * Xm + l * eye)
    out = np.einsum("k,kab,bc,kcd->ad", rule.weights * rule.nodes, R, Ym, R)
    return HermitianMatrix(out)


def _cholesky_ok(X: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return False
    return True


def _initial_state(ens: WeightedEnsemble, opts: SolverOptions) -> np.ndarray:
    if opts.initial_guess is not None:
        return _as_state(ens, opts.initial_guess)
    return _as_state(ens, ens.arithmetic_mean())


def solve_barycenter(
    ens: WeightedEnsemble,
    spec: DivergenceSpec,
    opts: Optional[SolverOptions] = None,
) -> SolverReport:
    """Minimize sum_j w_j phi(A_j, X) by gradient descent with Armijo backtracking.

    Each iteration seeds the line search with a Barzilai-Borwein step estimate
    and backtracks from there; steps leaving the positive definite cone are
    detected by a failed Cholesky factorization and rejected.  Convergence is
    declared on the stationarity residual, not on objective stagnation.
    Non-convergence is reported, not raised.
    """
    opts = opts or SolverOptions()
    ws = _Workspace(ens, spec, opts.quad_order)
    X = _initial_state(ens, opts)
    trace = [ws.objective(X)]
    step = 1.0
    prev_X = None
    prev_G = None
    iterations = 0
    converged = False
    res = np.inf
    for _ in range(opts.max_iterations):
        G = ws.gradient(X)
        res = float(np.linalg.norm(G))
        if res <= opts.residual_tol:
            converged = True
            break
        f0 = trace[-1]
        slope = res * res
        # Barzilai-Borwein initial step from the last (X, G) change, ignored
        # when the previous step was at rounding level; plain doubling
        # otherwise.  Armijo backtracking below safeguards either choice.
        s = 2.0 * step
        if prev_X is not None:
            dX = X - prev_X
            dG = G - prev_G
            if np.linalg.norm(dX) > 1e-13 * np.linalg.norm(X):
                curv = float(np.tensordot(dX.conj(), dG, axes=2).real)
                if curv > 0:
                    s = float(np.tensordot(dX.conj(), dX, axes=2).real) / curv
        prev_X, prev_G = X, G
        s = min(max(s, 1e-12), 1e12)
        s_init = s
        accepted = False
        while s >= _MIN_STEP:
            Xt = X - s * G
            Xt = (Xt + Xt.conj().T) / 2
            if not _cholesky_ok(Xt):
                s *= opts.line_search_shrink
                continue
            ft = ws.objective(Xt)
            # ft < f0 keeps the test honest once c*s*|G|^2 underflows the
            # objective's resolution; it never rejects a genuine decrease.
            if ft <= f0 - opts.armijo_c * s * slope and ft < f0:
                accepted = True
                break
            s *= opts.line_search_shrink
        if not accepted:
            # Near the optimum the objective is flat to rounding, but the
            # residual is still accurately computable: sweep a wide range of
            # scales and take the best residual among steps that do not
            # measurably increase the objective.  The cap keeps the recorded
            # trace non-increasing up to 1e-12.
            noise_slack = min(1e-13 * max(1.0, abs(f0)), 1e-12)
            s_try = 64.0 * max(s_init, step, 1.0)
            best = None
            for _ in range(48):
                Xt = X - s_try * G
                Xt = (Xt + Xt.conj().T) / 2
                if _cholesky_ok(Xt):
                    ft = ws.objective(Xt)
                    if ft <= f0 + noise_slack:
                        r_t = float(np.linalg.norm(ws.gradient(Xt)))
                        if best is None or r_t < best[0]:
                            best = (r_t, s_try, Xt, ft)
                s_try *= opts.line_search_shrink
            if best is not None and best[0] <= (1 - 1e-3) * res:
                _, s, Xt, ft = best
                accepted = True
        if not accepted:
            break
        X = Xt
        step = s
        trace.append(ft)
        iterations += 1
    else:
        res = float(np.linalg.norm(ws.gradient(X)))
        converged = res <= opts.residual_tol
    return SolverReport(
        solution=PositiveDefiniteMatrix(X),
        iterations=iterations,
        final_residual=res,
        objective_trace=trace,
        converged=converged,
    )


def _fixed_point(ens, opts, step_fn) -> SolverReport:
    """Damped Picard iteration with oscillation-triggered damping halving."""
    X = _initial_state(ens, opts)
    damping = opts.damping
    floor = opts.damping / 16
    prev_delta = np.inf
    increases = 0
    deltas: list = []
    converged = False
    delta = np.inf
    iterations = 0
    for _ in range(opts.max_iterations):
        T = step_fn(X)
        Xn = (1 - damping) * X + damping * T
        Xn = (Xn + Xn.conj().T) / 2
        delta = float(np.linalg.norm(Xn - X) / max(np.linalg.norm(X), 1e-300))
        deltas.append(delta)
        iterations += 1
        X = Xn
        if delta <= opts.residual_tol:
            converged = True
            break
        if delta > prev_delta:
            increases += 1
            if increases >= 2 and damping / 2 >= floor:
                damping /= 2
                increases = 0
        else:
            increases = 0
        prev_delta = delta
    return SolverReport(
        solution=PositiveDefiniteMatrix(X),
        iterations=iterations,
        final_residual=delta if deltas else 0.0,
        objective_trace=deltas,
        converged=converged or (not deltas),
    )


def solve_power_mean(
    ens: WeightedEnsemble,
    t: float,
    opts: Optional[SolverOptions] = None,
) -> SolverReport:
    """Weighted power mean of order 1-t: the fixed point of
    X = sum_j w_j (X #_{1-t} A_j)."""
    if not 0.0 < t < 1.0:
        raise DomainError(f"power order t={t} must lie in (0,1)")
    opts = opts or SolverOptions()
    mats = np.ascontiguousarray(
        np.stack([A.mat for A in ens.matrices]).astype(np.complex128)
    )
    weights = np.ascontiguousarray(ens.weights)
    s = 1.0 - t

    def step(X):
        return power_mean_step(X, mats, weights, s)

    return _fixed_point(ens, opts, step)


def solve_mean_equation(
    ens: WeightedEnsemble,
    spec: DivergenceSpec | Generator,
    opts: Optional[SolverOptions] = None,
) -> SolverReport:
    """Solve X = (1/c) sum_j w_j X^{1/2} f'((X^{-1/2} A_j X^{-1/2})^{-1}) X^{1/2}.

    This is the commutative stationarity equation read noncommutatively; for
    the square-root generator it reduces to the order-1/2 power mean equation.
    Accepts a DivergenceSpec or a bare generator (e.g. the log generator,
    whose equation collapses to the weighted arithmetic mean).
    """
    opts = opts or SolverOptions()
    gen = spec.generator if isinstance(spec, DivergenceSpec) else spec
    fp1 = float(np.asarray(gen.f_prime(1.0), dtype=np.float64))
    if fp1 <= 0:
        raise DomainError("generator must have positive derivative at 1")
    mats = [A.mat for A in ens.matrices]
    weights = ens.weights

    def step(X):
        w, U = np.linalg.eigh(X)
        root = (U * np.sqrt(w)) @ U.conj().T
        iroot = (U * (1.0 / np.sqrt(w))) @ U.conj().T
        acc = np.zeros_like(X)
        for wj, Aj in zip(weights, mats):
            M = iroot @ Aj @ iroot
            M = (M + M.conj().T) / 2
            e, V = np.linalg.eigh(M)
            vals = np.asarray(gen.f_prime(1.0 / e), dtype=np.float64)
            acc += wj * ((V * vals) @ V.conj().T)
        return root @ acc @ root / fp1

    return _fixed_point(ens, opts, step)


def noncommutativity_measure(
    ens: WeightedEnsemble,
    spec: DivergenceSpec,
    metric: str = "frobenius",
    opts: Optional[SolverOptions] = None,
) -> float:
    """Distance between the barycenter and the mean-equation solution.

    Vanishes (up to solver tolerance) on pairwise commuting ensembles; a
    strictly positive value witnesses noncommutativity.
    """
    if metric not in ("frobenius", "thompson"):
        raise DomainError(f"unknown metric {metric!r}; use 'frobenius' or 'thompson'")
    bary = solve_barycenter(ens, spec, opts)
    if not bary.converged:
        raise NonConvergenceError(
            f"solve_barycenter did not converge (residual {bary.final_residual:.3e})"
        )
    mean = solve_mean_equation(ens, spec, opts)
    if not mean.converged:
        raise NonConvergenceError(
            f"solve_mean_equation did not converge (residual {mean.final_residual:.3e})"
        )
    dist = frobenius_dist if metric == "frobenius" else thompson_dist
    return float(dist(bary.solution, mean.solution))
