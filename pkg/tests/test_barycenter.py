import numpy as np
import pytest
from scipy.optimize import brentq

from qhmeans import (
    ArcsineMeasure,
    DimensionMismatchError,
    DivergenceSpec,
    DomainError,
    GeometricGenerator,
    LogGenerator,
    NonConvergenceError,
    SolverOptions,
    UnsupportedGeneratorError,
    arcsine_generator,
    ensemble,
    euclidean_gradient,
    frechet_derivative,
    frechet_derivative_fmu,
    f_mu,
    f_mu_prime,
    herm,
    kubo_ando_mean,
    noncommutativity_measure,
    objective,
    pd,
    residual,
    solve_barycenter,
    solve_mean_equation,
    solve_power_mean,
)

from conftest import (
    REF_A1,
    REF_A2,
    REF_BARYCENTER,
    REF_OBJECTIVE_AT_I,
    REF_ONE_STEP,
    random_hermitian_np,
    random_pd_np,
    random_unitary_np,
)

ARCSINE_SPEC = DivergenceSpec(arcsine_generator())


def ref_ensemble():
    return ensemble([REF_A1, REF_A2], [0.5, 0.5])


def random_ensemble(rng, dim, m, spread=0.8):
    mats = [random_pd_np(rng, dim, spread) for _ in range(m)]
    w = rng.dirichlet(np.ones(m))
    return ensemble(mats, w)


def diagonal_ensemble(rng, dim, m):
    mats = [np.diag(np.exp(rng.uniform(-1, 1, size=dim))) for _ in range(m)]
    w = rng.dirichlet(np.ones(m))
    return ensemble(mats, w)


def scalar_power_barycenter(a, w, t):
    """Entrywise solution of x = sum_j w_j a_j^(1-t) x^t, in closed form."""
    return (np.sum(w[:, None] * a ** (1 - t), axis=0)) ** (1.0 / (1.0 - t))


def scalar_mean_equation(a, w, gen):
    """Solve sum_j w_j f'(x / a_j) = f'(1) per entry by bracketing."""
    c = float(np.asarray(gen.f_prime(1.0)))

    def solve_one(col):
        fn = lambda x: float(np.sum(w * np.asarray(gen.f_prime(x / col)))) - c
        lo, hi = 0.5 * col.min(), 2.0 * col.max()
        return brentq(fn, lo, hi, xtol=1e-13)

    return np.array([solve_one(a[:, i]) for i in range(a.shape[1])])


class _NoMeasureGenerator:
    """Strictly concave generator without a representing measure."""

    def f(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 2.0 * np.sqrt(x) - 0.5 * (1 + x)  # f(1)=1, f'(1)=1/2... checked below

    def f_prime(self, x):
        x = np.asarray(x, dtype=np.float64)
        return 1.0 / np.sqrt(x) - 0.5

    @property
    def weight(self):
        return 0.5

    def representing_measure(self):
        return None


class TestEnsemble:
    def test_weight_sum_validation(self):
        with pytest.raises(DomainError):
            ensemble([np.eye(2), np.eye(2)], [0.5, 0.6])

    def test_dimension_validation(self):
        with pytest.raises(DimensionMismatchError):
            ensemble([np.eye(2), np.eye(3)], [0.5, 0.5])

    def test_positive_weights(self):
        with pytest.raises(DomainError):
            ensemble([np.eye(2), np.eye(2)], [1.0, 0.0])

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            ensemble([], [])

    def test_arithmetic_mean(self):
        ens = ensemble([np.diag([2.0, 2.0]), np.diag([4.0, 4.0])], [0.25, 0.75])
        assert np.allclose(ens.arithmetic_mean().mat, 3.5 * np.eye(2))


class TestObjective:
    def test_single_matrix_at_itself(self, rng):
        A = random_pd_np(rng, 3)
        ens = ensemble([A], [1.0])
        assert abs(objective(ens, pd(A), ARCSINE_SPEC)) <= 1e-12

    def test_reference_value_at_identity(self):
        # frozen via the Cayley-Hamilton oracle: both terms equal 1/2
        val = objective(ref_ensemble(), pd(np.eye(2)), ARCSINE_SPEC)
        assert val == pytest.approx(REF_OBJECTIVE_AT_I, abs=1e-12)

    def test_solution_beats_arithmetic_mean(self):
        ens = ref_ensemble()
        report = solve_barycenter(ens, ARCSINE_SPEC)
        at_mean = objective(ens, ens.arithmetic_mean(), ARCSINE_SPEC)
        assert objective(ens, report.solution, ARCSINE_SPEC) <= at_mean


class TestGradient:
    def test_zero_at_single_member(self, rng):
        A = random_pd_np(rng, 3)
        ens = ensemble([A], [1.0])
        G = euclidean_gradient(ens, pd(A), ARCSINE_SPEC)
        assert np.linalg.norm(G.mat) <= 1e-12

    def test_matches_finite_differences(self, rng):
        t = 1e-5
        for _ in range(10):
            dim = int(rng.integers(2, 5))
            m = int(rng.integers(1, 5))
            ens = random_ensemble(rng, dim, m)
            X = pd(random_pd_np(rng, dim, 0.5))
            Y = random_hermitian_np(rng, dim)
            G = euclidean_gradient(ens, X, ARCSINE_SPEC)
            directional = float(np.trace(G.mat @ Y).real)
            fwd = objective(ens, pd(X.mat + t * Y), ARCSINE_SPEC)
            bwd = objective(ens, pd(X.mat - t * Y), ARCSINE_SPEC)
            fd = (fwd - bwd) / (2 * t)
            assert directional == pytest.approx(fd, rel=1e-6, abs=1e-10)

    def test_residual_small_at_published_solution(self):
        # the published 6-digit matrix is itself near-stationary
        assert residual(ref_ensemble(), pd(REF_BARYCENTER), ARCSINE_SPEC) <= 1e-6

    def test_residual_positive_at_identity(self):
        assert residual(ref_ensemble(), pd(np.eye(2)), ARCSINE_SPEC) > 1e-2

    def test_requires_representing_measure(self, rng):
        gen = _NoMeasureGenerator()
        spec = DivergenceSpec(gen)
        ens = ensemble([random_pd_np(rng, 2)], [1.0])
        with pytest.raises(UnsupportedGeneratorError):
            euclidean_gradient(ens, pd(np.eye(2)), spec)


class TestFrechetDerivativeFmu:
    def test_identity_base_point(self, rng):
        # integrand collapses to l * Y, so the result is c(mu) Y
        Y = random_hermitian_np(rng, 3)
        out = frechet_derivative_fmu(ArcsineMeasure(), pd(np.eye(3)), herm(Y))
        assert np.linalg.norm(out.mat - 0.5 * Y) <= 1e-12

    def test_diagonal_entrywise(self, rng):
        # for diagonal X and Y the derivative acts entrywise as f'(x_i) y_i
        mu = ArcsineMeasure()
        x = np.exp(rng.uniform(-1, 1, size=4))
        y = rng.standard_normal(4)
        out = frechet_derivative_fmu(mu, pd(np.diag(x)), herm(np.diag(y)))
        expected = np.diag(f_mu_prime(mu, x) * y)
        assert np.linalg.norm(out.mat - expected) <= 1e-10

    def test_quadrature_vs_divided_differences(self, rng):
        mu = ArcsineMeasure()
        for _ in range(10):
            X = pd(random_pd_np(rng, 4))
            Y = herm(random_hermitian_np(rng, 4))
            quad_path = frechet_derivative_fmu(mu, X, Y)
            dk_path = frechet_derivative(
                lambda w: f_mu(mu, w), lambda w: f_mu_prime(mu, w), X, Y
            )
            assert np.linalg.norm(quad_path.mat - dk_path.mat) <= 1e-8


class TestSolveBarycenter:
    def test_single_member(self, rng):
        A = random_pd_np(rng, 3)
        report = solve_barycenter(ensemble([A], [1.0]), ARCSINE_SPEC)
        assert report.converged
        assert np.linalg.norm(report.solution.mat - A) <= 1e-8

    def test_reference_problem(self):
        report = solve_barycenter(ref_ensemble(), ARCSINE_SPEC)
        assert report.converged
        assert report.final_residual <= 1e-6
        assert np.max(np.abs(report.solution.mat.real - REF_BARYCENTER)) <= 1e-3
        assert np.max(np.abs(report.solution.mat.imag)) <= 1e-8

    @pytest.mark.parametrize("t", [0.25, 0.5, 0.75])
    def test_commuting_ensemble_scalar_oracle(self, rng, t):
        ens = diagonal_ensemble(rng, 4, 3)
        spec = DivergenceSpec(GeometricGenerator(t))
        report = solve_barycenter(ens, spec)
        assert report.converged
        a = np.stack([np.diag(A.mat).real for A in ens.matrices])
        oracle = scalar_power_barycenter(a, ens.weights, t)
        assert np.max(np.abs(np.diag(report.solution.mat).real - oracle)) <= 1e-6

    def test_objective_trace_non_increasing(self):
        report = solve_barycenter(ref_ensemble(), ARCSINE_SPEC)
        trace = np.asarray(report.objective_trace)
        assert np.all(np.diff(trace) <= 1e-12)

    def test_uniqueness_probe(self, rng):
        ens = random_ensemble(rng, 3, 3)
        a = solve_barycenter(ens, ARCSINE_SPEC)
        b = solve_barycenter(
            ens,
            ARCSINE_SPEC,
            SolverOptions(initial_guess=ens.matrices[0]),
        )
        assert a.converged and b.converged
        assert np.linalg.norm(a.solution.mat - b.solution.mat) <= 1e-6

    def test_permutation_invariance_of_objective_and_gradient(self, rng):
        # the defining quantities are symmetric in the (A_j, w_j) pairs
        mats = [random_pd_np(rng, 3) for _ in range(3)]
        w = [0.5, 0.3, 0.2]
        fwd, rev = ensemble(mats, w), ensemble(mats[::-1], w[::-1])
        X = pd(random_pd_np(rng, 3))
        assert objective(fwd, X, ARCSINE_SPEC) == pytest.approx(
            objective(rev, X, ARCSINE_SPEC), abs=1e-12
        )
        g_fwd = euclidean_gradient(fwd, X, ARCSINE_SPEC).mat
        g_rev = euclidean_gradient(rev, X, ARCSINE_SPEC).mat
        assert np.linalg.norm(g_fwd - g_rev) <= 1e-12

    def test_permutation_equivariance_of_solver(self, rng):
        # two independent runs each stop within solver accuracy of the unique
        # optimum, so they agree at that level (not at machine precision)
        mats = [random_pd_np(rng, 3) for _ in range(3)]
        w = [0.5, 0.3, 0.2]
        fwd = solve_barycenter(ensemble(mats, w), ARCSINE_SPEC)
        rev = solve_barycenter(ensemble(mats[::-1], w[::-1]), ARCSINE_SPEC)
        assert fwd.converged and rev.converged
        assert np.linalg.norm(fwd.solution.mat - rev.solution.mat) <= 1e-6

    def test_unitary_covariance(self, rng):
        ens = random_ensemble(rng, 3, 2)
        U = random_unitary_np(rng, 3)
        base = solve_barycenter(ens, ARCSINE_SPEC).solution.mat
        rotated_ens = ensemble(
            [U @ A.mat @ U.conj().T for A in ens.matrices], ens.weights
        )
        rotated = solve_barycenter(rotated_ens, ARCSINE_SPEC).solution.mat
        assert np.linalg.norm(rotated - U @ base @ U.conj().T) <= 1e-7

    def test_masa_closure_diagonal(self, rng):
        ens = diagonal_ensemble(rng, 4, 3)
        report = solve_barycenter(ens, ARCSINE_SPEC)
        off = report.solution.mat - np.diag(np.diag(report.solution.mat))
        assert np.max(np.abs(off)) <= 1e-8

    def test_optimality_against_perturbations(self, rng):
        ens = random_ensemble(rng, 3, 3)
        report = solve_barycenter(ens, ARCSINE_SPEC)
        base = objective(ens, report.solution, ARCSINE_SPEC)
        eps = 1e-2
        for _ in range(50):
            Y = random_hermitian_np(rng, 3)
            trial = report.solution.mat + eps * Y
            w = np.linalg.eigvalsh(trial)
            if w[0] <= 1e-10:  # project back into the cone if needed
                trial = trial + (1e-10 - w[0]) * np.eye(3)
            assert objective(ens, pd(trial), ARCSINE_SPEC) >= base

    def test_non_convergence_reported_not_raised(self):
        report = solve_barycenter(
            ref_ensemble(), ARCSINE_SPEC, SolverOptions(max_iterations=2)
        )
        assert not report.converged
        assert report.final_residual > 1e-8

    def test_arithmetic_mean_limit_of_power_family(self, rng):
        # for commuting ensembles the t -> 0 barycenter approaches sum w_j A_j
        ens = diagonal_ensemble(rng, 3, 3)
        spec = DivergenceSpec(GeometricGenerator(1e-3))
        report = solve_barycenter(ens, spec, SolverOptions(residual_tol=1e-10))
        target = ens.arithmetic_mean().mat
        rel = np.linalg.norm(report.solution.mat - target) / np.linalg.norm(target)
        assert rel <= 1e-2


class TestSolvePowerMean:
    def test_all_equal(self, rng):
        A = random_pd_np(rng, 3)
        report = solve_power_mean(ensemble([A, A], [0.5, 0.5]), 0.5)
        assert report.converged
        assert np.linalg.norm(report.solution.mat - A) <= 1e-7

    @pytest.mark.parametrize("t", [0.25, 0.5, 0.75])
    def test_commuting_scalar_oracle(self, rng, t):
        ens = diagonal_ensemble(rng, 4, 3)
        report = solve_power_mean(ens, t, SolverOptions(residual_tol=1e-12))
        a = np.stack([np.diag(A.mat).real for A in ens.matrices])
        oracle = scalar_power_barycenter(a, ens.weights, t)
        assert np.max(np.abs(np.diag(report.solution.mat).real - oracle)) <= 1e-8

    def test_order_validation(self):
        with pytest.raises(DomainError):
            solve_power_mean(ref_ensemble(), 1.0)

    def test_reference_fixed_point_and_one_step_map(self):
        # the fixed point P satisfies (A1 # P + A2 # P)/2 = P; applying the
        # map to the barycenter instead moves it to the published image
        ens = ref_ensemble()
        gen = GeometricGenerator(0.5)
        pm = solve_power_mean(ens, 0.5, SolverOptions(residual_tol=1e-12))
        P = pm.solution
        image = 0.5 * (
            kubo_ando_mean(ens.matrices[0], P, gen).mat
            + kubo_ando_mean(ens.matrices[1], P, gen).mat
        )
        assert np.linalg.norm(image - P.mat) <= 1e-9

        bary = solve_barycenter(ens, ARCSINE_SPEC).solution
        bary_image = 0.5 * (
            kubo_ando_mean(ens.matrices[0], bary, gen).mat
            + kubo_ando_mean(ens.matrices[1], bary, gen).mat
        )
        assert np.max(np.abs(bary_image.real - REF_ONE_STEP)) <= 1e-3
        assert np.linalg.norm(bary_image - bary.mat) >= 0.03


class TestSolveMeanEquation:
    def test_single_member(self, rng):
        A = random_pd_np(rng, 3)
        report = solve_mean_equation(ensemble([A], [1.0]), ARCSINE_SPEC)
        assert report.converged
        assert np.linalg.norm(report.solution.mat - A) <= 1e-7

    def test_commuting_scalar_oracle(self, rng):
        ens = diagonal_ensemble(rng, 3, 3)
        report = solve_mean_equation(
            ens, ARCSINE_SPEC, SolverOptions(residual_tol=1e-12)
        )
        a = np.stack([np.diag(A.mat).real for A in ens.matrices])
        oracle = scalar_mean_equation(a, ens.weights, ARCSINE_SPEC.generator)
        assert np.max(np.abs(np.diag(report.solution.mat).real - oracle)) <= 1e-8

    def test_agrees_with_power_mean_for_square_root(self):
        ens = ref_ensemble()
        me = solve_mean_equation(ens, ARCSINE_SPEC, SolverOptions(residual_tol=1e-10))
        pm = solve_power_mean(ens, 0.5, SolverOptions(residual_tol=1e-10))
        assert np.linalg.norm(me.solution.mat - pm.solution.mat) <= 1e-6

    def test_log_generator_gives_arithmetic_mean(self, rng):
        ens = diagonal_ensemble(rng, 3, 4)
        report = solve_mean_equation(ens, LogGenerator())
        assert report.converged
        assert np.linalg.norm(
            report.solution.mat - ens.arithmetic_mean().mat
        ) <= 1e-8


class TestNoncommutativityMeasure:
    def test_single_member_vanishes(self, rng):
        A = random_pd_np(rng, 2)
        val = noncommutativity_measure(ensemble([A], [1.0]), ARCSINE_SPEC)
        assert val <= 1e-7

    def test_commuting_ensemble_vanishes(self, rng):
        ens = diagonal_ensemble(rng, 3, 3)
        val = noncommutativity_measure(ens, ARCSINE_SPEC)
        assert val <= 1e-6

    def test_reference_ensemble_is_noncommutative(self):
        val = noncommutativity_measure(ref_ensemble(), ARCSINE_SPEC)
        assert val >= 0.03

    def test_thompson_metric_variant(self):
        val = noncommutativity_measure(ref_ensemble(), ARCSINE_SPEC, metric="thompson")
        assert val > 0.0

    def test_unknown_metric(self):
        with pytest.raises(DomainError):
            noncommutativity_measure(ref_ensemble(), ARCSINE_SPEC, metric="spectral")

    def test_nonconvergence_names_failing_solver(self):
        with pytest.raises(NonConvergenceError, match="solve_barycenter"):
            noncommutativity_measure(
                ref_ensemble(), ARCSINE_SPEC, opts=SolverOptions(max_iterations=2)
            )
