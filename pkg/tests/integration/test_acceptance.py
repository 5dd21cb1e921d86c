"""
Acceptance-scale checks: closed-form transform equivalence, decay laws of
the coherences and block norms, the relative-sparsity chain, solver oracle
equivalence, recovery rates and reproducibility of the experiment outputs.
"""
import numpy as np
import pytest

from fourier_haar.analysis import (
    block_norm_constant,
    block_norms,
    coherence_decay_constant,
    compute_profile,
    phase_grid_convergence,
    relative_sparsity_bound,
    relative_sparsity_exact,
)
from fourier_haar.cli import main
from fourier_haar.evaluation import RecoveryMetrics
from fourier_haar.experiments import ExperimentConfig, ExperimentOrchestrator
from fourier_haar.levels import random_sparse_in_levels
from fourier_haar.models import LevelStructure, MagnitudeLaw, SparsityPattern
from fourier_haar.sampling import SamplingMode, build_bands, draw_omega
from fourier_haar.solvers import (
    ProjectedSubgradientSolver,
    RecoveryProblem,
    SolverOptions,
    add_noise,
    solve_qcbp,
)
from fourier_haar.transforms import BuildMode, MeasurementOperator, build_U

pytestmark = pytest.mark.slow

ORACLE_BUDGETS = [2, 2, 4, 6, 10]


def _oracle_instance(index: int):
    k = SparsityPattern(k=(1, 1, 1, 1, 1))
    c = random_sparse_in_levels(k, seed=1000 + index, magnitude_law=MagnitudeLaw.COMPLEX_GAUSSIAN)
    plan = draw_omega(build_bands(5), ORACLE_BUDGETS, seed=2000 + index)
    operator = MeasurementOperator.from_plan(plan)
    return c, RecoveryProblem(y=operator.forward(c.values), eta=1e-8, operator=operator)


class TestTransformAcceptance:
    """Closed form and unitarity at desk scale."""

    @pytest.mark.parametrize("n", [8, 64, 256, 1024])
    def test_analytic_matches_brute_force(self, n):
        levels = LevelStructure.from_dimension(n)
        analytic = build_U(levels, BuildMode.ANALYTIC)
        brute = build_U(levels, BuildMode.BRUTE_FORCE)
        assert np.max(np.abs(analytic.entries - brute.entries)) <= 1e-10
        assert analytic.gram_error() <= 1e-10


class TestDecayLaws:
    """Fitted constants of the coherence and block-norm decay laws."""

    @pytest.fixture(scope="class")
    def profiles(self):
        profiles = {}
        for r in range(6, 11):
            u = build_U(LevelStructure(r=r))
            profiles[r] = compute_profile(u, SparsityPattern(k=(1,) * r), exact=False)
        return profiles

    def test_coherence_constant_stable(self, profiles):
        constants = [coherence_decay_constant(p) for p in profiles.values()]
        assert max(constants) < 2 * min(constants)

    def test_block_norm_constant_stable(self, profiles):
        constants = [block_norm_constant(p) for p in profiles.values()]
        assert max(constants) < 2 * min(constants)


class TestRelativeSparsityChain:
    """exact K <= block-norm bound <= fitted decay bound, and grid convergence."""

    @pytest.mark.parametrize("r", [3, 4])
    def test_chain(self, r):
        u = build_U(LevelStructure(r=r))
        k = SparsityPattern(k=(1,) * r)
        exact = relative_sparsity_exact(u, k)
        bound = relative_sparsity_bound(block_norms(u), k)
        assert np.all(exact <= np.asarray(bound.kl_bound) + 1e-10)
        assert np.all(np.asarray(bound.kl_bound) <= np.asarray(bound.theory_bound) + 1e-10)

    @pytest.mark.parametrize("r", [3, 4])
    def test_phase_grid_doubling(self, r):
        u = build_U(LevelStructure(r=r))
        report = phase_grid_convergence(u, SparsityPattern(k=(1,) * r), phases=32, work_cap_log2=26)
        assert report["relative_change"] < 0.01


class TestSolverOracle:
    """Primal-dual QCBP against independent solvers at n = 32."""

    def test_against_conic_solver(self):
        cp = pytest.importorskip("cvxpy")
        for index in range(20):
            _, problem = _oracle_instance(index)
            result = solve_qcbp(problem)

            a = problem.operator.matrix()
            variable = cp.Variable(problem.n, complex=True)
            program = cp.Problem(
                cp.Minimize(cp.norm1(variable)),
                [cp.norm(problem.y - a @ variable, 2) <= problem.eta],
            )
            program.solve()
            reference = np.asarray(variable.value)

            assert RecoveryMetrics.relative_error(reference, result.c_hat.values) <= 1e-4
            assert abs(result.objective - program.value) <= 1e-4 * (1 + program.value)
            assert result.certificate.max_violation <= 1e-5

    @pytest.mark.parametrize("index", [0, 1])
    def test_against_subgradient_reference(self, index):
        _, problem = _oracle_instance(index)
        result = solve_qcbp(problem)
        reference = ProjectedSubgradientSolver(SolverOptions(max_iter=10**6)).solve(problem)
        assert RecoveryMetrics.relative_error(reference.c_hat.values, result.c_hat.values) <= 1e-4
        assert abs(result.objective - reference.objective) <= 1e-4 * (1 + reference.objective)


class TestNoiseStability:
    """Recovery error grows at most linearly in the noise level at n = 32."""

    BUDGETS = [2, 2, 4, 8, 14]

    @staticmethod
    def _instance(index: int):
        k = SparsityPattern(k=(1, 1, 1, 1, 1))
        c = random_sparse_in_levels(k, seed=3000 + index, magnitude_law=MagnitudeLaw.COMPLEX_GAUSSIAN)
        plan = draw_omega(build_bands(5), TestNoiseStability.BUDGETS, seed=4000 + index)
        operator = MeasurementOperator.from_plan(plan)
        y = operator.forward(c.values)
        eta = 1e-3 * float(np.linalg.norm(y))
        noise = add_noise(y, eta, seed=5000 + index) - y
        return c, operator, y, noise, eta

    def test_error_is_a_bounded_multiple_of_eta(self):
        ratios = []
        for index in range(50):
            c, operator, y, noise, eta = self._instance(index)
            result = solve_qcbp(RecoveryProblem(y=y + noise, eta=eta, operator=operator))
            assert result.converged
            ratios.append(float(np.linalg.norm(c.values - result.c_hat.values)) / eta)
        print(f"error / eta: median {np.median(ratios):.3f}, max {max(ratios):.3f}")
        assert max(ratios) <= 10.0
        # the constant does not drift with the number of trials
        assert max(ratios[25:]) <= 2.5 * max(ratios[:25])
        assert max(ratios[:25]) <= 2.5 * max(ratios[25:])

    @pytest.mark.parametrize("index", [0, 1, 2])
    def test_error_shrinks_with_eta(self, index):
        c, operator, y, noise, eta = self._instance(index)
        errors = []
        for scale in (1.0, 0.1):
            result = solve_qcbp(RecoveryProblem(y=y + scale * noise, eta=scale * eta, operator=operator))
            errors.append(float(np.linalg.norm(c.values - result.c_hat.values)))
        assert errors[1] <= 0.2 * errors[0] + 1e-9 * np.linalg.norm(c.values)


class TestRecoveryExperiments:
    """Structured recovery at n = 256 with k = (2, 2, 3, 4, 4, 3, 2, 1)."""

    def test_multilevel_success_rate(self, tmp_path):
        config = ExperimentConfig(c_alloc=0.5, trials=50, max_workers=4, output_dir=str(tmp_path))
        summary = ExperimentOrchestrator(config).recover()
        assert summary["metrics"]["success_rate"] >= 0.95
        assert summary["metrics"]["converged_fraction"] >= 0.9
        assert summary["metrics"]["mean_iterations"] < SolverOptions().max_iter

    def test_multilevel_beats_uniform(self, tmp_path):
        config = ExperimentConfig(c_alloc=0.25, trials=50, max_workers=4, output_dir=str(tmp_path))
        orchestrator = ExperimentOrchestrator(config)
        multilevel = RecoveryMetrics.summarize(orchestrator.run_trials(0.25, SamplingMode.MULTILEVEL))
        uniform = RecoveryMetrics.summarize(orchestrator.run_trials(0.25, SamplingMode.UNIFORM_GLOBAL))
        print(f"median errors: multilevel {multilevel['median_error']}, uniform {uniform['median_error']}")
        assert multilevel["median_error"] < uniform["median_error"]

    def test_floor_budgets_fail(self, tmp_path):
        config = ExperimentConfig(c_alloc=0.0, trials=10, max_workers=4, output_dir=str(tmp_path))
        summary = ExperimentOrchestrator(config).recover()
        assert summary["budgets"] == [1] * 8
        assert summary["metrics"]["success_rate"] <= 0.1

    def test_recover_byte_identical_across_runs(self, tmp_path):
        config_path = tmp_path / "config.json"
        ExperimentConfig(n=64, k=[1, 1, 2, 2, 2, 1], trials=8, c_alloc=0.5).to_json(config_path)
        for name, threads in (("first", "1"), ("second", "4")):
            args = ["recover", "--config", str(config_path), "--out", str(tmp_path / name), "--threads", threads]
            assert main(args) == 0
        for name in ("trials.csv", "summary.json"):
            assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()
