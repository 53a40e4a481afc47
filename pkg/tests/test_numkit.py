import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psrl.exceptions import SingularMatrix, Undecided
from psrl.numkit import (
    ConstraintSystem,
    eigenvalues,
    hessenberg,
    is_spectral_radius_lt_one,
    lp_feasible,
    lp_minimax,
    solve_linear,
    spectral_radius,
)

from oracles import cubic_roots, grid_feasible, quadratic_roots

FIG1C_M = [[0, 5 / 6], [-3 / 10, 9 / 10]]
EPS60 = 60 ** (-1 / 3)


def a_vs_eps_system():
    # worked sample, Q = {ε}, v = a; rows w = a, aa, aaa
    return ConstraintSystem.from_rows(
        1, [([5 / 6], 3 / 5, EPS60), ([1 / 2], 1 / 5, EPS60), ([1 / 6], 0.0, EPS60)], [([1.0], 1.0)])


def aa_vs_eps_a_system():
    # Q = {ε, a}, v = aa; rows w = a, aa, aaa
    return ConstraintSystem.from_rows(
        2,
        [([5 / 6, 3 / 5], 1 / 3, EPS60), ([1 / 2, 1 / 5], 0.0, EPS60), ([1 / 6, 0.0], 0.0, EPS60)],
        [([1.0, 1.0], 1.0)],
    )


class TestSolveLinear:
    def test_identity(self):
        assert np.allclose(solve_linear(np.eye(2), [0.3, 0.7]), [0.3, 0.7], atol=0)

    def test_scalar(self):
        assert solve_linear([[1.0]], [2.0]).tolist() == [2.0]

    def test_fig1c_tail_sums(self):
        m = np.array(FIG1C_M)
        s = solve_linear(np.eye(2) - m, [1 / 6, 2 / 5])
        assert np.allclose(s, [1, 1], atol=1e-12)

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            solve_linear([[1, 2], [2, 4]], [1, 1])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            solve_linear(np.eye(2), [1, 2, 3])

    def test_random_residuals(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = rng.uniform(-1, 1, (5, 5)) + 5 * np.eye(5)
            b = rng.uniform(-10, 10, 5)
            x = solve_linear(a, b)
            assert np.max(np.abs(a @ x - b)) <= 1e-9 * (1 + np.max(np.abs(b)))


class TestEigen:
    def test_zero(self):
        assert spectral_radius(np.zeros((3, 3))) == 0.0

    def test_fig1c(self):
        assert spectral_radius(FIG1C_M) == pytest.approx(0.5, abs=1e-9)

    def test_scalar_zero(self):
        assert spectral_radius([[0.0]]) == 0.0

    def test_hessenberg_is_similar(self):
        rng = np.random.default_rng(1)
        m = rng.normal(size=(7, 7))
        h = hessenberg(m)
        assert np.allclose(np.tril(h, -2), 0)
        assert np.trace(h) == pytest.approx(np.trace(m))
        assert np.allclose(sorted(np.abs(eigenvalues(h))), sorted(np.abs(np.linalg.eigvals(m))))

    @pytest.mark.parametrize("n", [2, 3])
    def test_closed_form_roots(self, n):
        rng = np.random.default_rng(100 + n)
        roots = quadratic_roots if n == 2 else cubic_roots
        for _ in range(100):
            m = rng.uniform(-1, 1, (n, n))
            expected = max(abs(r) for r in roots(m))
            assert abs(spectral_radius(m) - expected) <= 1e-7

    def test_larger_matrices_match_lapack(self):
        rng = np.random.default_rng(2)
        for n in (10, 30, 60):
            m = rng.normal(size=(n, n)) / np.sqrt(n)
            assert spectral_radius(m) == pytest.approx(max(abs(np.linalg.eigvals(m))), abs=1e-9)

    def test_defective_and_rotation(self):
        assert spectral_radius([[0.5, 1.0], [0.0, 0.5]]) == pytest.approx(0.5, abs=1e-9)
        assert spectral_radius([[0.0, -1.0], [1.0, 0.0]]) == pytest.approx(1.0, abs=1e-9)


class TestRadiusDecision:
    def test_diagonal(self):
        assert is_spectral_radius_lt_one(np.diag([0.75, 0.675]))

    def test_identity_is_false(self):
        assert not is_spectral_radius_lt_one([[1.0]])

    def test_fig1c(self):
        assert is_spectral_radius_lt_one(FIG1C_M)

    def test_large_radius(self):
        assert not is_spectral_radius_lt_one([[0.0, 2.0], [2.0, 0.0]])

    def test_nonnormal_needs_eigenvalues(self):
        # large off-diagonal: norms of low powers exceed 1, yet rho = 0.9
        m = [[0.9, 1e3], [0.0, 0.9]]
        assert is_spectral_radius_lt_one(m)

    def test_band_is_undecided(self):
        # a 2x2 rotation scaled just inside the margin: no trace certificate
        r = 1 - 1e-11
        m = r * np.array([[0.0, -1.0], [1.0, 0.0]]) @ np.array([[np.cos(1), -np.sin(1)], [np.sin(1), np.cos(1)]])
        with pytest.raises(Undecided):
            is_spectral_radius_lt_one(m)


class TestLp:
    def test_trivial(self):
        sys_ = ConstraintSystem.from_rows(1, [([1.0], 1.0, 0.1)], [([1.0], 1.0)])
        res = lp_feasible(sys_)
        assert res.feasible and res.status == "feasible"
        assert res.witness.tolist() == pytest.approx([1.0])

    def test_worked_a_against_eps_infeasible(self):
        res = lp_feasible(a_vs_eps_system())
        assert not res.feasible and res.witness is None and res.status == "infeasible"

    def test_worked_aa_against_eps_a_feasible(self):
        sys_ = aa_vs_eps_a_system()
        res = lp_feasible(sys_)
        assert res.feasible
        assert sys_.is_satisfied(res.witness, 1e-9)
        assert sys_.is_satisfied([-0.5, 1.5], 1e-12)

    def test_no_variables(self):
        ok = ConstraintSystem.from_rows(0, [([], 0.1, 0.2)])
        bad = ConstraintSystem.from_rows(0, [([], 0.3, 0.2)])
        assert lp_feasible(ok).feasible and not lp_feasible(bad).feasible

    def test_rejects_negative_bound(self):
        with pytest.raises(ValueError):
            ConstraintSystem.from_rows(1, [([1.0], 0.0, -1.0)])

    def test_grid_oracle(self):
        rng = np.random.default_rng(2024)
        n_feasible = 0
        for _ in range(200):
            rows = []
            for _ in range(int(rng.integers(2, 7))):
                rows.append((rng.uniform(-1, 1, 2), rng.uniform(-1, 1), rng.uniform(0.05, 0.8)))
            sys_ = ConstraintSystem.from_rows(2, rows, [([1.0, 1.0], 1.0)])
            res = lp_feasible(sys_)
            if res.feasible:
                n_feasible += 1
                assert sys_.is_satisfied(res.witness, 1e-9)
                if np.all(np.abs(res.witness) <= 4.99):
                    assert grid_feasible(sys_)
            else:
                assert not grid_feasible(sys_, slack=0.0)
        assert 20 < n_feasible < 180

    def test_constraint_generation_matches_full_solve(self):
        rng = np.random.default_rng(9)
        for trial in range(10):
            k = 4
            x_true = rng.normal(size=k)
            x_true /= x_true.sum()
            coef = rng.uniform(0, 1, (200, k))
            target = coef @ x_true + rng.normal(scale=0.02, size=200)
            sys_ = ConstraintSystem(k, coef, target, np.full(200, 0.05 if trial % 2 else 0.01),
                                    np.ones((1, k)), [1.0])
            res = lp_feasible(sys_)
            if res.feasible:
                assert sys_.is_satisfied(res.witness, 1e-9)
            mm = lp_minimax(sys_)
            assert res.feasible == mm.feasible

    @settings(max_examples=60, deadline=None)
    @given(st.floats(1e-3, 1e3), st.integers(0, 10_000))
    def test_row_scaling_invariance(self, factor, seed):
        rng = np.random.default_rng(seed)
        rows = [(rng.uniform(-1, 1, 2), rng.uniform(-1, 1), rng.uniform(0.01, 0.4)) for _ in range(4)]
        sys_ = ConstraintSystem.from_rows(2, rows, [([1.0, 1.0], 1.0)])
        assert lp_feasible(sys_).feasible == lp_feasible(sys_.scaled(factor)).feasible


class TestMinimax:
    def test_aa_system_is_centred(self):
        res = lp_minimax(aa_vs_eps_a_system())
        assert res.feasible
        assert res.witness.sum() == pytest.approx(1.0)
        # the worst band usage is strictly inside the band
        assert res.ratio < 0.5

    def test_infeasible_ratio_above_one(self):
        res = lp_minimax(a_vs_eps_system())
        assert not res.feasible and res.ratio > 1

    def test_ratio_is_optimal_against_sampling(self):
        sys_ = aa_vs_eps_a_system()
        res = lp_minimax(sys_)
        for xe in np.linspace(-3, 3, 601):
            x = np.array([xe, 1 - xe])
            ratio = np.max(np.abs(sys_.abs_target - sys_.abs_coef @ x) / sys_.abs_bound)
            assert ratio >= res.ratio - 1e-9
