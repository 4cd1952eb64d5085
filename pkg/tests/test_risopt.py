"""Reflection step: lifted-matrix structure, surrogate tangency/minorization,
and the MM loop against dense grid oracles."""

import numpy as np
import pytest

from risec import risopt
from risec.numerics import rank_one_gap
from risec.system import amplification_power, audit_constraints, secrecy_rate
from tests.conftest import make_channels, make_params


def feasible_w(params, seed, frac=0.8):
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(params.m) + 1j * rng.standard_normal(params.m)
    return w / np.linalg.norm(w) * np.sqrt(frac * params.p_t)


def random_corner_psd(rng, n):
    """Random PSD matrix with the corner pinned to 1 (surrogate test points)."""
    L = rng.standard_normal((n + 1, n + 1)) + 1j * rng.standard_normal((n + 1, n + 1))
    V = L @ L.conj().T / (n + 1)
    return V / V[n, n].real


class TestBuildLifted:
    def test_structure_invariants(self, paper_params):
        ch = make_channels(paper_params, 0)
        w = feasible_w(paper_params, 0)
        M = risopt.build_lifted(ch, w, paper_params)
        n = paper_params.n
        for name in ("H_A", "H_AB", "H_AE", "H_IB", "H_IE"):
            A = getattr(M, name)
            assert A.shape == (n + 1, n + 1)
            np.testing.assert_allclose(A, A.conj().T, atol=1e-12)
        assert M.H_A[n, n] == 0.0
        assert M.H_IB[n, n] == pytest.approx(paper_params.sigma2_B)
        assert M.H_IE[n, n] == pytest.approx(paper_params.sigma2_E)
        Hw = ch.H_AI @ w
        np.testing.assert_allclose(
            M.H_A[:n, :n],
            np.diag(np.abs(Hw) ** 2) + paper_params.sigma2_I * np.eye(n),
            atol=1e-15,
        )
        assert M.tau_B == pytest.approx(
            paper_params.sigma2_B + abs(ch.h_AB[0] @ w) ** 2, rel=1e-10
        )
        assert M.tau_B >= paper_params.sigma2_B
        assert np.linalg.eigvalsh(M.H_IB)[0] >= -1e-18

    def test_zero_beamformer(self, paper_params):
        ch = make_channels(paper_params, 1)
        M = risopt.build_lifted(ch, np.zeros(paper_params.m), paper_params)
        n = paper_params.n
        assert M.tau_B == pytest.approx(paper_params.sigma2_B)
        np.testing.assert_allclose(M.H_AB[:n, n], 0.0, atol=1e-18)
        V0 = risopt.lift_vector(np.zeros(n))
        assert np.trace(M.H_AB @ V0).real == pytest.approx(
            paper_params.sigma2_B, rel=1e-10
        )

    def test_zero_reflect_gives_direct_rate(self, paper_params):
        ch = make_channels(paper_params, 2)
        w = feasible_w(paper_params, 2)
        M = risopt.build_lifted(ch, w, paper_params)
        V0 = risopt.lift_vector(np.zeros(paper_params.n))
        expect = np.log1p(
            abs(ch.h_AB[0] @ w) ** 2 / paper_params.sigma2_B
        ) - np.log1p(abs(ch.h_AE[0] @ w) ** 2 / paper_params.sigma2_E)
        assert risopt.rate_value(V0, M) == pytest.approx(expect, abs=1e-9)

    def test_cross_module_consistency(self, paper_params):
        rng = np.random.default_rng(3)
        ch = make_channels(paper_params, 3)
        w = feasible_w(paper_params, 3)
        M = risopt.build_lifted(ch, w, paper_params)
        for _ in range(5):
            v = rng.standard_normal(paper_params.n) * np.exp(
                1j * rng.uniform(0, 2 * np.pi, paper_params.n)
            )
            V = risopt.lift_vector(v)
            sr = secrecy_rate(ch, w, np.conj(v), paper_params)
            assert risopt.rate_value(V, M) == pytest.approx(sr, abs=1e-9)

    def test_denominator_floor(self, paper_params):
        # tr(H_Ij V) >= sigma_j^2 for every corner-pinned PSD V
        rng = np.random.default_rng(4)
        ch = make_channels(paper_params, 4)
        M = risopt.build_lifted(ch, feasible_w(paper_params, 4), paper_params)
        for _ in range(10):
            V = random_corner_psd(rng, paper_params.n)
            assert np.trace(M.H_IB @ V).real >= paper_params.sigma2_B * (1 - 1e-9)


class TestSurrogate:
    def test_tangency(self, paper_params):
        rng = np.random.default_rng(5)
        ch = make_channels(paper_params, 5)
        M = risopt.build_lifted(ch, feasible_w(paper_params, 5), paper_params)
        for _ in range(10):
            V = random_corner_psd(rng, paper_params.n)
            assert risopt.surrogate_value(V, V, M) == pytest.approx(
                risopt.rate_value(V, M), abs=1e-9
            )

    def test_minorization_sampled(self, paper_params):
        rng = np.random.default_rng(6)
        ch = make_channels(paper_params, 6)
        M = risopt.build_lifted(ch, feasible_w(paper_params, 6), paper_params)
        for _ in range(3):
            anchor = random_corner_psd(rng, paper_params.n)
            for _ in range(30):
                V = random_corner_psd(rng, paper_params.n)
                assert risopt.rate_value(V, M) >= \
                    risopt.surrogate_value(V, anchor, M) - 1e-9


class TestMmOptimize:
    def test_monotone_and_rank_one(self, paper_params):
        ch = make_channels(paper_params, 7)
        w = feasible_w(paper_params, 7)
        res = risopt.mm_optimize(ch, w, paper_params, np.ones(paper_params.n))
        objs = [row.objective for row in res.trace]
        for a, b in zip(objs, objs[1:]):
            assert b >= a - 1e-9
        assert rank_one_gap(res.V) <= 1e-3 * max(1.0, np.trace(res.V).real)

    def test_extracted_point_feasible(self, paper_params):
        ch = make_channels(paper_params, 8)
        w = feasible_w(paper_params, 8)
        res = risopt.mm_optimize(ch, w, paper_params, np.ones(paper_params.n))
        assert np.all(np.abs(res.q) <= paper_params.eta * (1 + 1e-7))
        used = amplification_power(ch, w, res.q, paper_params)
        assert used <= paper_params.p_i * (1 + 1e-7)

    def test_improves_over_init(self, paper_params):
        ch = make_channels(paper_params, 9)
        w = feasible_w(paper_params, 9)
        v0 = np.ones(paper_params.n)
        res = risopt.mm_optimize(ch, w, paper_params, v0)
        sr0 = secrecy_rate(ch, w, np.conj(v0), paper_params)
        assert secrecy_rate(ch, w, res.q, paper_params) >= sr0 - 1e-9

    def test_consistency_rate_vs_secrecy(self, paper_params):
        ch = make_channels(paper_params, 10)
        w = feasible_w(paper_params, 10)
        res = risopt.mm_optimize(ch, w, paper_params, np.ones(paper_params.n))
        M = risopt.build_lifted(ch, w, paper_params)
        sr = secrecy_rate(ch, w, res.q, paper_params)
        # agreement is limited by the residual rank-1 gap of V
        assert risopt.rate_value(risopt.lift_vector(res.v), M) == pytest.approx(
            sr, abs=1e-6
        )

    def test_n1_grid_oracle(self):
        params = make_params(m=2, n=1, eta2_db=20.0)
        for seed in range(4):
            ch = make_channels(params, seed)
            w = feasible_w(params, seed)
            res = risopt.mm_optimize(ch, w, params, np.ones(1))
            amps = np.linspace(0.0, params.eta[0], 60)
            phases = np.linspace(0.0, 2.0 * np.pi, 72, endpoint=False)
            best = -np.inf
            for a in amps:
                for ph in phases:
                    q = np.array([a * np.exp(1j * ph)])
                    if amplification_power(ch, w, q, params) > params.p_i:
                        continue
                    best = max(best, secrecy_rate(ch, w, q, params))
            sr = secrecy_rate(ch, w, res.q, params)
            assert sr >= best - 0.02 * abs(best)

    def test_unit_modulus_mode(self, paper_params):
        ch = make_channels(paper_params, 11)
        w = feasible_w(paper_params, 11)
        cfg = risopt.MmConfig(unit_modulus=True, ris_power=False)
        res = risopt.mm_optimize(ch, w, paper_params, np.ones(paper_params.n), cfg)
        np.testing.assert_allclose(np.abs(res.q), 1.0, atol=1e-7)


class TestExtractCoefficients:
    def test_recovers_exact_lift(self, paper_params):
        rng = np.random.default_rng(12)
        v = 0.5 * paper_params.eta * np.exp(
            1j * rng.uniform(0, 2 * np.pi, paper_params.n)
        )
        q = risopt.extract_coefficients(risopt.lift_vector(v), paper_params)
        np.testing.assert_allclose(q, np.conj(v), atol=1e-8)

    def test_clips_overshoot(self, paper_params):
        v = 2.0 * paper_params.eta + 0.0j  # above the caps
        q = risopt.extract_coefficients(risopt.lift_vector(v), paper_params)
        np.testing.assert_allclose(np.abs(q), paper_params.eta, rtol=1e-9)

    def test_degenerate_corner_raises(self, paper_params):
        V = np.zeros((paper_params.n + 1, paper_params.n + 1), dtype=complex)
        V[0, 0] = 1.0
        with pytest.raises(ValueError):
            risopt.extract_coefficients(V, paper_params)
