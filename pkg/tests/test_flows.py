import numpy as np
import pytest

from pfwillmore import analysis as an
from pfwillmore import flows as F
from pfwillmore import geometry as geo
from pfwillmore import grid as G
from pfwillmore.profiles import well


def flat_session(flow: str, modes=256, track_energy=False) -> F.FlowSession:
    g = G.make_grid(1, modes)
    eps = 2.0 / modes
    dt = eps**2 / (2 * modes**2)
    params = F.ModelParams(eps=eps, dt=dt, flow=flow)
    shape = geo.Slab(axis=0, center=0.5, half_width=0.25)
    return F.new_session(g, params, shape, track_energy=track_energy)


class TestModelParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            F.ModelParams(eps=-0.1, dt=1e-7)
        with pytest.raises(ValueError):
            F.ModelParams(eps=0.05, dt=1e-7, fp_tol=1e-3)
        with pytest.raises(ValueError):
            F.ModelParams(eps=0.05, dt=1e-7, flow="bogus")

    def test_session_requires_resolvable_eps(self):
        g = G.make_grid(2, 32)
        params = F.ModelParams(eps=0.5 * g.spacing, dt=1e-8)
        with pytest.raises(ValueError):
            F.new_session(g, params, geo.builtin_scene("circle"))


class TestStationarity:
    @pytest.mark.parametrize("flow", ["classical", "mugnai", "allen_cahn"])
    def test_flat_profile_100_steps(self, flow):
        s = flat_session(flow)
        u0 = s.u.copy()
        for _ in range(100):
            F.step(s)
        assert np.max(np.abs(s.u - u0)) <= 1e-6
        assert s.n == 100 and s.t == pytest.approx(100 * s.params.dt)

    def test_classical_converges_fast_on_profile(self):
        s = flat_session("classical")
        F.step(s)
        assert s.fp_iters[-1] <= 3

    def test_allen_cahn_zero_fixed_point(self):
        g = G.make_grid(1, 64)
        params = F.ModelParams(eps=2.0 / 64, dt=1e-4, flow="allen_cahn")
        s = F.FlowSession(grid=g, params=params, u=np.zeros(g.shape), mu=np.zeros(g.shape))
        F.step(s)
        assert np.max(np.abs(s.u)) == 0.0


class TestSteppers:
    def test_flow_kind_mismatch(self):
        s = flat_session("classical")
        with pytest.raises(ValueError):
            F.step_mugnai(s)
        with pytest.raises(ValueError):
            F.step_allen_cahn(s)

    def test_divergence_detected(self):
        # a absurd dt on rough data makes the fixed point blow up or stall
        g = G.make_grid(2, 16)
        rng = np.random.default_rng(0)
        params = F.ModelParams(eps=2.0 / 16, dt=1.0, flow="classical", fp_max_iter=20)
        u = G.random_band_limited(g, rng, max_mode=6)
        s = F.FlowSession(grid=g, params=params, u=u, mu=np.zeros(g.shape))
        with pytest.raises((F.NonConvergenceError, F.DivergenceError)):
            for _ in range(50):
                F.step(s)

    def test_alpha_preconditioning_equivalence(self):
        # one classical step with alpha=2 from (u, 2*mu) matches alpha=1
        # from (u, mu) to fixed-point accuracy
        s1 = flat_session("classical")
        g = s1.grid
        base = s1.params
        rng = np.random.default_rng(3)
        bump = G.random_band_limited(g, rng, max_mode=4, amplitude=0.05, offset=0.0)
        s1.u = s1.u + bump
        s1.mu = s1.mu.copy()
        params2 = F.ModelParams(
            eps=base.eps, dt=base.dt, alpha=2.0, sigma=base.sigma, fp_tol=base.fp_tol, flow="classical"
        )
        s2 = F.FlowSession(grid=g, params=params2, u=s1.u.copy(), mu=2.0 * s1.mu)
        F.step(s1)
        F.step(s2)
        assert np.max(np.abs(s1.u - s2.u)) <= 1e-7
        assert np.max(np.abs(2.0 * s1.mu - s2.mu)) <= 1e-6

    def test_mugnai_penalty_entered_explicitly(self):
        # the penalty field is computed from u^n: freezing it means two
        # sessions differing only in fp_max_iter still agree after one step
        s1 = flat_session("mugnai")
        rng = np.random.default_rng(4)
        bump = G.random_band_limited(s1.grid, rng, max_mode=4, amplitude=0.02, offset=0.0)
        s1.u = s1.u + bump
        s2 = F.FlowSession(grid=s1.grid, params=s1.params, u=s1.u.copy(), mu=s1.mu.copy())
        F.step(s1)
        F.step(s2)
        assert np.array_equal(s1.u, s2.u)


class TestEnergyDescent:
    def test_classical_circle_energy_monotone(self):
        g = G.make_grid(2, 32)
        eps = 2.0 / 32
        dt = eps**2 / (2 * 32**2)
        params = F.ModelParams(eps=eps, dt=dt, flow="classical")
        s = F.new_session(g, params, geo.builtin_scene("circle", radius=0.2), track_energy=True)
        for _ in range(50):
            F.step(s)
        trace = np.array(s.energy_trace)
        slack = 1e-6 * (1.0 + np.abs(trace[:-1]))
        assert np.all(np.diff(trace) <= slack)

    def test_mugnai_circle_energy_monotone(self):
        g = G.make_grid(2, 32)
        eps = 2.0 / 32
        dt = eps**2 / (8 * 32**2)
        params = F.ModelParams(eps=eps, dt=dt, flow="mugnai")
        s = F.new_session(g, params, geo.builtin_scene("circle", radius=0.2), track_energy=True)
        for _ in range(50):
            F.step(s)
        trace = np.array(s.energy_trace)
        slack = 1e-6 * (1.0 + np.abs(trace[:-1]))
        assert np.all(np.diff(trace) <= slack)


class TestStabilityLimits:
    def test_alpha_one_term_dominates(self):
        # dt -> 0 leaves the dt-independent (alpha M2)^2 = 1: reported as-is
        g = G.make_grid(2, 64)
        params = F.ModelParams(eps=2.0 / 64, dt=1e-20, flow="classical")
        report = F.stability_limits(params, g)
        assert report.lhs_classical == pytest.approx(1.0, rel=1e-6)
        assert not report.classical_satisfied

    def test_small_alpha_satisfied(self):
        g = G.make_grid(2, 64)
        params = F.ModelParams(eps=2.0 / 64, dt=1e-20, alpha=0.1, flow="classical")
        report = F.stability_limits(params, g)
        assert report.lhs_classical == pytest.approx(0.01, rel=1e-6)
        assert report.classical_satisfied

    def test_heuristic_min(self):
        g = G.make_grid(2, 128)  # dx = 1/256
        eps = 2.0 / 128
        params = F.ModelParams(eps=eps, dt=1e-9, flow="classical")
        report = F.stability_limits(params, g)
        expected = min(eps**2 * g.spacing**2, eps**4)
        assert report.heuristic_dt_max == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(eps**2 * g.spacing**2)  # the dx^2 term wins here

    def test_well_bounds(self):
        m1, m2, m3, m4 = F.well_derivative_bounds()
        assert m1 == pytest.approx(np.sqrt(3) / 18, abs=1e-8)
        assert (m2, m3, m4) == (1.0, 6.0, 12.0)


class TestSaddleRelaxation:
    def test_cross_relaxes_to_saddle(self):
        g = G.make_grid(2, 64)
        eps = 2.0 / 64
        params = F.ModelParams(eps=eps, dt=eps / 10.0, flow="allen_cahn")
        s = F.new_session(g, params, geo.builtin_scene("cross"))
        for _ in range(400):
            F.step(s)
        res = eps**2 * G.laplacian(g, s.u) - well(s.u, 1)
        assert np.max(np.abs(res)) <= 1e-3
        # the nodal lines sit exactly at u = 1/2 on grid nodes (up to
        # rounding), so the strict sets are read with a 1e-9 guard
        assert an.count_components(s.u, 0.5 + 1e-9) == 2
        assert an.count_components(-s.u, -(0.5 - 1e-9)) == 2  # {u < 1/2}
