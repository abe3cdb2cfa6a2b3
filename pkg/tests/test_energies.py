import numpy as np
import pytest

from pfwillmore import energies as E
from pfwillmore import geometry as geo
from pfwillmore import grid as G
from pfwillmore.profiles import well


@pytest.fixture(scope="module")
def g64():
    return G.make_grid(2, 32)


@pytest.fixture(scope="module")
def circle_128():
    g = G.make_grid(2, 128)
    eps = 2.0 / 128
    pair = geo.init_fields(geo.builtin_scene("circle", radius=0.15), g, eps)
    return g, pair.u0, eps


@pytest.fixture(scope="module")
def flat_1d():
    # interfaces at 1/4 and 3/4, medial kinks a full 32*eps away: the
    # sampled profile is a discrete fixed point to rounding accuracy
    g = G.make_grid(1, 256)
    eps = 2.0 / 256
    pair = geo.init_fields(geo.Slab(axis=0, center=0.5, half_width=0.25), g, eps)
    return g, pair.u0, eps


@pytest.fixture(scope="module")
def flat_1d_fine():
    # high resolution ratio eps/dx = 64 for the FD-Hessian energies, whose
    # flat-profile residual is pure second-order truncation
    g = G.make_grid(1, 4096)
    eps = 1.0 / 64
    pair = geo.init_fields(geo.Slab(axis=0, center=0.5, half_width=0.25), g, eps)
    return g, pair.u0, eps


def random_pair(g, seed, max_mode=6):
    rng = np.random.default_rng(seed)
    u = G.random_band_limited(g, rng, max_mode=max_mode)
    w = G.random_band_limited(g, rng, max_mode=max_mode, offset=0.0)
    w /= max(G.rms(w), 1e-30)
    return u, w


# ---------------------------------------------------------------------------
# energy values
# ---------------------------------------------------------------------------

class TestPerimeterAndDiscrepancy:
    def test_zero_field(self, g64):
        assert E.eval_perimeter(g64, np.zeros(g64.shape), 0.05) == 0.0

    def test_circle_modica_mortola(self, circle_128):
        g, u, eps = circle_128
        assert E.eval_perimeter(g, u, eps) == pytest.approx(2 * np.pi * 0.15 / 6.0, rel=0.02)

    def test_two_interface_1d(self, flat_1d):
        g, u, eps = flat_1d
        assert E.eval_perimeter(g, u, eps) == pytest.approx(2.0 / 6.0, rel=0.01)

    def test_discrepancy_flat_profile(self, flat_1d):
        g, u, eps = flat_1d
        _, mass = E.eval_discrepancy(g, u, eps)
        assert mass <= 1e-6

    def test_discrepancy_constant_half(self, g64):
        eps = 0.05
        xi, mass = E.eval_discrepancy(g64, np.full(g64.shape, 0.5), eps)
        assert np.allclose(xi, -1.0 / (32.0 * eps), atol=1e-12)
        assert mass == pytest.approx(1.0 / (32.0 * eps), rel=1e-12)

    def test_discrepancy_circle_ratio(self, circle_128):
        g, u, eps = circle_128
        _, mass = E.eval_discrepancy(g, u, eps)
        assert mass / E.eval_perimeter(g, u, eps) <= 0.1


class TestClassicalEnergy:
    def test_zero_field(self, g64):
        assert E.eval_classical(g64, np.zeros(g64.shape), 0.05) == 0.0

    def test_circle_willmore_limit(self, circle_128):
        g, u, eps = circle_128
        # c0 * (1/2) * 2 pi R * (1/R^2) = pi/(6 R)
        assert E.eval_classical(g, u, eps) == pytest.approx(np.pi / (6 * 0.15), rel=0.05)

    def test_flat_profile_annihilated(self, flat_1d):
        g, u, eps = flat_1d
        assert E.eval_classical(g, u, eps) <= 1e-8

    def test_relabeling_symmetry(self, g64):
        u, _ = random_pair(g64, 7)
        a = E.eval_classical(g64, u, 0.05)
        b = E.eval_classical(g64, 1.0 - u, 0.05)
        assert a == pytest.approx(b, rel=1e-12)

    def test_translation_invariance(self, g64):
        u, _ = random_pair(g64, 8)
        a = E.eval_classical(g64, u, 0.05)
        b = E.eval_classical(g64, np.roll(u, (3, -5), axis=(0, 1)), 0.05)
        assert a == pytest.approx(b, rel=1e-12)


class TestMugnaiEnergy:
    def test_flat_profile(self, flat_1d_fine):
        g, u, eps = flat_1d_fine
        assert E.eval_mugnai(g, u, eps, E.RegParams(sigma=0.0)) <= 1e-6

    def test_constant_half(self, g64):
        # W'(1/2) = 0 and the normal vanishes: energy 0
        assert E.eval_mugnai(g64, np.full(g64.shape, 0.5), 0.05) == 0.0

    def test_circle_matches_classical(self, circle_128):
        g, u, eps = circle_128
        mug = E.eval_mugnai(g, u, eps)
        cl = E.eval_classical(g, u, eps)
        assert mug == pytest.approx(cl, rel=0.10)


class TestBellettiniEnergy:
    def test_flat_interface(self, flat_1d_fine):
        # exact normalization so the far field is handled by the eta cutoff
        # alone (the sigma floor spreads a ~5e-7 tail band at any resolution)
        g, u, eps = flat_1d_fine
        value = E.eval_bellettini(g, u, eps, E.RegParams(sigma=0.0))
        assert value <= 1e-6 * E.eval_perimeter(g, u, eps)

    def test_constant_cutoff(self, g64):
        assert E.eval_bellettini(g64, np.full(g64.shape, 0.3), 0.05) == 0.0

    def test_circle_curvature_band(self, circle_128):
        g, u, eps = circle_128
        assert E.eval_bellettini(g, u, eps) == pytest.approx(np.pi / (6 * 0.15), rel=0.10)


class TestErrEnergy:
    def test_beta_zero_is_classical(self, g64):
        u, _ = random_pair(g64, 9)
        assert E.eval_err(g64, u, 0.05, beta=0.0) == E.eval_classical(g64, u, 0.05)

    def test_flat_profile(self, flat_1d_fine):
        g, u, eps = flat_1d_fine
        value = E.eval_err(g, u, eps, alpha_exp=0.0, beta=1.0, reg=E.RegParams(sigma=0.0))
        assert value <= 1e-6

    def test_circle_penalty_is_small(self, circle_128):
        g, u, eps = circle_128
        cl = E.eval_classical(g, u, eps)
        total = E.eval_err(g, u, eps, alpha_exp=0.0, beta=1.0)
        assert (total - cl) / cl <= 0.2


# ---------------------------------------------------------------------------
# algebraic identities (criterion 5 operators: FD everywhere, exact normal)
# ---------------------------------------------------------------------------

class TestIdentities:
    @pytest.fixture(scope="class")
    def setup(self):
        g = G.make_grid(2, 32)
        rng = np.random.default_rng(17)
        u = G.random_band_limited(g, rng, max_mode=8)
        return g, u, 0.05, E.RegParams(sigma=0.0)

    def test_mugnai_equals_classical_minus_half_j2(self, setup):
        g, u, eps, reg = setup
        jt = E.eval_j_terms(g, u, eps, reg, laplacian_kind="fd")
        mug = E.eval_mugnai(g, u, eps, reg)
        cl = E.eval_classical(g, u, eps, laplacian_kind="fd")
        assert mug == pytest.approx(cl - 0.5 * jt.J2, rel=1e-6)

    def test_three_way_split(self, setup):
        g, u, eps, reg = setup
        jt = E.eval_j_terms(g, u, eps, reg, laplacian_kind="fd")
        zt = E.zeta_tilde(g, u, eps, reg)
        term1 = np.mean(zt * zt) / (2 * eps)
        mug = E.eval_mugnai(g, u, eps, reg)
        assert mug == pytest.approx(term1 + jt.split_geo + jt.split_soft, rel=1e-6)

    def test_j_combination_identity(self, setup):
        # the expansion of the four J terms cancels pointwise:
        # J1 - J2 - J3 + J4 = (2/eps) int zeta~^2
        g, u, eps, reg = setup
        jt = E.eval_j_terms(g, u, eps, reg, laplacian_kind="fd")
        zt = E.zeta_tilde(g, u, eps, reg)
        rhs = (2.0 / eps) * np.mean(zt * zt)
        lhs = jt.J1 - jt.J2 - jt.J3 + jt.J4
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_split_soft_nonnegative_pointwise(self, setup):
        g, u, eps, reg = setup
        gr = G.fd_gradient(g, u)
        n, _ = E._normal(gr, reg.sigma)
        H = G.fd_hessian(g, u)
        Hn = np.einsum("ij...,j...->i...", H, n)
        hn2 = np.sum(Hn * Hn, axis=0)
        hnn = np.einsum("i...,i...->...", Hn, n)
        assert np.all(hn2 - hnn**2 >= -1e-12 * np.max(hn2))

    def test_j_terms_flat_profile(self):
        # the J terms carry the FD-Hessian truncation, so they vanish on
        # flat profiles at second order in dx rather than to 1e-6 outright;
        # the split terms do reach absolute smallness
        eps = 1.0 / 64
        reg = E.RegParams(sigma=0.0)
        values = {}
        for modes in (2048, 4096):
            g = G.make_grid(1, modes)
            u = geo.init_fields(geo.Slab(axis=0, center=0.5, half_width=0.25), g, eps).u0
            values[modes] = E.eval_j_terms(g, u, eps, reg, laplacian_kind="fd")
        coarse, fine = values[2048], values[4096]
        assert max(abs(v) for v in coarse) <= 0.2
        for name in ("J1", "J2", "J3", "J4"):
            c, f = getattr(coarse, name), getattr(fine, name)
            assert abs(f) <= max(abs(c) / 3.5, 1e-8)  # ~order-2 decay to zero
        assert fine.split_geo <= 1e-6 and fine.split_soft <= 1e-6


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

class TestGradClassical:
    def test_zero_field(self, g64):
        mu, rhs = E.grad_classical(g64, np.zeros(g64.shape), 0.05)
        assert np.max(np.abs(mu)) == 0.0 and np.max(np.abs(rhs)) == 0.0

    def test_flat_profile_stationary(self, flat_1d):
        g, u, eps = flat_1d
        _, rhs = E.grad_classical(g, u, eps)
        scale = np.max(np.abs(u)) / eps**2
        assert np.max(np.abs(rhs)) <= 1e-6 * scale


class TestMugnaiPenalty:
    def test_constant_field(self, g64):
        out = E.grad_mugnai_penalty(g64, np.full(g64.shape, 0.5), 0.05)
        assert np.max(np.abs(out)) == 0.0

    def test_requires_sigma(self, g64):
        with pytest.raises(ValueError):
            E.grad_mugnai_penalty(g64, np.zeros(g64.shape), 0.05, E.RegParams(sigma=0.0))

    def test_circle_2d_small(self):
        # in 2D, H^2 - |A|^2 = 0: the near-interface penalty is O(eps)
        # relative to the 3D magnitude scale W'_max * 2/R^2
        g = G.make_grid(2, 64)
        eps = 2.0 / 64
        R = 0.2
        pair = geo.init_fields(geo.builtin_scene("circle", radius=R), g, eps)
        b2 = E.grad_mugnai_penalty(g, pair.u0, eps)
        band = np.abs(pair.u0 - 0.5) < 0.4
        scale_3d = np.max(np.abs(well(pair.u0, 1))) * 2.0 / R**2
        assert np.max(np.abs(b2[band])) <= eps * scale_3d

    def test_sphere_3d_peak(self):
        # B ~ W'(u) (H^2 - |A|^2) with H^2 - |A|^2 = 2/(R + d)^2 on a sphere
        g = G.make_grid(3, 32)
        eps = 2.5 / 64
        R = 0.25
        shape = geo.Ball((0.5, 0.5, 0.5), R)
        pair = geo.init_fields(shape, g, eps)
        b3 = E.grad_mugnai_penalty(g, pair.u0, eps)
        d = geo.signed_distance(shape, g.coords())
        analytic = well(pair.u0, 1) * 2.0 / (R + d) ** 2
        band = np.abs(pair.u0 - 0.5) < 0.4
        assert np.max(b3[band]) == pytest.approx(np.max(analytic[band]), rel=0.2)


class TestGradientOracle:
    @pytest.mark.parametrize(
        "kind,tol",
        [("classical", 1e-5), ("mugnai", 1e-3), ("bellettini", 1e-3), ("err", 1e-5)],
    )
    def test_random_fields(self, g64, kind, tol):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(10):
            u = G.random_band_limited(g64, rng, max_mode=6)
            w = G.random_band_limited(g64, rng, max_mode=6, offset=0.0)
            w /= max(G.rms(w), 1e-30)
            err = E.check_gradient(kind, g64, u, 0.05, w, h=1e-5)
            worst = max(worst, err)
        assert worst <= tol

    def test_zero_direction(self, g64):
        u, _ = random_pair(g64, 11)
        err = E.check_gradient("classical", g64, u, 0.05, np.zeros(g64.shape))
        assert err == 0.0

    def test_h_bounds(self, g64):
        u, w = random_pair(g64, 12)
        with pytest.raises(ValueError):
            E.check_gradient("classical", g64, u, 0.05, w, h=1e-2)

    def test_unknown_kind(self, g64):
        u, w = random_pair(g64, 13)
        with pytest.raises(ValueError):
            E.check_gradient("helfrich", g64, u, 0.05, w)


class TestGradBellettini:
    def test_flat_profile_small(self):
        # with exact normalization K vanishes away from the medial kinks,
        # and 32*eps margins push the kink gradients below the eta cutoff
        g = G.make_grid(1, 4096)
        eps = 1.0 / 128
        u = geo.init_fields(geo.Slab(axis=0, center=0.5, half_width=0.25), g, eps).u0
        out = E.grad_bellettini(g, u, eps, E.RegParams(sigma=0.0))
        assert np.max(np.abs(out)) <= 1e-6 / eps**3

    def test_translation_equivariance(self, g64):
        u, _ = random_pair(g64, 14)
        a = E.grad_bellettini(g64, np.roll(u, 4, axis=0), 0.05)
        b = np.roll(E.grad_bellettini(g64, u, 0.05), 4, axis=0)
        assert np.allclose(a, b, atol=1e-9 * max(1.0, np.max(np.abs(a))))


class TestGradErr:
    def test_beta_zero_matches_classical(self, g64):
        u, _ = random_pair(g64, 15)
        rhs_err = E.grad_err(g64, u, 0.05, beta=0.0)
        rhs_cl = E.grad_classical(g64, u, 0.05)[1]
        assert np.array_equal(rhs_err, rhs_cl)

    def test_flat_profile_small(self, flat_1d_fine):
        # the penalty contribution (grad_err minus the classical part)
        # vanishes on profiles; its natural magnitude is 1/eps^4
        g, u, eps = flat_1d_fine
        out = E.grad_err(g, u, eps, alpha_exp=0.0, beta=1.0)
        rhs_cl = E.grad_classical(g, u, eps)[1]
        assert np.max(np.abs(out - rhs_cl)) <= 1e-5 / eps**4


def test_energy_report_row(g64):
    u, _ = random_pair(g64, 16)
    report = E.energy_report(g64, u, 0.05)
    row = report.csv_row()
    assert len(row.split(",")) == 6
    values = [float(c) for c in row.split(",")]
    assert all(np.isfinite(values)) and all(v >= 0 for v in values)
    partial = E.energy_report(g64, u, 0.05, which=("perimeter",))
    assert partial.classical_Weps is None
    assert partial.csv_row().split(",")[1] == ""
