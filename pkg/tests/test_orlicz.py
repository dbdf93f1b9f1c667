"""Discrete Orlicz energies: local modular and gauge, the nonlocal modular
with its band/strip/tail split, and the seminorm built on it."""

import numpy as np
import pytest

from fglap.errors import ConfigurationError, DomainError
from fglap.orlicz import (
    GridFunction,
    Mesh,
    luxemburg_norm_LG,
    luxemburg_seminorm_W,
    modular_LG,
    modular_W,
    modular_W_parts,
)
from fglap.young import PowerYoung, eval_Gbar


def sine_corpus(mesh, n, seed=42):
    """Random 4-term sine series, endpoints forced to exact zero."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        coef = rng.normal(size=4) / np.arange(1, 5) ** 2
        vals = sum(c * np.sin(np.pi * k * (mesh.nodes + 1) / 2)
                   for k, c in enumerate(coef, start=1))
        vals[0] = vals[-1] = 0.0
        out.append(GridFunction(mesh, vals))
    return out


class TestMesh:
    def test_basic_geometry(self):
        mesh = Mesh(33)
        assert mesh.h == pytest.approx(2.0 / 32.0)
        assert mesh.nodes[0] == -1.0 and mesh.nodes[-1] == 1.0
        # trapezoidal weights integrate constants exactly
        assert float(mesh.weights.sum()) == pytest.approx(2.0, rel=1e-14)

    def test_minimum_size(self):
        Mesh(9)
        with pytest.raises(ConfigurationError):
            Mesh(8)

    def test_refined_keeps_nodes(self):
        coarse = Mesh(17)
        fine = coarse.refined()
        assert fine.m == 33
        idx = coarse.coarse_index_in(fine)
        assert np.allclose(fine.nodes[idx], coarse.nodes)

    def test_nesting_rejected(self):
        with pytest.raises(ConfigurationError):
            Mesh(33).coarse_index_in(Mesh(49))


class TestGridFunction:
    def test_shape_checked(self):
        mesh = Mesh(9)
        with pytest.raises(DomainError):
            GridFunction(mesh, np.zeros(10))

    def test_finite_checked(self):
        mesh = Mesh(9)
        vals = np.zeros(9)
        vals[4] = np.inf
        with pytest.raises(DomainError):
            GridFunction(mesh, vals)

    def test_evenness_helper(self):
        mesh = Mesh(9)
        even = GridFunction(mesh, mesh.nodes ** 2)
        odd = GridFunction(mesh, mesh.nodes)
        assert even.is_even() and not odd.is_even()


class TestLocalModular:
    def test_constant_exact(self, power4):
        # G(1) = 1/4 over an interval of length 2
        for m in (9, 33, 65):
            one = GridFunction(Mesh(m), np.ones(m))
            assert modular_LG(one, power4) == pytest.approx(0.5, rel=1e-14)

    def test_cone_second_order(self, power3):
        # int G(1-|x|) = 2/(3*4) = 1/6; trapezoid error contracts by 4x
        errs = []
        for m in (33, 65, 129):
            mesh = Mesh(m)
            cone = GridFunction(mesh, 1.0 - np.abs(mesh.nodes))
            errs.append(abs(modular_LG(cone, power3) - 1.0 / 6.0))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
        assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)


class TestLuxemburgGauge:
    def test_constant_closed_form(self, power4):
        # rho(u/lam) = 2 (1/lam)^4 / 4 = 1 at lam = (1/2)^{1/4}
        one = GridFunction(Mesh(33), np.ones(33))
        assert luxemburg_norm_LG(one, power4) == pytest.approx(0.5 ** 0.25, rel=1e-9)

    def test_homogeneity(self, power4):
        mesh = Mesh(33)
        u = GridFunction(mesh, np.cos(mesh.nodes))
        base = luxemburg_norm_LG(u, power4)
        scaled = luxemburg_norm_LG(GridFunction(mesh, 3.0 * u.values), power4)
        assert scaled == pytest.approx(3.0 * base, rel=1e-9)

    def test_unit_ball_characterization(self, dp34):
        # modular of u / ||u|| equals one, and the two-branch power bounds
        # min/max(lam^{p-}, lam^{p+}) sandwich the modular
        mesh = Mesh(33)
        u = GridFunction(mesh, 1.0 - mesh.nodes ** 2)
        norm = luxemburg_norm_LG(u, dp34)
        unit = GridFunction(mesh, u.values / norm)
        assert modular_LG(unit, dp34) == pytest.approx(1.0, abs=1e-6)
        rho = modular_LG(u, dp34)
        lo = min(norm ** dp34.p_minus, norm ** dp34.p_plus)
        hi = max(norm ** dp34.p_minus, norm ** dp34.p_plus)
        assert lo - 1e-6 <= rho <= hi + 1e-6

    def test_duality_bound(self, power4):
        # |int u v| <= 2 ||u||_G ||v||_Gbar; empirical worst ratio ~0.61.
        # The conjugate of t^4/4 is t^{4/3}/(4/3), so its gauge is explicit.
        mesh = Mesh(33)
        rng = np.random.default_rng(3)
        pc = 4.0 / 3.0
        assert eval_Gbar(power4, 1.0) == pytest.approx(1.0 / pc, rel=1e-9)

        def gauge_bar(v):
            rho1 = float(np.sum(mesh.weights * np.abs(v.values) ** pc / pc))
            return rho1 ** (1.0 / pc)

        worst = 0.0
        for _ in range(15):
            u = GridFunction(mesh, rng.normal(size=mesh.m))
            v = GridFunction(mesh, rng.normal(size=mesh.m))
            lhs = abs(float(np.sum(mesh.weights * u.values * v.values)))
            worst = max(worst, lhs / (luxemburg_norm_LG(u, power4) * gauge_bar(v)))
        assert worst <= 2.0


class TestNonlocalModular:
    def test_boundary_values_must_vanish(self, power4):
        mesh = Mesh(33)
        u = GridFunction(mesh, np.ones(mesh.m))
        with pytest.raises(DomainError):
            modular_W(u, power4, 0.3)

    def test_parts_sum_and_tail_modes(self, power4):
        mesh = Mesh(33)
        bump = GridFunction(mesh, 1.0 - mesh.nodes ** 2)
        pa = modular_W_parts(bump, power4, 0.3, tail_mode="analytic")
        pz = modular_W_parts(bump, power4, 0.3, tail_mode="zero")
        for parts in (pa, pz):
            assert parts["total"] == pytest.approx(
                parts["far"] + parts["band"] + parts["strip"], rel=1e-12)
        assert pa["tail_dropped"] == 0.0
        assert pz["tail_dropped"] > 0.0
        # dropping the exterior tail beyond r_far only removes energy
        assert pz["total"] < pa["total"]

    def test_cone_refinement(self, power4):
        coarse = Mesh(33)
        dense = Mesh(257)
        vals = [modular_W(GridFunction(m, 1.0 - np.abs(m.nodes)), power4, 0.3)
                for m in (coarse, dense)]
        assert vals[0] == pytest.approx(vals[1], rel=0.02)

    def test_r_far_extension_converges(self, power4):
        # analytic tail closes the exterior exactly, so widening the
        # truncation radius must not move the total
        mesh = Mesh(33)
        bump = GridFunction(mesh, 1.0 - mesh.nodes ** 2)
        a = modular_W(bump, power4, 0.3, r_far=50.0)
        b = modular_W(bump, power4, 0.3, r_far=200.0)
        assert a == pytest.approx(b, rel=1e-10)


class TestNonlocalSeminorm:
    def test_homogeneity(self, power4):
        mesh = Mesh(33)
        u = GridFunction(mesh, 1.0 - mesh.nodes ** 2)
        base = luxemburg_seminorm_W(u, power4, 0.3)
        scaled = luxemburg_seminorm_W(GridFunction(mesh, 2.5 * u.values),
                                      power4, 0.3)
        assert scaled == pytest.approx(2.5 * base, rel=1e-8)

    def test_poincare_ratio_stable(self, power4):
        # local gauge is controlled by the nonlocal one on a corpus of
        # sine series; bound and mesh-stability of the worst ratio
        worst = {}
        for m in (33, 65):
            mesh = Mesh(m)
            rs = [luxemburg_norm_LG(u, power4) / luxemburg_seminorm_W(u, power4, 0.3)
                  for u in sine_corpus(mesh, 20)]
            worst[m] = max(rs)
        assert worst[33] <= 1.0
        assert worst[33] == pytest.approx(worst[65], rel=0.10)
