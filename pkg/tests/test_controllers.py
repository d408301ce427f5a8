import numpy as np
import pytest

from conftest import random_interior_positions, uniform_field
from coverage_control.controllers import (
    ControlState,
    cortes,
    lloyd,
    make_controller,
    tvd_c,
    tvd_dk,
)
from coverage_control.density import builtin
from coverage_control.geometry import Domain, delaunay_distances, tessellate
from coverage_control.jacobian import CentroidJacobian, assemble, spectral_radius
from coverage_control.moments import MomentSet, QuadratureConfig, moments
from coverage_control.sim import init_cvt

CFG = QuadratureConfig()


def state_at(positions, field, t, domain, kappa=1.0, with_jacobian=True, v_max=5.0):
    tess = tessellate(np.asarray(positions, dtype=float), domain)
    ms = moments(tess, field, t, CFG)
    jac = assemble(tess, field, t, ms, CFG) if with_jacobian else None
    return ControlState(tessellation=tess, moments=ms, jacobian=jac,
                        kappa=kappa, time=t, v_max=v_max)


def synthetic_state(positions, centroids, masses=None, mass_rates=None,
                    centroid_rates=None, jacobian=None, kappa=1.0, v_max=5.0):
    """Hand-built state for exact algebraic checks."""
    p = np.asarray(positions, dtype=float)
    n = len(p)

    class _Tess:
        pass

    tess = _Tess()
    tess.positions = p
    ms = MomentSet(
        masses=np.ones(n) if masses is None else np.asarray(masses, dtype=float),
        centroids=np.asarray(centroids, dtype=float),
        mass_rates=np.zeros(n) if mass_rates is None else np.asarray(mass_rates, dtype=float),
        centroid_rates=(np.zeros((n, 2)) if centroid_rates is None
                        else np.asarray(centroid_rates, dtype=float)),
    )
    return ControlState(tessellation=tess, moments=ms, jacobian=jacobian,
                        kappa=kappa, v_max=v_max)


class TestLloyd:
    def test_zero_at_cvt(self, unit_box):
        st = state_at([[-0.5, 0.0], [0.5, 0.0]], uniform_field(1.0), 0.0, unit_box,
                      with_jacobian=False)
        cmd = lloyd(st)
        assert np.allclose(cmd.velocities, 0.0, atol=1e-9)
        assert cmd.tracking_error < 1e-9

    def test_proportional_to_offset(self):
        st = synthetic_state([[1.0, 0.0]], [[0.0, 0.0]], kappa=1.0)
        cmd = lloyd(st)
        assert np.allclose(cmd.velocities, [[-1.0, 0.0]])

    def test_gain_scaling(self):
        st = synthetic_state([[1.0, 0.0]], [[0.0, 0.0]], kappa=2.5)
        assert np.allclose(lloyd(st).velocities, [[-2.5, 0.0]])


class TestCortes:
    def test_static_density_reduces_to_lloyd(self, rng, arena):
        field = builtin("phi1")
        from coverage_control.sim import freeze_field

        frozen = freeze_field(field, 1.2)
        p = random_interior_positions(rng, arena, 5)
        st = state_at(p, frozen, 1.2, arena, with_jacobian=False)
        assert np.allclose(cortes(st).velocities, lloyd(st).velocities, atol=1e-12)

    def test_pure_feedforward_at_cvt(self):
        rates = [[0.3, -0.2], [0.1, 0.4]]
        st = synthetic_state([[0.0, 0.0], [1.0, 1.0]], [[0.0, 0.0], [1.0, 1.0]],
                             mass_rates=[0.5, -0.5], centroid_rates=rates)
        assert np.allclose(cortes(st).velocities, rates)

    def test_mass_rate_term(self):
        st = synthetic_state([[1.0, 0.0]], [[0.0, 0.0]], masses=[2.0],
                             mass_rates=[1.0], kappa=1.0)
        # gain = kappa + m_rate / m = 1.5
        assert np.allclose(cortes(st).velocities, [[-1.5, 0.0]])


class TestTvdC:
    def test_zero_jacobian_reduces_to_feedforward_form(self):
        jac = CentroidJacobian(n=1, blocks={})
        st = synthetic_state([[1.0, 0.0]], [[0.0, 0.0]],
                             centroid_rates=[[0.2, 0.1]], jacobian=jac)
        cmd = tvd_c(st)
        assert np.allclose(cmd.velocities, [[-0.8, 0.1]])
        assert not cmd.condition_flag

    def test_zero_at_static_cvt(self, unit_box):
        st = state_at([[-0.5, 0.0], [0.5, 0.0]], uniform_field(1.0), 0.0, unit_box)
        cmd = tvd_c(st)
        assert np.allclose(cmd.velocities, 0.0, atol=1e-9)

    def test_singular_fallback_flags_and_matches_one_hop(self):
        jac = CentroidJacobian(n=1, blocks={(0, 0): np.eye(2)})
        st = synthetic_state([[1.0, 0.0]], [[0.0, 0.0]],
                             centroid_rates=[[0.0, 0.3]], jacobian=jac)
        cmd = tvd_c(st)
        assert cmd.condition_flag
        assert np.allclose(cmd.velocities, tvd_dk(st, 1).velocities)


class TestTvdDk:
    def test_zero_hops_formula(self):
        jac = CentroidJacobian(n=1, blocks={(0, 0): 0.5 * np.eye(2)})
        st = synthetic_state([[1.0, 0.0]], [[0.0, 0.0]],
                             centroid_rates=[[0.0, 0.3]], jacobian=jac)
        cmd = tvd_dk(st, 0)
        assert np.allclose(cmd.velocities, [[-1.0, 0.3]])

    def test_large_k_converges_to_tvd_c(self, rng, arena):
        field = builtin("phi2")
        p0 = random_interior_positions(rng, arena, 5)
        p = init_cvt(p0, field, 0.0, arena, CFG, tol=1e-9).positions
        st = state_at(p, field, 0.0, arena)
        rho = spectral_radius(st.jacobian)
        assert rho < 1.0
        # k large enough that rho**k pushes the truncation error below 1e-9
        k = min(int(np.ceil(-21 / np.log(rho))), 4000)
        exact = tvd_c(st).velocities
        approx = tvd_dk(st, k).velocities
        assert np.max(np.linalg.norm(exact - approx, axis=1)) < 1e-8

    def test_hop_zero_is_cortes_without_mass_rate_term(self, rng, arena):
        field = builtin("phi2")
        p = random_interior_positions(rng, arena, 4)
        st = state_at(p, field, 2.0, arena)
        v0 = tvd_dk(st, 0).velocities
        m = st.moments
        expected = (m.centroid_rates
                    - st.kappa * (st.tessellation.positions - m.centroids))
        assert np.allclose(v0, expected, atol=1e-12)

    def test_far_robots_do_not_affect_command(self):
        # chain 0-1-2-3-4: with k = 1, robot 0's command reads positions and
        # cell data only up to two hops away; perturbing robot 3 or 4 must
        # leave it bit-identical
        dom = Domain.box(-4, 4, -1, 1)
        field = builtin("phi1")
        p = np.array([[-3.0, 0.0], [-1.5, 0.0], [0.0, 0.0], [1.5, 0.0], [3.0, 0.0]])
        tess = tessellate(p, dom)
        dist = delaunay_distances(tess)
        assert dist[0, 3] == 3 and dist[0, 4] == 4
        base = tvd_dk(state_at(p, field, 1.0, dom), 1).velocities
        for far in (3, 4):
            q = p.copy()
            q[far] += [0.1, 0.05]
            moved = tvd_dk(state_at(q, field, 1.0, dom), 1).velocities
            assert np.array_equal(base[0], moved[0])


class TestDiagnosticsAndCaps:
    def test_speed_cap_applied(self):
        st = synthetic_state([[10.0, 0.0]], [[0.0, 0.0]], kappa=1.0, v_max=2.0)
        cmd = lloyd(st)
        assert cmd.capped
        assert np.linalg.norm(cmd.velocities[0]) == pytest.approx(2.0)
        assert np.allclose(cmd.velocities[0] / 2.0, [-1.0, 0.0])

    def test_cap_preserves_slow_robots(self):
        st = synthetic_state([[10.0, 0.0], [0.1, 0.0]], [[0.0, 0.0], [0.0, 0.0]],
                             kappa=1.0, v_max=2.0)
        cmd = lloyd(st)
        assert np.allclose(cmd.velocities[1], [-0.1, 0.0])

    def test_all_controllers_zero_at_exact_static_cvt(self, unit_box):
        st = state_at([[-0.5, 0.0], [0.5, 0.0]], uniform_field(1.0), 0.0, unit_box)
        for cmd in (lloyd(st), cortes(st), tvd_c(st), tvd_dk(st, 3)):
            assert np.max(np.abs(cmd.velocities)) < 1e-9

    def test_velocities_finite(self, rng, arena):
        field = builtin("phi4")
        p = random_interior_positions(rng, arena, 6)
        st = state_at(p, field, 3.0, arena)
        for cmd in (lloyd(st), cortes(st), tvd_c(st), tvd_dk(st, 2)):
            assert np.all(np.isfinite(cmd.velocities))

    def test_make_controller_dispatch(self):
        assert make_controller("lloyd") is lloyd
        assert make_controller("cortes") is cortes
        assert make_controller("tvd_c") is tvd_c
        fn = make_controller("tvd_dk", hops=2)
        jac = CentroidJacobian(n=1, blocks={(0, 0): 0.5 * np.eye(2)})
        st = synthetic_state([[1.0, 0.0]], [[0.0, 0.0]], jacobian=jac)
        assert np.allclose(fn(st).velocities, tvd_dk(st, 2).velocities)
        with pytest.raises(ValueError):
            make_controller("pid")
