import numpy as np
import pytest

from qetchain import (
    ChainParams,
    DisplacementPlan,
    MeasurementSpec,
    build_quadratics,
    optimal_plan,
    optimized_energy,
    plan_energy,
    run_setting1,
    run_setting2,
)

A4 = 1.0 - 1e-7
T_P_FROZEN = 0.9618290801532325  # h0 + 1/2 at N=4, alpha=0.9, omega=1


class TestBuildQuadratics:
    def test_decoupled_chain_has_no_coupling(self):
        params = ChainParams(n_sites=8, alpha=0.0)
        quad = build_quadratics(params, MeasurementSpec(measured_sites=(0, 1)), 4)
        np.testing.assert_allclose(quad.j_p, 0.0, atol=1e-15)
        np.testing.assert_allclose(quad.j_q, 0.0, atol=1e-15)

    def test_frozen_momentum_form(self):
        params = ChainParams(n_sites=4, alpha=0.9)
        quad = build_quadratics(params, MeasurementSpec(measured_sites=(0,)), 2)
        assert quad.t_p[0, 0] == pytest.approx(T_P_FROZEN, abs=1e-12)

    def test_target_inside_measured_group_rejected(self):
        params = ChainParams(n_sites=8, alpha=0.9)
        with pytest.raises(ValueError):
            build_quadratics(params, MeasurementSpec(measured_sites=(0, 1)), 1)

    def test_couplings_depend_on_periodic_distance_only(self):
        # Shifting the measured group and target together changes nothing.
        params = ChainParams(n_sites=10, alpha=0.95)
        a = build_quadratics(params, MeasurementSpec(measured_sites=(0, 1, 2)), 6)
        b = build_quadratics(params, MeasurementSpec(measured_sites=(3, 4, 5)), 9)
        np.testing.assert_allclose(a.j_p, b.j_p, atol=1e-12)
        np.testing.assert_allclose(a.j_q, b.j_q, atol=1e-12)
        np.testing.assert_allclose(a.t_p, b.t_p, atol=1e-12)

    def test_forms_positive_definite(self):
        params = ChainParams(n_sites=12, alpha=0.99, omega=0.5)
        quad = build_quadratics(params, MeasurementSpec(measured_sites=(0, 1, 2), omega=0.5), 6)
        assert np.linalg.eigvalsh(quad.t_p).min() > 0
        assert np.linalg.eigvalsh(quad.t_q).min() > 0


class TestOptimalPlan:
    def test_zero_couplings_give_zero_plan(self):
        params = ChainParams(n_sites=8, alpha=0.0)
        plan = optimal_plan(build_quadratics(params, MeasurementSpec(measured_sites=(0,)), 4))
        np.testing.assert_allclose(plan.theta, 0.0, atol=1e-15)
        np.testing.assert_allclose(plan.phi, 0.0, atol=1e-15)

    def test_stationarity(self):
        params = ChainParams(n_sites=100, alpha=A4)
        quad = build_quadratics(params, MeasurementSpec(measured_sites=(0,)), 5)
        plan = optimal_plan(quad)
        assert np.abs(quad.t_p @ plan.theta + quad.j_p).max() < 1e-9
        assert np.abs(quad.t_q @ plan.phi + quad.j_q).max() < 1e-9

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            DisplacementPlan(theta=[1.0, np.inf], phi=[0.0, 0.0])
        with pytest.raises(ValueError):
            DisplacementPlan(theta=[1.0], phi=[0.0, 0.0])


class TestOptimizedEnergy:
    def test_decoupled_chain_extracts_nothing(self):
        params = ChainParams(n_sites=8, alpha=0.0)
        assert optimized_energy(build_quadratics(params, MeasurementSpec(measured_sites=(0,)), 4)) == 0.0

    @pytest.mark.parametrize("seed", range(3))
    def test_never_positive(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(5):
            n = 2 * int(rng.integers(4, 30))
            alpha = float(rng.uniform(0.0, 1.0 - 1e-9))
            params = ChainParams(n_sites=n, alpha=alpha, omega=float(rng.uniform(0.3, 3.0)))
            spec = MeasurementSpec(measured_sites=(0, 1, 2), omega=params.omega)
            assert optimized_energy(build_quadratics(params, spec, n // 2)) <= 0.0

    def test_two_code_paths_agree_at_the_optimum(self):
        params = ChainParams(n_sites=100, alpha=A4)
        spec = MeasurementSpec(measured_sites=tuple(range(5)))
        quad = build_quadratics(params, spec, 52)
        plan = optimal_plan(quad)
        assert plan_energy(quad, plan) == pytest.approx(optimized_energy(quad), abs=1e-10)

    def test_any_other_plan_does_worse(self):
        params = ChainParams(n_sites=20, alpha=0.9)
        quad = build_quadratics(params, MeasurementSpec(measured_sites=(0, 1)), 10)
        plan = optimal_plan(quad)
        best = optimized_energy(quad)
        rng = np.random.default_rng(0)
        for _ in range(10):
            other = DisplacementPlan(
                theta=plan.theta + rng.normal(scale=0.1, size=plan.theta.size),
                phi=plan.phi + rng.normal(scale=0.1, size=plan.phi.size),
            )
            assert plan_energy(quad, other) > best

    def test_invariant_under_measured_site_relabeling(self):
        params = ChainParams(n_sites=12, alpha=0.95)
        a = MeasurementSpec(measured_sites=(0, 1, 2))
        b = MeasurementSpec(measured_sites=(2, 0, 1))
        assert optimized_energy(build_quadratics(params, a, 7)) == pytest.approx(
            optimized_energy(build_quadratics(params, b, 7)), abs=1e-14
        )


class TestRunSetting1:
    def test_geometry_validation(self):
        params = ChainParams(n_sites=10, alpha=0.9)
        with pytest.raises(ValueError):
            run_setting1(params, -1)
        with pytest.raises(ValueError):
            run_setting1(params, 9)  # target would wrap onto the measured site

    def test_separability_structure(self):
        params = ChainParams(n_sites=20, alpha=0.9)
        adjacent = run_setting1(params, 0)
        assert adjacent.e_n_before > 0
        assert adjacent.e_n_after < 1e-10
        for d in (1, 2, 4):
            rep = run_setting1(params, d)
            assert rep.e_n_before < 1e-10
            assert rep.e_n_after < 1e-10
            assert rep.optimized_energy < 0

    def test_entanglement_cost_grows_with_coupling(self):
        drops = [run_setting1(ChainParams(n_sites=20, alpha=a), 0).delta_log_negativity
                 for a in (0.90, 0.95, 0.99)]
        assert drops[0] < drops[1] < drops[2]

    def test_report_deltas(self):
        rep = run_setting1(ChainParams(n_sites=20, alpha=0.9), 1)
        assert rep.delta_log_negativity == rep.e_n_before - rep.e_n_after
        assert rep.delta_mutual_information == rep.s_m_before - rep.s_m_after
        assert rep.s_m_after < 1e-10  # measured/unmeasured pair decorrelates


class TestRunSetting2:
    def test_block_bounds(self):
        params = ChainParams(n_sites=12, alpha=0.9)
        with pytest.raises(ValueError):
            run_setting2(params, 0)
        with pytest.raises(ValueError):
            run_setting2(params, 5)  # N/2 - 2 = 4 is the maximum

    def test_measurement_only_consumes_entanglement(self):
        params = ChainParams(n_sites=16, alpha=0.95)
        for ell in range(1, 7):
            rep = run_setting2(params, ell)
            assert rep.delta_log_negativity >= -1e-10
            assert rep.optimized_energy < 0

    def test_energy_to_entanglement_ratio_monotone(self):
        params = ChainParams(n_sites=20, alpha=0.9)
        ratios = []
        for ell in range(1, 9):
            rep = run_setting2(params, ell)
            ratios.append(abs(rep.optimized_energy) / rep.delta_log_negativity)
        assert all(b >= a - 1e-12 for a, b in zip(ratios, ratios[1:]))
        assert max(ratios) == ratios[-1]
        assert all(r < 1 for r in ratios)
