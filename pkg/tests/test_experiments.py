import math

import numpy as np
import pytest

from nhe.entanglement import W_ENTROPY, StateClass
from nhe.experiments import (
    OptimumNotFound,
    Scenario,
    find_optimal_drive,
    find_optimal_time,
    golden_section_max,
    mutual_closeness,
    phase_sweep,
    run_scenario,
    signature_onset,
    system,
    timescale_comparison,
)
from nhe.hamiltonian import CouplingGraph, QubitParams, evolution_period
from nhe.presets import PRESETS, get_preset
from oracles import coarse_drive_scan

LN2 = math.log(2)


def near(result, t0, width=0.15):
    times = np.asarray(result.values)
    return [r for t, r in zip(times, result.reports) if abs(t - t0) <= width and r is not None]


class TestPresets:
    def test_all_figures_present(self):
        for name in ("fig1a", "fig1b", "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig3d",
                     "fig5a", "fig5b", "fig5c", "fig5d"):
            assert name in PRESETS

    def test_fig1a_parameters(self):
        s = get_preset("fig1a")
        assert all(q == QubitParams(0, 6, 1.576) for q in s.qubits)
        assert s.coupling == CouplingGraph.all_to_all(3, 1e-3)
        assert s.initial_state == "coherent" and s.time_grid()[-1] == pytest.approx(8)

    def test_hybrid_losses(self):
        assert [q.gamma for q in get_preset("fig3b").qubits] == [0, 6, 6]
        assert [q.gamma for q in get_preset("fig3c").qubits] == [0, 0, 6]
        assert [q.gamma for q in get_preset("fig3d").qubits] == [0, 0, 0]

    def test_fig1b_chain(self):
        J = get_preset("fig1b").coupling.J
        assert J[0, 2] == 0 and J[0, 1] == J[1, 2] == 1e-3

    def test_fig2a_log_axes(self):
        s = get_preset("fig2a")
        assert len(s.values) == len(s.values2) == 61
        assert s.values[0] == pytest.approx(1e-5) and s.values[-1] == pytest.approx(1e-1)

    def test_unknown(self):
        with pytest.raises(KeyError, match="available"):
            get_preset("fig9")


class TestScenario:
    def test_default_grid_two_periods(self):
        s = system(3, 6, 1.576, 1e-3)
        grid = s.time_grid()
        assert grid[-1] == pytest.approx(2 * evolution_period(QubitParams(0, 6, 1.576)), abs=0.01)
        assert np.allclose(np.diff(grid), 0.01)

    def test_default_grid_broken_phase(self):
        assert system(3, 6, 1.0, 1e-3).time_grid()[-1] == pytest.approx(20)

    def test_axis_validation(self):
        with pytest.raises(ValueError):
            Scenario("x", [QubitParams(0, 6, 1.5)] * 3, CouplingGraph.all_to_all(3, 1e-3), axis="foo")
        with pytest.raises(ValueError):
            Scenario("x", [QubitParams(0, 6, 1.5)] * 3, CouplingGraph.all_to_all(3, 1e-3), axis="omega",
                     analysis_time=1.0, values=(2.0, 1.0))

    def test_determinism(self):
        a, b = run_scenario(get_preset("fig1a")), run_scenario(get_preset("fig1a"))
        np.testing.assert_array_equal(a.trajectory.amplitudes, b.trajectory.amplitudes)
        assert a.reports == b.reports


class TestRunScenario:
    def test_fig1a_concurrence_dip(self):
        res = run_scenario(get_preset("fig1a"))
        assert len(res.reports) == 801
        assert any(max(r.concurrences.values()) < 0.05 for r in near(res, 3.23))
        assert np.all(np.diff(res.raw_norms) <= 1e-9)

    def test_fig1b_w(self):
        (r,) = near(run_scenario(get_preset("fig1b")), 3.23, 0.001)
        assert r.tau < 0.05
        assert all(abs(s - W_ENTROPY) <= 0.05 for s in r.entropies)

    def test_fig3b_biseparable(self):
        (r,) = near(run_scenario(get_preset("fig3b")), 3.23, 0.001)
        assert r.S(1) < 0.05
        assert r.S(2) == pytest.approx(LN2, abs=0.1) and r.S(3) == pytest.approx(LN2, abs=0.1)

    def test_sweep_records_failures(self):
        # symmetric phase: the norm decays as exp(-3 gamma t / 4)
        s = system(3, 60, 20.0, 1e-3, axis="delta", analysis_time=8.0, values=(0.0, 0.1))
        res = run_scenario(s, floor=1e-12)
        assert len(res.failures) == 2 and res.reports == [None, None]

    def test_fig2b_detuning(self):
        res = run_scenario(get_preset("fig2b"))
        base = res.reports[0]
        assert max(abs(a - b) for a, b in zip(res.reports[1].entropies, base.entropies)) < 0.05
        assert res.reports[-1].tau < 0.5

    def test_fig2a_uniform_diagonal_bright(self):
        res = run_scenario(get_preset("fig2a"))
        grid = {tuple(np.round(v, 12)): r for v, r in zip(res.values, res.reports)}
        values = get_preset("fig2a").values
        j = int(np.argmin(np.abs(np.log10(values) + 3)))
        assert grid[(round(values[j], 12), round(values[j], 12))].tau > 0.9
        assert grid[(round(values[-1], 12), round(values[0], 12))].tau < 0.5

    def test_fig2a_robust_region(self):
        # bright means tau > 0.5 over J12, J23 within +-50% of 1e-3
        import dataclasses

        axis = tuple(np.linspace(5e-4, 1.5e-3, 11))
        s = dataclasses.replace(get_preset("fig2a"), values=axis, values2=axis)
        taus = np.array([r.tau for r in run_scenario(s).reports])
        assert taus.min() > 0.5 and taus.max() > 0.9

    def test_fig2c_uniform_optimum(self):
        res = run_scenario(get_preset("fig2c"))
        spread = mutual_closeness(np.array([r.entropies for r in res.reports]))
        best = res.values[int(np.argmin(spread))]
        assert best == pytest.approx(1e-3, rel=0.2)


class TestOptimalTime:
    def test_fig1a(self):
        t, value = find_optimal_time(get_preset("fig1a"), (0, 6.5), "max_tau")
        assert t == pytest.approx(3.23, abs=0.05) and value > 0.9

    def test_half_period(self):
        s = get_preset("fig1a")
        t, _ = find_optimal_time(s, None, "max_tau")
        assert t == pytest.approx(0.5 * evolution_period(s.qubits[0]), rel=0.05)

    def test_two_qubit_subsystem(self):
        t, c = find_optimal_time(get_preset("fig1a_inset"), (3.0, 3.5), "max_concurrence")
        assert c > 0.95 and t == pytest.approx(3.23, abs=0.1)

    def test_empty_window(self):
        with pytest.raises(ValueError):
            find_optimal_time(get_preset("fig1a"), (3, 3))

    def test_golden_section(self):
        x, fx = golden_section_max(lambda x: -(x - 0.3) ** 2, 0, 1)
        assert x == pytest.approx(0.3, abs=1e-6) and fx == pytest.approx(0, abs=1e-12)

    def test_terminated_window(self):
        s = system(3, 60, 20.0, 1e-3)
        with pytest.raises(OptimumNotFound):
            find_optimal_time(s, (10, 20), "max_min_entropy", floor=1e-12)


class TestOptimalDrive:
    def test_j_1e_3(self):
        assert find_optimal_drive(6, "all_to_all", 1e-3).omega == pytest.approx(1.576, abs=0.01)

    def test_j_1e_4(self):
        assert find_optimal_drive(6, "all_to_all", 1e-4).omega == pytest.approx(1.529, abs=0.01)

    def test_small_j_approaches_ep(self):
        best = find_optimal_drive(6, "all_to_all", 1e-5)
        oracle = coarse_drive_scan(6, 1e-5, np.arange(1.502, 1.56, 0.002), np.arange(0, 20, 0.02))
        assert best.omega == pytest.approx(oracle[1], abs=0.01)
        assert 1.5 < best.omega < find_optimal_drive(6, "all_to_all", 1e-4, omega_step=2e-3).omega

    def test_validation(self):
        with pytest.raises(ValueError):
            find_optimal_drive(0.0)
        with pytest.raises(ValueError):
            find_optimal_drive(6, J=-1)
        with pytest.raises(ValueError):
            find_optimal_drive(6, t_window=(2, 1))


class TestPhaseSweep:
    def test_annotations(self):
        res = phase_sweep([1.0, 1.5, 2.0], 6, 0.1, 1.08)
        assert res.annotations == ["PT_BROKEN", "EXCEPTIONAL_POINT", "PT_SYMMETRIC"]
        assert res.metadata["phase_boundary_omega"] == [1.5] * 3
        assert len(res.baseline) == 3

    def test_broken_phase_negligible(self):
        res = phase_sweep(np.arange(0.1, 1.25, 0.1), 6, 0.1, 1.08)
        assert all(np.mean(r.entropies) < 0.05 for r in res.reports)

    def test_follows_hermitian_for_large_drive(self):
        # for Omega >= gamma the lossy curve oscillates rapidly about the Hermitian one
        res = phase_sweep(np.arange(6.0, 8.0001, 0.01), 6, 0.1, 13.0)
        nh = np.mean([np.mean(r.entropies) for r in res.reports])
        herm = np.mean([np.mean(b.entropies) for b in res.baseline])
        assert abs(nh - herm) < 0.1

    @pytest.mark.xfail(strict=True, reason="oscillation about the Hermitian curve reaches 0.16 near Omega=8")
    def test_follows_hermitian_pointwise(self):
        res = phase_sweep(np.arange(6.0, 8.01, 0.25), 6, 0.1, 13.0)
        for r, b in zip(res.reports, res.baseline):
            assert max(abs(x - y) for x, y in zip(r.entropies, b.entropies)) < 0.1

    def test_broken_phase_dark_at_late_time(self):
        res = phase_sweep(np.arange(0.1, 1.25, 0.1), 6, 0.1, 13.0)
        assert all(np.mean(r.entropies) < 0.05 for r in res.reports)

    def test_validation(self):
        with pytest.raises(ValueError):
            phase_sweep([], 6, 0.1, 1.0)


class TestTimescale:
    def test_speedup(self):
        cmp = timescale_comparison(0.1)
        assert cmp.t_non_hermitian == pytest.approx(1.08, abs=0.15)
        assert cmp.ratio <= 0.1

    def test_hermitian_limit_ratio_one(self):
        cmp = timescale_comparison(0.1, gamma=0.0, omega=2.04, hermitian_omega=2.04)
        assert cmp.ratio == pytest.approx(1.0)

    def test_hermitian_time_scales_inversely_with_j(self):
        t1 = signature_onset(system(3, 0, 0, 0.1), StateClass.GHZ_LIKE, (0, 60))
        t2 = signature_onset(system(3, 0, 0, 0.2), StateClass.GHZ_LIKE, (0, 60))
        assert t1 == pytest.approx(13, abs=1) and t2 == pytest.approx(t1 / 2, rel=0.05)

    def test_missing_hermitian_optimum(self):
        # undriven Hermitian GHZ onset at J=1e-3 lies near 1230 us, far outside its window
        with pytest.raises(OptimumNotFound, match="Hermitian"):
            timescale_comparison(1e-3, omega=1.576, locator="ghz_onset")
