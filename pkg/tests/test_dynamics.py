import numpy as np
import pytest
from numpy.testing import assert_allclose

from dynamics import (EvolutionSpec, Potential, TrajectoryRecord,
                      boost_check, commuting_diagram, continuity_residual,
                      ehrenfest_check, exact_free_propagator, gausson,
                      observed_order, rhs, run, run_many, shift,
                      stability_dt)
from errors import ConfigError, GridMismatchError
from gauge_algebra import GaugeElement, embed_linear, preset
from timefn import TimeFn
from wavefield import GridSpec, WaveFunction, gaussian


def test_stability_bound(grid):
    c = preset('linear')
    assert stability_dt(c, grid) == pytest.approx(0.4 * grid.dx**2)
    dg = preset('DG', D=0.05, c2=0.3)
    assert stability_dt(dg, grid) < stability_dt(c, grid)


def test_spec_lands_on_final_time(grid):
    spec = EvolutionSpec(preset('linear'), grid, 0.0, 1.0)
    assert spec.dt <= spec.dt_max
    assert spec.n_steps * spec.dt == pytest.approx(1.0)
    with pytest.raises(ValueError, match='stability bound'):
        EvolutionSpec(preset('linear'), grid, 0.0, 1.0, dt=1.0)
    with pytest.raises(ValueError, match='before'):
        EvolutionSpec(preset('linear'), grid, 1.0, 0.0)


def test_rhs_forms_agree(moving_packet):
    c = preset('DG', D=0.05, c1=0.1, c2=0.3, c4=-0.2)
    lap = rhs(moving_packet, 0.0, c, eps_rel=1e-30)
    fun = rhs(moving_packet, 0.0, c, eps_rel=1e-30, form='functional')
    assert np.abs(lap - fun).max() <= 1e-8 * np.abs(lap).max()


def test_potential():
    g = GridSpec(64, 10.0)
    v = Potential('harmonic', 2.0)
    assert_allclose(v.values(g), 2.0 * g.x**2)
    assert_allclose(v.gradient(g), 4.0 * g.x)
    assert not Potential('array', values=np.zeros(64)).values(g).any()
    with pytest.raises(GridMismatchError):
        Potential('array', values=np.zeros(10)).values(g)
    with pytest.raises(ConfigError) as e:
        Potential('square')
    assert e.value.path == 'potential.kind'


# ----------------------------------------------------------------------
# integrator validation
# ----------------------------------------------------------------------
def test_free_gaussian_spreads(packet):
    rec = run(EvolutionSpec(preset('linear'), packet.grid, 0.0, 1.0,
                            stride=50), packet)
    assert rec.status == 'ok'
    assert rec.final.time_tag == pytest.approx(1.0)
    assert rec.final.variance_x == pytest.approx(1.25, rel=1e-6)
    exact = exact_free_propagator(packet, -0.5, 1.0)
    assert np.abs(rec.final.values - exact.values).max() <= 1e-5


def test_harmonic_oscillator(grid):
    psi0 = gaussian(grid, 1.0, 2**-0.5)
    spec = EvolutionSpec(preset('linear'), grid, 0.0, 1.0,
                         potential=Potential('harmonic', 1.0))
    rec = run(spec, psi0)
    assert_allclose(rec.mean_x, np.cos(rec.t), atol=1e-5)
    report = ehrenfest_check(rec, preset('linear'))
    assert report['family'] == 'F0'
    assert report['relation2'] == 'ok'
    assert report['relation2_resid'] <= 1e-6


def test_integrator_is_fourth_order():
    grid = GridSpec(128, 20.0)
    psi0 = gaussian(grid, -3.0, 1.0, 3.0)
    exact = exact_free_propagator(psi0, -0.5, 1.0)
    c = preset('linear')
    errors = []
    for n in (256, 512, 1024):
        spec = EvolutionSpec(c, grid, 0.0, 1.0, dt=1.0 / n, stride=n)
        errors.append(np.abs(run(spec, psi0).final.values
                             - exact.values).max())
    order = observed_order(errors)
    assert np.all(order >= 3.5)
    assert order[-1] >= 3.8


def test_norm_is_conserved_by_dg(packet):
    c = preset('DG', D=0.05, c2=0.3)
    rec = run(EvolutionSpec(c, packet.grid, 0.0, 1.0, stride=50), packet)
    assert rec.status == 'ok'
    assert abs(rec.final.norm - 1.0) <= 1e-8


def test_gausson_is_stationary(grid):
    c = preset('BM', b=0.3)
    psi0 = gausson(grid, 0.3)
    assert psi0.variance_x == pytest.approx(1 / 1.2, rel=1e-10)
    rec = run(EvolutionSpec(c, grid, 0.0, 2.0, stride=100), psi0)
    assert rec.final.variance_x == pytest.approx(psi0.variance_x, rel=1e-2)


def test_divergence_is_reported(packet):
    spec = EvolutionSpec(preset('linear'), packet.grid, 0.0, 1.0)
    spec.dt *= 10
    rec = run(spec, packet)
    assert rec.status == 'diverged'
    assert any('norm drift' in w for w in rec.meta['warnings'])


# ----------------------------------------------------------------------
# continuity and Ehrenfest relations
# ----------------------------------------------------------------------
def test_continuity_residual_converges(packet):
    c = preset('DG', D=0.05, c2=0.3)
    spec = EvolutionSpec(c, packet.grid, 0.0, 0.1, snapshots=True)
    snaps = run(spec, packet).snapshots
    mid = len(snaps) // 2
    errors = []
    for j in (4, 2, 1):
        _, resid = continuity_residual(
            [snaps[mid - j], snaps[mid], snaps[mid + j]], c)
        errors.append(resid[0])
    assert np.all(observed_order(errors) >= 1.9)


def test_continuity_residual_needs_three_snapshots(packet):
    with pytest.raises(ValueError, match='at least 3'):
        continuity_residual([packet, packet], preset('linear'))


@pytest.mark.parametrize('name, params', [
    ('linear', {}),
    ('BM', {'b': 0.3}),
    ('DG', {'D': 0.05}),
])
def test_first_ehrenfest_relation(moving_packet, name, params):
    c = preset(name, **params)
    rec = run(EvolutionSpec(c, moving_packet.grid, 0.0, 0.5), moving_packet)
    report = ehrenfest_check(rec, c)
    assert report['relation1_resid'] <= 1e-6


def test_dg_is_outside_second_relation(moving_packet):
    c = preset('DG', D=0.05)
    rec = run(EvolutionSpec(c, moving_packet.grid, 0.0, 0.1), moving_packet)
    report = ehrenfest_check(rec, c)
    assert report['relation2'] == 'not-applicable'
    assert report['relation2_resid'] is None


def test_kostin_friction_damps_velocity():
    grid = GridSpec(256, 40.0)
    psi0 = gaussian(grid, 0.0, 2.5, 2 * np.pi * 6 / 40.0)
    c = preset('Kostin', f=0.1)
    spec = EvolutionSpec(c, grid, 0.0, 5.0, stride=5, eps_phase=1e-12)
    rec = run(spec, psi0)
    assert rec.status == 'ok'
    report = ehrenfest_check(rec, c)
    assert report['family'] == 'F1'
    assert report['iota7'] == pytest.approx(0.1)
    assert abs(report['fitted_rate']) == pytest.approx(0.1, rel=0.02)
    assert report['friction_sign'] == 'decay'
    assert report['relation2_resid'] <= 1e-3


# ----------------------------------------------------------------------
# gauge and Galilei covariance
# ----------------------------------------------------------------------
def test_commuting_diagram(packet):
    g = GaugeElement(0.5, 1.0)
    report = commuting_diagram(-0.5, 1.0, g, packet, 1.0)
    assert report['status'] == 'ok'
    assert report['max_density_mismatch'] <= 1e-6
    assert report['passed']


def test_commuting_diagram_time_dependent_gamma(packet):
    g = GaugeElement(TimeFn.linear(0.2), 1.0)
    report = commuting_diagram(-0.5, 1.0, g, packet, 1.0)
    assert report['status'] == 'ok'
    assert report['max_density_mismatch'] <= 1e-6


def test_commuting_diagram_phase_branch(packet):
    report = commuting_diagram(-0.5, 1.0, GaugeElement(0.0, 0.5), packet,
                               0.1)
    assert report['status'] == 'phase-branch-error'
    assert not report['passed']


def test_boost(packet):
    spec = EvolutionSpec(preset('linear'), packet.grid, 0.0, 1.0)
    report = boost_check(spec, packet, 1.0)
    assert report['status'] == 'ok'
    assert report['velocity'] == pytest.approx(2 * np.pi * 3 / 20.0)
    assert report['max_density_mismatch'] <= 1e-6


def test_boost_not_applicable(packet):
    spec = EvolutionSpec(preset('Kostin', f=0.1), packet.grid, 0.0, 0.1)
    assert boost_check(spec, packet, 1.0)['status'] == 'not-applicable'
    spec = EvolutionSpec(preset('linear'), packet.grid, 0.0, 0.1,
                         potential=Potential('harmonic'))
    assert boost_check(spec, packet, 1.0)['status'] == 'not-applicable'


def test_shift(packet):
    moved = shift(packet, 2.0)
    assert moved.mean_x == pytest.approx(2.0, abs=1e-12)
    assert shift(packet, 0.0) is packet


# ----------------------------------------------------------------------
# records
# ----------------------------------------------------------------------
def test_trajectory_csv_round_trip(tmp_path, moving_packet):
    rec = run(EvolutionSpec(preset('linear'), moving_packet.grid, 0.0, 0.1,
                            stride=4), moving_packet)
    fn = rec.to_csv(str(tmp_path / 'trajectory.csv'))
    back = TrajectoryRecord.from_csv(fn)
    assert back.to_frame().equals(rec.to_frame())


def test_reloaded_trajectory_keeps_force(tmp_path, moving_packet):
    c = preset('linear')
    spec = EvolutionSpec(c, moving_packet.grid, 0.0, 0.2, stride=2,
                         potential=Potential('harmonic', 1.0))
    rec = run(spec, moving_packet)
    back = TrajectoryRecord.from_csv(rec.to_csv(str(tmp_path / 'traj.csv')))
    assert all(dtype == np.float64 for dtype in back.to_frame().dtypes)
    assert np.array_equal(back.mean_force, rec.mean_force)
    assert np.abs(back.mean_force).max() > 0
    original, reloaded = ehrenfest_check(rec, c), ehrenfest_check(back, c)
    assert reloaded['relation2'] == 'ok'
    assert reloaded['relation2_resid'] == original['relation2_resid']


def test_trajectory_merge(moving_packet):
    c = preset('linear')
    grid = moving_packet.grid
    first = run(EvolutionSpec(c, grid, 0.0, 0.05), moving_packet)
    second = run(EvolutionSpec(c, grid, first.t[-1], 0.1), first.final)
    whole = first.merge(second)
    assert len(whole) == len(first) + len(second) - 1
    assert np.all(np.diff(whole.t) > 0)
    with pytest.raises(ValueError, match='overlap'):
        second.merge(first)


def test_run_many_matches_sequential(moving_packet):
    c = embed_linear(-0.5, 1.0)
    grid = moving_packet.grid
    jobs = [(EvolutionSpec(c, grid, 0.0, 0.05), moving_packet),
            (EvolutionSpec(c, grid, 0.0, 0.05), moving_packet.normalized())]
    pooled = run_many(jobs, workers=2)
    sequential = run_many(jobs)
    for a, b in zip(pooled, sequential):
        assert np.array_equal(a.final.values, b.final.values)


def test_grid_mismatch(moving_packet):
    spec = EvolutionSpec(preset('linear'), GridSpec(128, 20.0), 0.0, 0.1)
    with pytest.raises(GridMismatchError):
        run(spec, moving_packet)


def test_zero_length_run(moving_packet):
    rec = run(EvolutionSpec(preset('linear'), moving_packet.grid, 0.0, 0.0),
              moving_packet)
    assert len(rec) == 1
    assert isinstance(rec.final, WaveFunction)
    assert np.array_equal(rec.final.values, moving_packet.values)
