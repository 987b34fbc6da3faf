import numpy as np
import pytest

from toalab.grid import Grid1D, GaussianSpec, make_gaussian
from toalab.protocols import (
    ProtocolError,
    MeasurementSchedule,
    free_evolve,
    project_plus,
    pi_plus_weight,
    probability_current,
    repeated_measurement_arrival,
    zeno_scan,
    current_series,
    presence_distribution,
    commutator_witness,
)


@pytest.fixture
def packet():
    grid = Grid1D(-60.0, 60.0, 2048)
    return make_gaussian(grid, GaussianSpec(x0=-20.0, sigma=2.0, k0=5.0))


def test_schedule_validation():
    with pytest.raises(ProtocolError):
        MeasurementSchedule(x_a=0.0, delta=-0.1, t_max=1.0)
    with pytest.raises(ProtocolError):
        MeasurementSchedule(x_a=0.0, delta=1e-7, t_max=1.0)  # over budget
    with pytest.raises(ProtocolError):
        MeasurementSchedule(x_a=0.0, delta=0.25, t_max=1.0, base_dt=0.1)
    sched = MeasurementSchedule(x_a=0.0, delta=0.2, t_max=1.0, base_dt=0.1)
    assert len(sched.times) == 5


def test_project_plus_algebra(packet):
    inside, outside = project_plus(packet, 0.0)
    assert np.array_equal(inside.values + outside.values, packet.values)
    assert abs(np.vdot(inside.values, outside.values)) == 0.0
    inside2, _ = project_plus(inside, 0.0)
    assert np.array_equal(inside2.values, inside.values)


def test_project_plus_left_localized(packet):
    inside, outside = project_plus(packet, 0.0)
    assert inside.norm_sq() < 1e-10
    assert outside.norm_sq() == pytest.approx(1.0, abs=1e-10)


def test_project_plus_symmetric_split():
    grid = Grid1D(-40.0, 40.0, 1024)
    psi = make_gaussian(grid, GaussianSpec(x0=0.0, sigma=3.0, k0=0.0))
    inside, _ = project_plus(psi, 0.0)
    assert inside.norm_sq() == pytest.approx(0.5, abs=2.0 * grid.dx)


def test_free_evolve_exactness(packet):
    # closed-form Gaussian spreading: <x>(t) = x0 + (k0/m) t
    out = free_evolve(packet, 2.0)
    dens = np.abs(out.values) ** 2
    mean_x = float(np.sum(packet.grid.x * dens) * packet.grid.dx)
    assert mean_x == pytest.approx(-20.0 + 5.0 * 2.0, abs=1e-8)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-12)


def test_sum_rule_and_classical_peak(packet):
    series = repeated_measurement_arrival(
        packet, MeasurementSchedule(x_a=0.0, delta=0.25, t_max=10.0))
    assert series.sum_rule_defect() < 1e-9
    assert all(p >= 0.0 for p in series.probabilities)
    # classical arrival m |x0| / k0 = 4
    assert series.peak_time() == pytest.approx(4.0, abs=0.5)


def test_initial_support_precondition():
    grid = Grid1D(-60.0, 60.0, 2048)
    psi = make_gaussian(grid, GaussianSpec(x0=5.0, sigma=2.0, k0=5.0))
    with pytest.raises(ProtocolError):
        repeated_measurement_arrival(
            psi, MeasurementSchedule(x_a=0.0, delta=0.5, t_max=5.0))


def test_single_late_look_detects_fast_packet(packet):
    # one projective look after the packet has crossed: detection ~ 1
    series = repeated_measurement_arrival(
        packet, MeasurementSchedule(x_a=0.0, delta=8.0, t_max=8.0))
    assert len(series.times) == 1
    assert series.total_detection() > 0.999


def test_zeno_scan_monotone_tail(packet):
    scan = zeno_scan(packet, 0.0, [2.0, 0.5, 0.1, 0.02, 0.005], 10.0)
    dets = [d for _, d in scan]
    assert dets[0] > 0.99
    # frequent looks reflect the particle
    assert all(a >= b for a, b in zip(dets[1:], dets[2:]))
    assert dets[-1] < dets[0] / 2.0
    with pytest.raises(ProtocolError):
        zeno_scan(packet, 0.0, [0.1, 0.5], 10.0)


def test_plane_wave_current():
    grid = Grid1D(-40.0, 40.0, 2048)
    k0 = grid.k[130]
    window = np.exp(-grid.x**2 / (2.0 * 10.0**2))
    vals = window * np.exp(1j * k0 * grid.x)
    vals /= np.sqrt(np.sum(np.abs(vals) ** 2) * grid.dx)
    from toalab.grid import WaveFunction
    psi = WaveFunction(grid, vals, "position")
    j = probability_current(psi)
    i0 = grid.index_of(0.0)
    dens_mid = np.abs(vals[i0]) ** 2
    assert j[i0] / dens_mid == pytest.approx(k0, rel=1e-6)


def test_symmetric_superposition_has_zero_current():
    grid = Grid1D(-40.0, 40.0, 2048)
    k0 = grid.k[130]
    # the window must decay to roundoff at the box edge, otherwise the
    # periodic wrap of the spectral derivative leaks into the current
    window = np.exp(-grid.x**2 / (2.0 * 6.0**2))
    vals = window * np.cos(k0 * grid.x)
    vals /= np.sqrt(np.sum(np.abs(vals) ** 2) * grid.dx)
    from toalab.grid import WaveFunction
    psi = WaveFunction(grid, vals, "position")
    j = probability_current(psi)
    assert np.max(np.abs(j)) < 1e-10


def test_continuity_equation():
    grid = Grid1D(-60.0, 60.0, 4096)
    psi = make_gaussian(grid, GaussianSpec(x0=-20.0, sigma=2.0, k0=5.0))
    h = 1e-3
    for t in (2.0, 4.0, 6.0):
        j = current_series(psi, 0.0, [t])[0]
        wp = pi_plus_weight(free_evolve(psi, t + h), 0.0)
        wm = pi_plus_weight(free_evolve(psi, t - h), 0.0)
        assert abs((wp - wm) / (2.0 * h) - j) < 1e-6


def test_presence_distribution_normalized(packet):
    times = np.linspace(0.0, 8.0, 161)
    dens = presence_distribution(packet, 0.0, times)
    assert np.all(dens >= 0.0)
    assert np.trapezoid(dens, times) == pytest.approx(1.0, abs=1e-9)
    assert times[np.argmax(dens)] == pytest.approx(4.0, abs=0.3)


def test_presence_window_precondition(packet):
    with pytest.raises(ProtocolError):
        presence_distribution(packet, 0.0, np.linspace(3.0, 5.0, 41))


def test_presence_differs_from_repeated_measurement(packet):
    # the normalized presence density is not the arrival distribution
    series = repeated_measurement_arrival(
        packet, MeasurementSchedule(x_a=0.0, delta=0.25, t_max=10.0))
    dens = presence_distribution(packet, 0.0, np.linspace(0.0, 10.0, 201))
    pres_on_looks = np.interp(series.times, np.linspace(0.0, 10.0, 201), dens)
    pres_prob = pres_on_looks * 0.25
    pres_prob /= np.sum(pres_prob)
    arr_prob = series.probabilities / series.total_detection()
    assert np.max(np.abs(pres_prob - arr_prob)) > 0.05 * np.max(arr_prob)


def test_projectors_at_different_times_do_not_commute(packet):
    assert commutator_witness(packet, 0.0, 2.0, 4.0) > 0.01
