import numpy as np
import pytest
from scipy.linalg import expm

from toalab.grid import Grid1D, GaussianSpec, make_gaussian, SpinorWave, expectation
from toalab.propagate import (
    PropagationError,
    WrapAroundError,
    Region,
    DeltaSpec,
    PotentialSpec,
    EvolutionParams,
    ClockSpec,
    TRIGGER_MATRIX,
    potential_matrix,
    _exp_hermitian_2x2,
    evolve_spinor,
    evolve_with_clock,
    clock_readout,
    cascade_profile,
    cascade_evolve,
    cascade_readout,
)
from toalab.scattering import gaussian_clock_detection


def test_spec_validation():
    with pytest.raises(PropagationError):
        Region(0.0, 1.0, np.array([[0.0, 1.0], [0.5, 0.0]]))  # not Hermitian
    with pytest.raises(PropagationError):
        DeltaSpec(0.0, -1.0, TRIGGER_MATRIX)
    with pytest.raises(PropagationError):
        EvolutionParams(dt=0.0, n_steps=10)
    with pytest.raises(PropagationError):
        ClockSpec(delta_t=0.1, quadrature="legendre")


def test_delta_area_is_exact():
    grid = Grid1D(-10.0, 10.0, 512)
    for strength, hint in [(7.3, None), (50.0, 0.4), (3.0, 1e-4)]:
        v = PotentialSpec(deltas=(DeltaSpec(0.0, strength, TRIGGER_MATRIX, hint),))
        vm = potential_matrix(v, grid)
        area = np.sum(vm[:, 0, 0]).real * grid.dx
        assert area == pytest.approx(strength / 2.0, rel=1e-12)


def test_exact_2x2_exponential_matches_expm():
    rng = np.random.default_rng(5)
    for _ in range(50):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = (a + a.conj().T) / 2.0
        dt = float(rng.uniform(0.01, 2.0))
        ours = _exp_hermitian_2x2(h[None, :, :], dt)[0]
        ref = expm(-1j * dt * h)
        assert np.max(np.abs(ours - ref)) < 1e-12


def test_stability_validation():
    grid = Grid1D(-10.0, 10.0, 1024)
    psi = SpinorWave.spin_up(make_gaussian(grid, GaussianSpec(0.0, 1.0, 2.0)))
    bad = EvolutionParams(dt=0.1, n_steps=10)  # dt * E_nyquist >> 0.5
    with pytest.raises(PropagationError):
        evolve_spinor(psi, PotentialSpec(), bad)
    ok = EvolutionParams(dt=0.1, n_steps=10, k_band=2.0)
    evolve_spinor(psi, PotentialSpec(), ok)


def test_free_spinor_norm_and_drift():
    grid = Grid1D(-40.0, 40.0, 1024)
    psi = SpinorWave.spin_up(make_gaussian(grid, GaussianSpec(-10.0, 2.0, 3.0)))
    params = EvolutionParams(dt=5e-4, n_steps=10000, k_band=6.0)
    out = evolve_spinor(psi, PotentialSpec(), params)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-10)
    assert expectation(out.up, "x") == pytest.approx(-10.0 + 3.0 * 5.0, abs=1e-6)


def test_strang_is_second_order():
    # halving dt must cut the error by about 4 against a fine reference
    grid = Grid1D(-30.0, 30.0, 512)
    psi0 = SpinorWave.spin_up(make_gaussian(grid, GaussianSpec(-8.0, 1.5, 3.0)))
    v = PotentialSpec(regions=(Region(-2.0, 2.0, 1.5 * TRIGGER_MATRIX),))

    def run(dt):
        params = EvolutionParams(dt=dt, n_steps=int(round(2.0 / dt)), k_band=6.0)
        return evolve_spinor(psi0, v, params).as_array()

    # dt values must divide the horizon exactly, otherwise the time
    # mismatch from step rounding masks the splitting error
    ref = run(2.5e-4)
    err1 = np.max(np.abs(run(8e-3) - ref))
    err2 = np.max(np.abs(run(4e-3) - ref))
    assert 3.5 < err1 / err2 < 4.5


def test_guard_band_aborts_wrapping_run():
    grid = Grid1D(-20.0, 20.0, 512)
    psi = SpinorWave.spin_up(make_gaussian(grid, GaussianSpec(0.0, 1.5, 4.0)))
    params = EvolutionParams(dt=1e-3, n_steps=8000, k_band=8.0, check_every=100)
    with pytest.raises(WrapAroundError):
        evolve_spinor(psi, PotentialSpec(), params)


def test_opaque_trigger_flips_half():
    # in the opaque limit reflected and transmitted branches carry
    # orthogonal trigger spins, so the flip weight is exactly 1/2
    grid = Grid1D(-40.0, 40.0, 2048)
    psi = SpinorWave.spin_up(make_gaussian(grid, GaussianSpec(-12.0, 1.5, 6.0)))
    params = EvolutionParams(dt=2e-4, n_steps=20000, k_band=12.0)
    out = evolve_spinor(psi, PotentialSpec.trigger(200.0), params)
    flip = np.sum(np.abs(out.as_array()[1]) ** 2) * grid.dx
    assert flip == pytest.approx(0.5, abs=5e-3)
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-9)


def test_clock_detection_matches_stationary_formula():
    # delta_t * E = 3 keeps the closed-channel threshold in the far tail
    # of the clock spectrum, where Hermite sectors converge fast
    grid = Grid1D(-30.0, 30.0, 1024)
    psi = make_gaussian(grid, GaussianSpec(-10.0, 2.0, 4.0))
    e_k = 8.0
    clock = ClockSpec(delta_t=3.0 / e_k, n_p=20, quadrature="hermite")
    params = EvolutionParams(dt=1e-3, n_steps=5500, k_band=8.0,
                             guard_tol=np.inf)
    joint = evolve_with_clock(psi, clock, PotentialSpec.trigger(50.0), params)
    ana = gaussian_clock_detection(1.0, e_k, 3.0 / e_k, alpha=50.0)
    assert joint.detection_probability() == pytest.approx(ana, rel=0.02)


def test_clock_readout_peaks_at_classical_arrival():
    grid = Grid1D(-30.0, 30.0, 1024)
    psi = make_gaussian(grid, GaussianSpec(-10.0, 2.0, 4.0))
    clock = ClockSpec(delta_t=1.0, n_p=32, p_max=6.0)
    params = EvolutionParams(dt=1e-3, n_steps=6000, k_band=8.0,
                             guard_tol=np.inf)
    joint = evolve_with_clock(psi, clock, PotentialSpec.trigger(50.0), params)
    series = clock_readout(joint)
    assert series.sum_rule_defect() < 1e-9
    # classical arrival at the trigger: m |x0| / k0 = 2.5
    assert series.mean_time() == pytest.approx(2.5, abs=0.5)


def test_clock_readout_rejects_premature_run():
    # stop the run while the packet is still on the trigger
    grid = Grid1D(-30.0, 30.0, 1024)
    psi = make_gaussian(grid, GaussianSpec(-10.0, 2.0, 4.0))
    clock = ClockSpec(delta_t=1.0, n_p=32, p_max=6.0)
    params = EvolutionParams(dt=1e-3, n_steps=2500, k_band=8.0,
                             guard_tol=np.inf)
    joint = evolve_with_clock(psi, clock, PotentialSpec.trigger(50.0), params)
    with pytest.raises(PropagationError):
        clock_readout(joint)


def test_cascade_profile_shape():
    x = np.array([-4.0, -1.0, 0.5, 1.0, 2.0, 8.0])
    prof = cascade_profile(x, 1.0)
    assert prof[-1] == -1.0
    assert prof[3] == -1.0
    assert prof[0] == pytest.approx(-1.0 / 16.0)
    assert prof[2] == pytest.approx(-1.0)  # clamped inside |x| < x_A


def test_cascade_pointer_runs_at_unit_rate_inside():
    # a packet that stays in the V = -1 region displaces the pointer by
    # exactly the elapsed time
    grid = Grid1D(-30.0, 30.0, 512)
    psi = make_gaussian(grid, GaussianSpec(5.0, 2.0, 1.0))
    clock = ClockSpec(delta_t=0.5, n_p=32, p_max=12.0)
    params = EvolutionParams(dt=2e-3, n_steps=1500, k_band=4.0,
                             guard_tol=np.inf)
    joint = cascade_evolve(psi, clock, -10.0, params)
    read = cascade_readout(joint)
    assert read.mean_displacement() == pytest.approx(3.0, abs=1e-3)
    assert read.arrival_times()[np.argmax(read.density)] == pytest.approx(0.0, abs=0.3)
