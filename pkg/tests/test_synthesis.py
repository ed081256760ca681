import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tma import (
    BeamPlan,
    RectPulseParams,
    SSBParams,
    SWCParams,
    build_uniform_geometry,
    dc_extract,
    delays_from_phases,
    gaussian_taper,
    grid_from_rect,
    grid_from_ssb,
    grid_from_swc,
    numeric_coeff,
    phases_from_delays,
    rect_waveform,
    steering_phases,
    validate_grid,
    wrap_phase,
)
from tma.synthesis import rect_delays_for_steering, ssb_params_from_plan


def brute_peak(taper, phases_col, positions, step=0.01):
    """Dense-grid argmax of |sum xi exp(-j Phi) exp(j 2 pi z cos theta)|."""
    theta = np.arange(0, 180 + step / 2, step)
    af = np.exp(2j * np.pi * np.outer(np.cos(np.deg2rad(theta)), positions)) @ (taper * np.exp(-1j * phases_col))
    return theta[np.argmax(np.abs(af))]


def test_grid_from_rect_columns():
    grid = grid_from_rect(RectPulseParams([0.5, 0.5], [0.0, 0.0]), 2)
    np.testing.assert_array_equal(grid.column(0), [0.5, 0.5])
    assert np.max(np.abs(grid.column(2))) < 1e-16
    assert grid.provenance == "rect"


def test_grid_from_rect_phase_progression():
    params = RectPulseParams([0.5] * 4, np.arange(4) / 4)
    phases = np.angle(grid_from_rect(params, 3).column(1))
    expected = wrap_phase(-np.pi / 2 - 2 * np.pi * np.arange(4) / 4)
    np.testing.assert_allclose(np.exp(1j * phases), np.exp(1j * expected), atol=1e-12)
    # the closed form is what the numeric oracle sees
    for n in range(4):
        oracle = numeric_coeff(lambda t: rect_waveform(params, n, t), 1)
        assert abs(grid_from_rect(params, 3).column(1)[n] - oracle) < 1e-5


def test_grid_from_swc_reference_weights():
    grid = grid_from_swc(SWCParams(np.ones(3), [0.1, 0.2, 0.2]), 5)
    mags = np.abs(grid.columns(np.arange(-2, 3)))
    np.testing.assert_allclose(mags, 0.1)
    assert np.all(grid.columns([-5, -4, -3, 3, 4, 5]) == 0)
    assert validate_grid(grid).ok


def test_grid_from_swc_independent_phases():
    grid = grid_from_swc(SWCParams([1.0], [0.1, 0.2, 0.2], [[0.4, -1.9]]), 3)
    assert np.angle(grid.column(1)[0]) == pytest.approx(-0.4)
    assert np.angle(grid.column(2)[0]) == pytest.approx(1.9)


def test_grid_from_swc_order_exceeds_band():
    with pytest.raises(ValueError):
        grid_from_swc(SWCParams([1.0], [0.1, 0.2, 0.2]), 1)


def test_grid_from_ssb_uniform():
    grid = grid_from_ssb(SSBParams(np.ones(4), np.zeros((4, 3))), 5)
    np.testing.assert_array_equal(grid.columns([1, 2, 3]), np.ones((4, 3)))
    assert np.all(grid.column(0) == 0)
    assert grid.provenance == "ssb"


def test_grid_from_ssb_direct_formula():
    grid = grid_from_ssb(SSBParams([0.2, 0.9], [[np.pi], [np.pi]]), 2)
    np.testing.assert_allclose(grid.column(1), [-0.2, -0.9], atol=1e-15)


@given(
    st.integers(1, 6),
    st.integers(1, 4),
    st.integers(0, 2**31),
)
def test_grid_from_ssb_amplitudes_are_taper(n, L, seed):
    rng = np.random.default_rng(seed)
    taper = rng.uniform(0.01, 1.0, n)
    params = SSBParams(taper, rng.uniform(-np.pi, np.pi, (n, L)))
    grid = grid_from_ssb(params, L + 2)
    assert np.all(grid.values[:, : grid.band_limit + 1] == 0)
    np.testing.assert_allclose(np.abs(grid.columns(np.arange(1, L + 1))), np.tile(taper[:, None], L))


def test_steering_broadside_is_zero_phase(ula20):
    phases = steering_phases(ula20, BeamPlan([(1, 90.0)]))
    np.testing.assert_allclose(phases, 0, atol=1e-12)


def test_steering_sixty_degrees(ula20):
    phases = steering_phases(ula20, BeamPlan([(1, 60.0)]))
    np.testing.assert_allclose(np.exp(1j * phases[:, 0]), np.exp(1j * np.pi * np.arange(20) / 2), atol=1e-12)
    assert brute_peak(np.ones(20), phases[:, 0], ula20.positions) == pytest.approx(60.0, abs=0.01)


def test_steering_three_independent_beams(ula20, gauss20):
    plan = BeamPlan([(1, 50.0), (2, 90.0), (3, 120.0)])
    phases = steering_phases(ula20, plan)
    assert phases.shape == (20, 3)
    for col, target in enumerate((50.0, 90.0, 120.0)):
        assert brute_peak(gauss20, phases[:, col], ula20.positions) == pytest.approx(target, abs=0.01)


def test_steering_unplanned_harmonic_zero(ula20):
    phases = steering_phases(ula20, BeamPlan([(3, 70.0)]))
    assert np.all(phases[:, :2] == 0)


def test_beam_plan_rejects_duplicates_and_endfire():
    with pytest.raises(ValueError):
        BeamPlan([(1, 50.0), (1, 60.0)])
    with pytest.raises(ValueError):
        BeamPlan([(1, 0.0)])


@pytest.mark.parametrize("phase, q, delay", [(np.pi, 1, 0.5), (np.pi, 2, 0.25), (-np.pi / 2, 1, 0.75)])
def test_delays_from_phases_examples(phase, q, delay):
    assert delays_from_phases([[phase]], [q])[0, 0] == pytest.approx(delay)


def test_delays_round_trip(rng):
    phases = rng.uniform(-np.pi, np.pi, (20, 5))
    delays = delays_from_phases(phases)
    q = np.arange(1, 6)
    assert np.all(delays >= 0) and np.all(delays < 1 / q)
    back = phases_from_delays(delays)
    np.testing.assert_allclose(np.exp(1j * back), np.exp(1j * phases), atol=1e-12)


def test_delays_reject_phase_on_fundamental():
    with pytest.raises(ValueError):
        delays_from_phases([[0.3, 0.1]], [0, 1])
    np.testing.assert_array_equal(delays_from_phases([[0.0, np.pi]], [0, 1]), [[0.0, 0.5]])


def test_gaussian_taper_examples():
    np.testing.assert_array_equal(gaussian_taper(1, 2 / 3), [1.0])
    np.testing.assert_allclose(gaussian_taper(3, 2 / 3), [np.exp(-9 / 8), 1.0, np.exp(-9 / 8)])
    t20 = gaussian_taper(20, 2 / 3)
    np.testing.assert_allclose(t20, t20[::-1])
    assert t20.min() == pytest.approx(0.32465246736)
    assert t20[0] == t20.min()
    assert t20.max() <= 1.0


def test_gaussian_taper_rejects_bad_sigma():
    with pytest.raises(ValueError):
        gaussian_taper(5, 0.0)


def test_dc_extract():
    assert dc_extract(RectPulseParams([0.73], [0.0]), 0) == 0.73
    assert dc_extract(RectPulseParams([0.0], [0.5]), 0) == 0.0
    assert dc_extract(RectPulseParams([0.4], [0.1]), 0) == dc_extract(RectPulseParams([0.4], [0.9]), 0)


def test_ssb_plan_only_modulates_planned_harmonics(ula20):
    params = ssb_params_from_plan(ula20, BeamPlan([(2, 70.0)]))
    assert params.harmonics == (2,)
    grid = grid_from_ssb(params, 4)
    assert np.all(grid.column(1) == 0)
    np.testing.assert_allclose(np.abs(grid.column(2)), 1.0)


def test_rect_steering_delays_point_q1(ula20):
    duty = 0.15 * gaussian_taper(20)
    params = RectPulseParams(duty, rect_delays_for_steering(ula20, duty, 70.0))
    col = grid_from_rect(params, 2).column(1)
    peak = brute_peak(np.abs(col), -np.angle(col), ula20.positions)
    assert peak == pytest.approx(70.0, abs=0.01)
