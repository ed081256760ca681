import numpy as np
import pytest

from tma import (
    RectPulseParams,
    Scene,
    SSBParams,
    Stream,
    build_uniform_geometry,
    demux,
    link_metrics,
    read_series,
    spectral_lines,
    synthesize_received,
    write_series,
)
from tma.estimators import SSBBeamformer
from tma.metrics import array_factor
from tma.synthesis import excitation_grid
from tma.timesim import bandlimited_baseband, write_series as _write

ONE = build_uniform_geometry(1)


def single_tone_scene(modulation=None, **kw):
    modulation = modulation or SSBParams([1.0], [[0.0]])
    return Scene(ONE, modulation, (Stream(90.0, 1, 1.0),), **kw)


def test_single_tone_is_complex_exponential():
    scene = single_tone_scene()
    np.testing.assert_allclose(synthesize_received(scene), np.exp(2j * np.pi * scene.time), atol=1e-12)


def test_no_streams_no_signal():
    scene = Scene(ONE, SSBParams([1.0], [[0.0]]), ())
    assert np.all(synthesize_received(scene) == 0)


def test_superposition(ula20, gauss20, rng):
    bf = SSBBeamformer(beams=((1, 60.0), (2, 100.0))).fit(ula20.positions)
    a = Stream(60.0, 1, 0.7 - 0.2j)
    b = Stream(100.0, 2, bandlimited_baseband(64 * 16, 64, 0.4, rng), 0.4)
    both = synthesize_received(Scene(ula20, bf.params_, (a, b), duration=16))
    sep = synthesize_received(Scene(ula20, bf.params_, (a,), duration=16)) + synthesize_received(
        Scene(ula20, bf.params_, (b,), duration=16)
    )
    np.testing.assert_allclose(both, sep, atol=1e-12)


def test_single_tone_lines():
    scene = single_tone_scene()
    lines = spectral_lines(synthesize_received(scene), scene.fs)
    assert abs(lines.at(1)) == pytest.approx(1.0, abs=1e-9)
    assert lines.level_dbc(-1, 1) < -120


def test_rect_lines_are_double_sideband():
    scene = single_tone_scene(RectPulseParams([0.5], [0.0]))
    lines = spectral_lines(synthesize_received(scene), scene.fs)
    assert abs(lines.at(1)) == pytest.approx(abs(lines.at(-1)), rel=1e-12)
    assert abs(lines.at(1)) > 0.3


def test_dc_input_single_line():
    scene = Scene(ONE, RectPulseParams([1.0], [0.0]), (Stream(90.0, 0, 1.0),))
    lines = spectral_lines(synthesize_received(scene), scene.fs)
    assert abs(lines.at(0)) == pytest.approx(1.0)
    others = np.abs(lines.amplitudes[lines.orders != 0])
    assert np.max(others) < 1e-12


def test_spectral_lines_needs_whole_periods():
    with pytest.raises(ValueError):
        spectral_lines(np.ones(100), 64)


def test_cw_output_is_periodic(ula20, gauss20):
    bf = SSBBeamformer(beams=((1, 70.0), (3, 110.0))).fit(ula20.positions)
    scene = Scene(ula20, bf.params_, (Stream(80.0, 1, 1.0),), duration=4)
    y = synthesize_received(scene)
    np.testing.assert_allclose(y[: -scene.fs], y[scene.fs :], atol=1e-12)


def test_time_shift_rotates_lines(ula20):
    bf = SSBBeamformer(beams=((1, 70.0), (2, 95.0), (3, 110.0))).fit(ula20.positions)
    stream = (Stream(80.0, 1, 1.0),)
    delta = 0.137
    base = spectral_lines(synthesize_received(Scene(ula20, bf.params_, stream, duration=8)), 64)
    moved = spectral_lines(synthesize_received(Scene(ula20, bf.params_, stream, duration=8, t0=delta)), 64)
    for q in (1, 2, 3):
        assert moved.at(q) == pytest.approx(base.at(q) * np.exp(2j * np.pi * q * delta), abs=1e-12)


def test_line_amplitude_matches_array_factor(ula20, gauss20):
    bf = SSBBeamformer(beams=((1, 50.0), (2, 90.0), (3, 120.0))).fit(ula20.positions)
    scene = Scene(ula20, bf.params_, (Stream(63.0, 1, 1.0),), duration=8)
    lines = spectral_lines(synthesize_received(scene), scene.fs)
    for q in (1, 2, 3):
        af = array_factor(bf.grid_, ula20, q, 63.0)
        assert lines.at(q) == pytest.approx(af, rel=1e-9)


def test_demux_recovers_bandlimited_stream(ula20, gauss20, rng):
    bf = SSBBeamformer(beams=((1, 90.0),)).fit(ula20.positions)
    u = bandlimited_baseband(64 * 128, 64, 0.5, rng)
    scene = Scene(ula20, bf.params_, (Stream(90.0, 1, u, 0.5),))
    report = link_metrics(scene)
    assert report.normalized_error[0] < 1e-3


def test_demux_isolates_steered_beam(ula20):
    bf = SSBBeamformer(beams=((1, 50.0), (2, 90.0), (3, 120.0))).fit(ula20.positions)
    scene = Scene(ula20, bf.params_, (Stream(90.0, 2, 1.0),))
    rec = demux(synthesize_received(scene), scene.fs, 3, 0.0)
    p = {q: np.mean(np.abs(rec[q]) ** 2) for q in rec}
    assert 10 * np.log10(p[1] / p[2]) < -30
    assert 10 * np.log10(p[3] / p[2]) < -30


def test_demux_empty_scene():
    scene = Scene(ONE, SSBParams([1.0], [[0.0, 0.0]]), ())
    rec = demux(synthesize_received(scene), scene.fs, 2, 0.3)
    assert all(np.all(r == 0) for r in rec.values())


def test_demux_rejects_overlapping_bands():
    with pytest.raises(ValueError):
        demux(np.zeros(64), 64, 1, 1.0)


def test_link_metrics_image_rejection():
    ssb = link_metrics(single_tone_scene())
    assert ssb.image_rejection_db[1] >= 120
    rect = link_metrics(single_tone_scene(RectPulseParams([0.5], [0.0])))
    assert abs(rect.image_rejection_db[1]) < 1e-9


def test_link_metrics_null_placed_streams():
    geom = build_uniform_geometry(8, 0.5)
    theta2 = np.degrees(np.arccos(0.25))
    bf = SSBBeamformer(beams=((1, 90.0), (2, theta2)), taper="uniform").fit(geom.positions)
    scene = Scene(geom, bf.params_, (Stream(90.0, 1, 1.0), Stream(theta2, 2, 1j)))
    report = link_metrics(scene)
    assert report.crosstalk_db[0, 0] == report.crosstalk_db[1, 1] == 0.0
    assert report.crosstalk_db[0, 1] <= -40
    assert report.crosstalk_db[1, 0] <= -40
    assert max(report.normalized_error) < 1e-9


@pytest.mark.parametrize(
    "kwargs",
    [dict(fs=8), dict(duration=0)],
)
def test_scene_validation(kwargs):
    with pytest.raises(ValueError):
        single_tone_scene(**kwargs)


def test_scene_rejects_wide_or_misaligned_streams():
    with pytest.raises(ValueError):
        Scene(ONE, SSBParams([1.0], [[0.0]]), (Stream(90.0, 1, np.ones(10), 0.2),))
    with pytest.raises(ValueError):
        Scene(ONE, SSBParams([1.0], [[0.0]]), (Stream(90.0, 1, 1.0, 1.0),))


def test_series_round_trip(tmp_path, rng):
    series = rng.normal(size=300) + 1j * rng.normal(size=300)
    path = tmp_path / "s.bin"
    write_series(path, series, 64)
    raw = path.read_bytes()
    assert raw[:4] == b"TMAS"
    assert len(raw) == 16 + 16 * 300
    back, fs = read_series(path)
    assert fs == 64
    np.testing.assert_array_equal(back, series)


def test_series_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOPE" + bytes(12))
    with pytest.raises(ValueError):
        read_series(path)
    _write(path, np.ones(4), 8)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError):
        read_series(path)


def test_grid_of_scene_modulation_matches_estimator(ula20):
    bf = SSBBeamformer(beams=((1, 50.0),)).fit(ula20.positions)
    np.testing.assert_array_equal(excitation_grid(bf.params_, 50).values, bf.grid_.values)
