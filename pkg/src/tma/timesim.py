"""Sample-level simulation of the multi-stream TMA receiver.

Each element's signal is multiplied by its modulating waveform (a switch
pulse, an SWC pulse or the ``r_cos + j r_sin`` quadrature pair) and the
element outputs are summed onto a single front end. Everything runs in
complex baseband: the carrier factor is implicit and harmonic ``q`` shows up
at ``q`` cycles per modulation period.

Scaling follows the direct expansion of the combiner output,
``y(t) = u(t) * sum_q F_q(theta) exp(j 2 pi q t)`` (no extra factor of two).
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive_int
from .core import ArrayGeometry
from .metrics import array_factor
from .pulses import (
    RectPulseParams,
    SSBParams,
    SWCParams,
    rect_waveform,
    ssb_complex_waveform,
    swc_waveform,
)
from .synthesis import excitation_grid

IMAGE_REJECTION_CAP_DB = 300.0


@dataclass(frozen=True)
class Stream:
    """One incident plane wave.

    ``baseband`` is either a complex constant (CW) or one complex sample per
    simulation instant. ``harmonic`` names the beam meant to receive it.
    ``bandwidth`` is the two-sided width of ``u(t)`` in units of the
    modulation frequency.
    """

    theta_deg: float
    harmonic: int
    baseband: complex | np.ndarray = 1.0
    bandwidth: float = 0.0

    @property
    def is_cw(self):
        return np.ndim(self.baseband) == 0


@dataclass(frozen=True)
class Scene:
    geometry: ArrayGeometry
    modulation: RectPulseParams | SWCParams | SSBParams
    streams: tuple = ()
    duration: int = 128
    fs: int = 64
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "streams", tuple(self.streams))
        duration = check_positive_int(self.duration, "duration")
        fs = check_positive_int(self.fs, "fs")
        if self.modulation.n_elements != self.geometry.n_elements:
            raise ValueError("modulation and geometry disagree on the element count")
        if fs <= 4 * (self.order + 1):
            raise ValueError(f"fs={fs} samples per period leaves no headroom for harmonic {self.order}")
        for s in self.streams:
            if not 0.0 <= s.theta_deg <= 180.0:
                raise ValueError(f"stream angle {s.theta_deg} outside [0, 180]")
            if not 0.0 <= s.bandwidth < 1.0:
                raise ValueError(f"stream bandwidth {s.bandwidth} must be below the modulation frequency")
            if not s.is_cw and np.shape(s.baseband) != (duration * fs,):
                raise ValueError(f"baseband needs {duration * fs} samples, got {np.shape(s.baseband)}")

    @property
    def order(self):
        """Highest harmonic the receiver is meant to use."""
        if isinstance(self.modulation, RectPulseParams):
            return max([1] + [abs(s.harmonic) for s in self.streams])
        return self.modulation.order

    @property
    def n_samples(self):
        return self.duration * self.fs

    @property
    def time(self):
        return self.t0 + np.arange(self.n_samples) / self.fs

    @property
    def bandwidth(self):
        return max((s.bandwidth for s in self.streams), default=0.0)


def modulating_waveforms(modulation, t):
    """Per-element modulating signals, shape (N, len(t))."""
    if isinstance(modulation, SSBParams):
        fn = ssb_complex_waveform
    elif isinstance(modulation, SWCParams):
        fn = swc_waveform
    elif isinstance(modulation, RectPulseParams):
        fn = rect_waveform
    else:
        raise TypeError(f"unsupported modulation parameters: {type(modulation).__name__}")
    return np.array([fn(modulation, n, t) for n in range(modulation.n_elements)], dtype=complex)


def _stream_contribution(scene, stream, mod):
    steer = np.exp(2j * np.pi * scene.geometry.positions * np.cos(np.deg2rad(stream.theta_deg)))
    return np.asarray(stream.baseband) * (steer @ mod)


def synthesize_received(scene):
    """Combiner output for all streams, summed in stream order."""
    out = np.zeros(scene.n_samples, dtype=complex)
    if not scene.streams:
        return out
    mod = modulating_waveforms(scene.modulation, scene.time)
    for stream in scene.streams:
        out += _stream_contribution(scene, stream, mod)
    return out


@dataclass(frozen=True)
class SpectralLines:
    orders: np.ndarray
    amplitudes: np.ndarray

    def at(self, q):
        idx = np.flatnonzero(self.orders == q)
        if idx.size == 0:
            raise KeyError(q)
        return complex(self.amplitudes[idx[0]])

    def level_dbc(self, q, reference_q):
        """Power of line ``q`` relative to line ``reference_q`` in dB."""
        with np.errstate(divide="ignore"):
            return float(20 * np.log10(abs(self.at(q)) / abs(self.at(reference_q))))


def spectral_lines(series, fs, orders=None, t0=0.0):
    """Complex amplitudes of the components at integer multiples of the modulation frequency.

    The series must span a whole number of periods. ``t0`` is the time of the
    first sample; amplitudes are referred to t = 0.
    """
    series = np.asarray(series, dtype=complex)
    fs = check_positive_int(fs, "fs")
    if series.size == 0 or series.size % fs:
        raise ValueError("series length must be a whole number of modulation periods")
    periods = series.size // fs
    spectrum = np.fft.fft(series) / series.size
    if orders is None:
        orders = np.arange(-(fs // 2) + 1, fs // 2)
    orders = np.asarray(orders, dtype=int)
    amps = spectrum[np.mod(orders * periods, series.size)] * np.exp(-2j * np.pi * orders * t0)
    return SpectralLines(orders, amps)


def _guard(bandwidth):
    return (1.0 - bandwidth) / 4


def demux(series, fs, harmonics, bandwidth, t0=0.0):
    """Recover the baseband stream riding on each harmonic.

    Shift harmonic ``q`` to zero frequency and keep ``|f| <= B/2 + guard``
    with an ideal (FFT-masked, zero-delay) low-pass; the guard is a quarter of
    the spacing between adjacent bands. ``harmonics`` is an iterable of orders
    or an integer L meaning 1..L.
    """
    if not 0.0 <= bandwidth < 1.0:
        raise ValueError(f"bandwidth {bandwidth} would make adjacent harmonic bands overlap")
    series = np.asarray(series, dtype=complex)
    fs = check_positive_int(fs, "fs")
    if np.ndim(harmonics) == 0:
        harmonics = range(1, int(harmonics) + 1)
    t = t0 + np.arange(series.size) / fs
    freqs = np.fft.fftfreq(series.size, d=1.0 / fs)
    keep = np.abs(freqs) <= bandwidth / 2 + _guard(bandwidth)
    out = {}
    for q in harmonics:
        shifted = series * np.exp(-2j * np.pi * q * t)
        out[int(q)] = np.fft.ifft(np.where(keep, np.fft.fft(shifted), 0))
    return out


def band_power(series, fs, q):
    """Power within half a modulation frequency of harmonic ``q``."""
    series = np.asarray(series, dtype=complex)
    freqs = np.fft.fftfreq(series.size, d=1.0 / fs)
    spectrum = np.abs(np.fft.fft(series)) ** 2
    mask = (freqs >= q - 0.5) & (freqs < q + 0.5)
    return float(np.sum(spectrum[mask]) / series.size**2)


def _ratio_db(num, den, cap=IMAGE_REJECTION_CAP_DB):
    if num <= 0:
        return -cap
    if den <= num * 10 ** (-cap / 10):
        return cap
    return float(10 * np.log10(num / den))


@dataclass
class LinkReport:
    lines: SpectralLines | None
    image_rejection_db: dict
    crosstalk_db: np.ndarray
    stream_harmonics: tuple
    normalized_error: list = field(default_factory=list)

    def to_dict(self):
        lines = []
        if self.lines is not None:
            for q, a in zip(self.lines.orders, self.lines.amplitudes):
                lines.append({"q": int(q), "re": float(a.real), "im": float(a.imag), "magnitude": float(abs(a))})
        return {
            "stream_harmonics": list(self.stream_harmonics),
            "image_rejection_db": {str(q): v for q, v in sorted(self.image_rejection_db.items())},
            "crosstalk_db": [[float(v) for v in row] for row in self.crosstalk_db],
            "normalized_error": [float(v) for v in self.normalized_error],
            "spectral_lines": lines,
        }


def link_metrics(scene, recovered=None, series=None):
    """Quality of each recovered stream.

    ``crosstalk_db[i, j]`` is the power of stream ``j`` appearing in the output
    meant for stream ``i`` relative to stream ``i``'s own power there, found by
    simulating each stream alone. ``image_rejection_db[q]`` compares the
    received power around ``+q`` with that around ``-q`` (capped at 300 dB).
    ``normalized_error[i]`` is the RMS error of output ``i`` against
    ``F_q(theta_i) u_i(t)``, relative to the latter's RMS.
    """
    if series is None:
        series = synthesize_received(scene)
    harmonics = tuple(s.harmonic for s in scene.streams)
    bandwidth = scene.bandwidth
    if recovered is None:
        recovered = demux(series, scene.fs, sorted(set(harmonics)), bandwidth, scene.t0)

    image = {}
    for q in sorted({abs(q) for q in harmonics if q != 0}):
        image[q] = _ratio_db(band_power(series, scene.fs, q), band_power(series, scene.fs, -q))

    n = len(scene.streams)
    crosstalk = np.zeros((n, n))
    if n:
        mod = modulating_waveforms(scene.modulation, scene.time)
        leak = np.zeros((n, n))
        for j, stream in enumerate(scene.streams):
            alone = _stream_contribution(scene, stream, mod)
            rec = demux(alone, scene.fs, sorted(set(harmonics)), bandwidth, scene.t0)
            for i, q in enumerate(harmonics):
                leak[i, j] = np.mean(np.abs(rec[q]) ** 2)
        for i in range(n):
            for j in range(n):
                crosstalk[i, j] = 0.0 if i == j else _ratio_db(leak[i, j], leak[i, i])

    grid = excitation_grid(scene.modulation, max(scene.order, max((abs(q) for q in harmonics), default=1)))
    errors = []
    for stream in scene.streams:
        gain = array_factor(grid, scene.geometry, stream.harmonic, stream.theta_deg)
        expected = gain * np.broadcast_to(np.asarray(stream.baseband, dtype=complex), (scene.n_samples,))
        ref = np.sqrt(np.mean(np.abs(expected) ** 2))
        err = np.sqrt(np.mean(np.abs(recovered[stream.harmonic] - expected) ** 2))
        errors.append(float(err / ref) if ref > 0 else float("inf"))

    lines = None
    if series.size % scene.fs == 0:
        top = scene.order + 1
        lines = spectral_lines(series, scene.fs, np.arange(-top, top + 1), scene.t0)
    return LinkReport(lines, image, crosstalk, harmonics, errors)


def bandlimited_baseband(n_samples, fs, bandwidth, rng=None, rms=1.0):
    """Random complex baseband confined to ``|f| < bandwidth / 2`` (periodic over the record)."""
    rng = np.random.default_rng(rng)
    freqs = np.fft.fftfreq(n_samples, d=1.0 / fs)
    inside = np.abs(freqs) < bandwidth / 2
    spectrum = np.where(inside, rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples), 0)
    u = np.fft.ifft(spectrum)
    power = np.sqrt(np.mean(np.abs(u) ** 2))
    return u * (rms / power) if power > 0 else u


# -- binary series files -------------------------------------------------------

SERIES_MAGIC = b"TMAS"
SERIES_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def write_series(path, series, fs):
    """Little-endian file: 16-byte header (magic, version, fs, length), then (re, im) float64 pairs."""
    series = np.asarray(series, dtype=complex)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SERIES_MAGIC, SERIES_VERSION, int(fs), series.size))
        fh.write(series.astype("<c16").tobytes())


def read_series(path):
    """Inverse of :func:`write_series`; returns ``(series, fs)``."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError("truncated series header")
        magic, version, fs, length = _HEADER.unpack(header)
        if magic != SERIES_MAGIC:
            raise ValueError(f"not a series file (magic {magic!r})")
        if version != SERIES_VERSION:
            raise ValueError(f"unsupported series version {version}")
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != length:
        raise ValueError(f"series declares {length} samples but holds {data.size}")
    return data.astype(complex), fs
