"""Periodic modulating waveforms and their Fourier-series coefficients.

Three families are covered:

* switched rectangular pulses (duty cycle ``xi`` and start delay, both in
  periods),
* sum-of-weighted-cosines (SWC) pulses,
* the quadrature pair driving a single-sideband element, obtained by removing
  the DC line of a rectangular pulse and re-modulating it onto harmonics
  ``1..L`` with per-harmonic phases.

Closed forms live next to a brute-force Riemann-sum oracle
(:func:`numeric_coeff`) that every closed form is tested against.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_unit_interval, check_vector
from .core import wrap_phase


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RectPulseParams:
    """Per-element switch timing: ``duty`` = tau_n/T0, ``delay`` = delta_n/T0.

    Element ``n`` is on for ``t`` in ``[delay, delay + duty)`` modulo 1.
    """

    duty: np.ndarray
    delay: np.ndarray

    def __post_init__(self):
        duty = check_vector(self.duty, "duty")
        delay = check_vector(self.delay, "delay")
        if delay.shape != duty.shape:
            raise ValueError("duty and delay must have the same length")
        check_unit_interval(duty, "duty")
        check_unit_interval(delay, "delay", closed_right=False)
        object.__setattr__(self, "duty", _frozen(duty))
        object.__setattr__(self, "delay", _frozen(delay))

    @property
    def n_elements(self):
        return self.duty.size


@dataclass(frozen=True)
class SWCParams:
    """Sum-of-weighted-cosines pulses.

    ``weights[n, k]`` is the cosine weight a_nk for k = 0..L and
    ``phases[n, k-1]`` the phase of cosine k >= 1. The harmonic content is
    ``I_n0 = xi_n a_n0`` and ``I_n(+-k) = xi_n (a_nk / 2) exp(-+j Phi_nk)``.
    A 1-D ``weights`` vector is shared by all elements.
    """

    taper: np.ndarray
    weights: np.ndarray
    phases: np.ndarray | None = None

    def __post_init__(self):
        taper = check_vector(self.taper, "taper")
        check_unit_interval(taper, "taper")
        weights = _per_element(self.weights, taper.size, "weights")
        if np.any(weights < 0):
            raise ValueError("cosine weights must be non-negative")
        L = weights.shape[1] - 1
        if self.phases is None:
            phases = np.zeros((taper.size, L))
        else:
            phases = _per_element(self.phases, taper.size, "phases")
            if phases.shape[1] != L:
                raise ValueError(f"expected {L} phase columns, got {phases.shape[1]}")
        mags = np.abs(taper[:, None]) * np.column_stack([weights[:, :1], weights[:, 1:] / 2])
        if np.any(mags > 1 + 1e-12):
            raise ValueError("SWC excitations must satisfy |I_nk| <= 1")
        object.__setattr__(self, "taper", _frozen(taper))
        object.__setattr__(self, "weights", _frozen(weights))
        object.__setattr__(self, "phases", _frozen(wrap_phase(phases)))

    @property
    def n_elements(self):
        return self.taper.size

    @property
    def order(self):
        return self.weights.shape[1] - 1


@dataclass(frozen=True)
class SSBParams:
    """Single-sideband element drive: taper xi_n in (0, 1] and phases Phi_nq.

    ``phases[n, i]`` belongs to harmonic ``harmonics[i]`` (default 1..L) and is
    stored wrapped to (-pi, pi]. Harmonics left out of ``harmonics`` are not
    modulated at all.
    """

    taper: np.ndarray
    phases: np.ndarray
    harmonics: tuple | None = None

    def __post_init__(self):
        taper = check_vector(self.taper, "taper")
        check_unit_interval(taper, "taper", open_left=True)
        phases = _per_element(self.phases, taper.size, "phases")
        if self.harmonics is None:
            harmonics = tuple(range(1, phases.shape[1] + 1))
        else:
            harmonics = tuple(int(q) for q in self.harmonics)
        if len(harmonics) != phases.shape[1]:
            raise ValueError("need one phase column per harmonic")
        if any(q < 1 for q in harmonics) or len(set(harmonics)) != len(harmonics):
            raise ValueError(f"SSB harmonics must be distinct and >= 1, got {harmonics}")
        object.__setattr__(self, "taper", _frozen(taper))
        object.__setattr__(self, "phases", _frozen(wrap_phase(phases)))
        object.__setattr__(self, "harmonics", harmonics)

    @classmethod
    def from_delays(cls, taper, delays, harmonics=None):
        """Build from per-harmonic delays (in periods): Phi_nq = 2*pi*q*delta_nq."""
        delays = np.atleast_2d(np.asarray(delays, dtype=float))
        q = np.arange(1, delays.shape[1] + 1) if harmonics is None else np.asarray(harmonics)
        return cls(taper, 2 * np.pi * q * delays, harmonics)

    @property
    def n_elements(self):
        return self.taper.size

    @property
    def order(self):
        """Highest modulated harmonic L."""
        return max(self.harmonics)

    @property
    def delays(self):
        from .synthesis import delays_from_phases

        return delays_from_phases(self.phases, self.harmonics)


def _per_element(values, n_elements, name):
    """2-D (N, K) array; a 1-D vector is shared by every element."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        arr = np.broadcast_to(arr, (n_elements, arr.size))
    arr = check_vector(arr, name, ndim=2)
    if arr.shape[0] != n_elements:
        raise ValueError(f"{name} must have one row per element")
    return arr


# -- rectangular pulses -----------------------------------------------------


def rect_waveform(params, n, t):
    """Value (0 or 1) of element ``n``'s switch at times ``t`` (in periods)."""
    t = np.asarray(t, dtype=float)
    xi = params.duty[n]
    if xi >= 1:
        return np.ones_like(t)
    return (np.mod(t - params.delay[n], 1.0) < xi).astype(float)


def _rect_coeffs(duty, delay, q):
    """Broadcasting closed form ``xi sinc(q xi) exp(-j 2 pi q (delay + xi/2))``.

    Evaluated at |q| and conjugated for negative q so the symmetry
    G_(-q) = conj(G_q) holds bit-for-bit.
    """
    q = np.asarray(q)
    aq = np.abs(q)
    coeff = duty * np.sinc(aq * duty) * np.exp(-2j * np.pi * aq * (delay + duty / 2))
    return np.where(q < 0, np.conj(coeff), coeff)


def rect_coeff(params, n, q):
    """Fourier-series coefficient G_nq of the rectangular pulse of element ``n``.

    ``q`` may be an integer or an array of integers. At q = 0 the result is the
    duty cycle exactly.
    """
    return _rect_coeffs(params.duty[n], params.delay[n], q)


# -- SWC pulses ---------------------------------------------------------------


def _swc_coeffs(taper, weights, phases, q):
    """Coefficient matrix for all elements; ``q`` is a 1-D integer array."""
    q = np.asarray(q, dtype=int)
    L = weights.shape[1] - 1
    out = np.zeros((taper.size, q.size), dtype=complex)
    for j, qq in enumerate(q):
        k = abs(int(qq))
        if k > L:
            continue
        if k == 0:
            out[:, j] = taper * weights[:, 0]
        else:
            c = taper * (weights[:, k] / 2) * np.exp(-1j * phases[:, k - 1])
            out[:, j] = np.conj(c) if qq < 0 else c
    return out


def swc_coeff(params, n, q):
    """Harmonic ``q`` excitation of an SWC-driven element (zero beyond the order)."""
    scalar = np.ndim(q) == 0
    qs = np.atleast_1d(q)
    sl = slice(n, n + 1)
    out = _swc_coeffs(params.taper[sl], params.weights[sl], params.phases[sl], qs)[0]
    return out[0] if scalar else out


def swc_waveform(params, n, t):
    """``xi_n * sum_k a_nk cos(2 pi k t - Phi_nk)``, the real SWC pulse."""
    t = np.asarray(t, dtype=float)
    w = params.weights[n]
    total = np.full_like(t, w[0])
    for k in range(1, params.order + 1):
        total = total + w[k] * np.cos(2 * np.pi * k * t - params.phases[n, k - 1])
    return params.taper[n] * total


# -- single-sideband quadrature pulses ---------------------------------------


def ssb_waveforms(params, n, t):
    """Cosine and sine branches driving element ``n`` of the SSB array.

    ``r_cos = xi * sum_q cos(2 pi q t - Phi_q)`` and
    ``r_sin = xi * sum_q sin(2 pi q t - Phi_q)``, q = 1..L.
    """
    t = np.asarray(t, dtype=float)
    q = np.asarray(params.harmonics)
    arg = 2 * np.pi * np.multiply.outer(t, q) - params.phases[n]
    xi = params.taper[n]
    return xi * np.cos(arg).sum(axis=-1), xi * np.sin(arg).sum(axis=-1)


def ssb_complex_waveform(params, n, t):
    """``r_cos + j r_sin`` for element ``n``."""
    c, s = ssb_waveforms(params, n, t)
    return c + 1j * s


# -- brute-force oracles ------------------------------------------------------


def numeric_coeff(waveform, q, samples=1_000_000):
    """Riemann-sum Fourier coefficient ``(1/M) sum_m w(m/M) exp(-j 2 pi q m/M)``.

    ``waveform`` is any callable accepting an array of times in [0, 1). ``q``
    may be an integer or an integer array; arrays are served from a single
    FFT of the samples.
    """
    q_arr = np.atleast_1d(np.asarray(q, dtype=int))
    M = int(samples)
    if M < 64 * (int(np.max(np.abs(q_arr))) + 1):
        raise ValueError(f"samples={M} too small for harmonic {int(np.max(np.abs(q_arr)))}")
    t = np.arange(M) / M
    w = np.asarray(waveform(t), dtype=complex)
    if np.ndim(q) == 0:
        return complex(np.dot(w, np.exp(-2j * np.pi * int(q) * np.arange(M) / M)) / M)
    spectrum = np.fft.fft(w) / M
    return spectrum[np.mod(q_arr, M)]


def waveform_mean_power(waveform, samples=65536):
    """Mean of |w(t)|^2 over one period by direct sampling."""
    M = int(samples)
    if M < 1024:
        raise ValueError("waveform_mean_power needs at least 1024 samples")
    w = np.asarray(waveform(np.arange(M) / M))
    return float(np.mean(np.abs(w) ** 2))
