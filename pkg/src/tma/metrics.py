"""Harmonic array factors and scalar figures of merit.

The array factor of harmonic ``q`` towards ``theta`` (degrees from the array
axis) is ``F_q = sum_n I_nq exp(j 2 pi z_n cos theta)``; the harmonic time
factor has unit modulus and is dropped.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_angles

WORKERS_ENV = "TMA_WORKERS"


class UndefinedEfficiencyError(ArithmeticError):
    """Raised when the total received power is zero."""


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def angle_grid(step=0.1):
    """Angles 0..180 degrees inclusive with the given step."""
    n = int(round(180.0 / step))
    if n < 2 or not np.isclose(n * step, 180.0):
        raise ValueError(f"angle step {step} must divide 180 degrees")
    return np.linspace(0.0, 180.0, n + 1)


def array_factor(grid, geometry, q, theta_deg):
    """Complex F_q(theta). Scalar in, scalar out."""
    if not grid.has_harmonic(q):
        raise ValueError(f"harmonic {q} outside band [-{grid.band_limit}, {grid.band_limit}]")
    if grid.n_elements != geometry.n_elements:
        raise ValueError("grid and geometry disagree on the element count")
    scalar = np.ndim(theta_deg) == 0
    theta = check_angles(theta_deg)
    af = geometry.steering_matrix(theta) @ grid.column(q)
    return complex(af[0]) if scalar else af


def harmonic_patterns(grid, geometry, harmonics, theta_deg, workers=None):
    """Matrix of F_q(theta), shape (n_angles, n_harmonics).

    Angle chunks are evaluated concurrently when ``workers > 1`` (default from
    the ``TMA_WORKERS`` environment variable); every chunk is independent so
    the result does not depend on the worker count.
    """
    theta = check_angles(theta_deg)
    cols = grid.columns(np.atleast_1d(harmonics))
    workers = default_workers() if workers is None else int(workers)
    if workers <= 1 or theta.size < 2048:
        return geometry.steering_matrix(theta) @ cols
    chunks = np.array_split(theta, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda th: geometry.steering_matrix(th) @ cols, chunks))
    return np.vstack(parts)


@dataclass(frozen=True)
class HarmonicPattern:
    q: int
    theta_deg: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        theta = check_angles(self.theta_deg)
        if np.any(np.diff(theta) <= 0):
            raise ValueError("angle grid must be strictly increasing")
        values = np.asarray(self.values, dtype=complex)
        if values.shape != theta.shape or not np.all(np.isfinite(values)):
            raise ValueError("pattern values must be finite and match the angle grid")
        object.__setattr__(self, "theta_deg", theta)
        object.__setattr__(self, "values", values)

    @classmethod
    def evaluate(cls, grid, geometry, q, theta_deg):
        return cls(q, theta_deg, array_factor(grid, geometry, q, np.asarray(theta_deg)))

    @property
    def power(self):
        return np.abs(self.values) ** 2

    def power_db(self, reference=None):
        return _to_db(self.power, reference)


def _to_db(power, reference=None):
    if reference is None:
        reference = np.max(power)
    with np.errstate(divide="ignore", invalid="ignore"):
        if reference <= 0:
            return np.full(power.shape, -np.inf)
        return 10 * np.log10(power / reference)


def power_pattern(grid, geometry, q, theta_deg, reference=None):
    """``|F_q|^2`` in dB relative to ``reference`` (linear power) or to its own peak.

    An all-zero harmonic comes back as ``-inf`` everywhere.
    """
    af = array_factor(grid, geometry, q, np.asarray(theta_deg))
    return _to_db(np.abs(af) ** 2, reference)


def harmonic_powers(grid):
    """Mean received power per harmonic, p_q = sum_n |I_nq|^2."""
    p = np.sum(np.abs(grid.values) ** 2, axis=0)
    return {int(q): float(v) for q, v in zip(grid.harmonics, p)}


def efficiency(powers, useful):
    """Share of the total power carried by the ``useful`` harmonics."""
    total = float(sum(powers.values()))
    if not total > 0:
        raise UndefinedEfficiencyError("total received power is zero; efficiency undefined")
    used = float(sum(powers.get(int(q), 0.0) for q in useful))
    return min(max(used / total, 0.0), 1.0)


def simpson_weights(n_points, a, b):
    """Composite Simpson weights on ``n_points`` (odd) equispaced nodes."""
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError("Simpson's rule needs an odd number (>= 3) of points")
    h = (b - a) / (n_points - 1)
    w = np.full(n_points, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * h / 3


def _radiated_gram(geometry, n_points):
    """Hermitian matrix R with int_0^pi |F|^2 sin(theta) dtheta = I^H R I (Simpson)."""
    theta = np.linspace(0.0, np.pi, n_points)
    w = simpson_weights(n_points, 0.0, np.pi) * np.sin(theta)
    A = np.exp(2j * np.pi * np.multiply.outer(np.cos(theta), geometry.positions))
    return (A.conj().T * w) @ A


def radiated_powers(grid, geometry, harmonics=None, n_points=2001):
    """``int_0^pi |F_q(theta)|^2 sin(theta) dtheta`` per harmonic, by Simpson."""
    if n_points % 2 == 0:
        n_points += 1
    qs = grid.harmonics if harmonics is None else np.atleast_1d(harmonics)
    cols = grid.columns(qs)
    gram = _radiated_gram(geometry, n_points)
    return np.real(np.sum(cols.conj() * (gram @ cols), axis=0))


DIRECTIVITY_MODES = ("pattern", "total")


def directivity(grid, geometry, q, theta0_deg, mode="pattern", n_points=2001):
    """Directivity of harmonic ``q`` towards ``theta0_deg`` in dBi.

    ``pattern``: 2|F_q(theta0)|^2 over the radiated integral of F_q alone.
    ``total``: same numerator over the radiated integrals summed across every
    harmonic of the grid, so power spilled into unexploited harmonics counts
    as loss.
    """
    if mode not in DIRECTIVITY_MODES:
        raise ValueError(f"directivity mode must be one of {DIRECTIVITY_MODES}, got {mode!r}")
    peak = abs(array_factor(grid, geometry, q, theta0_deg)) ** 2
    if not peak > 0:
        raise ValueError(f"harmonic {q} does not radiate towards {theta0_deg} deg")
    if mode == "pattern":
        denom = radiated_powers(grid, geometry, [q], n_points)[0]
    else:
        denom = np.sum(radiated_powers(grid, geometry, None, n_points))
    return float(10 * np.log10(2 * peak / denom))


@dataclass(frozen=True)
class PatternStats:
    peak_deg: float
    sll_db: float | None
    beamwidth_deg: float | None


def _parabolic_peak(x, y, i):
    if i == 0 or i == len(y) - 1:
        return x[i]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    if denom >= 0:
        return x[i]
    offset = 0.5 * (y0 - y2) / denom
    return x[i] + offset * (x[i + 1] - x[i])


def _local_maxima(y):
    """Indices of strict local maxima; plateaus count once, endpoints included."""
    y = np.asarray(y)
    if y.size < 2:
        return []
    rising = np.r_[True, y[1:] > y[:-1]]
    not_falling = np.r_[y[:-1] >= y[1:], True]
    idx = np.flatnonzero(rising & not_falling)
    # endpoints must stand strictly above their only neighbour
    keep = [j for j in idx if not (j == 0 and y[0] <= y[1]) and not (j == y.size - 1 and y[-1] <= y[-2])]
    return keep


def _crossing(x, y, i, j, level):
    # linear interpolation between samples i and j where y crosses level
    return x[i] + (level - y[i]) * (x[j] - x[i]) / (y[j] - y[i])


def pattern_stats(pattern):
    """Peak angle, peak sidelobe level (dB) and -3 dB beamwidth (deg).

    The main lobe extends from the peak down to the nearest local minimum on
    each side. Missing quantities are ``None`` (e.g. an isotropic pattern).
    """
    power = pattern.power
    if not np.max(power) > 0:
        raise ValueError("pattern is identically zero")
    theta = pattern.theta_deg
    db = pattern.power_db()
    i = int(np.argmax(power))
    peak = float(_parabolic_peak(theta, db, i))

    lo = i
    while lo > 0 and db[lo - 1] < db[lo]:
        lo -= 1
    hi = i
    while hi < len(db) - 1 and db[hi + 1] < db[hi]:
        hi += 1

    lobes = [j for j in _local_maxima(db) if j < lo or j > hi]
    sll = float(max(db[j] for j in lobes)) if lobes else None

    left = right = None
    k = i
    while k > 0 and db[k] >= -3.0:
        k -= 1
    if db[k] < -3.0:
        left = _crossing(theta, db, k, k + 1, -3.0)
    k = i
    while k < len(db) - 1 and db[k] >= -3.0:
        k += 1
    if db[k] < -3.0:
        right = _crossing(theta, db, k - 1, k, -3.0)
    width = float(right - left) if left is not None and right is not None else None
    return PatternStats(peak, sll, width)


def specular_deviation(grid, geometry, q, theta_deg):
    """Max over the grid of ``| |F_q(theta)|^2 - |F_-q(180 - theta)|^2 |``."""
    theta = np.asarray(theta_deg, dtype=float)
    direct = np.abs(array_factor(grid, geometry, q, theta)) ** 2
    mirror = np.abs(array_factor(grid, geometry, -q, 180.0 - theta)) ** 2
    return float(np.max(np.abs(direct - mirror)))


@dataclass
class MetricsReport:
    """Figures of merit for one configured array."""

    p_q: dict
    eta: float
    useful: tuple
    beams: list = field(default_factory=list)

    def to_dict(self):
        return {
            "eta": self.eta,
            "useful_harmonics": list(self.useful),
            "p_q": {str(q): p for q, p in sorted(self.p_q.items())},
            "beams": self.beams,
        }


def evaluate(grid, geometry, beams, useful, theta_step=0.1, n_points=2001):
    """Build a :class:`MetricsReport` for the harmonics listed in ``beams``.

    ``beams`` is a sequence of ``(q, target_deg)``; ``target_deg`` may be
    ``None`` (e.g. the unsteerable q = 0 beam of a switched array). Directivity
    is taken towards the measured peak.
    """
    powers = harmonic_powers(grid)
    eta = efficiency(powers, useful)
    theta = angle_grid(theta_step)
    total_radiated = np.sum(radiated_powers(grid, geometry, None, n_points))
    entries = []
    for q, target in beams:
        pattern = HarmonicPattern.evaluate(grid, geometry, q, theta)
        stats = pattern_stats(pattern)
        peak_power = abs(array_factor(grid, geometry, q, stats.peak_deg)) ** 2
        own = radiated_powers(grid, geometry, [q], n_points)[0]
        entries.append(
            {
                "q": int(q),
                "target_deg": None if target is None else float(target),
                "peak_deg": stats.peak_deg,
                "sll_db": stats.sll_db,
                "beamwidth_deg": stats.beamwidth_deg,
                "directivity_dbi": {
                    "pattern": float(10 * np.log10(2 * peak_power / own)),
                    "total": float(10 * np.log10(2 * peak_power / total_radiated)),
                },
            }
        )
    return MetricsReport(powers, eta, tuple(int(q) for q in useful), entries)
