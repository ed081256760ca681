"""Shared value types and unit conventions.

Everything is normalized: the modulation period T0 is one time unit, so the
modulation angular frequency is 2*pi and harmonic ``q`` sits at ``q`` cycles
per period. Element positions are expressed in wavelengths, which makes the
electrical phase of element ``n`` towards angle theta equal to
``2*pi*z_n*cos(theta)``. The carrier is carried symbolically (complex
baseband at zero frequency).
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positions, check_positive_float, check_positive_int

T0 = 1.0
OMEGA0 = 2.0 * np.pi

PROVENANCES = ("rect", "swc", "ssb")


def wrap_phase(phase):
    """Wrap radians into (-pi, pi]."""
    phase = np.asarray(phase, dtype=float)
    return np.pi - np.mod(np.pi - phase, 2.0 * np.pi)


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ArrayGeometry:
    """Linear array of isotropic elements along z, positions in wavelengths."""

    positions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "positions", _frozen(check_positions(self.positions)))

    @property
    def n_elements(self):
        return self.positions.size

    def steering_matrix(self, theta_deg):
        """``exp(j*2*pi*z_n*cos(theta))`` with shape (n_angles, n_elements)."""
        cos_t = np.cos(np.deg2rad(np.asarray(theta_deg, dtype=float)))
        return np.exp(2j * np.pi * np.multiply.outer(cos_t, self.positions))

    def __eq__(self, other):
        if not isinstance(other, ArrayGeometry):
            return NotImplemented
        return np.array_equal(self.positions, other.positions)

    def __hash__(self):
        return hash(self.positions.tobytes())


def build_uniform_geometry(n_elements, spacing=0.5):
    """Uniform linear array with positions ``n * spacing`` for n = 0..N-1."""
    n_elements = check_positive_int(n_elements, "n_elements")
    spacing = check_positive_float(spacing, "spacing")
    return ArrayGeometry(np.arange(n_elements) * spacing)


@dataclass(frozen=True)
class ExcitationGrid:
    """Dynamic excitations I[n, q] for elements n and harmonics q in [-Q, Q].

    ``values[:, Q + q]`` holds the column for harmonic ``q``.
    """

    values: np.ndarray
    provenance: str
    band_limit: int = field(init=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.ndim != 2 or values.shape[1] % 2 != 1:
            raise ValueError("grid values must have shape (N, 2Q+1)")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid contains non-finite excitations")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "band_limit", (values.shape[1] - 1) // 2)

    @property
    def n_elements(self):
        return self.values.shape[0]

    @property
    def harmonics(self):
        return np.arange(-self.band_limit, self.band_limit + 1)

    def has_harmonic(self, q):
        return -self.band_limit <= q <= self.band_limit

    def column(self, q):
        if not self.has_harmonic(q):
            raise ValueError(f"harmonic {q} outside band [-{self.band_limit}, {self.band_limit}]")
        return self.values[:, self.band_limit + q]

    def columns(self, qs):
        qs = np.asarray(qs, dtype=int)
        if np.any(np.abs(qs) > self.band_limit):
            raise ValueError(f"harmonics outside band [-{self.band_limit}, {self.band_limit}]")
        return self.values[:, self.band_limit + qs]


@dataclass(frozen=True)
class GridDiagnostics:
    """Outcome of :func:`validate_grid`. Empty ``violations`` means clean."""

    conjugate_deviation: float
    conjugate_worst: tuple | None
    negative_band_max: float
    negative_band_worst: tuple | None
    max_magnitude: float
    violations: tuple

    @property
    def ok(self):
        return not self.violations


def validate_grid(grid, atol=1e-12):
    """Check a grid against the invariants of its provenance.

    Never raises; locations are reported as ``(n, q)``.
    """
    values = grid.values
    Q = grid.band_limit
    violations = []

    mirror = np.conj(values[:, ::-1])
    conj_dev = np.abs(values - mirror)
    n, col = np.unravel_index(np.argmax(conj_dev), conj_dev.shape)
    conj_max = float(conj_dev[n, col])
    conj_where = (int(n), int(col) - Q) if conj_max > 0 else None

    neg = np.abs(values[:, : Q + 1])
    n, col = np.unravel_index(np.argmax(neg), neg.shape)
    neg_max = float(neg[n, col])
    neg_where = (int(n), int(col) - Q) if neg_max > 0 else None

    max_mag = float(np.max(np.abs(values))) if values.size else 0.0

    if grid.provenance in ("rect", "swc") and conj_max > atol:
        violations.append(f"conjugate symmetry broken by {conj_max:.3e} at (n, q) = {conj_where}")
    if grid.provenance == "ssb" and neg_max > 0:
        violations.append(f"non-zero excitation {neg_max:.3e} in q <= 0 band at (n, q) = {neg_where}")
    if max_mag > 1 + atol:
        violations.append(f"excitation magnitude {max_mag:.6g} exceeds 1")

    return GridDiagnostics(
        conjugate_deviation=conj_max,
        conjugate_worst=conj_where,
        negative_band_max=neg_max,
        negative_band_worst=neg_where,
        max_magnitude=max_mag,
        violations=tuple(violations),
    )
