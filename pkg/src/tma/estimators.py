"""Scikit-learn style beamformers for the three TMA architectures.

``fit`` takes the element positions (wavelengths) as ``X`` and derives the
modulation parameters and excitation grid for that aperture; ``transform``
maps angles (degrees) to the complex array factors of the exploited
harmonics. Hyper-parameters are plain constructor arguments, so
``get_params``/``set_params``/``clone`` work as usual.

>>> import numpy as np
>>> bf = SSBBeamformer(beams=((1, 50.0), (2, 90.0), (3, 120.0)))
>>> bf.fit(np.arange(20) * 0.5).score()
1.0
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_angles, check_positions, check_positive_float
from .core import ArrayGeometry
from .metrics import (
    array_factor,
    efficiency,
    evaluate,
    harmonic_patterns,
    harmonic_powers,
)
from .pulses import RectPulseParams
from .synthesis import (
    BeamPlan,
    excitation_grid,
    gaussian_taper,
    rect_delays_for_steering,
    ssb_params_from_plan,
    swc_params_from_plan,
)

DEFAULT_SIGMA = 2 / 3


def resolve_taper(taper, n_elements, sigma=DEFAULT_SIGMA):
    """``"gaussian"``, ``"uniform"`` or an explicit vector of length N."""
    if isinstance(taper, str):
        if taper == "gaussian":
            return gaussian_taper(n_elements, sigma)
        if taper == "uniform":
            return np.ones(n_elements)
        raise ValueError(f"unknown taper {taper!r}")
    taper = np.asarray(taper, dtype=float)
    if taper.shape != (n_elements,):
        raise ValueError(f"taper has {taper.size} entries for {n_elements} elements")
    return taper


class TMABeamformer(BaseEstimator):
    """Shared machinery; subclasses provide ``_build_params``.

    ``fit`` and ``transform`` take different inputs (positions vs angles), so
    there is deliberately no ``fit_transform``.
    """

    kind = None

    def fit(self, X, y=None):
        positions = check_positions(X)
        self.geometry_ = ArrayGeometry(positions)
        self.plan_ = BeamPlan(self.beams)
        self.taper_ = resolve_taper(self.taper, positions.size, check_positive_float(self.sigma, "sigma"))
        self.params_ = self._build_params()
        self.grid_ = excitation_grid(self.params_, self.harmonics)
        self.useful_harmonics_ = self._useful()
        self.output_harmonics_ = self._outputs()
        self.n_features_in_ = 1
        return self

    def _useful(self):
        return tuple(sorted(self.plan_.orders))

    def _outputs(self):
        return self._useful()

    def transform(self, X):
        """Complex array factors, shape (n_angles, n_output_harmonics)."""
        check_is_fitted(self, "grid_")
        return harmonic_patterns(self.grid_, self.geometry_, self.output_harmonics_, check_angles(X))

    def array_factor(self, q, theta_deg):
        check_is_fitted(self, "grid_")
        return array_factor(self.grid_, self.geometry_, q, theta_deg)

    def power_pattern_db(self, theta_deg, normalize="global"):
        """``|F_q|^2`` in dB per output harmonic.

        ``normalize="global"`` references every column to the strongest
        harmonic, ``"self"`` normalizes each column to its own peak.
        """
        power = np.abs(self.transform(theta_deg)) ** 2
        if normalize == "global":
            ref = np.full(power.shape[1], np.max(power))
        elif normalize == "self":
            ref = np.max(power, axis=0)
        else:
            raise ValueError(f"normalize must be 'global' or 'self', got {normalize!r}")
        with np.errstate(divide="ignore", invalid="ignore"):
            db = 10 * np.log10(power / ref)
        db[:, ref <= 0] = -np.inf
        return db

    def harmonic_powers(self):
        check_is_fitted(self, "grid_")
        return harmonic_powers(self.grid_)

    def score(self, X=None, y=None):
        """Sideband efficiency of the exploited harmonics."""
        check_is_fitted(self, "grid_")
        return efficiency(harmonic_powers(self.grid_), self.useful_harmonics_)

    def report(self, angle_step=0.1, integration_points=2001):
        check_is_fitted(self, "grid_")
        beams = list(self.plan_.beams) or [(q, None) for q in self.useful_harmonics_]
        return evaluate(
            self.grid_, self.geometry_, beams, self.useful_harmonics_, angle_step, integration_points
        )


class SSBBeamformer(TMABeamformer):
    """Single-sideband TMA: DC of each switch pulse re-modulated onto harmonics 1..L."""

    kind = "ssb"

    def __init__(self, beams=((1, 90.0),), taper="gaussian", sigma=DEFAULT_SIGMA, harmonics=50):
        self.beams = beams
        self.taper = taper
        self.sigma = sigma
        self.harmonics = harmonics

    def _build_params(self):
        return ssb_params_from_plan(self.geometry_, self.plan_, self.taper_)


class _RealPulseBeamformer(TMABeamformer):
    def _useful(self):
        return tuple(sorted(self.plan_.orders)) or (0,)

    def _outputs(self):
        qs = {0}
        for q in self.plan_.orders:
            qs.update((q, -q))
        return tuple(sorted(qs))


class SWCBeamformer(_RealPulseBeamformer):
    """Sum-of-weighted-cosines TMA; cosine ``k`` is phased to steer the beam planned at ``k``."""

    kind = "swc"

    def __init__(
        self,
        beams=((0, 90.0),),
        weights=(0.1, 0.2, 0.2),
        taper="gaussian",
        sigma=DEFAULT_SIGMA,
        harmonics=50,
    ):
        self.beams = beams
        self.weights = weights
        self.taper = taper
        self.sigma = sigma
        self.harmonics = harmonics

    def _build_params(self):
        return swc_params_from_plan(self.geometry_, self.plan_, np.asarray(self.weights, dtype=float), self.taper_)


class SwitchedBeamformer(_RealPulseBeamformer):
    """Conventional TMA with RF switches.

    Duty cycles are ``duty_scale * taper``. Unless explicit ``delays`` are
    given, the switch delays steer the q = 1 beam (if planned); every other
    harmonic follows from the pulse shape and cannot be steered on its own.
    """

    kind = "rect"

    def __init__(
        self,
        beams=((0, 90.0),),
        taper="gaussian",
        sigma=DEFAULT_SIGMA,
        duty_scale=0.15,
        delays=None,
        harmonics=50,
    ):
        self.beams = beams
        self.taper = taper
        self.sigma = sigma
        self.duty_scale = duty_scale
        self.delays = delays
        self.harmonics = harmonics

    def _build_params(self):
        duty = float(self.duty_scale) * self.taper_
        if self.delays is not None:
            delay = np.asarray(self.delays, dtype=float)
        elif 1 in self.plan_.orders:
            delay = rect_delays_for_steering(self.geometry_, duty, self.plan_.angle(1))
        else:
            delay = np.zeros_like(duty)
        return RectPulseParams(duty, delay)


ESTIMATORS = {cls.kind: cls for cls in (SwitchedBeamformer, SWCBeamformer, SSBBeamformer)}
