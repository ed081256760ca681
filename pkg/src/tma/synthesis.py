"""Excitation grids for each architecture, steering schedules and tapers."""

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_float, check_positive_int, check_vector
from .core import ExcitationGrid, wrap_phase
from .pulses import RectPulseParams, SSBParams, SWCParams, _rect_coeffs, _swc_coeffs


@dataclass(frozen=True)
class BeamPlan:
    """Target direction per harmonic beam plus the amplitude taper.

    ``beams`` is a sequence of ``(q, theta_deg)`` pairs.
    """

    beams: tuple
    taper: np.ndarray | None = None

    def __post_init__(self):
        beams = tuple((int(q), float(theta)) for q, theta in self.beams)
        orders = [q for q, _ in beams]
        if len(set(orders)) != len(orders):
            raise ValueError(f"duplicate harmonic in beam plan: {orders}")
        for q, theta in beams:
            if not 0.0 < theta < 180.0:
                raise ValueError(f"beam angle {theta} for q={q} must lie in (0, 180) degrees")
        object.__setattr__(self, "beams", beams)
        if self.taper is not None:
            object.__setattr__(self, "taper", check_vector(self.taper, "taper"))

    @property
    def orders(self):
        return tuple(q for q, _ in self.beams)

    @property
    def max_order(self):
        return max((q for q, _ in self.beams), default=0)

    def angle(self, q):
        return dict(self.beams)[q]


def _check_band(order, band_limit):
    band_limit = check_positive_int(band_limit, "band_limit")
    if order > band_limit:
        raise ValueError(f"highest harmonic {order} exceeds band limit Q={band_limit}")
    return band_limit


def grid_from_rect(params, band_limit=50):
    """I[n, q] = G_nq of each switched rectangular pulse, |q| <= Q."""
    band_limit = _check_band(0, band_limit)
    q = np.arange(-band_limit, band_limit + 1)
    values = _rect_coeffs(params.duty[:, None], params.delay[:, None], q[None, :])
    return ExcitationGrid(values, "rect")


def grid_from_swc(params, band_limit=50):
    band_limit = _check_band(params.order, band_limit)
    q = np.arange(-band_limit, band_limit + 1)
    return ExcitationGrid(_swc_coeffs(params.taper, params.weights, params.phases, q), "swc")


def grid_from_ssb(params, band_limit=50):
    """Positive-only comb: I[n, q] = xi_n exp(-j Phi_nq) for q = 1..L, zero elsewhere."""
    band_limit = _check_band(params.order, band_limit)
    values = np.zeros((params.n_elements, 2 * band_limit + 1), dtype=complex)
    cols = band_limit + np.asarray(params.harmonics)
    values[:, cols] = params.taper[:, None] * np.exp(-1j * params.phases)
    return ExcitationGrid(values, "ssb")


def steering_phases(geometry, plan, order=None):
    """Phase matrix Phi[n, q-1] = 2 pi z_n cos(theta_q), wrapped to (-pi, pi].

    Columns run over q = 1..order (default: highest planned harmonic);
    unplanned harmonics get zero phase. A planned q = 0 beam cannot be
    steered and is ignored here.
    """
    if not isinstance(plan, BeamPlan):
        plan = BeamPlan(plan)
    order = plan.max_order if order is None else int(order)
    phases = np.zeros((geometry.n_elements, order))
    for q, theta in plan.beams:
        if 1 <= q <= order:
            phases[:, q - 1] = 2 * np.pi * geometry.positions * np.cos(np.deg2rad(theta))
    return wrap_phase(phases)


def _harmonic_orders(n_columns, harmonics):
    if harmonics is None:
        return np.arange(1, n_columns + 1)
    harmonics = np.asarray(harmonics, dtype=int)
    if harmonics.shape != (n_columns,):
        raise ValueError("need one harmonic order per phase column")
    return harmonics


def delays_from_phases(phases, harmonics=None):
    """Delays (periods) realizing each phase: delta = Phi / (2 pi q) reduced into [0, 1/q).

    Columns default to harmonics 1..L. A q = 0 column must carry zero phase.
    """
    phases = np.atleast_2d(np.asarray(phases, dtype=float))
    q = _harmonic_orders(phases.shape[1], harmonics)
    if np.any(q < 0):
        raise ValueError("delays are defined for non-negative harmonics only")
    dc = q == 0
    if np.any(wrap_phase(phases[:, dc]) != 0):
        raise ValueError("non-zero phase requested at q = 0; the fundamental carries no delay")
    qq = np.where(dc, 1, q)
    period = 1.0 / qq
    delays = np.mod(phases / (2 * np.pi * qq), period)
    # mod can round up to the period itself
    delays = np.where(delays >= period, 0.0, delays)
    return np.where(dc, 0.0, delays)


def phases_from_delays(delays, harmonics=None):
    """Inverse of :func:`delays_from_phases`: Phi = 2 pi q delta, wrapped."""
    delays = np.atleast_2d(np.asarray(delays, dtype=float))
    q = _harmonic_orders(delays.shape[1], harmonics)
    return wrap_phase(2 * np.pi * q * delays)


def gaussian_taper(n_elements, sigma=2 / 3):
    """Unit-peak Gaussian sampled over the aperture mapped onto [-1, 1].

    ``xi_n = exp(-x_n^2 / (2 sigma^2))`` with ``x_n = (2n - (N-1)) / (N-1)``.
    The continuous Gaussian peaks at 1 at the array centre; for even N no
    element sits there, so the largest sample is slightly below 1.
    """
    n_elements = check_positive_int(n_elements, "n_elements")
    sigma = check_positive_float(sigma, "sigma")
    if n_elements == 1:
        return np.ones(1)
    n = np.arange(n_elements)
    x = (2 * n - (n_elements - 1)) / (n_elements - 1)
    return np.exp(-(x**2) / (2 * sigma**2))


def dc_extract(params, n):
    """DC line of element ``n``'s rectangular pulse, i.e. its duty cycle."""
    return float(params.duty[n])


def ssb_params_from_plan(geometry, plan, taper=None):
    """SSB drive that steers every planned beam; only planned harmonics are modulated."""
    if not isinstance(plan, BeamPlan):
        plan = BeamPlan(plan, taper)
    taper = plan.taper if taper is None else taper
    if taper is None:
        taper = np.ones(geometry.n_elements)
    if not plan.beams:
        raise ValueError("SSB beam plan is empty")
    if any(q < 1 for q in plan.orders):
        raise ValueError("SSB beams must use harmonics q >= 1")
    orders = sorted(plan.orders)
    phases = steering_phases(geometry, plan)[:, np.asarray(orders) - 1]
    return SSBParams(taper, phases, tuple(orders))


def rect_delays_for_steering(geometry, duty, theta_deg):
    """Switch delays that point the q = 1 beam of a rectangular TMA at ``theta_deg``.

    Harmonic 1 has phase -2 pi (delay + duty/2); matching it to
    -2 pi z_n cos(theta) gives the delay below (mod 1). Higher harmonics follow
    proportionally, which is exactly the limitation of switched arrays.
    """
    duty = np.asarray(duty, dtype=float)
    delay = np.mod(geometry.positions * np.cos(np.deg2rad(theta_deg)) - duty / 2, 1.0)
    return np.where(delay >= 1.0, 0.0, delay)


def swc_params_from_plan(geometry, plan, weights, taper=None):
    """SWC drive whose cosine k is phased to steer the planned beam at harmonic k."""
    if not isinstance(plan, BeamPlan):
        plan = BeamPlan(plan, taper)
    taper = plan.taper if taper is None else taper
    if taper is None:
        taper = np.ones(geometry.n_elements)
    order = len(np.atleast_1d(weights)) - 1
    if plan.max_order > order:
        raise ValueError(f"beam at q={plan.max_order} exceeds the SWC order {order}")
    return SWCParams(taper, weights, steering_phases(geometry, plan, order))


def excitation_grid(params, band_limit=50):
    """Dispatch to the grid builder matching the parameter record."""
    if isinstance(params, RectPulseParams):
        return grid_from_rect(params, band_limit)
    if isinstance(params, SWCParams):
        return grid_from_swc(params, band_limit)
    if isinstance(params, SSBParams):
        return grid_from_ssb(params, band_limit)
    raise TypeError(f"unsupported modulation parameters: {type(params).__name__}")
