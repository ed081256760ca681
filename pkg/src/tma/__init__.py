"""Harmonic beamforming with time-modulated antenna arrays.

Switched rectangular pulses, sum-of-weighted-cosines pulses, and the
single-sideband architecture built from DC-extracted, re-modulated
rectangular pulses.
"""

from .core import (
    OMEGA0,
    T0,
    ArrayGeometry,
    ExcitationGrid,
    GridDiagnostics,
    build_uniform_geometry,
    validate_grid,
    wrap_phase,
)
from .estimators import SSBBeamformer, SWCBeamformer, SwitchedBeamformer
from .metrics import (
    HarmonicPattern,
    MetricsReport,
    PatternStats,
    UndefinedEfficiencyError,
    array_factor,
    directivity,
    efficiency,
    harmonic_powers,
    pattern_stats,
    power_pattern,
    specular_deviation,
)
from .pulses import (
    RectPulseParams,
    SSBParams,
    SWCParams,
    numeric_coeff,
    rect_coeff,
    rect_waveform,
    ssb_waveforms,
    swc_coeff,
    swc_waveform,
    waveform_mean_power,
)
from .synthesis import (
    BeamPlan,
    dc_extract,
    delays_from_phases,
    excitation_grid,
    gaussian_taper,
    grid_from_rect,
    grid_from_ssb,
    grid_from_swc,
    phases_from_delays,
    steering_phases,
)
from .timesim import (
    LinkReport,
    Scene,
    Stream,
    demux,
    link_metrics,
    read_series,
    spectral_lines,
    synthesize_received,
    write_series,
)

__version__ = "0.1.0"
