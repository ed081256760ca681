"""YAML run configurations and scene files.

A run configuration has a ``geometry`` section, exactly one architecture
section (``rect``, ``swc`` or ``ssb``), an optional ``beams`` list and an
optional ``analysis`` section. A scene file is a run configuration plus
``streams`` and ``simulation`` sections. See ``configs/README.md`` for the
full schema.
"""

from dataclasses import dataclass, field

import numpy as np
import yaml

from .core import build_uniform_geometry
from .estimators import ESTIMATORS
from .metrics import DIRECTIVITY_MODES
from .timesim import Scene, Stream, bandlimited_baseband


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


ARCHITECTURES = tuple(ESTIMATORS)
DIRECTIVITY_CHOICES = DIRECTIVITY_MODES + ("both",)


@dataclass
class RunConfig:
    n_elements: int
    spacing: float
    architecture: str
    options: dict
    beams: list
    harmonics: int = 50
    angle_step: float = 0.1
    directivity_mode: str = "both"
    integration_points: int = 2001
    name: str = ""
    raw: dict = field(default_factory=dict, repr=False)

    def geometry(self):
        return build_uniform_geometry(self.n_elements, self.spacing)

    def estimator(self):
        cls = ESTIMATORS[self.architecture]
        opts = dict(self.options)
        taper = opts.pop("taper", {"kind": "gaussian"})
        if isinstance(taper, dict):
            kind = taper.get("kind", "gaussian")
            if "values" in taper:
                opts["taper"] = list(taper["values"])
            else:
                opts["taper"] = kind
            if "sigma" in taper:
                opts["sigma"] = _parse_number(taper["sigma"], "taper.sigma")
        else:
            opts["taper"] = taper
        beams = tuple((b["q"], b["theta_deg"]) for b in self.beams)
        try:
            return cls(beams=beams, harmonics=self.harmonics, **opts)
        except TypeError as exc:
            raise ConfigError(f"bad option in '{self.architecture}' section: {exc}") from None

    def fitted(self):
        return self.estimator().fit(self.geometry().positions)


def _parse_number(value, where):
    """Numbers, or simple fractions written as strings such as ``"2/3"``."""
    if isinstance(value, str) and "/" in value:
        num, den = value.split("/", 1)
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{where}: cannot parse {value!r}") from None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None


def _section(doc, key, required=True):
    value = doc.get(key)
    if value is None:
        if required:
            raise ConfigError(f"missing '{key}' section")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be a mapping")
    return value


def _load_yaml(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return doc


def parse_config(doc, name=""):
    geometry = _section(doc, "geometry")
    try:
        n_elements = int(geometry["n_elements"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("geometry.n_elements must be an integer") from None
    spacing = _parse_number(geometry.get("spacing", 0.5), "geometry.spacing")

    present = [k for k in ARCHITECTURES if k in doc]
    if len(present) != 1:
        raise ConfigError(f"need exactly one architecture section out of {ARCHITECTURES}, found {present}")
    architecture = present[0]
    options = dict(_section(doc, architecture, required=False))
    if "duty_scale" in options:
        options["duty_scale"] = _parse_number(options["duty_scale"], f"{architecture}.duty_scale")
    if "weights" in options:
        options["weights"] = [_parse_number(w, f"{architecture}.weights") for w in options["weights"]]

    beams = []
    for i, b in enumerate(doc.get("beams") or []):
        if not isinstance(b, dict) or "q" not in b or "theta_deg" not in b:
            raise ConfigError(f"beams[{i}] needs 'q' and 'theta_deg'")
        beams.append({"q": int(b["q"]), "theta_deg": _parse_number(b["theta_deg"], f"beams[{i}].theta_deg")})

    analysis = _section(doc, "analysis", required=False)
    mode = analysis.get("directivity_mode", "both")
    if mode not in DIRECTIVITY_CHOICES:
        raise ConfigError(f"analysis.directivity_mode must be one of {DIRECTIVITY_CHOICES}")
    return RunConfig(
        n_elements=n_elements,
        spacing=spacing,
        architecture=architecture,
        options=options,
        beams=beams,
        harmonics=int(analysis.get("harmonics", 50)),
        angle_step=_parse_number(analysis.get("angle_step", 0.1), "analysis.angle_step"),
        directivity_mode=mode,
        integration_points=int(analysis.get("integration_points", 2001)),
        name=str(doc.get("name", name)),
        raw=doc,
    )


def load_config(path):
    return parse_config(_load_yaml(path), name=str(path))


def _parse_baseband(spec, n_samples, fs, where):
    kind = spec.get("kind", "cw")
    if kind == "cw":
        amp = spec.get("amplitude", 1.0)
        if isinstance(amp, (list, tuple)):
            if len(amp) != 2:
                raise ConfigError(f"{where}.amplitude must be [re, im]")
            return complex(_parse_number(amp[0], where), _parse_number(amp[1], where)), 0.0
        return complex(_parse_number(amp, where)), 0.0
    if kind == "bandlimited":
        bandwidth = _parse_number(spec.get("bandwidth", 0.5), f"{where}.bandwidth")
        if not 0 < bandwidth < 1:
            raise ConfigError(f"{where}.bandwidth must lie in (0, 1)")
        rms = _parse_number(spec.get("rms", 1.0), f"{where}.rms")
        u = bandlimited_baseband(n_samples, fs, bandwidth, int(spec.get("seed", 0)), rms)
        return u, bandwidth
    raise ConfigError(f"{where}.kind must be 'cw' or 'bandlimited'")


def load_scene(path):
    """Returns ``(scene, run_config)``."""
    doc = _load_yaml(path)
    config = parse_config(doc, name=str(path))
    sim = _section(doc, "simulation", required=False)
    duration = int(sim.get("duration", 128))
    fs = int(sim.get("fs", 64))
    t0 = _parse_number(sim.get("t0", 0.0), "simulation.t0")
    streams = []
    for i, s in enumerate(doc.get("streams") or []):
        where = f"streams[{i}]"
        if not isinstance(s, dict) or "theta_deg" not in s or "harmonic" not in s:
            raise ConfigError(f"{where} needs 'theta_deg' and 'harmonic'")
        u, bandwidth = _parse_baseband(s.get("baseband") or {}, duration * fs, fs, f"{where}.baseband")
        streams.append(Stream(_parse_number(s["theta_deg"], f"{where}.theta_deg"), int(s["harmonic"]), u, bandwidth))
    fitted = config.fitted()
    scene = Scene(fitted.geometry_, fitted.params_, tuple(streams), duration, fs, t0)
    return scene, config


def format_float(x):
    """Fixed 9-significant-digit rendering used by every output file."""
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".9g")


def rounded(obj):
    """Recursively round floats to 9 significant digits for JSON output.

    Non-finite floats become ``None`` so the document stays valid JSON.
    """
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format(x, ".9g")) if np.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
