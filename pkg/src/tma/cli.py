"""``tma`` command line: pattern | metrics | simulate | compare.

Exit codes: 0 success, 2 configuration error, 3 numeric error.
"""

import argparse
import json
import sys

import numpy as np

from .config import ConfigError, format_float, load_config, load_scene, rounded
from .metrics import angle_grid
from .timesim import demux, link_metrics, synthesize_received, write_series

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _apply_overrides(config, args):
    if getattr(args, "angle_step", None) is not None:
        config.angle_step = args.angle_step
    if getattr(args, "harmonics", None) is not None:
        config.harmonics = args.harmonics
    if getattr(args, "directivity_mode", None) is not None:
        config.directivity_mode = args.directivity_mode
    return config


def pattern_csv(config, normalize="global"):
    """CSV text with one row per (harmonic, angle), harmonics then angles ascending."""
    bf = config.fitted()
    theta = angle_grid(config.angle_step)
    db = bf.power_pattern_db(theta, normalize=normalize)
    lines = ["theta_deg,q,power_db"]
    for j, q in enumerate(bf.output_harmonics_):
        for th, v in zip(theta, db[:, j]):
            lines.append(f"{format_float(th)},{q},{format_float(v)}")
    return "\n".join(lines) + "\n"


def metrics_document(config):
    bf = config.fitted()
    report = bf.report(config.angle_step, config.integration_points).to_dict()
    if config.directivity_mode != "both":
        for beam in report["beams"]:
            beam["directivity_dbi"] = {config.directivity_mode: beam["directivity_dbi"][config.directivity_mode]}
    report["architecture"] = config.architecture
    report["n_elements"] = config.n_elements
    report["spacing"] = config.spacing
    report["harmonic_band_limit"] = config.harmonics
    return rounded(report)


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def simulate_document(scene):
    series = synthesize_received(scene)
    harmonics = sorted({s.harmonic for s in scene.streams})
    recovered = demux(series, scene.fs, harmonics, scene.bandwidth, scene.t0) if harmonics else {}
    report = link_metrics(scene, recovered, series).to_dict()
    report["fs"] = scene.fs
    report["duration"] = scene.duration
    return rounded(report), series


ORDER = ("ssb", "swc", "rect")


def compare_rows(configs):
    first = configs[0]
    angles = sorted(b["theta_deg"] for b in first.beams)
    for c in configs[1:]:
        if (c.n_elements, c.spacing) != (first.n_elements, first.spacing):
            raise ConfigError(f"{c.name}: geometry differs from {first.name}")
        if sorted(b["theta_deg"] for b in c.beams) != angles:
            raise ConfigError(f"{c.name}: beam directions differ from {first.name}")
    rows = []
    for c in configs:
        bf = c.fitted()
        report = bf.report(c.angle_step, c.integration_points)
        beam = report.beams[0]
        rows.append(
            {
                "config": c.name,
                "architecture": c.architecture,
                "eta": report.eta,
                "beam_a_q": beam["q"],
                "peak_deg": beam["peak_deg"],
                "directivity_pattern_dbi": beam["directivity_dbi"]["pattern"],
                "directivity_total_dbi": beam["directivity_dbi"]["total"],
                "sll_db": beam["sll_db"],
            }
        )
    return rows


def ordering_holds(rows):
    """Total-power directivity ordering ssb >= swc >= rect among the architectures present."""
    best = {}
    for r in rows:
        best[r["architecture"]] = max(best.get(r["architecture"], -np.inf), r["directivity_total_dbi"])
    present = [best[a] for a in ORDER if a in best]
    return all(a >= b for a, b in zip(present, present[1:]))


COMPARE_COLUMNS = (
    "config",
    "architecture",
    "eta",
    "beam_a_q",
    "peak_deg",
    "directivity_pattern_dbi",
    "directivity_total_dbi",
    "sll_db",
)


def _cell(v):
    if v is None:
        return "NA"
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def compare_table(rows):
    cells = [list(COMPARE_COLUMNS)] + [[_cell(r[c]) for c in COMPARE_COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(COMPARE_COLUMNS))]
    text = ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    verdict = "OK" if ordering_holds(rows) else "VIOLATED"
    text.append(f"ordering total-power directivity ssb >= swc >= rect: {verdict}")
    return "\n".join(text) + "\n"


def compare_csv(rows):
    lines = [",".join(COMPARE_COLUMNS)]
    lines += [",".join(_cell(r[c]) for c in COMPARE_COLUMNS) for r in rows]
    return "\n".join(lines) + "\n"


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_pattern(args):
    config = _apply_overrides(load_config(args.config), args)
    _write_text(args.out, pattern_csv(config, args.normalize))


def cmd_metrics(args):
    config = _apply_overrides(load_config(args.config), args)
    _write_text(args.out, dumps(metrics_document(config)))


def cmd_simulate(args):
    scene, _ = load_scene(args.scene)
    doc, series = simulate_document(scene)
    _write_text(f"{args.out}.json", dumps(doc))
    if args.dump_series:
        write_series(f"{args.out}.bin", series, scene.fs)


def cmd_compare(args):
    if not 2 <= len(args.config) <= 3:
        raise ConfigError("compare takes two or three --config files")
    configs = [_apply_overrides(load_config(p), args) for p in args.config]
    rows = compare_rows(configs)
    sys.stdout.write(compare_table(rows))
    if args.out:
        _write_text(args.out, compare_csv(rows))


def build_parser():
    parser = argparse.ArgumentParser(prog="tma", description="Time-modulated array harmonic beamforming")
    sub = parser.add_subparsers(dest="command", required=True)

    def analysis_flags(p):
        p.add_argument("--angle-step", type=float, help="angle grid step in degrees (default 0.1)")
        p.add_argument("--harmonics", type=int, help="harmonic band limit Q (default 50)")
        p.add_argument("--directivity-mode", choices=("pattern", "total", "both"))

    p = sub.add_parser("pattern", help="write harmonic power patterns as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--normalize", choices=("global", "self"), default="global")
    analysis_flags(p)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("metrics", help="print efficiency, directivity and lobe metrics as JSON")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="-")
    analysis_flags(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="run the sample-level receiver simulation of a scene")
    p.add_argument("--scene", "--config", dest="scene", required=True)
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.json (and PREFIX.bin)")
    p.add_argument("--dump-series", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="side-by-side metrics of 2-3 configurations")
    p.add_argument("--config", action="append", required=True)
    p.add_argument("--out", help="also write the table as CSV")
    analysis_flags(p)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ArithmeticError as exc:
        print(f"tma: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"tma: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
