"""``consim`` command line: simulate, sweep, frontier and theorem1."""

from __future__ import annotations

import argparse
import io
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, experiments
from .config import ConfigFileError, build_config, dump_config, parse_config
from .netmodel import EndorsementError, GenerationError
from .protocol import ConfigError, DegenerateSecurityError, LivenessError, ZeroIntervalError
from .simulator import simulate

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
RUNTIME_ERRORS = (GenerationError, LivenessError, DegenerateSecurityError, ZeroIntervalError,
                  EndorsementError, experiments.RegimeNotReachedError)
DEFAULT_GRID_C = (0, 25, 50, 100)
DEFAULT_GRID_B = (200, 1000, 2000, 4000)

PLOT_TEMPLATE = '''\
"""Plot throughput against latency from a consim CSV: python {script} {csv}"""
import csv
import sys

import matplotlib.pyplot as plt

rows = list(csv.DictReader(line for line in open(sys.argv[1]) if not line.startswith("#")))
for name in sorted({{r["protocol"] for r in rows}}):
    sel = [r for r in rows if r["protocol"] == name]
    plt.plot([float(r["throughput_tps"]) for r in sel], [float(r["latency_s"]) for r in sel],
             "o-" if name in ("hbft", "poa") else ".", label=name)
front = [r for r in rows if r["on_frontier"] == "1"]
plt.scatter([float(r["throughput_tps"]) for r in front], [float(r["latency_s"]) for r in front],
            facecolors="none", edgecolors="k", s=80, label="frontier")
plt.xlabel("throughput (tx/s)")
plt.ylabel("latency (s)")
plt.legend(fontsize="small")
plt.savefig(sys.argv[1].rsplit(".", 1)[0] + ".png", dpi=150)
'''


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in _num_list(text)]


def _num_list(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:step`` (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ConfigError(f"range must be start:stop:step with step > 0, got {text!r}")
        start, stop, step = parts
        count = int(round((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value or JSON config file")
    common.add_argument("--seed", type=int)
    common.add_argument("-o", "--out", type=Path, help="CSV output path (default: stdout)")
    common.add_argument("--sr", type=int, help="simulation rounds")
    common.add_argument("--tx-size-bytes", type=float)
    common.add_argument("--fork-rate-override", type=float)
    common.add_argument("--tpt-tolerance", type=float, default=0.05)
    common.add_argument("--preset", choices=("hbft", "poa"))
    common.add_argument("--custom", nargs=2, type=int, metavar=("C", "D"))
    common.add_argument("--alpha", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--p", type=float)
    common.add_argument("--delay-factor", type=float)
    common.add_argument("--bandwidth", type=float, help="bytes per second")
    common.add_argument("--block-size", type=int, help="transactions per block")
    common.add_argument("--message-size-bytes", type=float)
    common.add_argument("--security-level", type=float)
    common.add_argument("--dump-config", type=Path, help="write the resolved config here")
    common.add_argument("--plot-template", action="store_true",
                        help="also write a matplotlib script next to the CSV")

    parser = _Parser(prog="consim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"consim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="one simulation")
    sw = sub.add_parser("sweep", parents=[common], help="vary one parameter for hbft and poa")
    sw.add_argument("--variable", choices=experiments.SWEEP_VARIABLES, default="block_size")
    sw.add_argument("--values", default="40:4000:40")
    sw.add_argument("--protocols", default="hbft,poa")
    fr = sub.add_parser("frontier", parents=[common], help="design-space scan with Pareto frontier")
    fr.add_argument("--grid", default="default", help="'default' or 'custom' (use --c-values/--b-sizes)")
    fr.add_argument("--c-values", default=None)
    fr.add_argument("--b-sizes", default=None)
    th = sub.add_parser("theorem1", parents=[common], help="large-block throughput ratio")
    th.add_argument("--large-block-tx", type=int, help="default: smallest block reaching the regime")
    return parser


FLAG_FIELDS = {
    "seed": "seed", "sr": "simulation_rounds", "tx_size_bytes": "tx_size_bytes",
    "fork_rate_override": "fork_rate_override", "alpha": "alpha", "n": "n", "p": "p",
    "delay_factor": "delay_factor", "bandwidth": "bandwidth_bytes_per_s", "block_size": "block_size_tx",
    "message_size_bytes": "message_size_bytes", "security_level": "security_level", "preset": "preset",
}


def resolve_config(args):
    values = {}
    source = "<flags>"
    if args.config is not None:
        if not args.config.exists():
            raise ConfigFileError(f"config file not found: {args.config}")
        source = str(args.config)
        values = parse_config(args.config.read_text(), source)
    for attr, key in FLAG_FIELDS.items():
        value = getattr(args, attr, None)
        if value is not None:
            values[key] = value
    if args.custom is not None:
        values.update(preset="custom", committee_size=args.custom[0], endorsement_size=args.custom[1])
    return build_config(values, source)


def _recorded_argv(argv):
    # the output location does not affect results, so it stays out of the file
    kept, skip = [], False
    for arg in argv:
        if skip:
            skip = False
        elif arg in ("-o", "--out", "--dump-config"):
            skip = True
        elif not arg.startswith(("--out=", "--dump-config=")):
            kept.append(arg)
    return kept


def _header(command, argv, config, extra=()):
    lines = [f"consim {__version__} {command}", "argv: " + " ".join(_recorded_argv(argv)),
             f"seed: {config.seed}",
             "resolved config:"]
    lines += ["  " + line for line in dump_config(config).splitlines()]
    return lines + list(extra)


def _emit(args, text: str, summary: list[str]) -> None:
    if args.out is None:
        sys.stdout.write(text)
        print("\n".join(summary), file=sys.stderr)
        return
    args.out.write_text(text)
    if args.plot_template:
        script = args.out.with_suffix(".plot.py")
        script.write_text(PLOT_TEMPLATE.format(script=script.name, csv=args.out.name))
    print("\n".join(summary))


def _describe(pt) -> str:
    r = pt.rates
    return (f"{pt.protocol_name:>8} C={pt.config_echo[0]} d={pt.config_echo[1]} B={pt.config_echo[2]}: "
            f"T={pt.throughput:.6g} tx/s L={pt.latency:.6g} s K={r.confirmation_number} "
            f"F={r.fork_rate:.6g} Brate={r.block_rate:.6g} Crate={r.committee_rate:.3g} "
            f"interval={pt.mean_interval:.6g} s")


def cmd_simulate(args, argv, config):
    pt = simulate(config)
    buf = io.StringIO()
    experiments.write_csv(buf, [pt], on_frontier=[0], header_lines=_header("simulate", argv, config))
    _emit(args, buf.getvalue(), [_describe(pt)])


def cmd_sweep(args, argv, config):
    values = _num_list(args.values)
    if args.variable in ("block_size", "n"):
        values = [int(round(v)) for v in values]
    protocols = tuple(p.strip() for p in args.protocols.split(",") if p.strip())
    spec = experiments.SweepSpec(config, args.variable, tuple(values), protocols)
    curve = experiments.run_sweep(spec)
    points, marks = [], []
    for cp in curve:
        objectives = [experiments.ObjectivePoint.from_performance(p.throughput, p.latency)
                      for p in cp.points]
        front = set(experiments.pareto_frontier(objectives))
        for j, p in enumerate(cp.points):
            if j in front:
                marks.append(len(points))
            points.append(p)
    summary = [f"sweep {args.variable} over {len(values)} values, protocols {','.join(protocols)}"]
    if args.variable == "block_size" and len(values) >= 3:
        for name in protocols:
            series = [(cp.points[protocols.index(name)].throughput, cp.points[protocols.index(name)].latency)
                      for cp in curve]
            try:
                idx = experiments.turning_point(series, args.tpt_tolerance)
                summary.append(f"turning point {name}: B_size={values[idx]} T={series[idx][0]:.6g} "
                               f"L={series[idx][1]:.6g}")
            except experiments.NoKneeError:
                summary.append(f"turning point {name}: none within tolerance {args.tpt_tolerance}")
    extra = [f"sweep: variable={args.variable} values={','.join(map(str, values))} "
             f"protocols={','.join(protocols)} tpt_tolerance={args.tpt_tolerance}"]
    buf = io.StringIO()
    experiments.write_csv(buf, points, marks, _header("sweep", argv, config, extra))
    _emit(args, buf.getvalue(), summary)


def cmd_frontier(args, argv, config):
    if args.grid not in ("default", "custom"):
        raise ConfigError(f"--grid must be 'default' or 'custom', got {args.grid!r}")
    c_values = _int_list(args.c_values) if args.c_values else list(DEFAULT_GRID_C)
    b_sizes = _int_list(args.b_sizes) if args.b_sizes else list(DEFAULT_GRID_B)
    c_values = [c for c in c_values if c <= config.n - 1] if args.c_values is None else c_values
    result = experiments.design_space_scan(config, c_values, b_sizes)
    extra = [f"frontier: C={','.join(map(str, c_values))} B_size={','.join(map(str, b_sizes))} d_rule=default"]
    buf = io.StringIO()
    experiments.write_csv(buf, result.points, result.frontier, _header("frontier", argv, config, extra))
    summary = [f"{len(result.points)} designs, {len(result.frontier)} on the frontier"]
    summary += [_describe(result.points[i]) for i in result.frontier]
    _emit(args, buf.getvalue(), summary)


def cmd_theorem1(args, argv, config):
    large = args.large_block_tx or experiments.regime_block_size(config)
    ratio = experiments.theorem1_ratio(config, large)
    shared = replace(config.protocol, block_size_tx=large)
    pts = [simulate(replace(config, protocol=experiments.protocol_for(name, shared, config.n)))
           for name in ("hbft", "poa")]
    expected = 1.0 - config.protocol.byzantine_ratio
    extra = [f"theorem1: large_block_tx={large} ratio={ratio:.9g} expected={expected:.9g}"]
    buf = io.StringIO()
    experiments.write_csv(buf, pts, [], _header("theorem1", argv, config, extra))
    _emit(args, buf.getvalue(), [f"B_size={large}: T(poa)/T(hbft) = {ratio:.6g} (limit {expected:.6g}, "
                                 f"rel. diff {abs(ratio - expected) / expected:.3%})"])


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "frontier": cmd_frontier, "theorem1": cmd_theorem1}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args)
        if args.dump_config is not None:
            args.dump_config.write_text(dump_config(config))
        COMMANDS[args.command](args, argv, config)
    except ConfigError as exc:
        print(f"consim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RUNTIME_ERRORS as exc:
        print(f"consim: simulation error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"consim: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
