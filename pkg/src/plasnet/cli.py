"""Command-line front end: spectra, arm response, protocol runs, sweeps, validity.

All numeric output is CSV (or flat ``key = value`` reports) with fixed
formatting, so identical invocations produce byte-identical files.  A
``key = value`` config file can preset any common flag; explicit flags
win.  Exit codes: 0 ok, 1 error, 2 validity warning.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .arm import ArmConfig, arm_spectrum
from .entangle import InitAmplitudes, run_protocol
from .errors import SimulationError
from .model import BRANCHES, NetworkConfig, QDConfig, build_network
from .scattering import solve_scattering
from .validity import (
    WEAK_EXCITATION_THRESHOLD,
    CheckItem,
    weak_coupling_check,
    weak_excitation_margin,
)

FLOAT_FMT = "{:.15g}"
THREADS_ENV = "PLASNET_THREADS"

_SWEEP_PARAMS = (
    "alpha", "g_inout", "gamma0", "n", "delta0", "ddelta", "kappa", "dw", "j", "gamma_qd",
)
_T_METRIC = re.compile(r"^(t2?)_(s[12])(s[12]|d[12])_(gg|gm|mg|mm)$")


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit 1 (2 is reserved for warnings)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x) + 0.0)  # + 0.0 folds -0.0 into 0


def parse_range(text: str) -> np.ndarray:
    """Inclusive grid ``start:stop:steps``; ``x:x:1`` is a single point."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad range {text!r}: {exc}") from None
    if steps < 1 or (steps == 1 and start != stop):
        raise argparse.ArgumentTypeError(
            f"bad range {text!r}: need steps >= 2, or start == stop with steps = 1"
        )
    return np.linspace(start, stop, steps)


def parse_complex_amp(text: str) -> complex:
    """Complex flag value: ``re,im`` pair or bare magnitude."""
    try:
        if "," in text:
            re_part, im_part = text.split(",")
            return complex(float(re_part), float(im_part))
        return complex(float(text), 0.0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex value {text!r}") from None


def parse_init(text: str) -> InitAmplitudes:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--init needs c_g1,c_m1,c_g2,c_m2")
    try:
        c = [complex(p) for p in parts]
        return InitAmplitudes(*c)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --init value {text!r}: {exc}") from None


def parse_scalar_dw(text: str) -> float:
    """Detuning for single-point commands: a float or a degenerate range."""
    if ":" in text:
        grid = parse_range(text)
        if grid.size != 1:
            raise argparse.ArgumentTypeError("this command takes a single detuning point")
        return float(grid[0])
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad detuning {text!r}") from None


def load_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SimulationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


# Common physical flags: (dest, flag, file/flag value parser, default).
_COMMON = [
    ("n", "--n", int, 2),
    ("g_inout", "--g-inout", float, 0.5),
    ("gamma0", "--gamma0", float, 0.1),
    ("j", "--j", float, 0.3),
    ("gamma_qd", "--gamma-qd", float, 0.001),
    ("delta0", "--delta0", float, 0.0),
    ("ddelta", "--ddelta", float, 0.0),
    ("alpha", "--alpha", parse_complex_amp, complex(0.5)),
    ("kappa", "--kappa", float, 1.0),
    ("init", "--init", parse_init, InitAmplitudes.equal_superposition()),
    ("insertion", "--insertion", float, 1.0),
    ("omega0_over_gnp", "--omega0-over-gnp", float, None),
]


def _add_common(sub: argparse.ArgumentParser) -> None:
    for _, flag, _, _ in _COMMON:
        sub.add_argument(flag, type=str, default=None)
    sub.add_argument("--config", type=str, default=None, help="key = value preset file")
    sub.add_argument("--out", type=str, default=None, help="CSV output path (default stdout)")


def _merge_params(args: argparse.Namespace) -> dict:
    """Resolve common parameters: defaults < config file < explicit flags."""
    file_values = load_config_file(args.config) if args.config else {}
    params = {}
    for dest, _, parser, default in _COMMON:
        raw = getattr(args, dest)
        if raw is None:
            raw = file_values.get(dest)
        if raw is None:
            params[dest] = default
        else:
            try:
                params[dest] = parser(raw)
            except argparse.ArgumentTypeError as exc:
                raise SimulationError(f"bad value for {dest}: {exc}") from None
    return params


def make_network_config(params: dict) -> NetworkConfig:
    delta1 = params["delta0"] + params["ddelta"]
    delta2 = params["delta0"] - params["ddelta"]
    return NetworkConfig(
        n=int(params["n"]),
        g_inout=params["g_inout"],
        gamma0=params["gamma0"],
        qd1=QDConfig(J=params["j"], gamma=params["gamma_qd"], delta=delta1),
        qd2=QDConfig(J=params["j"], gamma=params["gamma_qd"], delta=delta2),
        omega0_over_gnp=params["omega0_over_gnp"],
    )


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    count = _thread_count()
    if count <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=count) as pool:
        return list(pool.map(fn, items))


def write_csv(header: list[str], rows: list[list[str]], out: str | None) -> None:
    text = "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------- spectrum

def cmd_spectrum(args: argparse.Namespace) -> int:
    params = _merge_params(args)
    branch = args.qd1 + args.qd2
    net = build_network(make_network_config(params))
    grid = parse_range(args.dw)
    pairs = [("s1", "s1"), ("s1", "s2"), ("s1", "d1"), ("s1", "d2")]
    if args.include_s2:
        pairs += [("s2", "s1"), ("s2", "s2"), ("s2", "d1"), ("s2", "d2")]
    header = ["dw"] + [f"t_{a}{b}_abs2" for a, b in pairs]

    def point(dw: float) -> list[str]:
        s = solve_scattering(net, branch, float(dw))
        return [_fmt(dw)] + [_fmt(abs(s.amp(a, b)) ** 2) for a, b in pairs]

    write_csv(header, _map_ordered(point, [float(x) for x in grid]), args.out)
    return 0


# ---------------------------------------------------------------- dir (single arm)

def cmd_dir(args: argparse.Namespace) -> int:
    params = _merge_params(args)
    qd = QDConfig(
        J=params["j"],
        gamma=params["gamma_qd"],
        delta=args.delta,
        coupled=args.qd == "g",
    )
    cfg = ArmConfig(n=args.arm_n, g_inout=params["g_inout"], gamma0=params["gamma0"], qd=qd)
    points = arm_spectrum(cfg, parse_range(args.dw))
    header = ["dw", "transmission", "reflection", "absorption", "dipole_loss"]
    rows = [
        [_fmt(p.dw), _fmt(p.transmission), _fmt(p.reflection), _fmt(p.absorption), _fmt(p.dipole_loss)]
        for p in points
    ]
    write_csv(header, rows, args.out)
    return 0


# ---------------------------------------------------------------- entangle

def _protocol_at(params: dict):
    return run_protocol(
        make_network_config(params),
        params["alpha"],
        init=params["init"],
        kappa=params["kappa"],
        dw=params["dw"],
        insertion=params["insertion"],
    )


def cmd_entangle(args: argparse.Namespace) -> int:
    params = _merge_params(args)
    params["dw"] = parse_scalar_dw(args.dw) if args.dw is not None else 0.0

    if args.sweep is not None:
        name, _, spec = args.sweep.partition("=")
        grid = _axis_grid(name.strip(), spec)
        header = [name.strip(), "fidelity", "efficiency", "concurrence_lb", "beta_re", "beta_im"]

        def point(value) -> list[str]:
            p = dict(params)
            _apply_axis(p, name.strip(), value)
            res = _protocol_at(p)
            return [
                _fmt(value), _fmt(res.fidelity), _fmt(res.efficiency),
                _fmt(res.concurrence_lb), _fmt(res.beta.real), _fmt(res.beta.imag),
            ]

        write_csv(header, _map_ordered(point, list(grid)), args.out)
        return 0

    res = _protocol_at(params)
    lines = [
        f"alpha_re = {_fmt(params['alpha'].real)}",
        f"alpha_im = {_fmt(params['alpha'].imag)}",
        f"beta_re = {_fmt(res.beta.real)}",
        f"beta_im = {_fmt(res.beta.imag)}",
        f"fidelity = {_fmt(res.fidelity)}",
        f"efficiency = {_fmt(res.efficiency)}",
        f"concurrence_lower_bound = {_fmt(res.concurrence_lb)}",
    ]
    for i, p in enumerate(BRANCHES):
        for j, q in enumerate(BRANCHES):
            lines.append(f"rho_{p}_{q}_re = {_fmt(res.rho[i, j].real)}")
            lines.append(f"rho_{p}_{q}_im = {_fmt(res.rho[i, j].imag)}")
    print("\n".join(lines))
    return 0


# ---------------------------------------------------------------- sweep

def _axis_grid(name: str, spec: str) -> np.ndarray:
    if name not in _SWEEP_PARAMS:
        raise SimulationError(
            f"unknown sweep parameter {name!r}; choose from {', '.join(_SWEEP_PARAMS)}"
        )
    try:
        grid = parse_range(spec)
    except argparse.ArgumentTypeError as exc:
        raise SimulationError(str(exc)) from None
    if name == "n":
        if not np.allclose(grid, np.round(grid)):
            raise SimulationError("sweep over n needs integer grid values")
        grid = np.round(grid)
    return grid


def _apply_axis(params: dict, name: str, value: float) -> None:
    if name == "n":
        params["n"] = int(round(value))
    elif name == "alpha":
        params["alpha"] = complex(value)
    elif name == "j":
        params["j"] = float(value)
    elif name == "gamma_qd":
        params["gamma_qd"] = float(value)
    elif name == "dw":
        params["dw"] = float(value)
    else:
        params[name] = float(value)


def _metric_columns(metric: str) -> list[str]:
    if metric in ("fidelity", "efficiency", "concurrence_lb", "rho22", "rho33"):
        return [metric]
    if metric in ("beta", "rho23"):
        return [f"{metric}_re", f"{metric}_im"]
    m = _T_METRIC.match(metric)
    if m is None:
        raise SimulationError(f"unknown metric {metric!r}")
    if m.group(1) == "t2":
        return [metric]
    return [f"{metric}_re", f"{metric}_im"]


def _point_values(params: dict, metrics: list[str]) -> list[str]:
    values: list[str] = []
    res = None
    if any(not _T_METRIC.match(m) for m in metrics):
        res = _protocol_at(params)
    sets: dict[str, object] = {}
    net = None
    for metric in metrics:
        m = _T_METRIC.match(metric)
        if m is None:
            if metric == "fidelity":
                values.append(_fmt(res.fidelity))
            elif metric == "efficiency":
                values.append(_fmt(res.efficiency))
            elif metric == "concurrence_lb":
                values.append(_fmt(res.concurrence_lb))
            elif metric == "beta":
                values += [_fmt(res.beta.real), _fmt(res.beta.imag)]
            elif metric == "rho22":
                values.append(_fmt(res.rho[1, 1].real))
            elif metric == "rho33":
                values.append(_fmt(res.rho[2, 2].real))
            elif metric == "rho23":
                values += [_fmt(res.rho[1, 2].real), _fmt(res.rho[1, 2].imag)]
            continue
        kind, src, dst, branch = m.groups()
        if branch not in sets:
            if net is None:
                net = build_network(make_network_config(params))
            sets[branch] = solve_scattering(net, branch, params["dw"])
        amp = sets[branch].amp(src, dst)
        if kind == "t2":
            values.append(_fmt(abs(amp) ** 2))
        else:
            values += [_fmt(amp.real), _fmt(amp.imag)]
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    params = _merge_params(args)
    params["dw"] = parse_scalar_dw(args.dw) if args.dw is not None else 0.0
    if not 1 <= len(args.axis) <= 2:
        raise SimulationError("need one or two --axis arguments")
    axes = []
    for spec in args.axis:
        name, _, rng = spec.partition("=")
        axes.append((name.strip(), _axis_grid(name.strip(), rng)))
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if not metrics:
        raise SimulationError("no metrics requested")
    header = [name for name, _ in axes]
    for metric in metrics:
        header += _metric_columns(metric)

    if len(axes) == 1:
        grid_points = [(v,) for v in axes[0][1]]
    else:
        grid_points = [(u, v) for u in axes[0][1] for v in axes[1][1]]  # row-major

    def point(values) -> list[str]:
        p = dict(params)
        for (name, _), value in zip(axes, values):
            _apply_axis(p, name, value)
        return [_fmt(v) for v in values] + _point_values(p, metrics)

    write_csv(header, _map_ordered(point, grid_points), args.out)
    return 0


# ---------------------------------------------------------------- validate

def cmd_validate(args: argparse.Namespace) -> int:
    params = _merge_params(args)
    config = make_network_config(params)
    items = weak_coupling_check(config)

    for label, delta in (
        ("qd1", params["delta0"] + params["ddelta"]),
        ("qd2", params["delta0"] - params["ddelta"]),
    ):
        name = f"weak_excitation_{label}"
        if args.n_bar is None or args.dtau is None:
            items.append(CheckItem(name, "unchecked"))
            continue
        ratio = weak_excitation_margin(
            params["j"], params["g_inout"], params["gamma0"], delta, args.n_bar, args.dtau
        )
        status = "pass" if ratio >= args.margin_threshold else "fail"
        items.append(CheckItem(name, status, ratio, args.margin_threshold, sense="lower"))

    for item in items:
        line = f"check={item.name} status={item.status}"
        if item.value is not None:
            line += f" value={_fmt(item.value)}"
        if item.bound is not None:
            line += f" bound={_fmt(item.bound)} margin={_fmt(item.margin)}"
        print(line)
    return 2 if any(i.status == "fail" for i in items) else 0


# ---------------------------------------------------------------- entry point

def build_parser() -> _Parser:
    parser = _Parser(prog="plasnet", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[], help="two-arm transition spectra")
    _add_common(p)
    p.add_argument("--qd1", choices=("g", "m"), default="g")
    p.add_argument("--qd2", choices=("g", "m"), default="g")
    p.add_argument("--dw", type=str, default="-3:3:601")
    p.add_argument("--include-s2", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("dir", help="single-arm transmission/reflection/absorption")
    _add_common(p)
    p.add_argument("--arm-n", type=int, default=1, help="particles in the arm (>= 1)")
    p.add_argument("--qd", choices=("g", "m"), default="g")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--dw", type=str, default="-3:3:601")
    p.set_defaults(func=cmd_dir)

    p = sub.add_parser("entangle", help="run the heralded entanglement protocol")
    _add_common(p)
    p.add_argument("--dw", type=str, default=None)
    p.add_argument("--sweep", type=str, default=None, metavar="PARAM=START:STOP:STEPS")
    p.set_defaults(func=cmd_entangle)

    p = sub.add_parser("sweep", help="parameter sweeps over one or two axes")
    _add_common(p)
    p.add_argument("--dw", type=str, default=None)
    p.add_argument("--axis", action="append", default=[], metavar="PARAM=START:STOP:STEPS")
    p.add_argument("--metrics", type=str, default="fidelity,efficiency")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="approximation-regime report")
    _add_common(p)
    p.add_argument("--n-bar", type=float, default=None)
    p.add_argument("--dtau", type=float, default=None)
    p.add_argument("--margin-threshold", type=float, default=WEAK_EXCITATION_THRESHOLD)
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SimulationError as exc:
        print(f"plasnet: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
