"""Experiment harness: config parsing, four subcommands, CSV + figure output.

Subcommands map onto the benchmark experiments: ``integrate`` (single
trajectory with pointwise errors), ``sweep`` (RMSE against stepsize),
``dissipation`` (decay of trajectory maxima), ``structure`` (Jacobian and
degeneracy residuals).  Every run writes a deterministic CSV whose first
comment line carries the fully resolved configuration, plus a PNG rendered
next to it unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Cosine, Harmonic, Potential, State, SystemParams
from .errors import (
    GridMismatchError,
    NonFiniteError,
    NotApplicableError,
    OverdampedError,
)
from .experiments import (
    DEFAULT_H_GROWTH,
    DEFAULT_H_MAX,
    DEFAULT_H_START,
    dissipation_data,
    geometric_grid,
    snap_grid_to_reference,
    steps_for,
    structure_rows,
    sweep_harmonic,
    sweep_nonlinear,
    sweep_results,
)
from .integrators import STEPPERS, get_stepper, integrate
from .reference import HarmonicAnalytic, dho_exact_trajectory, nonlinear_reference

_FLOAT_KEYS = (
    "k",
    "mass",
    "gamma",
    "temperature",
    "q0",
    "p0",
    "s0",
    "h",
    "h-start",
    "h-growth",
    "h-max",
    "tsim",
)
_KNOWN_KEYS = ("method", "potential", "observable", "output", "plot") + _FLOAT_KEYS

COSINE_Q0 = 2.0 * math.pi / 3.0


class ConfigError(Exception):
    """Invalid configuration; carries one message per violated invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment description (flags over file over defaults)."""

    subcommand: str
    methods: tuple
    potential_tag: str
    k: float
    params: SystemParams
    initial: State
    h: float | None
    h_start: float | None
    h_growth: float | None
    h_max: float | None
    tsim: float
    observable: str
    output: Path
    plot: bool

    def potential(self) -> Potential:
        if self.potential_tag == "harmonic":
            return Harmonic(self.k)
        return Cosine(self.k)

    def config_line(self) -> str:
        pairs = [
            ("method", ",".join(self.methods)),
            ("potential", self.potential_tag),
            ("k", _fmt(self.k)),
            ("mass", _fmt(self.params.m)),
            ("gamma", _fmt(self.params.gamma)),
            ("temperature", _fmt(self.params.temperature)),
            ("q0", _fmt(self.initial.q)),
            ("p0", _fmt(self.initial.p)),
            ("s0", _fmt(self.initial.S)),
        ]
        if self.subcommand == "sweep":
            pairs += [
                ("h-start", _fmt(self.h_start)),
                ("h-growth", _fmt(self.h_growth)),
                ("h-max", _fmt(self.h_max)),
            ]
        else:
            pairs.append(("h", _fmt(self.h)))
        pairs += [
            ("tsim", _fmt(self.tsim)),
            ("observable", self.observable),
            ("plot", "true" if self.plot else "false"),
            ("output", str(self.output)),
        ]
        return " ".join(f"{k}={v}" for k, v in pairs)


def _fmt(x) -> str:
    """17-significant-digit formatting; lossless for doubles."""
    return format(float(x), ".17g")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value config file")
    common.add_argument(
        "--method",
        action="append",
        dest="method",
        choices=sorted(STEPPERS),
        help="integration method; may be repeated",
    )
    common.add_argument("--potential", choices=("harmonic", "cosine"))
    common.add_argument("--k", type=float, help="potential strength")
    common.add_argument("--mass", type=float)
    common.add_argument("--gamma", type=float, help="damping rate")
    common.add_argument("--temperature", type=float)
    common.add_argument("--q0", type=float)
    common.add_argument("--p0", type=float)
    common.add_argument("--s0", type=float)
    common.add_argument("--h", type=float, help="stepsize (single-h subcommands)")
    common.add_argument("--h-start", type=float, help="sweep grid start")
    common.add_argument("--h-growth", type=float, help="sweep grid growth factor")
    common.add_argument("--h-max", type=float, help="sweep grid upper bound")
    common.add_argument("--tsim", type=float, help="simulation length")
    common.add_argument("--observable", choices=("q", "p"))
    common.add_argument("--output", type=Path, help="CSV output path")
    common.add_argument(
        "--plot",
        action=argparse.BooleanOptionalAction,
        help="render a PNG next to the CSV (default: on)",
    )
    parser = argparse.ArgumentParser(
        prog="generic-integrate",
        description="Experiments with structure-preserving integrators for a "
        "linearly damped particle coupled to a thermal bath.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("integrate", parents=[common], help="single trajectory CSV")
    sub.add_parser("sweep", parents=[common], help="RMSE against stepsize")
    sub.add_parser("dissipation", parents=[common], help="decay of local maxima")
    sub.add_parser("structure", parents=[common], help="structure residual report")
    return parser


def _read_config_file(path: Path) -> dict:
    values = {}
    errors = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            errors.append(f"{path}:{lineno}: expected key=value, got {line!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _KNOWN_KEYS:
            errors.append(f"{path}:{lineno}: unknown key {key!r}")
            continue
        values[key] = value.strip()
    if errors:
        raise ConfigError(errors)
    return values


def _coerce_file_values(values: dict) -> dict:
    out = {}
    errors = []
    for key, value in values.items():
        if key in _FLOAT_KEYS:
            try:
                out[key] = float(value)
            except ValueError:
                errors.append(f"config file key {key}: not a number: {value!r}")
        elif key == "method":
            out[key] = tuple(m.strip() for m in value.split(",") if m.strip())
        elif key == "plot":
            if value.lower() in ("true", "1", "yes"):
                out[key] = True
            elif value.lower() in ("false", "0", "no"):
                out[key] = False
            else:
                errors.append(f"config file key plot: expected true/false, got {value!r}")
        elif key == "output":
            out[key] = Path(value)
        else:
            out[key] = value
    if errors:
        raise ConfigError(errors)
    return out


def _default_methods(subcommand: str, potential: str) -> tuple:
    if subcommand == "integrate":
        return ("ybaby",)
    methods = ("ybaby", "mybaby", "rk3")
    if potential == "harmonic" and subcommand in ("sweep", "structure"):
        methods += ("adg",)
    return methods


def parse_config(args, config_file: Path | None = None):
    """Resolve the configuration: flags over file values over defaults.

    ``args`` is the argv list (without the program name).  Returns the
    resolved ExperimentConfig; raises ConfigError listing every violated
    invariant, and exits with a usage error for unknown flags.
    """
    ns = _build_parser().parse_args(list(args))
    sub = ns.subcommand

    file_path = ns.config if ns.config is not None else config_file
    file_values = _coerce_file_values(_read_config_file(file_path)) if file_path else {}

    def flag(name):
        return getattr(ns, name.replace("-", "_"))

    def resolve(name, default):
        v = flag(name)
        if v is not None:
            return v
        if name in file_values:
            return file_values[name]
        return default

    potential = resolve("potential", "harmonic")
    if potential == "harmonic":
        gamma_d, tsim_d, q0_d = 0.01, 500.0, 1.0
    else:
        gamma_d, tsim_d, q0_d = 0.05, 100.0, COSINE_Q0
    h_default = {"integrate": 0.1, "dissipation": 0.5, "structure": 0.5}.get(sub)

    methods = tuple(resolve("method", _default_methods(sub, potential)))
    k = resolve("k", 1.0)
    mass = resolve("mass", 1.0)
    gamma = resolve("gamma", gamma_d)
    temperature = resolve("temperature", 1.0)
    q0 = resolve("q0", q0_d)
    p0 = resolve("p0", 0.0)
    s0 = resolve("s0", 0.0)
    h = resolve("h", h_default)
    h_start = resolve("h-start", DEFAULT_H_START)
    h_growth = resolve("h-growth", DEFAULT_H_GROWTH)
    h_max = resolve("h-max", DEFAULT_H_MAX)
    tsim = resolve("tsim", tsim_d)
    observable = resolve("observable", "q")
    output = Path(resolve("output", Path(f"{sub}.csv")))
    plot = resolve("plot", True)

    violations = []
    if potential not in ("harmonic", "cosine"):
        violations.append(f"potential must be harmonic or cosine, got {potential!r}")
    if observable not in ("q", "p"):
        violations.append(f"observable must be q or p, got {observable!r}")
    unknown = [m for m in methods if m not in STEPPERS]
    if unknown:
        violations.append(f"unknown methods {unknown}; expected {sorted(STEPPERS)}")
    if not methods:
        violations.append("at least one method is required")
    if "adg" in methods and potential != "harmonic":
        violations.append(
            "method adg is not applicable to the cosine potential: its "
            "closed-form update exists only for the harmonic force"
        )
    if sub == "integrate" and len(methods) != 1:
        violations.append("integrate takes exactly one --method")
    if sub == "sweep":
        if flag("h") is not None or "h" in file_values:
            violations.append("sweep uses --h-start/--h-growth/--h-max, not --h")
        if not h_start > 0:
            violations.append(f"h-start must be positive, got {h_start}")
        if not h_growth > 1:
            violations.append(f"h-growth must exceed 1, got {h_growth}")
        if h_max < h_start:
            violations.append(f"h-max must be >= h-start, got {h_max} < {h_start}")
    else:
        for name in ("h-start", "h-growth", "h-max"):
            if flag(name) is not None or name in file_values:
                violations.append(f"--{name} applies only to the sweep subcommand")
        if h is None or not h > 0:
            violations.append(f"stepsize h must be positive, got {h}")
    if not mass > 0:
        violations.append(f"mass must be positive, got {mass}")
    if not temperature > 0:
        violations.append(f"temperature must be positive, got {temperature}")
    if gamma < 0:
        violations.append(f"gamma must be nonnegative, got {gamma}")
    if not k > 0:
        violations.append(f"k must be positive, got {k}")
    if not tsim > 0:
        violations.append(f"tsim must be positive, got {tsim}")
    for name, value in (("q0", q0), ("p0", p0), ("s0", s0)):
        if not math.isfinite(value):
            violations.append(f"{name} must be finite, got {value}")
    if violations:
        raise ConfigError(violations)

    return ExperimentConfig(
        subcommand=sub,
        methods=methods,
        potential_tag=potential,
        k=float(k),
        params=SystemParams(m=float(mass), gamma=float(gamma), temperature=float(temperature)),
        initial=State(float(q0), float(p0), float(s0)),
        h=None if sub == "sweep" else float(h),
        h_start=float(h_start) if sub == "sweep" else None,
        h_growth=float(h_growth) if sub == "sweep" else None,
        h_max=float(h_max) if sub == "sweep" else None,
        tsim=float(tsim),
        observable=observable,
        output=output,
        plot=bool(plot),
    )


def _write_csv(path: Path, comments, header, rows) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _figure_path(output: Path) -> Path:
    return output.with_suffix(".png")


def cmd_integrate(config: ExperimentConfig) -> int:
    """Run one trajectory and emit (t, q, p, S, E, Etilde[, absErrE, absErrS])."""
    pot = config.potential()
    params = config.params
    h = config.h
    n = steps_for(config.tsim, h)
    traj = integrate(get_stepper(config.methods[0]), config.initial, h, n, params, pot)

    energy = traj.energy_series(params, pot)
    energy_mod = traj.modified_energy_series(params, pot)
    comments = [f"config: {config.config_line()}"]

    err_e = err_s = None
    if config.potential_tag == "harmonic":
        exact = dho_exact_trajectory(
            HarmonicAnalytic(params, config.k, config.initial), h, n
        )
        err_e = np.abs(energy - exact.energy_series(params, pot))
        err_s = np.abs(traj.s - exact.s)
    else:
        try:
            ref = nonlinear_reference(config.initial, params, pot, h, n)
            err_e = np.abs(energy - ref.energy_series(params, pot))
            err_s = np.abs(traj.s - ref.s)
        except GridMismatchError as exc:
            comments.append(f"note: error columns omitted ({exc})")

    header = ["t", "q", "p", "S", "E", "Etilde"]
    if err_e is not None:
        header += ["absErrE", "absErrS"]
    rows = []
    times = traj.times
    for i in range(len(traj)):
        row = [
            _fmt(times[i]),
            _fmt(traj.xs[i, 0]),
            _fmt(traj.xs[i, 1]),
            _fmt(traj.xs[i, 2]),
            _fmt(energy[i]),
            _fmt(energy_mod[i]),
        ]
        if err_e is not None:
            row += [_fmt(err_e[i]), _fmt(err_s[i])]
        rows.append(row)
    _write_csv(config.output, comments, header, rows)

    if config.plot:
        from . import plots

        errors = {"absErrE": err_e, "absErrS": err_s} if err_e is not None else {}
        plots.render_integrate(
            times, {"E": energy, "S": traj.s}, errors, _figure_path(config.output)
        )
    return 0


def cmd_sweep(config: ExperimentConfig) -> int:
    """RMSE of every requested method over the geometric stepsize grid."""
    params = config.params
    grid = geometric_grid(config.h_start, config.h_growth, config.h_max)
    if config.potential_tag == "harmonic":
        cells = sweep_harmonic(
            config.methods, grid, params, config.k, config.initial, config.tsim
        )
    else:
        grid = snap_grid_to_reference(grid)
        cells = sweep_nonlinear(
            config.methods, grid, params, config.potential(), config.initial, config.tsim
        )
    results = sweep_results(cells)

    comments = [
        f"config: {config.config_line()}",
        "h-grid: " + ",".join(_fmt(h) for h in grid),
    ]
    rows = [
        (cell.method, _fmt(cell.h), "" if cell.rmse_energy is None else _fmt(cell.rmse_energy), _fmt(cell.rmse_entropy))
        for cell in sorted(cells, key=lambda c: (c.method, c.h))
    ]
    trailing = [
        "slope: method=%s RMSE_E=%s RMSE_S=%s"
        % (
            res.method,
            "" if res.slope_energy is None else _fmt(res.slope_energy),
            _fmt(res.slope_entropy),
        )
        for res in sorted(results, key=lambda r: r.method)
    ]
    _write_csv(
        config.output,
        comments,
        ["method", "h", "RMSE_E", "RMSE_S"],
        [list(r) for r in rows],
    )
    with config.output.open("a") as f:
        for line in trailing:
            f.write(f"# {line}\n")

    if config.plot:
        from . import plots

        plots.render_sweep(results, _figure_path(config.output))
    return 0


def cmd_dissipation(config: ExperimentConfig) -> int:
    """Decay of local maxima of q or p, with fitted slopes per method."""
    params = config.params
    series, slopes, failures = dissipation_data(
        config.methods,
        params,
        config.potential(),
        config.k if config.potential_tag == "harmonic" else None,
        config.initial,
        config.h,
        config.tsim,
        config.observable,
    )
    comments = [f"config: {config.config_line()}"]
    rows = []
    for name in sorted(series):
        for t, lnu in series[name]:
            rows.append([_fmt(t), _fmt(lnu), name])
    _write_csv(config.output, comments, ["t", "ln_u", "method"], rows)
    with config.output.open("a") as f:
        for name in sorted(slopes):
            f.write(f"# slope: method={name} value={_fmt(slopes[name])}\n")
        for name in sorted(failures):
            f.write(f"# error: method={name} error=TooFewExtrema detail={failures[name]}\n")

    if config.plot:
        from . import plots

        plots.render_dissipation(series, slopes, _figure_path(config.output))
    return 1 if failures else 0


def cmd_structure(config: ExperimentConfig) -> int:
    """Structure residual report per method over sampled trajectory states."""
    reports = structure_rows(
        config.methods,
        config.params,
        config.potential(),
        config.h,
        config.initial,
        config.tsim,
    )
    header = [
        "method",
        "two_form_residual",
        "poisson_b12_residual",
        "poisson_b13_residual",
        "poisson_b23_residual",
        "energy_degeneracy",
        "entropy_degeneracy",
        "modified_degeneracy",
        "rank_residual",
        "entropy_violations",
    ]
    rows = [
        [
            rep.method,
            _fmt(rep.two_form_residual),
            _fmt(rep.b12_residual),
            _fmt(rep.b13_residual),
            _fmt(rep.b23_residual),
            _fmt(rep.energy_degeneracy_residual),
            _fmt(rep.entropy_degeneracy_residual),
            _fmt(rep.modified_degeneracy_residual),
            _fmt(rep.rank_residual),
            str(rep.entropy_violations),
        ]
        for rep in sorted(reports, key=lambda r: r.method)
    ]
    _write_csv(config.output, [f"config: {config.config_line()}"], header, rows)

    if config.plot:
        from . import plots

        plots.render_structure(reports, _figure_path(config.output))
    return 0


_COMMANDS = {
    "integrate": cmd_integrate,
    "sweep": cmd_sweep,
    "dissipation": cmd_dissipation,
    "structure": cmd_structure,
}


def main(argv=None) -> int:
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print("invalid configuration:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  - {violation}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[config.subcommand](config)
    except (
        NonFiniteError,
        NotApplicableError,
        OverdampedError,
        GridMismatchError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
