"""Reusable experiment drivers shared by the CLI and the acceptance suite.

These functions do the numerical work of the experiment subcommands and
return plain data; CSV and figure emission live in the CLI layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Harmonic, Potential, State, SystemParams
from .diagnostics import (
    StructureReport,
    SweepResult,
    convergence_order,
    dissipation_rate_series,
    fit_slope,
    rmse,
    structure_report,
)
from .errors import TooFewExtremaError
from .integrators import Trajectory, get_stepper, integrate
from .reference import (
    NONLINEAR_REFERENCE_H,
    HarmonicAnalytic,
    dho_exact_trajectory,
)

DEFAULT_H_START = 0.0094
DEFAULT_H_GROWTH = 1.3
DEFAULT_H_MAX = 0.5


def geometric_grid(
    h_start: float = DEFAULT_H_START,
    growth: float = DEFAULT_H_GROWTH,
    h_max: float = DEFAULT_H_MAX,
) -> list[float]:
    """Stepsizes h_start * growth^n, truncated at h_max."""
    grid = []
    h = h_start
    while h <= h_max:
        grid.append(h)
        h *= growth
    return grid


def snap_grid_to_reference(grid, h_ref: float = NONLINEAR_REFERENCE_H) -> list[float]:
    """Round every stepsize to the nearest positive multiple of h_ref.

    The fine-reference comparison needs exactly aligned grids; snapping keeps
    the geometric spacing while making every coarse grid a subset of the fine
    one.  Collisions after rounding are deduplicated.
    """
    snapped = []
    for h in grid:
        stride = max(1, round(h / h_ref))
        v = stride * h_ref
        if not snapped or v > snapped[-1]:
            snapped.append(v)
    return snapped


def steps_for(tsim: float, h: float) -> int:
    """Number of steps covering the simulation length, N = round(tsim/h)."""
    return round(tsim / h)


@dataclass(frozen=True)
class SweepCell:
    """RMSE of one method at one stepsize, plus its entropy bookkeeping."""

    method: str
    h: float
    rmse_energy: float | None  # None where exact conservation voids the comparison
    rmse_entropy: float
    min_entropy_increment: float


def sweep_harmonic(
    methods,
    grid,
    params: SystemParams,
    k: float,
    initial: State,
    tsim: float,
) -> list[SweepCell]:
    """RMSE against the closed-form solution for each (method, stepsize).

    The energy column of the discrete-gradient method is omitted because it
    conserves the total energy to round-off, which voids the comparison.
    """
    pot = Harmonic(k)
    ref = HarmonicAnalytic(params, k, initial)
    cells = []
    for method in methods:
        stepper = get_stepper(method)
        for h in grid:
            n = steps_for(tsim, h)
            traj = integrate(stepper, initial, h, n, params, pot)
            exact = dho_exact_trajectory(ref, h, n)
            r_e = (
                None
                if method == "adg"
                else rmse(
                    traj.energy_series(params, pot)[1:],
                    exact.energy_series(params, pot)[1:],
                )
            )
            r_s = rmse(traj.s[1:], exact.s[1:])
            cells.append(
                SweepCell(method, h, r_e, r_s, float(np.min(np.diff(traj.s))))
            )
    return cells


def sweep_nonlinear(
    methods,
    grid,
    params: SystemParams,
    pot: Potential,
    initial: State,
    tsim: float,
    h_ref: float = NONLINEAR_REFERENCE_H,
) -> list[SweepCell]:
    """RMSE against a finely resolved trajectory for each (method, stepsize).

    Every stepsize must be an integer multiple of h_ref (see
    ``snap_grid_to_reference``).  The fine trajectory is integrated once and
    subsampled per stepsize.
    """
    strides = []
    for h in grid:
        stride = round(h / h_ref)
        if stride < 1 or abs(h - stride * h_ref) > 1e-12:
            raise ValueError(
                f"sweep stepsize {h} is not a multiple of the reference "
                f"stepsize {h_ref}; snap the grid first"
            )
        strides.append(stride)
    n_fine = max(steps_for(tsim, h) * s for h, s in zip(grid, strides))
    fine = integrate(get_stepper("mybaby"), initial, h_ref, n_fine, params, pot)

    cells = []
    for method in methods:
        stepper = get_stepper(method)
        for h, stride in zip(grid, strides):
            n = steps_for(tsim, h)
            traj = integrate(stepper, initial, h, n, params, pot)
            ref = Trajectory(fine.t0, h, fine.xs[::stride][: n + 1].copy())
            r_e = rmse(
                traj.energy_series(params, pot)[1:],
                ref.energy_series(params, pot)[1:],
            )
            r_s = rmse(traj.s[1:], ref.s[1:])
            cells.append(
                SweepCell(method, h, r_e, r_s, float(np.min(np.diff(traj.s))))
            )
    return cells


def sweep_results(cells) -> list[SweepResult]:
    """Group sweep cells by method and fit log-log convergence slopes."""
    by_method: dict[str, list[SweepCell]] = {}
    for cell in cells:
        by_method.setdefault(cell.method, []).append(cell)
    results = []
    for method, method_cells in by_method.items():
        method_cells.sort(key=lambda c: c.h)
        points = tuple((c.h, c.rmse_energy, c.rmse_entropy) for c in method_cells)
        slope_e = (
            None
            if any(c.rmse_energy is None for c in method_cells)
            else convergence_order([(c.h, c.rmse_energy) for c in method_cells])
        )
        slope_s = convergence_order([(c.h, c.rmse_entropy) for c in method_cells])
        results.append(SweepResult(method, points, slope_e, slope_s))
    return results


def dissipation_data(
    methods,
    params: SystemParams,
    pot: Potential,
    k: float | None,
    initial: State,
    h: float,
    tsim: float,
    observable: str = "q",
):
    """Local-maximum decay points and fitted slopes per method.

    For the harmonic potential an ``exact`` entry computed from the closed
    form is appended.  The fit discards the first maximum (transient).
    Methods with too few extrema are reported in the error dict instead.
    """
    n = steps_for(tsim, h)
    series: dict[str, list] = {}
    slopes: dict[str, float] = {}
    failures: dict[str, str] = {}

    trajectories = {
        method: integrate(get_stepper(method), initial, h, n, params, pot)
        for method in methods
    }
    if isinstance(pot, Harmonic) and k is not None:
        trajectories["exact"] = dho_exact_trajectory(
            HarmonicAnalytic(params, k, initial), h, n
        )
    for name, traj in trajectories.items():
        try:
            pts = dissipation_rate_series(traj, observable)
            series[name] = pts
            slopes[name] = fit_slope(pts[1:])
        except TooFewExtremaError as exc:
            failures[name] = str(exc)
    return series, slopes, failures


def structure_rows(
    methods,
    params: SystemParams,
    pot: Potential,
    h: float,
    initial: State,
    tsim: float,
    n_samples: int = 25,
) -> list[StructureReport]:
    """Structure report per method over states sampled from its own trajectory."""
    reports = []
    for method in methods:
        stepper = get_stepper(method)
        traj = integrate(stepper, initial, h, steps_for(tsim, h), params, pot)
        idx = np.linspace(0, len(traj) - 1, num=min(n_samples, len(traj)), dtype=int)
        samples = [traj.state(i) for i in idx]
        reports.append(structure_report(stepper, params, pot, h, samples))
    return reports
