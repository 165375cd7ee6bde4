"""Quantitative probes: errors, convergence fits, and structure checks.

The Jacobian-based probes measure how a one-step map transports phase-space
area: the determinant of the (q, p) block should contract by exp(-K*h) per
step for a conformal method with rate K, and the three bilinear conditions
B12 = 1, B13 = B23 = 0 characterize preservation of the antisymmetric
structure by the reversible dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    Potential,
    State,
    SystemParams,
    energy_gradient,
    entropy_gradient,
    friction_matrix,
    modified_energy_gradient,
    modified_friction_matrix,
    poisson_matrix,
)
from .errors import (
    DegenerateFitError,
    LengthMismatchError,
    NonFiniteError,
    TooFewExtremaError,
)
from .integrators import Trajectory

JACOBIAN_DELTA = 1e-6


def rmse(approx, exact) -> float:
    """Root-mean-square deviation between paired series.

    Callers pass series that already exclude the initial point; the mean runs
    over all supplied samples.
    """
    a = np.asarray(approx, dtype=float)
    e = np.asarray(exact, dtype=float)
    if a.shape != e.shape:
        raise LengthMismatchError(f"series lengths differ: {a.shape} vs {e.shape}")
    if a.size == 0:
        raise LengthMismatchError("series must contain at least one sample")
    d = a - e
    return float(np.sqrt(np.mean(d * d)))


def convergence_order(points) -> float:
    """Least-squares slope of log(rmse) against log(h)."""
    pts = list(points)
    if len(pts) < 3:
        raise DegenerateFitError(f"need at least 3 points, got {len(pts)}")
    hs = np.array([p[0] for p in pts], dtype=float)
    errs = np.array([p[1] for p in pts], dtype=float)
    if np.any(errs <= 0.0) or np.any(hs <= 0.0):
        raise DegenerateFitError("stepsizes and errors must be positive")
    if len(set(hs.tolist())) != len(hs):
        raise DegenerateFitError("stepsizes must be distinct")
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def fit_slope(points) -> float:
    """Least-squares slope of y against t."""
    pts = list(points)
    ts = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    if len(pts) < 2 or len(set(ts.tolist())) < 2:
        raise DegenerateFitError("need at least 2 distinct abscissae")
    return float(np.polyfit(ts, ys, 1)[0])


def one_step_jacobian(
    stepper,
    state,
    h: float,
    params: SystemParams,
    pot: Potential,
    delta: float = JACOBIAN_DELTA,
) -> np.ndarray:
    """Central-finite-difference Jacobian of the one-step map at ``state``."""
    base = np.asarray(state, dtype=float)
    jac = np.empty((3, 3))
    for j in range(3):
        plus = base.copy()
        minus = base.copy()
        plus[j] += delta
        minus[j] -= delta
        sp = np.asarray(stepper(State(*plus), h, params, pot), dtype=float)
        sm = np.asarray(stepper(State(*minus), h, params, pot), dtype=float)
        if not (np.all(np.isfinite(sp)) and np.all(np.isfinite(sm))):
            raise NonFiniteError(f"perturbed step produced non-finite output at {state}")
        jac[:, j] = (sp - sm) / (2.0 * delta)
    return jac


def poisson_conditions(jacobian: np.ndarray):
    """The three bilinear conditions (B12, B13, B23) of a 3x3 Jacobian.

    Structure preservation for the reversible dynamics requires (1, 0, 0).
    """
    a = jacobian
    b12 = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    b13 = a[0, 0] * a[2, 1] - a[0, 1] * a[2, 0]
    b23 = a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]
    return (float(b12), float(b13), float(b23))


def two_form_decay_residual(
    stepper, state, h: float, params: SystemParams, pot: Potential, expected_rate: float
) -> float:
    """|det of the (q,p) Jacobian block - exp(-expected_rate*h)|."""
    jac = one_step_jacobian(stepper, state, h, params, pot)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    return abs(det - math.exp(-expected_rate * h))


def modified_decay_rate(h: float, params: SystemParams, hessian: float) -> float:
    """Two-form decay rate of the alpha-rescaled splitting, gamma*(1 + h^2 C/(6m))."""
    return params.gamma * (1.0 + h * h * hessian / (6.0 * params.m))


def adg_decay_rate(h: float, params: SystemParams, k: float) -> float:
    """Two-form decay rate of the average-discrete-gradient map for a spring."""
    m, g = params.m, params.gamma
    return -math.log(
        (4.0 * m - 2.0 * m * h * g + h * h * k) / (4.0 * m + 2.0 * m * h * g + h * h * k)
    ) / h


def expected_decay_rate(tag: str, h: float, params: SystemParams, pot: Potential) -> float:
    """Two-form decay rate a method is held to in the structure report.

    mybaby gets the alpha-rescaled rate only when the Hessian is constant;
    methods without their own conformal rate are measured against the damping
    rate itself.
    """
    if tag == "verlet":
        return 0.0
    if tag == "mybaby":
        hessian = pot.hessian_constant()
        if hessian is not None:
            return modified_decay_rate(h, params, hessian)
        return params.gamma
    if tag == "adg":
        hessian = pot.hessian_constant()
        if hessian is not None:
            return adg_decay_rate(h, params, hessian)
        return params.gamma
    return params.gamma


def dissipation_rate_series(trajectory: Trajectory, observable: str = "q"):
    """Log of strict local maxima of q or p, with the times they occur at.

    A sample counts when it strictly exceeds both neighbours; only positive
    maxima are logged since the decay fit works on their logarithm.
    """
    if observable == "q":
        series = trajectory.q
    elif observable == "p":
        series = trajectory.p
    else:
        raise ValueError(f"observable must be 'q' or 'p', got {observable!r}")
    times = trajectory.times
    points = []
    for i in range(1, len(series) - 1):
        v = series[i]
        if series[i - 1] < v and v > series[i + 1] and v > 0.0:
            points.append((float(times[i]), float(math.log(v))))
    if len(points) < 3:
        raise TooFewExtremaError(
            f"found {len(points)} positive local maxima; need at least 3"
        )
    return points


def dissipation_slope(trajectory: Trajectory, observable: str = "q") -> float:
    """Fitted decay slope of the local-maximum logs, first maximum discarded."""
    return fit_slope(dissipation_rate_series(trajectory, observable)[1:])


@dataclass(frozen=True)
class StructureReport:
    """Worst-case structure residuals of a method over a sample of states."""

    method: str
    two_form_residual: float
    b12_residual: float
    b13_residual: float
    b23_residual: float
    energy_degeneracy_residual: float
    entropy_degeneracy_residual: float
    modified_degeneracy_residual: float
    rank_residual: float
    entropy_violations: int


@dataclass(frozen=True)
class SweepResult:
    """RMSE against stepsize for one method, with fitted log-log slopes."""

    method: str
    points: tuple  # (h, rmse_energy, rmse_entropy) with h strictly increasing
    slope_energy: float | None
    slope_entropy: float | None

    def __post_init__(self) -> None:
        hs = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ValueError("stepsizes must be strictly increasing")
        for _, re_, rs_ in self.points:
            if (re_ is not None and re_ < 0) or (rs_ is not None and rs_ < 0):
                raise ValueError("RMSE values must be nonnegative")


def structure_report(
    stepper, params: SystemParams, pot: Potential, h: float, sample_states
) -> StructureReport:
    """Aggregate max residuals of every structure probe over ``sample_states``.

    The three bilinear conditions concern the reversible dynamics, so their
    Jacobians are taken with the damping switched off; all other probes use
    the full parameters.
    """
    states = [State(*s) for s in sample_states]
    if not states:
        raise ValueError("sample_states must be nonempty")
    tag = getattr(stepper, "tag", "custom")
    rate = expected_decay_rate(tag, h, params, pot)
    reversible = replace(params, gamma=0.0)
    lmat = poisson_matrix()

    two_form = 0.0
    b12 = b13 = b23 = 0.0
    deg_e = deg_s = deg_mod = 0.0
    rank_res = 0.0
    violations = 0
    target = math.exp(-rate * h)
    for x in states:
        jac = one_step_jacobian(stepper, x, h, params, pot)
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        two_form = max(two_form, abs(det - target))

        c12, c13, c23 = poisson_conditions(
            one_step_jacobian(stepper, x, h, reversible, pot)
        )
        b12 = max(b12, abs(c12 - 1.0))
        b13 = max(b13, abs(c13))
        b23 = max(b23, abs(c23))

        deg_e = max(
            deg_e,
            float(np.max(np.abs(friction_matrix(x, params) @ energy_gradient(x, params, pot)))),
        )
        deg_s = max(deg_s, float(np.max(np.abs(lmat @ entropy_gradient()))))
        m_mod = modified_friction_matrix(x, h, params, pot)
        deg_mod = max(
            deg_mod,
            float(np.max(np.abs(m_mod @ modified_energy_gradient(x, h, params, pot)))),
        )

        sv = np.linalg.svd(m_mod, compute_uv=False)
        if sv[0] > 0.0:
            rank_res = max(rank_res, float(sv[1] / sv[0]))

        if stepper(x, h, params, pot).S < x.S:
            violations += 1

    return StructureReport(
        method=tag,
        two_form_residual=two_form,
        b12_residual=b12,
        b13_residual=b13,
        b23_residual=b23,
        energy_degeneracy_residual=deg_e,
        entropy_degeneracy_residual=deg_s,
        modified_degeneracy_residual=deg_mod,
        rank_residual=rank_res,
        entropy_violations=violations,
    )
