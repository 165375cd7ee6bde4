"""One-step maps for the five integration methods and the trajectory driver.

The two splitting methods sandwich a Verlet core between half-steps of the
exactly solvable damping flow.  ``ybaby_step`` damps with the physical rate;
``mybaby_step`` rescales the rate by the momentum correction alpha(q) so that
the second-order modified energy is conserved by its irreversible flow.  All
steppers share the signature ``(state, h, params, pot) -> State`` and are
deterministic: identical inputs give bitwise-identical outputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Harmonic, Potential, State, SystemParams, generic_rhs, modified_factor
from .errors import NonFiniteError, NotApplicableError


def _verlet_qp(q: float, p: float, h: float, m: float, pot: Potential):
    # kick-drift-kick; shared by verlet/ybaby/mybaby so their gamma=0
    # reductions hold bitwise
    p_half = p + 0.5 * h * pot.force(q)
    q_new = q + h * p_half / m
    p_new = p_half + 0.5 * h * pot.force(q_new)
    return q_new, p_new


def verlet_step(state, h: float, params: SystemParams, pot: Potential) -> State:
    """One Verlet step of the reversible part; the entropy is untouched."""
    q, p, S = state
    q_new, p_new = _verlet_qp(q, p, h, params.m, pot)
    return State(q_new, p_new, S)


def irreversible_flow_exact(state, dt: float, params: SystemParams) -> State:
    """Exact solution of the damping flow over time dt.

    Momentum decays by exp(-gamma*dt) while the dissipated kinetic energy is
    booked into the bath entropy, so the total energy is exactly invariant.
    """
    q, p, S = state
    g = params.gamma
    p_new = math.exp(-g * dt) * p
    S_new = S + p * p * (1.0 - math.exp(-2.0 * g * dt)) / (
        2.0 * params.m * params.temperature
    )
    return State(q, p_new, S_new)


def irreversible_flow_modified(
    state, dt: float, h_outer: float, params: SystemParams, pot: Potential
) -> State:
    """Exact solution of the damping flow with the rate rescaled by alpha(q).

    ``h_outer`` is the stepsize entering alpha; it is frozen together with q
    for the duration of the flow.  The modified energy at ``h_outer`` is
    exactly invariant under this map.
    """
    q, p, S = state
    a = modified_factor(q, h_outer, params, pot)
    g = params.gamma * a
    p_new = math.exp(-g * dt) * p
    S_new = S + p * p * a * (1.0 - math.exp(-2.0 * g * dt)) / (
        2.0 * params.m * params.temperature
    )
    return State(q, p_new, S_new)


def ybaby_step(state, h: float, params: SystemParams, pot: Potential) -> State:
    """One step of the damping-wrapped Verlet splitting.

    Composition: half damping flow, Verlet kick-drift-kick, half damping
    flow.  Each half updates the entropy with the momentum entering it and a
    full step's worth of decay factor, which makes both increments
    nonnegative and the damping flow energy-exact.  At gamma = 0 this reduces
    bitwise to ``verlet_step``.
    """
    q, p, S = state
    m, t = params.m, params.temperature
    g = params.gamma
    decay_half = math.exp(-0.5 * g * h)
    s_factor = (1.0 - math.exp(-g * h)) / (2.0 * m * t)
    p_quarter = decay_half * p
    s_half = S + p * p * s_factor
    q_new, p_three_quarter = _verlet_qp(q, p_quarter, h, m, pot)
    p_new = decay_half * p_three_quarter
    s_new = s_half + p_three_quarter * p_three_quarter * s_factor
    return State(q_new, p_new, s_new)


def mybaby_step(state, h: float, params: SystemParams, pot: Potential) -> State:
    """One step of the splitting with the alpha-rescaled damping flow.

    Identical to ``ybaby_step`` except both damping halves use the rate
    gamma*alpha(q), with alpha evaluated at the entering position: the
    current q for the first half, the updated q for the second.  For a
    potential with vanishing Hessian (alpha = 1) this reduces bitwise to
    ``ybaby_step``.
    """
    q, p, S = state
    m, t = params.m, params.temperature
    g = params.gamma

    a0 = modified_factor(q, h, params, pot)
    g0 = g * a0
    decay0 = math.exp(-0.5 * g0 * h)
    s_factor0 = a0 * (1.0 - math.exp(-g0 * h)) / (2.0 * m * t)
    p_quarter = decay0 * p
    s_half = S + p * p * s_factor0

    q_new, p_three_quarter = _verlet_qp(q, p_quarter, h, m, pot)

    a1 = modified_factor(q_new, h, params, pot)
    g1 = g * a1
    decay1 = math.exp(-0.5 * g1 * h)
    s_factor1 = a1 * (1.0 - math.exp(-g1 * h)) / (2.0 * m * t)
    p_new = decay1 * p_three_quarter
    s_new = s_half + p_three_quarter * p_three_quarter * s_factor1
    return State(q_new, p_new, s_new)


def rk3_map(f: Callable, x, h: float):
    """One explicit third-order Runge-Kutta step of dx/dt = f(x).

    Works on any tuple of floats; f must return a tuple of the same length.
    Stages: k1 = f(x), k2 = f(x + h k1/2), k3 = f(x - h k1 + 2 h k2), update
    x + (h/6)(k1 + 4 k2 + k3).
    """
    k1 = f(x)
    x2 = tuple(xi + 0.5 * h * ki for xi, ki in zip(x, k1))
    k2 = f(x2)
    x3 = tuple(xi - h * k1i + 2.0 * h * k2i for xi, k1i, k2i in zip(x, k1, k2))
    k3 = f(x3)
    return tuple(
        xi + h / 6.0 * (k1i + 4.0 * k2i + k3i)
        for xi, k1i, k2i, k3i in zip(x, k1, k2, k3)
    )


def rk3_step(state, h: float, params: SystemParams, pot: Potential) -> State:
    """One RK3 step of the damped system (autonomous; no explicit time)."""

    def f(x):
        return generic_rhs(x, params, pot)

    q, p, S = rk3_map(f, state, h)
    return State(q, p, S)


def adg_step(state, h: float, params: SystemParams, k: float) -> State:
    """One step of the average-discrete-gradient scheme for a spring force.

    The implicit midpoint update is solved in closed form, after which the
    entropy is advanced with the midpoint momentum; the total energy is
    conserved to round-off.  Only valid for U = k q^2 / 2.
    """
    q, p, S = state
    m, t = params.m, params.temperature
    g = params.gamma
    d = 4.0 * m + 2.0 * m * h * g + h * h * k
    q_new = ((4.0 * m + 2.0 * m * h * g - h * h * k) * q + 4.0 * h * p) / d
    p_new = (-4.0 * m * h * k * q + (4.0 * m - 2.0 * m * h * g - h * h * k) * p) / d
    p_mid = 0.5 * (p + p_new)
    s_new = S + h * g * p_mid * p_mid / (m * t)
    return State(q_new, p_new, s_new)


def _adg_dispatch(state, h: float, params: SystemParams, pot: Potential) -> State:
    if not isinstance(pot, Harmonic):
        raise NotApplicableError(
            "the adg closed form applies only to the harmonic potential; "
            f"got {type(pot).__name__}"
        )
    return adg_step(state, h, params, pot.k)


@dataclass(frozen=True)
class Stepper:
    """A tagged one-step map (state, h, params, pot) -> State."""

    tag: str
    fn: Callable

    def __call__(self, state, h: float, params: SystemParams, pot: Potential) -> State:
        return self.fn(state, h, params, pot)


STEPPERS: dict[str, Stepper] = {
    s.tag: s
    for s in (
        Stepper("verlet", verlet_step),
        Stepper("ybaby", ybaby_step),
        Stepper("mybaby", mybaby_step),
        Stepper("rk3", rk3_step),
        Stepper("adg", _adg_dispatch),
    )
}


def get_stepper(tag: str) -> Stepper:
    try:
        return STEPPERS[tag]
    except KeyError:
        raise ValueError(
            f"unknown method {tag!r}; expected one of {sorted(STEPPERS)}"
        ) from None


@dataclass(frozen=True)
class Trajectory:
    """States on the uniform grid t_n = t0 + n*h, stored as an (N+1, 3) array."""

    t0: float
    h: float
    xs: np.ndarray

    def __len__(self) -> int:
        return self.xs.shape[0]

    @property
    def n_steps(self) -> int:
        return self.xs.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.xs.shape[0])

    @property
    def q(self) -> np.ndarray:
        return self.xs[:, 0]

    @property
    def p(self) -> np.ndarray:
        return self.xs[:, 1]

    @property
    def s(self) -> np.ndarray:
        return self.xs[:, 2]

    def state(self, i: int) -> State:
        return State(*self.xs[i])

    def energy_series(self, params: SystemParams, pot: Potential) -> np.ndarray:
        q, p, s = self.q, self.p, self.s
        return p * p / (2.0 * params.m) + pot.u(q) + params.temperature * s

    def modified_energy_series(
        self, params: SystemParams, pot: Potential, h: float | None = None
    ) -> np.ndarray:
        hh = self.h if h is None else h
        q, p, s = self.q, self.p, self.s
        m = params.m
        du = pot.du(q)
        corr = pot.d2u(q) * p * p / (12.0 * m * m) - du * du / (24.0 * m)
        return p * p / (2.0 * m) + pot.u(q) + params.temperature * s + hh * hh * corr

    def subsample(self, stride: int) -> "Trajectory":
        return Trajectory(self.t0, self.h * stride, self.xs[::stride].copy())


def integrate(
    stepper,
    state0,
    h: float,
    n_steps: int,
    params: SystemParams,
    pot: Potential,
    t0: float = 0.0,
) -> Trajectory:
    """Apply ``stepper`` repeatedly from ``state0`` and record every state.

    Raises NonFiniteError as soon as any component stops being finite, which
    signals instability at too large a stepsize rather than emitting garbage.
    """
    xs = np.empty((n_steps + 1, 3))
    xs[0] = state0
    state = State(*state0)
    for n in range(n_steps):
        state = stepper(state, h, params, pot)
        if not (
            math.isfinite(state.q) and math.isfinite(state.p) and math.isfinite(state.S)
        ):
            raise NonFiniteError(
                f"non-finite state at step {n + 1} of {n_steps} (h={h}); "
                f"last finite state {State(*xs[n])}"
            )
        xs[n + 1] = state
    return Trajectory(t0, h, xs)
