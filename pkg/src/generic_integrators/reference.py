"""Ground-truth solutions for the two benchmark oscillators.

The damped spring has a closed-form underdamped solution; its entropy follows
from exact energy conservation of the continuous flow.  The cosine oscillator
has no closed form, so a finely resolved trajectory subsampled onto the coarse
grid serves as the reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Harmonic, State, SystemParams, hamiltonian
from .errors import GridMismatchError, OverdampedError
from .integrators import Trajectory, get_stepper, integrate

NONLINEAR_REFERENCE_H = 0.001


@dataclass(frozen=True)
class HarmonicAnalytic:
    """Closed-form damped spring solution for one initial condition.

    Valid only in the underdamped regime k/m > gamma^2/4; the envelope decays
    like exp(-gamma*t/2) while the phase advances with the reduced frequency
    omega = sqrt(k/m - gamma^2/4).
    """

    params: SystemParams
    k: float
    initial: State

    def __post_init__(self) -> None:
        if self.k / self.params.m - 0.25 * self.params.gamma**2 <= 0.0:
            raise OverdampedError(
                f"k/m - gamma^2/4 = "
                f"{self.k / self.params.m - 0.25 * self.params.gamma ** 2} <= 0; "
                "only the underdamped branch is implemented"
            )

    @property
    def omega(self) -> float:
        return math.sqrt(self.k / self.params.m - 0.25 * self.params.gamma**2)

    @property
    def envelope_rate(self) -> float:
        """Decay exponent of the amplitude envelope, gamma/2."""
        return 0.5 * self.params.gamma


def dho_exact_states(times: np.ndarray, ref: HarmonicAnalytic) -> np.ndarray:
    """Exact states at the given times, as an (len(times), 3) array.

    The entropy is recovered from energy conservation,
    S(t) = S0 + (H(0) - H(t)) / T, which is exact for the continuous flow.
    """
    m = ref.params.m
    g = ref.params.gamma
    t_bath = ref.params.temperature
    w = ref.omega
    q0, p0, s0 = ref.initial

    a = q0
    b = (p0 / m + 0.5 * g * q0) / w
    times = np.asarray(times, dtype=float)
    env = np.exp(-0.5 * g * times)
    c = np.cos(w * times)
    s = np.sin(w * times)
    q = env * (a * c + b * s)
    p = m * env * ((b * w - 0.5 * g * a) * c - (a * w + 0.5 * g * b) * s)

    pot = Harmonic(ref.k)
    h0 = hamiltonian(q0, p0, ref.params, pot)
    entropy = s0 + (h0 - (p * p / (2.0 * m) + pot.u(q))) / t_bath
    return np.column_stack([q, p, entropy])


def dho_exact(t: float, ref: HarmonicAnalytic) -> State:
    """Exact state at a single time."""
    row = dho_exact_states(np.array([t]), ref)[0]
    return State(float(row[0]), float(row[1]), float(row[2]))


def dho_exact_trajectory(
    ref: HarmonicAnalytic, h: float, n_steps: int, t0: float = 0.0
) -> Trajectory:
    """Exact solution sampled on the uniform grid t0+ n*h."""
    times = t0 + h * np.arange(n_steps + 1)
    return Trajectory(t0, h, dho_exact_states(times, ref))


def nonlinear_reference(
    initial,
    params: SystemParams,
    pot,
    h_coarse: float,
    n_steps_coarse: int,
    h_ref: float = NONLINEAR_REFERENCE_H,
) -> Trajectory:
    """Finely resolved trajectory subsampled onto the coarse grid.

    The fine run uses the mybaby stepper at ``h_ref``; the coarse stepsize
    must be an integer multiple of ``h_ref`` (within 1e-12) so that the grids
    align exactly and no interpolation error enters the comparison.
    """
    stride = round(h_coarse / h_ref)
    if stride < 1 or abs(h_coarse - stride * h_ref) > 1e-12:
        raise GridMismatchError(
            f"coarse stepsize {h_coarse} is not an integer multiple of "
            f"the reference stepsize {h_ref}"
        )
    fine = integrate(
        get_stepper("mybaby"), initial, h_ref, n_steps_coarse * stride, params, pot
    )
    return Trajectory(fine.t0, h_coarse, fine.xs[::stride].copy())
