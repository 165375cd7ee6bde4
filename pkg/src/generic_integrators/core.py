"""Domain types, energies, and the GENERIC matrices of a linearly damped particle.

The system couples a one-dimensional particle (position q, momentum p) to a
thermal bath through its entropy S.  Everything here is a pure function of its
inputs; matrices are small dense numpy arrays, scalars are plain floats.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class State(NamedTuple):
    """Phase-space point (position, momentum, bath entropy)."""

    q: float
    p: float
    S: float


@dataclass(frozen=True)
class SystemParams:
    """Physical constants: particle mass, damping rate, bath temperature.

    The bath temperature is named ``temperature`` rather than ``T`` to avoid
    clashing with simulation lengths in experiment configurations.
    """

    m: float = 1.0
    gamma: float = 0.0
    temperature: float = 1.0

    def __post_init__(self) -> None:
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if self.gamma < 0:
            raise ValueError(f"damping rate must be nonnegative, got {self.gamma}")


class Potential(ABC):
    """One-dimensional potential with analytic derivatives up to third order.

    Implementations must be polymorphic over scalars and numpy arrays.  The
    third derivative is supplied analytically so that structure checks of the
    modified dynamics are free of finite-difference noise.
    """

    @abstractmethod
    def u(self, q):
        """Potential energy U(q)."""

    @abstractmethod
    def du(self, q):
        """First derivative U'(q)."""

    @abstractmethod
    def d2u(self, q):
        """Second derivative U''(q)."""

    @abstractmethod
    def d3u(self, q):
        """Third derivative U'''(q)."""

    def force(self, q):
        """Force F(q) = -U'(q)."""
        return -self.du(q)

    def hessian_constant(self) -> float | None:
        """The constant value of U'' if the Hessian is constant, else None."""
        return None


@dataclass(frozen=True)
class Harmonic(Potential):
    """Spring potential U(q) = k q^2 / 2."""

    k: float = 1.0

    def u(self, q):
        return 0.5 * self.k * q * q

    def du(self, q):
        return self.k * q

    def d2u(self, q):
        return self.k + 0.0 * q

    def d3u(self, q):
        return 0.0 * q

    def hessian_constant(self) -> float | None:
        return self.k


@dataclass(frozen=True)
class Cosine(Potential):
    """Pendulum-like potential U(q) = -k cos(q)."""

    k: float = 1.0

    def u(self, q):
        return -self.k * np.cos(q)

    def du(self, q):
        return self.k * np.sin(q)

    def d2u(self, q):
        return self.k * np.cos(q)

    def d3u(self, q):
        return -self.k * np.sin(q)


def hamiltonian(q: float, p: float, params: SystemParams, pot: Potential) -> float:
    """Particle energy p^2/(2m) + U(q)."""
    return p * p / (2.0 * params.m) + pot.u(q)


def total_energy(state, params: SystemParams, pot: Potential) -> float:
    """Total energy of particle plus bath, E = p^2/(2m) + U(q) + T*S."""
    q, p, S = state
    return p * p / (2.0 * params.m) + pot.u(q) + params.temperature * S


def modified_factor(q: float, h: float, params: SystemParams, pot: Potential) -> float:
    """Stepsize-dependent momentum correction alpha(q) = 1 + h^2 U''(q) / (6m)."""
    return 1.0 + h * h * pot.d2u(q) / (6.0 * params.m)


def modified_energy(state, h: float, params: SystemParams, pot: Potential) -> float:
    """Second-order modified energy conserved (up to O(h^4)) by the split methods.

    E + h^2 * ( U''(q) p^2 / (12 m^2) - U'(q)^2 / (24 m) ); reduces to the
    total energy at h = 0.
    """
    q, p, S = state
    m = params.m
    du = pot.du(q)
    corr = pot.d2u(q) * p * p / (12.0 * m * m) - du * du / (24.0 * m)
    return p * p / (2.0 * m) + pot.u(q) + params.temperature * S + h * h * corr


def energy_gradient(state, params: SystemParams, pot: Potential) -> np.ndarray:
    """Closed-form gradient of the total energy, (U'(q), p/m, T)."""
    q, p, _ = state
    return np.array([pot.du(q), p / params.m, params.temperature])


def modified_energy_gradient(
    state, h: float, params: SystemParams, pot: Potential
) -> np.ndarray:
    """Closed-form gradient of the modified energy."""
    q, p, _ = state
    m = params.m
    dq = pot.du(q) + h * h * (
        pot.d3u(q) * p * p / (12.0 * m * m) - pot.du(q) * pot.d2u(q) / (12.0 * m)
    )
    dp = p * modified_factor(q, h, params, pot) / m
    return np.array([dq, dp, params.temperature])


def entropy_gradient() -> np.ndarray:
    """Gradient of the bath entropy, (0, 0, 1); S is an independent variable."""
    return np.array([0.0, 0.0, 1.0])


def poisson_matrix() -> np.ndarray:
    """Antisymmetric matrix generating the reversible (Hamiltonian) part."""
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ]
    )


def friction_factor(state, params: SystemParams) -> np.ndarray:
    """Vector y with M = y y^T, y = sqrt(gamma/(mT)) * (0, mT, -p)."""
    _, p, _ = state
    mt = params.m * params.temperature
    c = math.sqrt(params.gamma / mt)
    return np.array([0.0, c * mt, -c * p])


def friction_matrix(state, params: SystemParams) -> np.ndarray:
    """Positive semidefinite matrix generating the irreversible part."""
    _, p, _ = state
    g = params.gamma
    m, t = params.m, params.temperature
    return np.array(
        [
            [0.0, 0.0, 0.0],
            [0.0, g * m * t, -g * p],
            [0.0, -g * p, g * p * p / (m * t)],
        ]
    )


def modified_friction_factor(
    state, h: float, params: SystemParams, pot: Potential
) -> np.ndarray:
    """Vector y_h with M_h = y_h y_h^T; only the momentum entry picks up alpha(q)."""
    q, p, _ = state
    mt = params.m * params.temperature
    c = math.sqrt(params.gamma / mt)
    return np.array([0.0, c * mt, -c * p * modified_factor(q, h, params, pot)])


def modified_friction_matrix(
    state, h: float, params: SystemParams, pot: Potential
) -> np.ndarray:
    """Rank-one friction matrix orthogonal to the modified energy gradient."""
    q, p, _ = state
    g = params.gamma
    m, t = params.m, params.temperature
    pa = p * modified_factor(q, h, params, pot)
    return np.array(
        [
            [0.0, 0.0, 0.0],
            [0.0, g * m * t, -g * pa],
            [0.0, -g * pa, g * pa * pa / (m * t)],
        ]
    )


def generic_rhs(state, params: SystemParams, pot: Potential):
    """Time derivative (dq, dp, dS) of the damped system.

    dq = p/m, dp = F(q) - gamma*p, dS = gamma*p^2/(mT).
    """
    q, p, _ = state
    g = params.gamma
    return (
        p / params.m,
        -pot.du(q) - g * p,
        g * p * p / (params.m * params.temperature),
    )


def modified_generic_rhs(state, h: float, params: SystemParams, pot: Potential):
    """Time derivative of the modified system driven by the modified energy.

    Reduces to ``generic_rhs`` at h = 0.
    """
    q, p, _ = state
    m = params.m
    g = params.gamma
    a = modified_factor(q, h, params, pot)
    dp = (
        -pot.du(q)
        - h * h / (12.0 * m * m) * (pot.d3u(q) * p * p - m * pot.du(q) * pot.d2u(q))
        - g * p * a
    )
    return (p * a / m, dp, g * p * p * a * a / (m * params.temperature))
