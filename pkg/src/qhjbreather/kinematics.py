"""Physical constants, events and Lorentz boosts along the x-axis."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, KinematicsError


@dataclass(frozen=True)
class PhysParams:
    """Mass, speed of light and reduced Planck constant.

    Defaults are natural units, in which the Compton wavenumber and the
    rest frequency are both 1.
    """

    m: float = 1.0
    c: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "c", "hbar"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.c <= 0 or self.hbar <= 0:
            raise DomainError("c and hbar must be positive")
        if self.m < 0:
            raise DomainError("mass must be non-negative")

    @property
    def kappa(self) -> float:
        """Compton wavenumber m c / hbar."""
        return self.m * self.c / self.hbar

    @property
    def omega0(self) -> float:
        """Rest frequency m c^2 / hbar."""
        return self.m * self.c**2 / self.hbar

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2


NATURAL = PhysParams()


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    x: float
    y: float = 0.0
    z: float = 0.0

    @property
    def r(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def shifted(self, dt=0.0, dx=0.0, dy=0.0, dz=0.0) -> SpacetimePoint:
        return SpacetimePoint(self.t + dt, self.x + dx, self.y + dy, self.z + dz)


@dataclass(frozen=True)
class Boost:
    """Constant velocity ``v`` along the x-axis."""

    v: float = 0.0

    def check(self, params: PhysParams) -> None:
        if not math.isfinite(self.v) or abs(self.v) >= params.c:
            raise KinematicsError(f"boost velocity |v| = {abs(self.v)} must be below c = {params.c}")

    def gamma(self, params: PhysParams) -> float:
        self.check(params)
        beta = self.v / params.c
        return 1.0 / math.sqrt(1.0 - beta * beta)


def lorentz_map(p: SpacetimePoint, b: Boost, params: PhysParams = NATURAL) -> SpacetimePoint:
    """Coordinates of the lab event ``p`` in the frame moving with ``b``."""
    g = b.gamma(params)
    v, c = b.v, params.c
    return SpacetimePoint(g * (p.t - p.x * v / (c * c)), g * (p.x - v * p.t), p.y, p.z)


def energy_momentum_classical(b: Boost, params: PhysParams = NATURAL) -> tuple[float, float]:
    """Energy ``gamma m c^2`` and momentum ``gamma m v`` of a free particle."""
    if params.m <= 0:
        raise KinematicsError("a massless particle's energy and momentum are not fixed by its velocity")
    g = b.gamma(params)
    return g * params.m * params.c**2, g * params.m * b.v


def boost_for_momentum(p: float, params: PhysParams = NATURAL) -> Boost:
    """Velocity of a particle of mass ``params.m`` carrying momentum ``p``."""
    if params.m <= 0:
        raise KinematicsError("velocity of a massless particle is not determined by its momentum")
    c = params.c
    energy = c * math.hypot(p, params.m * c)
    return Boost(p * c * c / energy)


def velocity_addition(v1: float, v2: float, params: PhysParams = NATURAL) -> float:
    return (v1 + v2) / (1.0 + v1 * v2 / params.c**2)


def dilated_train_period(d: float, b: Boost, params: PhysParams = NATURAL) -> float:
    """Rest-frame period ``gamma d`` whose Lorentz contraction is the lab period ``d``."""
    if not d > 0:
        raise DomainError(f"train period must be positive, got {d}")
    return b.gamma(params) * d
