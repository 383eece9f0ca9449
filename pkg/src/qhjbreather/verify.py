"""Finite-difference and quadrature checks of fields against their equations.

Every residual is evaluated pointwise on a 9-point stencil (the centre plus
one step forward and back along t, x, y and z; the time step is ``h / c``)
and repeated on ``refinement_levels`` successively halved spacings. For an
exact solution the residual is pure truncation error and shrinks like
``h**2``; the observed order is ``log2`` of the ratio of successive maxima.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError
from .kinematics import NATURAL, PhysParams, SpacetimePoint

Evaluator = Callable[[SpacetimePoint], complex]
Points = Union[SpacetimePoint, Sequence[SpacetimePoint]]


@dataclass(frozen=True)
class StencilConfig:
    h: float = 0.01
    refinement_levels: int = 3

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError(f"stencil spacing must be positive, got {self.h}")
        if int(self.refinement_levels) != self.refinement_levels or self.refinement_levels < 2:
            raise DomainError("at least two refinement levels are needed for an order estimate")

    @property
    def spacings(self) -> list[float]:
        return [self.h / 2**i for i in range(self.refinement_levels)]


@dataclass(frozen=True)
class ResidualReport:
    """Residual statistics over a point set.

    ``max_abs`` and ``l2`` (root mean square) refer to the finest spacing.
    ``orders`` holds one observed order per pair of successive levels and
    ``convergence_order`` is the last of them; both are ``nan`` when the two
    residuals compared are exactly zero.
    """

    max_abs: float
    l2: float
    per_level: list[tuple[float, float]]
    orders: tuple[float, ...]
    convergence_order: float
    residuals: list[complex] = field(default_factory=list, repr=False)

    def level(self, h: float) -> float:
        """``max_abs`` at the level whose spacing is closest to ``h``."""
        return min(self.per_level, key=lambda e: abs(e[0] - h))[1]

    def orders_within(self, low: float, high: float) -> bool:
        return all(low <= q <= high for q in self.orders)


@dataclass(frozen=True)
class ExternalFieldSample:
    """Scalar potential ``U`` and vector potential ``A`` at one event."""

    U: float
    A: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SpectrumReport:
    peak_frequency: float
    harmonic_ratio: float
    bin_width: float
    zero_signal: bool = False


def _as_points(at: Points) -> list[SpacetimePoint]:
    pts = [at] if isinstance(at, SpacetimePoint) else list(at)
    if not pts:
        raise DomainError("empty point set")
    return pts


class _Stencil:
    """Values of ``f`` at the centre and at +/- one step along each axis."""

    def __init__(self, f, p, h, c):
        self.steps = (h / c, h, h, h)
        self.center = f(p)
        self.plus = []
        self.minus = []
        for axis, step in enumerate(self.steps):
            offset = [0.0] * 4
            offset[axis] = step
            self.plus.append(f(p.shifted(*offset)))
            offset[axis] = -step
            self.minus.append(f(p.shifted(*offset)))

    def d1(self, axis):
        return (self.plus[axis] - self.minus[axis]) / (2.0 * self.steps[axis])

    def d2(self, axis):
        step = self.steps[axis]
        return (self.plus[axis] - 2.0 * self.center + self.minus[axis]) / (step * step)

    def box(self, c):
        """d'Alembertian ``(1/c^2) d_tt - laplacian``."""
        return self.d2(0) / (c * c) - (self.d2(1) + self.d2(2) + self.d2(3))


def _order(coarse, fine):
    if fine == 0.0:
        return math.nan if coarse == 0.0 else math.inf
    if coarse == 0.0:
        return -math.inf
    return math.log2(coarse / fine)


def _refine(residual_at, at: Points, cfg: StencilConfig) -> ResidualReport:
    pts = _as_points(at)
    per_level = []
    values = []
    for h in cfg.spacings:
        values = [complex(residual_at(p, h)) for p in pts]
        per_level.append((h, max(abs(v) for v in values)))
    orders = tuple(_order(a[1], b[1]) for a, b in zip(per_level, per_level[1:]))
    finest = np.abs(np.array(values))
    return ResidualReport(
        max_abs=float(finest.max()),
        l2=float(np.sqrt(np.mean(finest**2))),
        per_level=per_level,
        orders=orders,
        convergence_order=orders[-1],
        residuals=values,
    )


def kg_residual(
    field: Evaluator, at: Points, cfg: StencilConfig = StencilConfig(), params: PhysParams = NATURAL
) -> ResidualReport:
    """Klein-Gordon residual ``box Psi + kappa^2 Psi``."""
    c, k2 = params.c, params.kappa**2

    def residual(p, h):
        s = _Stencil(field, p, h, c)
        return s.box(c) + k2 * s.center

    return _refine(residual, at, cfg)


def _zero_potentials(p):
    return ExternalFieldSample(0.0, (0.0, 0.0, 0.0))


def qhj_field_residual(
    action: Evaluator,
    potentials: Callable[[SpacetimePoint], ExternalFieldSample],
    at: Points,
    cfg: StencilConfig = StencilConfig(),
    params: PhysParams = NATURAL,
) -> ResidualReport:
    """Residual of the Hamilton-Jacobi equation in external potentials ``(U, A)``.

    ``(1/c^2)(S_t + U)^2 - (grad S - A/c)^2 - m^2 c^2 - i hbar box S``; squares
    of complex vectors are bilinear, not Hermitian.
    """
    c, hbar, mc = params.c, params.hbar, params.m * params.c

    def residual(p, h):
        s = _Stencil(action, p, h, c)
        pot = potentials(p)
        temporal = s.d1(0) + pot.U
        spatial = sum((s.d1(i + 1) - pot.A[i] / c) ** 2 for i in range(3))
        return temporal * temporal / (c * c) - spatial - mc * mc - 1j * hbar * s.box(c)

    return _refine(residual, at, cfg)


def qhj_residual(
    action: Evaluator, at: Points, cfg: StencilConfig = StencilConfig(), params: PhysParams = NATURAL
) -> ResidualReport:
    """Free-particle quantum Hamilton-Jacobi residual."""
    return qhj_field_residual(action, _zero_potentials, at, cfg, params)


def lorenz_gauge_residual(
    potentials: Callable[[SpacetimePoint], ExternalFieldSample],
    at: Points,
    cfg: StencilConfig = StencilConfig(),
    params: PhysParams = NATURAL,
) -> ResidualReport:
    """Central-difference ``(1/c) dU/dt + div A``."""
    c = params.c

    def residual(p, h):
        dt = h / c
        u_dot = (potentials(p.shifted(dt=dt)).U - potentials(p.shifted(dt=-dt)).U) / (2 * dt)
        div = 0.0
        for i, key in enumerate(("dx", "dy", "dz")):
            fwd = potentials(p.shifted(**{key: h})).A[i]
            back = potentials(p.shifted(**{key: -h})).A[i]
            div += (fwd - back) / (2 * h)
        return u_dot / c + div

    return _refine(residual, at, cfg)


def energy_momentum_field(
    action: Evaluator, at: SpacetimePoint, cfg: StencilConfig = StencilConfig(), params: PhysParams = NATURAL
) -> tuple[complex, np.ndarray]:
    """``E = -dS/dt`` and ``p = grad S`` by central differences at spacing ``cfg.h``.

    Near a breather core both are complex; they are returned unprojected.
    """
    s = _Stencil(action, at, cfg.h, params.c)
    return -s.d1(0), np.array([s.d1(1), s.d1(2), s.d1(3)])


def dispersion_defect(
    action: Evaluator, at: SpacetimePoint, cfg: StencilConfig = StencilConfig(), params: PhysParams = NATURAL
) -> float:
    """``|E^2 - c^2 p.p - m^2 c^4|`` from the gradients of the action."""
    energy, momentum = energy_momentum_field(action, at, cfg, params)
    c = params.c
    return abs(energy * energy - c * c * np.sum(momentum * momentum) - params.rest_energy**2)


def dispersion_defect_envelope(
    action: Evaluator,
    radius: float,
    cfg: StencilConfig = StencilConfig(),
    params: PhysParams = NATURAL,
    n_radial: int = 24,
    n_times: int = 8,
) -> float:
    """Largest dispersion defect over one radial wavelength and one period.

    Samples ``r`` over one wavelength ``2 pi / (sqrt(3) kappa)`` centred on
    ``radius`` along the x-axis and ``t`` over ``[0, 2 pi / w0)``, so the
    result tracks the decay envelope of the breather tail rather than an
    individual zero or crest.
    """
    wavelength = 2 * math.pi / (math.sqrt(3.0) * params.kappa)
    period = 2 * math.pi / params.omega0
    worst = 0.0
    for i in range(n_radial):
        x = radius + wavelength * (i / n_radial - 0.5)
        for j in range(n_times):
            p = SpacetimePoint(period * j / n_times, x)
            worst = max(worst, dispersion_defect(action, p, cfg, params))
    return worst


def _time_derivative(action, p, step):
    return (action(p.shifted(dt=step)) - action(p.shifted(dt=-step))) / (2 * step)


def average_energy(
    action: Evaluator, at: SpacetimePoint, params: PhysParams = NATURAL, quadrature_nodes: int = 256
) -> complex:
    """Time average of ``-dS/dt`` over one rest period starting at ``at.t``.

    The trapezoidal rule on a periodic integrand converges geometrically; the
    oscillating part of the action is periodic, so its derivative averages to
    zero and the result is ``m c^2`` up to quadrature aliasing.
    """
    if quadrature_nodes < 2:
        raise DomainError("need at least two quadrature nodes")
    if params.omega0 <= 0:
        raise DomainError("time averaging needs a finite rest period (m > 0)")
    period = 2 * math.pi / params.omega0
    step = period / (16 * quadrature_nodes)
    total = 0j
    for j in range(quadrature_nodes):
        p = at.shifted(dt=period * j / quadrature_nodes)
        total += -_time_derivative(action, p, step)
    return total / quadrature_nodes


def average_energy_spatial(
    action: Evaluator, t: float, radius: float, params: PhysParams = NATURAL, nodes: int = 64
) -> complex:
    """Experimental: average of ``-dS/dt`` over a ball of the given radius at time ``t``.

    Integrates along the positive x-axis with weight ``r^2``, which is exact
    for spherically symmetric actions only.
    """
    if not radius > 0:
        raise DomainError("radius must be positive")
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * radius * (x + 1.0)
    weights = 0.5 * radius * w
    step = 1e-4 / max(params.omega0, 1e-300)
    values = [-_time_derivative(action, SpacetimePoint(t, float(ri)), step) for ri in r]
    return complex(3.0 / radius**3 * np.sum(weights * r * r * np.array(values)))


def far_field_spectrum(
    action: Evaluator,
    at: SpacetimePoint,
    params: PhysParams = NATURAL,
    n_periods: int = 16,
    samples_per_period: int = 64,
) -> SpectrumReport:
    """Spectrum of the action perturbation ``S + m c^2 t`` at a fixed position.

    Samples an integer number of rest periods with a rectangular window.
    ``harmonic_ratio`` is the power at ``2 w0`` over the power at ``w0``,
    each summed over both signs of frequency.
    """
    if n_periods < 8 or samples_per_period < 32:
        raise DomainError("need at least 8 periods and 32 samples per period")
    if params.omega0 <= 0:
        raise DomainError("spectrum needs a finite rest period (m > 0)")
    period = 2 * math.pi / params.omega0
    count = n_periods * samples_per_period
    dt = period / samples_per_period
    times = at.t + dt * np.arange(count)
    signal = np.array(
        [action(SpacetimePoint(float(t), at.x, at.y, at.z)) + params.rest_energy * t for t in times]
    )
    bin_width = 2 * math.pi / (count * dt)
    if not np.any(signal):
        return SpectrumReport(0.0, 0.0, bin_width, zero_signal=True)
    power = np.abs(np.fft.fft(signal)) ** 2
    freqs = 2 * math.pi * np.fft.fftfreq(count, dt)
    peak = float(abs(freqs[int(np.argmax(power))]))

    def at_frequency(omega):
        k = int(round(omega / bin_width))
        return power[k % count] + (power[-k % count] if k else 0.0)

    fundamental = at_frequency(params.omega0)
    ratio = at_frequency(2 * params.omega0) / fundamental if fundamental > 0 else math.inf
    return SpectrumReport(peak, float(ratio), bin_width)


def boundary_condition_check(
    action: Evaluator,
    d: float,
    at: SpacetimePoint,
    cfg: StencilConfig = StencilConfig(),
    params: PhysParams = NATURAL,
) -> tuple[float, float]:
    """Mismatch of ``dS/dt`` and ``dS/dx`` between ``at.x`` and ``at.x + d``."""
    if not d > 0:
        raise DomainError("interval length must be positive")
    h, dt = cfg.h, cfg.h / params.c
    left, right = at, at.shifted(dx=d)

    def derivatives(p):
        s_t = (action(p.shifted(dt=dt)) - action(p.shifted(dt=-dt))) / (2 * dt)
        s_x = (action(p.shifted(dx=h)) - action(p.shifted(dx=-h))) / (2 * h)
        return s_t, s_x

    lt, lx = derivatives(left)
    rt, rx = derivatives(right)
    return abs(lt - rt), abs(lx - rx)
