"""Closed-form breather wave-functions and action-functions.

The wave-function of a breather at rest is

    Psi = exp(-i w0 t) + alpha exp(-2i w0 t) j_l(sqrt(3) kappa r) P_l^n(cos theta) exp(i n phi)

and the action-function is related to it through ``Psi = exp(i S / hbar)``.
Moving breathers are obtained by evaluating the rest-frame expressions at
Lorentz-boosted coordinates, and breather trains sum ``2K + 1`` copies of the
``l = n = 0`` breather spaced by a period ``d``.

All evaluators return plain Python ``complex`` values.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BranchError, DomainError
from .kinematics import (
    NATURAL,
    Boost,
    PhysParams,
    SpacetimePoint,
    dilated_train_period,
    energy_momentum_classical,
    lorentz_map,
)
from .specfun import ModeIndex, assoc_legendre_p, spherical_bessel_j, spherical_bessel_j0

SQRT3 = math.sqrt(3.0)

#: Default number of copies on each side of a breather train.
DEFAULT_TRUNCATION = 64

Evaluator = Callable[[SpacetimePoint], complex]


@dataclass(frozen=True)
class BreatherSpec:
    """Immutable description of a breather.

    ``alpha`` is the (possibly complex) amplitude of the localized term,
    ``train_period`` is ``None`` for a single breather, and ``truncation`` is
    the number ``K`` of copies kept on each side of a train.
    """

    alpha: complex = 0.5
    mode: ModeIndex = field(default_factory=ModeIndex)
    boost: Boost = field(default_factory=Boost)
    train_period: Optional[float] = None
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        alpha = complex(self.alpha)
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise DomainError("alpha must be finite")
        object.__setattr__(self, "alpha", alpha)
        if self.train_period is not None and not self.train_period > 0:
            raise DomainError(f"train period must be positive, got {self.train_period}")
        if int(self.truncation) != self.truncation or self.truncation < 1:
            raise DomainError(f"truncation K must be a positive integer, got {self.truncation}")


@dataclass(frozen=True)
class QuantizationReport:
    nu: float
    mismatch: float
    n_exact: Optional[int] = None

    @property
    def hit(self) -> bool:
        return self.n_exact is not None


def _require_massive(params):
    if params.m <= 0:
        raise DomainError(
            "breather constructors need m > 0; the massless limit at fixed energy has no closed form here"
        )


def _require_single(spec):
    if spec.train_period is not None:
        raise DomainError("single-breather constructor called with a train period; use action_train")


def _require_rest(spec):
    _require_single(spec)
    if spec.boost.v != 0.0:
        raise DomainError("rest-frame constructor called with a non-zero boost; use the *_moving variant")


def spherical_coordinates(x: float, y: float, z: float) -> tuple[float, float, float]:
    """``(r, cos(theta), phi)``; the angles are 0 at the origin."""
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0.0:
        return 0.0, 1.0, 0.0
    cos_theta = min(1.0, max(-1.0, z / r))
    return r, cos_theta, math.atan2(y, x)


def mode_factor(
    p: SpacetimePoint,
    mode: ModeIndex,
    params: PhysParams = NATURAL,
    radial_wavenumber: Optional[float] = None,
) -> complex:
    """Spatial factor ``j_l(k r) P_l^n(cos theta) exp(i n phi)``.

    ``k`` defaults to ``sqrt(3) * kappa``; overriding it breaks the
    Klein-Gordon dispersion relation and is used for negative controls.
    """
    k = SQRT3 * params.kappa if radial_wavenumber is None else radial_wavenumber
    r, cos_theta, phi = spherical_coordinates(p.x, p.y, p.z)
    radial = spherical_bessel_j(mode.l, k * r)
    if mode.l == 0:
        return complex(radial)
    angular = assoc_legendre_p(mode.l, mode.n, cos_theta)
    return radial * angular * cmath.exp(1j * mode.n * phi)


def _perturbation(p, spec, params, radial_wavenumber=None):
    # u = alpha exp(-i w0 t) B, the argument of the logarithm minus one
    b = mode_factor(p, spec.mode, params, radial_wavenumber)
    return spec.alpha * cmath.exp(-1j * params.omega0 * p.t) * b


def _check_branch(spec, u):
    if abs(spec.alpha) >= 1.0:
        raise BranchError(f"|alpha| = {abs(spec.alpha)} must be below 1 for the action-function")
    if abs(u) >= 1.0:
        raise BranchError(f"|alpha * mode factor| = {abs(u)} reaches 1; logarithm would wind")


def psi_rest(
    p: SpacetimePoint,
    spec: BreatherSpec,
    params: PhysParams = NATURAL,
    *,
    radial_wavenumber: Optional[float] = None,
) -> complex:
    """Two-term wave-function of a breather at rest."""
    _require_massive(params)
    _require_rest(spec)
    w0 = params.omega0
    b = mode_factor(p, spec.mode, params, radial_wavenumber)
    return cmath.exp(-1j * w0 * p.t) + spec.alpha * cmath.exp(-2j * w0 * p.t) * b


def action_rest(
    p: SpacetimePoint,
    spec: BreatherSpec,
    params: PhysParams = NATURAL,
    *,
    radial_wavenumber: Optional[float] = None,
) -> complex:
    """Action ``-m c^2 t - i hbar Log(1 + u)`` of a breather at rest.

    ``Log`` is the principal branch; ``|u| < 1`` is enforced so that it never
    crosses the cut.
    """
    _require_massive(params)
    _require_rest(spec)
    u = _perturbation(p, spec, params, radial_wavenumber)
    _check_branch(spec, u)
    return -params.rest_energy * p.t - 1j * params.hbar * cmath.log(1.0 + u)


def action_far(p: SpacetimePoint, spec: BreatherSpec, params: PhysParams = NATURAL) -> complex:
    """Far-field form of :func:`action_rest`, with ``Log(1 + u)`` replaced by ``u``."""
    _require_massive(params)
    _require_rest(spec)
    u = _perturbation(p, spec, params)
    _check_branch(spec, u)
    return -params.rest_energy * p.t - 1j * params.hbar * u


def _rest_spec(spec):
    return BreatherSpec(spec.alpha, spec.mode, Boost(0.0), None, spec.truncation)


def psi_moving(p: SpacetimePoint, spec: BreatherSpec, params: PhysParams = NATURAL) -> complex:
    """Wave-function of a breather moving with ``spec.boost`` along x."""
    _require_single(spec)
    return psi_rest(lorentz_map(p, spec.boost, params), _rest_spec(spec), params)


def action_moving(p: SpacetimePoint, spec: BreatherSpec, params: PhysParams = NATURAL) -> complex:
    """Action of a moving breather: :func:`action_rest` at the boosted event."""
    _require_single(spec)
    return action_rest(lorentz_map(p, spec.boost, params), _rest_spec(spec), params)


def train_sum(p: SpacetimePoint, spec: BreatherSpec, params: PhysParams = NATURAL) -> float:
    """Symmetric partial sum over ``k in [-K, K]`` of ``j_0(sqrt(3) kappa r_k)``.

    ``r_k`` is the distance to the k-th copy in the co-moving frame, where the
    copies are spaced by the dilated period ``gamma d``.
    """
    if spec.train_period is None:
        raise DomainError("train_sum needs a train period")
    period = dilated_train_period(spec.train_period, spec.boost, params)
    q = lorentz_map(p, spec.boost, params)
    k = np.arange(-spec.truncation, spec.truncation + 1, dtype=float)
    dx = q.x - k * period
    r = np.sqrt(dx * dx + (q.y * q.y + q.z * q.z))
    return float(np.sum(spherical_bessel_j0(SQRT3 * params.kappa * r)))


def action_train(p: SpacetimePoint, spec: BreatherSpec, params: PhysParams = NATURAL) -> complex:
    """Action of a d-periodic breather train, at rest or moving.

    ``S = -E t + p x - i hbar Log(1 + alpha exp(i(-E t + p x)/hbar) sum_k j_0(...))``
    with ``(E, p)`` the classical energy and momentum of the boost.
    """
    _require_massive(params)
    if spec.train_period is None:
        raise DomainError("action_train needs a train period")
    if spec.mode != ModeIndex(0, 0):
        raise DomainError("breather trains are built from the l = n = 0 mode only")
    energy, momentum = energy_momentum_classical(spec.boost, params)
    classical = -energy * p.t + momentum * p.x
    u = spec.alpha * cmath.exp(1j * classical / params.hbar) * train_sum(p, spec, params)
    _check_branch(spec, u)
    return classical - 1j * params.hbar * cmath.log(1.0 + u)


def classical_action(p: SpacetimePoint, energy: float, momentum: float) -> complex:
    """Free-particle action ``-E t + p x``."""
    return complex(-energy * p.t + momentum * p.x)


def psi_from_action(s: complex, params: PhysParams = NATURAL) -> complex:
    return cmath.exp(1j * s / params.hbar)


def action_from_psi(psi: complex, params: PhysParams = NATURAL) -> complex:
    """Principal-branch ``-i hbar Log(Psi)``; defined up to multiples of ``2 pi hbar``."""
    if psi == 0:
        raise BranchError("the action is undefined where Psi vanishes")
    return -1j * params.hbar * cmath.log(psi)


def quantization_check(
    d: float, p_momentum: float, params: PhysParams = NATURAL, tol: float = 1e-9
) -> QuantizationReport:
    """Test ``d p = 2 pi n hbar`` for a positive integer ``n``."""
    if not (d > 0 and p_momentum > 0):
        raise DomainError("period and momentum must both be positive")
    nu = d * p_momentum / (2.0 * math.pi * params.hbar)
    n = round(nu)
    mismatch = abs(nu - n)
    return QuantizationReport(nu, mismatch, n if (mismatch <= tol and n >= 1) else None)


def evaluator(kind: str, spec: BreatherSpec, params: PhysParams = NATURAL, **kwargs) -> Evaluator:
    """Bind a constructor to ``spec`` and ``params`` as a point -> complex callable.

    ``kind`` is one of ``psi``, ``action``, ``action_far`` or ``action_train``;
    ``psi`` and ``action`` dispatch to the moving variants for a non-zero boost.
    """
    moving = spec.boost.v != 0.0
    table = {
        "psi": psi_moving if moving else psi_rest,
        "action": action_moving if moving else action_rest,
        "action_far": action_far,
        "action_train": action_train,
    }
    try:
        fn = table[kind]
    except KeyError:
        raise DomainError(f"unknown field kind {kind!r}; expected one of {sorted(table)}") from None
    if kwargs and fn not in (psi_rest, action_rest):
        raise DomainError(f"{kind} does not accept {sorted(kwargs)}")
    return lambda p: fn(p, spec, params, **kwargs)
