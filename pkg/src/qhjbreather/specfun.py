"""Spherical Bessel functions j_l and associated Legendre functions P_l^n.

Both are evaluated for real arguments and integer orders only. The Legendre
functions carry the Condon-Shortley phase ``(-1)**n``, matching
``scipy.special.lpmv``.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: Largest supported Bessel order.
MAX_ORDER = 64

_SERIES_FACTOR = 1e-3
_RESCALE = 1e100


@dataclass(frozen=True)
class ModeIndex:
    """Polar order ``l`` and azimuthal order ``n`` of a spinning breather."""

    l: int = 0
    n: int = 0

    def __post_init__(self):
        _check_integer("l", self.l)
        _check_integer("n", self.n)
        if self.l < 0:
            raise DomainError(f"polar order l must be non-negative, got {self.l}")
        if abs(self.n) > self.l:
            raise DomainError(f"|n| must not exceed l, got l={self.l}, n={self.n}")

    @property
    def spherical(self) -> bool:
        return self.l == 0


def _check_integer(name, value):
    # bool is an Integral too, but never a meaningful order
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, numbers.Real) and float(value).is_integer():
            return
        raise DomainError(f"{name} must be an integer order, got {value!r}")


def series_threshold(l: int) -> float:
    """Argument below which :func:`spherical_bessel_j` uses its power series."""
    return _SERIES_FACTOR * (l + 1)


def _double_factorial_odd(l):
    # (2l+1)!!
    out = 1.0
    for k in range(3, 2 * l + 2, 2):
        out *= k
    return out


def _series(l, x):
    lead = x**l / _double_factorial_odd(l)
    y = -0.5 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= y / (k * (2 * l + 2 * k + 1))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return lead * total


def _upward(l, x):
    s, c = math.sin(x), math.cos(x)
    j0 = s / x
    if l == 0:
        return j0
    j1 = s / (x * x) - c / x
    for k in range(1, l):
        j0, j1 = j1, (2 * k + 1) / x * j1 - j0
    return j1


def _miller(l, x):
    start = l + 16 + int(math.sqrt(40.0 * (l + 1)))
    jp1, jk = 0.0, 1.0  # unnormalised j_{k+1}, j_k at k = start
    norm = (2 * start + 1) * jk * jk
    target = j1 = 0.0
    for k in range(start, 0, -1):
        jp1, jk = jk, (2 * k + 1) / x * jk - jp1
        # jk now holds the unnormalised j_{k-1}
        norm += (2 * k - 1) * jk * jk
        if k - 1 == l:
            target = jk
        if k - 1 == 1:
            j1 = jk
        if abs(jk) > _RESCALE:
            jp1 /= _RESCALE
            jk /= _RESCALE
            target /= _RESCALE
            j1 /= _RESCALE
            norm /= _RESCALE * _RESCALE
    j0 = jk
    # sum rule: sum (2k+1) j_k^2 = 1; sign from the better conditioned of j_0, j_1
    scale = 1.0 / math.sqrt(norm)
    j0_true = math.sin(x) / x
    j1_true = math.sin(x) / (x * x) - math.cos(x) / x
    if abs(j0_true) >= abs(j1_true):
        sign = math.copysign(1.0, j0_true * j0)
    else:
        sign = math.copysign(1.0, j1_true * j1)
    return sign * scale * target


def spherical_bessel_j(l: int, x: float) -> float:
    """Spherical Bessel function of the first kind, ``j_l(x)``.

    Uses a power series for ``x < 1e-3 * (l + 1)``, upward recurrence from
    ``sin(x)/x`` for ``x > l`` and normalised downward (Miller) recurrence
    otherwise. Supported orders are ``0 <= l <= 64``.

    Raises
    ------
    DomainError
        For negative or non-finite ``x``, or an unsupported order.
    """
    _check_integer("l", l)
    l = int(l)
    if l < 0 or l > MAX_ORDER:
        raise DomainError(f"order l must lie in [0, {MAX_ORDER}], got {l}")
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"argument must be finite and non-negative, got {x}")
    if x < series_threshold(l):
        return _series(l, x)
    if x > l:
        return _upward(l, x)
    return _miller(l, x)


def assoc_legendre_p(l: int, n: int, u: float) -> float:
    """Associated Legendre function ``P_l^n(u)`` with Condon-Shortley phase.

    Negative ``n`` follows ``P_l^{-n} = (-1)^n (l-n)!/(l+n)! P_l^n``.
    """
    mode = ModeIndex(int(l) if float(l).is_integer() else l, int(n) if float(n).is_integer() else n)
    l, n = mode.l, mode.n
    u = float(u)
    if not abs(u) <= 1.0:
        raise DomainError(f"argument must lie in [-1, 1], got {u}")
    m = abs(n)
    # P_m^m = (-1)^m (2m-1)!! (1-u^2)^{m/2}
    pmm = 1.0
    if m > 0:
        root = math.sqrt((1.0 - u) * (1.0 + u))
        fact = 1.0
        for _ in range(m):
            pmm *= -fact * root
            fact += 2.0
    if l == m:
        value = pmm
    else:
        pmm1 = u * (2 * m + 1) * pmm
        if l == m + 1:
            value = pmm1
        else:
            for k in range(m + 2, l + 1):
                pk = (u * (2 * k - 1) * pmm1 - (k + m - 1) * pmm) / (k - m)
                pmm, pmm1 = pmm1, pk
            value = pmm1
    if n < 0:
        value *= (-1) ** m * math.factorial(l - m) / math.factorial(l + m)
    return value


def spherical_bessel_j0(x):
    """Vectorised ``j_0(x) = sin(x)/x`` with the removable point at 0 handled."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)
