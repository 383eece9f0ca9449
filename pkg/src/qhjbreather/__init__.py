"""Breather solutions of the relativistic quantum Hamilton-Jacobi equation.

Closed-form constructors live in :mod:`qhjbreather.fields`; finite-difference
and quadrature checks in :mod:`qhjbreather.verify`; the radial leapfrog
evolver in :mod:`qhjbreather.evolve`.
"""

__version__ = "0.1.0"

from .errors import BranchError, BreatherError, ConfigError, DiagnosticsError, DomainError, KinematicsError
from .fields import (
    BreatherSpec,
    QuantizationReport,
    action_far,
    action_moving,
    action_rest,
    action_train,
    evaluator,
    psi_moving,
    psi_rest,
    quantization_check,
)
from .kinematics import NATURAL, Boost, PhysParams, SpacetimePoint, energy_momentum_classical, lorentz_map
from .specfun import ModeIndex, assoc_legendre_p, spherical_bessel_j
