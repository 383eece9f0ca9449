import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_events
from qhjbreather.errors import DomainError
from qhjbreather.fields import (
    BreatherSpec,
    action_moving,
    action_rest,
    action_train,
    classical_action,
    evaluator,
    psi_moving,
    psi_rest,
)
from qhjbreather.kinematics import Boost, PhysParams, SpacetimePoint, boost_for_momentum, energy_momentum_classical
from qhjbreather.specfun import ModeIndex
from qhjbreather.verify import (
    ExternalFieldSample,
    StencilConfig,
    average_energy,
    average_energy_spatial,
    boundary_condition_check,
    dispersion_defect,
    dispersion_defect_envelope,
    energy_momentum_field,
    far_field_spectrum,
    kg_residual,
    lorenz_gauge_residual,
    qhj_field_residual,
    qhj_residual,
)

HALF = BreatherSpec(0.5)
CFG = StencilConfig(h=0.02, refinement_levels=3)
POINTS = random_events(6, 0.2, 10.0, seed=7)


def plane_wave(energy, momentum):
    return lambda p: cmath.exp(1j * (-energy * p.t + momentum * p.x))


class TestStencilConfig:
    def test_spacings(self):
        assert StencilConfig(0.04, 3).spacings == [0.04, 0.02, 0.01]

    @pytest.mark.parametrize("h, levels", [(0.0, 3), (-1.0, 3), (0.1, 1), (0.1, 2.5)])
    def test_invalid(self, h, levels):
        with pytest.raises(DomainError):
            StencilConfig(h, levels)


class TestKleinGordon:
    def test_plane_wave_second_order(self):
        report = kg_residual(plane_wave(1.25, 0.75), POINTS, CFG)
        assert report.orders_within(1.9, 2.1)
        assert report.max_abs < 1e-4

    def test_off_shell_plane_wave_plateaus(self):
        report = kg_residual(plane_wave(1.25, 0.5), POINTS, CFG)
        assert report.max_abs == pytest.approx(1.25**2 - 0.5**2 - 1, rel=1e-3)
        assert abs(report.convergence_order) < 0.1

    @pytest.mark.parametrize(
        "mode", [ModeIndex(0, 0), ModeIndex(1, 0), ModeIndex(1, 1), ModeIndex(2, -1), ModeIndex(3, 2)]
    )
    def test_breather_modes(self, mode):
        report = kg_residual(evaluator("psi", BreatherSpec(0.5, mode)), POINTS, CFG)
        assert report.orders_within(1.8, 2.2)

    def test_moving_breather(self):
        spec = BreatherSpec(0.5, boost=Boost(0.6))
        assert kg_residual(lambda p: psi_moving(p, spec), POINTS, CFG).orders_within(1.8, 2.2)

    def test_explicit_units(self):
        params = PhysParams(m=2.0, c=3.0, hbar=0.5)
        pts = [SpacetimePoint(0.05, 0.3, 0.1, -0.2), SpacetimePoint(0.01, 0.5, 0.2, 0.1)]
        report = kg_residual(lambda p: psi_rest(p, HALF, params), pts, StencilConfig(0.004, 3), params)
        assert report.orders_within(1.8, 2.2)

    @pytest.mark.parametrize("k", [1.7, 1.1 * math.sqrt(3)])
    def test_wrong_wavenumber_fails_to_converge(self, k):
        field = evaluator("psi", HALF, radial_wavenumber=k)
        report = kg_residual(field, POINTS, CFG)
        assert report.max_abs > 1e-3
        assert abs(report.convergence_order) < 0.2

    def test_report_levels(self):
        report = kg_residual(plane_wave(1.25, 0.75), POINTS[0], CFG)
        assert [h for h, _ in report.per_level] == CFG.spacings
        assert report.level(0.005) == report.max_abs
        assert len(report.orders) == 2 and len(report.residuals) == 1


class TestQuantumHamiltonJacobi:
    def test_classical_action_is_exact_at_origin(self):
        e, p = energy_momentum_classical(Boost(0.6))
        report = qhj_residual(lambda q: classical_action(q, e, p), SpacetimePoint(0, 0), CFG)
        assert report.max_abs == 0.0

    def test_classical_action_rounding_floor(self):
        # a linear action has no truncation error; only rounding of S / h^2 remains
        e, p = energy_momentum_classical(Boost(0.6))
        report = qhj_residual(lambda q: classical_action(q, e, p), POINTS, CFG)
        scale = max(abs(e * q.t) + abs(p * q.x) for q in POINTS) + 1
        assert report.max_abs <= 64 * np.finfo(float).eps * scale / CFG.spacings[-1] ** 2

    def test_off_shell_constant_defect(self):
        report = qhj_residual(lambda q: classical_action(q, 1.5, 0.5), SpacetimePoint(0, 0), CFG)
        assert report.max_abs == pytest.approx(1.5**2 - 0.5**2 - 1, abs=1e-12)

    @pytest.mark.parametrize("mode", [ModeIndex(0, 0), ModeIndex(2, 1)])
    def test_breather_action(self, mode):
        report = qhj_residual(evaluator("action", BreatherSpec(0.5, mode)), POINTS, CFG)
        assert report.orders_within(1.8, 2.2)

    def test_moving_breather_action(self):
        spec = BreatherSpec(0.5, boost=Boost(-0.4))
        assert qhj_residual(lambda p: action_moving(p, spec), POINTS, CFG).orders_within(1.8, 2.2)

    def test_equivalent_to_klein_gordon(self):
        # with Psi = exp(iS/hbar), the QHJ residual equals -hbar^2 (box Psi + kappa^2 Psi) / Psi
        p = POINTS[0]
        q = qhj_residual(evaluator("action", HALF), p, CFG).residuals[0]
        k = kg_residual(evaluator("psi", HALF), p, CFG).residuals[0]
        assert abs(q + k / psi_rest(p, HALF)) < 1e-5

    def test_zero_potentials_identical(self):
        field = evaluator("action", HALF)
        a = qhj_residual(field, POINTS, CFG)
        b = qhj_field_residual(field, lambda p: ExternalFieldSample(0.0), POINTS, CFG)
        assert a.residuals == b.residuals

    def test_constant_potential_shift(self):
        # a constant U is absorbed by shifting the energy: S = -(m c^2 + U0) t
        u0 = 0.3
        report = qhj_field_residual(
            lambda p: classical_action(p, 1.0 + u0, 0.0),
            lambda p: ExternalFieldSample(u0),
            SpacetimePoint(0, 0),
            CFG,
        )
        assert report.max_abs < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(
        u=st.floats(-2, 2),
        a=st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2)),
        e=st.floats(0.5, 3),
        k=st.floats(-2, 2),
    )
    def test_matches_direct_formula(self, u, a, e, k):
        # for a linear action the stencil derivatives are exact
        pot = ExternalFieldSample(u, a)
        report = qhj_field_residual(
            lambda p: classical_action(p, e, k), lambda p: pot, SpacetimePoint(0, 0), CFG
        )
        expected = (-e + u) ** 2 - ((k - a[0]) ** 2 + a[1] ** 2 + a[2] ** 2) - 1
        assert report.residuals[0] == pytest.approx(expected, abs=1e-9)


class TestLorenzGauge:
    def test_constant_potentials(self):
        report = lorenz_gauge_residual(lambda p: ExternalFieldSample(1.3, (0.2, -0.4, 2.0)), POINTS, CFG)
        assert report.max_abs == 0.0

    def test_linear_scalar_potential(self):
        report = lorenz_gauge_residual(lambda p: ExternalFieldSample(p.t), SpacetimePoint(0, 0), CFG)
        assert report.max_abs == pytest.approx(1.0, abs=1e-12)

    def test_compensated_potentials_converge(self):
        # U = sin t, A = -x cos t x_hat satisfies the gauge exactly
        def pot(p):
            return ExternalFieldSample(math.sin(p.t), (-p.x * math.cos(p.t), 0.0, 0.0))

        report = lorenz_gauge_residual(pot, POINTS, CFG)
        assert report.orders_within(1.9, 2.1)


class TestEnergyMomentum:
    def test_linear_action_exact(self):
        e, p = energy_momentum_classical(Boost(0.6))
        energy, momentum = energy_momentum_field(lambda q: classical_action(q, e, p), SpacetimePoint(0, 0))
        assert energy == pytest.approx(e, abs=1e-12)
        assert np.allclose(momentum, [p, 0, 0], atol=1e-12)
        assert dispersion_defect(lambda q: classical_action(q, e, p), SpacetimePoint(0, 0)) < 1e-12

    def test_breather_energy_against_analytic_derivative(self):
        # dS/dt = -m c^2 - i hbar u_t / (1 + u) with u_t = -i w0 u
        p = SpacetimePoint(0.4, 1.3, 0.2, -0.5)
        u = cmath.exp(-1j * p.t) * 0.5 * math.sin(math.sqrt(3) * p.r) / (math.sqrt(3) * p.r)
        expected = 1.0 + 1j * (-1j * u) / (1 + u)
        energy, _ = energy_momentum_field(evaluator("action", HALF), p, StencilConfig(1e-4))
        assert energy == pytest.approx(expected, abs=1e-7)

    def test_defect_envelope_decays(self):
        action = evaluator("action", HALF)
        assert dispersion_defect_envelope(action, 5.0) >= 10 * dispersion_defect_envelope(action, 50.0)


class TestAverages:
    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("r", [0.3, 0.7, 2.0])
    def test_time_average_is_rest_energy(self, alpha, r):
        value = average_energy(evaluator("action", BreatherSpec(alpha)), SpacetimePoint(0.0, r))
        assert abs(value - 1.0) <= 1e-10

    @settings(max_examples=20, deadline=None)
    @given(shift=st.floats(0, 2 * math.pi))
    def test_time_shift_invariance(self, shift):
        action = evaluator("action", HALF)
        a = average_energy(action, SpacetimePoint(0.0, 0.8, 0.1))
        b = average_energy(action, SpacetimePoint(shift, 0.8, 0.1))
        assert abs(a - b) <= 1e-12

    def test_explicit_units(self):
        params = PhysParams(m=2.0, c=3.0, hbar=0.5)
        action = lambda p: action_rest(p, HALF, params)
        assert abs(average_energy(action, SpacetimePoint(0.0, 0.1), params) - 18.0) <= 1e-9

    def test_spatial_average_of_classical_action(self):
        assert average_energy_spatial(evaluator("action", BreatherSpec(0.0)), 0.3, 2.0) == pytest.approx(1.0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            average_energy(evaluator("action", HALF), SpacetimePoint(0, 1), quadrature_nodes=1)
        with pytest.raises(DomainError):
            average_energy_spatial(evaluator("action", HALF), 0.0, 0.0)


class TestSpectrum:
    def test_far_field_is_fundamental(self):
        report = far_field_spectrum(evaluator("action", HALF), SpacetimePoint(0.0, 50.0))
        assert abs(report.peak_frequency - 1.0) <= report.bin_width
        assert report.harmonic_ratio < 1e-3

    def test_core_has_visible_harmonic(self):
        report = far_field_spectrum(evaluator("action", HALF), SpacetimePoint(0.0, 0.5))
        assert report.harmonic_ratio > 1e-2

    def test_zero_signal(self):
        report = far_field_spectrum(evaluator("action", BreatherSpec(0.0)), SpacetimePoint(0.0, 50.0))
        assert report.zero_signal

    def test_too_short(self):
        with pytest.raises(DomainError):
            far_field_spectrum(evaluator("action", HALF), SpacetimePoint(0, 50), n_periods=4)


class TestBoundaryCondition:
    def test_classical_action_matches(self):
        e, p = energy_momentum_classical(Boost(0.6))
        dt, dx = boundary_condition_check(lambda q: classical_action(q, e, p), 2.0, SpacetimePoint(0, 0))
        assert dt < 1e-12 and dx < 1e-12

    def test_quantized_train_is_periodic(self):
        d = 2 * math.pi
        boost = boost_for_momentum(1.0)
        spec = BreatherSpec(0.5, boost=boost, train_period=d)
        _, dx = boundary_condition_check(lambda q: action_train(q, spec), d, SpacetimePoint(0, 0))
        # budget from the two edge copies that differ between x and x + d
        gamma = boost.gamma(PhysParams())
        edge = 2 / (math.sqrt(3) * gamma * (spec.truncation - 1) * d)
        budget = 0.5 * (1.0 + math.sqrt(3) * gamma + 1.0) * edge / (1 - 0.5 * 1.5) ** 2
        assert dx <= budget

    def test_off_quantization_breaks_periodicity(self):
        d = 2 * math.pi
        on = BreatherSpec(0.5, boost=boost_for_momentum(1.0), train_period=d)
        off = BreatherSpec(0.5, boost=boost_for_momentum(1.3), train_period=d)
        _, dx_on = boundary_condition_check(lambda q: action_train(q, on), d, SpacetimePoint(0, 0))
        _, dx_off = boundary_condition_check(lambda q: action_train(q, off), d, SpacetimePoint(0, 0))
        assert dx_off > 100 * dx_on

    def test_invalid_interval(self):
        with pytest.raises(DomainError):
            boundary_condition_check(evaluator("action", HALF), 0.0, SpacetimePoint(0, 0))
