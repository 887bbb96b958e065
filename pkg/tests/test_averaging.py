import numpy as np
import pytest

from eulersim import models
from eulersim.averaging import (
    avg_hamiltonian_first,
    build_average_report,
    decoupling_residual,
    f_gamma,
    magnus_error_estimate,
    magnus_second_term,
)
from eulersim.groups import build_cayley_graph, eulerian_cycle
from eulersim.pauli import (
    OperatorSum,
    axis_propagator,
    frobenius_norm,
    to_dense,
)
from eulersim.pulses import PulseShape
from eulersim.reachability import WeightAssignment, solve_weights
from eulersim.scheduler import (
    build_bb_schedule,
    build_eulerian_schedule,
    build_symmetric_schedule,
    control_propagator_at,
)
from conftest import random_operator_sum

TSIM = 0.1 / 3.0


@pytest.fixture(scope="module")
def shape():
    return PulseShape.sine_squared(TSIM / 10.0, np.pi / 2)


@pytest.fixture(scope="module")
def dipolar_schedule(h_iso, h_dip, g1, g1_cycle, shape):
    w = solve_weights(h_iso, h_dip, g1)
    return build_eulerian_schedule(g1_cycle, w, shape, TSIM)


class TestFGamma:
    def test_commuting_operator_fixed(self, g1, shape):
        zz = OperatorSum.from_label_terms([(1.0, {0: "X"})], 2)
        gens = [g for g in g1.generators if g.label == "x0"]
        got = f_gamma(zz, gens, shape)
        assert frobenius_norm(got - to_dense(zz)) < 1e-12

    def test_fine_grid_riemann_oracle(self, g1, shape):
        # average of Z0 over the X0 ramp and the Z0 ramp, 4096-node oracle
        z0 = to_dense(OperatorSum.from_label_terms([(1.0, {0: "Z"})], 2))
        got = f_gamma(z0, list(g1.generators), shape)
        acc = np.zeros_like(z0)
        taus = (np.arange(4096) + 0.5) * shape.duration / 4096
        for gen in g1.generators:
            prop = axis_propagator(to_dense(gen.control_axis))
            for theta in shape.cumulative_area(taus):
                u = prop(float(theta))
                acc += u.conj().T @ z0 @ u
        acc /= 2 * 4096
        assert frobenius_norm(got - acc) < 1e-7

    def test_trace_preserving(self, g1, shape, rng):
        a = random_operator_sum(rng, 2)
        got = f_gamma(a, list(g1.generators), shape)
        assert abs(np.trace(got) - np.trace(to_dense(a))) < 1e-12


class TestDecouplingResidual:
    def test_h_iso_under_g1(self, h_iso, g1, shape):
        assert decoupling_residual(h_iso, g1, list(g1.generators), shape) < 1e-10

    def test_dephasing_scheme_certificates(self, h_iso, g_dephasing, shape):
        gens = list(g_dephasing.generators)
        for op_terms in ([(1.0, {0: "X"})], [(1.0, {1: "X"})]):
            err = OperatorSum.from_label_terms(op_terms, 2)
            assert decoupling_residual(err, g_dephasing, gens, shape) < 1e-10
        assert decoupling_residual(h_iso, g_dephasing, gens, shape) < 1e-10

    def test_honeycomb_certificate(self, honeycomb_group, honeycomb_lattice,
                                   shape):
        ising, _ = models.honeycomb_hamiltonians(honeycomb_lattice, 1.0)
        assert decoupling_residual(
            ising, honeycomb_group, list(honeycomb_group.generators), shape
        ) < 1e-10

    def test_scale_covariance(self, h_iso, g1, shape):
        r1 = decoupling_residual(h_iso, g1, list(g1.generators), shape)
        h3 = OperatorSum([(3.0 * c, w) for c, w in h_iso.terms], 2)
        r3 = decoupling_residual(h3, g1, list(g1.generators), shape)
        assert r3 == pytest.approx(3.0 * r1, abs=1e-12)


class TestAvgHamiltonianFirst:
    def test_eulerian_dipolar_identity(self, dipolar_schedule, h_iso, h_dip):
        got = avg_hamiltonian_first(dipolar_schedule, h_iso)
        want = (TSIM / dipolar_schedule.cycle_time) * to_dense(h_dip)
        assert frobenius_norm(got - want) < 1e-10

    def test_pure_edd_vanishes(self, pauli2, shape, h_iso):
        cycle = eulerian_cycle(build_cayley_graph(pauli2), pauli2)
        s = build_eulerian_schedule(
            cycle, WeightAssignment.zero(pauli2), shape, TSIM
        )
        assert frobenius_norm(avg_hamiltonian_first(s, h_iso)) < 1e-10

    def test_bb_is_exact_convex_sum(self, h_iso, h_dip, g1):
        w = solve_weights(h_iso, h_dip, g1)
        s = build_bb_schedule(w, g1, TSIM)
        got = avg_hamiltonian_first(s, h_iso)
        hd = to_dense(h_iso)
        want = np.zeros_like(hd)
        for i, wi in w.nonzero_items():
            u = g1.elements[i]
            want += (wi * TSIM) * (u.conj().T @ hd @ u)
        want /= s.cycle_time
        assert frobenius_norm(got - want) < 1e-14

    def test_uniform_grid_riemann_oracle(self, dipolar_schedule, h_iso):
        # brute-force 10^4-step midpoint integral of the toggled Hamiltonian
        hd = to_dense(h_iso)
        n = 10**4
        tc = dipolar_schedule.cycle_time
        acc = np.zeros_like(hd)
        for t in (np.arange(n) + 0.5) * tc / n:
            u = control_propagator_at(dipolar_schedule, float(t))
            acc += u.conj().T @ hd @ u
        acc /= n
        got = avg_hamiltonian_first(dipolar_schedule, h_iso)
        assert frobenius_norm(got - acc) < 1e-7

    def test_linear_in_h(self, dipolar_schedule, rng):
        a = random_operator_sum(rng, 2)
        b = random_operator_sum(rng, 2)
        ab = OperatorSum(a.terms + tuple((2.0 * c, w) for c, w in b.terms), 2)
        got = avg_hamiltonian_first(dipolar_schedule, ab)
        want = avg_hamiltonian_first(dipolar_schedule, a) + 2.0 * (
            avg_hamiltonian_first(dipolar_schedule, b)
        )
        assert frobenius_norm(got - want) < 1e-10

    def test_hermitian_output(self, dipolar_schedule, h_iso):
        got = avg_hamiltonian_first(dipolar_schedule, h_iso)
        assert frobenius_norm(got - got.conj().T) < 1e-12


class TestSymmetricSecondOrder:
    def test_second_magnus_term_vanishes(self, h_iso, h_dip, g1, g1_cycle,
                                         shape):
        w = solve_weights(h_iso, h_dip, g1)
        sym = build_symmetric_schedule(g1_cycle, w, shape, TSIM)
        h1 = magnus_second_term(sym, h_iso)
        assert frobenius_norm(h1) < 1e-8

    def test_plain_second_term_does_not_vanish(self, dipolar_schedule, h_iso):
        h1 = magnus_second_term(dipolar_schedule, h_iso)
        assert frobenius_norm(h1) > 1e-4


class TestMagnusEstimate:
    def test_zero_time(self, h_iso):
        assert magnus_error_estimate(h_iso, 0.0, kappa=1) == 0.0

    def test_formula(self, h_iso):
        # ||H_iso|| = 3, so t ||H|| = 0.1 at t = 1/30
        got = magnus_error_estimate(h_iso, 0.1 / 3.0, kappa=1)
        assert got == pytest.approx(0.01, abs=1e-12)

    def test_halving_time_quarters_estimate(self, h_iso):
        full = magnus_error_estimate(h_iso, 0.2, kappa=1)
        half = magnus_error_estimate(h_iso, 0.1, kappa=1)
        assert full == pytest.approx(4.0 * half, rel=1e-12)

    def test_convergence_warning(self, h_iso):
        with pytest.warns(UserWarning, match="convergence"):
            magnus_error_estimate(h_iso, 2.0, kappa=1)


class TestAverageReport:
    def test_report_fields(self, dipolar_schedule, h_iso, h_dip):
        report = build_average_report(dipolar_schedule, h_iso, h_dip)
        assert report.passed
        assert report.residual_norm < 1e-9
        assert report.decoupling_residuals["system"] < 1e-10
        assert report.magnus_bound_estimate > 0
        d = report.to_dict()
        assert d["passed"] is True
        assert d["magnus_constant_is_assumed_unity"] is True
