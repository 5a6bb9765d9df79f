from fractions import Fraction

import numpy as np
import pytest

from gknextend.catalog import build_example, sabotage_rows
from gknextend.collocation import make_grid
from gknextend.expressions import Fourier, TraceVector, boundary_form
from gknextend.extension import (
    ExtensionSpace,
    OperatorB,
    PartialGKNSet,
    boundary_conditions_from_rows,
    build_model,
    extended_deficiency_vectors,
)
from gknextend.polynomials import Poly
from gknextend.spectral import (
    SpectralError,
    assemble,
    characteristic_value,
    eigenrelation_residual,
    shooting_oracle,
    spectrum,
    symmetry_defect,
)

# first eigenvalue of the one-atom endpoint-coupled model at alpha = 0 on [0, 1]:
# root of sqrt(l) cos sqrt(l) = l sin sqrt(l), frozen from an independent
# high-precision bisection
LAMBDA_31_ALPHA0 = 0.740173884394967


@pytest.fixture(scope="module")
def grid01():
    return make_grid(64, 0.0, 1.0)


def fourier_k0_model(a=0.0, b=1.0):
    """Classical path: empty extension space, plain boundary conditions."""
    expr = Fourier(Fraction(a).limit_denominator(10**6), Fraction(b).limit_denominator(10**6))
    bf = boundary_form(expr)
    return build_model(bf, ExtensionSpace(0, np.zeros((0, 0))), OperatorB.zero(0), PartialGKNSet(()))


class TestAssemble:
    def test_dimension_bookkeeping_3_1(self, grid01):
        entry = build_example("fourier_3_1")
        op = assemble(entry.model, entry.boundary_conditions(), grid01)
        assert op.reduced_dim == (65 + 1) - 2

    def test_dimension_bookkeeping_legendre(self):
        entry = build_example("legendre_type")
        grid = make_grid(64, -1.0, 1.0)
        op = assemble(entry.model, entry.boundary_conditions(), grid)
        assert op.reduced_dim == (65 + 2) - 2

    def test_dimension_bookkeeping_first_order(self, grid01):
        entry = build_example("first_order")
        op = assemble(entry.model, entry.boundary_conditions(), grid01)
        assert op.reduced_dim == (65 + 1) - 1

    def test_domain_basis_satisfies_constraints(self, grid01):
        entry = build_example("fourier_3_5")
        bc = entry.boundary_conditions()
        op = assemble(entry.model, bc, grid01)
        from gknextend.spectral import _trace_lift

        resid = np.abs(bc.canonical @ _trace_lift(op) @ op.P).max()
        assert resid < 1e-10

    def test_refuses_tiny_grid(self):
        # fourth-order expression needs N >= 2*4 + 4
        entry = build_example("legendre_type")
        with pytest.raises(SpectralError, match="too small"):
            assemble(entry.model, entry.boundary_conditions(), make_grid(8, -1.0, 1.0))

    def test_refuses_wrong_interval(self):
        entry = build_example("fourier_3_1")
        with pytest.raises(SpectralError, match="interval"):
            assemble(entry.model, entry.boundary_conditions(), make_grid(64, 0.0, 2.0))


class TestSymmetryDefect:
    def test_honest_build_is_tiny(self, grid01):
        entry = build_example("fourier_3_1", {"alpha": 1.0})
        op = assemble(entry.model, entry.boundary_conditions(), grid01)
        assert symmetry_defect(op, trials=20, seed=3) <= 1e-9

    def test_sabotaged_build_is_large(self, grid01):
        entry = build_example("fourier_3_1", {"alpha": 1.0})
        bc = entry.boundary_conditions()
        bad = boundary_conditions_from_rows(entry.model, sabotage_rows(bc, 4))
        op = assemble(entry.model, bad, grid01)
        assert symmetry_defect(op, trials=20, seed=3) >= 1e-3

    def test_deterministic_given_seed(self, grid01):
        entry = build_example("fourier_3_3")
        op = assemble(entry.model, entry.boundary_conditions(), grid01)
        assert symmetry_defect(op, seed=7) == symmetry_defect(op, seed=7)

    def test_legendre_polynomial_subspace(self):
        entry = build_example("legendre_type")
        grid = make_grid(64, -1.0, 1.0)
        op = assemble(entry.model, entry.boundary_conditions(), grid)
        assert symmetry_defect(op, trials=20, seed=0, poly_degree=12) <= 1e-9


class TestSpectrum:
    def test_periodic_fourier_classical(self):
        # periodic conditions via the k = 0 path on [0, 2 pi]
        model = fourier_k0_model(0.0, 2 * np.pi)
        cands = [
            (TraceVector((1, 0, 1, 0)), np.zeros(0)),
            (TraceVector((0, 1, 0, 1)), np.zeros(0)),
        ]
        from gknextend.extension import derive_boundary_conditions

        bc = derive_boundary_conditions(model, cands)
        grid = make_grid(64, 0.0, 2 * np.pi)
        op = assemble(model, bc, grid)
        rep = spectrum(op, 5)
        expected = np.array([0.0, 1.0, 1.0, 4.0, 4.0])
        assert np.abs(np.sort(rep.eigenvalues.real) - expected).max() < 1e-6
        assert rep.max_imag < 1e-8

    def test_example_3_1_first_eigenvalue_regression(self, grid01):
        entry = build_example("fourier_3_1", {"alpha": 0.0})
        op = assemble(entry.model, entry.boundary_conditions(), grid01)
        rep = spectrum(op, 3)
        lam1 = sorted(rep.eigenvalues.real, key=abs)[0]
        assert abs(lam1 - LAMBDA_31_ALPHA0) < 1e-9

    def test_example_2_real_spectrum(self, grid01):
        entry = build_example("first_order", {"alpha": 0.0})
        op = assemble(entry.model, entry.boundary_conditions(), grid01)
        rep = spectrum(op, 10)
        assert rep.max_imag <= 1e-6

    def test_grid_convergence_3_1(self):
        entry = build_example("fourier_3_1", {"alpha": 1.0})
        bc = entry.boundary_conditions()
        lams = []
        for N in (32, 64):
            op = assemble(entry.model, bc, make_grid(N, 0.0, 1.0))
            lams.append(sorted(spectrum(op, 3).eigenvalues.real, key=abs)[0])
        assert abs(lams[0] - lams[1]) <= 1e-8

    def test_count_bound(self, grid01):
        entry = build_example("fourier_3_1")
        op = assemble(entry.model, entry.boundary_conditions(), grid01)
        with pytest.raises(SpectralError):
            spectrum(op, op.reduced_dim + 1)


class TestShootingOracle:
    def test_dirichlet_sanity(self):
        # classical two-condition path: x(a) = x(b) = 0 gives n^2 pi^2
        model = fourier_k0_model()
        rows = np.array([[1, 0, 0, 0], [0, 0, 1, 0]], dtype=complex)
        bc = boundary_conditions_from_rows(model, rows)
        roots = shooting_oracle(model, bc, (1.0, 100.0))
        expected = np.array([np.pi**2, 4 * np.pi**2, 9 * np.pi**2])
        assert np.abs(np.array(roots[:3]) - expected).max() < 1e-7

    def test_example_3_1_alpha0_first_root(self):
        entry = build_example("fourier_3_1", {"alpha": 0.0})
        roots = shooting_oracle(entry.model, entry.boundary_conditions(), (0.1, 5.0))
        assert len(roots) == 1
        assert abs(roots[0] - LAMBDA_31_ALPHA0) < 1e-9

    def test_lambda_zero_eigenvalue_detected(self):
        # alpha chosen so lambda = 0 is an eigenvalue: x linear, x(a) = 0,
        # a_W = x(b), W row alpha x(b) + x'(b) = 0 at x = u gives alpha = -1
        entry = build_example("fourier_3_1", {"alpha": -1.0})
        roots = shooting_oracle(entry.model, entry.boundary_conditions(), (-0.5, 0.5))
        assert any(abs(r) < 1e-9 for r in roots)

    def test_empty_window(self):
        entry = build_example("fourier_3_1", {"alpha": 0.0})
        roots = shooting_oracle(entry.model, entry.boundary_conditions(), (200.0, 230.0))
        assert roots == []

    def test_first_order_characteristic_closed_form(self):
        alpha = 0.75
        entry = build_example("first_order", {"alpha": alpha})
        bc = entry.boundary_conditions()
        for lam in (-3.3, 0.4, 7.9):
            got = characteristic_value(entry.model, bc, lam)
            expected = 2 * ((alpha - lam) * np.cos(lam / 2) - 2 * np.sin(lam / 2))
            # overall scaling of the determinant is fixed by the canonical rows
            assert abs(got - expected) < 1e-8 * (1 + abs(expected))


class TestEigenRelationResidual:
    def test_zero_vector(self, grid01):
        entry = build_example("fourier_3_1")
        r = eigenrelation_residual(entry.model, grid01, Poly(), np.zeros(1), 3.0)
        assert r == 0.0

    def test_deficiency_vectors_at_plus_minus_i(self, grid01):
        for name in ("first_order", "fourier_3_1", "fourier_3_3"):
            entry = build_example(name)
            for sign in (+1, -1):
                for v in extended_deficiency_vectors(entry.model, sign):
                    r = eigenrelation_residual(
                        entry.model, grid01, v.solution, v.a, sign * 1j
                    )
                    assert r <= 1e-8, (name, sign, r)

    def test_legendre_linear_eigenvector(self):
        entry = build_example("legendre_type", {"A": 1.0})
        grid = make_grid(64, -1.0, 1.0)
        p = Poly([0, 1])
        a = np.array([-1.0, 1.0])
        r = eigenrelation_residual(entry.model, grid, p, a, 8.0)
        assert r <= 1e-10
