import random
from fractions import Fraction

import pytest

from hktcalc.batteries import random_kform
from hktcalc.forms import (
    BilinearForm,
    KForm,
    hessian,
    multi_indices,
    operator_matrix,
    pullback_operator,
)
from hktcalc.scalars import GAUSSIAN, Polynomial, random_polynomial

from conftest import norm_squared


def x(i, dim=4):
    return Polynomial.variable(dim, i)


class TestWedge:
    def test_basis_two_form(self):
        w = KForm.dx(4, 0).wedge(KForm.dx(4, 1))
        assert w == KForm(2, 4, {(0, 1): Polynomial.constant(4, 1)})

    def test_alternation(self):
        assert KForm.dx(4, 0).wedge(KForm.dx(4, 0)).is_zero()

    def test_even_degree_commutes(self):
        a = KForm.basis(4, (0, 1))
        b = KForm.basis(4, (2, 3))
        assert a.wedge(b) == b.wedge(a)

    def test_graded_sign(self):
        rng = random.Random(0)
        for i in range(30):
            ka, kb = 1 + i % 2, 1 + (i // 2) % 2
            a = random_kform(4, ka, rng)
            b = random_kform(4, kb, rng)
            sign = Fraction(-1) if (ka * kb) % 2 else Fraction(1)
            assert a.wedge(b) == b.wedge(a) * sign

    def test_over_degree_is_zero(self):
        a = KForm.basis(4, (0, 1, 2))
        b = KForm.basis(4, (1, 2, 3))
        assert a.wedge(b).is_zero()
        assert a.wedge(b).degree == 6

    def test_unsorted_basis_input_sign(self):
        assert KForm.basis(4, (1, 0)) == -KForm.basis(4, (0, 1))


class TestExteriorDerivative:
    def test_d_of_x0_dx1(self):
        w = KForm(1, 4, {(1,): x(0)})
        assert w.d() == KForm.basis(4, (0, 1))

    def test_leibniz_on_functions(self):
        f = KForm.from_polynomial(x(0) * x(1))
        expected = KForm(1, 4, {(0,): x(1), (1,): x(0)})
        assert f.d() == expected

    def test_d_squared_zero_random(self):
        rng = random.Random(1)
        for i in range(100):
            w = random_kform(4, i % 4, rng)
            assert w.d().d().is_zero()

    def test_graded_leibniz(self):
        rng = random.Random(2)
        for i in range(30):
            ka = i % 3
            a = random_kform(4, ka, rng)
            b = random_kform(4, 1 + i % 2, rng)
            sign = Fraction(-1) if ka % 2 else Fraction(1)
            assert a.wedge(b).d() == a.d().wedge(b) + a.wedge(b.d()) * sign

    def test_top_degree(self):
        top = KForm.basis(4, (0, 1, 2, 3))
        assert top.d().is_zero()


class TestPullback:
    def test_identity(self):
        rng = random.Random(3)
        ident = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
        for k in (0, 1, 2, 3):
            w = random_kform(4, k, rng)
            assert w.pullback(ident) == w

    def test_slots_only_dx01_under_standard_i(self, model1):
        w = KForm.basis(4, (0, 1))
        assert w.pullback(model1.I) == w

    def test_contravariant_functoriality(self):
        rng = random.Random(4)
        for seed in range(10):
            a = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
            b = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
            ba = [[sum(b[i][k] * a[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
            w = random_kform(4, 2, rng)
            assert w.pullback(b).pullback(a) == w.pullback(ba)

    def test_linearity(self):
        rng = random.Random(5)
        a = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
        u = random_kform(4, 2, rng)
        v = random_kform(4, 2, rng)
        assert (u + v).pullback(a) == u.pullback(a) + v.pullback(a)

    def test_coefficient_composition_mode(self):
        # p(x) = x0 pulled back through A must become sum_j A[0][j] x_j.
        a = [[Fraction(0), Fraction(2), Fraction(0), Fraction(0)],
             [Fraction(1), Fraction(0), Fraction(0), Fraction(0)],
             [Fraction(0), Fraction(0), Fraction(1), Fraction(0)],
             [Fraction(0), Fraction(0), Fraction(0), Fraction(1)]]
        w = KForm.from_polynomial(x(0))
        moved = w.pullback(a, compose_coefficients=True)
        assert moved == KForm.from_polynomial(x(1) * 2)

    def test_full_pullback_functorial(self):
        rng = random.Random(6)
        a = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
        b = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
        ba = [[sum(b[i][k] * a[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
        w = KForm(1, 4, {(2,): x(0) * x(3)})
        lhs = w.pullback(b, compose_coefficients=True).pullback(a, compose_coefficients=True)
        assert lhs == w.pullback(ba, compose_coefficients=True)


class TestHessian:
    def test_half_norm_squared(self):
        h = hessian(norm_squared(4) * Fraction(1, 2))
        assert h == BilinearForm.from_constant([[1 if i == j else 0 for j in range(4)] for i in range(4)])

    def test_cross_term(self):
        h = hessian(x(0) * x(1))
        expected = [[0] * 4 for _ in range(4)]
        expected[0][1] = expected[1][0] = 1
        assert h == BilinearForm.from_constant(expected)

    def test_affine_vanishes(self):
        f = x(0) * 3 - x(2) + Polynomial.constant(4, 5)
        assert hessian(f).is_zero()

    def test_symmetry_random(self):
        for seed in range(10):
            h = hessian(random_polynomial(4, 4, 5, seed=seed))
            assert h.symmetric


class TestFormEvaluation:
    def test_coefficient_evaluation(self):
        w = KForm(1, 4, {(1,): x(0)})
        val = w.evaluate((2, 0, 0, 0))
        assert val.components == {(1,): Fraction(2)}

    def test_evaluation_commutes_with_wedge(self):
        rng = random.Random(7)
        for _ in range(20):
            a = random_kform(4, 1, rng)
            b = random_kform(4, 2, rng)
            pt = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(4)]
            assert a.wedge(b).evaluate(pt) == a.evaluate(pt).wedge(b.evaluate(pt))

    def test_d_against_central_differences(self):
        # (dw)_J at a point vs central differences of the components of w.
        rng = random.Random(8)
        h = 1e-4
        w = random_kform(4, 1, rng, n_components=3)
        dw = w.d()
        pt = [0.3, -0.2, 0.5, 0.1]
        for (a, b), poly in dw.terms.items():
            exact = poly.evaluate(pt)
            approx = 0.0
            # (dw)(e_a, e_b) = d_a w_b - d_b w_a by finite differences
            for sign, diff_axis, comp in ((1, a, (b,)), (-1, b, (a,))):
                up = list(pt)
                down = list(pt)
                up[diff_axis] += h
                down[diff_axis] -= h
                w_up = w.coefficient(comp).evaluate(up)
                w_down = w.coefficient(comp).evaluate(down)
                approx += sign * (w_up - w_down) / (2 * h)
            assert abs(exact - approx) < 5e-6

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            KForm.dx(4, 0).evaluate((1, 2))


class TestBilinearForm:
    def test_symmetry_flag_validation(self):
        bad = [[Polynomial.constant(2, 0), Polynomial.constant(2, 1)],
               [Polynomial.constant(2, 2), Polynomial.constant(2, 0)]]
        with pytest.raises(ValueError):
            BilinearForm(bad, symmetric=True)

    def test_conjugation_by_orthogonal_preserves_identity(self, model1):
        ident = BilinearForm.from_constant([[1 if i == j else 0 for j in range(4)] for i in range(4)])
        assert ident.conjugate_by(model1.I) == ident

    def test_trace(self):
        h = hessian(norm_squared(4))
        assert h.trace() == Polynomial.constant(4, 8)


class TestKFormJson:
    def test_round_trip(self):
        rng = random.Random(9)
        w = random_kform(4, 2, rng, n_components=3)
        assert KForm.from_json(w.to_json()) == w

    def test_round_trip_gaussian(self):
        w = KForm(2, 4, {(0, 1): random_polynomial(4, 2, 3, seed=31, field=GAUSSIAN)})
        assert KForm.from_json(w.to_json()) == w

    def test_schema_keys(self):
        doc = KForm.basis(4, (0, 2)).to_json()
        assert set(doc) == {"k", "dim", "terms"}
        assert doc["terms"][0]["idx"] == [0, 2]


class TestOperatorMatrix:
    def test_pullback_matrix_identity(self):
        ident = [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]
        op = pullback_operator(ident, 2, 4)
        mat = operator_matrix(op, 2, 4)
        n = len(multi_indices(4, 2))
        assert mat == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
