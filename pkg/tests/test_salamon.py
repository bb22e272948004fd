import random
from fractions import Fraction

import pytest

from hktcalc import exact_linalg as ela
from hktcalc.batteries import random_kform
from hktcalc.forms import KForm, multi_indices, operator_matrix, pullback_operator, vector_to_form
from hktcalc.salamon import (
    DegreeError,
    a11_subspace,
    bundle_B,
    condition_rank,
    eta2_closed_form,
    is_salamon_11,
    proj_formula_D,
    salamon_D,
    salamon_DI,
)
from hktcalc.scalars import Polynomial, random_polynomial
from hktcalc.structures import random_sphere_points

from conftest import flat_form, quarter_norm_potential


class TestBundleDimensions:
    def test_n1_b3_is_everything(self, model1):
        sub = bundle_B(model1, 3)
        assert sub.rank == 4 == len(multi_indices(4, 3))

    def test_n1_b2_dimension(self, model1):
        assert bundle_B(model1, 2).rank == 3

    def test_n1_a11_dimension(self, model1):
        assert a11_subspace(model1).rank == 1

    def test_n2_dimensions(self, model2):
        # Frozen from the exact null-space computation.
        assert bundle_B(model2, 2).rank == 10
        assert bundle_B(model2, 3).rank == 40
        assert a11_subspace(model2).rank == 6

    def test_n2_rank_stable_under_extra_sphere_points(self, model2):
        base = condition_rank(model2, 3)
        extra = random_sphere_points(5, seed=77)
        assert condition_rank(model2, 3, extra) == base

    def test_unsupported_degree(self, model1):
        with pytest.raises(DegreeError):
            bundle_B(model1, 4)

    def test_b_invariant_under_structure_pullbacks(self, model1, model2):
        for model in (model1, model2):
            for k in (2, 3):
                sub = bundle_B(model, k)
                for name in ("I", "J", "K"):
                    mat = operator_matrix(pullback_operator(model.matrix(name), k, model.dim), k, model.dim)
                    for vec in sub.basis:
                        assert sub.contains(ela.mat_vec(mat, vec))


class TestEta:
    def test_fixes_flat_kahler_form(self, table1):
        f = flat_form("I")
        assert table1.eta(f) == f

    def test_kills_anti_self_dual(self, table1):
        asd = KForm(2, 4, {(0, 1): Polynomial.constant(4, 1), (2, 3): Polynomial.constant(4, -1)})
        assert table1.eta(asd).is_zero()

    def test_idempotent_on_random_forms(self, table1, table2):
        rng = random.Random(50)
        for table in (table1, table2):
            for i in range(25):
                w = random_kform(table.model.dim, 2 + i % 2, rng)
                once = table.eta(w)
                assert table.eta(once) == once

    def test_identity_on_low_degrees(self, table1):
        rng = random.Random(51)
        f = random_kform(4, 0, rng)
        th = random_kform(4, 1, rng)
        assert table1.eta(f) == f
        assert table1.eta(th) == th

    def test_degree_above_three_rejected(self, table1):
        with pytest.raises(DegreeError):
            table1.eta(KForm.basis(4, (0, 1, 2, 3)))

    def test_rank_splitting(self, table1, table2):
        for table in (table1, table2):
            for k in (2, 3):
                total = len(multi_indices(table.model.dim, k))
                b_rank = table.b_basis(k).rank
                eta_rank = ela.rank(table.eta_matrix(k))
                assert b_rank + eta_rank == total

    def test_closed_form_matches_matrix_projector(self, model1, table1, model2, table2):
        rng = random.Random(52)
        for model, table in ((model1, table1), (model2, table2)):
            for _ in range(15):
                w = random_kform(model.dim, 2, rng)
                assert eta2_closed_form(model, w) == table.eta(w)

    def test_alternative_hyperhermitian_inner_product_gives_same_projector(self, model2, table2):
        # Diagonal hyperhermitian metric with blocks (1,1,1,1,2,2,2,2):
        # the induced fiber weights change the inner product but not the
        # projector, because both summands are invariant subspaces.
        diag = [Fraction(1)] * 4 + [Fraction(2)] * 4
        for k in (2, 3):
            weights = []
            for idx in multi_indices(8, k):
                w = Fraction(1)
                for i in idx:
                    w *= diag[i]
                weights.append(w)
            sub = table2.b_basis(k)
            alt = ela.projector_onto_complement(sub.basis, sub.ambient_dim, weights)
            assert ela.mat_eq(alt, table2.eta_matrix(k))


class TestProjectedDifferential:
    @pytest.mark.parametrize("n", [1, 2])
    def test_d_squared_zero(self, n, table1, table2):
        table = table1 if n == 1 else table2
        rng = random.Random(60 + n)
        for _ in range(15):
            theta = random_kform(table.model.dim, 1, rng)
            assert salamon_D(table, salamon_D(table, theta)).is_zero()

    def test_two_code_paths_agree(self, table1):
        rng = random.Random(61)
        theta = KForm(1, 4, {(0,): Polynomial.variable(4, 1)})
        assert salamon_D(table1, theta) == proj_formula_D(table1.model, theta)
        for _ in range(20):
            theta = random_kform(4, 1, rng)
            assert salamon_D(table1, theta) == proj_formula_D(table1.model, theta)

    def test_d_of_exact_form_vanishes(self, table1):
        f = KForm.from_polynomial(random_polynomial(4, 3, 4, seed=62))
        assert salamon_D(table1, salamon_D(table1, f)).is_zero()

    def test_degree_limit(self, table1):
        with pytest.raises(DegreeError):
            salamon_D(table1, KForm.basis(4, (0, 1, 2)))


class TestTwistedProjectedDifferential:
    def test_affine_potential_gives_zero(self, table1):
        f = KForm.from_polynomial(Polynomial.variable(4, 2) * 5 + Polynomial.constant(4, 1))
        assert salamon_D(table1, salamon_DI(table1, f)).is_zero()

    def test_flat_potential_reproduces_kahler_form(self, table1):
        mu = KForm.from_polynomial(quarter_norm_potential(4))
        dd = salamon_D(table1, salamon_DI(table1, mu))
        assert dd == flat_form("I")

    def test_equals_twisted_d_on_functions(self, table1):
        f = KForm.from_polynomial(random_polynomial(4, 3, 3, seed=63))
        assert salamon_DI(table1, f) == table1.model.operator("I").twisted_d(f)


class TestSalamonType:
    def test_flat_form_is_11(self, model1):
        assert is_salamon_11(model1, flat_form("I")).ok

    def test_plain_two_form_is_not(self, model1):
        res = is_salamon_11(model1, KForm.basis(4, (0, 1)))
        assert not res.ok
        assert not res.residual_j.is_zero()

    def test_k_residual_follows(self, model1, model2):
        # On the computed A^{1,1} fiber the K residual vanishes with I, J.
        rng = random.Random(64)
        for model in (model1, model2):
            sub = a11_subspace(model)
            basis = multi_indices(model.dim, 2)
            acc = KForm.zero(2, model.dim)
            for vec in sub.basis:
                poly = random_polynomial(model.dim, 2, 2, seed=rng.randrange(10**6))
                acc = acc + vector_to_form(vec, basis, 2, model.dim) * poly
            res = is_salamon_11(model, acc)
            assert res.ok and res.residual_k.is_zero()

    def test_wrong_degree(self, model1):
        with pytest.raises(ValueError):
            is_salamon_11(model1, KForm.dx(4, 0))


class TestProjectorExport:
    def test_json_shape(self, table1):
        doc = table1.to_json()
        assert doc["n"] == 1
        assert set(doc["eta"]) == {"2", "3"}
        mat = doc["eta"]["2"]
        assert len(mat) == 6 and len(mat[0]) == 6
