"""Form-bundle splitting and the projected differential.

For degree k <= 3 the fiber of Lambda^k splits into the part generated by
the extreme types (k,0)+(0,k) over the whole sphere of structures and its
complement B^k; the projection *eta* kills B^k, and the projected
differential is D = eta o d.

"For every structure on the sphere" is a quadratic condition in the sphere
coordinates, so it reduces to finitely many exact linear conditions:

* degree 2:  the fixed locus of the three slots-only pullbacks, i.e.
  { w : Iw = w, Jw = w, Kw = w };
* degree 3:  six conditions built from the symmetrized two-slot insertion
  S(A, B):  S(I,I)w = S(J,J)w = S(K,K)w = w  and
  S(I,J)w = S(J,K)w = S(K,I)w = 0.

Both reductions are exactly equivalent to the all-sphere condition (the
quadratic form in (a, b, c) vanishes on the sphere iff all six symmetric
coefficients vanish); rank stability under extra random sphere points is
asserted separately as a guard.

Eta is computed once per (n, k) as an exact matrix: the projector onto the
orthogonal complement of B^k for the flat inner product on the fiber.  Any
constant hyperhermitian inner product gives the same projector because both
summands are invariant under the group the structures generate; the test
suite checks this rather than assuming it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import exact_linalg as ela
from .forms import (
    KForm,
    FiberOperator,
    apply_operator,
    form_to_vector,
    insertion_operator,
    multi_indices,
    operator_matrix,
    pair_insertion_operator,
    pullback_operator,
)
from .structures import HypercomplexModel, SpherePoint


class DegreeError(ValueError):
    """Requested degree is outside the supported range."""


@dataclass
class FiberSubspace:
    """An exact-basis subspace of the k-form fiber."""

    degree: int
    ambient_dim: int
    basis: list[list[Fraction]]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vector: Sequence[Fraction]) -> bool:
        return ela.in_span(self.basis, list(vector))

    def contains_form(self, form: KForm) -> bool:
        """Constant-coefficient membership test, coefficient-wise.

        Every coefficient polynomial of `form` must be constant for a fiber
        statement to make sense; polynomial forms are tested pointwise by
        the callers instead.
        """
        basis_idx = multi_indices(form.dim, self.degree)
        vec = [p.constant_term() for p in form_to_vector(form, basis_idx)]
        return self.contains(vec)


def _stack(matrices: Sequence[Sequence[Sequence[Fraction]]]) -> list[list[Fraction]]:
    rows: list[list[Fraction]] = []
    for m in matrices:
        rows.extend(list(r) for r in m)
    return rows


def _condition_matrices(model: HypercomplexModel, k: int,
                        points: Sequence[SpherePoint] | None = None) -> list:
    """The exact linear conditions cutting out B^k (degree 2 or 3)."""
    dim = model.dim
    n_fiber = len(multi_indices(dim, k))
    ident = ela.identity(n_fiber)
    mats = []
    if k == 2:
        for name in ("I", "J", "K"):
            op = pullback_operator(model.matrix(name), 2, dim)
            mats.append(ela.mat_sub(operator_matrix(op, 2, dim), ident))
        for pt in points or ():
            op = _sphere_pullback(model, pt, 2)
            mats.append(ela.mat_sub(operator_matrix(op, 2, dim), ident))
        return mats
    if k == 3:
        pairs = [("I", "I"), ("J", "J"), ("K", "K"), ("I", "J"), ("J", "K"), ("K", "I")]
        for a, b in pairs:
            op = pair_insertion_operator(model.matrix(a), model.matrix(b), 3, dim)
            mat = operator_matrix(op, 3, dim)
            if a == b:
                mat = ela.mat_sub(mat, ident)
            mats.append(mat)
        for pt in points or ():
            op = _sphere_insertion2(model, pt)
            mats.append(ela.mat_sub(operator_matrix(op, 3, dim), ident))
        return mats
    raise DegreeError(f"bundle computation supports degrees 2 and 3, got {k}")


def _sphere_matrix(model: HypercomplexModel, pt: SpherePoint):
    return [
        [pt.a * model.I[r][c] + pt.b * model.J[r][c] + pt.c * model.K[r][c]
         for c in range(model.dim)]
        for r in range(model.dim)
    ]


def _sphere_pullback(model: HypercomplexModel, pt: SpherePoint, k: int) -> FiberOperator:
    return pullback_operator(_sphere_matrix(model, pt), k, model.dim)


def _sphere_insertion2(model: HypercomplexModel, pt: SpherePoint) -> FiberOperator:
    return insertion_operator(_sphere_matrix(model, pt), 3, model.dim, 2)


def bundle_B(model: HypercomplexModel, k: int,
             extra_points: Sequence[SpherePoint] | None = None) -> FiberSubspace:
    """Exact basis of B^k (k in {2, 3}) as a null-space computation."""
    if k not in (2, 3):
        raise DegreeError(f"bundle_B supports k in {{2, 3}}, got {k}")
    stacked = _stack(_condition_matrices(model, k, extra_points))
    basis = ela.null_space(stacked)
    return FiberSubspace(k, len(multi_indices(model.dim, k)), basis)


def condition_rank(model: HypercomplexModel, k: int,
                   extra_points: Sequence[SpherePoint] | None = None) -> int:
    """Rank of the stacked condition matrix (for stability checks)."""
    return ela.rank(_stack(_condition_matrices(model, k, extra_points)))


def a11_subspace(model: HypercomplexModel) -> FiberSubspace:
    """The fiber of 2-forms with Iw = w and Jw = -w (slots-only)."""
    dim = model.dim
    n_fiber = len(multi_indices(dim, 2))
    ident = ela.identity(n_fiber)
    p_i = operator_matrix(pullback_operator(model.I, 2, dim), 2, dim)
    p_j = operator_matrix(pullback_operator(model.J, 2, dim), 2, dim)
    stacked = _stack([ela.mat_sub(p_i, ident), ela.mat_add(p_j, ident)])
    return FiberSubspace(2, n_fiber, ela.null_space(stacked))


class ProjectorTable:
    """Cached exact fiber projectors eta_k for k <= 3.

    Construction is eager, so a fully built table is read-only and safe to
    query concurrently.
    """

    def __init__(self, model: HypercomplexModel, max_degree: int = 3):
        if max_degree > 3:
            raise DegreeError("projectors are available for degrees <= 3")
        self.model = model
        self.b_bases: dict[int, FiberSubspace] = {}
        self.matrices: dict[int, list[list[Fraction]]] = {}
        self.columns: dict[int, FiberOperator] = {}
        for k in range(2, max_degree + 1):
            sub = bundle_B(model, k)
            self.b_bases[k] = sub
            proj = ela.projector_onto_complement(sub.basis, sub.ambient_dim)
            self.matrices[k] = proj
            self.columns[k] = self._columns(proj, k)

    def _columns(self, proj, k: int) -> FiberOperator:
        basis = multi_indices(self.model.dim, k)
        op: FiberOperator = {}
        for j, in_idx in enumerate(basis):
            col = [(basis[i], proj[i][j]) for i in range(len(basis)) if proj[i][j]]
            op[in_idx] = col
        return op

    def eta_matrix(self, k: int):
        if k in (0, 1):
            return ela.identity(len(multi_indices(self.model.dim, k)))
        if k not in self.matrices:
            raise DegreeError(f"eta is available for degrees <= 3, got {k}")
        return self.matrices[k]

    def eta(self, form: KForm) -> KForm:
        """Project a polynomial form fiberwise onto the complement of B."""
        if form.dim != self.model.dim:
            raise ValueError("dimension mismatch")
        if form.degree in (0, 1):
            return form
        if form.degree not in self.columns:
            raise DegreeError(f"eta is available for degrees <= 3, got {form.degree}")
        return apply_operator(self.columns[form.degree], form)

    def b_basis(self, k: int) -> FiberSubspace:
        if k not in self.b_bases:
            raise DegreeError(f"no B basis for degree {k}")
        return self.b_bases[k]

    def to_json(self) -> dict:
        """Exact projector matrices for golden-file comparisons."""
        out = {}
        for k, mat in self.matrices.items():
            out[str(k)] = [[[str(x.numerator), str(x.denominator)] for x in row] for row in mat]
        return {"n": self.model.n, "eta": out}


def salamon_D(table: ProjectorTable, form: KForm) -> KForm:
    """D = eta o d on degrees <= 2."""
    if form.degree > 2:
        raise DegreeError(f"D is defined here for degrees <= 2, got {form.degree}")
    return table.eta(form.d())


def salamon_DI(table: ProjectorTable, form: KForm) -> KForm:
    """The twisted projected differential (-1)^k I D I on degrees <= 2."""
    if form.degree > 2:
        raise DegreeError(f"D_I is defined here for degrees <= 2, got {form.degree}")
    op_i = table.model.operator("I")
    out = op_i.act(salamon_D(table, op_i.act(form)))
    return out if form.degree % 2 == 0 else -out


def eta2_closed_form(model: HypercomplexModel, form: KForm) -> KForm:
    """The closed-form degree-2 projector (1/2)(1-I) + (1/4)(1+I)(1-J).

    All actions slots-only; on 2-forms these agree with the signed action.
    Kept as an independent code path and compared with the matrix
    projector in the tests.
    """
    if form.degree != 2:
        raise ValueError("expected a 2-form")
    op_i = model.operator("I")
    op_j = model.operator("J")
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)
    part1 = (form - op_i.pullback(form)) * half
    tmp = form - op_j.pullback(form)
    part2 = (tmp + op_i.pullback(tmp)) * quarter
    return part1 + part2


def proj_formula_D(model: HypercomplexModel, theta: KForm) -> KForm:
    """D on 1-forms via the explicit type-projection formula.

    D(theta) = (dtheta)^{2,0} + (dtheta)^{0,2}
               + (1/2)((dtheta)^{1,1} - J (dtheta)^{1,1}),
    with types taken for I.  Independent of the matrix projector.
    """
    if theta.degree != 1:
        raise ValueError("expected a 1-form")
    w = theta.d()
    op_i = model.operator("I")
    op_j = model.operator("J")
    half = Fraction(1, 2)
    extreme = (w - op_i.pullback(w)) * half     # (2,0) + (0,2), real form
    w11 = (w + op_i.pullback(w)) * half
    return extreme + (w11 - op_j.pullback(w11)) * half


@dataclass
class Salamon11Result:
    """Outcome of the type-(1,1) test; residuals are exact forms."""

    ok: bool
    residual_i: KForm
    residual_j: KForm
    residual_k: KForm


def is_salamon_11(model: HypercomplexModel, form: KForm) -> Salamon11Result:
    """Whether Iw = w and Jw = -w hold exactly (slots-only actions).

    When both hold, Kw = -w follows because the K pullback is the
    composition of the other two on 2-forms; this is asserted rather than
    trusted.
    """
    if form.degree != 2:
        raise ValueError("expected a 2-form")
    res_i = model.operator("I").pullback(form) - form
    res_j = model.operator("J").pullback(form) + form
    res_k = model.operator("K").pullback(form) + form
    ok = res_i.is_zero() and res_j.is_zero()
    if ok and not res_k.is_zero():
        raise AssertionError("I and J residuals vanish but the K residual does not")
    return Salamon11Result(ok, res_i, res_j, res_k)
