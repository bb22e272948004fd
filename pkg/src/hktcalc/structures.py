"""The flat hypercomplex model: constant I, J, K on R^(4n).

The three structures act by left quaternion multiplication on each block
of four coordinates (x0, x1, x2, x3) ~ x0 + x1 i + x2 j + x3 k:

    I = L_i : e0 -> e1,  e1 -> -e0,  e2 -> e3,  e3 -> -e2
    J = L_j : e0 -> e2,  e1 -> -e3,  e2 -> -e0, e3 -> e1
    K = L_k : e0 -> e3,  e1 -> e2,   e2 -> -e1, e3 -> -e0

so that IJ = K and JI = -K hold as exact matrix identities.  These block
matrices are the single source of truth for every expected value in the
test suite.

Two actions on forms coexist and both are exposed:

* `StructureOperator.pullback`  -- slots-only: (Aw)(X1..Xk) = w(AX1..AXk);
* `StructureOperator.act`       -- the signed action (-1)^k of the pullback,
  used by the twisted differentials and the HKT criteria.

Every call site states which one it uses.  Sphere points are exact
rational triples, generated from an integer (stereographic)
parametrization so the whole sphere family stays inside exact arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from . import exact_linalg as ela
from .forms import (
    BilinearForm,
    KForm,
    apply_operator,
    insertion_operator,
    pullback_operator,
)
from .scalars import IMAG_UNIT

_BLOCK_I = ((0, -1, 0, 0), (1, 0, 0, 0), (0, 0, 0, -1), (0, 0, 1, 0))
_BLOCK_J = ((0, 0, -1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, -1, 0, 0))
_BLOCK_K = ((0, 0, 0, -1), (0, 0, -1, 0), (0, 1, 0, 0), (1, 0, 0, 0))


def _block_diagonal(block, n: int) -> tuple:
    dim = 4 * n
    rows = []
    for r in range(dim):
        row = [Fraction(0)] * dim
        base = 4 * (r // 4)
        for c in range(4):
            row[base + c] = Fraction(block[r % 4][c])
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class SpherePoint:
    """An exact rational point (a, b, c) with a^2 + b^2 + c^2 = 1."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.a * self.a + self.b * self.b + self.c * self.c != 1:
            raise ValueError(f"({self.a}, {self.b}, {self.c}) is not on the unit sphere")

    @classmethod
    def from_parameters(cls, u, v) -> "SpherePoint":
        """Stereographic image of a rational plane point; always exact."""
        u, v = Fraction(u), Fraction(v)
        s = 1 + u * u + v * v
        return cls(2 * u / s, 2 * v / s, (1 - u * u - v * v) / s)

    @classmethod
    def axis(cls, name: str) -> "SpherePoint":
        return {
            "I": cls(Fraction(1), Fraction(0), Fraction(0)),
            "J": cls(Fraction(0), Fraction(1), Fraction(0)),
            "K": cls(Fraction(0), Fraction(0), Fraction(1)),
        }[name]

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c)

    def to_json(self) -> dict:
        return {
            "a": [str(self.a.numerator), str(self.a.denominator)],
            "b": [str(self.b.numerator), str(self.b.denominator)],
            "c": [str(self.c.numerator), str(self.c.denominator)],
        }


def random_sphere_points(count: int, seed: int) -> list[SpherePoint]:
    """Deterministic exact rational sphere points (no axis points)."""
    rng = random.Random(seed)
    points = []
    while len(points) < count:
        u = Fraction(rng.randint(-6, 6), rng.randint(1, 6))
        v = Fraction(rng.randint(-6, 6), rng.randint(1, 6))
        pt = SpherePoint.from_parameters(u, v)
        if pt not in points:
            points.append(pt)
    return points


class HypercomplexModel:
    """R^(4n) with the constant left-multiplication structures I, J, K."""

    __slots__ = ("n", "dim", "I", "J", "K")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("quaternionic dimension must be >= 1")
        self.n = n
        self.dim = 4 * n
        self.I = _block_diagonal(_BLOCK_I, n)
        self.J = _block_diagonal(_BLOCK_J, n)
        self.K = _block_diagonal(_BLOCK_K, n)
        self._verify_quaternion_identities()

    @classmethod
    def standard(cls, n: int) -> "HypercomplexModel":
        return cls(n)

    def _verify_quaternion_identities(self):
        minus_id = ela.mat_scale(ela.identity(self.dim), Fraction(-1))
        for name, m in (("I", self.I), ("J", self.J), ("K", self.K)):
            if not ela.mat_eq(ela.mat_mul(m, m), minus_id):
                raise AssertionError(f"{name}^2 != -Id")
        if not ela.mat_eq(ela.mat_mul(self.I, self.J), [list(r) for r in self.K]):
            raise AssertionError("IJ != K")
        if not ela.mat_eq(ela.mat_mul(self.J, self.I), ela.mat_scale(self.K, Fraction(-1))):
            raise AssertionError("JI != -K")

    def matrix(self, name: str):
        return {"I": self.I, "J": self.J, "K": self.K}[name]

    def operator(self, name: str) -> "StructureOperator":
        point = SpherePoint.axis(name)
        return StructureOperator(self, self.matrix(name), point)

    def sphere_operator(self, point: SpherePoint) -> "StructureOperator":
        mat = [
            [point.a * self.I[r][c] + point.b * self.J[r][c] + point.c * self.K[r][c]
             for c in range(self.dim)]
            for r in range(self.dim)
        ]
        op = StructureOperator(self, tuple(tuple(row) for row in mat), point)
        minus_id = ela.mat_scale(ela.identity(self.dim), Fraction(-1))
        if not ela.mat_eq(ela.mat_mul(op.matrix, op.matrix), minus_id):
            raise AssertionError("sphere operator fails to square to -Id")
        return op

    def to_json(self) -> dict:
        return {"n": self.n, "convention": "left"}

    def __repr__(self):
        return f"HypercomplexModel(n={self.n})"


class StructureOperator:
    """A complex structure aI + bJ + cK from the sphere family."""

    __slots__ = ("model", "matrix", "point")

    def __init__(self, model: HypercomplexModel, matrix, point: SpherePoint):
        self.model = model
        self.matrix = matrix
        self.point = point

    def pullback(self, form: KForm) -> KForm:
        """Slots-only action, no degree sign."""
        if form.dim != self.model.dim:
            raise ValueError("dimension mismatch")
        op = _fiber_op(self.model.n, self.point, form.degree, "pullback")
        return apply_operator(op, form)

    def act(self, form: KForm) -> KForm:
        """The signed action on k-forms: (-1)^k times the pullback."""
        moved = self.pullback(form)
        return moved if form.degree % 2 == 0 else -moved

    def twisted_d(self, form: KForm) -> KForm:
        """The twisted differential: (-1)^k act(d(act(form)))."""
        out = self.act(self.act(form).d())
        return out if form.degree % 2 == 0 else -out

    def act_bilinear(self, b: BilinearForm) -> BilinearForm:
        """b(., .) -> b(Ix, Iy); sign-free, preserves symmetry."""
        if b.dim != self.model.dim:
            raise ValueError("dimension mismatch")
        return b.conjugate_by(self.matrix)

    def __repr__(self):
        return f"StructureOperator({self.point.a}, {self.point.b}, {self.point.c})"


# Fiber operators for a given (n, sphere point, degree) are cached; the
# table is read-only after construction so concurrent reads are safe.
_FIBER_CACHE: dict = {}


def _fiber_op(n: int, point: SpherePoint, k: int, kind: str):
    key = (n, point.as_tuple(), k, kind)
    cached = _FIBER_CACHE.get(key)
    if cached is not None:
        return cached
    model = _model_cached(n)
    mat = [
        [point.a * model.I[r][c] + point.b * model.J[r][c] + point.c * model.K[r][c]
         for c in range(model.dim)]
        for r in range(model.dim)
    ]
    if kind == "pullback":
        op = pullback_operator(mat, k, model.dim)
    elif kind == "insert1":
        op = insertion_operator(mat, k, model.dim, 1)
    elif kind == "insert2":
        op = insertion_operator(mat, k, model.dim, 2)
    else:
        raise ValueError(kind)
    _FIBER_CACHE[key] = op
    return op


_MODEL_CACHE: dict[int, HypercomplexModel] = {}


def _model_cached(n: int) -> HypercomplexModel:
    if n not in _MODEL_CACHE:
        _MODEL_CACHE[n] = HypercomplexModel(n)
    return _MODEL_CACHE[n]


def _half(form: KForm) -> KForm:
    return form * Fraction(1, 2)


def two_form_type_components(model: HypercomplexModel, point: SpherePoint, form: KForm) -> dict:
    """Type components of a 2-form for the structure at `point`.

    Keys "20", "11", "02"; the off-diagonal parts are Q(i)-forms.  The
    construction uses the slots-only pullback P and the one-slot insertion
    sum s1 (which acts as 2i on (2,0), 0 on (1,1), -2i on (0,2)):

        rho = (w - Pw)/2,  w11 = (w + Pw)/2,  T = s1(rho)/2,
        w02 = (rho + i T)/2,   w20 = (rho - i T)/2.
    """
    if form.degree != 2:
        raise ValueError("expected a 2-form")
    pulled = apply_operator(_fiber_op(model.n, point, 2, "pullback"), form)
    rho = _half(form - pulled)
    w11 = _half(form + pulled)
    t = _half(apply_operator(_fiber_op(model.n, point, 2, "insert1"), rho))
    g_rho = rho.promote()
    g_t = t.promote()
    return {
        "20": _half(g_rho - g_t * IMAG_UNIT),
        "11": w11,
        "02": _half(g_rho + g_t * IMAG_UNIT),
    }


def three_form_type_components(model: HypercomplexModel, point: SpherePoint, form: KForm) -> dict:
    """Extreme type components of a 3-form (keys "30", "03").

    s2 (two-slot insertion sum) acts as -3 on (3,0)+(0,3) and +1 on
    (2,1)+(1,2), so psi = (w - s2 w)/4 isolates the extreme part; the
    one-slot sum, scaled by 1/3, then splits it by eigenvalue +-i.
    """
    if form.degree != 3:
        raise ValueError("expected a 3-form")
    s2 = apply_operator(_fiber_op(model.n, point, 3, "insert2"), form)
    psi = (form - s2) * Fraction(1, 4)
    t = apply_operator(_fiber_op(model.n, point, 3, "insert1"), psi) * Fraction(1, 3)
    g_psi = psi.promote()
    g_t = t.promote()
    return {
        "30": _half(g_psi - g_t * IMAG_UNIT),
        "03": _half(g_psi + g_t * IMAG_UNIT),
    }


def complex_type_part(model: HypercomplexModel, point: SpherePoint, form: KForm, part: str) -> KForm:
    """One complex type component of a 2- or 3-form.

    `part` is one of "20", "02" (degree 2) or "30", "03" (degree 3).
    Works for rational and Q(i) input forms alike; the output is always a
    Q(i) form.
    """
    if part in ("20", "02"):
        return two_form_type_components(model, point, form)[part].promote()
    if part in ("30", "03"):
        return three_form_type_components(model, point, form)[part].promote()
    raise ValueError(f"unknown type part {part!r}")
