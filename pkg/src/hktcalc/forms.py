"""Exterior algebra of polynomial-coefficient k-forms on R^(4n).

A `KForm` stores its components against strictly increasing multi-indices,
so every form has one canonical representation and equality of forms is
equality of term maps.  Coefficients are `Polynomial` values over Q or
Q(i).  Wedge products, exterior derivatives and pullbacks by constant
linear maps are all exact.

The module also provides the fiberwise machinery shared by the structure
and projection layers: a constant linear operator on the k-form fiber is
represented sparsely as a map  input-index -> [(output-index, coeff), ...]
and can be applied coefficient-wise to polynomial forms or exported as an
exact matrix.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from .scalars import RATIONAL, CoefficientFieldError, Polynomial

MultiIndex = tuple


def multi_indices(dim: int, k: int) -> list[MultiIndex]:
    """All strictly increasing k-tuples in [0, dim), lexicographic."""
    return list(itertools.combinations(range(dim), k))


def sort_with_sign(indices: Sequence[int]) -> tuple[MultiIndex | None, int]:
    """Sort an index tuple, tracking the permutation sign.

    Returns (None, 0) when an index repeats (the component vanishes).
    """
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None, 0
    return tuple(idx), sign


def merge_indices(a: MultiIndex, b: MultiIndex) -> tuple[MultiIndex | None, int]:
    """Merge two sorted disjoint index tuples with the shuffle sign."""
    out = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None, 0
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


def insert_index(idx: MultiIndex, c: int) -> tuple[MultiIndex | None, int]:
    """Insert one index at the front position, i.e. dx_c ^ dx_idx."""
    if c in idx:
        return None, 0
    pos = sum(1 for i in idx if i < c)
    merged = idx[:pos] + (c,) + idx[pos:]
    return merged, -1 if pos % 2 else 1


class KForm:
    """A degree-k exterior form with polynomial coefficients."""

    __slots__ = ("degree", "dim", "terms")

    def __init__(self, degree: int, dim: int, terms: Mapping | None = None):
        # Degrees above dim are allowed but carry no terms (canonical zero).
        if degree < 0:
            raise ValueError(f"degree {degree} must be non-negative")
        clean = {}
        field = None
        for idx, poly in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"multi-index {idx} does not have length {degree}")
            if any(not 0 <= i < dim for i in idx) or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"multi-index {idx} is not strictly increasing in [0, {dim})")
            if not isinstance(poly, Polynomial):
                poly = Polynomial.constant(dim, poly)
            if poly.dim != dim:
                raise ValueError("coefficient polynomial dimension mismatch")
            if poly.is_zero():
                continue
            if field is None:
                field = poly.field
            elif poly.field != field:
                raise CoefficientFieldError("mixed coefficient fields within one form")
            clean[idx] = poly
        self.degree = degree
        self.dim = dim
        self.terms = clean

    @property
    def field(self) -> str:
        for poly in self.terms.values():
            return poly.field
        return RATIONAL

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, degree: int, dim: int) -> "KForm":
        return cls(degree, dim, {})

    @classmethod
    def from_polynomial(cls, poly: Polynomial) -> "KForm":
        return cls(0, poly.dim, {(): poly})

    @classmethod
    def basis(cls, dim: int, indices: Sequence[int], coeff=1) -> "KForm":
        idx, sign = sort_with_sign(indices)
        if idx is None:
            return cls.zero(len(indices), dim)
        poly = coeff if isinstance(coeff, Polynomial) else Polynomial.constant(dim, coeff)
        return cls(len(indices), dim, {idx: poly * Fraction(sign)})

    @classmethod
    def dx(cls, dim: int, i: int) -> "KForm":
        return cls.basis(dim, (i,))

    # -- queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, indices: Sequence[int]) -> Polynomial:
        """Component against an arbitrary index tuple (sign handled)."""
        idx, sign = sort_with_sign(indices)
        if idx is None or idx not in self.terms:
            return Polynomial.zero(self.dim)
        poly = self.terms[idx]
        return poly if sign == 1 else -poly

    def nonzero_terms(self) -> int:
        return len(self.terms)

    def coefficient_height(self) -> int:
        return max((p.coefficient_height() for p in self.terms.values()), default=0)

    # -- linear structure -------------------------------------------------

    def _check(self, other: "KForm"):
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        if self.degree != other.degree:
            raise ValueError("degree mismatch")

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        out = dict(self.terms)
        for idx, poly in other.terms.items():
            acc = out.get(idx)
            poly = poly if acc is None else acc + poly
            if poly.is_zero():
                out.pop(idx, None)
            else:
                out[idx] = poly
        return KForm(self.degree, self.dim, out)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return KForm(self.degree, self.dim, {i: -p for i, p in self.terms.items()})

    def __mul__(self, other) -> "KForm":
        if isinstance(other, Polynomial):
            return KForm(self.degree, self.dim, {i: p * other for i, p in self.terms.items()})
        return KForm(self.degree, self.dim, {i: p.scale(other) for i, p in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return (self.degree, self.dim) == (other.degree, other.dim) and self.terms == other.terms

    def promote(self) -> "KForm":
        return KForm(self.degree, self.dim, {i: p.to_gaussian() for i, p in self.terms.items()})

    def conjugate(self) -> "KForm":
        return KForm(self.degree, self.dim, {i: p.conjugate() for i, p in self.terms.items()})

    def real_part(self) -> "KForm":
        return KForm(self.degree, self.dim, {i: p.real_part() for i, p in self.terms.items()})

    # -- exterior algebra -------------------------------------------------

    def wedge(self, other: "KForm") -> "KForm":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        degree = self.degree + other.degree
        if degree > self.dim:
            return KForm.zero(degree, self.dim)
        out: dict = {}
        for ia, pa in self.terms.items():
            for ib, pb in other.terms.items():
                idx, sign = merge_indices(ia, ib)
                if idx is None:
                    continue
                poly = pa * pb
                if sign < 0:
                    poly = -poly
                acc = out.get(idx)
                poly = poly if acc is None else acc + poly
                if poly.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = poly
        return KForm(degree, self.dim, out)

    def d(self) -> "KForm":
        """Exterior derivative; top-degree input yields the zero form."""
        out: dict = {}
        for idx, poly in self.terms.items():
            for c in range(self.dim):
                dp = poly.partial(c)
                if dp.is_zero():
                    continue
                new_idx, sign = insert_index(idx, c)
                if new_idx is None:
                    continue
                if sign < 0:
                    dp = -dp
                acc = out.get(new_idx)
                dp = dp if acc is None else acc + dp
                if dp.is_zero():
                    out.pop(new_idx, None)
                else:
                    out[new_idx] = dp
        return KForm(self.degree + 1, self.dim, out)

    def pullback(self, matrix: Sequence[Sequence], compose_coefficients: bool = False) -> "KForm":
        """Slots-only pullback (A*w)(X1..Xk) = w(A X1, .., A Xk).

        With `compose_coefficients` the coefficient functions are also
        composed with the map (the honest pullback by x -> Ax); the
        pointwise structure actions use the default slots-only mode.
        """
        if len(matrix) != self.dim:
            raise ValueError("matrix dimension mismatch")
        op = pullback_operator(matrix, self.degree, self.dim)
        moved = apply_operator(op, self)
        if not compose_coefficients:
            return moved
        return KForm(self.degree, self.dim,
                     {i: p.substitute_linear(matrix) for i, p in moved.terms.items()})

    def evaluate(self, point: Sequence) -> "AlternatingValue":
        if len(point) != self.dim:
            raise ValueError("point length mismatch")
        comps = {idx: poly.evaluate(point) for idx, poly in self.terms.items()}
        return AlternatingValue(self.degree, self.dim, comps)

    # -- serialization -------------------------------------------------

    def to_json(self) -> dict:
        return {
            "k": self.degree,
            "dim": self.dim,
            "terms": [
                {"idx": list(idx), "poly": self.terms[idx].to_json()}
                for idx in sorted(self.terms)
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "KForm":
        return cls(
            int(obj["k"]),
            int(obj["dim"]),
            {tuple(int(i) for i in t["idx"]): Polynomial.from_json(t["poly"]) for t in obj.get("terms", [])},
        )

    def __repr__(self):
        if not self.terms:
            return f"KForm(k={self.degree}, 0)"
        bits = []
        for idx in sorted(self.terms):
            label = "^".join(f"dx{i}" for i in idx) or "1"
            bits.append(f"({self.terms[idx]!r}) {label}")
        return " + ".join(bits)


class AlternatingValue:
    """A k-form evaluated at one point: components over sorted indices."""

    __slots__ = ("degree", "dim", "components")

    def __init__(self, degree: int, dim: int, components: Mapping):
        self.degree = degree
        self.dim = dim
        self.components = {tuple(i): v for i, v in components.items() if v}

    def __eq__(self, other):
        if not isinstance(other, AlternatingValue):
            return NotImplemented
        return (self.degree, self.dim) == (other.degree, other.dim) and self.components == other.components

    def wedge(self, other: "AlternatingValue") -> "AlternatingValue":
        out: dict = {}
        for ia, va in self.components.items():
            for ib, vb in other.components.items():
                idx, sign = merge_indices(ia, ib)
                if idx is None:
                    continue
                out[idx] = out.get(idx, 0) + sign * va * vb
        return AlternatingValue(self.degree + other.degree, self.dim, out)

    def close_to(self, other: "AlternatingValue", tol: float) -> bool:
        keys = set(self.components) | set(other.components)
        return all(abs(self.components.get(k, 0.0) - other.components.get(k, 0.0)) <= tol for k in keys)

    def __repr__(self):
        return f"AlternatingValue(k={self.degree}, {self.components})"


class BilinearForm:
    """A dim x dim matrix of polynomials, optionally flagged symmetric.

    Symmetric instances house metrics and Hessians; keeping them apart
    from alternating forms avoids sign mistakes when both occur in one
    computation.
    """

    __slots__ = ("dim", "entries", "symmetric")

    def __init__(self, entries: Sequence[Sequence[Polynomial]], symmetric: bool | None = None):
        dim = len(entries)
        rows = []
        for row in entries:
            if len(row) != dim:
                raise ValueError("entries must form a square matrix")
            rows.append(tuple(p if isinstance(p, Polynomial) else Polynomial.constant(dim, p) for p in row))
        self.dim = dim
        self.entries = tuple(rows)
        if symmetric is None:
            symmetric = all(
                self.entries[i][j] == self.entries[j][i] for i in range(dim) for j in range(i + 1, dim)
            )
        elif symmetric:
            for i in range(dim):
                for j in range(i + 1, dim):
                    if self.entries[i][j] != self.entries[j][i]:
                        raise ValueError(f"entry ({i},{j}) breaks the declared symmetry")
        self.symmetric = symmetric

    @classmethod
    def zero(cls, dim: int) -> "BilinearForm":
        z = Polynomial.zero(dim)
        return cls([[z] * dim for _ in range(dim)], symmetric=True)

    @classmethod
    def from_constant(cls, matrix: Sequence[Sequence], dim: int | None = None) -> "BilinearForm":
        dim = dim or len(matrix)
        return cls([[Polynomial.constant(dim, v) for v in row] for row in matrix])

    @classmethod
    def scaled_identity(cls, dim: int, scale: Polynomial) -> "BilinearForm":
        z = Polynomial.zero(dim)
        return cls([[scale if i == j else z for j in range(dim)] for i in range(dim)], symmetric=True)

    def __add__(self, other: "BilinearForm") -> "BilinearForm":
        return BilinearForm(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "BilinearForm") -> "BilinearForm":
        return BilinearForm(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)]
        )

    def scale(self, scalar) -> "BilinearForm":
        return BilinearForm([[p.scale(scalar) for p in row] for row in self.entries])

    def __eq__(self, other):
        if not isinstance(other, BilinearForm):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def conjugate_by(self, matrix: Sequence[Sequence]) -> "BilinearForm":
        """b(M., M.) as the exact sandwich M^T b M."""
        n = self.dim
        out = [[Polynomial.zero(n) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = Polynomial.zero(n)
                for k in range(n):
                    mki = Fraction(matrix[k][i])
                    if not mki:
                        continue
                    for l in range(n):
                        mlj = Fraction(matrix[l][j])
                        if not mlj:
                            continue
                        acc = acc + self.entries[k][l].scale(mki * mlj)
                out[i][j] = acc
        return BilinearForm(out, symmetric=self.symmetric or None)

    def trace(self) -> Polynomial:
        out = Polynomial.zero(self.dim)
        for i in range(self.dim):
            out = out + self.entries[i][i]
        return out

    def evaluate(self, point: Sequence) -> list[list]:
        return [[p.evaluate(point) for p in row] for row in self.entries]

    def to_json(self) -> dict:
        return {"dim": self.dim, "entries": [[p.to_json() for p in row] for row in self.entries]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "BilinearForm":
        return cls([[Polynomial.from_json(p) for p in row] for row in obj["entries"]])


def hessian(f: Polynomial) -> BilinearForm:
    """The symmetric matrix of second partials of a function."""
    n = f.dim
    firsts = [f.partial(i) for i in range(n)]
    entries = [[Polynomial.zero(n)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            entries[i][j] = firsts[i].partial(j)
    for i in range(n):
        for j in range(i):
            entries[i][j] = entries[j][i]
    return BilinearForm(entries, symmetric=True)


# -- fiberwise constant operators on k-forms ------------------------------

FiberOperator = dict


def _wedge_expansion(factors: Sequence[Sequence[tuple[int, Fraction]]]) -> dict:
    """Expand a wedge of 1-form expansions into {multi-index: coeff}."""
    partial: dict = {(): Fraction(1)}
    for factor in factors:
        nxt: dict = {}
        for idx, coeff in partial.items():
            for j, a in factor:
                if j in idx:
                    continue
                pos = sum(1 for e in idx if e < j)
                sign = -1 if (len(idx) - pos) % 2 else 1
                new = idx[:pos] + (j,) + idx[pos:]
                val = nxt.get(new, Fraction(0)) + sign * coeff * a
                if val:
                    nxt[new] = val
                elif new in nxt:
                    del nxt[new]
        partial = nxt
    return partial


def _rows(matrix: Sequence[Sequence], dim: int) -> list[list[tuple[int, Fraction]]]:
    rows = []
    for i in range(dim):
        row = [(j, Fraction(matrix[i][j])) for j in range(dim) if matrix[i][j]]
        rows.append(row)
    return rows


def pullback_operator(matrix: Sequence[Sequence], k: int, dim: int) -> FiberOperator:
    """Fiber matrix of the slots-only pullback by a constant linear map."""
    if k == 0:
        return {(): [((), Fraction(1))]}
    rows = _rows(matrix, dim)
    op: FiberOperator = {}
    for idx in multi_indices(dim, k):
        expansion = _wedge_expansion([rows[i] for i in idx])
        op[idx] = sorted(expansion.items())
    return op


def insertion_operator(matrix: Sequence[Sequence], k: int, dim: int, slots: int) -> FiberOperator:
    """Sum over all ways of routing `slots` arguments through the matrix.

    slots=1 is the infinitesimal (Lie-algebra) action, slots=k the full
    pullback; intermediate values interpolate.  Always alternating.
    """
    if not 1 <= slots <= k:
        raise ValueError("slots must lie in [1, k]")
    rows = _rows(matrix, dim)
    plain = [[(i, Fraction(1))] for i in range(dim)]
    op: FiberOperator = {}
    for idx in multi_indices(dim, k):
        total: dict = {}
        for chosen in itertools.combinations(range(k), slots):
            factors = [rows[i] if pos in chosen else plain[i] for pos, i in enumerate(idx)]
            for out_idx, coeff in _wedge_expansion(factors).items():
                val = total.get(out_idx, Fraction(0)) + coeff
                if val:
                    total[out_idx] = val
                elif out_idx in total:
                    del total[out_idx]
        op[idx] = sorted(total.items())
    return op


def pair_insertion_operator(a: Sequence[Sequence], b: Sequence[Sequence], k: int, dim: int) -> FiberOperator:
    """Symmetrized insertion of two maps into two distinct slots.

    For each unordered slot pair both orders contribute with weight 1/2,
    which makes the operator symmetric in (a, b).
    """
    if k < 2:
        raise ValueError("needs degree >= 2")
    rows_a = _rows(a, dim)
    rows_b = _rows(b, dim)
    plain = [[(i, Fraction(1))] for i in range(dim)]
    half = Fraction(1, 2)
    op: FiberOperator = {}
    for idx in multi_indices(dim, k):
        total: dict = {}
        for s, t in itertools.permutations(range(k), 2):
            factors = []
            for pos, i in enumerate(idx):
                if pos == s:
                    factors.append(rows_a[i])
                elif pos == t:
                    factors.append(rows_b[i])
                else:
                    factors.append(plain[i])
            for out_idx, coeff in _wedge_expansion(factors).items():
                val = total.get(out_idx, Fraction(0)) + half * coeff
                if val:
                    total[out_idx] = val
                elif out_idx in total:
                    del total[out_idx]
        op[idx] = sorted(total.items())
    return op


def apply_operator(op: FiberOperator, form: KForm) -> KForm:
    """Apply a fiber operator coefficient-wise to a polynomial form."""
    out: dict = {}
    for idx, poly in form.terms.items():
        for out_idx, coeff in op.get(idx, ()):
            scaled = poly.scale(coeff)
            acc = out.get(out_idx)
            scaled = scaled if acc is None else acc + scaled
            if scaled.is_zero():
                out.pop(out_idx, None)
            else:
                out[out_idx] = scaled
    return KForm(form.degree, form.dim, out)


def operator_matrix(op: FiberOperator, k: int, dim: int) -> list[list[Fraction]]:
    """Dense exact matrix of a fiber operator (rows/cols in lex order)."""
    basis = multi_indices(dim, k)
    pos = {idx: i for i, idx in enumerate(basis)}
    n = len(basis)
    mat = [[Fraction(0)] * n for _ in range(n)]
    for in_idx, column in op.items():
        j = pos[in_idx]
        for out_idx, coeff in column:
            mat[pos[out_idx]][j] = coeff
    return mat


def form_to_vector(form: KForm, basis: Sequence[MultiIndex]) -> list[Polynomial]:
    zero = Polynomial.zero(form.dim)
    return [form.terms.get(idx, zero) for idx in basis]


def vector_to_form(vec: Sequence, basis: Sequence[MultiIndex], k: int, dim: int) -> KForm:
    terms = {}
    for idx, val in zip(basis, vec):
        poly = val if isinstance(val, Polynomial) else Polynomial.constant(dim, val)
        if not poly.is_zero():
            terms[idx] = poly
    return KForm(k, dim, terms)
