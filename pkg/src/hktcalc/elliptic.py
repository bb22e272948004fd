"""Numerical HKT potentials on a 4D box for conformally flat metrics.

On R^4 every hyperhermitian metric is conformal, g = phi * delta, and a
potential is characterized by the trace identity

    trace_g(Hess mu) = 4   i.e.   sum_i d^2 mu / dx_i^2 = 4 * phi.

The geometric operator is assembled from its two textbook pieces -- the
Levi-Civita Laplacian of g (geometer sign, with exact Christoffel symbols
of the conformal factor) and the Weyl drift term -- whose first-order
parts cancel exactly at the stencil level, leaving a plain Poisson system.
The cancellation is a test obligation, not an assumption.

Conformal factors are polynomials with rational coefficients, so the Weyl
form and all Christoffel data come from the exact core; only the linear
solve is floating point.  Discretization is second-order central
differences with Dirichlet data, solved by diagonally preconditioned
conjugate gradients (matrix-free).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .conventions import SOLVER_FORM_SCALE, TRACE_TARGET
from .forms import KForm
from .scalars import Polynomial
from .structures import HypercomplexModel


class SolverError(RuntimeError):
    """The linear solve failed (non-convergence or indefiniteness)."""


@dataclass
class ConformalMetricSpec:
    """g = phi * delta on a box [lo, hi]^4; phi must be positive there."""

    phi: Polynomial
    box: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if self.phi.dim != 4:
            raise ValueError("conformal solver is specific to dimension 4 (n = 1)")
        lo, hi = self.box
        if not lo < hi:
            raise ValueError("box must satisfy lo < hi")

    def gradient(self) -> list[Polynomial]:
        return [self.phi.partial(i) for i in range(4)]


@dataclass(frozen=True)
class SolverConfig:
    """Linear-solve controls; `dirichlet` is a Polynomial, a callable on
    4 floats, or None for zero boundary data."""

    tol: float = 1e-10
    max_iter: int = 50_000
    dirichlet: object = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


class Grid4D:
    """Scalar samples on a uniform m^4 grid over [lo, hi]^4."""

    __slots__ = ("m", "lo", "hi", "values")

    def __init__(self, m: int, lo: float, hi: float, values: np.ndarray | None = None):
        if m < 3:
            raise ValueError("need at least 3 nodes per axis")
        self.m = m
        self.lo = float(lo)
        self.hi = float(hi)
        if values is None:
            values = np.zeros((m, m, m, m))
        if values.shape != (m, m, m, m):
            raise ValueError("values shape mismatch")
        self.values = values

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.m - 1)

    def axis(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.m)

    def meshgrid(self) -> list[np.ndarray]:
        ax = self.axis()
        return list(np.meshgrid(ax, ax, ax, ax, indexing="ij", sparse=True))

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros((self.m,) * 4, dtype=bool)
        for a in range(4):
            sl = [slice(None)] * 4
            sl[a] = 0
            mask[tuple(sl)] = True
            sl[a] = -1
            mask[tuple(sl)] = True
        return mask

    @classmethod
    def from_polynomial(cls, m: int, lo: float, hi: float, poly: Polynomial) -> "Grid4D":
        grid = cls(m, lo, hi)
        grid.values = _eval_poly_on_mesh(poly, grid.meshgrid())
        return grid

    @classmethod
    def from_callable(cls, m: int, lo: float, hi: float, fn: Callable) -> "Grid4D":
        grid = cls(m, lo, hi)
        ax = grid.axis()
        vals = np.zeros((m,) * 4)
        for i0, x0 in enumerate(ax):
            for i1, x1 in enumerate(ax):
                for i2, x2 in enumerate(ax):
                    for i3, x3 in enumerate(ax):
                        vals[i0, i1, i2, i3] = fn(x0, x1, x2, x3)
        grid.values = vals
        return grid

    def copy(self) -> "Grid4D":
        return Grid4D(self.m, self.lo, self.hi, self.values.copy())

    def export_slice_csv(self, path, fixed_axes=(2, 3)) -> None:
        """Write the 2D slice through the box center as x_a, x_b, value."""
        free = [a for a in range(4) if a not in fixed_axes]
        mid = self.m // 2
        ax = self.axis()
        idx: list = [mid] * 4
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow([f"x{free[0]}", f"x{free[1]}", "mu"])
            for i in range(self.m):
                for j in range(self.m):
                    idx[free[0]] = i
                    idx[free[1]] = j
                    writer.writerow([repr(ax[i]), repr(ax[j]), repr(self.values[tuple(idx)])])


def _eval_poly_on_mesh(poly: Polynomial, mesh: Sequence[np.ndarray]) -> np.ndarray:
    total = np.zeros(np.broadcast_shapes(*(m.shape for m in mesh)))
    for exp, coeff in poly.terms.items():
        term = np.full((), float(coeff))
        for x, e in zip(mesh, exp):
            if e:
                term = term * x**e
        total = total + term
    return total


def _interior(a: np.ndarray) -> np.ndarray:
    return a[1:-1, 1:-1, 1:-1, 1:-1]


def _second_diff_sum(full: np.ndarray, h: float) -> np.ndarray:
    """sum_i D2_i on interior nodes (standard 9-point 4D stencil)."""
    core = full[1:-1, 1:-1, 1:-1, 1:-1]
    out = -8.0 * core
    out = out + full[2:, 1:-1, 1:-1, 1:-1] + full[:-2, 1:-1, 1:-1, 1:-1]
    out = out + full[1:-1, 2:, 1:-1, 1:-1] + full[1:-1, :-2, 1:-1, 1:-1]
    out = out + full[1:-1, 1:-1, 2:, 1:-1] + full[1:-1, 1:-1, :-2, 1:-1]
    out = out + full[1:-1, 1:-1, 1:-1, 2:] + full[1:-1, 1:-1, 1:-1, :-2]
    return out / (h * h)


def _first_diff(full: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Central first difference on interior nodes."""
    plus = [slice(1, -1)] * 4
    minus = [slice(1, -1)] * 4
    plus[axis] = slice(2, None)
    minus[axis] = slice(None, -2)
    return (full[tuple(plus)] - full[tuple(minus)]) / (2.0 * h)


def weyl_form(spec: ConformalMetricSpec) -> tuple[KForm, Polynomial]:
    """The Weyl 1-form of g = phi*delta as the exact pair (d phi, phi).

    The 1-form itself is d(log phi) = dphi / phi; returning numerator and
    denominator keeps it inside polynomial arithmetic.
    """
    dphi = KForm.from_polynomial(spec.phi).d()
    return dphi, spec.phi


def weyl_identity_residuals(spec: ConformalMetricSpec) -> list[Polynomial]:
    """The cleared-denominator residuals of  del g = omega (x) g.

    For g = phi*delta the identity reads, after multiplying through by
    phi:  d_i(phi) * (phi delta_jk) - (d_i phi) * (phi delta_jk) per
    component; all residuals must be exactly zero.
    """
    phi = spec.phi
    dphi = spec.gradient()
    residuals = []
    for i in range(4):
        for j in range(4):
            for k in range(4):
                g_jk = phi if j == k else Polynomial.zero(4)
                lhs = g_jk.partial(i) * phi
                rhs = dphi[i] * g_jk
                residuals.append(lhs - rhs)
    return residuals


def _phi_arrays(spec: ConformalMetricSpec, grid: Grid4D):
    mesh = grid.meshgrid()
    phi = _eval_poly_on_mesh(spec.phi, mesh)
    phi = np.broadcast_to(phi, (grid.m,) * 4)
    dphi = [np.broadcast_to(_eval_poly_on_mesh(p, mesh), (grid.m,) * 4) for p in spec.gradient()]
    return phi, dphi


def laplace_beltrami_apply(spec: ConformalMetricSpec, grid: Grid4D) -> Grid4D:
    """Geometer-sign Laplacian of g = phi*delta at interior nodes.

    Delta mu = -g^{ij}(d_i d_j mu - Gamma^k_ij d_k mu); for the conformal
    metric the contracted Christoffel term reduces to
    g^{ij} Gamma^k_ij = -phi^{-2} d_k phi, evaluated exactly from phi.
    Boundary entries of the output are zero.
    """
    phi, dphi = _phi_arrays(spec, grid)
    h = grid.h
    phi_in = _interior(phi)
    second = _second_diff_sum(grid.values, h)
    out = np.zeros_like(grid.values)
    acc = -second / phi_in
    for k in range(4):
        acc = acc - (_interior(dphi[k]) / phi_in**2) * _first_diff(grid.values, k, h)
    out[1:-1, 1:-1, 1:-1, 1:-1] = acc
    return Grid4D(grid.m, grid.lo, grid.hi, out)


def weyl_drift_apply(spec: ConformalMetricSpec, grid: Grid4D) -> Grid4D:
    """The drift term omega-sharp(mu) = phi^{-2} <d phi, d mu> (interior)."""
    phi, dphi = _phi_arrays(spec, grid)
    h = grid.h
    phi_in = _interior(phi)
    out = np.zeros_like(grid.values)
    acc = np.zeros_like(phi_in)
    for k in range(4):
        acc = acc + (_interior(dphi[k]) / phi_in**2) * _first_diff(grid.values, k, h)
    out[1:-1, 1:-1, 1:-1, 1:-1] = acc
    return Grid4D(grid.m, grid.lo, grid.hi, out)


def potential_operator_apply(spec: ConformalMetricSpec, grid: Grid4D) -> Grid4D:
    """The assembled left-hand side  Delta mu + omega-sharp(mu).

    The first-order stencils of the two summands cancel exactly (same
    nodal coefficients, same differences), leaving -phi^{-1} sum_i D2_i.
    """
    lap = laplace_beltrami_apply(spec, grid)
    drift = weyl_drift_apply(spec, grid)
    return Grid4D(grid.m, grid.lo, grid.hi, lap.values + drift.values)


@dataclass
class SolveResult:
    grid: Grid4D
    iterations: int
    residual_max: float
    residual_mean: float
    diagnostics: dict = field(default_factory=dict)


def _dirichlet_values(config: SolverConfig, grid: Grid4D) -> np.ndarray:
    data = config.dirichlet
    full = np.zeros((grid.m,) * 4)
    if data is None:
        return full
    if isinstance(data, Polynomial):
        vals = np.broadcast_to(_eval_poly_on_mesh(data, grid.meshgrid()), (grid.m,) * 4).copy()
    else:
        vals = Grid4D.from_callable(grid.m, grid.lo, grid.hi, data).values
    mask = grid.boundary_mask()
    full[mask] = vals[mask]
    return full


def solve_potential(spec: ConformalMetricSpec, m: int, config: SolverConfig | None = None) -> SolveResult:
    """Solve the potential equation on an m^4 grid with Dirichlet data.

    The continuum problem is  Delta mu + omega-sharp(mu) + 4 = 0, whose
    discrete form reduces (after the exact drift cancellation and row
    scaling by -phi) to the SPD system  (-sum_i D2_i) mu = -4 phi.  The
    residual reported at the end goes through the geometric operators,
    exercising the cancellation rather than assuming it.
    """
    config = config or SolverConfig()
    grid = Grid4D(m, *spec.box)
    phi, _ = _phi_arrays(spec, grid)
    if not np.all(phi > 0):
        raise ValueError("conformal factor must be positive at every grid node")
    h = grid.h
    mu0 = _dirichlet_values(config, grid)

    def apply_a(v_int: np.ndarray) -> np.ndarray:
        full = np.zeros((m,) * 4)
        full[1:-1, 1:-1, 1:-1, 1:-1] = v_int
        return -_second_diff_sum(full, h)

    target = float(TRACE_TARGET)
    b = -target * _interior(phi) + _second_diff_sum(mu0, h)
    v, iterations = _conjugate_gradient(apply_a, b, 8.0 / (h * h), config.tol, config.max_iter)
    mu = mu0.copy()
    mu[1:-1, 1:-1, 1:-1, 1:-1] = v
    solution = Grid4D(m, grid.lo, grid.hi, mu)

    geo = potential_operator_apply(spec, solution)
    residual = _interior(geo.values) + target
    res_max = float(np.max(np.abs(residual)))
    res_mean = float(np.mean(np.abs(residual)))
    return SolveResult(
        solution,
        iterations,
        res_max,
        res_mean,
        diagnostics={
            "residual_max": res_max,
            "residual_mean": res_mean,
            "iterations": iterations,
            "h": h,
            "unknowns": (m - 2) ** 4,
            "tol": config.tol,
        },
    )


def _conjugate_gradient(apply_a, b, diagonal: float, tol: float, max_iter: int):
    """Jacobi-preconditioned CG; stops on max-norm residual <= tol."""
    x = np.zeros_like(b)
    r = b - apply_a(x)
    if float(np.max(np.abs(r))) <= tol:
        return x, 0
    z = r / diagonal
    p = z.copy()
    rz = float(np.sum(r * z))
    for it in range(1, max_iter + 1):
        ap = apply_a(p)
        pap = float(np.sum(p * ap))
        if pap <= 0.0:
            raise SolverError("system is not positive definite")
        alpha = rz / pap
        x = x + alpha * p
        r = r - alpha * ap
        if float(np.max(np.abs(r))) <= tol:
            return x, it
        z = r / diagonal
        rz_new = float(np.sum(r * z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverError(f"conjugate gradient did not reach tol={tol} in {max_iter} iterations")


def _shifted(full: np.ndarray, shifts: dict, margin: int) -> np.ndarray:
    """Margin-interior view shifted by `shifts[axis]` nodes per axis."""
    sl = []
    for axis in range(4):
        s = shifts.get(axis, 0)
        sl.append(slice(margin + s, full.shape[axis] - margin + s))
    return full[tuple(sl)]


def _wide_second_diff(full: np.ndarray, axis: int, h: float, margin: int = 2) -> np.ndarray:
    """Width-2h second difference, independent of the solver stencil."""
    return (
        _shifted(full, {axis: 2}, margin)
        - 2.0 * _shifted(full, {}, margin)
        + _shifted(full, {axis: -2}, margin)
    ) / (4.0 * h * h)


def _mixed_diff(full: np.ndarray, a: int, b: int, h: float, margin: int = 2) -> np.ndarray:
    """D1_a D1_b mixed central difference on the margin interior."""
    return (
        _shifted(full, {a: 1, b: 1}, margin)
        - _shifted(full, {a: 1, b: -1}, margin)
        - _shifted(full, {a: -1, b: 1}, margin)
        + _shifted(full, {a: -1, b: -1}, margin)
    ) / (4.0 * h * h)


def verify_potential(grid: Grid4D, spec: ConformalMetricSpec) -> dict:
    """Residual diagnostics of a candidate potential, via independent stencils.

    (a) trace identity:  phi^{-1} sum_i d_i^2 mu  vs the target constant,
        using width-2h second differences so a solved grid is not checked
        against its own stencil;
    (b) form reconstruction:  the Kahler 2-form rebuilt from the averaged
        finite-difference Hessian vs SOLVER_FORM_SCALE * phi * (flat form).
    Both are reported as max and mean over the margin-2 interior.
    """
    margin = 2
    if grid.m < 2 * margin + 1:
        raise ValueError("grid too small for verification stencils")
    h = grid.h
    phi, _ = _phi_arrays(spec, grid)
    sl = (slice(margin, -margin),) * 4
    phi_in = phi[sl]

    hess = np.zeros((4, 4) + phi_in.shape)
    for a in range(4):
        hess[a, a] = _wide_second_diff(grid.values, a, h, margin)
        for b in range(a + 1, 4):
            hess[a, b] = hess[b, a] = _mixed_diff(grid.values, a, b, h, margin)

    trace = hess[0, 0] + hess[1, 1] + hess[2, 2] + hess[3, 3]
    trace_res = np.abs(trace / phi_in - float(TRACE_TARGET))

    model = HypercomplexModel(1)
    mats = [np.array([[float(x) for x in row] for row in model.matrix(nm)]) for nm in ("I", "J", "K")]
    avg = hess.copy()
    for mat in mats:
        avg = avg + np.einsum("ka,kl...,lb->ab...", mat, hess, mat)
    avg = 0.5 * avg
    i_mat = mats[0]
    f_rec = np.einsum("ka,kb...->ab...", i_mat, avg)
    form_res = np.zeros_like(phi_in)
    scale = float(SOLVER_FORM_SCALE)
    for a in range(4):
        for b in range(a + 1, 4):
            expected = scale * phi_in * i_mat[b, a]
            form_res = np.maximum(form_res, np.abs(f_rec[a, b] - expected))

    return {
        "trace_residual_max": float(trace_res.max()),
        "trace_residual_mean": float(trace_res.mean()),
        "form_residual_max": float(form_res.max()),
        "form_residual_mean": float(form_res.mean()),
        "h": h,
        "margin": margin,
    }
