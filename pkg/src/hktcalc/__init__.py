"""Exact hypercomplex exterior calculus on flat quaternionic space.

The package verifies the calculus of hyper-Kaehler-with-torsion (HKT)
geometry on R^(4n) with constant structures as machine-checked exact
identities, and constructs 4-dimensional HKT potentials numerically.
"""

from .scalars import (
    GAUSSIAN,
    IMAG_UNIT,
    RATIONAL,
    CoefficientFieldError,
    GaussianRational,
    Polynomial,
    random_polynomial,
)
from .forms import AlternatingValue, BilinearForm, KForm, hessian
from .structures import (
    HypercomplexModel,
    SpherePoint,
    StructureOperator,
    complex_type_part,
    random_sphere_points,
)
from .salamon import (
    DegreeError,
    FiberSubspace,
    ProjectorTable,
    bundle_B,
    a11_subspace,
    is_salamon_11,
    salamon_D,
    salamon_DI,
)

__all__ = [
    "GAUSSIAN",
    "IMAG_UNIT",
    "RATIONAL",
    "CoefficientFieldError",
    "GaussianRational",
    "Polynomial",
    "random_polynomial",
    "AlternatingValue",
    "BilinearForm",
    "KForm",
    "hessian",
    "HypercomplexModel",
    "SpherePoint",
    "StructureOperator",
    "complex_type_part",
    "random_sphere_points",
    "DegreeError",
    "FiberSubspace",
    "ProjectorTable",
    "bundle_B",
    "a11_subspace",
    "is_salamon_11",
    "salamon_D",
    "salamon_DI",
]
