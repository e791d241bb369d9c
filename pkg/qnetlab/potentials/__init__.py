"""
Potential functions, their algebra and validity checks
"""
from .kernels import ScalarKernel, Power, Log, Lpf, Identity
from .nodes import (
    Potential,
    SumScalar,
    QuadForm,
    Sum,
    Product,
    OuterCompose,
    InnerCompose,
    linear,
)
from .algebra import combine, pressure, hessian
from .validity import (
    PotentialCheckConfig,
    Verdict,
    ValidityReport,
    check_potential,
)
from .language import MatrixResolver, MiniLanguage, parse_potential


def value(g: Potential, x):
    """G(X) for a single state or a stack of states"""
    return g.value(x)


def gradient(g: Potential, x):
    """Exact grad G(X) for a single state or a stack of states"""
    return g.gradient(x)


__all__ = [
    "ScalarKernel",
    "Power",
    "Log",
    "Lpf",
    "Identity",
    "Potential",
    "SumScalar",
    "QuadForm",
    "Sum",
    "Product",
    "OuterCompose",
    "InnerCompose",
    "linear",
    "value",
    "gradient",
    "combine",
    "pressure",
    "hessian",
    "PotentialCheckConfig",
    "Verdict",
    "ValidityReport",
    "check_potential",
    "MatrixResolver",
    "MiniLanguage",
    "parse_potential",
]
