"""
Potential algebra, pressures and numeric Hessians
"""
from typing import Any

import numpy as np

from ..errors import PotentialAlgebraError
from ..model.topology import NetworkTopology
from .kernels import ScalarKernel
from .nodes import InnerCompose, OuterCompose, Potential, Product, Sum

ALGEBRA_OPS = ("sum", "product", "outer", "inner")


def combine(op: str, *args: Any) -> Potential:
    """
    Build a composite potential, enforcing the composition preconditions

    Args:
        op: "sum" (G1, alpha, G2, beta) | "product" (G1, G2) |
            "outer" (kernel, G) | "inner" (G, kernel)

    Raises:
        PotentialAlgebraError: a precondition failed; `clause` names it
    """
    if op == "sum":
        g1, alpha, g2, beta = args
        alpha, beta = float(alpha), float(beta)
        if alpha < 0 or beta < 0:
            raise PotentialAlgebraError(
                "sum-coefficients", f"sum needs alpha, beta >= 0, got {alpha:g}, {beta:g}"
            )
        for g in (g1, g2):
            if not g.nonnegative:
                raise PotentialAlgebraError("sum-nonnegative", f"{g.describe()} is not declared non-negative")
        return Sum(alpha, g1, beta, g2)

    if op == "product":
        g1, g2 = args
        if not (g1.nonnegative and g2.nonnegative):
            raise PotentialAlgebraError("product-nonnegative", "product factors must be declared non-negative")
        if not g2.monotonic:
            raise PotentialAlgebraError(
                "product-monotonic", f"second factor {g2.describe()} must be declared monotonic"
            )
        return Product(g1, g2)

    if op == "outer":
        kernel, g = args
        _require_kernel(kernel, "outer")
        if not kernel.at_least_linear:
            raise PotentialAlgebraError("outer-growth", f"{kernel.describe()} grows slower than linear")
        if not kernel.subexponential:
            raise PotentialAlgebraError("outer-growth", f"{kernel.describe()} is not sub-exponential")
        if not g.nonnegative:
            raise PotentialAlgebraError("outer-nonnegative", f"{g.describe()} is not declared non-negative")
        return OuterCompose(kernel, g)

    if op == "inner":
        g, kernel = args
        _require_kernel(kernel, "inner")
        if not (kernel.at_least_linear and kernel.subexponential):
            raise PotentialAlgebraError("inner-growth", f"{kernel.describe()} violates the growth constraints")
        if not kernel.flat_at_zero:
            raise PotentialAlgebraError(
                "inner-flat-at-zero", f"inner composition needs g'(0) = 0, {kernel.describe()} has g'(0) != 0"
            )
        return InnerCompose(g, kernel)

    raise PotentialAlgebraError("unknown-op", f"unknown algebra op {op!r} (known: {', '.join(ALGEBRA_OPS)})")


def _require_kernel(k: Any, op: str):
    if not isinstance(k, ScalarKernel):
        raise PotentialAlgebraError(f"{op}-kernel", f"{op} needs a scalar kernel, got {k!r}")


def pressure(g: Potential, x, t: NetworkTopology) -> np.ndarray:
    """Scheduling weights grad G(X) (I - R)^T; equal to the gradient when R = 0"""
    grad = g.gradient(x)
    if t.is_single_hop:
        return grad
    return grad @ t.transfer.T


def hessian(g: Potential, x, step: float = None) -> np.ndarray:
    """
    Central differences of the exact gradient, symmetrized

    Near the boundary the stencil is clipped to x >= 0 and divided by the
    actual spread.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    h = step if step is not None else 1e-4 * (1.0 + np.linalg.norm(x))
    out = np.empty((m, m))
    for i in range(m):
        up = x.copy()
        down = x.copy()
        up[i] += h
        down[i] = max(0.0, x[i] - h)
        out[i] = (g.gradient(up) - g.gradient(down)) / (up[i] - down[i])
    return 0.5 * (out + out.T)
