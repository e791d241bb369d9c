"""
Potential expression trees with exact gradients
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError
from .kernels import Identity, Lpf, ScalarKernel

SYMMETRY_TOLERANCE = 1e-12


def _as_state(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


class Potential(ABC):
    """
    G(X) evaluated on a single state (M,) or a stack of states (..., M)

    Subclasses provide the value and the exact gradient, plus the declared
    structural attributes the algebra and the validity report use.
    """

    @abstractmethod
    def value(self, x) -> np.ndarray:
        ...

    @abstractmethod
    def gradient(self, x) -> np.ndarray:
        ...

    @abstractmethod
    def describe(self) -> str:
        ...

    @property
    @abstractmethod
    def monotonic(self) -> bool:
        ...

    @property
    @abstractmethod
    def nonnegative(self) -> bool:
        ...

    @property
    @abstractmethod
    def degree(self) -> float:
        ...

    @property
    @abstractmethod
    def log_factor(self) -> bool:
        ...

    @property
    def h0(self) -> int:
        """Declared smoothness order: ceil(degree), plus one with a logarithmic factor"""
        return int(math.ceil(self.degree)) + (1 if self.log_factor else 0)

    @property
    def declared_class(self) -> str:
        # every kernel family grows polynomially (up to a log factor)
        return "strong"

    def __call__(self, x):
        return self.value(x)

    def __repr__(self) -> str:
        return self.describe()


@dataclass(frozen=True, repr=False)
class SumScalar(Potential):
    """G(X) = sum_m g(x_m)"""
    kernel: ScalarKernel

    def value(self, x):
        return self.kernel.value(_as_state(x)).sum(axis=-1)

    def gradient(self, x):
        return self.kernel.derivative(_as_state(x))

    def describe(self) -> str:
        if isinstance(self.kernel, Identity):
            return "linear"
        return f"sum_scalar({self.kernel.describe()})"

    @property
    def monotonic(self) -> bool:
        return True

    @property
    def nonnegative(self) -> bool:
        return True

    @property
    def degree(self) -> float:
        return self.kernel.degree

    @property
    def log_factor(self) -> bool:
        return self.kernel.log_factor


@dataclass(frozen=True, repr=False, eq=False)
class QuadForm(Potential):
    """
    G(X) = <g(X) Q . g(X)> with Q symmetric

    `pd` and `offdiag` are declared attributes, checked when the node is built.
    """
    kernel: ScalarKernel
    matrix: np.ndarray
    pd: bool = False
    offdiag: Optional[str] = None

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ConfigError(f"quadratic form needs a square matrix, got shape {q.shape}")
        if not np.allclose(q, q.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
            raise ConfigError("quadratic form matrix must be symmetric")
        if self.pd:
            try:
                np.linalg.cholesky(q)
            except np.linalg.LinAlgError:
                raise ConfigError("matrix declared positive definite fails Cholesky")
        off = q[~np.eye(q.shape[0], dtype=bool)]
        if self.offdiag == "nonpositive" and np.any(off > 0):
            raise ConfigError("matrix declared with non-positive off-diagonals has a positive entry")
        if self.offdiag == "nonnegative" and np.any(off < 0):
            raise ConfigError("matrix declared with non-negative off-diagonals has a negative entry")
        if self.offdiag not in (None, "nonpositive", "nonnegative"):
            raise ConfigError(f"unknown off-diagonal declaration {self.offdiag!r}")
        q.setflags(write=False)
        object.__setattr__(self, "matrix", q)

    @property
    def m(self) -> int:
        return int(self.matrix.shape[0])

    def value(self, x):
        gx = self.kernel.value(_as_state(x))
        return np.einsum("...i,ij,...j->...", gx, self.matrix, gx)

    def gradient(self, x):
        x = _as_state(x)
        gx = self.kernel.value(x)
        return 2.0 * (gx @ self.matrix) * self.kernel.derivative(x)

    def describe(self) -> str:
        if isinstance(self.kernel, Lpf):
            return f"lpf_quad(theta={self.kernel.theta:g}, P=<{self.m}x{self.m}>)"
        return f"quad({self.kernel.describe()}, Q=<{self.m}x{self.m}>)"

    @property
    def monotonic(self) -> bool:
        return bool(np.all(self.matrix >= 0))

    @property
    def nonnegative(self) -> bool:
        return self.pd or bool(np.all(self.matrix >= 0))

    @property
    def degree(self) -> float:
        return 2.0 * self.kernel.degree

    @property
    def log_factor(self) -> bool:
        return self.kernel.log_factor


@dataclass(frozen=True, repr=False)
class Sum(Potential):
    """G = alpha G1 + beta G2"""
    alpha: float
    first: Potential
    beta: float
    second: Potential

    def value(self, x):
        return self.alpha * self.first.value(x) + self.beta * self.second.value(x)

    def gradient(self, x):
        return self.alpha * self.first.gradient(x) + self.beta * self.second.gradient(x)

    def describe(self) -> str:
        return f"add({self.first.describe()}, {self.alpha:g}, {self.second.describe()}, {self.beta:g})"

    def _active(self):
        return [g for c, g in ((self.alpha, self.first), (self.beta, self.second)) if c > 0]

    @property
    def monotonic(self) -> bool:
        return all(g.monotonic for g in self._active())

    @property
    def nonnegative(self) -> bool:
        return all(g.nonnegative for g in self._active())

    @property
    def degree(self) -> float:
        return max((g.degree for g in self._active()), default=0.0)

    @property
    def log_factor(self) -> bool:
        top = self.degree
        return any(g.log_factor for g in self._active() if g.degree == top)


@dataclass(frozen=True, repr=False)
class Product(Potential):
    """G = G1 G2"""
    first: Potential
    second: Potential

    def value(self, x):
        return self.first.value(x) * self.second.value(x)

    def gradient(self, x):
        v1 = np.asarray(self.first.value(x))[..., None]
        v2 = np.asarray(self.second.value(x))[..., None]
        return v2 * self.first.gradient(x) + v1 * self.second.gradient(x)

    def describe(self) -> str:
        return f"mul({self.first.describe()}, {self.second.describe()})"

    @property
    def monotonic(self) -> bool:
        return self.first.monotonic and self.second.monotonic

    @property
    def nonnegative(self) -> bool:
        return self.first.nonnegative and self.second.nonnegative

    @property
    def degree(self) -> float:
        return self.first.degree + self.second.degree

    @property
    def log_factor(self) -> bool:
        return self.first.log_factor or self.second.log_factor


@dataclass(frozen=True, repr=False)
class OuterCompose(Potential):
    """G = g(G_inner(X))"""
    kernel: ScalarKernel
    inner: Potential

    def value(self, x):
        return self.kernel.value(np.asarray(self.inner.value(x), dtype=float))

    def gradient(self, x):
        v = np.asarray(self.inner.value(x), dtype=float)[..., None]
        return self.kernel.derivative(v) * self.inner.gradient(x)

    def describe(self) -> str:
        return f"outer({self.kernel.describe()}, {self.inner.describe()})"

    @property
    def monotonic(self) -> bool:
        return self.inner.monotonic

    @property
    def nonnegative(self) -> bool:
        return self.inner.nonnegative

    @property
    def degree(self) -> float:
        return self.kernel.degree * self.inner.degree

    @property
    def log_factor(self) -> bool:
        return self.kernel.log_factor or self.inner.log_factor


@dataclass(frozen=True, repr=False)
class InnerCompose(Potential):
    """G = G_outer(g(X)) with g applied componentwise"""
    outer: Potential
    kernel: ScalarKernel

    def value(self, x):
        return self.outer.value(self.kernel.value(_as_state(x)))

    def gradient(self, x):
        x = _as_state(x)
        return self.outer.gradient(self.kernel.value(x)) * self.kernel.derivative(x)

    def describe(self) -> str:
        return f"inner({self.outer.describe()}, {self.kernel.describe()})"

    @property
    def monotonic(self) -> bool:
        return self.outer.monotonic

    @property
    def nonnegative(self) -> bool:
        return self.outer.nonnegative

    @property
    def degree(self) -> float:
        return self.outer.degree * self.kernel.degree

    @property
    def log_factor(self) -> bool:
        return self.outer.log_factor or self.kernel.log_factor


def linear() -> SumScalar:
    """G(X) = sum_m x_m"""
    return SumScalar(Identity())
