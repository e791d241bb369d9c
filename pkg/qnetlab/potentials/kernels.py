"""
Scalar kernels g(x) applied componentwise inside potentials
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


class ScalarKernel(ABC):
    """
    Nondecreasing scalar function on x >= 0 with g(0) = 0

    Declared attributes describe the asymptotic behaviour that the potential
    algebra relies on; they are properties of the family, not measured.
    """
    degree: float = 1.0
    log_factor: bool = False

    @abstractmethod
    def value(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def derivative(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def second(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def describe(self) -> str:
        ...

    @property
    def flat_at_zero(self) -> bool:
        """g'(0) == 0"""
        return float(self.derivative(np.zeros(1))[0]) == 0.0

    @property
    def at_least_linear(self) -> bool:
        return self.degree >= 1.0

    @property
    def subexponential(self) -> bool:
        return True

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Power(ScalarKernel):
    """g(x) = x^(1+alpha) / (1+alpha)"""
    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"pow kernel needs alpha > 0, got {self.alpha}")

    @property
    def degree(self) -> float:
        return 1.0 + self.alpha

    def value(self, x):
        return np.power(x, 1.0 + self.alpha) / (1.0 + self.alpha)

    def derivative(self, x):
        return np.power(x, self.alpha)

    def second(self, x):
        with np.errstate(divide="ignore"):
            return self.alpha * np.power(x, self.alpha - 1.0)

    def describe(self) -> str:
        return f"pow({self.alpha:g})"


@dataclass(frozen=True)
class Log(ScalarKernel):
    """g(x) = (x+1)(log(x+1) - 1) + 1, so that g(0) = 0 and g'(x) = log(1+x)"""
    log_factor = True

    def value(self, x):
        return (x + 1.0) * (np.log1p(x) - 1.0) + 1.0

    def derivative(self, x):
        return np.log1p(x)

    def second(self, x):
        return 1.0 / (1.0 + x)

    def describe(self) -> str:
        return "log"


@dataclass(frozen=True)
class Lpf(ScalarKernel):
    """f(x) = x + theta (exp(-x/theta) - 1)"""
    theta: float = 1.0

    def __post_init__(self):
        if not self.theta > 0:
            raise ConfigError(f"lpf kernel needs theta > 0, got {self.theta}")

    def value(self, x):
        return x + self.theta * np.expm1(-x / self.theta)

    def derivative(self, x):
        return -np.expm1(-x / self.theta)

    def second(self, x):
        return np.exp(-x / self.theta) / self.theta

    def describe(self) -> str:
        return f"lpf(theta={self.theta:g})"


@dataclass(frozen=True)
class Identity(ScalarKernel):
    """g(x) = x"""

    def value(self, x):
        return np.asarray(x, dtype=float)

    def derivative(self, x):
        return np.ones_like(x, dtype=float)

    def second(self, x):
        return np.zeros_like(x, dtype=float)

    def describe(self) -> str:
        return "identity"
