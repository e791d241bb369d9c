"""
Config mini-language for potentials, e.g. `add(sum_scalar(pow(1.0)), 1.0, quad(identity, Q=@Q), 0.5)`
"""
import ast
import re
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional

import numpy as np

from ..errors import ConfigError
from .algebra import combine
from .kernels import Identity, Log, Lpf, Power
from .nodes import Potential, QuadForm, SumScalar, linear

_REF = re.compile(r"@([A-Za-z0-9_./\-]+)")


class MatrixResolver:
    """
    Resolves `@name` references: the config's `matrices:` map first, then the
    `conflict` matrix of the first constraint region, then a whitespace
    numeric text file relative to the config directory.
    """

    def __init__(
        self,
        matrices: Optional[Mapping[str, Any]] = None,
        conflict: Optional[np.ndarray] = None,
        base_dir: Optional[Path] = None,
    ):
        self.matrices = dict(matrices or {})
        self.conflict = conflict
        self.base_dir = Path(base_dir) if base_dir is not None else Path(".")

    def __call__(self, name: str) -> np.ndarray:
        if name in self.matrices:
            return np.asarray(self.matrices[name], dtype=float)
        if name == "conflict" and self.conflict is not None:
            return np.asarray(self.conflict, dtype=float)
        path = self.base_dir / name
        if path.is_file():
            return np.loadtxt(path, ndmin=2)
        raise ConfigError(f"unresolved matrix reference @{name}")


class MiniLanguage:
    """
    Restricted call-expression evaluator over a function table

    Expressions are parsed with `ast` in eval mode and walked node by node;
    only calls of table entries, numeric/boolean/string literals and list
    literals are accepted. Bare names are zero-argument calls.
    """

    def __init__(self, functions: Dict[str, Callable[..., Any]], resolver: Optional[MatrixResolver] = None):
        self.functions = functions
        self.resolver = resolver or MatrixResolver()

    def parse(self, text: str) -> Any:
        source = _REF.sub(lambda m: f"_ref({m.group(1)!r})", text.strip())
        try:
            tree = ast.parse(source, mode="eval")
        except SyntaxError as e:
            raise ConfigError(f"cannot parse {text!r}: {e.msg}") from e
        return self._eval(tree.body, text)

    def _eval(self, node: ast.AST, text: str) -> Any:
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, str, bool)):
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -self._eval(node.operand, text)
        if isinstance(node, (ast.List, ast.Tuple)):
            return [self._eval(e, text) for e in node.elts]
        if isinstance(node, ast.Name):
            return self._call(node.id, [], {}, text)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            name = node.func.id
            if name == "_ref":
                return self.resolver(self._eval(node.args[0], text))
            args = [self._eval(a, text) for a in node.args]
            kwargs = {k.arg: self._eval(k.value, text) for k in node.keywords}
            return self._call(name, args, kwargs, text)
        raise ConfigError(f"unsupported syntax in {text!r}: {ast.dump(node)[:60]}")

    def _call(self, name: str, args, kwargs, text: str) -> Any:
        fn = self.functions.get(name)
        if fn is None:
            raise ConfigError(f"unknown name {name!r} in {text!r} (known: {', '.join(sorted(self.functions))})")
        try:
            return fn(*args, **kwargs)
        except TypeError as e:
            raise ConfigError(f"bad arguments to {name} in {text!r}: {e}") from e


def _pow(alpha: float = 1.0) -> Power:
    return Power(float(alpha))


def _lpf(theta: float = 1.0) -> Lpf:
    return Lpf(float(theta))


def _quad(kernel, Q=None, pd: bool = False, offdiag: Optional[str] = None) -> QuadForm:
    if Q is None:
        raise ConfigError("quad needs a matrix argument Q=")
    return QuadForm(kernel, np.asarray(Q, dtype=float), pd=bool(pd), offdiag=offdiag)


def _lpf_quad(theta: float = 1.0, P=None) -> QuadForm:
    if P is None:
        raise ConfigError("lpf_quad needs a matrix argument P=")
    return QuadForm(Lpf(float(theta)), np.asarray(P, dtype=float))


def _add(a: Potential, alpha: float, b: Potential, beta: float) -> Potential:
    return combine("sum", a, alpha, b, beta)


POTENTIAL_FUNCTIONS: Dict[str, Callable[..., Any]] = {
    "pow": _pow,
    "log": Log,
    "lpf": _lpf,
    "identity": Identity,
    "sum_scalar": SumScalar,
    "linear": linear,
    "quad": _quad,
    "lpf_quad": _lpf_quad,
    "add": _add,
    "mul": lambda a, b: combine("product", a, b),
    "outer": lambda k, g: combine("outer", k, g),
    "inner": lambda g, k: combine("inner", g, k),
}


def parse_potential(text: str, resolver: Optional[MatrixResolver] = None) -> Potential:
    """
    Parse a potential expression

    Raises:
        ConfigError: syntax errors, unknown names, unresolved matrices, or a
            violated composition rule (PotentialAlgebraError)
    """
    result = MiniLanguage(POTENTIAL_FUNCTIONS, resolver).parse(text)
    if not isinstance(result, Potential):
        raise ConfigError(f"{text!r} is not a potential (got {type(result).__name__})")
    return result
