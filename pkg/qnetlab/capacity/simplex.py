"""
Dense two-phase simplex with Bland's rule
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-10
FEASIBILITY_TOLERANCE = 1e-8


@dataclass
class SimplexResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class TwoPhaseSimplex:
    """
    maximize c.x subject to A_eq x = b_eq, A_ge x >= b_ge, x >= 0

    Tableaux are dense numpy arrays; the sizes this is used for are tiny.
    """

    def __init__(self, max_iterations: Optional[int] = None):
        self.max_iterations = max_iterations

    @staticmethod
    def _pivot(T: np.ndarray, row: int, col: int):
        T[row, :] /= T[row, col]
        for r in range(T.shape[0]):
            if r != row and T[r, col] != 0.0:
                T[r, :] -= T[r, col] * T[row, :]

    @staticmethod
    def _enter(z_row: np.ndarray, allowed: np.ndarray) -> int:
        # Bland: lowest index with negative reduced cost
        idx = np.flatnonzero((z_row[:-1] < -PIVOT_TOLERANCE) & allowed)
        return int(idx[0]) if len(idx) else -1

    @staticmethod
    def _leave(T: np.ndarray, col: int, basis: List[int]) -> int:
        best_row, best_ratio = -1, np.inf
        for i in range(T.shape[0] - 1):
            a = T[i, col]
            if a > PIVOT_TOLERANCE:
                ratio = T[i, -1] / a
                # ties go to the lowest basic variable index
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12 and basis[i] < basis[best_row]
                ):
                    best_row, best_ratio = i, ratio
        return best_row

    def _run(self, T: np.ndarray, basis: List[int], allowed: np.ndarray) -> str:
        limit = self.max_iterations or 50 * sum(T.shape)
        for _ in range(limit):
            j = self._enter(T[-1, :], allowed)
            if j == -1:
                return "optimal"
            i = self._leave(T, j, basis)
            if i == -1:
                return "unbounded"
            self._pivot(T, i, j)
            basis[i] = j
        logger.warning("simplex hit the iteration limit (%d)", limit)
        return "iteration_limit"

    def solve(
        self,
        c: np.ndarray,
        a_eq: np.ndarray,
        b_eq: np.ndarray,
        a_ge: Optional[np.ndarray] = None,
        b_ge: Optional[np.ndarray] = None,
    ) -> SimplexResult:
        c = np.asarray(c, dtype=float)
        n = c.shape[0]
        rows = [np.asarray(a_eq, dtype=float).reshape(-1, n)]
        rhs = [np.asarray(b_eq, dtype=float).ravel()]
        n_eq = rows[0].shape[0]
        if a_ge is not None:
            rows.append(np.asarray(a_ge, dtype=float).reshape(-1, n))
            rhs.append(np.asarray(b_ge, dtype=float).ravel())
        a = np.vstack(rows)
        b = np.concatenate(rhs)
        m = a.shape[0]
        n_ge = m - n_eq

        # surplus columns for >= rows, then one artificial per row
        surplus = np.zeros((m, n_ge))
        surplus[n_eq:, :] = -np.eye(n_ge)
        a = np.hstack([a, surplus])
        flip = b < 0
        a[flip] *= -1.0
        b = np.where(flip, -b, b)

        n_struct = n + n_ge
        total = n_struct + m
        T = np.zeros((m + 1, total + 1))
        T[:m, :n_struct] = a
        T[:m, n_struct:total] = np.eye(m)
        T[:m, -1] = b
        basis = list(range(n_struct, total))

        # phase I: maximize -sum(artificials)
        T[-1, :] = -T[:m, :].sum(axis=0)
        T[-1, n_struct:total] = 0.0
        status = self._run(T, basis, np.ones(total, dtype=bool))
        if status != "optimal":
            return SimplexResult(status)
        if T[-1, -1] < -FEASIBILITY_TOLERANCE:
            return SimplexResult("infeasible")

        # drive artificials out of the basis; rows that cannot pivot are redundant
        keep = []
        for r, bc in enumerate(basis):
            if bc >= n_struct:
                cols = np.flatnonzero(np.abs(T[r, :n_struct]) > PIVOT_TOLERANCE)
                if len(cols):
                    self._pivot(T, r, int(cols[0]))
                    basis[r] = int(cols[0])
                    keep.append(r)
            else:
                keep.append(r)
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[r] for r in keep]

        # phase II with artificial columns locked out
        allowed = np.zeros(total, dtype=bool)
        allowed[:n_struct] = True
        cost = np.zeros(total)
        cost[:n] = c
        T[-1, :] = 0.0
        T[-1, :total] = -cost
        for r, bc in enumerate(basis):
            if cost[bc] != 0.0:
                T[-1, :] += cost[bc] * T[r, :]
        status = self._run(T, basis, allowed)
        if status != "optimal":
            return SimplexResult(status)

        x = np.zeros(total)
        for r, bc in enumerate(basis):
            x[bc] = T[r, -1]
        x = np.where(x[:n] < 0, 0.0, x[:n])
        return SimplexResult("optimal", x, float(c @ x))
