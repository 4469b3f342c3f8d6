"""Thin shim over the HiGHS bindings vendored inside scipy.

The incremental interface (persistent model, bound changes, appended rows,
hot-started re-solves) is what makes tree search fast; it lives in a private
scipy module, so everything here degrades gracefully: ``IncrementalHighs``
raises ImportError when the bindings are missing and callers fall back to
the public ``scipy.optimize.linprog`` one-shot path.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

try:
    from scipy.optimize._highspy import _core as _h
    _HAS_CORE = True
except ImportError:  # pragma: no cover - depends on scipy build
    _h = None
    _HAS_CORE = False

INF = float("inf")


def has_incremental() -> bool:
    return _HAS_CORE


class IncrementalHighs:
    """Persistent HiGHS LP: load once, then mutate bounds / append rows and
    re-run with a hot basis."""

    def __init__(self) -> None:
        if not _HAS_CORE:
            raise ImportError("vendored HiGHS bindings unavailable")
        self._solver = _h._Highs()
        self._solver.setOptionValue("output_flag", False)
        self._solver.setOptionValue("threads", 1)
        self._solver.setOptionValue("random_seed", 0)

    def load(self, cost: np.ndarray, lo: np.ndarray, hi: np.ndarray,
             rows: Sequence[tuple[dict[int, float], str, float]]) -> None:
        lp = _h.HighsLp()
        n = len(cost)
        m = len(rows)
        lp.num_col_ = n
        lp.num_row_ = m
        lp.col_cost_ = list(map(float, cost))
        lp.col_lower_ = [v if math.isfinite(v) else -INF for v in lo]
        lp.col_upper_ = [v if math.isfinite(v) else INF for v in hi]
        row_lower, row_upper = [], []
        start, index, value = [0], [], []
        for coeffs, sense, rhs in rows:
            lower, upper = _row_bounds(sense, rhs)
            row_lower.append(lower)
            row_upper.append(upper)
            for col in sorted(coeffs):
                index.append(col)
                value.append(float(coeffs[col]))
            start.append(len(index))
        lp.row_lower_ = row_lower
        lp.row_upper_ = row_upper
        lp.a_matrix_.format_ = _h.MatrixFormat.kRowwise
        lp.a_matrix_.start_ = start
        lp.a_matrix_.index_ = index
        lp.a_matrix_.value_ = value
        status = self._solver.passModel(lp)
        if status == _h.HighsStatus.kError:
            raise RuntimeError("HiGHS rejected the model")

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> None:
        lower, upper = _row_bounds(sense, rhs)
        cols = sorted(coeffs)
        vals = [float(coeffs[c]) for c in cols]
        self._solver.addRow(lower, upper, len(cols), np.array(cols, dtype=np.int32),
                            np.array(vals))

    def change_bounds(self, col: int, lo: float, hi: float) -> None:
        self._solver.changeColBounds(col, lo if math.isfinite(lo) else -INF,
                                     hi if math.isfinite(hi) else INF)

    def solve(self) -> tuple[str, float, Optional[np.ndarray], int]:
        """Returns (status, objective, x, simplex iterations)."""
        self._solver.run()
        status = self._solver.getModelStatus()
        info = self._solver.getInfo()
        iters = int(info.simplex_iteration_count)
        if status == _h.HighsModelStatus.kOptimal:
            x = np.array(self._solver.getSolution().col_value)
            return "optimal", float(info.objective_function_value), x, iters
        if status in (_h.HighsModelStatus.kInfeasible,
                      _h.HighsModelStatus.kUnboundedOrInfeasible):
            # every model here has finite variable bounds, so "unbounded or
            # infeasible" can only mean infeasible
            return "infeasible", float("nan"), None, iters
        if status == _h.HighsModelStatus.kUnbounded:
            return "unbounded", float("nan"), None, iters
        return f"failed:{status}", float("nan"), None, iters


def _row_bounds(sense: str, rhs: float) -> tuple[float, float]:
    if sense == "<=":
        return -INF, float(rhs)
    if sense == ">=":
        return float(rhs), INF
    return float(rhs), float(rhs)
