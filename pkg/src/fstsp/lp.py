"""Dense bounded-variable simplex: the LP engine behind branch-and-cut.

The solver keeps an explicit tableau (basis inverse applied to the constraint
matrix) over structural variables plus one slack per row.  All models built
here minimize with non-negative objective coefficients, so the slack basis is
dual feasible and a cold solve runs the dual simplex directly; bound changes
and appended cut rows preserve dual feasibility, which makes node
re-optimization cheap.  Anything that starts dual infeasible falls back to a
primal two-phase run with artificial columns.

Tolerances: 1e-7 primal feasibility and reduced-cost optimality.  A stalled
run switches to Bland-style smallest-index tie-breaking, which guarantees
termination; a failed residual check triggers refactorization and, if it
persists, an explicit numerical-failure status.  Every variable needs at
least one finite bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
STALL_LIMIT = 300
MAX_ITER = 200_000

AT_LB, AT_UB, BASIC = -1, 1, 0


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL = "numerical_failure"


@dataclass
class LpResult:
    status: LpStatus
    objective: float
    x: Optional[np.ndarray]          # structural variable values
    iterations: int
    message: str = ""


class BoundedSimplex:
    """min c.x  s.t.  A x (<=,>=,=) b,  lo <= x <= hi."""

    def __init__(self, c: Sequence[float], lo: Sequence[float], hi: Sequence[float]) -> None:
        self.n = len(c)
        self.c = np.asarray(c, dtype=float)
        self.lo = np.asarray(lo, dtype=float).copy()
        self.hi = np.asarray(hi, dtype=float).copy()
        for j in range(self.n):
            if not (np.isfinite(self.lo[j]) or np.isfinite(self.hi[j])):
                raise ValueError(f"variable {j} is free; one finite bound required")
        self.rows: list[tuple[np.ndarray, str, float]] = []
        self._fresh = True

    # -- problem construction -------------------------------------------------

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float) -> None:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown sense {sense!r}")
        dense = np.zeros(self.n)
        for idx, coef in coeffs.items():
            dense[idx] = coef
        self.rows.append((dense, sense, float(rhs)))
        if not self._fresh:
            self._append_row_live(dense, sense, rhs)

    def set_bounds(self, var: int, lo: float, hi: float) -> None:
        self.lo[var], self.hi[var] = lo, hi
        if not self._fresh:
            self._apply_bounds_live(var)

    # -- state -----------------------------------------------------------------

    @staticmethod
    def _slack_bounds(sense: str) -> tuple[float, float]:
        if sense == "<=":
            return 0.0, np.inf
        if sense == ">=":
            return -np.inf, 0.0
        return 0.0, 0.0

    def _build(self) -> None:
        m = len(self.rows)
        self.m = m
        self.ncols = self.n + m
        A = np.zeros((m, self.ncols))
        b = np.zeros(m)
        col_lo = np.concatenate([self.lo, np.zeros(m)])
        col_hi = np.concatenate([self.hi, np.zeros(m)])
        for r, (dense, sense, rhs) in enumerate(self.rows):
            A[r, : self.n] = dense
            A[r, self.n + r] = 1.0
            b[r] = rhs
            col_lo[self.n + r], col_hi[self.n + r] = self._slack_bounds(sense)
        self.A = A
        self.b = b
        self.col_lo = col_lo
        self.col_hi = col_hi
        self.cost = np.concatenate([self.c, np.zeros(m)])

        self.basis = np.arange(self.n, self.n + m)
        self.vstat = np.full(self.ncols, AT_LB, dtype=np.int8)
        self.vstat[self.basis] = BASIC
        self.x = np.zeros(self.ncols)
        for j in range(self.n):
            # dual-feasible placement when possible
            if self.cost[j] >= 0 and np.isfinite(col_lo[j]):
                self.vstat[j], self.x[j] = AT_LB, col_lo[j]
            elif np.isfinite(col_hi[j]):
                self.vstat[j], self.x[j] = AT_UB, col_hi[j]
            else:
                self.vstat[j], self.x[j] = AT_LB, col_lo[j]
        self.T = A.copy()          # slack basis: B = identity
        self.d = self.cost.copy()  # reduced costs at the slack basis
        self._set_basic_values()
        self._fresh = False

    def _set_basic_values(self) -> None:
        nb = self.vstat != BASIC
        resid = self.b - self.A[:, nb] @ self.x[nb]
        if self.m:
            B = self.A[:, self.basis]
            self.x[self.basis] = np.linalg.solve(B, resid)

    def _refactor(self) -> None:
        B = self.A[:, self.basis]
        self.T = np.linalg.solve(B, self.A)
        self.d = self.cost - self.cost[self.basis] @ self.T
        self._set_basic_values()

    def _append_row_live(self, dense: np.ndarray, sense: str, rhs: float) -> None:
        arow = np.zeros(self.ncols + 1)
        arow[: self.n] = dense
        arow[-1] = 1.0
        lo_s, hi_s = self._slack_bounds(sense)
        # tableau row in the current basis: a_new - a_B @ T
        trow = np.zeros(self.ncols + 1)
        trow[: self.ncols] = arow[: self.ncols] - arow[self.basis] @ self.T
        trow[-1] = 1.0
        self.A = np.vstack([np.hstack([self.A, np.zeros((self.m, 1))]), arow])
        self.T = np.vstack([np.hstack([self.T, np.zeros((self.m, 1))]), trow])
        self.b = np.append(self.b, rhs)
        self.col_lo = np.append(self.col_lo, lo_s)
        self.col_hi = np.append(self.col_hi, hi_s)
        self.cost = np.append(self.cost, 0.0)
        self.d = np.append(self.d, 0.0)
        slack = self.ncols
        self.ncols += 1
        self.m += 1
        self.x = np.append(self.x, 0.0)
        self.x[slack] = rhs - float(arow[:slack] @ self.x[:slack])
        self.basis = np.append(self.basis, slack)
        self.vstat = np.append(self.vstat, BASIC)

    def _apply_bounds_live(self, var: int) -> None:
        lo, hi = self.lo[var], self.hi[var]
        self.col_lo[var], self.col_hi[var] = lo, hi
        if self.vstat[var] == BASIC:
            return
        old = self.x[var]
        # snap the nonbasic value to the bound its reduced cost prefers, so
        # bound changes keep the basis dual feasible
        d_var = self.d[var] if var < self.d.size else 0.0
        if not np.isfinite(hi) or (np.isfinite(lo) and d_var >= 0):
            new, stat = lo, AT_LB
        elif not np.isfinite(lo) or d_var < 0:
            new, stat = hi, AT_UB
        else:
            new, stat = lo, AT_LB
        if new != old:
            self.x[self.basis] -= self.T[:, var] * (new - old)
            self.x[var] = new
        self.vstat[var] = stat

    # -- pivoting ----------------------------------------------------------------

    def _pivot(self, r: int, e: int) -> None:
        """Tableau/basis pivot only; reduced-cost vectors are the caller's."""
        piv = self.T[r, e]
        self.T[r, :] /= piv
        col = self.T[:, e].copy()
        col[r] = 0.0
        self.T -= np.outer(col, self.T[r, :])
        self.basis[r] = e
        self.vstat[e] = BASIC

    def _objective(self) -> float:
        return float(self.cost @ self.x)

    def _infeasibility(self) -> float:
        xb = self.x[self.basis]
        below = self.col_lo[self.basis] - xb
        above = xb - self.col_hi[self.basis]
        return float(max(below.max(initial=0.0), above.max(initial=0.0)))

    # -- dual simplex ---------------------------------------------------------------

    def _dual_feasible(self) -> bool:
        movable = self.col_lo != self.col_hi
        lb_bad = (self.vstat == AT_LB) & movable & (self.d < -OPT_TOL)
        ub_bad = (self.vstat == AT_UB) & movable & (self.d > OPT_TOL)
        return not bool(lb_bad.any() or ub_bad.any())

    def _dual_iterate(self, iter_budget: int) -> tuple[LpStatus, int]:
        iters = 0
        stall = 0
        best = -np.inf
        bland = False
        while iters < iter_budget:
            xb = self.x[self.basis]
            below = self.col_lo[self.basis] - xb
            above = xb - self.col_hi[self.basis]
            worst = np.maximum(below, above)
            if worst.max(initial=0.0) <= FEAS_TOL:
                return LpStatus.OPTIMAL, iters
            if bland:
                cand = np.nonzero(worst > FEAS_TOL)[0]
                r = int(cand[np.argmin(self.basis[cand])])
            else:
                r = int(np.argmax(worst))
            under = below[r] > FEAS_TOL
            alpha = self.T[r, :]
            movable = self.col_lo != self.col_hi
            if under:
                ok = ((self.vstat == AT_LB) & (alpha < -PIVOT_TOL) & movable) | (
                    (self.vstat == AT_UB) & (alpha > PIVOT_TOL) & movable)
            else:
                ok = ((self.vstat == AT_LB) & (alpha > PIVOT_TOL) & movable) | (
                    (self.vstat == AT_UB) & (alpha < -PIVOT_TOL) & movable)
            idx = np.nonzero(ok)[0]
            if idx.size == 0:
                return LpStatus.INFEASIBLE, iters
            ratios = np.abs(self.d[idx] / alpha[idx])
            best_ratio = float(ratios.min())
            tied = idx[ratios <= best_ratio + 1e-10]
            if bland:
                e = int(tied.min())
            else:
                e = int(tied[np.argmax(np.abs(alpha[tied]))])

            leaving = self.basis[r]
            target = self.col_lo[leaving] if under else self.col_hi[leaving]
            step = -(target - self.x[leaving]) / alpha[e]
            self.x[self.basis] -= self.T[:, e] * step
            self.x[e] += step
            entering_value = self.x[e]
            self.x[leaving] = target
            self.vstat[leaving] = AT_LB if under else AT_UB
            d_e = self.d[e]
            self._pivot(r, e)
            self.d -= d_e * self.T[r, :]
            self.d[e] = 0.0
            self.x[e] = entering_value
            iters += 1
            obj = self._objective()
            if obj > best + 1e-12:
                best, stall, bland = obj, 0, False
            else:
                stall += 1
                if stall > STALL_LIMIT:
                    bland = True
        return LpStatus.ITERATION_LIMIT, iters

    # -- primal simplex ----------------------------------------------------------------

    def _primal_iterate(self, cost: np.ndarray, iter_budget: int) -> tuple[LpStatus, int]:
        d = cost - cost[self.basis] @ self.T
        iters = 0
        stall = 0
        best = np.inf
        bland = False
        while iters < iter_budget:
            movable = self.col_lo != self.col_hi
            up = (self.vstat == AT_LB) & (d < -OPT_TOL) & movable
            down = (self.vstat == AT_UB) & (d > OPT_TOL) & movable
            cand = np.nonzero(up | down)[0]
            if cand.size == 0:
                if cost is self.cost:
                    self.d = d
                return LpStatus.OPTIMAL, iters
            e = int(cand.min()) if bland else int(cand[np.argmax(np.abs(d[cand]))])
            direction = 1.0 if self.vstat[e] == AT_LB else -1.0
            col = self.T[:, e]
            deltas = -direction * col
            t_best = self.col_hi[e] - self.col_lo[e]
            r_best = -1
            xb = self.x[self.basis]
            for r in range(self.m):
                dlt = deltas[r]
                if dlt > PIVOT_TOL:
                    t = (self.col_hi[self.basis[r]] - xb[r]) / dlt
                elif dlt < -PIVOT_TOL:
                    t = (xb[r] - self.col_lo[self.basis[r]]) / (-dlt)
                else:
                    continue
                t = max(t, 0.0)
                if t < t_best - 1e-12:
                    t_best, r_best = t, r
                elif r_best >= 0 and t <= t_best + 1e-12:
                    if bland:
                        if self.basis[r] < self.basis[r_best]:
                            r_best = r
                    elif abs(col[r]) > abs(col[r_best]):
                        r_best = r
            if not np.isfinite(t_best):
                return LpStatus.UNBOUNDED, iters
            self.x[self.basis] += deltas * t_best
            self.x[e] += direction * t_best
            if r_best < 0:
                self.vstat[e] = AT_UB if self.vstat[e] == AT_LB else AT_LB
            else:
                leaving = self.basis[r_best]
                hit_hi = deltas[r_best] > 0
                self.x[leaving] = self.col_hi[leaving] if hit_hi else self.col_lo[leaving]
                self.vstat[leaving] = AT_UB if hit_hi else AT_LB
                entering_value = self.x[e]
                d_e = d[e]
                self._pivot(r_best, e)
                d = d - d_e * self.T[r_best, :]
                d[e] = 0.0
                self.x[e] = entering_value
            iters += 1
            obj = float(cost @ self.x)
            if obj < best - 1e-12:
                best, stall, bland = obj, 0, False
            else:
                stall += 1
                if stall > STALL_LIMIT:
                    bland = True
        return LpStatus.ITERATION_LIMIT, iters

    def _primal_two_phase(self, iter_budget: int) -> tuple[LpStatus, int]:
        """Artificial-column two-phase from scratch; the fallback for starts
        that are not dual feasible."""
        # nonbasic structurals to a finite bound, then artificials absorb b
        for j in range(self.n):
            if self.vstat[j] == BASIC:
                continue
            if np.isfinite(self.col_lo[j]):
                self.vstat[j], self.x[j] = AT_LB, self.col_lo[j]
            else:
                self.vstat[j], self.x[j] = AT_UB, self.col_hi[j]
        for r in range(self.m):
            s = self.n + r
            self.vstat[s] = AT_LB if np.isfinite(self.col_lo[s]) else AT_UB
            self.x[s] = self.col_lo[s] if self.vstat[s] == AT_LB else self.col_hi[s]
        resid = self.b - self.A @ np.where(np.arange(self.ncols) < self.ncols, self.x, 0.0)

        n_art = self.m
        art_cols = np.zeros((self.m, n_art))
        for r in range(self.m):
            art_cols[r, r] = 1.0 if resid[r] >= 0 else -1.0
        self.A = np.hstack([self.A, art_cols])
        self.col_lo = np.concatenate([self.col_lo, np.zeros(n_art)])
        self.col_hi = np.concatenate([self.col_hi, np.full(n_art, np.inf)])
        self.cost = np.concatenate([self.cost, np.zeros(n_art)])
        self.x = np.concatenate([self.x, np.abs(resid)])
        self.vstat = np.concatenate([self.vstat, np.full(n_art, BASIC, dtype=np.int8)])
        self.basis = np.arange(self.ncols, self.ncols + n_art)
        first_art = self.ncols
        self.ncols += n_art
        self.T = self.A * np.sign(np.where(resid >= 0, 1.0, -1.0))[:, None]

        phase_cost = np.zeros(self.ncols)
        phase_cost[first_art:] = 1.0
        status, it1 = self._primal_iterate(phase_cost, iter_budget)
        if status is LpStatus.ITERATION_LIMIT:
            return status, it1
        if float(phase_cost @ self.x) > 1e-6:
            return LpStatus.INFEASIBLE, it1
        # freeze artificials and drive any basic ones out where possible
        self.col_lo[first_art:] = 0.0
        self.col_hi[first_art:] = 0.0
        for r in range(self.m):
            if self.basis[r] >= first_art:
                row = self.T[r, :first_art]
                pivots = np.nonzero(np.abs(row) > 1e-7)[0]
                usable = [int(j) for j in pivots if self.vstat[j] != BASIC]
                if usable:
                    e = usable[0]
                    entering_value = self.x[e]
                    art = self.basis[r]
                    self.x[art] = 0.0
                    self.vstat[art] = AT_LB
                    self._pivot(r, e)
                    self.x[e] = entering_value
        status, it2 = self._primal_iterate(self.cost, iter_budget - it1)
        self.d = self.cost - self.cost[self.basis] @ self.T
        return status, it1 + it2

    # -- driver ---------------------------------------------------------------------------

    def solve(self, iter_budget: int = MAX_ITER) -> LpResult:
        if self._fresh:
            self._build()
        total = 0
        for _attempt in range(3):
            if self.d.size != self.ncols:
                self._refactor()
            if self._dual_feasible():
                status, iters = self._dual_iterate(iter_budget - total)
            else:
                status, iters = self._primal_two_phase(iter_budget - total)
                if status is LpStatus.OPTIMAL and self._infeasibility() > FEAS_TOL:
                    status = LpStatus.NUMERICAL
            total += iters
            if status is not LpStatus.OPTIMAL:
                return LpResult(status, float("nan"), None, total,
                                f"{status.value} after {total} iterations")
            if self._residual() <= 1e-6:
                return LpResult(LpStatus.OPTIMAL, self._objective(),
                                self.x[: self.n].copy(), total)
            self._refactor()
        return LpResult(LpStatus.NUMERICAL, float("nan"), None, total,
                        f"residual {self._residual():.3e} after refactorization")

    def _residual(self) -> float:
        if self.m == 0:
            return 0.0
        return float(np.max(np.abs(self.A @ self.x - self.b)))
