"""Piecewise-constant sequences with O(log K) closed-form first and
second order means at arbitrary (big-integer) indices.

A step sequence is constant on (m_k, m_{k+1}] with strictly decreasing
positive levels eps_k; the last level extends past the final breakpoint.
Writing A_k and B_k for the first and second order means at m_k, the
closed forms on (m_k, m_{k+1}] are

    mean(j)  = (m_k/j) (A_k - eps_k) + eps_k
    mean2(j) = (m_k/j) (B_k - eps_k + (A_k - eps_k)(H_j - H_{m_k})) + eps_k

so only the per-breakpoint aggregates are needed, never a dense pass.
Breakpoints in the inductive constructions exceed 10^100; indices are
exact ints and harmonic differences use the asymptotic engine.

Two numeric modes share the structure: "log" stores levels/aggregates as
log-domain floats (the subtractions A_k - eps_k are formed once per
breakpoint under the cancellation guard); "rational" stores exact
rationals and is restricted to modest indices (harmonic gaps are summed
exactly), serving as the oracle backend.
"""

from __future__ import annotations

import math
from bisect import bisect_left

import numpy as np

from .numerics import (
    NEG_INF,
    ConstructionError,
    HorizonExceeded,
    LogReal,
    Q,
    default_harmonic,
    log_add,
    log_of_index,
    log_ratio,
    log_sub,
    sum_inverse_range,
)

__all__ = ["StepSeq", "step_am_at", "step_am2_at", "extend_step"]

_RATIONAL_GAP_LIMIT = 1 << 21  # exact harmonic gaps are summed term by term


class StepSeq:
    """Immutable step sequence with cached mean aggregates per breakpoint.

    `breakpoints[0] == 0`; `levels[i]` holds on `(breakpoints[i],
    breakpoints[i+1]]` and `levels[-1]` extends to infinity.  `extend`
    returns a new instance (persistent-structure semantics).
    """

    def __init__(self, breakpoints, levels, _agg=None, mode: str = "log"):
        if mode not in ("log", "rational"):
            raise ValueError("mode must be 'log' or 'rational'")
        self.mode = mode
        self.breakpoints = list(breakpoints)
        self.levels = list(levels)
        if self.breakpoints[0] != 0 or len(self.breakpoints) != len(self.levels):
            raise ConstructionError("need breakpoints[0]=0 and one level per breakpoint")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ConstructionError("breakpoints must be strictly increasing")
        if mode == "log":
            if any(a <= b for a, b in zip(self.levels, self.levels[1:])):
                raise ConstructionError("levels must be strictly decreasing")
        else:
            if any(v <= 0 for v in self.levels) or any(
                a <= b for a, b in zip(self.levels, self.levels[1:])
            ):
                raise ConstructionError("levels must be positive, strictly decreasing")
        if _agg is not None:
            self._A, self._B, self._DA, self._DB = _agg
        else:
            self._rebuild_aggregates()

    @classmethod
    def constant(cls, level, mode: str = "log") -> "StepSeq":
        """The constant sequence at `level` (log-domain float in log mode,
        exact rational in rational mode); extend() adds steps."""
        return cls([0], [level], mode=mode)

    # -- aggregates -----------------------------------------------------------

    def _rebuild_aggregates(self) -> None:
        self._A = [self.levels[0]]
        self._B = [self.levels[0]]
        zero = NEG_INF if self.mode == "log" else Q(0)
        self._DA = [zero]
        self._DB = [zero]
        for k in range(1, len(self.breakpoints)):
            m = self.breakpoints[k]
            a = self._am_at(m, upto_k=k)
            b = self._am2_at(m, upto_k=k)
            self._append_aggregate(a, b, self.levels[k])

    def _append_aggregate(self, a, b, new_level) -> None:
        self._A.append(a)
        self._B.append(b)
        if self.mode == "log":
            self._DA.append(log_sub(a, new_level))
            self._DB.append(log_sub(b, new_level))
        else:
            self._DA.append(a - new_level)
            self._DB.append(b - new_level)
            if self._DA[-1] < 0 or self._DB[-1] < 0:
                raise ConstructionError("aggregate below level: not a mean")

    # -- interval lookup --------------------------------------------------------

    def _interval(self, j: int) -> int:
        if j < 1:
            raise ValueError("step sequence indices start at 1")
        return bisect_left(self.breakpoints, j) - 1

    def _hdiff(self, j: int, m: int):
        if self.mode == "log":
            return default_harmonic().harmonic_diff(j, m)
        if j - m > _RATIONAL_GAP_LIMIT:
            raise HorizonExceeded("rational-mode harmonic gap too large")
        return sum_inverse_range(m + 1, j)

    # -- evaluation ---------------------------------------------------------------

    def level_log_at(self, j: int) -> float:
        lv = self.levels[self._interval(j)]
        return lv if self.mode == "log" else math.log(float(lv))

    def level_exact_at(self, j: int):
        if self.mode != "rational":
            raise HorizonExceeded("exact view requires rational mode")
        return self.levels[self._interval(j)]

    def _am_at(self, j: int, upto_k: int | None = None):
        k = self._interval(j) if upto_k is None else min(self._interval(j), upto_k - 1)
        if k == 0:
            return self.levels[0]
        # interval choice guarantees breakpoints[k] < j <= breakpoints[k+1]
        m, eps, da = self.breakpoints[k], self.levels[k], self._DA[k]
        if self.mode == "log":
            return log_add(log_ratio(m, j) + da, eps)
        return Q(m, j) * da + eps

    def _am2_at(self, j: int, upto_k: int | None = None):
        k = self._interval(j) if upto_k is None else min(self._interval(j), upto_k - 1)
        if k == 0:
            return self.levels[0]
        m, eps = self.breakpoints[k], self.levels[k]
        da, db = self._DA[k], self._DB[k]
        h = self._hdiff(j, m)
        if self.mode == "log":
            inner = db if h == 0.0 else log_add(db, da + math.log(h))
            if inner == NEG_INF:
                return eps
            return log_add(log_ratio(m, j) + inner, eps)
        return Q(m, j) * (db + da * h) + eps

    def am_log_at(self, j: int) -> float:
        v = self._am_at(j)
        return v if self.mode == "log" else math.log(float(v))

    def am2_log_at(self, j: int) -> float:
        v = self._am2_at(j)
        return v if self.mode == "log" else math.log(float(v))

    def am_exact_at(self, j: int):
        if self.mode != "rational":
            raise HorizonExceeded("exact view requires rational mode")
        return self._am_at(j)

    def am2_exact_at(self, j: int):
        if self.mode != "rational":
            raise HorizonExceeded("exact view requires rational mode")
        return self._am2_at(j)

    # -- construction ----------------------------------------------------------------

    def extend(self, new_m: int, new_level) -> "StepSeq":
        """Append a breakpoint at new_m with the level holding after it;
        aggregates at new_m are computed from the current closed forms."""
        if new_m <= self.breakpoints[-1]:
            raise ConstructionError("new breakpoint must exceed the last one")
        if not new_level < self.levels[-1]:
            raise ConstructionError("new level must be strictly below the last one")
        if self.mode == "rational" and new_level <= 0:
            raise ConstructionError("levels must stay positive")
        a = self._am_at(new_m)
        b = self._am2_at(new_m)
        out = StepSeq(
            self.breakpoints + [new_m],
            self.levels + [new_level],
            _agg=(list(self._A), list(self._B), list(self._DA), list(self._DB)),
            mode=self.mode,
        )
        out._append_aggregate(a, b, new_level)
        return out

    # -- dense helpers ------------------------------------------------------------------

    def dense_level_logs(self, upto: int) -> np.ndarray:
        out = np.empty(upto)
        for k, lev in enumerate(self.levels):
            lo = self.breakpoints[k]
            hi = self.breakpoints[k + 1] if k + 1 < len(self.breakpoints) else upto
            if lo >= upto:
                break
            lv = lev if self.mode == "log" else math.log(float(lev))
            out[lo: min(hi, upto)] = lv
        return out

    # -- serialization ----------------------------------------------------------------------

    def to_json(self) -> dict:
        obj = {"mode": self.mode, "breakpoints": [str(b) for b in self.breakpoints]}
        if self.mode == "log":
            obj["levels_log"] = [float(v) for v in self.levels]
        else:
            obj["levels"] = [str(v) for v in self.levels]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "StepSeq":
        breaks = [int(b) for b in obj["breakpoints"]]
        if obj.get("mode", "log") == "log":
            return cls(breaks, [float(v) for v in obj["levels_log"]], mode="log")
        levels = []
        for v in obj["levels"]:
            num, _, den = str(v).partition("/")
            levels.append(Q(int(num), int(den)) if den else Q(int(num)))
        return cls(breaks, levels, mode="rational")

    def __repr__(self) -> str:
        return f"<StepSeq {self.mode} K={len(self.breakpoints) - 1}>"


# -- spec-surface wrappers (LogReal-valued in log mode, exact in rational) ----

def step_am_at(z: StepSeq, j: int):
    """(z_a)_j via the cached closed form."""
    return LogReal(z.am_log_at(j)) if z.mode == "log" else z.am_exact_at(j)


def step_am2_at(z: StepSeq, j: int):
    """(z_{a^2})_j via the cached closed form."""
    return LogReal(z.am2_log_at(j)) if z.mode == "log" else z.am2_exact_at(j)


def extend_step(z: StepSeq, new_m: int, new_level) -> StepSeq:
    """Functional alias for StepSeq.extend; accepts LogReal levels."""
    if isinstance(new_level, LogReal):
        new_level = new_level.log_value
    return z.extend(new_m, new_level)
