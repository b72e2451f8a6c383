"""Deterministic builders for the two step-sequence counterexample pairs.

Equality-cancellation pair ("example6"): two step sequences xi <= eta
whose second-order means stay within a factor 2 of each other while the
first-order mean ratio diverges.  Stage k places a spike of height
k e^{-k^2} delta_k for eta (flat e^{-k^2} delta_k for xi) on
(m_k, n_k], n_k = floor(e^{k^2} m_k), then both drop to the common level
delta_{k+1} until the next stage.  Each m_{k+1} is the minimal index past
n_k at which the second-order mean of eta has decayed back to
(1 + 1/(k+1)) delta_{k+1}; the searches ride the closed forms, so the
indices (10^100 and beyond at K = 8) are never enumerated.

Reverse-inclusion pair ("omega-half"): a step sequence xi with levels
1/m_k on (m_k, m_{k+1}], m_{k+1} > e^{2 m_k}, whose second-order mean
dominates omega^{1/2} while its first-order mean does not.  Tower growth
caps buildable stages at K = 4 under the index-magnitude guard.

Both builders are single-threaded (stages depend inductively); the
resulting parameter sets are immutable and serialize to JSON with indices
as decimal strings and levels as log-domain doubles.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .numerics import (
    MAX_LOG10_INDEX,
    ConstructionError,
    log_of_index,
)
from .stepseq import StepSeq
from .numerics import floor_exp

__all__ = [
    "Example6Params",
    "OmegaHalfParams",
    "stage_condition_search",
    "build_example6",
    "build_omega_half",
    "golden_path",
    "load_golden_example6",
    "load_golden_omega_half",
]

_GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


# ----------------------------------------------------------------------------
# Parameter records
# ----------------------------------------------------------------------------

@dataclass
class Example6Params:
    stages: int                 # K
    m: list                     # m_1..m_K (exact ints)
    n: list                     # n_1..n_K
    log_delta: list             # log delta_1..delta_{K+1}
    xi: StepSeq
    eta: StepSeq
    floor_ambiguous: list       # stages whose n_k floor was within 1e-9 of an integer

    def to_json(self) -> dict:
        return {
            "stages": self.stages,
            "m": [str(v) for v in self.m],
            "n": [str(v) for v in self.n],
            "log_delta": [float(v) for v in self.log_delta],
            "floor_ambiguous": list(self.floor_ambiguous),
            "xi": self.xi.to_json(),
            "eta": self.eta.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Example6Params":
        return cls(
            stages=int(obj["stages"]),
            m=[int(v) for v in obj["m"]],
            n=[int(v) for v in obj["n"]],
            log_delta=[float(v) for v in obj["log_delta"]],
            xi=StepSeq.from_json(obj["xi"]),
            eta=StepSeq.from_json(obj["eta"]),
            floor_ambiguous=list(obj.get("floor_ambiguous", [])),
        )


@dataclass
class OmegaHalfParams:
    stages: int                 # K
    m: list                     # m_1..m_K, m_1 = 0
    xi: StepSeq

    def to_json(self) -> dict:
        return {
            "stages": self.stages,
            "m": [str(v) for v in self.m],
            "xi": self.xi.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OmegaHalfParams":
        return cls(
            stages=int(obj["stages"]),
            m=[int(v) for v in obj["m"]],
            xi=StepSeq.from_json(obj["xi"]),
        )


# ----------------------------------------------------------------------------
# Monotone stage search
# ----------------------------------------------------------------------------

def stage_condition_search(z: StepSeq, lower: int, bound_log: float) -> int:
    """Minimal j > lower with (z_{a^2})_j <= bound (log-domain bound).

    Along a constant final step the second-order mean decreases toward the
    level, so the predicate is monotone in j; exponential doubling finds a
    bracket, binary search the boundary.  The returned j satisfies the
    condition while j - 1 violates it (as computed).
    """
    level = z.levels[-1]
    if bound_log <= level:
        raise ConstructionError(
            f"unreachable bound: {bound_log} <= asymptotic level {level}"
        )

    def ok(j: int) -> bool:
        return z.am2_log_at(j) <= bound_log

    j = lower + 1
    if ok(j):
        return j
    lo, hi = j, 2 * j
    while not ok(hi):
        lo = hi
        hi *= 2
        if hi.bit_length() * 0.30103 > MAX_LOG10_INDEX:
            raise ConstructionError("index magnitude guard exceeded during search")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ----------------------------------------------------------------------------
# Equality-cancellation pair
# ----------------------------------------------------------------------------

def build_example6(K: int) -> Example6Params:
    """Build K stages of the equality-cancellation pair.

    delta_1 = 1, delta_{k+1} = e^{-k^2} delta_k (log-exact); m_1 = 1;
    n_k = floor(e^{k^2} m_k); m_{k+1} minimal past n_k with
    (eta_{a^2})_{m_{k+1}} <= (1 + 1/(k+1)) delta_{k+1}, which keeps the
    breakpoint sandwich factor at (1 + 1/k) for stage k's own index.
    """
    if K < 2:
        raise ValueError("need K >= 2 stages")
    m = [1]
    n: list[int] = []
    log_delta = [0.0, -1.0]  # log delta_1, delta_2
    ambiguous: list[int] = []

    xi = StepSeq.constant(0.0).extend(1, log_delta[1])
    eta = StepSeq.constant(0.0).extend(1, math.log(1.0) + log_delta[1])

    for k in range(1, K + 1):
        nk, amb = floor_exp(float(k * k), factor=m[-1])
        if amb:
            ambiguous.append(k)
        if nk <= m[-1]:
            raise ConstructionError(f"stage {k}: n_k not past m_k")
        n.append(nk)
        # eta drops from k*delta_{k+1} to delta_{k+1} at n_k (merged at k=1
        # where the two levels coincide)
        if k > 1:
            eta = eta.extend(nk, log_delta[k])
        if k == K:
            break
        bound = math.log1p(1.0 / (k + 1)) + log_delta[k]
        m_next = stage_condition_search(eta, lower=nk, bound_log=bound)
        log_delta.append(log_delta[k] - float((k + 1) ** 2))
        xi = xi.extend(m_next, log_delta[k + 1])
        eta = eta.extend(m_next, math.log(float(k + 1)) + log_delta[k + 1])
        m.append(m_next)

    return Example6Params(
        stages=K, m=m, n=n, log_delta=log_delta, xi=xi, eta=eta,
        floor_ambiguous=ambiguous,
    )


# ----------------------------------------------------------------------------
# Reverse-inclusion pair
# ----------------------------------------------------------------------------

def build_omega_half(K: int) -> OmegaHalfParams:
    """Build K stages of the reverse-inclusion pair.

    m_1 = 0 and the head level is 1 on (0, m_2] (the construction pins
    only xi_1 = 1 there; this reading is recorded).  For k >= 2 the level
    is 1/m_k on (m_k, m_{k+1}] and m_{k+1} is the minimal index exceeding
    max(floor(e^{2 m_k}) + 1, m_k + 1) with
    (xi_{a^2})_{m_{k+1}} <= (1 + 1/k)/m_k (vacuous at k = 1).
    """
    if K < 2:
        raise ValueError("need K >= 2 stages")
    m = [0]
    xi = StepSeq.constant(0.0)  # level 1 everywhere until the first extension

    for k in range(1, K):
        mk = m[-1]
        if 2 * mk > MAX_LOG10_INDEX * math.log(10.0):
            raise ConstructionError(
                f"stage {k}: e^(2 m_k) exceeds the index magnitude guard"
            )
        fl, _ = floor_exp(float(2 * mk))
        lower_excl = max(fl + 1, mk + 1)
        if k == 1:
            m_next = lower_excl + 1  # bound (1 + 1/k)/m_1 is vacuous at m_1 = 0
        else:
            bound = math.log1p(1.0 / k) - log_of_index(mk)
            m_next = stage_condition_search(xi, lower=lower_excl, bound_log=bound)
        xi = xi.extend(m_next, -log_of_index(m_next))
        m.append(m_next)

    return OmegaHalfParams(stages=K, m=m, xi=xi)


# ----------------------------------------------------------------------------
# Golden files
# ----------------------------------------------------------------------------

def golden_path(name: str) -> str:
    return os.path.join(_GOLDEN_DIR, name)


def load_golden_example6() -> Example6Params:
    with open(golden_path("example6_k8.json")) as fh:
        return Example6Params.from_json(json.load(fh))


def load_golden_omega_half() -> OmegaHalfParams:
    with open(golden_path("omega_half_k4.json")) as fh:
        return OmegaHalfParams.from_json(json.load(fh))
