"""Sequence model and the arithmetic-mean calculus.

A ``Seq`` is a nonincreasing null sequence of nonnegative reals, evaluable
at any positive index.  Formula and step-backed kinds have closed forms at
arbitrary (big-integer) indices; derived kinds (means of general
sequences, reconstructions) are dense-enumerated up to a horizon and raise
``HorizonExceeded`` beyond it.

Values live in the log domain (floats holding natural logs, -inf for 0).
Every kind additionally exposes an exact-rational view used by oracle
tests at small horizons; for families with irrational entries the exact
view is taken over the exact binary rationals of the double-precision
values, so algebraic identities of the calculus still hold exactly.

Ratios of means (regularity, concavity) are O(log n) and are returned in
the plain linear float domain.
"""

from __future__ import annotations

import math

import numpy as np

from .numerics import (
    NEG_INF,
    ConstructionError,
    FiniteRankError,
    HorizonExceeded,
    PowerSumEngine,
    Q,
    default_harmonic,
    log_add,
    log_of_index,
)
from . import stepseq as _stepseq

__all__ = [
    "DEFAULT_DENSE_HORIZON",
    "Seq",
    "PowerSeq",
    "LogPowerSeq",
    "IterLogSeq",
    "HeadTailSeq",
    "StepView",
    "MeanSeq",
    "AmpliationSeq",
    "TabulatedSeq",
    "RatioSeq",
    "ConcavitySeq",
    "am",
    "am_pow",
    "ampliation",
    "ratio_of_regularity",
    "concavity_ratio",
    "domination_profile",
    "dominates_pointwise",
    "geometric_indices",
    "seq_to_json",
    "seq_from_json",
]

DEFAULT_DENSE_HORIZON = 10 ** 6
EXACT_HORIZON_GUARD = 1 << 17

# empirical nullity: value at the horizon must be below this fraction of
# the first value, otherwise the sequence is flagged non-null
NULL_FACTOR = 1e-2


def geometric_indices(lo: int, hi: int, count: int = 16) -> list[int]:
    """Deterministic geometric grid of integer indices in [lo, hi];
    endpoints included, big indices materialised via exact floors."""
    if hi < lo:
        return []
    if hi == lo:
        return [lo]
    lls, lhs = math.log(lo), math.log(hi)
    out = {lo, hi}
    for t in np.linspace(0.0, 1.0, count):
        target = lls + float(t) * (lhs - lls)
        if target < 700.0:
            j = int(round(math.exp(target)))
        else:
            from .numerics import floor_exp

            j, _ = floor_exp(target)
        out.add(min(max(j, lo), hi))
    return sorted(out)


# ----------------------------------------------------------------------------
# Base class
# ----------------------------------------------------------------------------

class Seq:
    """Abstract nonincreasing null sequence.

    Instances are immutable after construction except for memo caches,
    which behave as pure function tables (idempotent fills), so concurrent
    reads of distinct or shared instances are safe.
    """

    kind = "abstract"

    def __init__(self, label: str, dense_horizon: int = DEFAULT_DENSE_HORIZON):
        self.label = label
        self.dense_horizon = int(dense_horizon)
        self.warnings: tuple[str, ...] = ()
        self._dense: np.ndarray | None = None
        self._dense_prefix: np.ndarray | None = None
        self._exact_prefix: list | None = None
        self.null_certified = True

    # -- contract: scalar log views ---------------------------------------

    def log_value(self, n: int) -> float:
        raise NotImplementedError

    def has_closed_prefix(self) -> bool:
        return False

    def has_closed_values(self) -> bool:
        """Whether log_value works at arbitrary indices (prefix may not)."""
        return self.has_closed_prefix()

    def log_prefix(self, n: int) -> float:
        """log of sum_{j<=n} value(j); dense-backed unless overridden."""
        self._check_index(n)
        if n > self.dense_horizon:
            raise HorizonExceeded(
                f"{self.label}: prefix at n={n} beyond dense horizon {self.dense_horizon}"
            )
        return float(self.dense_log_prefix(n)[n - 1])

    # -- exact-rational views ----------------------------------------------

    def fraction_value(self, n: int):
        """Exact rational of the (double-precision) value at n."""
        self._check_index(n)
        lv = self.log_value(n)
        if lv == NEG_INF:
            return Q(0)
        if lv < -700.0:
            raise HorizonExceeded(
                f"{self.label}: value at n={n} below double range; no rational view"
            )
        return Q(math.exp(lv))

    def fraction_prefix(self, n: int):
        self._check_index(n)
        if n > EXACT_HORIZON_GUARD:
            raise HorizonExceeded(f"exact prefix capped at {EXACT_HORIZON_GUARD}")
        if self._exact_prefix is None:
            self._exact_prefix = [self.fraction_value(1)]
        while len(self._exact_prefix) < n:
            k = len(self._exact_prefix) + 1
            self._exact_prefix.append(self._exact_prefix[-1] + self.fraction_value(k))
        return self._exact_prefix[n - 1]

    # -- dense caches -------------------------------------------------------

    def _dense_log(self, upto: int) -> np.ndarray:
        return np.array([self.log_value(i) for i in range(1, upto + 1)])

    def dense_log(self, upto: int) -> np.ndarray:
        if upto > self.dense_horizon:
            raise HorizonExceeded(
                f"{self.label}: dense request {upto} beyond horizon {self.dense_horizon}"
            )
        if self._dense is None or len(self._dense) < upto:
            size = min(self.dense_horizon, max(upto, 4096))
            self._dense = self._dense_log(size)
            self._dense_prefix = None
        return self._dense[:upto]

    def dense_log_prefix(self, upto: int) -> np.ndarray:
        vals = self.dense_log(upto)
        if self._dense_prefix is None or len(self._dense_prefix) < upto:
            self._dense_prefix = np.logaddexp.accumulate(self._dense)
        return self._dense_prefix[:upto]

    # -- shared helpers -------------------------------------------------------

    @staticmethod
    def _check_index(n: int) -> None:
        if n < 1:
            raise ValueError("sequence indices start at 1")

    def certify(self, probe_horizon: int | None = None) -> None:
        """Empirical monotone/null certification; records warnings.

        Null evidence is either a small value ratio at the horizon or a
        still-strictly-decreasing trend over the last probed decade; a
        flat tail (constant sequences) is flagged non-null.
        """
        h = min(probe_horizon or self.dense_horizon, self.dense_horizon)
        probes = geometric_indices(1, h, 24)
        warnings = []
        prev = math.inf
        for j in probes:
            try:
                v = self.log_value(j)
            except HorizonExceeded:
                break
            if v > prev + 1e-12:
                raise ConstructionError(
                    f"{self.label}: not nonincreasing near n={j}"
                )
            prev = v
        v1 = self.log_value(1)
        vh = prev
        vmid = self.log_value(max(1, h // 8))
        decayed = vh == NEG_INF or vh <= v1 + math.log(NULL_FACTOR)
        decaying = vh < vmid - 1e-9
        if not (decayed or decaying):
            self.null_certified = False
            warnings.append(
                f"nullity not certified at horizon (value ratio {math.exp(min(vh - v1, 700.0)):.3g})"
            )
        self.warnings = tuple(warnings)

    def first_zero_index(self, upto: int) -> int | None:
        """First n <= upto with value 0, or None (binary search on the
        monotone tail)."""
        upto = min(upto, self.dense_horizon) if not self.has_closed_prefix() else upto
        if self.log_value(upto) > NEG_INF:
            return None
        lo, hi = 1, upto  # value(lo) may be zero too
        if self.log_value(1) == NEG_INF:
            return 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.log_value(mid) == NEG_INF:
                hi = mid
            else:
                lo = mid
        return hi

    # -- serialization --------------------------------------------------------

    def params(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params(), "horizon": self.dense_horizon}

    def __repr__(self) -> str:
        return f"<Seq {self.label}>"


# ----------------------------------------------------------------------------
# Formula families
# ----------------------------------------------------------------------------

class PowerSeq(Seq):
    """omega^p = <n^(-p)>, closed form at any index, prefix via engines."""

    kind = "omega-p"

    def __init__(self, p: float, dense_horizon: int = DEFAULT_DENSE_HORIZON):
        if p <= 0:
            raise ValueError("power family needs p > 0")
        super().__init__(f"omega^{p:g}", dense_horizon)
        self.p = float(p)
        self._engine = None if self.p == 1.0 else PowerSumEngine(self.p, min(dense_horizon, 10 ** 6))

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return -self.p * log_of_index(n)

    def has_closed_prefix(self) -> bool:
        return True

    def log_prefix(self, n: int) -> float:
        self._check_index(n)
        if self.p == 1.0:
            return math.log(default_harmonic().harmonic(n))
        s = self._engine.prefix(n)
        if math.isfinite(s):
            return math.log(s)
        # overflow: leading asymptotic term in the log domain
        lk = log_of_index(n)
        return (1.0 - self.p) * lk - math.log(1.0 - self.p)

    def fraction_value(self, n: int):
        self._check_index(n)
        if self.p == int(self.p):
            return Q(1, n ** int(self.p))
        return super().fraction_value(n)

    def _dense_log(self, upto: int) -> np.ndarray:
        return -self.p * np.log(np.arange(1, upto + 1, dtype=float))

    def params(self) -> dict:
        return {"p": self.p}


class LogPowerSeq(Seq):
    """<log^p n * (log log n)^q / n> with the head clamped at the first
    index from which the formula is nonincreasing."""

    kind = "log-power"

    def __init__(self, p: float, q: float = 0.0, dense_horizon: int = DEFAULT_DENSE_HORIZON):
        if p < 0 or (p == 0 and q <= 0):
            raise ValueError("log-power family needs p > 0 (or q > 0)")
        label = f"log^{p:g}/n" if q == 0 else f"log^{p:g}(loglog)^{q:g}/n"
        super().__init__(label, dense_horizon)
        self.p = float(p)
        self.q = float(q)
        self.n0 = self._monotone_start()

    def _formula_log(self, x: np.ndarray | float):
        lx = np.log(x)
        out = self.p * np.log(lx) - lx
        if self.q != 0.0:
            out = out + self.q * np.log(np.log(lx))
        return out

    def _monotone_start(self) -> int:
        lo = 4 if self.q == 0 else 17  # need log log (log) x defined and positive
        xs = np.arange(lo, 10 ** 5, dtype=float)
        f = self._formula_log(xs)
        ascents = np.nonzero(np.diff(f) > 0)[0]
        if len(ascents) and ascents[-1] == len(f) - 2:
            raise ConstructionError("log-power family still ascending at probe end")
        return lo if not len(ascents) else lo + int(ascents[-1]) + 1

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return float(self._formula_log(float(max(n, self.n0))))

    def has_closed_values(self) -> bool:
        return True

    def _dense_log(self, upto: int) -> np.ndarray:
        idx = np.maximum(np.arange(1, upto + 1, dtype=float), float(self.n0))
        return self._formula_log(idx)

    def params(self) -> dict:
        return {"p": self.p, "q": self.q}


class IterLogSeq(Seq):
    """<exp(int_{e^e}^n dt/(t log log t)) / (n log^2 log n)>, clamped head.

    The integral is li(log n) - li(e); a slowly-varying family whose mean
    ratio trends like log log n.
    """

    kind = "iterlog"

    _LI_E = 1.8951178163559368  # li(e) = Ei(1)

    def __init__(self, dense_horizon: int = DEFAULT_DENSE_HORIZON):
        super().__init__("iterlog", dense_horizon)
        self.n0 = self._monotone_start()

    @staticmethod
    def _li_of_log(x):
        from scipy.special import expi

        return expi(np.log(np.log(x)))

    def _formula_log(self, x):
        return self._li_of_log(x) - self._LI_E - np.log(x) - 2.0 * np.log(np.log(np.log(x)))

    def _monotone_start(self) -> int:
        xs = np.arange(16, 10 ** 5, dtype=float)
        f = self._formula_log(xs)
        ascents = np.nonzero(np.diff(f) > 0)[0]
        return 16 if not len(ascents) else 16 + int(ascents[-1]) + 1

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return float(self._formula_log(float(max(n, self.n0))))

    def _dense_log(self, upto: int) -> np.ndarray:
        idx = np.maximum(np.arange(1, upto + 1, dtype=float), float(self.n0))
        return self._formula_log(idx)


class HeadTailSeq(Seq):
    """Explicit head followed by a constant tail (default 0).

    Hosts finite-rank sequences like <1,0,0,...> and constant probes; a
    nonzero tail is flagged non-null.
    """

    kind = "head"

    def __init__(self, head, tail=0, dense_horizon: int = DEFAULT_DENSE_HORIZON):
        super().__init__("head" + str(list(map(float, head))[:4]), dense_horizon)
        self.head_exact = tuple(Q(h) for h in head)
        self.tail_exact = Q(tail)
        if any(self.head_exact[i] < self.head_exact[i + 1] for i in range(len(head) - 1)):
            raise ConstructionError("head not nonincreasing")
        if self.head_exact and self.tail_exact > self.head_exact[-1]:
            raise ConstructionError("tail exceeds last head value")
        self.head_log = tuple(
            NEG_INF if h == 0 else math.log(float(h)) for h in self.head_exact
        )
        self.tail_log = NEG_INF if tail == 0 else math.log(float(tail))
        self.null_certified = self.tail_exact == 0
        if not self.null_certified:
            self.warnings = ("constant nonzero tail: sequence is not null",)

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return self.head_log[n - 1] if n <= len(self.head_log) else self.tail_log

    def has_closed_prefix(self) -> bool:
        return True

    def fraction_value(self, n: int):
        self._check_index(n)
        return self.head_exact[n - 1] if n <= len(self.head_exact) else self.tail_exact

    def fraction_prefix(self, n: int):
        self._check_index(n)
        L = len(self.head_exact)
        s = sum(self.head_exact[: min(n, L)], Q(0))
        if n > L:
            s += (n - L) * self.tail_exact
        return s

    def log_prefix(self, n: int) -> float:
        self._check_index(n)
        L = len(self.head_log)
        acc = NEG_INF
        for v in self.head_log[: min(n, L)]:
            acc = log_add(acc, v)
        if n > L and self.tail_log > NEG_INF:
            acc = log_add(acc, math.log(n - L) + self.tail_log)
        return acc

    def certify(self, probe_horizon: int | None = None) -> None:  # head is exact
        pass

    def params(self) -> dict:
        return {"head": [str(h) for h in self.head_exact], "tail": str(self.tail_exact)}


class StepView(Seq):
    """Seq facade over a piecewise-constant StepSeq (closed forms at any
    index; the last level extends past the final breakpoint)."""

    kind = "step"

    def __init__(self, step: "_stepseq.StepSeq", label: str = "step",
                 dense_horizon: int = DEFAULT_DENSE_HORIZON):
        super().__init__(label, dense_horizon)
        self.step = step
        # strictly decreasing levels: treated as the finite prefix of an
        # ongoing construction, null in trend though constant past the
        # last breakpoint
        self.warnings = ("step sequence: constant beyond the last breakpoint",)

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return self.step.level_log_at(n)

    def has_closed_prefix(self) -> bool:
        return True

    def log_prefix(self, n: int) -> float:
        self._check_index(n)
        return log_of_index(n) + self.step.am_log_at(n)

    def fraction_value(self, n: int):
        self._check_index(n)
        return self.step.level_exact_at(n)

    def fraction_prefix(self, n: int):
        self._check_index(n)
        return n * self.step.am_exact_at(n)

    def _dense_log(self, upto: int) -> np.ndarray:
        return self.step.dense_level_logs(upto)

    def params(self) -> dict:
        return {"step": self.step.to_json()}


# ----------------------------------------------------------------------------
# Derived kinds
# ----------------------------------------------------------------------------

class MeanSeq(Seq):
    """Arithmetic mean of a base sequence: n -> prefix(n)/n.

    Order-2 means of step sequences stay closed-form at any index; other
    bases are closed only where their own prefix is.
    """

    kind = "mean"

    def __init__(self, base: Seq, dense_horizon: int | None = None):
        super().__init__(f"am({base.label})", dense_horizon or base.dense_horizon)
        self.base = base
        self.null_certified = base.null_certified  # mean of null is null
        self.warnings = base.warnings

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return self.base.log_prefix(n) - log_of_index(n)

    def fraction_value(self, n: int):
        self._check_index(n)
        return self.base.fraction_prefix(n) / n

    def has_closed_prefix(self) -> bool:
        if isinstance(self.base, StepView):
            return True
        if isinstance(self.base, HeadTailSeq):
            return True
        return False

    def has_closed_values(self) -> bool:
        return self.base.has_closed_prefix()

    def log_prefix(self, n: int) -> float:
        self._check_index(n)
        base = self.base
        if isinstance(base, StepView):
            # sum_{j<=n} (z_a)_j = n * (z_{a^2})_n
            return log_of_index(n) + base.step.am2_log_at(n)
        if isinstance(base, HeadTailSeq):
            # prefix of the mean: exact head part + tail harmonic run
            L = len(base.head_log)
            acc = NEG_INF
            for j in range(1, min(n, L) + 1):
                acc = log_add(acc, base.log_prefix(j) - math.log(j))
            if n > L:
                pL = base.fraction_prefix(L) if L else Q(0)
                t = base.tail_exact
                # sum_{j=L+1}^n (P_L + (j-L) t)/j
                eng = default_harmonic()
                hd = eng.harmonic_diff(n, L) if L else eng.harmonic(n)
                const = float(pL - t * L)
                lin = NEG_INF
                if const > 0:
                    lin = math.log(const) + math.log(hd)
                elif const < 0:
                    raise ConstructionError("head/tail prefix inconsistency")
                if t > 0:
                    lin = log_add(lin, math.log(float(t)) + math.log(n - L))
                acc = log_add(acc, lin)
            return acc
        return super().log_prefix(n)

    def _dense_log(self, upto: int) -> np.ndarray:
        return self.base.dense_log_prefix(upto) - np.log(np.arange(1, upto + 1, dtype=float))

    def params(self) -> dict:
        return {"base": self.base.to_json()}


class AmpliationSeq(Seq):
    """D_m: each entry of the base repeated m times."""

    kind = "ampliation"

    def __init__(self, base: Seq, m: int):
        if m < 1:
            raise ValueError("ampliation factor must be >= 1")
        super().__init__(f"D_{m}({base.label})", base.dense_horizon)
        self.base = base
        self.m = int(m)
        self.null_certified = base.null_certified
        self.warnings = base.warnings

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return self.base.log_value((n + self.m - 1) // self.m)

    def fraction_value(self, n: int):
        self._check_index(n)
        return self.base.fraction_value((n + self.m - 1) // self.m)

    def has_closed_prefix(self) -> bool:
        return self.base.has_closed_prefix()

    def has_closed_values(self) -> bool:
        return self.base.has_closed_values()

    def log_prefix(self, n: int) -> float:
        self._check_index(n)
        q, r = divmod(n, self.m)
        # n = m*q + r: full blocks 1..q, then r copies of entry q+1
        acc = NEG_INF
        if q >= 1:
            acc = math.log(self.m) + self.base.log_prefix(q)
        if r:
            acc = log_add(acc, math.log(r) + self.base.log_value(q + 1))
        return acc

    def fraction_prefix(self, n: int):
        self._check_index(n)
        q, r = divmod(n, self.m)
        s = self.m * self.base.fraction_prefix(q) if q >= 1 else Q(0)
        if r:
            s += r * self.base.fraction_value(q + 1)
        return s

    def _dense_log(self, upto: int) -> np.ndarray:
        blocks = (upto + self.m - 1) // self.m
        return np.repeat(self.base.dense_log(blocks), self.m)[:upto]

    def params(self) -> dict:
        return {"base": self.base.to_json(), "m": self.m}


class TabulatedSeq(Seq):
    """Dense table of log values with optional exact values; used by the
    inversion calculus (reconstructions have no closed form)."""

    kind = "tabulated"

    def __init__(self, log_values: np.ndarray, label: str,
                 exact_values: list | None = None, meta: dict | None = None):
        super().__init__(label, dense_horizon=len(log_values))
        self._table = np.asarray(log_values, dtype=float)
        self._exact = exact_values
        self.meta = meta or {}

    def log_value(self, n: int) -> float:
        self._check_index(n)
        if n > len(self._table):
            raise HorizonExceeded(f"{self.label}: tabulated up to {len(self._table)}")
        return float(self._table[n - 1])

    def fraction_value(self, n: int):
        self._check_index(n)
        if self._exact is not None:
            if n > len(self._exact):
                raise HorizonExceeded(f"{self.label}: exact table up to {len(self._exact)}")
            return self._exact[n - 1]
        return super().fraction_value(n)

    def _dense_log(self, upto: int) -> np.ndarray:
        return self._table[:upto]

    def params(self) -> dict:
        out = {"log_values": [float(v) for v in self._table[: min(len(self._table), 64)]]}
        out.update(self.meta)
        return out


# ----------------------------------------------------------------------------
# Ratio and concavity views
# ----------------------------------------------------------------------------

class RatioSeq:
    """r_n = (s_a)_n / s_n in the linear float domain, with an exact view.

    Constructed from a Seq or from an explicit table (for synthetic and
    reconstructed ratio sequences).
    """

    def __init__(self, value_fn, fraction_fn=None, label="r", source: Seq | None = None):
        self._value_fn = value_fn
        self._fraction_fn = fraction_fn
        self.label = label
        self.source = source

    @classmethod
    def from_seq(cls, s: Seq) -> "RatioSeq":
        def value(n: int) -> float:
            return math.exp(s.log_prefix(n) - log_of_index(n) - s.log_value(n))

        def fraction(n: int):
            return s.fraction_prefix(n) / (n * s.fraction_value(n))

        return cls(value, fraction, label=f"r({s.label})", source=s)

    @classmethod
    def from_table(cls, values, label="r-table") -> "RatioSeq":
        exact = [Q(v) for v in values]
        floats = [float(v) for v in values]

        def value(n: int) -> float:
            return floats[n - 1]

        def fraction(n: int):
            return exact[n - 1]

        r = cls(value, fraction, label=label)
        r.table_length = len(values)
        return r

    def value(self, n: int) -> float:
        if n < 1:
            raise ValueError("ratio indices start at 1")
        return self._value_fn(n)

    def fraction(self, n: int):
        if self._fraction_fn is None:
            raise HorizonExceeded(f"{self.label}: no exact view")
        return self._fraction_fn(n)

    def values_upto(self, N: int) -> np.ndarray:
        if self.source is not None:
            s = self.source
            pref = s.dense_log_prefix(N)
            vals = s.dense_log(N)
            return np.exp(pref - np.log(np.arange(1, N + 1, dtype=float)) - vals)
        return np.array([self.value(n) for n in range(1, N + 1)])


class ConcavitySeq:
    """c_n = n s_n / ((n+1) s_{n+1}) in the linear float domain.

    am_image_flag reports whether the mean-image regime
    c_n + 1/c_{n+1} <= 2 held over the probed range.
    """

    def __init__(self, value_fn, fraction_fn=None, label="c", source: Seq | None = None):
        self._value_fn = value_fn
        self._fraction_fn = fraction_fn
        self.label = label
        self.source = source
        self._am_image: bool | None = None
        self.am_image_horizon = 0

    @classmethod
    def from_seq(cls, s: Seq) -> "ConcavitySeq":
        def value(n: int) -> float:
            return math.exp(
                math.log(n) + s.log_value(n) - math.log(n + 1) - s.log_value(n + 1)
            )

        def fraction(n: int):
            return n * s.fraction_value(n) / ((n + 1) * s.fraction_value(n + 1))

        return cls(value, fraction, label=f"c({s.label})", source=s)

    @classmethod
    def from_table(cls, values, label="c-table") -> "ConcavitySeq":
        exact = [Q(v) for v in values]
        floats = [float(v) for v in values]
        c = cls(lambda n: floats[n - 1], lambda n: exact[n - 1], label=label)
        c.table_length = len(values)
        return c

    def value(self, n: int) -> float:
        if n < 1:
            raise ValueError("concavity indices start at 1")
        return self._value_fn(n)

    def fraction(self, n: int):
        if self._fraction_fn is None:
            raise HorizonExceeded(f"{self.label}: no exact view")
        return self._fraction_fn(n)

    def values_upto(self, N: int) -> np.ndarray:
        if self.source is not None:
            s = self.source
            vals = s.dense_log(N + 1)
            idx = np.arange(1, N + 1, dtype=float)
            return np.exp(np.log(idx) + vals[:-1] - np.log(idx + 1.0) - vals[1:])
        return np.array([self.value(n) for n in range(1, N + 1)])

    def am_image_flag(self, horizon: int = 10 ** 4, tol: float = 1e-12) -> bool:
        """c_n + 1/c_{n+1} <= 2 over the horizon (one-sided tolerance)."""
        if self._am_image is None or horizon > self.am_image_horizon:
            cs = self.values_upto(horizon + 1)
            lhs = cs[:-1] + 1.0 / cs[1:]
            self._am_image = bool(np.all(lhs <= 2.0 + tol))
            self.am_image_horizon = horizon
        return self._am_image


# ----------------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------------

def am(s: Seq) -> Seq:
    """Arithmetic mean sequence n -> (1/n) sum_{j<=n} s_j."""
    return MeanSeq(s)


def am_pow(s: Seq, p: int) -> Seq:
    """p-fold arithmetic mean; am_pow(s, 1) = am(s)."""
    if p < 1:
        raise ValueError("am_pow needs p >= 1")
    out = s
    for _ in range(p):
        out = MeanSeq(out)
    return out


def ampliation(s: Seq, m: int) -> Seq:
    """D_m: repeat each entry m times."""
    if m == 1:
        return s
    return AmpliationSeq(s, m)


def _require_positive_to(s: Seq, horizon: int) -> None:
    h = horizon if s.has_closed_prefix() else min(horizon, s.dense_horizon)
    if s.log_value(h) == NEG_INF:
        raise FiniteRankError(
            f"{s.label}: zero entry at or before n={s.first_zero_index(h)}"
        )


def ratio_of_regularity(s: Seq, horizon: int | None = None) -> RatioSeq:
    """r(s) = s_a / s; requires s positive up to the working horizon and
    empirically null."""
    h = horizon or min(s.dense_horizon, DEFAULT_DENSE_HORIZON)
    _require_positive_to(s, h)
    if not s.null_certified:
        raise ConstructionError(
            f"{s.label}: flagged non-null; ratio of regularity undefined outside c_o*"
        )
    return RatioSeq.from_seq(s)


def concavity_ratio(s: Seq, horizon: int | None = None) -> ConcavitySeq:
    """c(s)_n = n s_n / ((n+1) s_{n+1}); requires positivity to horizon."""
    h = horizon or min(s.dense_horizon, DEFAULT_DENSE_HORIZON)
    _require_positive_to(s, h)
    return ConcavitySeq.from_seq(s)


def _sample_upto(x: Seq, y: Seq, c: int, grid: int = 48) -> list[int]:
    """Deterministic sample of indices in [1, c]: dense head, geometric
    grid, and step breakpoints with neighbours."""
    out = set(range(1, min(c, 64) + 1))
    out.update(geometric_indices(1, c, grid))
    for s in (x, y):
        base = s
        while isinstance(base, (MeanSeq, AmpliationSeq)):
            base = base.base
        if isinstance(base, StepView):
            for b in base.step.breakpoints:
                for j in (b, b + 1):
                    if 1 <= j <= c:
                        out.add(j)
    return sorted(out)


def domination_profile(x: Seq, y: Seq, checkpoints) -> list[tuple[int, float]]:
    """sup_{n <= c} x_n / y_n at each checkpoint c, over a deterministic
    sample set (dense where horizons allow).  Evidence only: makes no
    claim beyond the largest checkpoint.
    """
    checkpoints = sorted(int(c) for c in checkpoints)
    out = []
    sup = -math.inf
    prev = 0
    dense_cap = min(x.dense_horizon, y.dense_horizon)
    for c in checkpoints:
        if c <= dense_cap:
            xv = x.dense_log(c)
            yv = y.dense_log(c)
            with np.errstate(invalid="ignore"):
                sup = max(sup, float(np.max(xv[prev:c] - yv[prev:c])))
        else:
            for j in _sample_upto(x, y, c):
                if j <= prev:
                    continue
                sup = max(sup, x.log_value(j) - y.log_value(j))
        prev = c
        out.append((c, math.exp(sup)))
    return out


def dominates_pointwise(x: Seq, y: Seq, horizon: int) -> tuple[bool, int | None]:
    """x_n <= y_n for all sampled n <= horizon; returns (ok, witness)."""
    for j in _sample_upto(x, y, horizon):
        if x.log_value(j) > y.log_value(j) + 1e-12:
            return False, j
    return True, None


# ----------------------------------------------------------------------------
# Serialization
# ----------------------------------------------------------------------------

def seq_to_json(s: Seq) -> dict:
    return s.to_json()

def seq_from_json(obj: dict) -> Seq:
    kind = obj.get("kind")
    params = obj.get("params", {})
    horizon = int(obj.get("horizon", DEFAULT_DENSE_HORIZON))
    if kind == "omega-p":
        return PowerSeq(float(params["p"]), horizon)
    if kind == "log-power":
        return LogPowerSeq(float(params["p"]), float(params.get("q", 0.0)), horizon)
    if kind == "iterlog":
        return IterLogSeq(horizon)
    if kind == "head":
        head = [Q(v) for v in params["head"]]
        tail = Q(params.get("tail", "0"))
        return HeadTailSeq(head, tail, horizon)
    if kind == "step":
        return StepView(_stepseq.StepSeq.from_json(params["step"]), dense_horizon=horizon)
    if kind == "mean":
        return MeanSeq(seq_from_json(params["base"]), horizon)
    if kind == "ampliation":
        return AmpliationSeq(seq_from_json(params["base"]), int(params["m"]))
    raise ValueError(f"unknown sequence kind {kind!r}")
