"""Inversion calculus on ratio/concavity sequences, mean inversion,
exponential-doubling profiles, Potter exponents, and the hat transform.

The correspondences implemented here:

  * r -> xi with xi_1 = 1, xi_n = (1/(n r_n)) prod_{j=2}^n (1 + 1/(j r_j - 1)),
    valid iff r_1 = 1 and (n+1) r_{n+1} >= n r_n + 1 (the product is
    accumulated in the log domain via the equivalent recurrence
    ((n+1) r_{n+1} - 1) xi_{n+1} = n r_n xi_n);
  * c -> xi with xi_n = 1/(n prod_{j<n} c_j), valid iff c_n >= 1 - 1/(n+1);
  * r <-> c via c_n = (r_{n+1} - 1/(n+1))/r_n and
    r_n = 1/n + sum_{k<n} (1/k) prod_{j=k}^{n-1} c_j;
  * mean inversion via the finite-difference identity
    eta_n = n x_n - (n-1) x_{n-1}, whose prefix sums are exactly n x_n.

Nullity of a reconstructed sequence is a limit property; the verdicts
below report divergence *evidence* (gates plus increment trends), never a
boolean limit claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    MAX_LOG10_INDEX,
    NEG_INF,
    AmseqError,
    ConstructionError,
    HorizonExceeded,
    Q,
    SummableError,
    log_of_index,
    log_sub,
)
from .seqcore import (
    ConcavitySeq,
    MeanSeq,
    RatioSeq,
    Seq,
    TabulatedSeq,
    geometric_indices,
)

__all__ = [
    "NotRatioSequence",
    "NotConcavitySequence",
    "NotAmImage",
    "AdmissibilityVerdict",
    "Delta2Profile",
    "RegularityProfile",
    "HatSeq",
    "mean_view",
    "seq_from_ratio",
    "check_ratio_admissibility",
    "seq_from_concavity",
    "ratio_to_concavity",
    "concavity_to_ratio",
    "invert_am",
    "invert_am_product_formula",
    "exp_delta2_profile",
    "regularity_profile",
    "nu",
    "hat",
]

SUP_R_GATE = 1e3
SERIES_GATE = 1e2


class NotRatioSequence(AmseqError, ValueError):
    pass


class NotConcavitySequence(AmseqError, ValueError):
    pass


class NotAmImage(AmseqError, ValueError):
    pass


def mean_view(s: Seq) -> MeanSeq:
    """Memoized am(s) view (idempotent fill; safe as a pure cache)."""
    view = getattr(s, "_mean_view", None)
    if view is None:
        view = MeanSeq(s)
        s._mean_view = view
    return view


# ----------------------------------------------------------------------------
# Admissibility of ratio sequences
# ----------------------------------------------------------------------------

@dataclass
class AdmissibilityVerdict:
    recurrence_ok: bool
    first_violation: int | None
    divergence_evidence: str  # sup-r-unbounded | series-divergent | inconclusive
    horizon: int
    sup_r: float
    series_value: float

    def to_json(self) -> dict:
        return {
            "recurrence_ok": self.recurrence_ok,
            "first_violation": self.first_violation,
            "divergence_evidence": self.divergence_evidence,
            "horizon": str(self.horizon),
            "sup_r": self.sup_r,
            "series_value": self.series_value,
        }


def _recurrence_scan(r: RatioSeq, horizon: int, exact: bool) -> int | None:
    """First n with (n+1) r_{n+1} < n r_n + 1, or None."""
    if exact:
        prev = r.fraction(1)
        if prev != 1:
            return 0
        for n in range(1, horizon):
            cur = r.fraction(n + 1)
            if (n + 1) * cur < n * prev + 1:
                return n
            prev = cur
        return None
    vals = np.array([r.value(n) for n in range(1, horizon + 1)])
    if abs(vals[0] - 1.0) > 1e-12:
        return 0
    ns = np.arange(1, horizon, dtype=float)
    bad = np.nonzero((ns + 1) * vals[1:] < ns * vals[:-1] + 1.0 - 1e-11 * ns)[0]
    return int(bad[0]) + 1 if len(bad) else None


def check_ratio_admissibility(r: RatioSeq, horizon: int = 10 ** 4,
                              exact: bool = False) -> AdmissibilityVerdict:
    """Recurrence checked exactly (rational view when available); the
    divergence side of admissibility is gated evidence:

      * sup r exceeds the gate, or grows monotonically across three
        geometric checkpoints -> "sup-r-unbounded";
      * sum (1/j)(1 - 1/r_j) exceeds its gate, or its per-decade
        increments do not collapse -> "series-divergent";
      * otherwise "inconclusive" (never "false": the condition is a limit).
    """
    violation = _recurrence_scan(r, horizon, exact)
    vals = np.array([r.value(n) for n in range(1, horizon + 1)])
    c1, c2, c3 = max(2, horizon // 100), max(3, horizon // 10), horizon
    sups = [float(np.max(vals[:c])) for c in (c1, c2, c3)]
    sup_r = sups[-1]
    terms = (1.0 - 1.0 / vals[1:]) / np.arange(2, horizon + 1, dtype=float)
    series = np.cumsum(terms)
    s1, s2, s3 = (float(series[c - 2]) for c in (c1, c2, c3))
    evidence = "inconclusive"
    inc2, inc3 = s2 - s1, s3 - s2
    if sup_r > SUP_R_GATE or (sups[0] * 1.05 < sups[1] and sups[1] * 1.05 < sups[2]):
        evidence = "sup-r-unbounded"
    elif s3 > SERIES_GATE or (inc3 > 1e-3 and inc3 > 0.4 * inc2):
        evidence = "series-divergent"
    return AdmissibilityVerdict(
        recurrence_ok=violation is None,
        first_violation=violation,
        divergence_evidence=evidence,
        horizon=horizon,
        sup_r=sup_r,
        series_value=s3,
    )


# ----------------------------------------------------------------------------
# Reconstructions
# ----------------------------------------------------------------------------

def seq_from_ratio(r: RatioSeq, horizon: int = 10 ** 4, exact: bool = False) -> Seq:
    """The unique xi with xi_1 = 1 and ratio of regularity r.

    Raises NotRatioSequence at the first recurrence violation; an
    inconclusive divergence verdict is recorded as a warning (the result
    may fail to be null).
    """
    violation = _recurrence_scan(r, horizon, exact)
    if violation is not None:
        raise NotRatioSequence(f"not a ratio sequence at n={violation}")
    logs = np.empty(horizon)
    logs[0] = 0.0
    exacts = None
    if exact:
        exacts = [Q(1)]
        t = Q(1)  # n r_n xi_n
        for n in range(1, horizon):
            rn1 = r.fraction(n + 1)
            xi = t / ((n + 1) * rn1 - 1)
            exacts.append(xi)
            t = (n + 1) * rn1 * xi
            logs[n] = math.log(float(xi)) if xi > 0 else NEG_INF
    else:
        acc = 0.0  # log of n r_n xi_n
        rn = r.value(1)
        for n in range(1, horizon):
            rn1 = r.value(n + 1)
            lx = acc - math.log((n + 1) * rn1 - 1.0)
            logs[n] = lx
            acc = lx + math.log((n + 1) * rn1)
    out = TabulatedSeq(logs, label="from-ratio", exact_values=exacts,
                       meta={"source": "from-ratio"})
    verdict = check_ratio_admissibility(r, min(horizon, 10 ** 4), exact=False)
    out.certify()
    if verdict.divergence_evidence == "inconclusive" and not out.null_certified:
        out.warnings = out.warnings + ("divergence inconclusive: may not be null",)
    return out


def seq_from_concavity(c: ConcavitySeq, horizon: int = 10 ** 4, exact: bool = False) -> Seq:
    """The unique xi with xi_1 = 1 and concavity ratio c; requires
    c_n >= 1 - 1/(n+1) up to the horizon."""
    logs = np.empty(horizon)
    logs[0] = 0.0
    exacts = None
    if exact:
        exacts = [Q(1)]
        xi = Q(1)
        for n in range(1, horizon):
            cn = c.fraction(n)
            if cn < 1 - Q(1, n + 1):
                raise NotConcavitySequence(f"not a concavity sequence at n={n}")
            xi = xi * n / ((n + 1) * cn)
            exacts.append(xi)
            logs[n] = math.log(float(xi))
    else:
        acc = 0.0
        for n in range(1, horizon):
            cn = c.value(n)
            if cn < 1.0 - 1.0 / (n + 1) - 1e-12:
                raise NotConcavitySequence(f"not a concavity sequence at n={n}")
            acc += math.log(n / (n + 1.0)) - math.log(cn)
            logs[n] = acc
    out = TabulatedSeq(logs, label="from-concavity", exact_values=exacts,
                       meta={"source": "from-concavity"})
    out.certify()
    return out


def ratio_to_concavity(r: RatioSeq, horizon: int = 10 ** 4, exact: bool = False) -> ConcavitySeq:
    """c_n = (r_{n+1} - 1/(n+1)) / r_n."""
    if exact:
        vals = [(r.fraction(n + 1) - Q(1, n + 1)) / r.fraction(n) for n in range(1, horizon + 1)]
        return ConcavitySeq.from_table(vals, label=f"c<-{r.label}")
    vals = [(r.value(n + 1) - 1.0 / (n + 1)) / r.value(n) for n in range(1, horizon + 1)]
    c = ConcavitySeq(lambda n: vals[n - 1], None, label=f"c<-{r.label}")
    c.table_length = horizon
    return c


def concavity_to_ratio(c: ConcavitySeq, horizon: int = 10 ** 4, exact: bool = False) -> RatioSeq:
    """r_1 = 1, r_n = 1/n + sum_{k=1}^{n-1} (1/k) prod_{j=k}^{n-1} c_j,
    accumulated via T_{n+1} = c_n (T_n + 1/n)."""
    if exact:
        vals = [Q(1)]
        T = Q(0)
        for n in range(1, horizon):
            T = c.fraction(n) * (T + Q(1, n))
            vals.append(Q(1, n + 1) + T)
        return RatioSeq.from_table(vals, label=f"r<-{c.label}")
    vals = [1.0]
    T = 0.0
    for n in range(1, horizon):
        T = c.value(n) * (T + 1.0 / n)
        vals.append(1.0 / (n + 1) + T)
    r = RatioSeq(lambda n: vals[n - 1], None, label=f"r<-{c.label}")
    r.table_length = horizon
    return r


# ----------------------------------------------------------------------------
# Mean inversion
# ----------------------------------------------------------------------------

class InvertedMeanSeq(Seq):
    """eta with am(eta) = x, via eta_n = n x_n - (n-1) x_{n-1}.

    Prefix sums are exactly n x_n, so the mean of this sequence
    reproduces x by construction; the pointwise values are the
    finite differences.
    """

    kind = "invert-am"

    def __init__(self, x: Seq):
        super().__init__(f"invert-am({x.label})", x.dense_horizon)
        self.x = x
        self.null_certified = x.null_certified
        self.warnings = x.warnings

    def log_value(self, n: int) -> float:
        self._check_index(n)
        if n == 1:
            return self.x.log_value(1)
        a = log_of_index(n) + self.x.log_value(n)
        b = log_of_index(n - 1) + self.x.log_value(n - 1)
        if a <= b:  # flat mean: difference is exactly a zero entry or noise
            return NEG_INF if a == b else a
        return log_sub(a, b)

    def fraction_value(self, n: int):
        self._check_index(n)
        if n == 1:
            return self.x.fraction_value(1)
        return n * self.x.fraction_value(n) - (n - 1) * self.x.fraction_value(n - 1)

    def has_closed_prefix(self) -> bool:
        return True

    def log_prefix(self, n: int) -> float:
        self._check_index(n)
        return log_of_index(n) + self.x.log_value(n)

    def fraction_prefix(self, n: int):
        self._check_index(n)
        return n * self.x.fraction_value(n)

    def params(self) -> dict:
        return {"base": self.x.to_json()}


def _check_am_image(x: Seq, horizon: int, exact: bool) -> None:
    """x/omega nondecreasing and concave: 2n x_n >= (n+1) x_{n+1} + (n-1) x_{n-1}."""
    if exact:
        for n in range(2, horizon):
            xm, xn, xp = (x.fraction_value(n - 1), x.fraction_value(n),
                          x.fraction_value(n + 1))
            if n * xn < (n - 1) * xm or 2 * n * xn < (n + 1) * xp + (n - 1) * xm:
                raise NotAmImage(f"not an am-image at n={n}")
        return
    N = min(horizon + 1, x.dense_horizon)
    vals = np.exp(x.dense_log(N) - x.dense_log(N)[0])  # normalized, safe scale
    ns = np.arange(1, N + 1, dtype=float)
    g = ns * vals
    if np.any(np.diff(g) < -1e-11 * g[1:]):
        n = int(np.nonzero(np.diff(g) < -1e-11 * g[1:])[0][0]) + 1
        raise NotAmImage(f"not an am-image at n={n} (x/omega decreasing)")
    mid = 2.0 * ns[1:-1] * vals[1:-1]
    side = (ns[1:-1] + 1.0) * vals[2:] + (ns[1:-1] - 1.0) * vals[:-2]
    bad = np.nonzero(mid < side - 1e-11 * side)[0]
    if len(bad):
        raise NotAmImage(f"not an am-image at n={int(bad[0]) + 2} (concavity)")


def invert_am(x: Seq, horizon: int = 10 ** 4, exact: bool = False) -> Seq:
    """eta with am(eta) = x; precondition: x is a mean image."""
    _check_am_image(x, horizon, exact)
    return InvertedMeanSeq(x)


def invert_am_product_formula(x: Seq, upto: int):
    """Cross-check values: eta_n = (1 - c(x)_{n-1}) / prod_{j<n} c(x)_j for
    normalized x (x_1 = 1), n >= 2.  Exact rationals; independent of the
    finite-difference path."""
    if x.fraction_value(1) != 1:
        raise ValueError("product-formula cross-check needs x_1 = 1")
    out = [x.fraction_value(1)]
    prod = Q(1)
    for n in range(2, upto + 1):
        c_prev = (n - 1) * x.fraction_value(n - 1) / (n * x.fraction_value(n))
        prod *= c_prev  # prod = prod_{j<=n-1} c_j
        out.append((1 - c_prev) / prod)
    return out


# ----------------------------------------------------------------------------
# Exponential-doubling (m -> m^2) profile and regularity profile
# ----------------------------------------------------------------------------

@dataclass
class Delta2Profile:
    sup_value: float
    argmax: int
    samples: list = field(default_factory=list)  # (m, value) trend samples

    def to_json(self) -> dict:
        return {
            "sup_value": self.sup_value,
            "argmax": str(self.argmax),
            "samples": [[str(m), v] for m, v in self.samples],
        }


def exp_delta2_profile(s: Seq, M: int) -> Delta2Profile:
    """sup_{m <= M} m^2 (s_a)_{m^2} / (m (s_a)_m), with argmax and a
    geometric trend sample.  Finite-horizon evidence only."""
    if M < 2:
        raise ValueError("need M >= 2")
    mean = mean_view(s)
    if not mean.has_closed_prefix() and M * M > mean.dense_horizon:
        raise HorizonExceeded(
            f"profile needs means at M^2={M * M} beyond horizon {mean.dense_horizon}"
        )
    def ratio(m: int) -> float:
        return math.exp(
            math.log(m) + mean.log_value(m * m) - mean.log_value(m)
        )

    sup, arg = -math.inf, 1
    samples = []
    grid = sorted(set(range(2, min(M, 64) + 1)) | set(geometric_indices(2, M, 48)))
    for m in grid:
        v = ratio(m)
        if v > sup:
            sup, arg = v, m
    for m in geometric_indices(2, M, 7):
        samples.append((m, ratio(m)))
    return Delta2Profile(sup_value=sup, argmax=arg, samples=samples)


@dataclass
class RegularityProfile:
    sup_r: float
    potter_p: float | None
    horizon: int
    sup_samples: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "sup_r": self.sup_r,
            "potter_p": self.potter_p,
            "horizon": str(self.horizon),
            "sup_samples": [[str(m), v] for m, v in self.sup_samples],
        }


def regularity_profile(s: Seq, horizon: int = 10 ** 5) -> RegularityProfile:
    """sup of r(s) up to the horizon plus the smallest Potter exponent on
    a 0.01 grid: p with s_n >= (m/n)^p s_m over sampled m <= n.

    The pair condition is equivalent to log s_n + p log n nondecreasing,
    so it is checked along a geometric sample (transitively covering all
    sampled pairs).
    """
    N = min(horizon, s.dense_horizon)
    vals = s.dense_log(N)
    pref = s.dense_log_prefix(N)
    ns = np.arange(1, N + 1, dtype=float)
    r = pref - np.log(ns) - vals
    sup_r = float(np.exp(np.max(r)))
    sup_samples = [(c, float(np.exp(np.max(r[:c])))) for c in geometric_indices(8, N, 5)]

    idx = np.array(geometric_indices(1, N, 160)) - 1
    logs_n = np.log(ns[idx])
    logs_v = vals[idx]
    potter_p = None
    for p in np.arange(0.01, 1.0, 0.01):
        g = logs_v + p * logs_n
        if np.all(np.diff(g) >= -1e-9):
            potter_p = round(float(p), 2)
            break
    return RegularityProfile(sup_r=sup_r, potter_p=potter_p, horizon=N,
                             sup_samples=sup_samples)


# ----------------------------------------------------------------------------
# nu and the hat transform
# ----------------------------------------------------------------------------

def nu(s: Seq, n: int) -> int:
    """Minimal k with sum_{i<=k} s_i >= n s_1 (exponential then binary
    search on the monotone prefix sums)."""
    if n < 1:
        raise ValueError("nu: n >= 1 required")
    target = math.log(n) + s.log_value(1)
    if s.log_prefix(1) >= target:
        return 1
    k, prev_prefix = 1, s.log_prefix(1)
    while True:
        k2 = 2 * k
        if math.log10(max(k2, 2)) > MAX_LOG10_INDEX:
            raise SummableError("summable or horizon exceeded")
        try:
            p2 = s.log_prefix(k2)
        except HorizonExceeded as exc:
            raise SummableError("summable or horizon exceeded") from exc
        if p2 >= target:
            lo, hi = k, k2
            break
        if p2 - prev_prefix < 1e-15:  # prefix plateau at float resolution
            raise SummableError("summable or horizon exceeded")
        k, prev_prefix = k2, p2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if s.log_prefix(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi


class HatSeq(Seq):
    """hat(s): n -> (s_a)_{nu(s)_n}, for s not summable.

    nu is nondecreasing, the mean is nonincreasing, so the hat sequence is
    nonincreasing.  Summability (prefix plateau) raises at construction.
    """

    kind = "hat"

    def __init__(self, base: Seq, dense_horizon: int = 10 ** 4):
        super().__init__(f"hat({base.label})", dense_horizon)
        self.base = base
        self._mean = mean_view(base)
        self._nu_cache: dict[int, int] = {}
        self.nu_value(2)  # summable inputs fail fast here

    def nu_value(self, n: int) -> int:
        v = self._nu_cache.get(n)
        if v is None:
            v = nu(self.base, n)
            self._nu_cache[n] = v
        return v

    def log_value(self, n: int) -> float:
        self._check_index(n)
        return self._mean.log_value(self.nu_value(n))

    def params(self) -> dict:
        return {"base": self.base.to_json()}


def hat(s: Seq) -> HatSeq:
    """The hat transform; raises SummableError on summable input."""
    if not s.null_certified:
        raise ConstructionError(f"{s.label}: flagged non-null; hat undefined")
    return HatSeq(s)
