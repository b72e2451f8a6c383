"""Named finite-horizon checks over the mean calculus, producing
CheckReports, plus the suite runner.

Conventions
-----------
* Inequalities are checked with a one-sided tolerance: the normalized
  slack (log-domain, so approximately relative) may be tiny-negative only
  within the tolerance; worst_margin is the minimum slack over samples.
* Exact (rational) mode reports any miss as a failure outright, with no
  tolerance masking.
* Limit statements (boundedness, divergence) are classified from three
  geometric checkpoints and may come back "inconclusive"; no finite run
  decides a limit, so the harness never converts trend evidence into a
  boolean beyond that vocabulary.
* Hypothesis failures produce status "skipped", which does not fail a
  suite.

Every check is deterministic given (subject, horizon, numeric mode, seed).
Checks are independent of each other; the suite runs them sequentially
and orders reports by check id.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    NEG_INF,
    DegenerateCancellation,
    HorizonExceeded,
    Q,
    SummableError,
    default_harmonic,
    log_of_index,
    log_ratio,
    floor_int_times_float,
    sum_inverse_range,
)
from .seqcore import (
    HeadTailSeq,
    IterLogSeq,
    LogPowerSeq,
    MeanSeq,
    PowerSeq,
    RatioSeq,
    Seq,
    StepView,
    am_pow,
    ampliation,
    domination_profile,
    geometric_indices,
    ratio_of_regularity,
)
from .regularity import exp_delta2_profile, hat, mean_view
from .counterexamples import (
    Example6Params,
    OmegaHalfParams,
    build_example6,
    build_omega_half,
)

__all__ = [
    "DEFAULT_TOLERANCE",
    "CheckReport",
    "classify_trend",
    "classify_band",
    "check_ratio_identity",
    "check_ratio_bound",
    "check_H_bound",
    "check_sandwich",
    "check_log_jump",
    "check_upward_variation",
    "check_monotone_lemma",
    "check_harmonic_bounds",
    "check_delta2_coherence",
    "check_higher_order_delta2",
    "check_delta_half",
    "check_example6",
    "check_omega_half",
    "check_cancellation_witness",
    "check_hat_power",
    "builtin_subject",
    "SUITES",
    "run_suite",
    "reports_to_json",
    "reports_to_csv",
]

DEFAULT_TOLERANCE = 1e-9

# trend thresholds calibrated on the built-in families: bounded subjects
# grow <= 1.05 per geometric checkpoint and <= 1.08 overall, unbounded
# ones keep strictly increasing and at least 1.5x overall (linearly
# growing witnesses have step ratios tending to 1, so the total matters)
TREND_STEP = 1.04
TREND_TOTAL = 1.5
FLAT_STEP = 1.10
FLAT_TOTAL = 1.25
BAND_FLAT = 1.25
BAND_DROP = 1.40


# ----------------------------------------------------------------------------
# Reports
# ----------------------------------------------------------------------------

@dataclass
class CheckReport:
    check_id: str
    subject: str
    status: str               # pass | fail | inconclusive | skipped
    worst_margin: float
    witness: str | None
    sample_count: int
    horizon: str
    numeric_mode: str
    note: str = ""
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "check_id": self.check_id,
            "subject": self.subject,
            "status": self.status,
            "worst_margin": self.worst_margin,
            "witness": self.witness,
            "sample_count": self.sample_count,
            "horizon": self.horizon,
            "numeric_mode": self.numeric_mode,
            "note": self.note,
            "extras": self.extras,
        }


class _Margin:
    """Track the minimum slack and its witness."""

    def __init__(self):
        self.worst = math.inf
        self.witness = None
        self.count = 0

    def add(self, slack: float, witness) -> None:
        self.count += 1
        if slack < self.worst:
            self.worst = slack
            self.witness = witness

    def finish(self, check_id, subject, horizon, mode, tol,
               note="", extras=None, exact_fail=False) -> CheckReport:
        if self.count == 0:
            status, worst = "skipped", 0.0
        else:
            worst = self.worst
            status = "fail" if (worst < -tol or exact_fail) else "pass"
        return CheckReport(
            check_id=check_id, subject=subject, status=status,
            worst_margin=0.0 if worst is math.inf else float(worst),
            witness=None if self.witness is None else str(self.witness),
            sample_count=self.count, horizon=str(horizon), numeric_mode=mode,
            note=note, extras=extras or {},
        )


def classify_trend(values) -> str:
    """bounded / unbounded / inconclusive from >= 3 checkpoint values."""
    vals = [float(v) for v in values]
    if len(vals) < 3 or any(v <= 0 for v in vals):
        return "inconclusive"
    growth = [b / a for a, b in zip(vals, vals[1:])]
    total = vals[-1] / vals[0]
    if all(g >= TREND_STEP for g in growth) and total >= TREND_TOTAL:
        return "unbounded"
    if all(g <= FLAT_STEP for g in growth) and total <= FLAT_TOTAL:
        return "bounded"
    return "inconclusive"


def classify_band(values) -> str:
    """in-band / vanishing / inconclusive for a ratio-to-log trace."""
    vals = [float(v) for v in values]
    hi, lo = max(vals), min(vals)
    if lo <= 0:
        return "vanishing"
    if hi / lo <= BAND_FLAT:
        return "in-band"
    decreasing = all(b <= a * 1.001 for a, b in zip(vals, vals[1:]))
    if decreasing and hi / lo >= BAND_DROP:
        return "vanishing"
    return "inconclusive"


def _pair_sample(rng, horizon: int, count: int,
                 max_gap: int | None = None) -> list[tuple[int, int]]:
    """Deterministic log-uniform (m, n) pairs with n >= m; an optional gap
    cap keeps factor-by-factor exact products affordable."""
    out = set()
    while len(out) < count:
        a = int(math.exp(rng.uniform(0.0, math.log(horizon))))
        b = int(math.exp(rng.uniform(0.0, math.log(horizon))))
        m, n = max(1, min(a, b)), max(1, a, b)
        if max_gap is not None and n - m > max_gap:
            n = m + int(rng.integers(0, max_gap + 1))
        out.add((m, n))
    return sorted(out)


# ----------------------------------------------------------------------------
# Ratio identity and ratio upper bound
# ----------------------------------------------------------------------------

def check_ratio_identity(s: Seq, pairs, exact: bool = False,
                         tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """(s_a)_n = (m/n) prod_{j=m+1}^n (1 + 1/(j r_j - 1)) (s_a)_m, the
    factors taken from the standalone ratio values (the telescoping is
    what the identity asserts, so it is not pre-collapsed here)."""
    r = ratio_of_regularity(s)
    mean = mean_view(s)
    mg = _Margin()
    exact_fail = False
    if exact:
        for m, n in pairs:
            prod = Q(1)
            for j in range(m + 1, n + 1):
                prod *= 1 + 1 / (j * r.fraction(j) - 1)
            lhs = mean.fraction_value(n)
            rhs = Q(m, n) * prod * mean.fraction_value(m)
            ok = lhs == rhs
            exact_fail |= not ok
            mg.add(0.0 if ok else -abs(math.log(float(lhs / rhs))), (m, n))
    else:
        N = max(n for _, n in pairs)
        rv = r.values_upto(N)
        with np.errstate(divide="ignore"):
            terms = np.log1p(1.0 / (np.arange(1, N + 1) * rv - 1.0))
        terms[0] = 0.0  # j starts at 2 in the product
        csum = np.concatenate([[0.0], np.cumsum(terms)])
        for m, n in pairs:
            lhs = mean.log_value(n)
            rhs = (math.log(m) - math.log(n)) + (csum[n] - csum[m]) + mean.log_value(m)
            mg.add(-abs(lhs - rhs), (m, n))
    return mg.finish("ratio-identity", s.label, max(n for _, n in pairs),
                     "rational" if exact else "log", tol, exact_fail=exact_fail)


def check_ratio_bound(s: Seq, phi, m_list, tol: float = DEFAULT_TOLERANCE,
                      n_per_m: int = 8) -> CheckReport:
    """(s_a)_n <= (m/n)^(1 - 2/phi_m) (s_a)_m for nondecreasing positive
    phi <= r(s), m with m phi_m > 2, and n >= m."""
    r = ratio_of_regularity(s)
    mean = mean_view(s)
    horizon = max(m_list) * 4
    # hypothesis: phi positive nondecreasing, phi <= r at the samples
    prev = 0.0
    for m in sorted(set(m_list) | {horizon}):
        pm = phi(m)
        if pm <= 0 or pm < prev - 1e-12 or pm > r.value(m) * (1 + 1e-9):
            return CheckReport(
                check_id="ratio-bound", subject=s.label, status="skipped",
                worst_margin=0.0, witness=str(m), sample_count=0,
                horizon=str(horizon), numeric_mode="log",
                note=f"hypothesis failed at m={m}: phi must be nondecreasing, positive, <= r",
            )
        prev = pm
    mg = _Margin()
    for m in m_list:
        pm = phi(m)
        if m * pm <= 2.0:
            continue
        for n in geometric_indices(m, horizon, n_per_m):
            lhs = mean.log_value(n)
            rhs = (1.0 - 2.0 / pm) * (math.log(m) - math.log(n)) + mean.log_value(m)
            mg.add(rhs - lhs, (m, n))
    return mg.finish("ratio-bound", s.label, horizon, "log", tol,
                     note="" if mg.count else "no m with m*phi_m > 2")


# ----------------------------------------------------------------------------
# Harmonic-bound lemma for mean ratios
# ----------------------------------------------------------------------------

def _exact_mean_chains(e: Seq, N: int):
    """Exact prefix sums of e, of am(e), and exact harmonic numbers up to
    N (memoized on the sequence)."""
    cache = getattr(e, "_exact_chain_cache", None)
    if cache is not None and cache[3] >= N:
        return cache[0][:N], cache[1][:N], cache[2][:N], N
    p1, p2, hs = [], [], []
    s1 = s2 = h = Q(0)
    for n in range(1, N + 1):
        s1 += e.fraction_value(n)
        s2 += s1 / n
        h += Q(1, n)
        p1.append(s1)
        p2.append(s2)
        hs.append(h)
    e._exact_chain_cache = (p1, p2, hs, N)
    return p1, p2, hs, N


def _dense_mean_ratio(e: Seq, N: int) -> np.ndarray:
    """r(am(e))_n for n = 1..N, vectorized."""
    m1 = mean_view(e)
    m2 = mean_view(m1)
    return np.exp(m2.dense_log(N) - m1.dense_log(N))


def check_H_bound(e: Seq, horizon: int, exact: bool = False,
                  tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Three sub-checks on r(am(e)) against harmonic numbers:
    (a) r(am(e))_n < H_n for 1 < n <= horizon (needs e_2 > 0);
    (b) H_n - r(am(e))_n strictly increasing (needs e positive);
    (c) the identity H_n - r(am(e))_n = sum_{i=2}^n e_i H_{i-1} / sum_{i<=n} e_i.
    """
    if e.log_value(2) == NEG_INF:
        return CheckReport(
            check_id="H-bound", subject=e.label, status="skipped",
            worst_margin=0.0, witness="2", sample_count=0,
            horizon=str(horizon), numeric_mode="rational" if exact else "log",
            note="hypothesis e_2 > 0 fails; lemma inapplicable",
        )
    mg = _Margin()
    exact_fail = False
    if exact:
        p1, p2, hs, _ = _exact_mean_chains(e, horizon)
        wsum = Q(0)  # sum_{i=2}^n e_i H_{i-1}
        positive = True
        prev_gap = Q(0)
        for n in range(2, horizon + 1):
            wsum += e.fraction_value(n) * hs[n - 2]
            gap = hs[n - 1] - p2[n - 1] / p1[n - 1]  # H_n - (e_a2)_n/(e_a)_n
            ok_a = gap > 0
            ok_c = gap == wsum / p1[n - 1]
            positive = positive and e.fraction_value(n) > 0
            ok_b = (not positive) or gap > prev_gap
            exact_fail |= not (ok_a and ok_b and ok_c)
            mg.add(0.0 if (ok_a and ok_b and ok_c) else -abs(float(gap)), n)
            prev_gap = gap
    else:
        r = _dense_mean_ratio(e, horizon)
        H = default_harmonic()._H[:horizon]
        gap = H[1:] - r[1:]
        # (a): strict positivity of the gap, normalized by H
        idx = int(np.argmin(gap / H[1:]))
        mg.add(float(gap[idx] / H[idx + 1]), idx + 2)
        # (b): gap strictly increasing, slack normalized by the 1/(n+1) scale
        diffs = np.diff(gap) * np.arange(3, horizon + 1)
        idx = int(np.argmin(diffs))
        mg.add(float(diffs[idx]), idx + 2)
        # (c): identity, relative
        vals = np.exp(e.dense_log(horizon))
        w = np.cumsum(np.concatenate([[0.0], vals[1:] * H[:-1]]))
        p1 = np.cumsum(vals)
        rhs = w[1:] / p1[1:]
        rel = np.abs(gap - rhs) / np.maximum(rhs, 1e-300)
        idx = int(np.argmax(rel))
        mg.add(-float(rel[idx]), idx + 2)
    return mg.finish("H-bound", e.label, horizon,
                     "rational" if exact else "log", tol, exact_fail=exact_fail)


# ----------------------------------------------------------------------------
# Sandwich inequalities (prefix form: addition only, no cancellation)
# ----------------------------------------------------------------------------

def check_sandwich(e: Seq, pairs, exact: bool = False,
                   tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Both interpolation chains, multiplied through by n into prefix form:

      P_m + (n-m) e_n  <=  P_n  <=  P_m + (n-m) e_m
      m Q_m + (H_n - H_m) m (e_a)_m  <=  n Q_n  <=  m Q_m + (H_n - H_m) n (e_a)_n

    with P_k = k (e_a)_k and Q_k = (e_{a^2})_k."""
    mg = _Margin()
    exact_fail = False
    eng = default_harmonic()
    m1 = mean_view(e)
    m2 = mean_view(m1)
    for m, n in pairs:
        if exact:
            Pm, Pn = e.fraction_prefix(m), e.fraction_prefix(n)
            Qm = m2.fraction_value(m)
            Qn = m2.fraction_value(n)
            hd = sum_inverse_range(m + 1, n)
            checks = [
                (Pm + (n - m) * e.fraction_value(n) <= Pn, "lower-1"),
                (Pn <= Pm + (n - m) * e.fraction_value(m), "upper-1"),
                (m * Qm + hd * Pm <= n * Qn, "lower-2"),
                (n * Qn <= m * Qm + hd * n * m1.fraction_value(n), "upper-2"),
            ]
            for ok, tag in checks:
                exact_fail |= not ok
                mg.add(0.0 if ok else -1.0, (m, n, tag))
        else:
            lPm, lPn = e.log_prefix(m), e.log_prefix(n)
            lQm = math.log(m) + m2.log_value(m)
            lQn = math.log(n) + m2.log_value(n)
            len_, lem = e.log_value(n), e.log_value(m)
            gap = math.log(n - m) if n > m else NEG_INF
            hd = eng.harmonic_diff(n, m)
            lh = math.log(hd) if hd > 0 else NEG_INF
            lo1 = np.logaddexp(lPm, gap + len_) if n > m else lPm
            hi1 = np.logaddexp(lPm, gap + lem) if n > m else lPm
            lo2 = np.logaddexp(lQm, lh + lPm) if hd > 0 else lQm
            hi2 = np.logaddexp(lQm, lh + math.log(n) + m1.log_value(n)) if hd > 0 else lQm
            mg.add(float(lPn - lo1), (m, n, "lower-1"))
            mg.add(float(hi1 - lPn), (m, n, "upper-1"))
            mg.add(float(lQn - lo2), (m, n, "lower-2"))
            mg.add(float(hi2 - lQn), (m, n, "upper-2"))
    return mg.finish("sandwich", e.label, max(n for _, n in pairs),
                     "rational" if exact else "log", tol, exact_fail=exact_fail)


def check_log_jump(e: Seq, m_list, tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """At n = floor(m r(e)_m): r(am(e))_n > (1/2) log r(e)_m."""
    mg = _Margin()
    m1 = mean_view(e)
    m2 = mean_view(m1)
    skipped = []
    for m in m_list:
        lr = e.log_prefix(m) - log_of_index(m) - e.log_value(m)
        r_m = math.exp(lr)
        n = floor_int_times_float(m, r_m)
        try:
            lhs = math.exp(m2.log_value(n) - m1.log_value(n))
        except HorizonExceeded:
            skipped.append(m)
            continue
        rhs = 0.5 * lr
        mg.add((lhs - rhs) / max(rhs, 1.0), (m, n))
    note = f"skipped m beyond horizon: {skipped}" if skipped else ""
    return mg.finish("log-jump", e.label, max(m_list), "log", tol, note=note)


def check_upward_variation(e: Seq, horizon: int, exact: bool = False,
                           tol: float = DEFAULT_TOLERANCE,
                           sample_indices=None) -> CheckReport:
    """r(am(e))_{n+1} <= r(am(e))_n + 1/(n+1), and the weaker strict
    bound r(am(e))_{n+1} < (1 + 1/n) r(am(e))_n, for all n < horizon
    (or at explicit samples for step-backed subjects)."""
    mg = _Margin()
    exact_fail = False
    if exact:
        p1, p2, _, _ = _exact_mean_chains(e, horizon)
        for n in range(1, horizon):
            rn = p2[n - 1] / p1[n - 1]
            rn1 = p2[n] / p1[n]
            ok_add = rn1 <= rn + Q(1, n + 1)
            ok_mult = rn1 < (1 + Q(1, n)) * rn
            exact_fail |= not (ok_add and ok_mult)
            mg.add(0.0 if (ok_add and ok_mult) else -1.0, n)
    elif sample_indices is not None:
        m1 = mean_view(e)
        m2 = mean_view(m1)
        for n in sample_indices:
            rn = math.exp(m2.log_value(n) - m1.log_value(n))
            rn1 = math.exp(m2.log_value(n + 1) - m1.log_value(n + 1))
            mg.add((rn + 1.0 / (n + 1) - rn1) * (n + 1), n)
            mg.add(((1.0 + 1.0 / n) * rn - rn1) * n / rn, n)
    else:
        r = _dense_mean_ratio(e, horizon)
        ns = np.arange(1.0, horizon)
        slack_add = (r[:-1] + 1.0 / (ns + 1.0) - r[1:]) * (ns + 1.0)
        slack_mult = ((1.0 + 1.0 / ns) * r[:-1] - r[1:]) * ns / r[:-1]
        ia = int(np.argmin(slack_add))
        im = int(np.argmin(slack_mult))
        mg.add(float(slack_add[ia]), ia + 1)
        mg.add(float(slack_mult[im]), im + 1)
        mg.count = 2 * (horizon - 1)
    return mg.finish("upward-variation", e.label, horizon,
                     "rational" if exact else "log", tol, exact_fail=exact_fail)


def check_monotone_lemma(e: Seq, phi, horizon: int,
                         tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """With nondecreasing phi <= r(am(e)) <= beta phi (beta measured):
    at n = floor(m e^{phi_m}), (e_{a^2})_n <= K (m/n) log(n/m) (e_a)_m
    for K = 2 beta e^2 and every sampled m with m phi_m > 2."""
    m1 = mean_view(e)
    m2 = mean_view(m1)
    probes = geometric_indices(2, horizon, 24)
    beta = 0.0
    for n in probes:
        q = math.exp(m2.log_value(n) - m1.log_value(n)) / phi(n)
        if q < 1.0 - 1e-9:
            return CheckReport(
                check_id="monotone-lemma", subject=e.label, status="skipped",
                worst_margin=0.0, witness=str(n), sample_count=0,
                horizon=str(horizon), numeric_mode="log",
                note=f"hypothesis phi <= r(am(e)) fails at n={n}",
            )
        beta = max(beta, q)
    K = 2.0 * beta * math.e ** 2
    mg = _Margin()
    skipped = []
    for m in probes:
        pm = phi(m)
        if m * pm <= 2.0:
            continue
        n = floor_int_times_float(m, math.exp(pm))
        if n <= m:
            continue
        try:
            lhs = m2.log_value(n)
            rhs = (math.log(K) + math.log(m) - log_of_index(n)
                   + math.log(log_ratio(n, m)) + m1.log_value(m))
        except HorizonExceeded:
            skipped.append(m)
            continue
        mg.add(rhs - lhs, (m, n))
    note = f"beta={beta:.4g}, K={K:.4g}"
    if skipped:
        note += f"; skipped m beyond horizon: {skipped}"
    return mg.finish("monotone-lemma", e.label, horizon, "log", tol,
                     note=note, extras={"beta": beta, "K": K})


# ----------------------------------------------------------------------------
# Harmonic inequality battery
# ----------------------------------------------------------------------------

def check_harmonic_bounds(horizon: int = 10 ** 6, big_pairs: int = 10 ** 3,
                          seed: int = 0,
                          tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """1/n + log n < H_n < 1 + log n for all 1 < n <= horizon, the
    difference bounds log((n+1)/(m+1)) < H_n - H_m < log(n/m) for all
    n > m <= horizon (via the equivalent monotonicity of H_n - log n and
    H_n - log(n+1)), the same bounds on sampled big pairs, and the
    exact/asymptotic agreement at the crossover."""
    eng = default_harmonic()
    N = min(horizon, eng.exact_limit)
    H = eng._H[:N]
    ns = np.arange(1.0, N + 1.0)
    ln = np.log(ns)
    mg = _Margin()
    lo = (H - ln - 1.0 / ns)[1:]
    hi = (1.0 + ln - H)[1:]
    mg.add(float(np.min(lo)), int(np.argmin(lo)) + 2)
    mg.add(float(np.min(hi)), int(np.argmin(hi)) + 2)
    # all-pairs Eq-2 reduces to: H - log n strictly decreasing, H - log(n+1)
    # strictly increasing
    f = H - ln
    g = H - np.log(ns + 1.0)
    mg.add(float(np.min(-np.diff(f) * ns[1:])), "H - log n monotone")
    mg.add(float(np.min(np.diff(g) * ns[1:])), "H - log(n+1) monotone")
    rng = np.random.default_rng(seed)
    for _ in range(big_pairs):
        a = int(math.exp(rng.uniform(math.log(10.0), 60.0)))
        b = int(math.exp(rng.uniform(math.log(10.0), 60.0)))
        m, n = min(a, b), max(a, b)
        if m == n:
            n += 1
        d = eng.harmonic_diff(n, m)
        scale = max(d, 1e-12)
        mg.add((d - log_ratio(n + 1, m + 1)) / scale, (m, n))
        mg.add((log_ratio(n, m) - d) / scale, (m, n))
    rel = abs(eng.asymptotic(eng.exact_limit) - eng.exact(eng.exact_limit))
    rel /= eng.exact(eng.exact_limit)
    mg.add(1e-12 - rel, "crossover")
    return mg.finish("harmonic-bounds", "harmonic", horizon, "log", tol,
                     extras={"crossover_rel_err": rel})


# ----------------------------------------------------------------------------
# Exponential-doubling coherence and higher-order stability
# ----------------------------------------------------------------------------

def check_delta2_coherence(s: Seq, M: int = 10 ** 3,
                           band_lo: int = 10 ** 2, band_hi: int = 10 ** 6,
                           tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Two-way agreement between the doubling profile and the mean-ratio
    band: sup_m m^2 (s_a)_{m^2} / (m (s_a)_m) bounded in trend iff
    r(am(s))_n / log n stays in a flat band."""
    prof_vals = [exp_delta2_profile(s, c).sup_value
                 for c in (max(4, int(round(M ** 0.5))), max(8, M // 10), M)]
    trend = classify_trend(prof_vals)
    m1 = mean_view(s)
    m2 = mean_view(m1)
    qs = []
    for n in geometric_indices(band_lo, band_hi, 5):
        qs.append(math.exp(m2.log_value(n) - m1.log_value(n)) / math.log(n))
    band = classify_band(qs)
    coherent = (trend, band) in {
        ("bounded", "in-band"), ("unbounded", "vanishing"),
    }
    undecided = trend == "inconclusive" or band == "inconclusive"
    status = "pass" if coherent else ("inconclusive" if undecided else "fail")
    return CheckReport(
        check_id="delta2-coherence", subject=s.label, status=status,
        worst_margin=0.0 if status != "fail" else -1.0,
        witness=None, sample_count=len(prof_vals) + len(qs),
        horizon=str(band_hi), numeric_mode="log",
        note=f"profile trend={trend}, ratio/log band={band}",
        extras={
            "profile_checkpoints": prof_vals,
            "profile_trend": trend,
            "band_values": qs,
            "band_verdict": band,
            "profile_sup": prof_vals[-1],
        },
    )


def check_higher_order_delta2(s: Seq, M: int = 316, orders: int = 2,
                              tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Doubling-profile stability under iterated means.

    The base profile must be bounded in trend; boundedness of the deeper
    profiles then transfers through the pointwise identity
    D_i(m) = (r_{m}/r_{m^2}) D_{i+1}(m), r = r(am^{i+1}(s)), whose
    multiplier stays in [alpha/(2 beta), beta/(2 alpha)] when
    alpha log <= r <= beta log.  That transfer band is what is checked at
    sampled m (the deeper profiles converge too slowly for a direct trend
    call at dense-bounded M); raw deeper trends are reported as extras.
    """
    mg = _Margin()
    extras = {}
    level = s
    for i in range(orders + 1):
        prof = [exp_delta2_profile(level, c).sup_value
                for c in (max(4, int(round(M ** 0.5))), max(8, M // 10), M)]
        extras[f"profile_order_{i}"] = prof
        extras[f"trend_order_{i}"] = classify_trend(prof)
        level = mean_view(level)
    if extras["trend_order_0"] == "unbounded":
        mg.add(-1.0, "base profile unbounded")
    level_lo = s
    for i in range(orders):
        hi_mean = mean_view(mean_view(level_lo))  # am^{i+2}(s) values
        lo_mean = mean_view(level_lo)
        qs = [math.exp(hi_mean.log_value(n) - lo_mean.log_value(n)) / math.log(n)
              for n in geometric_indices(4, M * M, 9)]
        alpha, beta = min(qs), max(qs)
        lo_bound, hi_bound = alpha / (2.0 * beta), beta / (2.0 * alpha)
        for m in geometric_indices(3, M, 9):
            d_lo = math.exp(math.log(m) + lo_mean.log_value(m * m) - lo_mean.log_value(m))
            d_hi = math.exp(math.log(m) + hi_mean.log_value(m * m) - hi_mean.log_value(m))
            q = d_lo / d_hi
            mg.add(q - lo_bound, (f"order {i}", m, "lower"))
            mg.add(hi_bound - q, (f"order {i}", m, "upper"))
        extras[f"alpha_order_{i}"] = alpha
        extras[f"beta_order_{i}"] = beta
        extras[f"sup_ratio_order_{i}"] = (extras[f"profile_order_{i}"][-1]
                                          / extras[f"profile_order_{i + 1}"][-1])
        level_lo = mean_view(level_lo)
    return mg.finish("higher-order-delta2", s.label, M, "log", tol, extras=extras)


def check_delta_half(s: Seq, horizon: int = 10 ** 5,
                     tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Mean sequences are ampliation-stable: am(s) <= D_2(am(s)) <= 2 am(s)
    pointwise to the horizon."""
    x = mean_view(s)
    lx = x.dense_log(horizon)
    half = (np.arange(1, horizon + 1) + 1) // 2
    lh = lx[half - 1]
    mg = _Margin()
    low = lh - lx
    high = math.log(2.0) + lx - lh
    il, ih = int(np.argmin(low)), int(np.argmin(high))
    mg.add(float(low[il]), il + 1)
    mg.add(float(high[ih]), ih + 1)
    mg.count = 2 * horizon
    return mg.finish("delta-half", s.label, horizon, "log", tol)


# ----------------------------------------------------------------------------
# Counterexample batteries
# ----------------------------------------------------------------------------

def _first_k0(flags: dict[int, bool], K: int) -> int | None:
    """Smallest k0 such that the property holds for all k in [k0, K]."""
    k0 = None
    for k in range(K, 0, -1):
        if flags.get(k, False):
            k0 = k
        else:
            break
    return k0


def check_example6(params: Example6Params,
                   tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Witness battery for the equality-cancellation pair: the breakpoint
    sandwich, first-order divergence, second-order crux, the
    liminf/limsup signature, and the stage mean asymptotics; per-property
    empirical k0 is reported."""
    xi, eta = params.xi, params.eta
    K = params.stages
    mg = _Margin()
    k0_flags = {p: {} for p in ("divergence", "crux", "signature", "bands")}

    # (a) sandwich at every breakpoint, levels exactly delta_k
    for k in range(1, K + 1):
        mk = params.m[k - 1]
        ld = params.log_delta[k - 1]
        if xi.level_log_at(mk) != ld or eta.level_log_at(mk) != ld:
            mg.add(-1.0, (k, "level"))
        xa, ea = xi.am_log_at(mk), eta.am_log_at(mk)
        xa2, ea2 = xi.am2_log_at(mk), eta.am2_log_at(mk)
        cap = math.log1p(1.0 / k) + ld
        for slack, tag in [
            (xa - ld, "delta<=xi_a"), (ea - xa, "xi_a<=eta_a"),
            (ea2 - ea, "eta_a<=eta_a2"), (cap - ea2, "eta_a2<=cap"),
            (xa2 - xa, "xi_a<=xi_a2"), (cap - xa2, "xi_a2<=cap"),
        ]:
            mg.add(slack, (k, tag))

    # per-stage witnesses
    for k in range(1, K + 1):
        mk, nk = params.m[k - 1], params.n[k - 1]
        ld = params.log_delta[k - 1]
        ek2 = float(k * k)
        xa = math.exp(xi.am_log_at(nk) - ld + ek2)
        ea = math.exp(eta.am_log_at(nk) - ld + ek2)
        xa2 = math.exp(xi.am2_log_at(nk) - ld + ek2) / (k * k)
        ea2 = math.exp(eta.am2_log_at(nk) - ld + ek2) / (k * k)
        k0_flags["bands"][k] = (1.5 <= xa <= 2.5 and k - 1 <= ea <= k + 1.5
                                and 0.5 <= xa2 <= 2.0 and 0.5 <= ea2 <= 2.0)
        ratio1 = math.exp(eta.am_log_at(nk) - xi.am_log_at(nk))
        k0_flags["divergence"][k] = ratio1 >= k / 4.0
        r_m = math.exp(xi.am2_log_at(mk) - xi.am_log_at(mk))
        r_n = math.exp(xi.am2_log_at(nk) - xi.am_log_at(nk))
        k0_flags["signature"][k] = (r_m <= 1.0 + 2.0 / k and r_n >= k * k / 8.0)
        # crux: 2 xi_{a^2} >= eta_{a^2} at endpoints, grids, and the
        # analytic minimizer locations j = m_k + 1 and j ~ 3k n_k
        hi = params.m[k] if k < K else 100 * nk
        samples = {mk + 1, nk, nk + 1, hi}
        samples.update(geometric_indices(mk + 1, nk, 16))
        samples.update(geometric_indices(nk + 1, hi, 16))
        if nk < 3 * k * nk <= hi:
            samples.add(3 * k * nk)
        worst = math.inf
        for j in sorted(samples):
            worst = min(worst, math.log(2.0) + xi.am2_log_at(j) - eta.am2_log_at(j))
        k0_flags["crux"][k] = worst >= -tol

    k0 = {name: _first_k0(flags, K) for name, flags in k0_flags.items()}
    for name, val in k0.items():
        if val is None:
            mg.add(-1.0, f"{name}: no k0 within built stages")
    extras = {
        "k0": {name: (val if val is not None else -1) for name, val in k0.items()},
        "stages": K,
        "floor_ambiguous": params.floor_ambiguous,
    }
    return mg.finish("example6", "example6", params.n[-1], "log", tol, extras=extras)


def check_omega_half(params: OmegaHalfParams,
                     tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Witness battery for the reverse-inclusion pair: the stage sandwich,
    omega^{1/2} <= xi_{a^2} at samples including the analytic minimizers,
    and the unbounded growth of omega^{1/2}/xi_a at j_k = floor(m_k^2 / m_{k-1})."""
    xi = params.xi
    K = params.stages
    mg = _Margin()
    k0_flags = {"domination": {}, "divergence": {}, "mean-band": {}}

    for k in range(1, K):
        mk, mk1 = params.m[k - 1], params.m[k]
        if mk >= 1:
            la, la2 = xi.am_log_at(mk1), xi.am2_log_at(mk1)
            base = -log_of_index(mk)
            cap = math.log1p(1.0 / k) + base
            for slack, tag in [(la - base, "1/mk<=xi_a"), (la2 - la, "xi_a<=xi_a2"),
                               (cap - la2, "xi_a2<=cap")]:
                mg.add(slack, (k, tag))

    ratios = {}
    for k in range(2, K + 1):
        mk_1, mk = params.m[k - 2], params.m[k - 1]
        hi = params.m[k] if k < K else mk * (10 ** 6)
        # omega^{1/2} <= xi_{a^2} on samples + the interior minimizer
        samples = set(geometric_indices(mk + 1, hi, 24))
        samples.add(mk + 1)
        if mk_1 >= 5:
            factor = (1.0 + math.sqrt(1.0 - 4.0 / mk_1)) / 4.0
            t = floor_int_times_float(mk, factor)
            x_min = t * t
            if mk < x_min < hi:
                samples.add(x_min)
        worst = math.inf
        for j in sorted(samples):
            worst = min(worst, xi.am2_log_at(j) + 0.5 * log_of_index(j))
        k0_flags["domination"][k] = worst >= -tol
        if mk_1 >= 1:
            jk = (mk * mk) // mk_1
            la = xi.am_log_at(jk)
            w_over_mean = math.exp(-0.5 * log_of_index(jk) - la)
            ratios[k] = w_over_mean
            k0_flags["divergence"][k] = w_over_mean >= 0.25 * math.sqrt(mk_1)
            band = math.exp(la + log_of_index(mk))
            k0_flags["mean-band"][k] = 1.5 <= band <= 2.5
    # growth of the divergence witness across stages
    ks = sorted(ratios)
    growth = [ratios[b] / ratios[a] for a, b in zip(ks, ks[1:])]
    for g, k in zip(growth, ks[1:]):
        mg.add(g - 3.0, (k, "stage growth >= 3"))

    # domination/divergence start at k=2: scan back from the last stage
    k0 = {}
    for name, flags in k0_flags.items():
        ks_f = sorted(flags)
        k0[name] = None
        for k in reversed(ks_f):
            if flags[k]:
                k0[name] = k
            else:
                break
        if k0[name] is None:
            mg.add(-1.0, f"{name}: no k0 within built stages")
    extras = {
        "k0": {name: (val if val is not None else -1) for name, val in k0.items()},
        "stages": K,
        "divergence_ratios": {str(k): v for k, v in ratios.items()},
    }
    return mg.finish("omega-half", "omega-half", params.m[-1], "log", tol,
                     extras=extras)


def check_cancellation_witness(x: Seq, y: Seq, order: int, checkpoints,
                               tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """Domination profiles of the order-th and (order-1)-th means in both
    directions; the cancellation-failure signature is boundedness evidence
    at the higher order coexisting with divergence evidence one order
    below.  Reports the evidence; the status only fails on errors."""
    if order < 1:
        raise ValueError("order >= 1 required")
    hi_x, hi_y = am_pow(x, order), am_pow(y, order)
    lo_x = am_pow(x, order - 1) if order > 1 else x
    lo_y = am_pow(y, order - 1) if order > 1 else y
    prof = {
        "high_yx": domination_profile(hi_y, hi_x, checkpoints),
        "high_xy": domination_profile(hi_x, hi_y, checkpoints),
        "low_yx": domination_profile(lo_y, lo_x, checkpoints),
        "low_xy": domination_profile(lo_x, lo_y, checkpoints),
    }
    trends = {k: classify_trend([v for _, v in p]) for k, p in prof.items()}
    signature = (
        (trends["high_yx"] == "bounded" and trends["low_yx"] == "unbounded")
        or (trends["high_xy"] == "bounded" and trends["low_xy"] == "unbounded")
    )
    return CheckReport(
        check_id="cancellation-witness", subject=f"{x.label} vs {y.label}",
        status="pass", worst_margin=0.0, witness=None,
        sample_count=4 * len(list(checkpoints)), horizon=str(max(checkpoints)),
        numeric_mode="log",
        note=f"signature {'detected' if signature else 'not detected'}",
        extras={
            "order": order,
            "signature": signature,
            "trends": trends,
            "profiles": {k: [[str(c), v] for c, v in p] for k, p in prof.items()},
        },
    )


def check_hat_power(p: float, horizon: int = 10 ** 3,
                    tol: float = DEFAULT_TOLERANCE) -> CheckReport:
    """hat(omega^p) tracks omega^{p'} with 1/p - 1/p' = 1: the ratio over
    10 <= n <= horizon must stay inside a fixed band (cap 64)."""
    if not 0.0 < p < 1.0:
        raise ValueError("need 0 < p < 1")
    pp = p / (1.0 - p)
    h = hat(PowerSeq(p))
    lo, hi = math.inf, -math.inf
    worst_n = None
    for n in range(10, horizon + 1):
        ratio = math.exp(h.log_value(n) + pp * math.log(n))
        if ratio > hi:
            hi = ratio
        if ratio < lo:
            lo, worst_n = ratio, n
    cap = 64.0
    mg = _Margin()
    mg.add(math.log(cap) - math.log(hi), "band-upper")
    mg.add(math.log(lo) - math.log(1.0 / cap), "band-lower")
    mg.count = horizon - 9
    return mg.finish("hat-power", f"omega^{p:g}", horizon, "log", tol,
                     note=f"p'={pp:g}, band=[{lo:.4g}, {hi:.4g}]",
                     extras={"p": p, "p_prime": pp, "band": [lo, hi]})


# ----------------------------------------------------------------------------
# Suites
# ----------------------------------------------------------------------------

def builtin_subject(name: str) -> Seq:
    """Registry of named suite subjects."""
    if name.startswith("omega-"):
        num, _, den = name[6:].partition("/")
        return PowerSeq(float(num) / float(den) if den else float(num))
    table = {
        "omega": lambda: PowerSeq(1.0),
        "log-over-n": lambda: LogPowerSeq(1.0),
        "log2-over-n": lambda: LogPowerSeq(2.0),
        "loglog": lambda: LogPowerSeq(1.0, 1.0),
        "iterlog": lambda: IterLogSeq(),
        "finite-rank": lambda: HeadTailSeq([1, 0]),
    }
    if name not in table:
        raise KeyError(f"unknown subject {name!r}")
    return table[name]()


_LEMMA_SUBJECTS = ["omega-1/3", "omega-1/2", "omega-2/3", "omega",
                   "log-over-n", "log2-over-n"]
_DELTA2_SUBJECTS = ["omega", "log-over-n", "omega-2", "omega-1/2", "omega-2/3"]


def _lemma_checks(s: Seq, horizon: int, exact: bool, tol: float, seed: int):
    rng = np.random.default_rng(seed)
    pairs = _pair_sample(rng, horizon, 60)
    id_pairs = _pair_sample(rng, horizon, 50, max_gap=1024) if exact else pairs
    ms = geometric_indices(2, max(2, horizon // 4), 10)
    yield check_ratio_identity(s, id_pairs, exact=exact, tol=tol)
    yield check_sandwich(s, pairs, exact=exact, tol=tol)
    yield check_H_bound(s, horizon, exact=exact, tol=tol)
    yield check_upward_variation(s, horizon, exact=exact, tol=tol)
    yield check_log_jump(s, ms, tol=tol)


def run_suite(suite: str, subjects=None, horizon: int = 10 ** 4,
              exact: bool = False, tol: float = DEFAULT_TOLERANCE,
              seed: int = 0, stages: int | None = None) -> list[CheckReport]:
    """Execute a named suite; reports come back sorted by (check_id,
    subject).  Unknown names raise KeyError (the CLI maps this to a usage
    error)."""
    reports: list[CheckReport] = []
    if suite == "lemmas":
        names = subjects or _LEMMA_SUBJECTS
        for name in names:
            s = builtin_subject(name)
            if s.log_value(2) == NEG_INF:
                reports.append(check_H_bound(s, horizon, exact=exact, tol=tol))
                continue
            reports.extend(_lemma_checks(s, horizon, exact, tol, seed))
    elif suite == "harmonic":
        reports.append(check_harmonic_bounds(horizon=max(horizon, 10 ** 6),
                                             seed=seed, tol=tol))
    elif suite == "delta2":
        for name in (subjects or _DELTA2_SUBJECTS):
            reports.append(check_delta2_coherence(builtin_subject(name), tol=tol))
    elif suite == "higher-order":
        for name in (subjects or ["omega", "log-over-n"]):
            reports.append(check_higher_order_delta2(builtin_subject(name), tol=tol))
    elif suite == "delta-half":
        p6 = build_example6(min(stages or 6, 6))
        subjects_seqs = [builtin_subject("omega"), builtin_subject("omega-1/2"),
                         StepView(p6.xi, label="example6-xi")]
        for s in subjects_seqs:
            reports.append(check_delta_half(s, horizon=min(horizon, 10 ** 5), tol=tol))
    elif suite == "example6":
        params = build_example6(stages or 8)
        reports.append(check_example6(params, tol=tol))
        xi = StepView(params.xi, label="xi")
        eta = StepView(params.eta, label="eta")
        reports.append(check_cancellation_witness(xi, eta, 2, params.n[2:], tol=tol))
        reports.append(check_log_jump(eta, [m + 1 for m in params.m[1:6]], tol=tol))
    elif suite == "omega-half":
        params = build_omega_half(stages or 4)
        reports.append(check_omega_half(params, tol=tol))
        w = PowerSeq(0.5)
        xi = StepView(params.xi, label="omega-half-xi")
        cps = [c for c in (10 ** 3, 10 ** 4, 10 ** 5) if c <= 10 ** 6]
        reports.append(check_cancellation_witness(w, xi, 2, cps, tol=tol))
    elif suite == "hat":
        for p in (1 / 3, 1 / 2, 2 / 3):
            reports.append(check_hat_power(p, horizon=min(horizon, 10 ** 3), tol=tol))
        try:
            hat(PowerSeq(2.0))
            reports.append(CheckReport(
                "hat-summable-guard", "omega-2", "fail", -1.0, None, 1,
                str(horizon), "log", note="summable input did not raise"))
        except SummableError as exc:
            reports.append(CheckReport(
                "hat-summable-guard", "omega-2", "pass", 0.0, None, 1,
                str(horizon), "log", note=f"raised as specified: {exc}"))
    elif suite == "all":
        for name in ("lemmas", "harmonic", "delta2", "higher-order",
                     "delta-half", "example6", "omega-half", "hat"):
            reports.extend(run_suite(name, subjects=None, horizon=horizon,
                                     exact=exact, tol=tol, seed=seed,
                                     stages=stages))
    else:
        raise KeyError(f"unknown suite {suite!r}")
    reports.sort(key=lambda r: (r.check_id, r.subject))
    return reports


# ----------------------------------------------------------------------------
# Emitters
# ----------------------------------------------------------------------------

def reports_to_json(reports, config: dict | None = None,
                    timestamp: str | None = None) -> str:
    doc = {
        "config": config or {},
        "reports": [r.to_json() for r in reports],
        "failures": sum(1 for r in reports if r.status == "fail"),
    }
    if timestamp is not None:
        doc["timestamp"] = timestamp
    return json.dumps(doc, indent=2, sort_keys=True)


_CSV_FIELDS = ["check_id", "subject", "status", "worst_margin", "witness",
               "sample_count", "horizon", "numeric_mode", "note"]


def reports_to_csv(reports, timestamp: str | None = None) -> str:
    buf = io.StringIO()
    if timestamp is not None:
        buf.write(f"# generated {timestamp}\n")
    w = csv.DictWriter(buf, fieldnames=_CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        row = {k: getattr(r, k) for k in _CSV_FIELDS}
        w.writerow(row)
    return buf.getvalue()
