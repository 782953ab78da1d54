"""Rank-statistics kernel.

All procedures here operate on ranks rather than raw values, so they stay
valid for the heavily skewed count data this package produces (file sizes,
cell counts, clone frequencies). The kernel is self-contained: ranking, tie
corrections and the step-up adjustment are implemented in this module, and
only distribution tail probabilities are delegated to ``scipy.special``.

Conventions shared by every test function:

- Two-sided p-values.
- Ties receive average ranks.
- Normal approximations use tie-corrected variances and a 0.5 continuity
  correction; results carry a note naming the approximation.
- A degenerate input (constant vector, all-zero differences) yields a
  result whose ``p_value`` is ``None`` instead of a fabricated number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import special

from nbclones.errors import ValidationError

#: Display threshold below which p-values are printed in clamped form.
P_DISPLAY_FLOOR = 2.2e-16


@dataclass(frozen=True)
class TestResult:
    """Outcome of one statistical test.

    ``statistic_name`` is the conventional symbol for the statistic
    (``rho``, ``H``, ``W`` or ``V``); ``sample_sizes`` records the group
    sizes that entered the test. ``p_value`` is ``None`` for degenerate
    inputs, in which case ``notes`` says why.
    """

    statistic_name: str
    statistic: float
    p_value: float | None
    sample_sizes: tuple[int, ...]
    notes: str = ""


@dataclass(frozen=True)
class SummaryRow:
    """Distribution summary: min, selected percentiles, mean, max."""

    min: float
    p10: float
    p25: float
    median: float
    mean: float
    p75: float
    p90: float
    max: float

    def as_ordered_pairs(self) -> list[tuple[str, float]]:
        return [
            ("min", self.min),
            ("p10", self.p10),
            ("p25", self.p25),
            ("median", self.median),
            ("mean", self.mean),
            ("p75", self.p75),
            ("p90", self.p90),
            ("max", self.max),
        ]


# ---------------------------------------------------------------------------
# percentiles
# ---------------------------------------------------------------------------


def percentile(values: Iterable[float], q: float) -> float:
    """Quantile ``q`` of ``values`` with linear interpolation.

    Uses the rank position ``h = (n - 1) * q``: the result is
    ``v[floor(h)] + (h - floor(h)) * (v[floor(h) + 1] - v[floor(h)])`` on the
    sorted values, the default rule of the common statistical environments.
    """
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValidationError("percentile of an empty sequence")
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"quantile must lie in [0, 1], got {q!r}")
    return float(np.quantile(arr, q))


def summarize(values: Iterable[float]) -> SummaryRow:
    """Standard distribution summary used by every report table."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ValidationError("summary of an empty sequence")
    arr.sort()
    qs = np.quantile(arr, [0.10, 0.25, 0.50, 0.75, 0.90])
    return SummaryRow(
        min=float(arr[0]),
        p10=float(qs[0]),
        p25=float(qs[1]),
        median=float(qs[2]),
        mean=float(arr.mean()),
        p75=float(qs[3]),
        p90=float(qs[4]),
        max=float(arr[-1]),
    )


# ---------------------------------------------------------------------------
# ranking
# ---------------------------------------------------------------------------


def average_ranks(values: Iterable[float]) -> np.ndarray:
    """Ranks 1..n with tied values sharing the average of their positions."""
    arr = np.asarray(list(values), dtype=float)
    n = arr.size
    order = np.argsort(arr, kind="stable")
    sorted_vals = arr[order]
    # tie runs over the sorted values; each run gets its mean 1-based position
    run_starts = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1]])
    run_ends = np.r_[run_starts[1:], n]
    run_rank = (run_starts + run_ends - 1) / 2.0 + 1.0
    ranks = np.empty(n, dtype=float)
    ranks[order] = np.repeat(run_rank, run_ends - run_starts)
    return ranks


def _tie_term(values: np.ndarray) -> float:
    """Sum of t^3 - t over tie groups of ``values``."""
    _, counts = np.unique(values, return_counts=True)
    counts = counts[counts > 1].astype(float)
    return float(np.sum(counts**3 - counts))


def _normal_sf_two_sided(delta: float, sd: float) -> float:
    """Two-sided tail probability for a shifted normal statistic."""
    z = delta / sd
    return float(math.erfc(z / math.sqrt(2.0)))


# ---------------------------------------------------------------------------
# tests
# ---------------------------------------------------------------------------


def spearman(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Spearman rank correlation with a t-distribution p-value.

    The coefficient is the Pearson correlation of the average ranks of the
    two vectors (which handles ties). Significance uses the standard
    approximation ``t = rho * sqrt((n - 2) / (1 - rho^2))`` with ``n - 2``
    degrees of freedom, two-sided.
    """
    xa = np.asarray(list(x), dtype=float)
    ya = np.asarray(list(y), dtype=float)
    if xa.size != ya.size:
        raise ValidationError("input vectors differ in length")
    n = xa.size
    if n < 3:
        raise ValidationError("need at least 3 observations")
    rx = average_ranks(xa)
    ry = average_ranks(ya)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return TestResult(
            "rho", float("nan"), None, (n,), "degenerate: constant input vector"
        )
    rho = float(dx @ dy) / denom
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
        p = 2.0 * float(special.stdtr(n - 2, -abs(t)))
    return TestResult("rho", rho, min(p, 1.0), (n,), "t approximation, two-sided")


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> TestResult:
    """Kruskal-Wallis H test across two or more independent groups.

    H is computed from joint average ranks and divided by the tie
    correction ``1 - sum(t^3 - t) / (N^3 - N)``; the p-value is the upper
    tail of the chi-square distribution with ``k - 1`` degrees of freedom
    (evaluated through the regularized incomplete gamma function).
    """
    samples = [np.asarray(list(g), dtype=float) for g in groups]
    if len(samples) < 2:
        raise ValidationError("need at least two groups")
    if any(g.size == 0 for g in samples):
        raise ValidationError("groups must be non-empty")
    pooled = np.concatenate(samples)
    n_total = pooled.size
    if n_total < 3:
        raise ValidationError("need at least 3 observations in total")
    ranks = average_ranks(pooled)
    expected = (n_total + 1) / 2.0
    h = 0.0
    offset = 0
    for g in samples:
        grp = ranks[offset : offset + g.size]
        offset += g.size
        h += g.size * (grp.mean() - expected) ** 2
    h *= 12.0 / (n_total * (n_total + 1))
    correction = 1.0 - _tie_term(pooled) / (n_total**3 - n_total)
    sizes = tuple(int(g.size) for g in samples)
    if correction == 0.0:
        return TestResult(
            "H", float("nan"), None, sizes, "degenerate: all values identical"
        )
    h /= correction
    df = len(samples) - 1
    p = float(special.gammaincc(df / 2.0, h / 2.0))
    return TestResult("H", h, min(p, 1.0), sizes, "chi-square approximation")


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sided rank-sum test; W is the rank sum of the first sample.

    The p-value always comes from the normal approximation with
    tie-corrected variance and a 0.5 continuity correction, regardless of
    sample size, and the result's notes say so.
    """
    aa = np.asarray(list(a), dtype=float)
    ba = np.asarray(list(b), dtype=float)
    if aa.size == 0 or ba.size == 0:
        raise ValidationError("both samples must be non-empty")
    n1, n2 = aa.size, ba.size
    n = n1 + n2
    pooled = np.concatenate([aa, ba])
    ranks = average_ranks(pooled)
    w = float(ranks[:n1].sum())
    mean_w = n1 * (n + 1) / 2.0
    variance = n1 * n2 / 12.0 * ((n + 1) - _tie_term(pooled) / (n * (n - 1)))
    notes = "normal approximation, tie-corrected, continuity-corrected"
    if variance <= 0.0:
        return TestResult(
            "W", w, None, (n1, n2), "degenerate: all pooled values identical"
        )
    delta = max(abs(w - mean_w) - 0.5, 0.0)
    p = _normal_sf_two_sided(delta, math.sqrt(variance))
    return TestResult("W", w, min(p, 1.0), (n1, n2), notes)


def hochberg_adjust(pvalues: Sequence[float]) -> list[float]:
    """Step-up adjustment of a family of p-values.

    With the raw values sorted ascending as ``p(1) <= ... <= p(m)``, the
    adjusted value at sorted position ``i`` is
    ``min over j >= i of (m - j + 1) * p(j)``, clamped at 1. The returned
    list is in the original input order.
    """
    ps = [float(p) for p in pvalues]
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise ValidationError(f"p-value outside [0, 1]: {p!r}")
    m = len(ps)
    if m == 0:
        return []
    order = sorted(range(m), key=lambda i: ps[i])
    adjusted_sorted = [0.0] * m
    running = math.inf
    for pos in range(m - 1, -1, -1):
        running = min(running, (m - pos) * ps[order[pos]])
        adjusted_sorted[pos] = min(running, 1.0)
    out = [0.0] * m
    for pos, idx in enumerate(order):
        out[idx] = adjusted_sorted[pos]
    return out


def wilcoxon_signed_rank(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Paired signed-rank test; V is the rank sum of positive differences.

    Zero differences are dropped before ranking. Absolute differences are
    ranked with average ties; the p-value uses the normal approximation
    with the tie term ``sum(t^3 - t) / 48`` subtracted from the variance
    and a 0.5 continuity correction, two-sided.
    """
    xa = np.asarray(list(x), dtype=float)
    ya = np.asarray(list(y), dtype=float)
    if xa.size != ya.size:
        raise ValidationError("paired samples differ in length")
    if xa.size == 0:
        raise ValidationError("need at least one pair")
    d = xa - ya
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return TestResult(
            "V", 0.0, None, (xa.size,), "degenerate: all differences zero"
        )
    abs_ranks = average_ranks(np.abs(d))
    v = float(abs_ranks[d > 0].sum())
    mean_v = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - _tie_term(np.abs(d)) / 48.0
    if variance <= 0.0:
        return TestResult("V", v, None, (xa.size,), "degenerate: zero variance")
    delta = max(abs(v - mean_v) - 0.5, 0.0)
    p = _normal_sf_two_sided(delta, math.sqrt(variance))
    notes = "normal approximation, tie-corrected, continuity-corrected"
    return TestResult("V", v, min(p, 1.0), (xa.size,), notes)


# ---------------------------------------------------------------------------
# histograms and display helpers
# ---------------------------------------------------------------------------


def histogram(
    values: Iterable[float],
    width: float | None = None,
    edges: Sequence[float] | None = None,
) -> list[tuple[float, int]]:
    """Bin counts as ``(bin, count)`` pairs with zero-count bins omitted.

    Exactly one of ``width`` and ``edges`` must be given. With ``width``,
    a value v falls into the bin labelled ``floor(v / width) * width``
    (left-closed). With explicit ``edges``, bins are left-closed except the
    last, which also includes its right edge; a value outside the edges is
    a validation error because counts must partition the input.
    """
    vals = np.asarray(list(values), dtype=float)
    if (width is None) == (edges is None):
        raise ValidationError("give exactly one of width= or edges=")
    out: list[tuple[float, int]] = []
    if width is not None:
        if width <= 0:
            raise ValidationError("width must be positive")
        if vals.size == 0:
            return []
        idx = np.floor(vals / width).astype(np.int64)
        uniq, counts = np.unique(idx, return_counts=True)
        out = [(float(i * width), int(c)) for i, c in zip(uniq, counts)]
    else:
        edge_arr = np.asarray(list(edges), dtype=float)
        if edge_arr.size < 2 or np.any(np.diff(edge_arr) <= 0):
            raise ValidationError("edges must be increasing and give >= 1 bin")
        if vals.size == 0:
            return []
        if vals.min() < edge_arr[0] or vals.max() > edge_arr[-1]:
            raise ValidationError("value outside the given bin edges")
        counts, _ = np.histogram(vals, bins=edge_arr)
        out = [
            (float(edge_arr[i]), int(c)) for i, c in enumerate(counts) if c > 0
        ]
    return out


def format_p(p: float | None) -> str:
    """Human-readable p-value; tiny values print as '< 2.2e-16'."""
    if p is None:
        return "NA"
    if p < P_DISPLAY_FLOOR:
        return "< 2.2e-16"
    return format(p, ".4g")
