"""Seeded, parallel Monte Carlo for concentration and contrast frequencies.

Work is split into fixed-size chunks of rows; chunk i draws from an
independent counter-based stream keyed by (seed, i).  Per-chunk results are
integers (or index-ordered reductions), so totals do not depend on worker
count or scheduling: identical inputs and seed give bit-identical output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .distributions import Distribution
from .seeding import derive_seed, generator

__all__ = [
    "ConcentrationGrid",
    "ContrastSummary",
    "DEFAULT_P_GRID",
    "DEFAULT_N_GRID",
    "log_lp_norms",
    "lp_norms",
    "pair_contrast",
    "wilson_halfwidth",
    "concentration_frequency",
    "curve_sweep",
    "relative_contrast",
]

# rows per chunk are sized so a chunk holds about this many entries
CHUNK_TARGET_ENTRIES = 1 << 22

_WILSON_Z = 1.959963984540054

DEFAULT_P_GRID = tuple(float(p) for p in np.geomspace(1e-3, 10.0, 30))
DEFAULT_N_GRID = (10, 30, 100, 300, 1000, 3000)

NORMALIZATIONS = ("analytic-mu", "empirical-mu")


def log_lp_norms(values: np.ndarray, p: float) -> np.ndarray:
    """log of the p-th power sum over the last axis, then divided by p.

    Everything runs in log space with the max factored out, so entries
    spanning hundreds of orders of magnitude and p up to the hundreds are
    safe.  Rows of zeros give -inf.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(values))
    return logsumexp(p * logs, axis=-1) / p


def lp_norms(values: np.ndarray, p: float) -> np.ndarray:
    """Row norms (sum of |entry|^p) ** (1/p); inf where the result overflows."""
    with np.errstate(over="ignore"):
        return np.exp(log_lp_norms(values, p))


def pair_contrast(x1: np.ndarray, x2: np.ndarray, p: float) -> float:
    """|norm(x1) - norm(x2)| / norm(x1), computed from log norms; nan if
    norm(x1) is zero."""
    l1 = float(log_lp_norms(np.asarray(x1, dtype=float), p))
    l2 = float(log_lp_norms(np.asarray(x2, dtype=float), p))
    if l1 == -math.inf:
        return math.nan
    if l2 == -math.inf:
        return 1.0
    return abs(math.expm1(l2 - l1))


def wilson_halfwidth(count: int, total: int, z: float = _WILSON_Z) -> float:
    """Halfwidth of the Wilson score interval for count/total."""
    if total <= 0:
        raise ValueError("total must be positive")
    phat = count / total
    denom = 1.0 + z * z / total
    return (z / denom) * math.sqrt(phat * (1.0 - phat) / total + z * z / (4.0 * total * total))


def _chunk_plan(rows_total: int, row_entries: int) -> list[tuple[int, int, int]]:
    """(chunk_index, start_row, rows) triples covering rows_total rows."""
    rows_per_chunk = max(1, CHUNK_TARGET_ENTRIES // max(row_entries, 1))
    plan = []
    start = 0
    index = 0
    while start < rows_total:
        rows = min(rows_per_chunk, rows_total - start)
        plan.append((index, start, rows))
        start += rows
        index += 1
    return plan


def _map_chunks(fn: Callable, plan: Sequence[tuple[int, int, int]], workers: int | None):
    """Run fn over chunks, returning results in chunk-index order."""
    if workers is None:
        workers = min(len(plan), os.cpu_count() or 1)
    workers = max(1, min(workers, len(plan)))
    if workers == 1:
        return [fn(c) for c in plan]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, plan))


def _pooled_log_mu(
    dist: Distribution, n: int, p: float, M: int, seed: int, workers: int | None, pair: bool
) -> float:
    """log of the pooled mean of |entry|^p over the full sample."""
    shape_cols = (2, n) if pair else (n,)

    def one(chunk: tuple[int, int, int]) -> float:
        index, _, rows = chunk
        x = dist.draw(generator(seed, index), (rows, *shape_cols))
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(x))
        return float(logsumexp(p * logs))

    plan = _chunk_plan(M, n * (2 if pair else 1))
    parts = _map_chunks(one, plan, workers)
    total_entries = M * n * (2 if pair else 1)
    return float(logsumexp(np.array(parts))) - math.log(total_entries)


def _log_mu(
    dist: Distribution,
    n: int,
    p: float,
    M: int,
    seed: int,
    normalization: str,
    workers: int | None,
    pair: bool = False,
) -> float:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    if normalization == "analytic-mu":
        return math.log(dist.mu_p(p))
    return _pooled_log_mu(dist, n, p, M, seed, workers, pair)


def concentration_frequency(
    dist: Distribution,
    n: int,
    p: float,
    delta: float,
    M: int,
    seed: int,
    normalization: str = "analytic-mu",
    workers: int | None = None,
) -> tuple[float, float]:
    """Frequency of the normalized norm landing inside [1-delta, 1+delta].

    Returns (frequency, Wilson 95% halfwidth).  The norm ratio is evaluated
    fully in log space (max factored out), so any p and entry scale that fit
    in floats are handled.  delta >= 1 leaves only the upper constraint.
    """
    if M < 100:
        raise ValueError("M must be at least 100")
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not delta > 0:
        raise ValueError("delta must be positive")
    log_mu = _log_mu(dist, n, p, M, seed, normalization, workers)
    if log_mu == -math.inf or not math.isfinite(log_mu):
        raise ValueError("normalization mean is zero or non-finite for this p")
    lo = math.log1p(-delta) if delta < 1.0 else -math.inf
    hi = math.log1p(delta)
    # log of (n * mu)^(1/p); log_lp_norms already carries the 1/p
    shift = (math.log(n) + log_mu) / p

    def one(chunk: tuple[int, int, int]) -> int:
        index, _, rows = chunk
        x = dist.draw(generator(seed, index), (rows, n))
        log_ratio = log_lp_norms(x, p) - shift
        return int(np.count_nonzero((log_ratio >= lo) & (log_ratio <= hi)))

    counts = _map_chunks(one, _chunk_plan(M, n), workers)
    inside = sum(counts)
    return inside / M, wilson_halfwidth(inside, M)


@dataclass(frozen=True)
class ConcentrationGrid:
    """Concentration frequencies over a (p, n) grid."""

    p_grid: tuple[float, ...]
    n_grid: tuple[int, ...]
    freq: tuple[tuple[float, ...], ...]
    ci_halfwidth: tuple[tuple[float, ...], ...]
    sample_count: int
    seed: int
    normalization: str
    failed: tuple[tuple[int, int, str], ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "p_grid": list(self.p_grid),
            "n_grid": list(self.n_grid),
            "freq": [list(row) for row in self.freq],
            "ci": [list(row) for row in self.ci_halfwidth],
            "M": self.sample_count,
            "seed": self.seed,
            "normalization": self.normalization,
            "failed": [list(item) for item in self.failed],
        }

    def rows(self):
        """Long-format (p, n, freq, ci) rows for CSV emission."""
        for i, p in enumerate(self.p_grid):
            for j, n in enumerate(self.n_grid):
                yield p, n, self.freq[i][j], self.ci_halfwidth[i][j]


def curve_sweep(
    dist: Distribution,
    p_grid: Sequence[float] | None = None,
    n_grid: Sequence[int] | None = None,
    delta: float = 0.1,
    M: int = 10_000,
    seed: int = 0,
    normalization: str = "analytic-mu",
    workers: int | None = None,
) -> ConcentrationGrid:
    """concentration_frequency over the full grid; cell (i, j) uses its own
    stream derived from (seed, i, j), so the grid shape never shifts draws."""
    ps = tuple(float(p) for p in (DEFAULT_P_GRID if p_grid is None else p_grid))
    ns = tuple(int(n) for n in (DEFAULT_N_GRID if n_grid is None else n_grid))
    if not ps or not ns:
        raise ValueError("grids must be nonempty")
    freq: list[tuple[float, ...]] = []
    ci: list[tuple[float, ...]] = []
    failed: list[tuple[int, int, str]] = []
    for i, p in enumerate(ps):
        row_f: list[float] = []
        row_c: list[float] = []
        for j, n in enumerate(ns):
            try:
                f, c = concentration_frequency(
                    dist, n, p, delta, M, derive_seed(seed, i, j), normalization, workers
                )
            except (ValueError, OverflowError) as exc:
                failed.append((i, j, str(exc)))
                f, c = math.nan, math.nan
            row_f.append(f)
            row_c.append(c)
        freq.append(tuple(row_f))
        ci.append(tuple(row_c))
    return ConcentrationGrid(
        p_grid=ps,
        n_grid=ns,
        freq=tuple(freq),
        ci_halfwidth=tuple(ci),
        sample_count=M,
        seed=seed,
        normalization=normalization,
        failed=tuple(failed),
    )


@dataclass(frozen=True)
class ContrastSummary:
    """Pairwise norm-difference statistics at one (p, n)."""

    p: float
    n: int
    median_rc: float
    freq_below_delta: float
    delta: float
    pairs: int
    skipped: int
    skipped_fraction: float
    joint_half_band_freq: float
    ci_halfwidth: float
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "median_rc": self.median_rc,
            "freq_below_delta": self.freq_below_delta,
            "delta": self.delta,
            "pairs": self.pairs,
            "skipped": self.skipped,
            "skipped_fraction": self.skipped_fraction,
            "joint_half_band_freq": self.joint_half_band_freq,
            "ci": self.ci_halfwidth,
            "seed": self.seed,
        }


def relative_contrast(
    dist: Distribution,
    n: int,
    p: float,
    M: int,
    seed: int,
    delta: float,
    normalization: str = "analytic-mu",
    workers: int | None = None,
) -> ContrastSummary:
    """Samples M independent vector pairs (2M fresh draws).

    freq_below_delta is the share of valid pairs whose norm difference,
    normalized by (n*mu_p)^(1/p), stays below delta.  median_rc is the
    median of |norm1 - norm2| / norm1.  Pairs whose first vector has zero
    norm are skipped and counted.  joint_half_band_freq is the share of
    pairs with both ratios inside the half-delta band, measured on the same
    draws; it is a sample-exact lower bound for freq_below_delta.
    """
    if M < 100:
        raise ValueError("M must be at least 100")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    log_mu = _log_mu(dist, n, p, M, seed, normalization, workers, pair=True)
    if not math.isfinite(log_mu):
        raise ValueError("normalization mean is zero or non-finite for this p")
    shift = (math.log(n) + log_mu) / p
    half_lo, half_hi = math.log1p(-delta / 2.0), math.log1p(delta / 2.0)

    def one(chunk: tuple[int, int, int]) -> tuple[int, int, int, np.ndarray]:
        index, _, rows = chunk
        x = dist.draw(generator(seed, index), (rows, 2, n))
        log_norm = log_lp_norms(x, p)
        log_r = log_norm - shift
        r1, r2 = log_r[:, 0], log_r[:, 1]
        valid = r1 > -math.inf
        with np.errstate(over="ignore", invalid="ignore"):
            diff = np.abs(np.exp(r1) - np.exp(r2))
        below = int(np.count_nonzero(valid & (diff < delta)))
        joint = int(
            np.count_nonzero(
                (r1 >= half_lo) & (r1 <= half_hi) & (r2 >= half_lo) & (r2 <= half_hi)
            )
        )
        with np.errstate(over="ignore", invalid="ignore"):
            gap = log_norm[:, 1] - log_norm[:, 0]
            rc = np.abs(np.expm1(gap[valid]))
        return below, joint, int(rows - valid.sum()), rc

    parts = _map_chunks(one, _chunk_plan(M, 2 * n), workers)
    below = sum(part[0] for part in parts)
    joint = sum(part[1] for part in parts)
    skipped = sum(part[2] for part in parts)
    rc_all = np.concatenate([part[3] for part in parts]) if parts else np.array([])
    valid_pairs = M - skipped
    if valid_pairs <= 0:
        raise ValueError("every pair had a zero first norm")
    return ContrastSummary(
        p=p,
        n=n,
        median_rc=float(np.median(rc_all)),
        freq_below_delta=below / valid_pairs,
        delta=delta,
        pairs=M,
        skipped=skipped,
        skipped_fraction=skipped / M,
        joint_half_band_freq=joint / M,
        ci_halfwidth=wilson_halfwidth(below, valid_pairs),
        seed=seed,
    )
