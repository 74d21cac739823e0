"""Synthetic embedding experiments and retrieval scoring kernels.

Four vector populations mirror common retrieval setups: dense normalized
encoders, high-dimensional sparse term weights, ReLU feature maps, and
binary indicator profiles.  On top of them sit concentration and contrast
tables over p, plus the scoring functions (cosine, sparse dot, hybrid mix,
reciprocal-rank fusion, Hadamard powered sums) whose behavior those tables
explain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .monte_carlo import CHUNK_TARGET_ENTRIES, log_lp_norms, wilson_halfwidth
from .seeding import derive_seed, generator

__all__ = [
    "EmbeddingKind",
    "DENSE",
    "SPARSE",
    "RELU",
    "BINARY",
    "ALL_KINDS",
    "kind_by_name",
    "generate",
    "concentration_table",
    "contrast_table",
    "ScorePair",
    "scores",
    "rrf_score",
    "hadamard_lp",
    "EmbeddingTable",
    "TableCell",
    "DEFAULT_CONCENTRATION_P",
    "DEFAULT_CONTRAST_P",
]

RRF_K = 60


@dataclass(frozen=True)
class EmbeddingKind:
    """One synthetic population; draw parameters are fixed per kind."""

    name: str
    dim: int


DENSE = EmbeddingKind("dense", 384)
SPARSE = EmbeddingKind("sparse", 5000)
RELU = EmbeddingKind("relu", 384)
BINARY = EmbeddingKind("binary", 500)
ALL_KINDS = (DENSE, SPARSE, RELU, BINARY)

_KIND_INDEX = {kind.name: i for i, kind in enumerate(ALL_KINDS)}

DEFAULT_CONCENTRATION_P = (0.01, 0.1, 0.5, 1.0, 2.0, 10.0)
DEFAULT_CONTRAST_P = (0.01, 0.1, 0.5, 1.0, 2.0)


def kind_by_name(name: str) -> EmbeddingKind:
    for kind in ALL_KINDS:
        if kind.name == name:
            return kind
    raise ValueError(f"unknown embedding kind {name!r}; have " + ", ".join(_KIND_INDEX))


def _draw_rows(kind: EmbeddingKind, rng: np.random.Generator, rows: int) -> np.ndarray:
    if kind.name == "dense":
        g = rng.normal(0.0, 0.15, size=(rows, kind.dim))
        norms = np.sqrt(np.sum(g * g, axis=1, keepdims=True))
        return g / norms
    if kind.name == "sparse":
        # both arrays are always drawn so stream consumption is fixed
        mask = rng.random(size=(rows, kind.dim)) < 0.002
        values = rng.exponential(1.0 / 1.5, size=(rows, kind.dim))
        return np.where(mask, values, 0.0)
    if kind.name == "relu":
        return np.maximum(rng.normal(0.0, 0.3, size=(rows, kind.dim)), 0.0)
    if kind.name == "binary":
        return (rng.random(size=(rows, kind.dim)) < 0.1).astype(float)
    raise ValueError(f"unknown embedding kind {kind.name!r}")


def _row_chunks(total_rows: int, dim: int) -> list[tuple[int, int]]:
    per = max(1, CHUNK_TARGET_ENTRIES // dim)
    out = []
    start, index = 0, 0
    while start < total_rows:
        out.append((index, min(per, total_rows - start)))
        start += out[-1][1]
        index += 1
    return out


def generate(kind: EmbeddingKind, M: int, seed: int) -> np.ndarray:
    """M rows of the population; chunk i draws from stream (seed, i)."""
    if M < 1:
        raise ValueError("M must be a positive integer")
    parts = [
        _draw_rows(kind, generator(seed, index), rows) for index, rows in _row_chunks(M, kind.dim)
    ]
    return np.vstack(parts)


@dataclass(frozen=True)
class TableCell:
    kind: str
    p: float
    value: float
    ci_halfwidth: float | None = None
    skipped: int = 0


@dataclass(frozen=True)
class EmbeddingTable:
    label: str
    delta: float | None
    sample_count: int
    seed: int
    cells: tuple[TableCell, ...]

    def cell(self, kind: str, p: float) -> TableCell:
        for item in self.cells:
            if item.kind == kind and math.isclose(item.p, p, rel_tol=1e-12):
                return item
        raise KeyError(f"no cell ({kind}, {p})")

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "delta": self.delta,
            "M": self.sample_count,
            "seed": self.seed,
            "cells": [
                {
                    "kind": c.kind,
                    "p": c.p,
                    "value": c.value,
                    "ci": c.ci_halfwidth,
                    "skipped": c.skipped,
                }
                for c in self.cells
            ],
        }

    def rows(self):
        for c in self.cells:
            yield c.kind, c.p, c.value, c.ci_halfwidth, c.skipped


def concentration_table(
    kinds: Sequence[EmbeddingKind] = ALL_KINDS,
    p_grid: Sequence[float] = DEFAULT_CONCENTRATION_P,
    delta: float = 0.1,
    M: int = 5000,
    seed: int = 0,
) -> EmbeddingTable:
    """Per (kind, p): frequency of the norm ratio inside [1-delta, 1+delta].

    The normalizing mean of |entry|^p is estimated from the same batch,
    pooled over every entry of the kind (three of the four populations have
    atoms at zero, so no analytic mean exists).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    cells: list[TableCell] = []
    lo, hi = math.log1p(-delta), math.log1p(delta)
    for kind in kinds:
        batch = generate(kind, M, derive_seed(seed, _KIND_INDEX[kind.name], 0))
        with np.errstate(divide="ignore"):
            logs = np.log(np.abs(batch))
        for p in p_grid:
            row_lognorm = logsumexp(p * logs, axis=1) / p
            pooled = logsumexp(p * logs) - math.log(batch.size)
            log_ratio = row_lognorm - (math.log(kind.dim) + pooled) / p
            inside = int(np.count_nonzero((log_ratio >= lo) & (log_ratio <= hi)))
            cells.append(
                TableCell(kind.name, float(p), inside / M, wilson_halfwidth(inside, M))
            )
    return EmbeddingTable("concentration", delta, M, seed, tuple(cells))


def contrast_table(
    kinds: Sequence[EmbeddingKind] = ALL_KINDS,
    p_grid: Sequence[float] = DEFAULT_CONTRAST_P,
    pairs: int = 3000,
    seed: int = 0,
) -> EmbeddingTable:
    """Median of |norm(x1) - norm(x2)| / norm(x1) per (kind, p).

    Pairs with a zero first norm are skipped and counted in the cell.
    """
    if pairs < 1:
        raise ValueError("pairs must be a positive integer")
    cells: list[TableCell] = []
    for kind in kinds:
        first = generate(kind, pairs, derive_seed(seed, _KIND_INDEX[kind.name], 1))
        second = generate(kind, pairs, derive_seed(seed, _KIND_INDEX[kind.name], 2))
        for p in p_grid:
            l1 = log_lp_norms(first, p)
            l2 = log_lp_norms(second, p)
            valid = l1 > -math.inf
            with np.errstate(over="ignore", invalid="ignore"):
                rc = np.abs(np.expm1(l2[valid] - l1[valid]))
            skipped = int(pairs - valid.sum())
            value = float(np.median(rc)) if rc.size else math.nan
            cells.append(TableCell(kind.name, float(p), value, None, skipped))
    return EmbeddingTable("median-contrast", None, pairs, seed, tuple(cells))


@dataclass(frozen=True)
class ScorePair:
    """The four retrieval scores for one query/document pair."""

    dense_score: float
    sparse_score: float
    hybrid_score: float
    rrf_score: float
    dense_zero_flag: bool


def rrf_score(ranks: Sequence[int], k: int = RRF_K) -> float:
    """Reciprocal-rank fusion over 1-based ranks: sum of 1/(k + rank)."""
    if not ranks:
        raise ValueError("ranks must be nonempty")
    if any(r < 1 or int(r) != r for r in ranks):
        raise ValueError("ranks are 1-based integers")
    return math.fsum(1.0 / (k + r) for r in ranks)


def scores(
    query: np.ndarray,
    doc: np.ndarray,
    alpha: float = 0.5,
    ranks: Sequence[int] = (1, 1),
) -> ScorePair:
    """Cosine, dot, alpha-mix, and RRF for one pair.

    The hybrid mix combines the two scores as computed here; any rescaling
    convention is the caller's.  ranks feed the RRF term (1-based, default
    both lists rank the document first).
    """
    q = np.asarray(query, dtype=float)
    d = np.asarray(doc, dtype=float)
    if q.shape != d.shape or q.ndim != 1:
        raise ValueError("query and doc must be vectors of the same length")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    nq = math.sqrt(float(q @ q))
    nd = math.sqrt(float(d @ d))
    zero = nq == 0.0 or nd == 0.0
    dense = 0.0 if zero else float(q @ d) / (nq * nd)
    # product-then-sum, the same kernel hadamard_lp uses at p = 1, so the
    # two agree bit for bit
    sparse = float(np.sum(q * d))
    hybrid = alpha * dense + (1.0 - alpha) * sparse
    return ScorePair(
        dense_score=dense,
        sparse_score=sparse,
        hybrid_score=hybrid,
        rrf_score=rrf_score(ranks),
        dense_zero_flag=zero,
    )


def hadamard_lp(wq: np.ndarray, wd: np.ndarray, p: float) -> tuple[float, int]:
    """Powered sum and support overlap of the elementwise product.

    Returns (sum of z_j^p, count of z_j > 0) for z = wq * wd; as p drops to
    zero the first component approaches the second.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    q = np.asarray(wq, dtype=float)
    d = np.asarray(wd, dtype=float)
    if q.shape != d.shape or q.ndim != 1:
        raise ValueError("weight vectors must share one dimension")
    if (q < 0).any() or (d < 0).any():
        raise ValueError("weights must be nonnegative")
    z = q * d
    powered = z if p == 1.0 else z**p
    return float(np.sum(powered)), int(np.count_nonzero(z > 0))
