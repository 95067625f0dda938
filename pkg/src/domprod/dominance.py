"""Dominance products: the O(dn^2) oracle and the rank-blocked algorithm.

The blocked algorithm groups each coordinate's sorted order into blocks of s
consecutive ranks. Cross-block dominances come from one big 0/1 matrix
product; same-block ones from a short backward scan over each block. Both
halves work on the tie-broken total order (value, index), and an explicit
correction over runs of equal values turns that into <=, < or == counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exponents import block_size_exponent
from .geometry import PointSet, build_rank_tables
from .kernels import BITPACK, KernelChoice, rect_via_square

MODES = ("LE", "LT", "EQ")
MAX_D = 2**31 - 1

# cap on the (pred, succ) index pairs buffered before one bincount
_SCAN_BATCH = 1 << 22


@dataclass(frozen=True)
class BlockPlan:
    s: int
    n: int
    d: int

    def __post_init__(self):
        if not 1 <= self.s <= max(self.n, 1):
            raise ValueError(f"block size s={self.s} outside [1, {self.n}]")

    @property
    def blocks(self) -> int:
        return -(-self.n // self.s)

    @property
    def K(self) -> int:
        return self.d * self.blocks


def choose_block_size(n: int, d: int, kernel: "KernelChoice | str" = BITPACK) -> BlockPlan:
    kernel = KernelChoice.parse(kernel)
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    s = round(n ** block_size_exponent(kernel.effective_exponent))
    return BlockPlan(min(max(s, 1), n), n, d)


def _coords(points) -> np.ndarray:
    coords = points.coords if isinstance(points, PointSet) else np.asarray(points)
    if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
        raise ValueError("expected an (n, d) coordinate array with n, d >= 1")
    if coords.shape[1] > MAX_D:
        raise ValueError(f"d={coords.shape[1]} exceeds {MAX_D}")
    return coords


def _check_mode(mode: str) -> str:
    mode = mode.upper()
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return mode


def dominance_naive(points: Union[PointSet, np.ndarray], mode: str = "LE") -> np.ndarray:
    """D[i, j] = #{k : p_i[k] <= p_j[k]} (LT: <, EQ: ==), by direct comparison."""
    coords = _coords(points)
    mode = _check_mode(mode)
    op = {"LE": np.less_equal, "LT": np.less, "EQ": np.equal}[mode]
    n = coords.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for col in coords.T:
        out += op(col[:, None], col[None, :])
    return out


def _pair_counts(pred: list, succ: list, n: int) -> np.ndarray:
    if not pred:
        return np.zeros((n, n), dtype=np.int64)
    flat = np.concatenate(pred) * n + np.concatenate(succ)
    return np.bincount(flat, minlength=n * n).reshape(n, n).astype(np.int64)


def _accumulate(pairs_by_offset, n: int) -> np.ndarray:
    """Sum a stream of (pred, succ) index arrays into an n x n count matrix."""
    out = np.zeros((n, n), dtype=np.int64)
    pred, succ, buffered = [], [], 0
    for p, q in pairs_by_offset:
        pred.append(p)
        succ.append(q)
        buffered += p.size
        if buffered >= _SCAN_BATCH:
            out += _pair_counts(pred, succ, n)
            pred, succ, buffered = [], [], 0
    out += _pair_counts(pred, succ, n)
    return out


def _same_block_pairs(perm: np.ndarray, s: int):
    """For each offset t < s: (point at position q - t, point at position q) in every
    coordinate, where both positions share the block floor(q / s)."""
    n = perm.shape[1]
    pos = np.arange(n)
    for t in range(1, min(s, n)):
        q = pos[t:]
        keep = (q - t) // s == q // s
        if not keep.any():
            continue
        q = q[keep]
        yield perm[:, q - t].ravel(), perm[:, q].ravel()


def _equal_run_pairs(perm: np.ndarray, sorted_vals: np.ndarray):
    """(earlier, later) point pairs inside every maximal run of equal values."""
    n = perm.shape[1]
    for t in range(1, n):
        eq = sorted_vals[:, t:] == sorted_vals[:, :-t]
        if not eq.any():
            # runs are contiguous: no pair at distance t means none further apart
            break
        kk, q = np.nonzero(eq)
        yield perm[kk, q], perm[kk, q + t]


def dominance_blocked(points: Union[PointSet, np.ndarray], plan: "BlockPlan | int | str | None" = "auto",
                      kernel: "KernelChoice | str" = BITPACK, mode: str = "LE") -> np.ndarray:
    """Dominance matrix via rank blocking; equals :func:`dominance_naive` exactly.

    ``plan`` is a :class:`BlockPlan`, an explicit block size s, or ``"auto"``.
    """
    coords = _coords(points)
    mode = _check_mode(mode)
    kernel = KernelChoice.parse(kernel)
    n, d = coords.shape
    if plan is None or (isinstance(plan, str) and plan == "auto"):
        plan = choose_block_size(n, d, kernel)
    elif not isinstance(plan, BlockPlan):
        plan = BlockPlan(int(plan), n, d)
    s = plan.s
    if not 1 <= s <= n:
        raise ValueError(f"block size s={s} outside [1, {n}]")

    ranks = build_rank_tables(coords)
    perm, rank = ranks.perm, ranks.rank
    block = rank // s                     # (d, n)
    nb = -(-n // s)

    # cross-block part: column b*d + k of the concatenated layout is coordinate k of block b
    if nb > 1:
        b_idx = np.arange(nb)[:, None, None]
        blk = block.T[None, :, :]         # (1, n, d)
        a_cat = (blk == b_idx).transpose(1, 0, 2).reshape(n, nb * d)
        b_cat = (blk > b_idx).transpose(1, 0, 2).reshape(n, nb * d)
        cross = rect_via_square(a_cat.view(np.uint8), b_cat.view(np.uint8).T, kernel)
    else:
        cross = np.zeros((n, n), dtype=np.int64)

    # same-block part: E[pred, i] += 1 for each earlier point in i's block
    strict_before = cross + _accumulate(_same_block_pairs(perm, s), n)

    sorted_vals = np.take_along_axis(coords.T, perm, axis=1)
    eq_before = _accumulate(_equal_run_pairs(perm, sorted_vals), n)

    if mode == "LE":
        out = strict_before + eq_before.T
        out[np.diag_indices(n)] += d
    elif mode == "LT":
        out = strict_before - eq_before
    else:
        out = eq_before + eq_before.T
        out[np.diag_indices(n)] += d
    return out


def dominance_product(points, mode: str = "LE", algo: str = "blocked", plan="auto",
                      kernel: "KernelChoice | str" = BITPACK) -> np.ndarray:
    if algo == "naive":
        return dominance_naive(points, mode)
    if algo == "blocked":
        return dominance_blocked(points, plan, kernel, mode)
    raise ValueError(f"unknown algorithm {algo!r}")


def predicted_cost(n: int, d: int, kernel: "KernelChoice | str" = BITPACK) -> float:
    """Rough operation count for dominance_blocked with the auto plan."""
    kernel = KernelChoice.parse(kernel)
    plan = choose_block_size(n, d, kernel)
    chunks = math.ceil(plan.K / n) if plan.blocks > 1 else 0
    return chunks * n ** kernel.effective_exponent + n * d * plan.s
