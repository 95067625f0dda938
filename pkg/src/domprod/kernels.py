"""Exact integer matrix-product kernels.

Three engines compute counting products of 0/1 (or small integer) matrices:
numpy's integer matmul ("naive", cubic), word-packed AND + popcount
("bitpack"), and Strassen recursion over integers ("strassen"). All of them
return int64 results; the naive and Strassen paths also run on object arrays
of Python ints, which the encoded distance products rely on.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

WORD = 64
DEFAULT_STRASSEN_THRESHOLD = 128
_INT64_LIMIT = 2**63 - 1

_threads = None


def set_threads(n):
    """Parallelism hint for kernels that split output rows (``None`` = machine default)."""
    global _threads
    if n is not None and n < 1:
        raise ValueError("threads must be >= 1")
    _threads = n


def get_threads():
    if _threads is not None:
        return _threads
    env = os.environ.get("DOMPROD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class KernelChoice:
    name: str = "bitpack"
    threshold: int = DEFAULT_STRASSEN_THRESHOLD

    def __post_init__(self):
        if self.name not in ("naive", "bitpack", "strassen"):
            raise ValueError(f"unknown kernel {self.name!r}")
        if self.name == "strassen" and self.threshold < 16:
            raise ValueError("strassen threshold must be >= 16")

    @property
    def effective_exponent(self) -> float:
        # bitpack only buys a word-size constant factor, not a better exponent
        return 2.807 if self.name == "strassen" else 3.0

    @classmethod
    def parse(cls, spec: "str | KernelChoice") -> "KernelChoice":
        """``naive``, ``bitpack``, ``strassen`` or ``strassen:<threshold>``."""
        if isinstance(spec, KernelChoice):
            return spec
        name, _, thr = spec.partition(":")
        if thr:
            if name != "strassen":
                raise ValueError(f"only strassen takes a threshold, got {spec!r}")
            return cls(name, int(thr))
        return cls(name)


NAIVE = KernelChoice("naive")
BITPACK = KernelChoice("bitpack")
STRASSEN = KernelChoice("strassen")


@dataclass(frozen=True)
class BitMatrix:
    """Row-packed 0/1 matrix: ``words[i, w]`` holds columns 64w..64w+63 of row i
    (bit b of the word is column 64w+b). Padding bits are zero."""

    rows: int
    cols: int
    words: np.ndarray

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("expected a 2-d 0/1 matrix")
        rows, cols = dense.shape
        if dense.size and not np.all((dense == 0) | (dense == 1)):
            raise ValueError("BitMatrix entries must be 0 or 1")
        nwords = max(1, -(-cols // WORD))
        packed = np.packbits(dense.astype(bool), axis=1, bitorder="little")
        buf = np.zeros((rows, nwords * 8), dtype=np.uint8)
        buf[:, : packed.shape[1]] = packed
        words = buf.view("<u8").astype(np.uint64, copy=False)
        return cls(rows, cols, words)

    def to_dense(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.cols].astype(np.int64)

    @property
    def shape(self):
        return (self.rows, self.cols)


def _check_count_width(k, max_a=1, max_b=1):
    # int64 accumulation: every entry is a sum of k products
    if k * max_a * max_b > _INT64_LIMIT:
        raise OverflowError(f"count product of inner dimension {k} overflows int64")


def _bitpack_rows(aw, bw, lo, hi, out):
    for i in range(lo, hi):
        out[i] = np.bitwise_count(bw & aw[i]).sum(axis=1, dtype=np.int64)


def _bitpack_product(a: BitMatrix, b: BitMatrix) -> np.ndarray:
    out = np.zeros((a.rows, b.rows), dtype=np.int64)
    if a.rows == 0 or b.rows == 0:
        return out
    threads = min(get_threads(), a.rows)
    if threads <= 1:
        _bitpack_rows(a.words, b.words, 0, a.rows, out)
        return out
    bounds = np.linspace(0, a.rows, threads + 1).astype(int)
    with ThreadPoolExecutor(threads) as pool:
        # disjoint output rows, so the result does not depend on scheduling
        futs = [pool.submit(_bitpack_rows, a.words, b.words, lo, hi, out)
                for lo, hi in zip(bounds[:-1], bounds[1:])]
        for f in futs:
            f.result()
    return out


def count_product(a, b, kernel: "KernelChoice | str" = BITPACK) -> np.ndarray:
    """A . B^T for 0/1 matrices sharing their column count K; exact int64 counts."""
    kernel = KernelChoice.parse(kernel)
    a = a if isinstance(a, BitMatrix) else BitMatrix.from_dense(a)
    b = b if isinstance(b, BitMatrix) else BitMatrix.from_dense(b)
    if a.cols != b.cols:
        raise ValueError(f"column mismatch: {a.cols} vs {b.cols}")
    _check_count_width(a.cols)
    if kernel.name == "bitpack":
        return _bitpack_product(a, b)
    da, db = a.to_dense(), b.to_dense()
    if kernel.name == "naive":
        return da @ db.T
    return rect_via_square(da, db.T, kernel)


def naive_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} x {b.shape}")
    if a.dtype != object and b.dtype != object:
        max_a = int(np.abs(a).max()) if a.size else 0
        max_b = int(np.abs(b).max()) if b.size else 0
        _check_count_width(a.shape[1], max_a, max_b)
    return a.dot(b)


def _pad_to(m: np.ndarray, rows: int, cols: int) -> np.ndarray:
    if m.shape == (rows, cols):
        return m
    out = np.zeros((rows, cols), dtype=m.dtype)
    out[: m.shape[0], : m.shape[1]] = m
    return out


def _strassen(a, b, threshold):
    n = a.shape[0]
    if n <= threshold:
        return a.dot(b)
    if n % 2:
        a = _pad_to(a, n + 1, n + 1)
        b = _pad_to(b, n + 1, n + 1)
    h = a.shape[0] // 2
    a11, a12, a21, a22 = a[:h, :h], a[:h, h:], a[h:, :h], a[h:, h:]
    b11, b12, b21, b22 = b[:h, :h], b[:h, h:], b[h:, :h], b[h:, h:]

    m1 = _strassen(a11 + a22, b11 + b22, threshold)
    m2 = _strassen(a21 + a22, b11, threshold)
    m3 = _strassen(a11, b12 - b22, threshold)
    m4 = _strassen(a22, b21 - b11, threshold)
    m5 = _strassen(a11 + a12, b22, threshold)
    m6 = _strassen(a21 - a11, b11 + b12, threshold)
    m7 = _strassen(a12 - a22, b21 + b22, threshold)

    c = np.empty((2 * h, 2 * h), dtype=m1.dtype)
    c[:h, :h] = m1 + m4 - m5 + m7
    c[:h, h:] = m3 + m5
    c[h:, :h] = m2 + m4
    c[h:, h:] = m1 - m2 + m3 + m6
    return c[:n, :n]


def strassen_square(a, b, threshold: int = DEFAULT_STRASSEN_THRESHOLD) -> np.ndarray:
    """Exact square product by Strassen recursion, naive below ``threshold``.

    Odd sizes are padded by one zero row/column per level. int64 inputs are
    checked up front against the worst-case growth of the recursion's
    operand sums; object arrays (Python ints) cannot overflow.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"strassen_square needs equal square operands, got {a.shape}, {b.shape}")
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.result_type(a, b))
    if a.dtype != object and b.dtype != object:
        a = a.astype(np.int64, copy=False)
        b = b.astype(np.int64, copy=False)
        levels, size = 0, n
        while size > threshold:
            size = (size + 1) // 2
            levels += 1
        max_a = int(np.abs(a).max())
        max_b = int(np.abs(b).max())
        # each level at most doubles operand magnitudes; products then sum over n
        _check_count_width(n * 4**levels, max_a, max_b)
    return _strassen(a, b, threshold)


def rect_via_square(a, b, kernel: "KernelChoice | str" = NAIVE) -> np.ndarray:
    """Product of a p x K and a K x q matrix as a sum of square chunk products.

    K is cut into ceil(K / w) slices of width w = max(p, q), the last one zero
    padded; each slice pair is multiplied with ``kernel`` and the partial
    products are added in slice order. The bitpack kernel needs 0/1 entries.
    """
    kernel = KernelChoice.parse(kernel)
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} x {b.shape}")
    p, k = a.shape
    q = b.shape[1]
    if k < 1:
        raise ValueError("inner dimension must be >= 1")
    w = max(p, q)
    dtype = object if object in (a.dtype, b.dtype) else np.int64
    if dtype is not object and kernel.name != "bitpack":
        max_a = int(np.abs(a).max()) if a.size else 0
        max_b = int(np.abs(b).max()) if b.size else 0
        _check_count_width(k, max_a, max_b)
    total = np.zeros((w, w), dtype=dtype)
    for lo in range(0, k, w):
        hi = min(lo + w, k)
        sa = _pad_to(a[:, lo:hi].astype(dtype, copy=False), w, w)
        sb = _pad_to(b[lo:hi, :].astype(dtype, copy=False), w, w)
        if kernel.name == "bitpack":
            if dtype is object:
                raise ValueError("bitpack kernel needs 0/1 integer operands")
            part = count_product(BitMatrix.from_dense(sa), BitMatrix.from_dense(sb.T), kernel)
        elif kernel.name == "strassen":
            part = strassen_square(sa, sb, kernel.threshold)
        else:
            part = sa.dot(sb)
        total += part
    return total[:p, :q]
