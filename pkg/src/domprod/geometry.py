"""Point sets, L-infinity distance, rank tables and the point-file format."""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

# int64 headroom: coordinates, shifted copies (p + 2M + 1) and differences must fit.
MAX_INT_BOUND = 2**61

DISTRIBUTIONS = ("uniform-real", "integer-grid", "clustered")


class PointFileError(ValueError):
    """Malformed point file; ``lineno`` is 1-based (0 when not line specific)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


@dataclass(frozen=True)
class PointSet:
    """n points in d dimensions over a real or bounded-integer domain.

    ``coords`` is a read-only (n, d) array: float64 for ``domain == "real"``,
    int64 for ``domain == "int"`` with every entry in [-bound, bound].
    """

    coords: np.ndarray
    domain: str = "real"
    bound: Optional[int] = None

    def __post_init__(self):
        if self.domain not in ("real", "int"):
            raise ValueError(f"unknown domain {self.domain!r}")
        raw = np.asarray(self.coords)
        if raw.ndim != 2:
            raise ValueError("coords must be a 2-d array")
        n, d = raw.shape
        if n < 1 or d < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
        if self.domain == "real":
            arr = np.array(raw, dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise ValueError("coordinates must be finite")
            if self.bound is not None:
                raise ValueError("real domain takes no bound")
        else:
            if self.bound is None or self.bound < 0 or self.bound > MAX_INT_BOUND:
                raise ValueError(f"integer domain needs 0 <= M <= 2**61, got {self.bound}")
            if raw.dtype.kind == "f":
                if not np.all(np.isfinite(raw)) or np.any(raw != np.round(raw)):
                    raise ValueError("integer domain requires integral coordinates")
            elif raw.dtype.kind not in "iu":
                raise ValueError("integer domain requires integral coordinates")
            arr = np.array(raw, dtype=np.int64)
            if arr.size and int(np.abs(arr).max()) > self.bound:
                raise ValueError(f"coordinate outside [-{self.bound}, {self.bound}]")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def is_integer(self) -> bool:
        return self.domain == "int"

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.bound == other.bound
            and self.coords.shape == other.coords.shape
            and bool(np.array_equal(self.coords, other.coords))
        )

    __hash__ = None


@dataclass(frozen=True)
class RankTable:
    """Per-coordinate sorted orders.

    ``perm[k, t]`` is the index of the point at position t when sorting by
    coordinate k; ``rank[k, i]`` is the position of point i. Ties go to the
    smaller point index.
    """

    perm: np.ndarray
    rank: np.ndarray

    @property
    def d(self) -> int:
        return self.perm.shape[0]

    @property
    def n(self) -> int:
        return self.perm.shape[1]


@dataclass(frozen=True, order=True)
class PairDistance:
    i: int
    j: int
    dist: Union[int, float]

    def __post_init__(self):
        if not self.i < self.j:
            raise ValueError(f"pair must satisfy i < j, got ({self.i}, {self.j})")
        if self.dist < 0:
            raise ValueError("distance must be nonnegative")


def linf_distance(p, q):
    p = np.asarray(p)
    q = np.asarray(q)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    if p.size == 0:
        return 0
    dist = np.abs(p - q).max()
    return int(dist) if dist.dtype.kind in "iu" else float(dist)


def build_rank_tables(points: Union[PointSet, np.ndarray]) -> RankTable:
    coords = points.coords if isinstance(points, PointSet) else np.asarray(points)
    # stable sort of each column == (value, index) key
    perm = np.argsort(coords.T, axis=1, kind="stable")
    n = coords.shape[0]
    rank = np.empty_like(perm)
    np.put_along_axis(rank, perm, np.broadcast_to(np.arange(n), perm.shape), axis=1)
    return RankTable(perm=perm, rank=rank)


def generate_points(n: int, d: int, distribution: str = "uniform-real", seed: int = 0,
                    bound: Optional[int] = None) -> PointSet:
    """Deterministic random point set (numpy PCG64 seeded with ``seed``).

    ``integer-grid`` draws integers uniformly from [-bound, bound]; ``clustered``
    scatters points tightly around a handful of uniform centres.
    """
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if distribution not in DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {distribution!r}")
    rng = np.random.default_rng(seed)
    if distribution == "integer-grid":
        if bound is None or bound < 0 or bound > MAX_INT_BOUND:
            raise ValueError("integer-grid requires 0 <= M <= 2**61")
        coords = rng.integers(-bound, bound, size=(n, d), endpoint=True, dtype=np.int64)
        return PointSet(coords, "int", bound)
    if distribution == "uniform-real":
        return PointSet(rng.uniform(-1.0, 1.0, size=(n, d)))
    n_centres = max(1, int(np.sqrt(n)) // 2)
    centres = rng.uniform(-1.0, 1.0, size=(n_centres, d))
    labels = rng.integers(0, n_centres, size=n)
    return PointSet(centres[labels] + rng.normal(0.0, 0.01, size=(n, d)))


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise PointFileError(f"not an integer: {token!r}", lineno) from None


def parse_points(text: Union[bytes, str]) -> PointSet:
    """Parse the text point format.

    Header ``n d real`` or ``n d int M``, then n rows of d numbers. Blank lines
    and anything after ``#`` are ignored.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise PointFileError(f"not UTF-8: {exc}") from None
    rows = []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        tokens = line.split("#", 1)[0].split()
        if tokens:
            rows.append((lineno, tokens))
    if not rows:
        raise PointFileError("missing header")
    hline, header = rows[0]
    if len(header) < 3:
        raise PointFileError("header must be 'n d real' or 'n d int M'", hline)
    n = _parse_int(header[0], hline)
    d = _parse_int(header[1], hline)
    if n < 1 or d < 1:
        raise PointFileError(f"need n >= 1 and d >= 1, got n={n}, d={d}", hline)
    kind = header[2]
    if kind == "real" and len(header) == 3:
        bound = None
    elif kind == "int" and len(header) == 4:
        bound = _parse_int(header[3], hline)
        if bound < 0 or bound > MAX_INT_BOUND:
            raise PointFileError(f"bound M={bound} outside [0, 2**61]", hline)
    else:
        raise PointFileError("header must be 'n d real' or 'n d int M'", hline)

    body = rows[1:]
    if len(body) != n:
        where = body[n][0] if len(body) > n else (body[-1][0] if body else hline)
        raise PointFileError(f"expected {n} point rows, found {len(body)}", where)

    if bound is None:
        coords = np.empty((n, d), dtype=np.float64)
    else:
        coords = np.empty((n, d), dtype=np.int64)
    for r, (lineno, tokens) in enumerate(body):
        if len(tokens) != d:
            raise PointFileError(f"expected {d} coordinates, found {len(tokens)}", lineno)
        for c, tok in enumerate(tokens):
            if bound is None:
                try:
                    v = float(tok)
                except ValueError:
                    raise PointFileError(f"not a number: {tok!r}", lineno) from None
                if not np.isfinite(v):
                    raise PointFileError(f"non-finite coordinate {tok!r}", lineno)
            else:
                v = _parse_int(tok, lineno)
                if abs(v) > bound:
                    raise PointFileError(f"coordinate {v} outside [-{bound}, {bound}]", lineno)
            coords[r, c] = v
    return PointSet(coords, "real" if bound is None else "int", bound)


def write_points(points: PointSet) -> str:
    if points.is_integer:
        lines = [f"{points.n} {points.d} int {points.bound}"]
        lines += [" ".join(str(int(v)) for v in row) for row in points.coords]
    else:
        # repr() is the shortest string that round-trips a float64
        lines = [f"{points.n} {points.d} real"]
        lines += [" ".join(repr(float(v)) for v in row) for row in points.coords]
    return "\n".join(lines) + "\n"
