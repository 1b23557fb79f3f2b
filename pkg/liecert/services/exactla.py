"""Exact sparse linear algebra over the rationals, plus modular rank certificates

Exact work is fraction-free: rows are kept as primitive integer dictionaries
and only normalized to Fractions when a canonical reduced echelon form is
read off. Modular ranks use dense numpy elimination over word-sized primes.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union
import enum
import logging
import random

import numpy as np
from sympy import nextprime

logger = logging.getLogger(__name__)

Vec = Dict[int, Fraction]
Row = Tuple[Tuple[int, Fraction], ...]

PRIME_LOW = 2 ** 30
PRIME_HIGH = 2 ** 31
_ROW_CHUNK = 1024


# ---------------------------------------------------------------------------
# Sparse matrices


@dataclass(frozen=True)
class SparseMat:
    """Immutable row-major sparse rational matrix"""
    rows: int
    cols: int
    data: Tuple[Row, ...]

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[Tuple[int, int, object]]) -> "SparseMat":
        buckets: List[Dict[int, Fraction]] = [{} for _ in range(rows)]
        for r, c, value in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValueError(f"Entry ({r}, {c}) outside a {rows}x{cols} matrix")
            if c in buckets[r]:
                raise ValueError(f"Duplicate entry at ({r}, {c})")
            buckets[r][c] = Fraction(value)
        return cls(rows, cols, tuple(_as_row(b) for b in buckets))

    @classmethod
    def from_rows(cls, cols: int, rows: Sequence[Mapping[int, object]]) -> "SparseMat":
        data = []
        for r, row in enumerate(rows):
            for c in row:
                if not 0 <= c < cols:
                    raise ValueError(f"Row {r} has column {c} outside [0, {cols})")
            data.append(_as_row(row))
        return cls(len(data), cols, tuple(data))

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]]) -> "SparseMat":
        return cls.from_rows(rows, columns).transpose()

    @classmethod
    def from_dense(cls, matrix: Sequence[Sequence[object]]) -> "SparseMat":
        cols = len(matrix[0]) if matrix else 0
        return cls.from_rows(cols, [{c: v for c, v in enumerate(row) if v} for row in matrix])

    @classmethod
    def identity(cls, n: int) -> "SparseMat":
        return cls(n, n, tuple(((i, Fraction(1)),) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMat":
        return cls(rows, cols, tuple(() for _ in range(rows)))

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self.data)

    def entries(self) -> Iterator[Tuple[int, int, Fraction]]:
        for r, row in enumerate(self.data):
            for c, value in row:
                yield r, c, value

    def row(self, i: int) -> Vec:
        return dict(self.data[i])

    def matvec(self, v: Mapping[int, object]) -> Vec:
        out: Vec = {}
        for r, row in enumerate(self.data):
            total = Fraction(0)
            for c, value in row:
                x = v.get(c)
                if x:
                    total += value * x
            if total:
                out[r] = total
        return out

    def transpose(self) -> "SparseMat":
        columns: List[List[Tuple[int, Fraction]]] = [[] for _ in range(self.cols)]
        for r, row in enumerate(self.data):
            for c, value in row:
                columns[c].append((r, value))
        return SparseMat(self.cols, self.rows, tuple(tuple(col) for col in columns))

    def to_dense(self) -> List[List[Fraction]]:
        dense = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for r, c, value in self.entries():
            dense[r][c] = value
        return dense


def _as_row(mapping: Mapping[int, object]) -> Row:
    return tuple(sorted((c, Fraction(v)) for c, v in mapping.items() if v))


# ---------------------------------------------------------------------------
# Fraction-free echelon forms


def _integral(row: Mapping[int, object]) -> Dict[int, int]:
    """Scale a rational row to a primitive integer row"""
    values = {c: Fraction(v) for c, v in row.items() if v}
    if not values:
        return {}
    scale = 1
    for v in values.values():
        scale = lcm(scale, v.denominator)
    return _primitive({c: int(v * scale) for c, v in values.items()})


def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


class ExactEchelon:
    """Incremental fraction-free row echelon form of integer rows"""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._pivots: Dict[int, Dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(sorted(self._pivots))

    def reduce(self, row: Mapping[int, object]) -> Dict[int, int]:
        """Residue of row against the stored pivots (primitive integer row)"""
        r = _integral(row)
        last = -1
        while r:
            candidates = [c for c in r if c > last and c in self._pivots]
            if not candidates:
                break
            last = min(candidates)
            pivot_row = self._pivots[last]
            a, b = pivot_row[last], r[last]
            g = gcd(a, b)
            a, b = a // g, b // g
            combined = {c: a * v for c, v in r.items()}
            for c, v in pivot_row.items():
                value = combined.get(c, 0) - b * v
                if value:
                    combined[c] = value
                else:
                    combined.pop(c, None)
            r = _primitive(combined)
        return r

    def add(self, row: Mapping[int, object]) -> bool:
        """Insert a row; returns True when it was independent of the stored rows"""
        residue = self.reduce(row)
        if not residue:
            return False
        self._pivots[min(residue)] = residue
        return True

    def add_rows(self, rows: Iterable[Mapping[int, object]]) -> int:
        """Insert rows sparsest first; returns the new rank"""
        for row in sorted(rows, key=len):
            self.add(row)
        return self.rank

    def rref(self) -> Tuple[Row, ...]:
        """Canonical reduced row echelon form with Fraction entries"""
        reduced: Dict[int, Dict[int, int]] = {}
        for lead in sorted(self._pivots, reverse=True):
            r = dict(self._pivots[lead])
            for c in sorted(c for c in r if c != lead and c in reduced):
                if c not in r:
                    continue
                other = reduced[c]
                a, b = other[c], r[c]
                g = gcd(a, b)
                a, b = a // g, b // g
                combined = {k: a * v for k, v in r.items()}
                for k, v in other.items():
                    value = combined.get(k, 0) - b * v
                    if value:
                        combined[k] = value
                    else:
                        combined.pop(k, None)
                r = combined
            reduced[lead] = _primitive(r)
        rows = []
        for lead in sorted(reduced):
            r = reduced[lead]
            head = r[lead]
            rows.append(tuple((c, Fraction(r[c], head)) for c in sorted(r)))
        return tuple(rows)


# ---------------------------------------------------------------------------
# Subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient_dim held in canonical reduced echelon form"""
    ambient_dim: int
    basis_rref: Tuple[Row, ...]

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Mapping[int, object]]) -> "Subspace":
        echelon = ExactEchelon(ambient_dim)
        vectors = list(vectors)
        for v in vectors:
            for c in v:
                if not 0 <= c < ambient_dim:
                    raise ValueError(f"Coordinate {c} outside ambient dimension {ambient_dim}")
        echelon.add_rows(vectors)
        return cls(ambient_dim, echelon.rref())

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(((i, Fraction(1)),) for i in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis_rref)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(row[0][0] for row in self.basis_rref)

    @cached_property
    def _rows_by_pivot(self) -> Dict[int, Row]:
        return {row[0][0]: row for row in self.basis_rref}

    def vectors(self) -> List[Vec]:
        return [dict(row) for row in self.basis_rref]

    def reduce(self, v: Mapping[int, object]) -> Vec:
        """v minus its projection along the pivot coordinates; zero iff v is in the subspace"""
        out: Vec = {c: Fraction(x) for c, x in v.items() if x}
        for p, row in self._rows_by_pivot.items():
            coefficient = v.get(p)
            if not coefficient:
                continue
            for c, value in row:
                updated = out.get(c, 0) - coefficient * value
                if updated:
                    out[c] = updated
                else:
                    out.pop(c, None)
        return out

    def contains(self, other: Union["Subspace", Mapping[int, object]]) -> bool:
        if isinstance(other, Subspace):
            _check_ambient(self, other)
            return all(not self.reduce(v) for v in other.vectors())
        return not self.reduce(other)

    def coordinates(self, v: Mapping[int, object]) -> List[Fraction]:
        """Coefficients of v on basis_rref; v must lie in the subspace"""
        if self.reduce(v):
            raise ValueError("Vector is not in the subspace")
        return [Fraction(v.get(p, 0)) for p in self.pivots]

    def to_dense(self) -> List[List[Fraction]]:
        dense = []
        for row in self.basis_rref:
            line = [Fraction(0)] * self.ambient_dim
            for c, value in row:
                line[c] = value
            dense.append(line)
        return dense


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"Ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def kernel_vectors(ncols: int, rref: Sequence[Row]) -> List[Vec]:
    pivots = {row[0][0]: row for row in rref}
    by_free: Dict[int, Vec] = {c: {c: Fraction(1)} for c in range(ncols) if c not in pivots}
    for p, row in pivots.items():
        for c, value in row[1:]:
            by_free[c][p] = -value
    return [by_free[c] for c in sorted(by_free)]


def kernel(m: SparseMat) -> Subspace:
    echelon = ExactEchelon(m.cols)
    echelon.add_rows(dict(row) for row in m.data)
    return Subspace.span(m.cols, kernel_vectors(m.cols, echelon.rref()))


def image(m: SparseMat) -> Subspace:
    return Subspace.span(m.rows, (dict(col) for col in m.transpose().data))


def rank(m: SparseMat) -> int:
    echelon = ExactEchelon(m.cols)
    return echelon.add_rows(dict(row) for row in m.data)


def annihilator(a: Subspace) -> Subspace:
    """Linear equations cutting out a, as a subspace of the dual coordinates"""
    return Subspace.span(a.ambient_dim, kernel_vectors(a.ambient_dim, a.basis_rref))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    equations = annihilator(a).vectors() + annihilator(b).vectors()
    return kernel(SparseMat.from_rows(a.ambient_dim, equations))


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    return Subspace.span(a.ambient_dim, a.vectors() + b.vectors())


def contains(a: Subspace, other: Union[Subspace, Mapping[int, object]]) -> bool:
    return a.contains(other)


def inverse(matrix: Sequence[Sequence[object]]) -> List[List[Fraction]]:
    """Gauss-Jordan inverse of a square rational matrix"""
    n = len(matrix)
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if work[r][c]), None)
        if pivot is None:
            raise ValueError("Matrix is singular")
        work[c], work[pivot] = work[pivot], work[c]
        head = work[c][c]
        work[c] = [x / head for x in work[c]]
        for r in range(n):
            if r != c and work[r][c]:
                factor = work[r][c]
                work[r] = [x - factor * y for x, y in zip(work[r], work[c])]
    return [row[n:] for row in work]


# ---------------------------------------------------------------------------
# Modular ranks


def draw_primes(count: int, seed: int) -> List[int]:
    """Distinct pseudo-random primes in [2^30, 2^31), reproducible from seed"""
    rng = random.Random(seed)
    primes: List[int] = []
    while len(primes) < count:
        p = int(nextprime(rng.randrange(PRIME_LOW, PRIME_HIGH - 2 ** 20)))
        if p < PRIME_HIGH and p not in primes:
            primes.append(p)
    return primes


def residue(x: Fraction, p: int) -> int:
    den = x.denominator % p
    if den == 0:
        raise ZeroDivisionError(f"prime {p} divides denominator {x.denominator}")
    return x.numerator * pow(den, -1, p) % p


def residue_matrix(rows: Sequence[Mapping[int, Fraction]], width: int, p: int) -> np.ndarray:
    out = np.zeros((len(rows), width), dtype=np.int64)
    for r, row in enumerate(rows):
        for c, x in row.items():
            out[r, c] = residue(x, p)
    return out


def _matmul_mod(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """x @ y mod p for residues below 2^31 without int64 overflow"""
    if x.shape[1] == 0:
        return np.zeros((x.shape[0], y.shape[1]), dtype=np.int64)
    out = np.zeros((x.shape[0], y.shape[1]), dtype=np.int64)
    step = 1 << 15
    for start in range(0, x.shape[1], step):
        xs = x[:, start:start + step]
        ys = y[start:start + step]
        low = xs & 0xFFFF
        high = xs >> 16
        part = ((high @ ys) % p) * 65536 % p
        part = (part + (low @ ys) % p) % p
        out = (out + part) % p
    return out


def _rref_mod(block: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    a = block % p
    m, n = a.shape
    r = 0
    pivots: List[int] = []
    for c in range(n):
        if r == m:
            break
        nonzero = np.flatnonzero(a[r:, c])
        if nonzero.size == 0:
            continue
        i = r + int(nonzero[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        if others.size:
            factors = a[others, c]
            a[others] = (a[others] - np.outer(factors, a[r]) % p) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


class ModularEchelon:
    """Incremental reduced echelon basis over F_p for dense residue rows"""

    def __init__(self, ncols: int, prime: int):
        self.ncols = ncols
        self.prime = prime
        self._basis = np.zeros((0, ncols), dtype=np.int64)
        self._pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def add_rows(self, block: np.ndarray) -> int:
        p = self.prime
        if block.size == 0 or self.rank == self.ncols:
            return self.rank
        block = block % p
        if self._pivots:
            block = (block - _matmul_mod(block[:, self._pivots], self._basis, p)) % p
        block = block[np.any(block != 0, axis=1)]
        if block.shape[0] == 0:
            return self.rank
        fresh, fresh_pivots = _rref_mod(block, p)
        if self._pivots:
            self._basis = (self._basis - _matmul_mod(self._basis[:, fresh_pivots], fresh, p)) % p
        self._basis = np.vstack([self._basis, fresh])
        self._pivots.extend(fresh_pivots)
        return self.rank


def modular_rank(m: SparseMat, prime: int, target: Optional[int] = None) -> int:
    """Rank of m over F_prime; stops early once target is reached"""
    echelon = ModularEchelon(m.cols, prime)
    rows = [dict(row) for row in m.data if row]
    rows.sort(key=len)
    for start in range(0, len(rows), _ROW_CHUNK):
        echelon.add_rows(residue_matrix(rows[start:start + _ROW_CHUNK], m.cols, prime))
        if target is not None and echelon.rank >= target:
            break
    return echelon.rank


class NullityStatus(enum.Enum):
    """Outcome of a modular nullity certificate"""
    CERTIFIED = "certified"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CertifiedNullity:
    status: NullityStatus
    known_dim: int
    cols: int
    ranks: Tuple[Tuple[int, int], ...]
    discarded_primes: Tuple[int, ...] = ()

    @property
    def target_rank(self) -> int:
        return self.cols - self.known_dim

    @property
    def certified(self) -> bool:
        return self.status is NullityStatus.CERTIFIED

    @property
    def nullity(self) -> Optional[int]:
        return self.known_dim if self.certified else None

    @property
    def witness_primes(self) -> Tuple[int, ...]:
        return tuple(p for p, r in self.ranks if r == self.target_rank)


def certify_nullity(
    m: SparseMat,
    known_kernel: Subspace,
    primes: Sequence[int],
    extra_primes: Optional[int] = None,
    seed: int = 0,
) -> CertifiedNullity:
    """Certify kernel(m) == known_kernel from a full-enough rank modulo some prime

    Rank over F_p never exceeds rank over Q, so reaching cols - dim(known_kernel)
    modulo one prime pins the rational kernel to known_kernel. A prime that
    divides a denominator is discarded and replaced.
    """
    if known_kernel.ambient_dim != m.cols:
        raise ValueError(f"Known kernel lives in dimension {known_kernel.ambient_dim}, matrix has {m.cols} columns")
    for v in known_kernel.vectors():
        if m.matvec(v):
            raise ValueError("Known kernel vector is not annihilated by the matrix")

    target = m.cols - known_kernel.dim
    extra = len(primes) if extra_primes is None else extra_primes
    rng = random.Random(seed)
    queue = list(primes)
    ranks: List[Tuple[int, int]] = []
    discarded: List[int] = []
    tried = set()

    while queue:
        p = queue.pop(0)
        if p in tried:
            continue
        tried.add(p)
        try:
            r = modular_rank(m, p)
        except ZeroDivisionError:
            logger.info(f"Prime {p} divides a denominator; resampling")
            discarded.append(p)
            queue.append(draw_primes(1, rng.randrange(2 ** 32))[0])
            continue
        ranks.append((p, r))
        logger.debug(f"rank mod {p} = {r} (target {target})")
        if not queue and all(rank_ != target for _, rank_ in ranks) and extra > 0:
            extra -= 1
            queue.append(draw_primes(1, rng.randrange(2 ** 32))[0])

    status = NullityStatus.CERTIFIED if any(r == target for _, r in ranks) else NullityStatus.UNRESOLVED
    return CertifiedNullity(
        status=status,
        known_dim=known_kernel.dim,
        cols=m.cols,
        ranks=tuple(ranks),
        discarded_primes=tuple(discarded),
    )
