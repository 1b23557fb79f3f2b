"""Exact samples of the minimal nilpotent orbit and the subspaces cut out on it

Every subspace computed here (Xi, Xi', Sigma, the span of tangent lines) is
stable under the Cartan torus, so each sampled constraint row may be split
into its weight components and each component imposed on its own. The
resulting kernel still contains the target subspace, and block-wise
elimination stays small.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import islice
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple
import enum
import logging
import random

import numpy as np

from liecert.services.budget import Budget
from liecert.services.exactla import (
    ExactEchelon,
    ModularEchelon,
    SparseMat,
    Subspace,
    Vec,
    kernel,
    kernel_vectors,
    residue,
)
from liecert.services.grading import ContactGrading
from liecert.services.liealg import ConstructionError, LieAlgebra, add_into, exp_ad
from liecert.services.operators import TensorIndex, Weight, spencer_operator
from liecert.services.rootsys import Root, dynkin_labels, weyl_dimension

logger = logging.getLogger(__name__)

PARAMETER_POOL = tuple(Fraction(x) for x in (1, -1, 2, -2)) + tuple(
    Fraction(s, d) for d in (2, 3) for s in (1, -1)
)

Letter = Tuple[Root, Fraction]


# ---------------------------------------------------------------------------
# Samples


@dataclass(frozen=True, eq=False)
class OrbitSample:
    point: Vec
    word: Tuple[Letter, ...]
    tangent: Subspace

    @cached_property
    def complement_rows(self) -> List[Vec]:
        """Linear functionals reading the coordinates off the pivot complement of the tangent"""
        return complement_rows(self.tangent)


def complement_rows(space: Subspace) -> List[Vec]:
    """Rows M_k with M_k(v) = k-th coordinate of v after reducing against space"""
    pivots = space.pivots
    rows: Dict[int, Vec] = {k: {k: Fraction(1)} for k in range(space.ambient_dim) if k not in set(pivots)}
    for p, basis_row in zip(pivots, space.basis_rref):
        for k, value in basis_row[1:]:
            rows[k][p] = -value
    return [rows[k] for k in sorted(rows)]


def orbit_point(L: LieAlgebra, word: Sequence[Letter], start: Optional[Mapping[int, Fraction]] = None) -> Vec:
    """Apply the product of exp(t ad x_root) over word to x_theta; the rightmost letter acts first"""
    z: Vec = dict(start) if start is not None else {L.theta_index: Fraction(1)}
    for root, t in reversed(word):
        z = exp_ad(L, {L.index_of(root): Fraction(1)}, z, Fraction(t))
    if not z:
        raise ConstructionError("orbit point vanished")
    return z


def make_sample(L: LieAlgebra, word: Sequence[Letter], start: Optional[Mapping[int, Fraction]] = None) -> OrbitSample:
    z = orbit_point(L, word, start)
    tangent = Subspace.span(L.dim, (L.ad_basis_vec(j, z) for j in range(L.dim)))
    return OrbitSample(point=z, word=tuple(word), tangent=tangent)


def iter_orbit_samples(L: LieAlgebra, cg: ContactGrading, seed: int) -> Iterator[OrbitSample]:
    """Endless deterministic stream of orbit samples for seed"""
    rng = random.Random(seed)
    rs = L.root_system
    length = 2 * rs.rank
    while True:
        word = []
        for _ in range(length):
            i = rng.randrange(rs.rank)
            sign = rng.choice((1, -1))
            root = tuple(sign * c for c in rs.simple_roots[i])
            word.append((root, rng.choice(PARAMETER_POOL)))
        yield make_sample(L, word, cg.theta_vector)


def sample_orbit(L: LieAlgebra, cg: ContactGrading, count: int, seed: int) -> List[OrbitSample]:
    if count < 1:
        raise ValueError("count must be at least 1")
    return list(islice(iter_orbit_samples(L, cg, seed), count))


def base_sample(L: LieAlgebra, cg: ContactGrading) -> OrbitSample:
    return make_sample(L, (), cg.theta_vector)


# ---------------------------------------------------------------------------
# Coordinate weights


def wedge2_weights(L: LieAlgebra) -> List[Weight]:
    w = L.weights
    return [tuple(x + y for x, y in zip(w[a], w[b])) for a, b in TensorIndex.wedge2(L.dim).keys]


def sym2_dual_weights(L: LieAlgebra) -> List[Weight]:
    w = L.weights
    return [tuple(-x - y for x, y in zip(w[a], w[b])) for a, b in TensorIndex.sym2(L.dim).keys]


def hom_wedge2_weights(L: LieAlgebra) -> List[Weight]:
    """Weights of Hom(wedge2 g, g) coordinates P * n + c"""
    out = []
    for pw in wedge2_weights(L):
        for c in range(L.dim):
            out.append(tuple(x - y for x, y in zip(L.weights[c], pw)))
    return out


def wedge_vector(L: LieAlgebra, z: Mapping[int, Fraction], w: Mapping[int, Fraction]) -> Vec:
    """z ^ w in wedge2 coordinates"""
    wedge = TensorIndex.wedge2(L.dim)
    out: Vec = {}
    for a, za in z.items():
        for b, wb in w.items():
            if a == b:
                continue
            if a < b:
                key, value = (a, b), za * wb
            else:
                key, value = (b, a), -za * wb
            i = wedge.index(key)
            updated = out.get(i, 0) + value
            if updated:
                out[i] = updated
            else:
                out.pop(i, None)
    return out


# ---------------------------------------------------------------------------
# Constraint accumulation


class ConstraintAccumulator:
    """Rows imposed block by block on an unknown vector; tracks the kernel dimension

    In modular mode ranks are taken over F_prime. They never exceed the
    rational ranks, so the reported kernel dimension is an upper bound for the
    rational one.
    """

    def __init__(
        self,
        ambient_dim: int,
        column_weights: Sequence[Weight],
        mode: str = "exact",
        prime: Optional[int] = None,
    ):
        if len(column_weights) != ambient_dim:
            raise ValueError("one weight per coordinate required")
        if mode == "modular" and prime is None:
            raise ValueError("modular accumulation needs a prime")
        self.ambient_dim = ambient_dim
        self.mode = mode
        self.prime = prime
        keys = sorted(set(column_weights))
        block_of_key = {k: i for i, k in enumerate(keys)}
        self.block_keys = keys
        self.col_block = np.array([block_of_key[w] for w in column_weights], dtype=np.int64)
        self.block_cols: List[np.ndarray] = [np.flatnonzero(self.col_block == b) for b in range(len(keys))]
        self.col_local = np.zeros(ambient_dim, dtype=np.int64)
        for cols in self.block_cols:
            self.col_local[cols] = np.arange(cols.size)
        if mode == "exact":
            self._echelons = [ExactEchelon(cols.size) for cols in self.block_cols]
        else:
            self._echelons = [ModularEchelon(cols.size, prime) for cols in self.block_cols]
        self.rows_added = 0
        self.history: List[int] = []

    @property
    def rank(self) -> int:
        return sum(e.rank for e in self._echelons)

    @property
    def kernel_dim(self) -> int:
        return self.ambient_dim - self.rank

    def add_rows(self, rows: Iterable[Mapping[int, Fraction]]) -> None:
        rows = [r for r in rows if r]
        if not rows:
            return
        self.rows_added += len(rows)
        if self.mode == "exact":
            for row in rows:
                parts: Dict[int, Dict[int, Fraction]] = {}
                for c, value in row.items():
                    parts.setdefault(int(self.col_block[c]), {})[int(self.col_local[c])] = value
                for b, part in parts.items():
                    self._echelons[b].add(part)
            return
        dense = np.zeros((len(rows), self.ambient_dim), dtype=np.int64)
        for r, row in enumerate(rows):
            for c, value in row.items():
                dense[r, c] = residue(value, self.prime)
        self._add_dense(dense)

    def add_kronecker(self, left: Mapping[int, Fraction], right: Sequence[Mapping[int, Fraction]], inner_dim: int) -> None:
        """Add the rows left (x) right_k, column index = outer * inner_dim + inner"""
        if not left or not right:
            return
        if self.mode == "exact":
            rows = []
            for r in right:
                row: Vec = {}
                for o, a in left.items():
                    base = o * inner_dim
                    for i, b in r.items():
                        row[base + i] = a * b
                rows.append(row)
            self.add_rows(rows)
            return
        p = self.prime
        outer_dim = self.ambient_dim // inner_dim
        lv = np.zeros(outer_dim, dtype=np.int64)
        for o, a in left.items():
            lv[o] = residue(a, p)
        rv = np.zeros((len(right), inner_dim), dtype=np.int64)
        for k, r in enumerate(right):
            for i, b in r.items():
                rv[k, i] = residue(b, p)
        dense = (rv[:, None, :] * lv[None, :, None]) % p
        self.rows_added += len(right)
        self._add_dense(dense.reshape(len(right), self.ambient_dim))

    def _add_dense(self, dense: np.ndarray) -> None:
        for b, cols in enumerate(self.block_cols):
            part = dense[:, cols]
            if np.any(part):
                self._echelons[b].add_rows(part)

    def checkpoint(self) -> int:
        """Record the kernel dimension; it may never grow"""
        dim = self.kernel_dim
        if self.history and dim > self.history[-1]:
            raise ConstructionError(f"kernel dimension grew from {self.history[-1]} to {dim}")
        self.history.append(dim)
        return dim

    def kernel(self) -> Subspace:
        if self.mode != "exact":
            raise ValueError("an explicit kernel is only available in exact mode")
        vectors: List[Vec] = []
        for cols, echelon in zip(self.block_cols, self._echelons):
            for v in kernel_vectors(cols.size, echelon.rref()):
                vectors.append({int(cols[i]): x for i, x in v.items()})
        return Subspace.span(self.ambient_dim, vectors)


class StabilityStatus(enum.Enum):
    """How a sampled kernel stopped"""
    CERTIFIED = "certified"
    PLATEAU = "plateau"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class StabilizedKernel:
    status: StabilityStatus
    dim: int
    kernel: Optional[Subspace]
    history: Tuple[int, ...]
    samples_used: int
    rows_added: int
    lower_bound: Optional[int]
    mode: str
    prime: Optional[int] = None
    samples: Tuple[OrbitSample, ...] = field(default=(), repr=False)


def stabilize(
    acc: ConstraintAccumulator,
    samples: Iterable[OrbitSample],
    add_sample,
    lower_bound: Optional[int] = None,
    batch_size: int = 8,
    patience: int = 3,
    budget: Optional[Budget] = None,
    label: str = "kernel",
) -> StabilizedKernel:
    """Feed samples in batches until the kernel meets its lower bound or plateaus

    Reaching a lower bound that is known to lie inside the kernel proves
    equality. Otherwise patience batches without a drop end the run as a plateau.
    """
    budget = budget or Budget.unlimited()
    iterator = iter(samples)
    used: List[OrbitSample] = []
    plateau = 0
    status = StabilityStatus.UNSTABLE
    while True:
        batch = list(islice(iterator, batch_size))
        if not batch:
            break
        for sample in batch:
            add_sample(acc, sample)
            used.append(sample)
        budget.check_time(label)
        previous = acc.history[-1] if acc.history else None
        dim = acc.checkpoint()
        logger.debug(f"{label}: {len(used)} samples, kernel dim {dim}")
        if lower_bound is not None and dim < lower_bound:
            raise ConstructionError(f"{label}: kernel dim {dim} fell below contained subspace dim {lower_bound}")
        if lower_bound is not None and dim == lower_bound:
            status = StabilityStatus.CERTIFIED
            break
        plateau = plateau + 1 if previous is not None and dim == previous else 0
        if plateau >= patience:
            status = StabilityStatus.PLATEAU
            break
    if not acc.history:
        raise ValueError(f"{label}: at least one sample is required")
    logger.info(f"{label}: {status.value} at dim {acc.history[-1]} after {len(used)} samples")
    return StabilizedKernel(
        status=status,
        dim=acc.history[-1],
        kernel=acc.kernel() if acc.mode == "exact" else None,
        history=tuple(acc.history),
        samples_used=len(used),
        rows_added=acc.rows_added,
        lower_bound=lower_bound,
        mode=acc.mode,
        prime=acc.prime,
        samples=tuple(used),
    )


# ---------------------------------------------------------------------------
# Xi, Xi' and Sigma


def _xi_rows(L: LieAlgebra, complement):
    n = L.dim

    def add(acc: ConstraintAccumulator, sample: OrbitSample) -> None:
        right = complement(sample)
        for w in sample.tangent.vectors():
            acc.add_kronecker(wedge_vector(L, sample.point, w), right, n)

    return add


def xi_space(
    L: LieAlgebra,
    samples: Iterable[OrbitSample],
    lower_bound: Optional[int] = None,
    mode: str = "exact",
    prime: Optional[int] = None,
    batch_size: int = 8,
    patience: int = 3,
    budget: Optional[Budget] = None,
) -> StabilizedKernel:
    """sigma in Hom(wedge2 g, g) with sigma(z, T_z) inside T_z for every sample z"""
    n = L.dim
    acc = ConstraintAccumulator(len(TensorIndex.wedge2(n).keys) * n, hom_wedge2_weights(L), mode, prime)
    add = _xi_rows(L, lambda s: s.complement_rows)
    return stabilize(acc, samples, add, lower_bound, batch_size, patience, budget, f"Xi {L.name}")


def xi_prime_space(
    L: LieAlgebra,
    samples: Iterable[OrbitSample],
    lower_bound: Optional[int] = 1,
    mode: str = "exact",
    prime: Optional[int] = None,
    batch_size: int = 8,
    patience: int = 3,
    budget: Optional[Budget] = None,
) -> StabilizedKernel:
    """sigma with sigma(z, T_z) inside C.z for every sample z"""
    n = L.dim
    acc = ConstraintAccumulator(len(TensorIndex.wedge2(n).keys) * n, hom_wedge2_weights(L), mode, prime)
    add = _xi_rows(L, lambda s: complement_rows(Subspace.span(n, [s.point])))
    return stabilize(acc, samples, add, lower_bound, batch_size, patience, budget, f"Xi' {L.name}")


def bracket_hom(L: LieAlgebra) -> Vec:
    """The bracket as a vector of Hom(wedge2 g, g)"""
    n = L.dim
    out: Vec = {}
    for p, (a, b) in enumerate(TensorIndex.wedge2(n).keys):
        for k, c in L.bracket_basis(a, b):
            out[p * n + k] = c
    return out


def quadric_row(L: LieAlgebra, z: Mapping[int, Fraction]) -> Vec:
    """The functional q -> q(z, z) on sym2 coordinates"""
    sym = TensorIndex.sym2(L.dim)
    items = sorted(z.items())
    row: Vec = {}
    for x, (i, zi) in enumerate(items):
        row[sym.index((i, i))] = zi * zi
        for j, zj in items[x + 1:]:
            row[sym.index((i, j))] = 2 * zi * zj
    return row


def polar_row(L: LieAlgebra, z: Mapping[int, Fraction], w: Mapping[int, Fraction]) -> Vec:
    """The functional q -> q(z, w) on sym2 coordinates"""
    sym = TensorIndex.sym2(L.dim)
    row: Vec = {}
    for i, zi in z.items():
        for j, wj in w.items():
            key = sym.index((i, j) if i <= j else (j, i))
            value = row.get(key, 0) + zi * wj
            if value:
                row[key] = value
            else:
                row.pop(key, None)
    return row


def killing_quadric(L: LieAlgebra) -> Vec:
    sym = TensorIndex.sym2(L.dim)
    gram = L.killing_gram
    return {i: gram[a][b] for i, (a, b) in enumerate(sym.keys) if gram[a][b]}


def evaluate_quadric(L: LieAlgebra, q: Mapping[int, Fraction], z: Mapping[int, Fraction]) -> Fraction:
    row = quadric_row(L, z)
    return sum((row[i] * v for i, v in q.items() if i in row), Fraction(0))


def sigma_lower_bound(L: LieAlgebra) -> int:
    """dim Sym2 g* - dim V(2 theta): the number of independent quadrics vanishing on the orbit"""
    rs = L.root_system
    labels = tuple(2 * x for x in dynkin_labels(rs, rs.highest_root))
    n = L.dim
    return n * (n + 1) // 2 - weyl_dimension(rs, labels)


def sigma_quadrics(
    L: LieAlgebra,
    samples: Iterable[OrbitSample],
    lower_bound: Optional[int] = None,
    batch_size: int = 8,
    patience: int = 3,
    budget: Optional[Budget] = None,
) -> StabilizedKernel:
    """Quadrics vanishing at every sample, computed exactly

    A quadric vanishing on the cone also has q(z, w) = 0 for w in T_z, so each
    sample contributes one row per tangent vector besides q(z, z).
    """
    n = L.dim
    acc = ConstraintAccumulator(n * (n + 1) // 2, sym2_dual_weights(L), "exact")

    def add(a: ConstraintAccumulator, sample: OrbitSample) -> None:
        z = sample.point
        a.add_rows([quadric_row(L, z)] + [polar_row(L, z, w) for w in sample.tangent.vectors()])

    result = stabilize(acc, samples, add, lower_bound, batch_size, patience, budget, f"Sigma {L.name}")
    if not result.kernel.contains(killing_quadric(L)):
        raise ConstructionError("the Killing form does not vanish on the sampled orbit")
    return result


# ---------------------------------------------------------------------------
# S and its Spencer image


def sym2_to_matrix(L: LieAlgebra, q: Mapping[int, Fraction]) -> Dict[Tuple[int, int], Fraction]:
    sym = TensorIndex.sym2(L.dim)
    out: Dict[Tuple[int, int], Fraction] = {}
    for i, v in q.items():
        a, b = sym.key(i)
        out[(a, b)] = v
        out[(b, a)] = v
    return out


def flat_quadric(L: LieAlgebra, q: Mapping[int, Fraction]) -> Dict[Tuple[int, int], Fraction]:
    """Entries (k, d) of G^-1 Q"""
    inv = L.killing_inverse
    columns: Dict[int, List[Tuple[int, Fraction]]] = {}
    for k in range(L.dim):
        for m, g in enumerate(inv[k]):
            if g:
                columns.setdefault(m, []).append((k, g))
    out: Dict[Tuple[int, int], Fraction] = {}
    for (m, d), v in sym2_to_matrix(L, q).items():
        for k, g in columns.get(m, ()):
            value = out.get((k, d), 0) + g * v
            if value:
                out[(k, d)] = value
            else:
                out.pop((k, d), None)
    return out


def build_S(L: LieAlgebra, sigma: Subspace) -> Subspace:
    """Hom(g, C.Id) + ad(g) + flat(Sigma) inside Hom(g, g^)"""
    n = L.dim
    width = n + 1
    vectors: List[Vec] = []
    for d in range(n):
        vectors.append({d * width + n: Fraction(1)})
    for m in range(n):
        pattern: Vec = {}
        for d in range(n):
            for k, c in L.bracket_basis(m, d):
                pattern[d * width + k] = c
        vectors.append(pattern)
    for q in sigma.vectors():
        pattern = {d * width + k: v for (k, d), v in flat_quadric(L, q).items()}
        vectors.append(pattern)
    S = Subspace.span(n * width, vectors)
    expected = 2 * n + sigma.dim
    if S.dim != expected:
        raise ConstructionError(f"S has dim {S.dim}, expected {expected}: summands overlap")
    return S


def spencer_image(L: LieAlgebra, S: Subspace) -> Subspace:
    op = spencer_operator(L, hat=True)
    if S.ambient_dim != op.cols:
        raise ValueError(f"S lives in dimension {S.ambient_dim}, expected {op.cols}")
    images = []
    for h in S.vectors():
        out: Vec = {}
        for j, coefficient in h.items():
            add_into(out, op.column(j), coefficient)
        images.append(out)
    return Subspace.span(op.rows, images)


def spencer_on_pair(L: LieAlgebra, h: Mapping[int, Fraction], z: Mapping[int, Fraction], w: Mapping[int, Fraction]) -> Vec:
    """(d h)(z, w) = h(z).w - h(w).z for h in Hom(g, g^) coordinates"""
    n = L.dim
    width = n + 1

    def evaluate(v: Mapping[int, Fraction]) -> Vec:
        out: Vec = {}
        for j, coefficient in h.items():
            d, k = divmod(j, width)
            x = v.get(d)
            if x:
                value = out.get(k, 0) + coefficient * x
                if value:
                    out[k] = value
                else:
                    out.pop(k, None)
        return out

    def act(element: Vec, v: Mapping[int, Fraction]) -> Vec:
        out: Vec = {}
        for k, s in element.items():
            add_into(out, dict(v) if k == n else L.ad_basis_vec(k, v), s)
        return out

    result = act(evaluate(z), w)
    add_into(result, act(evaluate(w), z), Fraction(-1))
    return result


def spencer_image_respects_tangents(L: LieAlgebra, S: Subspace, samples: Sequence[OrbitSample]) -> bool:
    """Exact check that (d h)(z, T_z) lies in T_z for h in S and every given sample"""
    basis = S.vectors()
    for sample in samples:
        for w in sample.tangent.vectors():
            for h in basis:
                if not sample.tangent.contains(spencer_on_pair(L, h, sample.point, w)):
                    return False
    return True


# ---------------------------------------------------------------------------
# Span of tangent lines


@dataclass(frozen=True)
class SpanResult:
    full: bool
    achieved: int
    target: int
    history: Tuple[int, ...]
    samples_used: int
    mode: str


def tangent_lines_span(
    L: LieAlgebra,
    samples: Iterable[OrbitSample],
    mode: str = "exact",
    prime: Optional[int] = None,
    budget: Optional[Budget] = None,
) -> SpanResult:
    """Dimension of the span of z ^ w over samples z and w in T_z, stopping once full

    Modular ranks are lower bounds for rational ones, so reaching the full
    dimension modulo a prime proves it over Q.
    """
    budget = budget or Budget.unlimited()
    target = L.dim * (L.dim - 1) // 2
    acc = ConstraintAccumulator(target, wedge2_weights(L), mode, prime)
    history: List[int] = []
    used = 0
    for sample in samples:
        acc.add_rows(wedge_vector(L, sample.point, w) for w in sample.tangent.vectors())
        used += 1
        history.append(acc.rank)
        if len(history) > 1 and history[-1] < history[-2]:
            raise ConstructionError("span dimension decreased")
        budget.check_time(f"tangent span {L.name}")
        if acc.rank == target:
            break
    if not used:
        raise ValueError("at least one sample is required")
    achieved = history[-1]
    logger.info(f"Tangent lines of {L.name} span {achieved}/{target} after {used} samples")
    return SpanResult(achieved == target, achieved, target, tuple(history), used, mode)


# ---------------------------------------------------------------------------
# Highest weight vectors


@dataclass(frozen=True, eq=False)
class TensorModule:
    """A g-submodule of wedge2 g or Sym2 g*, in sym/wedge coordinates"""
    kind: str
    space: Subspace

    def __post_init__(self):
        if self.kind not in ("wedge2", "sym2_dual"):
            raise ValueError(f"unknown module kind {self.kind!r}")


def wedge2_module(L: LieAlgebra) -> TensorModule:
    return TensorModule("wedge2", Subspace.full(L.dim * (L.dim - 1) // 2))


def act_on_tensor(L: LieAlgebra, kind: str, x: int, v: Mapping[int, Fraction]) -> Vec:
    """e_x acting on a wedge2 or Sym2-dual coordinate vector"""
    n = L.dim
    out: Vec = {}
    if kind == "wedge2":
        wedge = TensorIndex.wedge2(n)
        for i, value in v.items():
            a, b = wedge.key(i)
            for first, second, sign in ((a, b, 1), (b, a, -1)):
                for k, c in L.bracket_basis(x, first):
                    if k == second:
                        continue
                    key, s = ((k, second), 1) if k < second else ((second, k), -1)
                    add_into(out, {wedge.index(key): c * value}, Fraction(sign * s))
        return out

    sym = TensorIndex.sym2(n)
    # (x.q)(e_i, e_j) = F(i, j) + F(j, i) with F(i, j) = -sum_k A[k][i] q(e_k, e_j)
    preimage: Dict[int, List[Tuple[int, Fraction]]] = {}
    for i in range(n):
        for k, c in L.bracket_basis(x, i):
            preimage.setdefault(k, []).append((i, c))
    partial: Dict[Tuple[int, int], Fraction] = {}
    for (k, j), q in sym2_to_matrix(L, v).items():
        for i, c in preimage.get(k, ()):
            partial[(i, j)] = partial.get((i, j), 0) - c * q
    for (i, j), value in partial.items():
        if not value:
            continue
        a, b = (i, j) if i <= j else (j, i)
        if a == b:
            value *= 2
        add_into(out, {sym.index((a, b)): value})
    return out


def _coordinate_weights(L: LieAlgebra, kind: str) -> List[Weight]:
    return wedge2_weights(L) if kind == "wedge2" else sym2_dual_weights(L)


def _homogeneous_basis(space: Subspace, weights: Sequence[Weight]) -> Dict[Weight, Subspace]:
    pieces: Dict[Weight, List[Vec]] = {}
    for v in space.vectors():
        split: Dict[Weight, Vec] = {}
        for c, value in v.items():
            split.setdefault(weights[c], {})[c] = value
        for key, part in split.items():
            pieces.setdefault(key, []).append(part)
    return {key: Subspace.span(space.ambient_dim, vs) for key, vs in sorted(pieces.items())}


def check_invariant(L: LieAlgebra, module: TensorModule) -> None:
    """Reject a module that is not closed under the simple root vectors"""
    rs = L.root_system
    generators = [L.index_of(a) for a in rs.simple_roots] + [L.index_of(tuple(-c for c in a)) for a in rs.simple_roots]
    for v in module.space.vectors():
        for x in generators:
            if not module.space.contains(act_on_tensor(L, module.kind, x, v)):
                raise ValueError(f"{module.kind} module is not invariant under {L.basis_labels[x]}")


def highest_weights(
    L: LieAlgebra, module: TensorModule, budget: Optional[Budget] = None
) -> List[Tuple[Tuple[int, ...], int]]:
    """Dynkin labels and multiplicities of the highest weights of module"""
    budget = budget or Budget.unlimited()
    check_invariant(L, module)
    rs = L.root_system
    raising = [L.index_of(a) for a in rs.simple_roots]
    ambient = module.space.ambient_dim
    found: List[Tuple[Tuple[int, ...], int]] = []
    for weight, piece in _homogeneous_basis(module.space, _coordinate_weights(L, module.kind)).items():
        budget.check_time(f"highest weights {L.name}")
        basis = piece.vectors()
        columns = []
        for v in basis:
            column: Vec = {}
            for slot, x in enumerate(raising):
                for c, value in act_on_tensor(L, module.kind, x, v).items():
                    column[slot * ambient + c] = value
            columns.append(column)
        count = kernel(SparseMat.from_columns(len(raising) * ambient, columns)).dim
        if count:
            found.append((dynkin_labels(rs, weight), count))
    return found


def count_summands(L: LieAlgebra, module: TensorModule, budget: Optional[Budget] = None) -> int:
    """Number of irreducible summands: the joint kernel of the raising operators"""
    return sum(mult for _, mult in highest_weights(L, module, budget))


def weyl_dimension_total(L: LieAlgebra, weights: Sequence[Tuple[Tuple[int, ...], int]]) -> int:
    return sum(mult * weyl_dimension(L.root_system, labels) for labels, mult in weights)


# ---------------------------------------------------------------------------
# Pointwise tangent-space identities


@dataclass
class GuReport:
    clauses: List[Dict[str, bool]]

    @property
    def passed(self) -> bool:
        return all(all(c.values()) for c in self.clauses)

    def failures(self) -> List[Tuple[int, str]]:
        return [(i, name) for i, c in enumerate(self.clauses) for name, ok in c.items() if not ok]


def orthogonal_complement(L: LieAlgebra, space: Subspace) -> Subspace:
    gram = L.killing_gram
    rows = []
    for v in space.vectors():
        row: Vec = {}
        for i, x in v.items():
            for j, g in enumerate(gram[i]):
                if g:
                    row[j] = row.get(j, 0) + x * g
        rows.append({j: x for j, x in row.items() if x})
    return kernel(SparseMat.from_rows(L.dim, rows))


def contact_hyperplane(L: LieAlgebra, sample: OrbitSample) -> Subspace:
    """{v in T_z : [v, z] = 0}"""
    basis = sample.tangent.vectors()
    columns = [L.bracket_vec(v, sample.point) for v in basis]
    null = kernel(SparseMat.from_columns(L.dim, columns))
    vectors = []
    for coefficients in null.vectors():
        v: Vec = {}
        for r, c in coefficients.items():
            add_into(v, basis[r], c)
        vectors.append(v)
    return Subspace.span(L.dim, vectors)


def gu_pointwise_checks(L: LieAlgebra, samples: Sequence[OrbitSample], tangent_dim: Optional[int] = None) -> GuReport:
    reports = []
    for sample in samples:
        z = sample.point
        T = sample.tangent
        line = Subspace.span(L.dim, [z])
        clauses: Dict[str, bool] = {}
        clauses["tangent_is_orbit_image"] = T.contains(z) and (tangent_dim is None or T.dim == tangent_dim)
        clauses["tangent_brackets_into_line"] = all(line.contains(L.bracket_vec(v, z)) for v in T.vectors())
        perp = orthogonal_complement(L, T)
        clauses["perp_preserves_tangent"] = all(
            T.contains(L.bracket_vec(u, t)) for u in perp.vectors() for t in T.vectors()
        )
        D = contact_hyperplane(L, sample)
        clauses["contact_hyperplane_commutes"] = D.dim == T.dim - 1 and all(
            not L.bracket_vec(z, v) for v in D.vectors()
        )
        reports.append(clauses)
    report = GuReport(reports)
    if not report.passed:
        logger.warning(f"{L.name}: tangent identities failed at {report.failures()[:5]}")
    return report
