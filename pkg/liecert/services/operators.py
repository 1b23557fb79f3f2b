"""Tensor coordinates and the Spencer and Bianchi operators as sparse matrices

Coordinate conventions:
  wedge2  pairs (i, j) with i < j, lexicographic
  wedge3  triples (i, j, k) with i < j < k, lexicographic
  sym2    pairs (i, j) with i <= j, lexicographic
  hom     domain-major: index = domain_index * codomain_dim + codomain_index

The hat algebra g^ = ad(g) + C.Id has n + 1 coordinates; slot k < n is ad_{e_k}
and slot n is the identity.

Every operator here commutes with the Cartan action, so it is assembled and
solved one weight block at a time.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, combinations_with_replacement
from math import comb
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple
import logging

from liecert.services import cache
from liecert.services.budget import Budget
from liecert.services.exactla import (
    CertifiedNullity,
    SparseMat,
    Subspace,
    Vec,
    certify_nullity,
    kernel,
)
from liecert.services.liealg import LieAlgebra
from liecert.services.rootsys import Root

logger = logging.getLogger(__name__)

Weight = Root


# ---------------------------------------------------------------------------
# Coordinates


@dataclass(frozen=True, eq=False)
class TensorIndex:
    """Bijection between multi-indices of a tensor space and 0..total_dim-1"""
    kind: str
    keys: Tuple[Tuple[int, ...], ...] = field(repr=False)
    codomain_dim: int = 0

    @classmethod
    def wedge2(cls, n: int) -> "TensorIndex":
        return cls("wedge2", tuple(combinations(range(n), 2)))

    @classmethod
    def wedge3(cls, n: int) -> "TensorIndex":
        return cls("wedge3", tuple(combinations(range(n), 3)))

    @classmethod
    def sym2(cls, n: int) -> "TensorIndex":
        return cls("sym2", tuple(combinations_with_replacement(range(n), 2)))

    @classmethod
    def hom(cls, domain_dim: int, codomain_dim: int) -> "TensorIndex":
        return cls("hom", tuple((d,) for d in range(domain_dim)), codomain_dim=codomain_dim)

    @property
    def total_dim(self) -> int:
        if self.kind == "hom":
            return len(self.keys) * self.codomain_dim
        return len(self.keys)

    @cached_property
    def _lookup(self) -> Dict[Tuple[int, ...], int]:
        return {key: i for i, key in enumerate(self.keys)}

    def index(self, key: Sequence[int]) -> int:
        if self.kind == "hom":
            d, c = key
            if not (0 <= d < len(self.keys) and 0 <= c < self.codomain_dim):
                raise ValueError(f"hom index {tuple(key)} out of range")
            return d * self.codomain_dim + c
        try:
            return self._lookup[tuple(key)]
        except KeyError:
            raise ValueError(f"{tuple(key)} is not a {self.kind} index") from None

    def key(self, i: int) -> Tuple[int, ...]:
        if self.kind == "hom":
            return divmod(i, self.codomain_dim)
        return self.keys[i]


def wedge2_dim(n: int) -> int:
    return comb(n, 2)


def wedge3_dim(n: int) -> int:
    return comb(n, 3)


def sym2_dim(n: int) -> int:
    return comb(n + 1, 2)


def _wt_add(*ws: Sequence[int], signs: Sequence[int]) -> Weight:
    out = [0] * len(ws[0])
    for w, s in zip(ws, signs):
        for i, x in enumerate(w):
            out[i] += s * x
    return tuple(out)


# ---------------------------------------------------------------------------
# Hat algebra


@dataclass(frozen=True, eq=False)
class HatAlgebra:
    """Coordinates for ad(g) (+ C.Id when with_identity) acting on g"""
    algebra: LieAlgebra
    with_identity: bool = True

    @property
    def dim(self) -> int:
        return self.algebra.dim + (1 if self.with_identity else 0)

    @property
    def identity_slot(self) -> int:
        if not self.with_identity:
            raise ValueError("adjoint-only coordinates have no identity slot")
        return self.algebra.dim

    def weight(self, k: int) -> Weight:
        if k == self.algebra.dim:
            return tuple(0 for _ in range(self.algebra.rank))
        return self.algebra.weights[k]

    def act(self, k: int, w: Dict[int, Fraction]) -> Vec:
        """Slot k applied to w"""
        if k == self.algebra.dim:
            return dict(w)
        return self.algebra.ad_basis_vec(k, w)

    def act_basis(self, k: int, j: int) -> Vec:
        if k == self.algebra.dim:
            return {j: Fraction(1)}
        return dict(self.algebra.bracket_basis(k, j))

    def evaluate(self, coords: Dict[int, Fraction]) -> List[List[Fraction]]:
        """The n x n matrix of an element given in hat coordinates"""
        n = self.algebra.dim
        matrix = [[Fraction(0)] * n for _ in range(n)]
        for k, s in coords.items():
            for j in range(n):
                for i, c in self.act_basis(k, j).items():
                    matrix[i][j] += s * c
        return matrix


# ---------------------------------------------------------------------------
# Operators as column generators


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """A sparse operator described column by column, with coordinate weights"""
    name: str
    rows: int
    cols: int
    column: Callable[[int], Vec] = field(repr=False)
    column_weight: Callable[[int], Weight] = field(repr=False)

    def matrix(self) -> SparseMat:
        return SparseMat.from_columns(self.rows, [self.column(j) for j in range(self.cols)])


def spencer_operator(L: LieAlgebra, hat: bool = True) -> LinearOperator:
    """d h(u, v) = h(u).v - h(v).u from Hom(g, cod) to Hom(wedge2 g, g)"""
    n = L.dim
    cod = HatAlgebra(L, with_identity=hat)
    wedge = TensorIndex.wedge2(n)

    def column(j: int) -> Vec:
        d, k = divmod(j, cod.dim)
        out: Vec = {}
        for other in range(n):
            if other == d:
                continue
            value = cod.act_basis(k, other)
            if not value:
                continue
            if d < other:
                base, sign = wedge.index((d, other)) * n, 1
            else:
                base, sign = wedge.index((other, d)) * n, -1
            for c, x in value.items():
                out[base + c] = sign * x
        return out

    def weight(j: int) -> Weight:
        d, k = divmod(j, cod.dim)
        return _wt_add(cod.weight(k), L.weights[d], signs=(1, -1))

    return LinearOperator(
        name="spencer_hat" if hat else "spencer_ad",
        rows=wedge.total_dim * n,
        cols=n * cod.dim,
        column=column,
        column_weight=weight,
    )


def bianchi_operator(L: LieAlgebra) -> LinearOperator:
    """h -> h#, h#(u,v,w) = h(u,v).w + h(v,w).u + h(w,u).v, from Hom(wedge2 g, g^) to Hom(wedge3 g, g)"""
    n = L.dim
    cod = HatAlgebra(L, with_identity=True)
    wedge = TensorIndex.wedge2(n)
    triple = TensorIndex.wedge3(n)

    def column(j: int) -> Vec:
        p, k = divmod(j, cod.dim)
        a, b = wedge.key(p)
        out: Vec = {}
        for c in range(n):
            if c == a or c == b:
                continue
            value = cod.act_basis(k, c)
            if not value:
                continue
            # (a, b, c) is an odd arrangement of its sorted triple exactly when a < c < b
            sign = -1 if a < c < b else 1
            base = triple.index(tuple(sorted((a, b, c)))) * n
            for m, x in value.items():
                out[base + m] = sign * x
        return out

    def weight(j: int) -> Weight:
        p, k = divmod(j, cod.dim)
        a, b = wedge.key(p)
        return _wt_add(cod.weight(k), L.weights[a], L.weights[b], signs=(1, -1, -1))

    return LinearOperator(
        name="bianchi",
        rows=triple.total_dim * n,
        cols=wedge.total_dim * cod.dim,
        column=column,
        column_weight=weight,
    )


def spencer_matrix(L: LieAlgebra, hat: bool = True) -> SparseMat:
    return spencer_operator(L, hat).matrix()


def bianchi_matrix(L: LieAlgebra) -> SparseMat:
    return bianchi_operator(L).matrix()


def bracket_element(L: LieAlgebra) -> Vec:
    """The Lie bracket in Hom(wedge2 g, g^) coordinates; its identity part is zero"""
    n = L.dim
    width = n + 1
    wedge = TensorIndex.wedge2(n)
    out: Vec = {}
    for p, (a, b) in enumerate(wedge.keys):
        for k, c in L.bracket_basis(a, b):
            out[p * width + k] = c
    return out


def bianchi_dims(n: int) -> Tuple[int, int]:
    """(rows, cols) of the Bianchi matrix for dim g = n"""
    return wedge3_dim(n) * n, wedge2_dim(n) * (n + 1)


def spencer_dims(n: int, hat: bool = True) -> Tuple[int, int]:
    return wedge2_dim(n) * n, n * (n + 1 if hat else n)


# ---------------------------------------------------------------------------
# Weight blocks


@dataclass(frozen=True)
class OperatorBlock:
    key: Weight
    columns: Tuple[int, ...]
    rows: Tuple[int, ...]
    matrix: SparseMat

    def local_vector(self, v: Dict[int, Fraction]) -> Vec:
        position = {c: i for i, c in enumerate(self.columns)}
        return {position[c]: x for c, x in v.items() if c in position}

    def lift(self, local: Dict[int, Fraction]) -> Vec:
        return {self.columns[i]: x for i, x in local.items()}


def _block_from_columns(key: Weight, cols: Sequence[int], vectors: Sequence[Vec]) -> OperatorBlock:
    used = sorted(set().union(*vectors)) if vectors else []
    local = {r: i for i, r in enumerate(used)}
    matrix = SparseMat.from_columns(len(used), [{local[r]: x for r, x in v.items()} for v in vectors])
    return OperatorBlock(key=key, columns=tuple(cols), rows=tuple(used), matrix=matrix)


def _column_source(L: LieAlgebra, op: LinearOperator, cache_dir: Optional[Path]) -> Callable[[int], Vec]:
    """Columns of op, through the triple-list cache when a cache directory is set"""
    if cache_dir is None:
        return op.column
    rs = L.root_system
    header = {
        "kind": op.name,
        "type": rs.type_label,
        "rank": rs.rank,
        "rows": op.rows,
        "cols": op.cols,
        "hash": cache.engine_version(),
    }
    path = cache.cache_path(cache_dir, op.name, rs.type_label, rs.rank, cache.engine_version())
    columns: Dict[int, Vec] = {}
    if path.exists():
        stored, entries = cache.read_entries(path)
        if cache.header_matches(stored, header):
            for (r, c), value in entries:
                columns.setdefault(c, {})[r] = value
            logger.info(f"Loaded {op.name} matrix for {rs.name} from {path}")
            return lambda j: dict(columns.get(j, {}))
    for j in range(op.cols):
        columns[j] = op.column(j)
    cache.write_entries(
        path,
        header,
        (((r, c), value) for c in range(op.cols) for r, value in sorted(columns[c].items())),
    )
    return lambda j: dict(columns.get(j, {}))


def operator_blocks(
    L: LieAlgebra,
    op: LinearOperator,
    budget: Optional[Budget] = None,
    cache_dir: Optional[Path] = None,
) -> List[OperatorBlock]:
    """Split op into weight blocks, ordered by weight"""
    budget = budget or Budget.unlimited()
    budget.require_dense(op.rows, op.cols, f"{op.name} {L.name}")
    source = _column_source(L, op, cache_dir)
    groups: Dict[Weight, List[int]] = {}
    for j in range(op.cols):
        groups.setdefault(op.column_weight(j), []).append(j)
    blocks = []
    for key in sorted(groups):
        budget.check_time(f"{op.name} {L.name} assembly")
        cols = groups[key]
        blocks.append(_block_from_columns(key, cols, [source(j) for j in cols]))
    logger.info(f"{op.name} {L.name}: {op.rows}x{op.cols} split into {len(blocks)} weight blocks")
    return blocks


# ---------------------------------------------------------------------------
# Blocked kernels


@dataclass(frozen=True)
class BlockedKernel:
    """Kernel of a block-diagonal operator, exact or certified modulo primes"""
    mode: str
    cols: int
    kernel: Optional[Subspace]
    block_certificates: Tuple[Tuple[Weight, CertifiedNullity], ...] = ()
    known: Optional[Subspace] = None

    @property
    def certified(self) -> bool:
        if self.mode == "exact":
            return True
        return all(c.certified for _, c in self.block_certificates)

    @property
    def dim(self) -> Optional[int]:
        if self.kernel is not None:
            return self.kernel.dim
        if self.certified and self.known is not None:
            return self.known.dim
        return None

    @property
    def space(self) -> Optional[Subspace]:
        """The kernel as a subspace when it is known exactly"""
        if self.kernel is not None:
            return self.kernel
        return self.known if self.certified else None

    def block_witnesses(self) -> List[Dict[str, object]]:
        rows = []
        for key, cert in self.block_certificates:
            rows.append({
                "weight": list(key),
                "cols": cert.cols,
                "known_dim": cert.known_dim,
                "ranks": [[p, r] for p, r in cert.ranks],
                "discarded_primes": list(cert.discarded_primes),
                "status": cert.status.value,
            })
        return rows


def _certify_block(args) -> CertifiedNullity:
    matrix, known_vectors, primes, seed = args
    known = Subspace.span(matrix.cols, known_vectors)
    return certify_nullity(matrix, known, primes, seed=seed)


def blocked_kernel(
    blocks: Sequence[OperatorBlock],
    cols: int,
    mode: str,
    known: Sequence[Vec] = (),
    primes: Sequence[int] = (),
    budget: Optional[Budget] = None,
    workers: int = 1,
    seed: int = 0,
) -> BlockedKernel:
    """Kernel of the operator whose weight blocks are given

    Exact mode computes every block kernel over Q. Modular mode certifies that
    each block kernel equals the span of the known vectors restricted to it.
    """
    budget = budget or Budget.unlimited()
    known_space = Subspace.span(cols, known)
    if mode == "exact":
        vectors: List[Vec] = []
        for block in blocks:
            budget.check_time("exact block kernel")
            for v in kernel(block.matrix).vectors():
                vectors.append(block.lift(v))
        result = Subspace.span(cols, vectors)
        if not result.contains(known_space):
            raise ValueError("Known vectors are not in the kernel")
        return BlockedKernel(mode=mode, cols=cols, kernel=result, known=known_space)

    if not primes:
        raise ValueError("Modular mode needs at least one prime")
    tasks = []
    for block in blocks:
        local = [block.local_vector(v) for v in known_space.vectors()]
        tasks.append((block.matrix, [v for v in local if v], list(primes), seed))

    certificates: List[CertifiedNullity] = []
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cert in pool.map(_certify_block, tasks):
                certificates.append(cert)
                budget.check_time("modular block ranks")
    else:
        for task in tasks:
            budget.check_time("modular block ranks")
            certificates.append(_certify_block(task))

    unresolved = sum(1 for c in certificates if not c.certified)
    if unresolved:
        logger.warning(f"{unresolved} of {len(certificates)} blocks unresolved modulo the sampled primes")
    return BlockedKernel(
        mode=mode,
        cols=cols,
        kernel=None,
        block_certificates=tuple((b.key, c) for b, c in zip(blocks, certificates)),
        known=known_space,
    )


def resolve_mode(mode: str, n: int, exact_dim_limit: int) -> str:
    if mode == "auto":
        return "exact" if n <= exact_dim_limit else "modular"
    if mode not in ("exact", "modular"):
        raise ValueError(f"Unknown mode {mode!r}")
    return mode


# ---------------------------------------------------------------------------
# Formal curvature maps


@dataclass(frozen=True)
class CurvatureResult:
    mode: str
    blocked: BlockedKernel
    bracket: Subspace
    scalar: Optional[Fraction]

    @property
    def dim(self) -> Optional[int]:
        return self.blocked.dim

    @property
    def certified(self) -> bool:
        return self.blocked.certified

    @property
    def generated_by_bracket(self) -> bool:
        space = self.blocked.space
        return space is not None and space == self.bracket


def formal_curvature_space(
    L: LieAlgebra,
    mode: str = "exact",
    primes: Sequence[int] = (),
    budget: Optional[Budget] = None,
    workers: int = 1,
    cache_dir: Optional[Path] = None,
    seed: int = 0,
) -> CurvatureResult:
    """K(g^) = kernel of h -> h#, solved exactly or certified against span(bracket)"""
    op = bianchi_operator(L)
    blocks = operator_blocks(L, op, budget=budget, cache_dir=cache_dir)
    br = bracket_element(L)
    bracket_space = Subspace.span(op.cols, [br])
    blocked = blocked_kernel(
        blocks, op.cols, mode, known=[br], primes=primes, budget=budget, workers=workers, seed=seed,
    )
    scalar = None
    space = blocked.space
    if space is not None and space.dim == 1 and space == bracket_space:
        generator = space.vectors()[0]
        p = space.pivots[0]
        scalar = generator[p] / br[p]
    logger.info(f"K(g^) for {L.name} ({mode}): dim {blocked.dim}, certified={blocked.certified}")
    return CurvatureResult(mode=mode, blocked=blocked, bracket=bracket_space, scalar=scalar)


def spencer_kernel(
    L: LieAlgebra,
    mode: str = "exact",
    hat: bool = True,
    primes: Sequence[int] = (),
    budget: Optional[Budget] = None,
    workers: int = 1,
    seed: int = 0,
) -> BlockedKernel:
    """Kernel of the Spencer map on Hom(g, g^) (or Hom(g, ad g))"""
    op = spencer_operator(L, hat)
    blocks = operator_blocks(L, op, budget=budget)
    return blocked_kernel(blocks, op.cols, mode, primes=primes, budget=budget, workers=workers, seed=seed)