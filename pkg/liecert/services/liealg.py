"""Simple Lie algebras in a Chevalley basis

Basis order: the Cartan elements h_1..h_l, then one root vector x_a per root in
the deterministic root order of the root system. Structure constants for root
pairs come from the extraspecial-pair procedure; the exhaustive Jacobi check
is what certifies the result.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
import logging

from liecert.services import cache
from liecert.services.exactla import Vec
from liecert.services.rootsys import Root, RootSystem, pairing

logger = logging.getLogger(__name__)

Term = Tuple[int, Fraction]


class ConstructionError(RuntimeError):
    """An internal consistency check failed while building an algebraic object"""


@dataclass(frozen=True)
class Element:
    """A vector of g in basis coordinates"""
    coords: Tuple[Fraction, ...]

    @classmethod
    def from_vec(cls, n: int, vec: Mapping[int, object]) -> "Element":
        coords = [Fraction(0)] * n
        for i, value in vec.items():
            coords[i] = Fraction(value)
        return cls(tuple(coords))

    @classmethod
    def basis(cls, n: int, i: int) -> "Element":
        return cls.from_vec(n, {i: 1})

    @classmethod
    def zero(cls, n: int) -> "Element":
        return cls(tuple(Fraction(0) for _ in range(n)))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def to_vec(self) -> Vec:
        return {i: c for i, c in enumerate(self.coords) if c}

    def __add__(self, other: "Element") -> "Element":
        _same_dim(self.dim, other.dim)
        return Element(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Element") -> "Element":
        _same_dim(self.dim, other.dim)
        return Element(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rmul__(self, scalar) -> "Element":
        s = Fraction(scalar)
        return Element(tuple(s * a for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def _same_dim(a: int, b: int) -> None:
    if a != b:
        raise ValueError(f"Dimension mismatch: {a} vs {b}")


def add_into(target: Dict[int, Fraction], vec: Mapping[int, Fraction], scale: Fraction = Fraction(1)) -> None:
    """target += scale * vec, dropping cancelled entries"""
    for k, v in vec.items():
        value = target.get(k, 0) + scale * v
        if value:
            target[k] = value
        else:
            target.pop(k, None)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Structure constants of g over its Chevalley basis"""
    root_system: RootSystem
    basis_labels: Tuple[str, ...]
    weights: Tuple[Root, ...]
    structure: Mapping[Tuple[int, int], Tuple[Term, ...]] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def rank(self) -> int:
        return self.root_system.rank

    @property
    def name(self) -> str:
        return self.root_system.name

    @cached_property
    def root_index(self) -> Dict[Root, int]:
        offset = self.rank
        return {root: offset + i for i, root in enumerate(self.root_system.roots)}

    def index_of(self, root: Sequence[int]) -> int:
        try:
            return self.root_index[tuple(root)]
        except KeyError:
            raise ValueError(f"{tuple(root)} is not a root of {self.name}") from None

    @property
    def theta_index(self) -> int:
        return self.index_of(self.root_system.highest_root)

    @property
    def minus_theta_index(self) -> int:
        return self.index_of(tuple(-c for c in self.root_system.highest_root))

    def bracket_basis(self, i: int, j: int) -> Tuple[Term, ...]:
        return self.structure.get((i, j), ())

    def bracket_vec(self, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> Vec:
        out: Vec = {}
        for i, a in x.items():
            if not a:
                continue
            for j, b in y.items():
                if not b:
                    continue
                for k, c in self.structure.get((i, j), ()):
                    value = out.get(k, 0) + a * b * c
                    if value:
                        out[k] = value
                    else:
                        out.pop(k, None)
        return out

    def ad_basis_vec(self, i: int, y: Mapping[int, Fraction]) -> Vec:
        """[e_i, y]"""
        out: Vec = {}
        for j, b in y.items():
            for k, c in self.structure.get((i, j), ()):
                value = out.get(k, 0) + b * c
                if value:
                    out[k] = value
                else:
                    out.pop(k, None)
        return out

    @cached_property
    def killing_gram(self) -> Tuple[Tuple[Fraction, ...], ...]:
        n = self.dim
        by_weight: Dict[Root, List[int]] = {}
        for i, w in enumerate(self.weights):
            by_weight.setdefault(w, []).append(i)
        gram = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            opposite = tuple(-c for c in self.weights[i])
            for j in by_weight.get(opposite, ()):
                if j < i:
                    continue
                total = Fraction(0)
                for k in range(n):
                    for l, c in self.structure.get((j, k), ()):
                        for m, d in self.structure.get((i, l), ()):
                            if m == k:
                                total += c * d
                gram[i][j] = gram[j][i] = total
        return tuple(tuple(row) for row in gram)

    @cached_property
    def killing_inverse(self) -> Tuple[Tuple[Fraction, ...], ...]:
        """Inverse Gram matrix; B pairs weight w only with weight -w"""
        from liecert.services.exactla import inverse

        n = self.dim
        gram = self.killing_gram
        inv = [[Fraction(0)] * n for _ in range(n)]
        cartan = list(range(self.rank))
        block = inverse([[gram[i][j] for j in cartan] for i in cartan])
        for a, i in enumerate(cartan):
            for b, j in enumerate(cartan):
                inv[i][j] = block[a][b]
        for i in range(self.rank, n):
            j = self.index_of(tuple(-c for c in self.weights[i]))
            if not gram[i][j]:
                raise ConstructionError(f"Killing form vanishes on {self.basis_labels[i]} x {self.basis_labels[j]}")
            inv[j][i] = 1 / gram[i][j]
        return tuple(tuple(row) for row in inv)


def bracket(L: LieAlgebra, x: Element, y: Element) -> Element:
    _same_dim(L.dim, x.dim)
    _same_dim(L.dim, y.dim)
    return Element.from_vec(L.dim, L.bracket_vec(x.to_vec(), y.to_vec()))


def ad_matrix(L: LieAlgebra, x: Element) -> List[List[Fraction]]:
    """Matrix of ad_x; column j is [x, e_j]"""
    _same_dim(L.dim, x.dim)
    n = L.dim
    matrix = [[Fraction(0)] * n for _ in range(n)]
    xv = x.to_vec()
    for j in range(n):
        for k, c in L.bracket_vec(xv, {j: Fraction(1)}).items():
            matrix[k][j] = c
    return matrix


def killing_form(L: LieAlgebra, x: Element, y: Element) -> Fraction:
    _same_dim(L.dim, x.dim)
    _same_dim(L.dim, y.dim)
    return killing_form_vec(L, x.to_vec(), y.to_vec())


def killing_form_vec(L: LieAlgebra, x: Mapping[int, Fraction], y: Mapping[int, Fraction]) -> Fraction:
    gram = L.killing_gram
    total = Fraction(0)
    for i, a in x.items():
        row = gram[i]
        for j, b in y.items():
            if row[j]:
                total += a * b * row[j]
    return total


def flat(L: LieAlgebra, b: Sequence[Sequence[object]]) -> List[List[Fraction]]:
    """b-flat = G^-1 b, so that B(b-flat v, w) = b(v, w)"""
    n = L.dim
    if len(b) != n or any(len(row) != n for row in b):
        raise ValueError(f"Bilinear form must be {n}x{n}")
    inv = L.killing_inverse
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for k in range(n):
            g = inv[i][k]
            if not g:
                continue
            row = b[k]
            for j in range(n):
                if row[j]:
                    out[i][j] += g * Fraction(row[j])
    return out


def coroot(L: LieAlgebra, root: Sequence[int]) -> Vec:
    """h_a = [x_a, x_-a] in Cartan coordinates"""
    rs = L.root_system
    root = tuple(root)
    if not rs.is_root(root):
        raise ValueError(f"{root} is not a root of {L.name}")
    norm = rs.inner(root, root)
    out: Vec = {}
    for i, c in enumerate(root):
        if c:
            out[i] = c * rs.length_squares[i] / norm
    return out


def grading_element(L: LieAlgebra) -> Vec:
    """E = h_theta, acting by <a, theta> on x_a"""
    return coroot(L, L.root_system.highest_root)


def exp_ad(L: LieAlgebra, x: Mapping[int, Fraction], v: Mapping[int, Fraction], t: Fraction) -> Vec:
    """exp(t ad_x) v for nilpotent ad_x, summed exactly"""
    result: Vec = dict(v)
    term: Vec = dict(v)
    k = 0
    while True:
        k += 1
        term = {i: c * t / k for i, c in L.bracket_vec(x, term).items()}
        if not term:
            return result
        if k > 2 * L.dim + 2:
            raise ConstructionError("ad_x is not nilpotent")
        add_into(result, term)


def jacobi_failures(L: LieAlgebra, tick: Optional[Callable[[], None]] = None) -> List[Tuple[int, int, int]]:
    """Basis triples violating the Jacobi identity"""
    n = L.dim
    failures = []
    for i in range(n):
        if tick:
            tick()
        ei = {i: Fraction(1)}
        for j in range(i + 1, n):
            ej = {j: Fraction(1)}
            for k in range(j + 1, n):
                ek = {k: Fraction(1)}
                total: Vec = {}
                add_into(total, L.bracket_vec(ei, L.bracket_vec(ej, ek)))
                add_into(total, L.bracket_vec(ej, L.bracket_vec(ek, ei)))
                add_into(total, L.bracket_vec(ek, L.bracket_vec(ei, ej)))
                if total:
                    failures.append((i, j, k))
    return failures


def antisymmetry_failures(L: LieAlgebra) -> List[Tuple[int, int]]:
    n = L.dim
    bad = []
    for i in range(n):
        for j in range(n):
            left = dict(L.bracket_basis(i, j))
            right = {k: -c for k, c in L.bracket_basis(j, i)}
            if left != right:
                bad.append((i, j))
    return bad


def killing_invariance_failures(L: LieAlgebra, tick: Optional[Callable[[], None]] = None) -> List[Tuple[int, int, int]]:
    """Triples with B([x,y],z) + B(y,[x,z]) != 0"""
    n = L.dim
    bad = []
    for x in range(n):
        if tick:
            tick()
        for y in range(n):
            xy = L.ad_basis_vec(x, {y: Fraction(1)})
            for z in range(n):
                xz = L.ad_basis_vec(x, {z: Fraction(1)})
                if killing_form_vec(L, xy, {z: Fraction(1)}) + killing_form_vec(L, {y: Fraction(1)}, xz):
                    bad.append((x, y, z))
    return bad


# ---------------------------------------------------------------------------
# Construction


class _StructureConstants:
    """N_{a,b} for root pairs, fixed on extraspecial pairs and propagated"""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.table: Dict[Tuple[Root, Root], int] = {}
        self.positive = rs.positive_roots
        self.order = {root: i for i, root in enumerate(self.positive)}

    def string_below(self, beta: Root, alpha: Root) -> int:
        """Largest p with beta - p*alpha a root"""
        p = 0
        while self.rs.is_root(tuple(b - (p + 1) * a for a, b in zip(alpha, beta))):
            p += 1
        return p

    def norm(self, root: Sequence[int]) -> Fraction:
        return self.rs.inner(root, root)

    def lookup(self, x: Root, y: Root) -> int:
        """N_{x,y} for roots with x + y a root"""
        if sum(x) > 0 and sum(y) > 0:
            if (x, y) in self.table:
                return self.table[(x, y)]
            if (y, x) in self.table:
                return -self.table[(y, x)]
            raise ConstructionError(f"N{x},{y} requested before it was fixed")
        if sum(x) < 0 and sum(y) < 0:
            return -self.lookup(_neg(x), _neg(y))
        z = _neg(_plus(x, y))
        if (sum(y) > 0) == (sum(z) > 0):
            value = self.norm(z) / self.norm(x) * self.lookup(y, z)
        else:
            value = self.norm(z) / self.norm(y) * self.lookup(z, x)
        if value.denominator != 1:
            raise ConstructionError(f"Non-integral N{x},{y} = {value}")
        return int(value)

    def build(self) -> None:
        for xi in self.positive:
            pairs = [
                (a, _minus(xi, a))
                for a in self.positive
                if self.rs.is_root(_minus(xi, a)) and sum(_minus(xi, a)) > 0
                and self.order[a] < self.order[_minus(xi, a)]
            ]
            if not pairs:
                continue
            alpha, beta = min(pairs, key=lambda pair: self.order[pair[0]])
            n_extra = self.string_below(beta, alpha) + 1
            self.table[(alpha, beta)] = n_extra
            for gamma, delta in pairs:
                if gamma == alpha:
                    continue
                total = Fraction(0)
                beta_gamma = _minus(beta, gamma)
                if self.rs.is_root(beta_gamma):
                    total += Fraction(
                        self.lookup(beta, _neg(gamma)) * self.lookup(alpha, _neg(delta)),
                    ) / self.norm(beta_gamma)
                alpha_gamma = _minus(alpha, gamma)
                if self.rs.is_root(alpha_gamma):
                    total += Fraction(
                        self.lookup(_neg(gamma), alpha) * self.lookup(beta, _neg(delta)),
                    ) / self.norm(alpha_gamma)
                value = self.norm(xi) / n_extra * total
                expected = self.string_below(delta, gamma) + 1
                if value.denominator != 1 or value * value != expected * expected:
                    raise ConstructionError(
                        f"Sign propagation failed for {gamma}+{delta}={xi}: got {value}, expected +-{expected}"
                    )
                self.table[(gamma, delta)] = int(value)


def _neg(a: Sequence[int]) -> Root:
    return tuple(-x for x in a)


def _plus(a: Sequence[int], b: Sequence[int]) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def _minus(a: Sequence[int], b: Sequence[int]) -> Root:
    return tuple(x - y for x, y in zip(a, b))


def _root_label(root: Root) -> str:
    return "x(" + ",".join(str(c) for c in root) + ")"


def _compute_structure(rs: RootSystem) -> Dict[Tuple[int, int], Tuple[Term, ...]]:
    constants = _StructureConstants(rs)
    constants.build()

    ell = rs.rank
    index = {root: ell + i for i, root in enumerate(rs.roots)}
    table: Dict[Tuple[int, int], Dict[int, Fraction]] = {}

    def put(i: int, j: int, k: int, value) -> None:
        value = Fraction(value)
        if value:
            table.setdefault((i, j), {})[k] = value
            table.setdefault((j, i), {})[k] = -value

    for root in rs.roots:
        a = index[root]
        for i in range(ell):
            put(i, a, a, pairing(rs, root, rs.simple_roots[i]))
    for root in rs.roots:
        a = index[root]
        if sum(root) > 0:
            minus = index[_neg(root)]
            norm = rs.inner(root, root)
            for i, c in enumerate(root):
                if c:
                    put(a, minus, i, c * rs.length_squares[i] / norm)
    for x in rs.roots:
        for y in rs.roots:
            if index[x] >= index[y]:
                continue
            total = _plus(x, y)
            if rs.is_root(total):
                put(index[x], index[y], index[total], constants.lookup(x, y))
    return {key: tuple(sorted(terms.items())) for key, terms in table.items()}


def _algebra_from_structure(rs: RootSystem, structure) -> LieAlgebra:
    labels = tuple(f"h{i + 1}" for i in range(rs.rank)) + tuple(_root_label(r) for r in rs.roots)
    zero = tuple(0 for _ in range(rs.rank))
    weights = (zero,) * rs.rank + tuple(rs.roots)
    return LieAlgebra(root_system=rs, basis_labels=labels, weights=weights, structure=structure)


def _structure_entries(structure) -> Iterable[cache.Entry]:
    for (i, j) in sorted(structure):
        if i < j:
            for k, value in structure[(i, j)]:
                yield (i, j, k), value


def _structure_from_entries(entries) -> Dict[Tuple[int, int], Tuple[Term, ...]]:
    table: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
    for (i, j, k), value in entries:
        table.setdefault((i, j), {})[k] = value
        table.setdefault((j, i), {})[k] = -value
    return {key: tuple(sorted(terms.items())) for key, terms in table.items()}


def structure_cache_path(rs: RootSystem, cache_dir: Path) -> Path:
    return cache.cache_path(cache_dir, "structure", rs.type_label, rs.rank, cache.engine_version())


def build_chevalley(rs: RootSystem, cache_dir: Optional[Path] = None) -> LieAlgebra:
    """Chevalley basis structure constants for rs, read from or written to cache_dir"""
    header = {
        "kind": "structure",
        "type": rs.type_label,
        "rank": rs.rank,
        "dim": rs.dimension,
        "hash": cache.engine_version(),
    }
    path = structure_cache_path(rs, cache_dir) if cache_dir is not None else None
    if path is not None and path.exists():
        try:
            stored, entries = cache.read_entries(path)
            if cache.header_matches(stored, header):
                logger.info(f"Loaded {rs.name} structure constants from {path}")
                return _algebra_from_structure(rs, _structure_from_entries(entries))
            logger.warning(f"Ignoring stale cache {path}")
        except ValueError as e:
            logger.warning(f"Ignoring unreadable cache {path}: {e}")

    structure = _compute_structure(rs)
    algebra = _algebra_from_structure(rs, structure)
    logger.info(f"Built {rs.name}: dim {algebra.dim}, {len(structure)} nonzero basis brackets")
    if path is not None:
        cache.write_entries(path, header, _structure_entries(structure))
    return algebra
