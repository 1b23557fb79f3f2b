"""Root systems of the simple types"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import re

logger = logging.getLogger(__name__)

Root = Tuple[int, ...]

TYPE_LABELS = ("A", "B", "C", "D", "E", "F", "G")

_TYPE_PATTERN = re.compile(r"^\s*([A-Ga-g])\s*(\d+)\s*$")


def _check_rank(type_label: str, rank: int) -> None:
    valid = {
        "A": rank >= 1,
        "B": rank >= 2,
        "C": rank >= 2,
        "D": rank >= 3,
        "E": rank in (6, 7, 8),
        "F": rank == 4,
        "G": rank == 2,
    }
    if type_label not in valid:
        raise ValueError(f"Unknown type label {type_label!r}; expected one of {', '.join(TYPE_LABELS)}")
    if not valid[type_label]:
        raise ValueError(f"{type_label}{rank} is not a simple type")


def parse_type(text: str) -> Tuple[str, int]:
    """Parse strings such as 'A2', 'g2' or 'E6' into (type_label, rank)"""
    match = _TYPE_PATTERN.match(text)
    if not match:
        raise ValueError(f"Cannot parse type {text!r}; expected e.g. A2, B3, G2")
    type_label, rank = match.group(1).upper(), int(match.group(2))
    _check_rank(type_label, rank)
    return type_label, rank


def _simple_root_gram(type_label: str, rank: int) -> List[List[Fraction]]:
    """Inner products of simple roots, long roots normalized to square 2"""
    lengths = [Fraction(2)] * rank
    edges: List[Tuple[int, int, Fraction]] = []
    chain = [(i, i + 1, Fraction(-1)) for i in range(rank - 1)]

    if type_label == "A":
        edges = chain
    elif type_label == "B":
        lengths[-1] = Fraction(1)
        edges = chain
    elif type_label == "C":
        lengths = [Fraction(1)] * (rank - 1) + [Fraction(2)]
        edges = [(i, i + 1, Fraction(-1, 2)) for i in range(rank - 2)]
        edges.append((rank - 2, rank - 1, Fraction(-1)))
    elif type_label == "D":
        edges = [(i, i + 1, Fraction(-1)) for i in range(rank - 2)]
        edges.append((rank - 3, rank - 1, Fraction(-1)))
    elif type_label == "E":
        # Bourbaki numbering: alpha_2 hangs off alpha_4
        edges = [(0, 2, Fraction(-1)), (1, 3, Fraction(-1))]
        edges += [(i, i + 1, Fraction(-1)) for i in range(2, rank - 1)]
    elif type_label == "F":
        lengths = [Fraction(2), Fraction(2), Fraction(1), Fraction(1)]
        edges = [(0, 1, Fraction(-1)), (1, 2, Fraction(-1)), (2, 3, Fraction(-1, 2))]
    elif type_label == "G":
        lengths = [Fraction(2, 3), Fraction(2)]
        edges = [(0, 1, Fraction(-1))]

    gram = [[Fraction(0)] * rank for _ in range(rank)]
    for i in range(rank):
        gram[i][i] = lengths[i]
    for i, j, value in edges:
        gram[i][j] = gram[j][i] = value
    return gram


@dataclass(frozen=True)
class RootSystem:
    """Roots as integer coefficient vectors over the simple roots"""
    type_label: str
    rank: int
    simple_roots: Tuple[Root, ...]
    roots: Tuple[Root, ...]
    cartan_matrix: Tuple[Tuple[int, ...], ...]
    length_squares: Tuple[Fraction, ...]
    highest_root: Root
    gram: Tuple[Tuple[Fraction, ...], ...] = field(repr=False)
    root_set: frozenset = field(default=frozenset(), repr=False, compare=False)

    @property
    def name(self) -> str:
        return f"{self.type_label}{self.rank}"

    @property
    def positive_roots(self) -> Tuple[Root, ...]:
        return tuple(r for r in self.roots if sum(r) > 0)

    @property
    def dimension(self) -> int:
        return self.rank + len(self.roots)

    def inner(self, a: Sequence, b: Sequence) -> Fraction:
        """Invariant form (a, b) on the root lattice"""
        total = Fraction(0)
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.gram[i]
            for j, bj in enumerate(b):
                if bj:
                    total += ai * bj * row[j]
        return total

    def is_root(self, vector: Sequence[int]) -> bool:
        return tuple(vector) in self.root_set


def height(root: Sequence[int]) -> int:
    return sum(root)


def _unit(rank: int, i: int) -> Root:
    return tuple(1 if k == i else 0 for k in range(rank))


def _add(a: Sequence[int], b: Sequence[int], scale: int = 1) -> Root:
    return tuple(x + scale * y for x, y in zip(a, b))


def _enumerate_positive_roots(rank: int, gram: List[List[Fraction]]) -> List[Root]:
    """Grow positive roots level by level using root strings"""
    simple = [_unit(rank, i) for i in range(rank)]
    known = set(simple)
    level = list(simple)
    positive = list(simple)

    def pair_with_simple(beta: Root, i: int) -> int:
        value = 2 * sum(beta[j] * gram[j][i] for j in range(rank)) / gram[i][i]
        if value.denominator != 1:
            raise ValueError(f"Non-integral pairing of {beta} with simple root {i}")
        return int(value)

    while level:
        next_level = set()
        for beta in level:
            for i in range(rank):
                if beta == simple[i]:
                    continue
                down = 0
                while _add(beta, simple[i], -(down + 1)) in known:
                    down += 1
                up = down - pair_with_simple(beta, i)
                if up > 0:
                    candidate = _add(beta, simple[i])
                    if candidate not in known:
                        next_level.add(candidate)
        level = sorted(next_level)
        known.update(level)
        positive.extend(level)
    return positive


def _root_key(root: Root) -> Tuple[int, Root]:
    return (height(root), root)


@lru_cache(maxsize=None)
def build_root_system(type_label: str, rank: int) -> RootSystem:
    """Build the root system of the simple type (type_label, rank)"""
    type_label = type_label.upper()
    _check_rank(type_label, rank)
    gram = _simple_root_gram(type_label, rank)

    cartan = tuple(
        tuple(int(2 * gram[i][j] / gram[j][j]) for j in range(rank))
        for i in range(rank)
    )
    positive = _enumerate_positive_roots(rank, gram)
    negative = [tuple(-c for c in r) for r in positive]
    roots = tuple(sorted(positive + negative, key=_root_key))
    highest = max(positive, key=_root_key)

    rs = RootSystem(
        type_label=type_label,
        rank=rank,
        simple_roots=tuple(_unit(rank, i) for i in range(rank)),
        roots=roots,
        cartan_matrix=cartan,
        length_squares=tuple(gram[i][i] for i in range(rank)),
        highest_root=highest,
        gram=tuple(tuple(row) for row in gram),
        root_set=frozenset(roots),
    )
    logger.debug(f"Built root system {rs.name}: {len(roots)} roots, highest root {highest}")
    return rs


def pairing(rs: RootSystem, alpha: Sequence[int], beta: Sequence[int]) -> int:
    """Cartan integer <alpha, beta> = 2(alpha, beta)/(beta, beta)"""
    if not any(beta):
        raise ValueError("Cannot pair against the zero vector")
    value = 2 * rs.inner(alpha, beta) / rs.inner(beta, beta)
    if value.denominator != 1:
        raise ValueError(f"<{tuple(alpha)}, {tuple(beta)}> = {value} is not an integer")
    return int(value)


def level_partition(rs: RootSystem) -> Dict[int, Tuple[Root, ...]]:
    """Roots grouped by their pairing with the highest root"""
    levels: Dict[int, List[Root]] = {i: [] for i in range(-2, 3)}
    for root in rs.roots:
        level = pairing(rs, root, rs.highest_root)
        if level not in levels:
            raise ValueError(f"Root {root} sits at level {level}, outside [-2, 2]")
        levels[level].append(root)
    return {i: tuple(members) for i, members in levels.items()}


def distinguished_simple_root(rs: RootSystem) -> Optional[int]:
    """Index of the only simple root pairing nontrivially with theta, if unique"""
    hits = [i for i, a in enumerate(rs.simple_roots) if pairing(rs, a, rs.highest_root) != 0]
    return hits[0] if len(hits) == 1 else None


def dynkin_labels(rs: RootSystem, weight: Sequence[int]) -> Tuple[int, ...]:
    """Coordinates of a root-lattice weight against the simple coroots"""
    return tuple(pairing(rs, weight, a) for a in rs.simple_roots)


def root_string(rs: RootSystem, beta: Root, alpha: Root) -> Tuple[int, int]:
    """(down, up): beta - down*alpha .. beta + up*alpha is the alpha-string through beta"""
    down = 0
    while rs.is_root(_add(beta, alpha, -(down + 1))):
        down += 1
    up = 0
    while rs.is_root(_add(beta, alpha, up + 1)):
        up += 1
    return down, up


def weyl_dimension(rs: RootSystem, labels: Sequence[int]) -> int:
    """Dimension of the irreducible module with the given highest-weight labels"""
    if len(labels) != rs.rank:
        raise ValueError(f"Expected {rs.rank} labels, got {len(labels)}")
    if any(v < 0 for v in labels):
        raise ValueError(f"Labels {tuple(labels)} are not dominant")
    result = Fraction(1)
    for alpha in rs.positive_roots:
        # (lambda, alpha^vee) = sum_i lambda_i c_i |alpha_i|^2 / |alpha|^2; the |alpha|^2 cancels
        numerator = sum((labels[i] + 1) * alpha[i] * rs.length_squares[i] for i in range(rs.rank))
        denominator = sum(alpha[i] * rs.length_squares[i] for i in range(rs.rank))
        result *= Fraction(numerator) / Fraction(denominator)
    if result.denominator != 1:
        raise ValueError(f"Weyl dimension {result} is not integral")
    return int(result)
