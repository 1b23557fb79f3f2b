"""Contact grading g = g2 + g1 + g0 + g-1 + g-2 attached to the highest root"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple
import logging

from liecert.services.exactla import SparseMat, Subspace, rank, subspace_sum
from liecert.services.liealg import LieAlgebra, grading_element, killing_form_vec
from liecert.services.rootsys import pairing

logger = logging.getLogger(__name__)

LEVELS = (2, 1, 0, -1, -2)


@dataclass(frozen=True, eq=False)
class ContactGrading:
    levels: Dict[int, Subspace]
    E: Dict[int, Fraction]
    theta_vector: Dict[int, Fraction]
    minus_theta_vector: Dict[int, Fraction]
    level_of_basis: Tuple[int, ...] = field(repr=False)

    def basis_at(self, level: int) -> List[int]:
        return [i for i, lv in enumerate(self.level_of_basis) if lv == level]

    @property
    def dims(self) -> Dict[int, int]:
        return {i: self.levels[i].dim for i in LEVELS}


def contact_grading(L: LieAlgebra) -> ContactGrading:
    rs = L.root_system
    theta = rs.highest_root
    level_of_basis = [0] * L.rank
    for root in rs.roots:
        level_of_basis.append(pairing(rs, root, theta))
    if any(abs(lv) > 2 for lv in level_of_basis):
        raise ValueError(f"{L.name} has roots outside levels -2..2")

    levels = {
        lv: Subspace.span(L.dim, ({i: Fraction(1)} for i, x in enumerate(level_of_basis) if x == lv))
        for lv in LEVELS
    }
    grading = ContactGrading(
        levels=levels,
        E=grading_element(L),
        theta_vector={L.theta_index: Fraction(1)},
        minus_theta_vector={L.minus_theta_index: Fraction(1)},
        level_of_basis=tuple(level_of_basis),
    )
    logger.debug(f"{L.name} grading dims {grading.dims}")
    return grading


@dataclass
class GradingReport:
    clauses: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())

    @property
    def failed(self) -> List[str]:
        return [name for name, ok in self.clauses.items() if not ok]


def _bracket_lands_in(L: LieAlgebra, cg: ContactGrading, i: int, j: int) -> bool:
    target = i + j
    for a in cg.basis_at(i):
        for b in cg.basis_at(j):
            for k, _ in L.bracket_basis(a, b):
                if abs(target) > 2 or cg.level_of_basis[k] != target:
                    return False
    return True


def _pairing_rank(L: LieAlgebra, rows: List[int], cols: List[int], value) -> int:
    entries = [(r, c, value(a, b)) for r, a in enumerate(rows) for c, b in enumerate(cols)]
    return rank(SparseMat.from_entries(len(rows), len(cols), ((r, c, v) for r, c, v in entries if v)))


def check_grading(L: LieAlgebra, cg: ContactGrading) -> GradingReport:
    """Evaluate every clause of the contact-grading structure exactly"""
    dims = cg.dims
    clauses: Dict[str, bool] = {}

    total = Subspace.zero(L.dim)
    for lv in LEVELS:
        total = subspace_sum(total, cg.levels[lv])
    clauses["levels_span_g"] = total.dim == L.dim and sum(dims.values()) == L.dim
    clauses["top_levels_one_dimensional"] = dims[2] == 1 and dims[-2] == 1
    clauses["top_level_is_theta"] = cg.levels[2].contains(cg.theta_vector)
    clauses["levels_symmetric"] = all(dims[i] == dims[-i] for i in (1, 2))
    clauses["bracket_compatible"] = all(_bracket_lands_in(L, cg, i, j) for i in LEVELS for j in LEVELS)

    eigen_ok = True
    for lv in LEVELS:
        for a in cg.basis_at(lv):
            if L.bracket_vec(cg.E, {a: Fraction(1)}) != ({a: Fraction(lv)} if lv else {}):
                eigen_ok = False
    clauses["grading_element_eigenvalues"] = eigen_ok
    clauses["theta_normalization"] = L.bracket_vec(cg.E, cg.theta_vector) == {L.theta_index: Fraction(2)}

    top = L.bracket_vec(cg.theta_vector, cg.minus_theta_vector)
    clauses["top_bracket_is_E"] = bool(top) and Subspace.span(L.dim, [top]) == Subspace.span(L.dim, [cg.E])

    clauses["killing_orthogonal"] = all(
        not L.killing_gram[a][b]
        for i in LEVELS for j in LEVELS if i + j != 0
        for a in cg.basis_at(i) for b in cg.basis_at(j)
    )
    clauses["killing_nondegenerate"] = all(
        _pairing_rank(L, cg.basis_at(i), cg.basis_at(-i), lambda a, b: L.killing_gram[a][b]) == dims[i]
        for i in LEVELS
    )
    clauses["killing_E_nonzero"] = killing_form_vec(L, cg.E, cg.E) != 0

    theta = L.theta_index
    g1 = cg.basis_at(1)
    clauses["g1_pairing_nondegenerate"] = (
        _pairing_rank(L, g1, g1, lambda a, b: dict(L.bracket_basis(a, b)).get(theta, 0)) == len(g1)
    )
    clauses["g0_preserves_g2"] = _bracket_lands_in(L, cg, 0, 2)

    image = [L.bracket_vec(cg.theta_vector, {b: Fraction(1)}) for b in cg.basis_at(-2)]
    image_space = Subspace.span(L.dim, image)
    clauses["theta_bracket_g_minus2"] = (
        image_space.dim == 1 and killing_form_vec(L, image_space.vectors()[0], cg.E) != 0
    )

    report = GradingReport(clauses)
    if not report.passed:
        logger.warning(f"{L.name} grading clauses failed: {report.failed}")
    return report
