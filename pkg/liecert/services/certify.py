"""Verification pipelines for the algebra identities and their certificates"""
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from itertools import islice
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import json
import logging

from liecert.config import Settings, get_settings
from liecert.db.database import init_db, session_scope
from liecert.models.certificate import AlgebraInfo, Anchor, Certificate, encode_rational, encode_vector
from liecert.models.models import CertificateRecord, Outcome, ReplayDrift
from liecert.services import cache
from liecert.services.budget import Budget, ResourceLimitExceeded
from liecert.services.diff_engine import DiffEngine
from liecert.services.exactla import Subspace, draw_primes
from liecert.services.grading import ContactGrading, check_grading, contact_grading
from liecert.services.liealg import (
    ConstructionError,
    LieAlgebra,
    antisymmetry_failures,
    build_chevalley,
    jacobi_failures,
    killing_invariance_failures,
)
from liecert.services.operators import (
    formal_curvature_space,
    resolve_mode,
    spencer_kernel,
    sym2_dim,
    wedge2_dim,
)
from liecert.services.orbit import (
    StabilityStatus,
    StabilizedKernel,
    TensorModule,
    base_sample,
    bracket_hom,
    build_S,
    contact_hyperplane,
    evaluate_quadric,
    gu_pointwise_checks,
    highest_weights,
    iter_orbit_samples,
    killing_quadric,
    sample_orbit,
    sigma_lower_bound,
    sigma_quadrics,
    spencer_image,
    spencer_image_respects_tangents,
    tangent_lines_span,
    wedge2_module,
    weyl_dimension_total,
    xi_prime_space,
    xi_space,
)
from liecert.services.rootsys import RootSystem, build_root_system, dynkin_labels, parse_type, weyl_dimension

logger = logging.getLogger(__name__)

CHECKS = (
    "jacobi",
    "grading",
    "bianchi_kernel",
    "spencer_injective",
    "sigma",
    "xi_equals_dS",
    "xi_prime",
    "span_wedge2",
    "summand_counts",
    "gu_lemma",
)

ANCHORS: Dict[str, Anchor] = {
    "jacobi": Anchor(
        label="chevalley-structure",
        statement="The Chevalley structure constants are antisymmetric, satisfy the Jacobi identity and leave the Killing form invariant.",
    ),
    "grading": Anchor(
        label="contact-grading",
        statement="The highest root grades g as g2 + g1 + g0 + g-1 + g-2 with g2 = C x_theta and [g2, g-2] = C E.",
    ),
    "bianchi_kernel": Anchor(
        label="formal-curvature-kernel",
        statement="The space of formal curvature maps of ad(g) + C Id is one-dimensional and generated by the Lie bracket.",
    ),
    "spencer_injective": Anchor(
        label="spencer-injectivity",
        statement="The Spencer map from Hom(g, ad(g) + C Id) to Hom(wedge2 g, g) is injective.",
    ),
    "sigma": Anchor(
        label="vanishing-quadrics",
        statement="The quadrics vanishing on the adjoint variety have codimension dim V(2 theta) in Sym2 g* and include the Killing form.",
    ),
    "xi_equals_dS": Anchor(
        label="spencer-image",
        statement="Xi of the adjoint variety equals the Spencer image of S = Hom(g, C Id) + ad(g) + flat(Sigma).",
    ),
    "xi_prime": Anchor(
        label="xi-prime",
        statement="Xi' of the adjoint variety is one-dimensional and generated by the Lie bracket.",
    ),
    "span_wedge2": Anchor(
        label="tangent-lines-span",
        statement="The tangent lines of the adjoint variety span wedge2 g.",
    ),
    "summand_counts": Anchor(
        label="summand-counts",
        statement="wedge2 g splits into the listed irreducible summands and Sigma / C B has s irreducible summands.",
    ),
    "gu_lemma": Anchor(
        label="orbit-tangent-identities",
        statement="For u on the cone: [g, u] = T_u, [T_u, u] lies in C u, [T_u-perp, T_u] lies in T_u and [u, D_u] = 0.",
    ),
}

_VERONESE_NOTE = "adjoint varieties of types A1 and C are Veronese images; the statement excludes them"
_TYPE_A_NOTE = "type A of rank at least 3 is excluded from this statement; values are reported without a verdict"
_NO_S_NOTE = "no summand count s is known for this type"


def canonical_type(type_label: str, rank: int) -> Tuple[str, int]:
    """B2 is handled as C2 and D3 as A3"""
    if (type_label, rank) == ("B", 2):
        return "C", 2
    if (type_label, rank) == ("D", 3):
        return "A", 3
    return type_label, rank


def expected_s(type_label: str, rank: int) -> Optional[int]:
    """Summands of Sigma / C B"""
    type_label, rank = canonical_type(type_label, rank)
    if (type_label, rank) in (("A", 2), ("G", 2), ("F", 4)) or type_label == "E":
        return 1
    if type_label == "B" and rank >= 3:
        return 2
    if type_label == "D":
        return 3 if rank == 4 else 2
    return None


def expected_wedge2_labels(rs: RootSystem) -> Optional[List[Tuple[int, ...]]]:
    """Highest weights of wedge2 g, where the numbering agrees with ours"""
    type_label, rank = rs.type_label, rs.rank
    adjoint = dynkin_labels(rs, rs.highest_root)

    def fundamental(*entries: Tuple[int, int]) -> Tuple[int, ...]:
        labels = [0] * rank
        for index, value in entries:
            labels[index - 1] += value
        return tuple(labels)

    if (type_label, rank) == ("A", 2):
        extra = [fundamental((1, 3)), fundamental((2, 3))]
    elif (type_label, rank) == ("B", 3):
        extra = [fundamental((1, 1), (3, 2))]
    elif type_label == "B" and rank >= 4:
        extra = [fundamental((1, 1), (3, 1))]
    elif (type_label, rank) == ("D", 4):
        extra = [fundamental((1, 1), (3, 1), (4, 1))]
    elif type_label == "D" and rank >= 5:
        extra = [fundamental((1, 1), (3, 1))]
    elif (type_label, rank) == ("G", 2):
        extra = [fundamental((1, 3))]
    else:
        return None
    return sorted(extra + [adjoint])


def scope_note(name: str, type_label: str, rank: int) -> Optional[str]:
    """Why a check only reports for this type, or None when it is in scope"""
    if name not in CHECKS:
        raise ValueError(f"Unknown check {name!r}; expected one of {', '.join(CHECKS)}")
    type_label, rank = canonical_type(type_label, rank)
    if name == "jacobi":
        return None
    if type_label == "C" or (type_label, rank) == ("A", 1):
        return _VERONESE_NOTE
    if name in ("bianchi_kernel", "xi_equals_dS") and type_label == "A" and rank >= 3:
        return _TYPE_A_NOTE
    if name == "summand_counts" and expected_s(type_label, rank) is None:
        return _NO_S_NOTE
    return None


@dataclass
class _Run:
    """Everything one check needs about its algebra and configuration"""
    rs: RootSystem
    budget: Budget
    mode: str
    primes: List[int]
    seed: int
    algebra: Callable[[], LieAlgebra]
    grading: Callable[[], ContactGrading]
    note: Optional[str] = None

    @property
    def L(self) -> LieAlgebra:
        return self.algebra()

    @property
    def cg(self) -> ContactGrading:
        return self.grading()


CheckResult = Tuple[Outcome, Dict[str, Any], Dict[str, Any]]


def _stability_outcome(status: StabilityStatus) -> Outcome:
    if status is StabilityStatus.CERTIFIED:
        return Outcome.CERTIFIED
    if status is StabilityStatus.PLATEAU:
        return Outcome.PLATEAU
    return Outcome.UNRESOLVED


def _stability_witness(result: StabilizedKernel) -> Dict[str, Any]:
    return {
        "dim": result.dim,
        "lower_bound": result.lower_bound,
        "status": result.status.value,
        "history": list(result.history),
        "samples_used": result.samples_used,
        "rows_added": result.rows_added,
        "mode": result.mode,
        "prime": result.prime,
    }


class VerificationService:
    """Runs checks under one configuration and records certificates in the ledger"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.diff_engine = DiffEngine()
        self._algebras: Dict[Tuple[str, int], LieAlgebra] = {}
        self._gradings: Dict[Tuple[str, int], ContactGrading] = {}
        self._sigma: Dict[Tuple[str, int, int], StabilizedKernel] = {}
        self._ledger_ready = False

    # -- algebra access -----------------------------------------------------

    def algebra(self, rs: RootSystem) -> LieAlgebra:
        key = (rs.type_label, rs.rank)
        if key not in self._algebras:
            self._algebras[key] = build_chevalley(rs, cache_dir=self.settings.cache_dir)
        return self._algebras[key]

    def grading(self, rs: RootSystem) -> ContactGrading:
        key = (rs.type_label, rs.rank)
        if key not in self._gradings:
            self._gradings[key] = contact_grading(self.algebra(rs))
        return self._gradings[key]

    def _new_run(self, rs: RootSystem, note: Optional[str]) -> _Run:
        s = self.settings
        return _Run(
            rs=rs,
            budget=Budget.from_settings(s),
            mode=resolve_mode(s.mode, rs.dimension, s.exact_dim_limit),
            primes=draw_primes(s.prime_count, s.effective_prime_seed),
            seed=s.seed,
            algebra=lambda: self.algebra(rs),
            grading=lambda: self.grading(rs),
            note=note,
        )

    def _samples(self, run: _Run, seed: Optional[int] = None):
        return islice(iter_orbit_samples(run.L, run.cg, run.seed if seed is None else seed), self.settings.max_samples)

    def _sampled(self, run: _Run, solve: Callable, label: str) -> Tuple[Optional[StabilizedKernel], List[int]]:
        """Run a sampled kernel exactly, or modulo the first prime that divides no denominator"""
        if run.mode == "exact":
            return solve(self._samples(run), "exact", None), []
        discarded: List[int] = []
        for p in run.primes:
            try:
                return solve(self._samples(run), "modular", p), discarded
            except ZeroDivisionError:
                logger.info(f"{label}: prime {p} divides a sample denominator; trying the next prime")
                discarded.append(p)
        return None, discarded

    def _sigma_result(self, run: _Run) -> StabilizedKernel:
        key = (run.rs.type_label, run.rs.rank, run.seed)
        if key not in self._sigma:
            L = run.L
            run.budget.require_dense(sym2_dim(L.dim), sym2_dim(L.dim), f"Sigma {L.name}")
            s = self.settings
            self._sigma[key] = sigma_quadrics(
                L,
                self._samples(run),
                lower_bound=sigma_lower_bound(L),
                batch_size=s.batch_size,
                patience=s.plateau_batches,
                budget=run.budget,
            )
        return self._sigma[key]

    # -- checks ---------------------------------------------------------------

    def _check_jacobi(self, run: _Run) -> CheckResult:
        L = run.L
        tick = lambda: run.budget.check_time(f"jacobi {L.name}")  # noqa: E731
        jacobi = jacobi_failures(L, tick=tick)
        antisymmetry = antisymmetry_failures(L)
        invariance = killing_invariance_failures(L, tick=tick)
        ok = not (jacobi or antisymmetry or invariance)
        witnesses = {
            "triples_checked": L.dim * (L.dim - 1) * (L.dim - 2) // 6,
            "jacobi_failures": [list(t) for t in jacobi[:10]],
            "antisymmetry_failures": [list(t) for t in antisymmetry[:10]],
            "killing_invariance_failures": [list(t) for t in invariance[:10]],
            "summary": "all basis triples pass" if ok else "structure constants fail",
        }
        claim = {"jacobi": True, "antisymmetric": True, "killing_invariant": True}
        return (Outcome.CERTIFIED if ok else Outcome.UNRESOLVED), claim, witnesses

    def _check_grading(self, run: _Run) -> CheckResult:
        L, cg = run.L, run.cg
        report = check_grading(L, cg)
        witnesses = {
            "level_dims": {str(k): v for k, v in sorted(cg.dims.items(), reverse=True)},
            "E": encode_vector(cg.E),
            "clauses": report.clauses,
            "summary": f"levels {[cg.dims[i] for i in (2, 1, 0, -1, -2)]}",
        }
        claim = {"clauses": sorted(report.clauses)}
        return (Outcome.CERTIFIED if report.passed else Outcome.UNRESOLVED), claim, witnesses

    def _check_bianchi_kernel(self, run: _Run) -> CheckResult:
        L = run.L
        result = formal_curvature_space(
            L,
            mode=run.mode,
            primes=run.primes,
            budget=run.budget,
            workers=self.settings.workers,
            cache_dir=self.settings.cache_dir,
            seed=run.seed,
        )
        blocked = result.blocked
        space = blocked.space
        witnesses: Dict[str, Any] = {
            "mode": run.mode,
            "dim": blocked.dim,
            "blocks": len(blocked.block_certificates) if blocked.block_certificates else None,
            "generators": [encode_vector(v) for v in space.vectors()] if space is not None else None,
            "scalar": encode_rational(result.scalar) if result.scalar is not None else None,
        }
        if run.mode == "modular":
            witnesses["primes"] = run.primes
            witnesses["block_certificates"] = blocked.block_witnesses()
        claim = {"dim": 1, "generated_by_bracket": True}
        if result.certified and result.dim == 1 and result.generated_by_bracket:
            outcome = Outcome.CERTIFIED
            witnesses["summary"] = f"dim 1, generator = {result.scalar} * bracket"
        else:
            outcome = Outcome.UNRESOLVED
            witnesses["summary"] = f"dim {blocked.dim}, certified={result.certified}"
        return outcome, claim, witnesses

    def _check_spencer_injective(self, run: _Run) -> CheckResult:
        L = run.L
        mode = "exact" if run.note else run.mode
        blocked = spencer_kernel(
            L, mode=mode, hat=True, primes=run.primes, budget=run.budget,
            workers=self.settings.workers, seed=run.seed,
        )
        witnesses: Dict[str, Any] = {"mode": mode, "kernel_dim": blocked.dim}
        if blocked.kernel is not None:
            witnesses["kernel_generators"] = [encode_vector(v) for v in blocked.kernel.vectors()[:5]]
        if mode == "modular":
            witnesses["primes"] = run.primes
            witnesses["block_certificates"] = blocked.block_witnesses()
        witnesses["summary"] = f"kernel dim {blocked.dim}"
        claim = {"kernel_dim": 0}
        ok = blocked.certified and blocked.dim == 0
        return (Outcome.CERTIFIED if ok else Outcome.UNRESOLVED), claim, witnesses

    def _check_sigma(self, run: _Run) -> CheckResult:
        L = run.L
        result = self._sigma_result(run)
        rs = run.rs
        v2theta = weyl_dimension(rs, tuple(2 * x for x in dynkin_labels(rs, rs.highest_root)))
        killing_in = result.kernel.contains(killing_quadric(L))
        # fresh points from another seed must satisfy every quadric found
        fresh = sample_orbit(L, run.cg, self.settings.batch_size, run.seed + 1)
        quadrics = result.kernel.vectors()
        fresh_ok = all(not evaluate_quadric(L, q, s.point) for s in fresh for q in quadrics)
        witnesses = _stability_witness(result)
        witnesses.update({
            "sym2_dim": sym2_dim(L.dim),
            "v_2theta_dim": v2theta,
            "killing_form_in_sigma": killing_in,
            "fresh_samples_checked": len(fresh),
            "fresh_samples_vanish": fresh_ok,
            "summary": f"dim Sigma {result.dim} (bound {result.lower_bound})",
        })
        claim = {"dim": sym2_dim(L.dim) - v2theta, "contains_killing_form": True}
        outcome = _stability_outcome(result.status)
        if not (killing_in and fresh_ok):
            outcome = Outcome.UNRESOLVED
        return outcome, claim, witnesses

    def _check_xi_equals_dS(self, run: _Run) -> CheckResult:
        L = run.L
        s = self.settings
        sigma = self._sigma_result(run)
        claim = {"relation": "Xi = d(S)", "dim": 2 * L.dim + sigma.dim}
        if sigma.status is not StabilityStatus.CERTIFIED and not run.note:
            witnesses = {"sigma": _stability_witness(sigma), "summary": "Sigma not certified"}
            return _stability_outcome(sigma.status), claim, witnesses

        S = build_S(L, sigma.kernel)
        dS = spencer_image(L, S)
        ambient = wedge2_dim(L.dim) * L.dim
        run.budget.require_dense(ambient, ambient, f"Xi {L.name}")
        lower = None if run.note else dS.dim

        def solve(samples, mode, prime):
            return xi_space(
                L, samples, lower_bound=lower, mode=mode, prime=prime,
                batch_size=s.batch_size, patience=s.plateau_batches, budget=run.budget,
            )

        xi, discarded = self._sampled(run, solve, f"Xi {L.name}")
        witnesses: Dict[str, Any] = {
            "S_dim": S.dim,
            "dS_dim": dS.dim,
            "sigma_dim": sigma.dim,
            "spencer_injective_on_S": dS.dim == S.dim,
            "discarded_primes": discarded,
        }
        if xi is None:
            witnesses["summary"] = "every prime divided a sample denominator"
            return Outcome.UNRESOLVED, claim, witnesses
        witnesses["xi"] = _stability_witness(xi)
        if xi.kernel is not None:
            contained = xi.kernel.contains(dS)
            witnesses["containment"] = {"method": "exact", "holds": contained}
        else:
            # all samples that constrained the kernel
            checked = list(xi.samples)
            contained = spencer_image_respects_tangents(L, S, checked)
            witnesses["containment"] = {"method": "pointwise", "holds": contained, "samples_verified": len(checked)}
        witnesses["summary"] = f"dim Xi {xi.dim}, dim dS {dS.dim}"

        if run.note:
            return Outcome.REPORT_ONLY, claim, witnesses
        if dS.dim != S.dim or not contained:
            return Outcome.UNRESOLVED, claim, witnesses
        return _stability_outcome(xi.status), claim, witnesses

    def _check_xi_prime(self, run: _Run) -> CheckResult:
        L = run.L
        s = self.settings
        ambient = wedge2_dim(L.dim) * L.dim
        run.budget.require_dense(ambient, ambient, f"Xi' {L.name}")

        def solve(samples, mode, prime):
            return xi_prime_space(
                L, samples, lower_bound=1, mode=mode, prime=prime,
                batch_size=s.batch_size, patience=s.plateau_batches, budget=run.budget,
            )

        result, discarded = self._sampled(run, solve, f"Xi' {L.name}")
        claim = {"dim": 1, "generated_by_bracket": True}
        if result is None:
            return Outcome.UNRESOLVED, claim, {"discarded_primes": discarded, "summary": "no usable prime"}
        bracket = bracket_hom(L)
        witnesses = _stability_witness(result)
        witnesses["discarded_primes"] = discarded
        if result.kernel is not None:
            generated = result.kernel == Subspace.span(ambient, [bracket])
        else:
            generated = all(
                Subspace.span(L.dim, [sample.point]).contains(L.bracket_vec(sample.point, w))
                for sample in result.samples for w in sample.tangent.vectors()
            )
        witnesses["bracket_in_kernel"] = generated
        witnesses["summary"] = f"dim Xi' {result.dim}"
        if not generated:
            return Outcome.UNRESOLVED, claim, witnesses
        return _stability_outcome(result.status), claim, witnesses

    def _check_span_wedge2(self, run: _Run) -> CheckResult:
        L = run.L
        target = wedge2_dim(L.dim)
        run.budget.require_dense(target, target, f"tangent span {L.name}")
        single = tangent_lines_span(L, [base_sample(L, run.cg)])

        def solve(samples, mode, prime):
            return tangent_lines_span(L, samples, mode=mode, prime=prime, budget=run.budget)

        result, discarded = self._sampled(run, solve, f"tangent span {L.name}")
        claim = {"dim": target}
        if result is None:
            return Outcome.UNRESOLVED, claim, {"discarded_primes": discarded, "summary": "no usable prime"}
        witnesses = {
            "achieved": result.achieved,
            "target": result.target,
            "history": list(result.history),
            "samples_used": result.samples_used,
            "mode": result.mode,
            "base_point_dim": single.achieved,
            "discarded_primes": discarded,
            "summary": f"span {result.achieved}/{target}",
        }
        return (Outcome.CERTIFIED if result.full else Outcome.UNRESOLVED), claim, witnesses

    def _check_summand_counts(self, run: _Run) -> CheckResult:
        L = run.L
        rs = run.rs
        expected = expected_s(rs.type_label, rs.rank)
        expected_labels = expected_wedge2_labels(rs)
        wedge_count = 3 if (rs.type_label, rs.rank) == ("A", 2) else 2
        claim = {"wedge2_summands": wedge_count, "s": expected}
        if expected_labels is not None:
            claim["wedge2_highest_weights"] = [list(x) for x in expected_labels]

        sigma = self._sigma_result(run)
        if sigma.status is not StabilityStatus.CERTIFIED:
            return _stability_outcome(sigma.status), claim, {"sigma": _stability_witness(sigma), "summary": "Sigma not certified"}

        wedge = highest_weights(L, wedge2_module(L), run.budget)
        wedge_total = weyl_dimension_total(L, wedge)
        sigma_weights = highest_weights(L, TensorModule("sym2_dual", sigma.kernel), run.budget)
        s_value = sum(m for _, m in sigma_weights) - 1
        found_labels = sorted(labels for labels, m in wedge for _ in range(m))

        witnesses = {
            "wedge2_highest_weights": [[list(labels), m] for labels, m in wedge],
            "wedge2_weyl_total": wedge_total,
            "sigma_highest_weights": [[list(labels), m] for labels, m in sigma_weights],
            "sigma_weyl_total": weyl_dimension_total(L, sigma_weights),
            "s": s_value,
            "summary": f"wedge2 {len(found_labels)} summands, s = {s_value}",
        }
        ok = (
            len(found_labels) == wedge_count
            and wedge_total == wedge2_dim(L.dim)
            and witnesses["sigma_weyl_total"] == sigma.dim
            and s_value == expected
            and (expected_labels is None or found_labels == expected_labels)
        )
        return (Outcome.CERTIFIED if ok else Outcome.UNRESOLVED), claim, witnesses

    def _check_gu_lemma(self, run: _Run) -> CheckResult:
        L, cg = run.L, run.cg
        tangent_dim = cg.dims[2] + cg.dims[1] + 1
        base = base_sample(L, cg)
        top = [{i: Fraction(1)} for i in cg.basis_at(2) + cg.basis_at(1)]
        expected_tangent = Subspace.span(L.dim, top + [L.bracket_vec(cg.theta_vector, cg.minus_theta_vector)])
        base_clauses = {
            "tangent_is_g2_g1_and_bracket": base.tangent == expected_tangent,
            "contact_hyperplane_is_g2_g1": contact_hyperplane(L, base) == Subspace.span(L.dim, top),
        }
        samples = sample_orbit(L, cg, self.settings.gu_samples, run.seed)
        report = gu_pointwise_checks(L, samples, tangent_dim)
        failures = report.failures()
        witnesses = {
            "tangent_dim": tangent_dim,
            "samples": len(samples),
            "base_point": base_clauses,
            "failures": [[i, name] for i, name in failures[:20]],
            "summary": f"{len(samples)} samples, {len(failures)} clause failures",
        }
        claim = {"clauses": sorted(report.clauses[0]) if report.clauses else [], "tangent_dim": tangent_dim}
        ok = report.passed and all(base_clauses.values())
        return (Outcome.CERTIFIED if ok else Outcome.UNRESOLVED), claim, witnesses

    # -- public API -------------------------------------------------------------

    def run_check(self, name: str, type_label: str, rank: int) -> Certificate:
        """Run one check and return its certificate; budgets never raise out of here"""
        note = scope_note(name, type_label, rank)
        rs = build_root_system(type_label, rank)
        run = self._new_run(rs, note)
        logger.info(f"Running {name} on {rs.name}")

        computes = note is None or (name == "spencer_injective" and note == _VERONESE_NOTE) or (
            name == "xi_equals_dS" and note == _TYPE_A_NOTE
        )
        try:
            if computes:
                outcome, claim, witnesses = getattr(self, f"_check_{name}")(run)
            else:
                outcome, claim, witnesses = Outcome.REPORT_ONLY, {}, {"summary": note}
        except ResourceLimitExceeded as e:
            outcome, claim = Outcome.RESOURCE_LIMIT, {}
            witnesses = {
                "resource": e.resource,
                "needed": e.needed,
                "limit": e.limit,
                "stage": e.what,
                "summary": str(e),
            }
        except ConstructionError as e:
            logger.error(f"{name} on {rs.name}: {e}")
            outcome, claim, witnesses = Outcome.UNRESOLVED, {}, {"error": str(e), "summary": str(e)}

        if note is not None:
            if outcome is not Outcome.RESOURCE_LIMIT:
                outcome = Outcome.REPORT_ONLY
            witnesses["note"] = note
            logger.warning(f"{name} on {rs.name} is report-only: {note}")
        witnesses["seed"] = run.seed
        if self.settings.timestamps:
            witnesses["wall_seconds"] = round(run.budget.elapsed, 3)

        cert = Certificate(
            check_name=name,
            algebra=AlgebraInfo(type=rs.type_label, rank=rs.rank, dim=rs.dimension),
            claim=claim,
            outcome=outcome,
            witnesses=witnesses,
            anchor=ANCHORS[name],
            engine_version=cache.engine_version(),
            created_at=datetime.utcnow().isoformat() if self.settings.timestamps else None,
        )
        logger.info(f"{name} on {rs.name}: {outcome.value}")
        self.record(cert)
        return cert

    def run_suite(self, types: Iterable[Union[str, Tuple[str, int]]], checks: Sequence[str]) -> List[Certificate]:
        """Run checks over types; the result follows the declared order"""
        pairs = []
        for t in types:
            type_label, rank = parse_type(t) if isinstance(t, str) else t
            for name in checks:
                if name not in CHECKS:
                    raise ValueError(f"Unknown check {name!r}; expected one of {', '.join(CHECKS)}")
                pairs.append((type_label, rank, name))
        if not pairs:
            return []

        if self.settings.workers > 1 and len(pairs) > 1:
            inner = self.settings.model_copy(update={"workers": 1, "ledger": False})
            with ProcessPoolExecutor(max_workers=self.settings.workers) as pool:
                payloads = list(pool.map(_suite_task, [(inner, t, r, n) for t, r, n in pairs]))
            certificates = [Certificate.model_validate(p) for p in payloads]
            for cert in certificates:
                self.record(cert)
            return certificates
        return [self.run_check(name, t, r) for t, r, name in pairs]

    # -- ledger -----------------------------------------------------------------

    def record(self, cert: Certificate) -> List[Dict[str, Any]]:
        """Store cert and compare it with the latest replay of the same run"""
        if not self.settings.ledger:
            return []
        url = self.settings.ledger_url
        if not self._ledger_ready:
            init_db(url)
            self._ledger_ready = True

        payload = cert.to_json_dict()
        seed = cert.witnesses.get("seed", self.settings.seed)
        changes: List[Dict[str, Any]] = []
        with session_scope(url) as db:
            previous = db.query(CertificateRecord) \
                .filter(CertificateRecord.check_name == cert.check_name) \
                .filter(CertificateRecord.type_label == cert.algebra.type) \
                .filter(CertificateRecord.rank == cert.algebra.rank) \
                .filter(CertificateRecord.seed == seed) \
                .filter(CertificateRecord.engine_version == cert.engine_version) \
                .order_by(CertificateRecord.created_at.desc()) \
                .first()
            record = CertificateRecord(
                check_name=cert.check_name,
                type_label=cert.algebra.type,
                rank=cert.algebra.rank,
                seed=seed,
                outcome=cert.outcome,
                engine_version=cert.engine_version,
                payload=payload,
            )
            db.add(record)
            db.flush()
            if previous is not None:
                changes = self.diff_engine.compare_certificates(previous.payload, payload)
                for change in changes:
                    db.add(ReplayDrift(
                        record_id=record.id,
                        change_type=change["change_type"],
                        field_path=change["field_path"],
                        old_value=change.get("old_value"),
                        new_value=change.get("new_value"),
                        severity=change["severity"],
                    ))
        if changes:
            logger.warning(f"Replay drift for {cert.check_name} on {cert.type_name}: {len(changes)} fields changed")
        return changes


def _suite_task(args) -> Dict[str, Any]:
    settings, type_label, rank, name = args
    return VerificationService(settings).run_check(name, type_label, rank).to_json_dict()


def run_check(name: str, type_label: str, rank: int, config: Optional[Settings] = None) -> Certificate:
    return VerificationService(config).run_check(name, type_label, rank)


def run_suite(
    types: Iterable[Union[str, Tuple[str, int]]],
    checks: Sequence[str],
    config: Optional[Settings] = None,
) -> List[Certificate]:
    return VerificationService(config).run_suite(types, checks)


# ---------------------------------------------------------------------------
# Reporting


def outcome_counts(certificates: Sequence[Certificate]) -> Dict[str, int]:
    counts = Counter(c.outcome.value for c in certificates)
    return {o.value: counts[o.value] for o in Outcome if counts[o.value]}


def summary_table(certificates: Sequence[Certificate]) -> str:
    lines = [f"{'check':<18} {'type':<5} {'outcome':<15} detail"]
    for c in certificates:
        lines.append(f"{c.check_name:<18} {c.type_name:<5} {c.outcome.value:<15} {c.witnesses.get('summary', '')}")
    counts = outcome_counts(certificates)
    lines.append(", ".join(f"{k}: {v}" for k, v in counts.items()) if counts else "no checks run")
    return "\n".join(lines)


def dump_certificates(certificates: Sequence[Certificate]) -> str:
    return json.dumps([c.to_json_dict() for c in certificates], indent=2, sort_keys=True)


def exit_code(certificates: Sequence[Certificate]) -> int:
    outcomes = {c.outcome for c in certificates}
    if outcomes & {Outcome.UNRESOLVED, Outcome.PLATEAU}:
        return 1
    if Outcome.RESOURCE_LIMIT in outcomes:
        return 3
    return 0
