import json

import pytest

from liecert.config import Settings
from liecert.db.database import session_scope
from liecert.models.certificate import Certificate, decode_vector
from liecert.models.models import CertificateRecord, Outcome, ReplayDrift
from liecert.services import certify
from liecert.services.certify import (
    CHECKS,
    VerificationService,
    dump_certificates,
    expected_s,
    expected_wedge2_labels,
    exit_code,
    outcome_counts,
    run_check,
    run_suite,
    scope_note,
    summary_table,
)
from liecert.services.rootsys import build_root_system


def test_scope_policy():
    assert scope_note("jacobi", "C", 3) is None
    assert scope_note("sigma", "C", 3) is not None
    assert scope_note("sigma", "A", 1) is not None
    assert scope_note("sigma", "B", 2) is not None
    assert scope_note("bianchi_kernel", "A", 3) is not None
    assert scope_note("bianchi_kernel", "D", 3) is not None
    assert scope_note("xi_prime", "A", 3) is None
    assert scope_note("bianchi_kernel", "A", 2) is None
    assert scope_note("summand_counts", "A", 4) is not None
    with pytest.raises(ValueError):
        scope_note("nonsense", "A", 2)


@pytest.mark.parametrize("type_label,rank,s", [
    ("A", 2, 1), ("G", 2, 1), ("F", 4, 1), ("E", 6, 1), ("E", 8, 1),
    ("B", 3, 2), ("B", 5, 2), ("D", 4, 3), ("D", 5, 2), ("A", 4, None), ("C", 3, None),
])
def test_expected_s(type_label, rank, s):
    assert expected_s(type_label, rank) == s


def test_expected_wedge2_labels():
    assert expected_wedge2_labels(build_root_system("A", 2)) == [(0, 3), (1, 1), (3, 0)]
    assert expected_wedge2_labels(build_root_system("G", 2)) == [(0, 1), (3, 0)]
    assert expected_wedge2_labels(build_root_system("B", 3)) == [(0, 1, 0), (1, 0, 2)]
    assert expected_wedge2_labels(build_root_system("D", 4)) == [(0, 1, 0, 0), (1, 0, 1, 1)]
    assert expected_wedge2_labels(build_root_system("F", 4)) is None


def test_jacobi_certificate(settings):
    cert = run_check("jacobi", "G", 2, settings)
    assert cert.outcome is Outcome.CERTIFIED
    assert cert.algebra.dim == 14
    assert cert.witnesses["jacobi_failures"] == []
    assert cert.anchor.label == "chevalley-structure"
    assert cert.created_at is None
    assert "wall_seconds" not in cert.witnesses


def test_bianchi_kernel_g2(settings):
    cert = run_check("bianchi_kernel", "G", 2, settings)
    assert cert.outcome is Outcome.CERTIFIED
    assert cert.witnesses["mode"] == "exact"
    assert cert.witnesses["dim"] == 1
    assert len(cert.witnesses["generators"]) == 1
    assert decode_vector(cert.witnesses["generators"][0])


@pytest.mark.parametrize("type_label", ["A", "G"])
@pytest.mark.parametrize("name", ["sigma", "xi_equals_dS", "xi_prime", "span_wedge2", "summand_counts", "gu_lemma", "grading"])
def test_rank_two_checks_certify(settings, type_label, name):
    cert = run_check(name, type_label, 2, settings)
    assert cert.outcome is Outcome.CERTIFIED, cert.witnesses


def test_a2_xi_witnesses(settings):
    cert = run_check("xi_equals_dS", "A", 2, settings)
    assert cert.claim["dim"] == 25
    assert cert.witnesses["S_dim"] == 25
    assert cert.witnesses["dS_dim"] == 25
    assert cert.witnesses["xi"]["dim"] == 25
    assert cert.witnesses["containment"] == {"method": "exact", "holds": True}


def test_modular_xi_containment_checks_every_sample(settings, monkeypatch):
    seen = []
    real = certify.spencer_image_respects_tangents

    def recording(L, S, samples):
        seen.append(len(samples))
        return real(L, S, samples)

    monkeypatch.setattr(certify, "spencer_image_respects_tangents", recording)
    config = settings.model_copy(update={"mode": "modular", "batch_size": 2, "sample_batches": 48, "plateau_batches": 10})
    cert = run_check("xi_equals_dS", "A", 2, config)
    used = cert.witnesses["xi"]["samples_used"]
    assert cert.witnesses["xi"]["mode"] == "modular"
    assert used > config.batch_size
    assert seen == [used]
    assert cert.witnesses["containment"] == {"method": "pointwise", "holds": True, "samples_verified": used}
    assert cert.outcome is Outcome.CERTIFIED


def test_a2_summand_witnesses(settings):
    cert = run_check("summand_counts", "A", 2, settings)
    assert cert.witnesses["s"] == 1
    assert cert.witnesses["wedge2_weyl_total"] == 28
    assert cert.witnesses["sigma_weyl_total"] == 9


def test_g2_spencer_injective(settings):
    cert = run_check("spencer_injective", "G", 2, settings)
    assert cert.outcome is Outcome.CERTIFIED
    assert cert.witnesses["kernel_dim"] == 0


def test_report_only_types(settings):
    cert = run_check("xi_equals_dS", "C", 3, settings)
    assert cert.outcome is Outcome.REPORT_ONLY
    assert "note" in cert.witnesses
    measured = run_check("spencer_injective", "A", 1, settings)
    assert measured.outcome is Outcome.REPORT_ONLY
    assert measured.witnesses["kernel_dim"] > 0


def test_xi_on_type_a3_is_reported_without_a_verdict(settings):
    cert = run_check("xi_equals_dS", "A", 3, settings)
    assert cert.outcome is Outcome.REPORT_ONLY
    assert cert.witnesses["xi"]["lower_bound"] is None
    assert cert.witnesses["dS_dim"] == cert.witnesses["S_dim"]


def test_unknown_inputs_raise(settings):
    with pytest.raises(ValueError):
        run_check("nonsense", "A", 2, settings)
    with pytest.raises(ValueError):
        run_check("jacobi", "G", 3, settings)
    with pytest.raises(ValueError):
        run_suite(["A2"], ["nonsense"], settings)


def test_f4_bianchi_hits_memory_budget(settings):
    cert = run_check("bianchi_kernel", "F", 4, settings)
    assert cert.outcome is Outcome.RESOURCE_LIMIT
    assert cert.witnesses["resource"] == "memory_bytes"
    assert cert.witnesses["needed"] > cert.witnesses["limit"]


def test_time_budget_becomes_resource_limit(tmp_path):
    config = Settings(cache_dir=tmp_path, ledger=False, timestamps=False, budget_seconds=1e-9)
    cert = run_check("xi_prime", "A", 2, config)
    assert cert.outcome is Outcome.RESOURCE_LIMIT
    assert cert.witnesses["resource"] == "seconds"


def test_empty_suite(settings):
    assert run_suite([], list(CHECKS), settings) == []
    assert exit_code([]) == 0
    assert summary_table([]).endswith("no checks run")


def test_suite_order_and_determinism(settings):
    first = run_suite(["A2", ("G", 2)], ["jacobi", "grading"], settings)
    assert [(c.type_name, c.check_name) for c in first] == [
        ("A2", "jacobi"), ("A2", "grading"), ("G2", "jacobi"), ("G2", "grading"),
    ]
    second = run_suite(["A2", ("G", 2)], ["jacobi", "grading"], settings)
    assert dump_certificates(first) == dump_certificates(second)


def test_certificate_json_round_trip(settings):
    cert = run_check("grading", "A", 2, settings)
    payload = json.loads(dump_certificates([cert]))[0]
    assert payload["outcome"] == "CERTIFIED"
    assert Certificate.model_validate(payload) == cert


def test_exit_codes(settings):
    certified = run_check("jacobi", "A", 2, settings)
    report_only = run_check("sigma", "C", 2, settings)
    limit = certified.model_copy(update={"outcome": Outcome.RESOURCE_LIMIT})
    unresolved = certified.model_copy(update={"outcome": Outcome.UNRESOLVED})
    plateau = certified.model_copy(update={"outcome": Outcome.PLATEAU})
    assert exit_code([certified, report_only]) == 0
    assert exit_code([certified, limit]) == 3
    assert exit_code([limit, unresolved]) == 1
    assert exit_code([plateau]) == 1
    assert outcome_counts([certified, report_only, limit]) == {
        "CERTIFIED": 1, "RESOURCE_LIMIT": 1, "REPORT_ONLY": 1,
    }


def test_ledger_records_replays_without_drift(tmp_path):
    config = Settings(cache_dir=tmp_path, ledger=True, timestamps=True)
    service = VerificationService(config)
    service.run_check("jacobi", "A", 2)
    service.run_check("jacobi", "A", 2)
    with session_scope(config.ledger_url) as db:
        assert db.query(CertificateRecord).count() == 2
        assert db.query(ReplayDrift).count() == 0


def test_ledger_stores_drift(tmp_path):
    config = Settings(cache_dir=tmp_path, ledger=True, timestamps=False)
    service = VerificationService(config)
    cert = service.run_check("jacobi", "A", 2)
    changed = cert.model_copy(update={"outcome": Outcome.UNRESOLVED})
    changes = service.record(changed)
    assert [c["field_path"] for c in changes] == ["outcome"]
    with session_scope(config.ledger_url) as db:
        drift = db.query(ReplayDrift).one()
        assert drift.severity == "high"
        assert drift.old_value == "CERTIFIED"


@pytest.mark.slow
@pytest.mark.parametrize("type_label,rank", [("B", 3), ("D", 4)])
def test_certificates_for_larger_types(tmp_path, type_label, rank):
    config = Settings(cache_dir=tmp_path, ledger=False, timestamps=False)
    names = ["jacobi", "grading", "bianchi_kernel", "spencer_injective", "sigma", "xi_equals_dS", "xi_prime", "span_wedge2", "summand_counts", "gu_lemma"]
    certificates = run_suite([(type_label, rank)], names, config)
    outcomes = {c.check_name: c.outcome for c in certificates}
    assert all(o is Outcome.CERTIFIED for o in outcomes.values()), outcomes
    summands = next(c for c in certificates if c.check_name == "summand_counts")
    assert summands.witnesses["s"] == expected_s(type_label, rank)
