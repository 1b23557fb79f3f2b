from liecert.services.diff_engine import DiffEngine


def _payload(**overrides):
    payload = {
        "check_name": "sigma",
        "algebra": {"type": "A", "rank": 2, "dim": 8},
        "claim": {"dim": 9},
        "outcome": "CERTIFIED",
        "witnesses": {"dim": 9, "history": [20, 9], "wall_seconds": 0.5},
        "anchor": {"label": "vanishing-quadrics", "statement": "..."},
        "engine_version": "abc",
        "created_at": "2024-01-01T00:00:00",
    }
    payload.update(overrides)
    return payload


def test_identical_payloads_have_no_changes():
    assert DiffEngine().compare_certificates(_payload(), _payload()) == []


def test_timestamps_are_ignored():
    newer = _payload(created_at="2025-06-01T00:00:00")
    newer["witnesses"] = dict(newer["witnesses"], wall_seconds=12.0)
    assert DiffEngine().compare_certificates(_payload(), newer) == []


def test_outcome_change_is_high_severity():
    changes = DiffEngine().compare_certificates(_payload(), _payload(outcome="PLATEAU"))
    assert changes == [{
        "change_type": "outcome_changed",
        "field_path": "outcome",
        "old_value": "CERTIFIED",
        "new_value": "PLATEAU",
        "severity": "high",
    }]


def test_nested_changes_use_dotted_paths():
    newer = _payload()
    newer["witnesses"] = dict(newer["witnesses"], history=[20, 10, 9], prime=7)
    newer["anchor"] = {"label": "vanishing-quadrics", "statement": "changed"}
    changes = DiffEngine().compare_certificates(_payload(), newer)
    by_path = {c["field_path"]: c for c in changes}
    assert by_path["witnesses.prime"]["change_type"] == "field_added"
    assert by_path["witnesses.prime"]["severity"] == "medium"
    assert by_path["witnesses.history"]["old_value"] == "[20, 9]"
    assert by_path["witnesses.history"]["new_value"] == "[20, 10, 9]"
    assert by_path["anchor.statement"]["severity"] == "info"


def test_removed_field():
    newer = _payload()
    del newer["claim"]
    changes = DiffEngine().compare_certificates(_payload(), newer)
    assert changes[0]["change_type"] == "field_removed"
    assert changes[0]["field_path"] == "claim.dim"
    assert changes[0]["severity"] == "high"
