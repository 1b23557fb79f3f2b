"""Certificate comparison for replay drift"""
from typing import Any, Dict, Iterator, List, Tuple
import json
import logging

logger = logging.getLogger(__name__)

IGNORED_PATHS = frozenset({"created_at", "witnesses.wall_seconds"})


class DiffEngine:
    """Compares two certificate payloads and lists what changed"""

    def compare_certificates(
        self,
        old_cert: Dict[str, Any],
        new_cert: Dict[str, Any]
    ) -> List[Dict[str, Any]]:
        """Compare two serialized certificates, timestamps excluded"""
        old_fields = dict(self._flatten(old_cert))
        new_fields = dict(self._flatten(new_cert))
        changes = []

        for path in sorted(new_fields.keys() - old_fields.keys()):
            changes.append({
                "change_type": "field_added",
                "field_path": path,
                "old_value": None,
                "new_value": self._render(new_fields[path]),
                "severity": self._determine_severity(path)
            })

        for path in sorted(old_fields.keys() - new_fields.keys()):
            changes.append({
                "change_type": "field_removed",
                "field_path": path,
                "old_value": self._render(old_fields[path]),
                "new_value": None,
                "severity": self._determine_severity(path)
            })

        for path in sorted(old_fields.keys() & new_fields.keys()):
            if old_fields[path] != new_fields[path]:
                changes.append({
                    "change_type": "outcome_changed" if path == "outcome" else "value_changed",
                    "field_path": path,
                    "old_value": self._render(old_fields[path]),
                    "new_value": self._render(new_fields[path]),
                    "severity": self._determine_severity(path)
                })

        if changes:
            logger.debug(f"{len(changes)} differences between certificates")
        return changes

    def _flatten(self, value: Any, prefix: str = "") -> Iterator[Tuple[str, Any]]:
        """Leaves of nested dicts keyed by dotted path; lists are compared whole"""
        if isinstance(value, dict):
            for key, item in value.items():
                path = f"{prefix}.{key}" if prefix else str(key)
                if path in IGNORED_PATHS:
                    continue
                yield from self._flatten(item, path)
        else:
            yield prefix, value

    def _render(self, value: Any) -> str:
        return value if isinstance(value, str) else json.dumps(value, sort_keys=True)

    def _determine_severity(self, path: str) -> str:
        """Outcome and claim drift break replay; witness drift is suspicious; anchors are informational"""
        if path == "outcome" or path.startswith("claim"):
            return "high"
        if path.startswith("witnesses") or path.startswith("algebra") or path == "engine_version":
            return "medium"
        return "info"
