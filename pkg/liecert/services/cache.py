"""Triple-list text cache for structure constants and sparse matrices"""
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Tuple
import hashlib
import logging
import os
import tempfile

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# liecert"

Entry = Tuple[Tuple[int, ...], Fraction]

_SOURCE_DIR = Path(__file__).resolve().parent


@lru_cache()
def engine_version() -> str:
    """Short hash of the math sources; changes whenever results could change"""
    digest = hashlib.sha256()
    for path in sorted(_SOURCE_DIR.glob("*.py")):
        digest.update(path.name.encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()[:12]


def cache_path(cache_dir: Path, kind: str, type_label: str, rank: int, version: str) -> Path:
    return Path(cache_dir) / f"{type_label}{rank}-{kind}-{version}.txt"


def write_entries(path: Path, header: Dict[str, object], entries: Iterable[Entry]) -> int:
    """Write `index... num den` lines under a key=value header; returns entry count"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fields = " ".join(f"{key}={value}" for key, value in header.items())
    count = 0
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as handle:
            handle.write(f"{HEADER_PREFIX} {fields}\n")
            for index, value in entries:
                value = Fraction(value)
                handle.write(" ".join(str(i) for i in index))
                handle.write(f" {value.numerator} {value.denominator}\n")
                count += 1
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug(f"Wrote {count} entries to {path}")
    return count


def read_header(path: Path) -> Dict[str, str]:
    with open(path, encoding="ascii") as handle:
        first = handle.readline().rstrip("\n")
    if not first.startswith(HEADER_PREFIX):
        raise ValueError(f"{path} is not a liecert cache file")
    header = {}
    for token in first[len(HEADER_PREFIX):].split():
        key, _, value = token.partition("=")
        header[key] = value
    return header


def read_entries(path: Path) -> Tuple[Dict[str, str], List[Entry]]:
    header = read_header(path)
    entries: List[Entry] = []
    with open(path, encoding="ascii") as handle:
        handle.readline()
        for line_number, line in enumerate(handle, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 3:
                raise ValueError(f"{path}:{line_number}: malformed entry {line!r}")
            *index, num, den = (int(p) for p in parts)
            entries.append((tuple(index), Fraction(num, den)))
    return header, entries


def header_matches(header: Dict[str, str], expected: Dict[str, object]) -> bool:
    return all(header.get(key) == str(value) for key, value in expected.items())
