"""Command-line entry point"""
from math import ceil
from pathlib import Path
from typing import List, Optional, Sequence
import argparse
import json
import logging
import sys

from pydantic import ValidationError

from liecert.config import Settings, get_settings
from liecert.models.certificate import Certificate
from liecert.services import cache
from liecert.services.certify import CHECKS, VerificationService, dump_certificates, exit_code, summary_table
from liecert.services.grading import LEVELS, contact_grading
from liecert.services.liealg import build_chevalley, structure_cache_path
from liecert.services.rootsys import build_root_system, parse_type

logger = logging.getLogger(__name__)

USAGE_ERROR = 2
_SIZE_SUFFIXES = {"K": 1024, "M": 1024 ** 2, "G": 1024 ** 3}


def parse_size(text: str) -> int:
    """Byte counts such as 4294967296, 512M or 4G"""
    text = text.strip().upper().removesuffix("B")
    factor = _SIZE_SUFFIXES.get(text[-1:], 1)
    digits = text[:-1] if text[-1:] in _SIZE_SUFFIXES else text
    try:
        return int(float(digits) * factor)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size {text!r}") from None


def parse_checks(text: str) -> List[str]:
    if text.strip() == "all":
        return list(CHECKS)
    names = [n.strip() for n in text.split(",") if n.strip()]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown check(s) {', '.join(unknown)}; choose from {', '.join(CHECKS)} or all")
    return names


def parse_types(text: str) -> List[str]:
    types = [t.strip() for t in text.split(",") if t.strip()]
    for t in types:
        try:
            parse_type(t)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    return types


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="orbit sampling seed")
    common.add_argument("--primes", type=int, help="number of primes for modular certificates")
    common.add_argument("--samples", type=int, help="maximum number of orbit samples per kernel")
    common.add_argument("--budget-mem", type=parse_size, help="memory budget, e.g. 4G")
    common.add_argument("--budget-time", type=float, help="time budget per check in seconds")
    common.add_argument("--out", type=Path, help="write results to this file instead of stdout")
    common.add_argument("--format", choices=("json", "table"), default="table")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--cache-dir", type=Path, help="cache directory (also LIECERT_CACHE_DIR)")
    common.add_argument("--mode", choices=("auto", "exact", "modular"))
    common.add_argument("--no-ledger", action="store_true", help="do not record certificates")
    common.add_argument("--no-timestamps", action="store_true", help="omit timestamps for byte-stable output")
    common.add_argument("--verbose", action="store_true", help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="liecert", description="Exact certificates for Lie algebra identities")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", parents=[common], help="construct and cache an algebra")
    build.add_argument("type", help="type and rank, e.g. G2")

    verify = sub.add_parser("verify", parents=[common], help="run checks on one algebra")
    verify.add_argument("type", help="type and rank, e.g. G2")
    verify.add_argument("--check", type=parse_checks, default=list(CHECKS), help="comma-separated checks or all")

    suite = sub.add_parser("suite", parents=[common], help="run checks over several algebras")
    suite.add_argument("--types", type=parse_types, required=True, help="comma-separated, e.g. A2,G2,B3")
    suite.add_argument("--checks", type=parse_checks, default=list(CHECKS), help="comma-separated checks or all")

    inspect = sub.add_parser("inspect", parents=[common], help="describe a cache file or certificate file")
    inspect.add_argument("path", type=Path)
    return parser


def settings_from_args(args: argparse.Namespace, base: Optional[Settings] = None) -> Settings:
    """Flag overrides applied to a copy of the cached settings; assignment runs the field validators"""
    base = base or get_settings()
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.primes is not None:
        updates["prime_count"] = args.primes
    if args.samples is not None:
        if args.samples <= 0:
            raise ValueError(f"--samples must be positive, got {args.samples}")
        updates["sample_batches"] = ceil(args.samples / base.batch_size)
    if args.budget_mem is not None:
        updates["budget_mem_bytes"] = args.budget_mem
    if args.budget_time is not None:
        updates["budget_seconds"] = args.budget_time
    if args.out is not None:
        updates["output"] = args.out
    if args.workers is not None:
        updates["workers"] = args.workers
    if args.cache_dir is not None:
        updates["cache_dir"] = args.cache_dir
    if args.mode is not None:
        updates["mode"] = args.mode
    if args.no_ledger:
        updates["ledger"] = False
    if args.no_timestamps:
        updates["timestamps"] = False
    settings = base.model_copy()
    for name, value in updates.items():
        setattr(settings, name, value)
    return settings


def _emit(text: str, settings: Settings) -> None:
    if settings.output is not None:
        Path(settings.output).write_text(text + "\n")
        logger.info(f"Wrote {settings.output}")
    else:
        print(text)


def _cmd_build(args: argparse.Namespace, settings: Settings) -> int:
    type_label, rank = parse_type(args.type)
    rs = build_root_system(type_label, rank)
    L = build_chevalley(rs, cache_dir=settings.cache_dir)
    cg = contact_grading(L)
    info = {
        "type": rs.name,
        "dim": L.dim,
        "roots": len(rs.roots),
        "highest_root": list(rs.highest_root),
        "levels": {str(lv): cg.dims[lv] for lv in LEVELS},
        "cache": str(structure_cache_path(rs, Path(settings.cache_dir))),
    }
    if args.format == "json":
        _emit(json.dumps(info, indent=2, sort_keys=True), settings)
    else:
        levels = " ".join(f"{lv}:{cg.dims[lv]}" for lv in LEVELS)
        _emit("\n".join([
            f"type          {info['type']}",
            f"dim           {info['dim']}",
            f"roots         {info['roots']}",
            f"highest root  {tuple(rs.highest_root)}",
            f"levels        {levels}",
            f"cache         {info['cache']}",
        ]), settings)
    return 0


def _report(certificates: Sequence[Certificate], args: argparse.Namespace, settings: Settings) -> int:
    if args.format == "json":
        _emit(dump_certificates(certificates), settings)
        if settings.output is not None:
            print(summary_table(certificates))
    else:
        _emit(summary_table(certificates), settings)
    return exit_code(certificates)


def _cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    type_label, rank = parse_type(args.type)
    service = VerificationService(settings)
    return _report([service.run_check(name, type_label, rank) for name in args.check], args, settings)


def _cmd_suite(args: argparse.Namespace, settings: Settings) -> int:
    service = VerificationService(settings)
    return _report(service.run_suite(args.types, args.checks), args, settings)


def _cmd_inspect(args: argparse.Namespace, settings: Settings) -> int:
    path: Path = args.path
    if not path.exists():
        raise ValueError(f"{path} does not exist")
    with path.open() as fh:
        first = fh.readline()
    if first.startswith(cache.HEADER_PREFIX):
        header, entries = cache.read_entries(path)
        lines = [f"{k:<8} {v}" for k, v in header.items()]
        lines.append(f"entries  {len(entries)}")
        _emit("\n".join(lines), settings)
        return 0
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError:
        raise ValueError(f"{path} is neither a cache file nor a certificate file") from None
    items = data if isinstance(data, list) else [data]
    certificates = [Certificate.model_validate(item) for item in items]
    _emit(summary_table(certificates), settings)
    return 0


COMMANDS = {
    "build": _cmd_build,
    "verify": _cmd_verify,
    "suite": _cmd_suite,
    "inspect": _cmd_inspect,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        settings = settings_from_args(args)
        return COMMANDS[args.command](args, settings)
    except (ValueError, ValidationError) as e:
        logger.error(str(e))
        print(f"liecert: error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
