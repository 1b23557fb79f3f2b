"""Memory and wall-clock budgets for large computations"""
import logging
import time
from typing import Callable, Optional

logger = logging.getLogger(__name__)

RESIDUE_BYTES = 4


class ResourceLimitExceeded(RuntimeError):
    """A computation would exceed its configured memory or time budget"""

    def __init__(self, resource: str, needed: float, limit: float, what: str):
        self.resource = resource
        self.needed = needed
        self.limit = limit
        self.what = what
        super().__init__(f"{what}: {resource} needed {needed:g} exceeds limit {limit:g}")


def dense_footprint(rows: int, cols: int) -> int:
    """Bytes of a dense residue matrix of the given shape"""
    return rows * cols * RESIDUE_BYTES


class Budget:
    """Tracks a memory ceiling and a deadline for one check"""

    def __init__(self, mem_bytes: int, seconds: float, clock: Callable[[], float] = time.monotonic):
        self.mem_bytes = mem_bytes
        self.seconds = seconds
        self._clock = clock
        self._started = clock()

    @classmethod
    def unlimited(cls) -> "Budget":
        return cls(mem_bytes=2 ** 62, seconds=float("inf"))

    @classmethod
    def from_settings(cls, settings) -> "Budget":
        return cls(mem_bytes=settings.budget_mem_bytes, seconds=settings.budget_seconds)

    @property
    def elapsed(self) -> float:
        return self._clock() - self._started

    def require_dense(self, rows: int, cols: int, what: str) -> int:
        """Fail fast if a dense rows x cols residue matrix does not fit"""
        needed = dense_footprint(rows, cols)
        if needed > self.mem_bytes:
            logger.error(f"{what}: {rows}x{cols} needs {needed} bytes, budget {self.mem_bytes}")
            raise ResourceLimitExceeded("memory_bytes", needed, self.mem_bytes, what)
        return needed

    def check_time(self, what: Optional[str] = None) -> None:
        if self.elapsed > self.seconds:
            label = what or "computation"
            logger.error(f"{label}: time budget of {self.seconds:g}s exhausted")
            raise ResourceLimitExceeded("seconds", self.elapsed, self.seconds, label)
