"""Forward orbits, cycle detection and cycle catalogues.

Every walk is bounded by explicit Limits: a step budget and a value ceiling.
A finite budget cannot distinguish slow convergence from true escape, so
limit hits are reported as statuses, never errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, InvalidParameters, VerificationFailure
from .maps import MapDescriptor, pxr

__all__ = [
    "DEFAULT_MAX_STEPS",
    "DEFAULT_MAX_VALUE",
    "Limits",
    "TrajectoryStatus",
    "CycleInfo",
    "TrajectoryReport",
    "iterate",
    "find_cycles",
    "check_power_cycle",
]

DEFAULT_MAX_STEPS = 10**5
DEFAULT_MAX_VALUE = 10**40


@dataclass(frozen=True)
class Limits:
    max_steps: int = DEFAULT_MAX_STEPS
    max_value: int = DEFAULT_MAX_VALUE

    def __post_init__(self):
        if type(self.max_steps) is not int or self.max_steps < 1:
            raise InvalidParameters(f"max_steps must be >= 1, got {self.max_steps!r}")
        if type(self.max_value) is not int or self.max_value < 1:
            raise InvalidParameters(f"max_value must be >= 1, got {self.max_value!r}")


class TrajectoryStatus(str, Enum):
    ENTERED_CYCLE = "EnteredCycle"
    HIT_STEP_LIMIT = "HitStepLimit"
    HIT_VALUE_LIMIT = "HitValueLimit"


@dataclass(frozen=True)
class CycleInfo:
    """A cycle in orbit order, canonicalized to start at the minimal member."""

    members: tuple[int, ...]

    def __post_init__(self):
        if not self.members:
            raise InvalidParameters("a cycle needs at least one member")
        for m in self.members:
            if type(m) is not int or m < 1:
                raise InvalidParameters(f"cycle members must be positive ints, got {m!r}")
        if len(set(self.members)) != len(self.members):
            raise InvalidParameters("cycle members must be pairwise distinct")
        if self.members[0] != min(self.members):
            raise InvalidParameters("cycle must start at its minimal member")

    @classmethod
    def from_orbit(cls, members: tuple[int, ...]) -> "CycleInfo":
        """Rotate an orbit-ordered member list to start at the minimum."""
        k = members.index(min(members))
        return cls(members[k:] + members[:k])

    @property
    def length(self) -> int:
        return len(self.members)

    @property
    def min_member(self) -> int:
        return self.members[0]

    def verify(self, desc: MapDescriptor) -> None:
        """Check that the map walks the cycle exactly; internal error if not."""
        for j, m in enumerate(self.members):
            nxt = self.members[(j + 1) % len(self.members)]
            got = desc.apply(m)
            if got != nxt:
                raise VerificationFailure(
                    f"cycle broken at {m}: map gives {got}, cycle says {nxt}"
                )


@dataclass(frozen=True)
class TrajectoryReport:
    start: int
    steps: tuple[int, ...]
    status: TrajectoryStatus
    max_excursion: int
    entry_index: int | None
    cycle: CycleInfo | None

    def to_json_dict(self) -> dict:
        return {
            "start": str(self.start),
            "status": self.status.value,
            "steps": [str(v) for v in self.steps],
            "applications": len(self.steps) - 1 + (1 if self.cycle else 0),
            "max_excursion": str(self.max_excursion),
            "entry_index": self.entry_index,
            "cycle": [str(v) for v in self.cycle.members] if self.cycle else None,
        }


def iterate(desc: MapDescriptor, start: int, limits: Limits | None = None) -> TrajectoryReport:
    """Walk forward from start until a repeat, the step budget, or the ceiling.

    Repeats are found by first-revisit bookkeeping, which gives the cycle and
    its entry index for free at desk scale.  steps[entry_index] is the first
    repeated value.  A value above max_value aborts the walk and is dropped:
    the retained orbit (and so max_excursion) never exceeds the ceiling.
    """
    limits = limits or Limits()
    if type(start) is not int or start < 1:
        raise DomainError(f"start must be a positive integer, got {start!r}")
    if start > limits.max_value:
        raise InvalidParameters(f"start {start} already exceeds max_value {limits.max_value}")
    steps = [start]
    seen = {start: 0}
    for _ in range(limits.max_steps):
        nxt = desc.apply(steps[-1])
        entry = seen.get(nxt)
        if entry is not None:
            cycle = CycleInfo.from_orbit(tuple(steps[entry:]))
            return TrajectoryReport(
                start, tuple(steps), TrajectoryStatus.ENTERED_CYCLE,
                max(steps), entry, cycle,
            )
        if nxt > limits.max_value:
            return TrajectoryReport(
                start, tuple(steps), TrajectoryStatus.HIT_VALUE_LIMIT,
                max(steps), None, None,
            )
        seen[nxt] = len(steps)
        steps.append(nxt)
    return TrajectoryReport(
        start, tuple(steps), TrajectoryStatus.HIT_STEP_LIMIT, max(steps), None, None
    )


def find_cycles(
    desc: MapDescriptor, search_bound: int, limits: Limits | None = None
) -> list[CycleInfo]:
    """Distinct cycles hit by any start in 1..search_bound, sorted by minimum.

    Each start is walked independently, so the result cannot depend on the
    iteration order; a parallel scan merges to the same list.
    """
    if type(search_bound) is not int or search_bound < 1:
        raise InvalidParameters(f"search_bound must be >= 1, got {search_bound!r}")
    limits = limits or Limits()
    found: dict[tuple[int, ...], CycleInfo] = {}
    for start in range(1, search_bound + 1):
        report = iterate(desc, start, limits)
        if report.status is TrajectoryStatus.ENTERED_CYCLE:
            found.setdefault(report.cycle.members, report.cycle)
    return sorted(found.values(), key=lambda c: c.members[0])


def check_power_cycle(k: int) -> CycleInfo:
    """Construct and verify the cycle {1, 2^(k-1), ..., 2} of the (2^k - 1)x + 1 map.

    From 1 the odd branch gives ((2^k - 1) + 1)/2 = 2^(k-1), and halving walks
    back down to 1.  Verification failure would be an internal bug.
    """
    if type(k) is not int or k < 2:
        raise InvalidParameters(f"k must be an integer >= 2, got {k!r}")
    members = (1,) + tuple(1 << (k - 1 - t) for t in range(k - 1))
    cycle = CycleInfo(members)
    cycle.verify(pxr((1 << k) - 1, 1))
    return cycle
