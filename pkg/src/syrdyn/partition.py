"""Partition of a finite domain into cycle members, basin points and escapees.

Classes: "C" (on a cycle), "D1" (orbit reaches a cycle within limits), "D2?"
(step or value limit hit first).  The question mark is deliberate: a finite
budget cannot certify true escape, so the third class only collects
candidates, and results always carry the limits used.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import DomainError, InvalidParameters
from .maps import MapDescriptor
from .trajectory import CycleInfo, Limits, iterate

__all__ = ["CLASS_C", "CLASS_D1", "CLASS_D2", "PartitionResult", "partition",
           "export_csv", "summary_dict"]

CLASS_C = "C"
CLASS_D1 = "D1"
CLASS_D2 = "D2?"

_CODE_NAMES = {1: CLASS_C, 2: CLASS_D1, 3: CLASS_D2}


@dataclass
class PartitionResult:
    descriptor: MapDescriptor
    domain_bound: int
    limits: Limits
    cycles: tuple[CycleInfo, ...]
    _codes: bytearray = field(repr=False)       # 1=C 2=D1 3=D2?, index by x
    _steps: list = field(repr=False)            # steps_to_cycle, None for D2?
    _excursions: list = field(repr=False)
    _sets: dict = field(default_factory=dict, repr=False)

    def _check_x(self, x: int) -> None:
        if type(x) is not int or not 1 <= x <= self.domain_bound:
            raise DomainError(f"{x!r} is outside the classified domain 1..{self.domain_bound}")

    def class_of(self, x: int) -> str:
        self._check_x(x)
        return _CODE_NAMES[self._codes[x]]

    def steps_to_cycle(self, x: int) -> int | None:
        """Index of the first orbit point on the eventual cycle; None for D2?."""
        self._check_x(x)
        return self._steps[x]

    def max_excursion(self, x: int) -> int:
        self._check_x(x)
        return self._excursions[x]

    def _class_set(self, code: int) -> frozenset:
        if code not in self._sets:
            self._sets[code] = frozenset(
                x for x in range(1, self.domain_bound + 1) if self._codes[x] == code
            )
        return self._sets[code]

    @property
    def c_set(self) -> frozenset:
        return self._class_set(1)

    @property
    def d1_set(self) -> frozenset:
        return self._class_set(2)

    @property
    def d2_candidates(self) -> frozenset:
        return self._class_set(3)

    def counts(self) -> dict[str, int]:
        tallies = {1: 0, 2: 0, 3: 0}
        for x in range(1, self.domain_bound + 1):
            tallies[self._codes[x]] += 1
        return {CLASS_C: tallies[1], CLASS_D1: tallies[2], CLASS_D2: tallies[3]}


def _walk(desc, x, limits, conv, vlim, cycles, cycle_ids):
    """Classify x, growing the caches only with budget-safe entries.

    conv maps a value to (steps_to_cycle, cycle_id, max_excursion) and vlim
    maps a value to (steps_until_ceiling_hit, max_excursion).  An entry is
    added only when a fresh walk from that value, with the full step budget,
    would provably reproduce it; everything else is re-walked later with its
    own budget.  That keeps results bit-identical to per-point iterate().

    Returns (code, steps_to_cycle or None, max_excursion) for x.
    """
    max_steps = limits.max_steps
    path = [x]
    pos = {x: 0}
    while True:
        steps = len(path) - 1
        if steps == max_steps:
            # out of budget; intermediates keep their larger budgets for later
            return 3, None, max(path)
        nxt = desc.apply(path[-1])
        apps = steps + 1

        hit = conv.get(nxt)
        if hit is not None:
            dist0, cid, exc0 = hit
            n_len = cycles[cid].length
            m = exc0
            for i in range(len(path) - 1, -1, -1):
                if path[i] > m:
                    m = path[i]
                d_i = (apps - i) + dist0
                if d_i + n_len > max_steps:
                    break  # d_i only grows as i shrinks
                conv[path[i]] = (d_i, cid, m)
            rec = conv.get(x)
            if rec is not None:
                d_x, _cid, exc_x = rec
                return (1 if d_x == 0 else 2), d_x, exc_x
            report = iterate(desc, x, limits)  # barely out of budget; exact fallback
            return 3, None, report.max_excursion

        v_hit = vlim.get(nxt)
        if v_hit is not None:
            v0, exc0 = v_hit
            m = exc0
            for i in range(len(path) - 1, -1, -1):
                if path[i] > m:
                    m = path[i]
                if (apps - i) + v0 > max_steps:
                    break
                vlim[path[i]] = ((apps - i) + v0, m)
            rec = vlim.get(x)
            if rec is not None:
                return 3, None, rec[1]
            report = iterate(desc, x, limits)
            return 3, None, report.max_excursion

        entry = pos.get(nxt)
        if entry is not None:
            # a fresh cycle; detection took apps <= max_steps, and every path
            # point detects it within (steps+1-i) + length <= apps <= budget
            cycle = CycleInfo.from_orbit(tuple(path[entry:]))
            cid = cycle_ids.get(cycle.members)
            if cid is None:
                cid = len(cycles)
                cycles.append(cycle)
                cycle_ids[cycle.members] = cid
            cyc_max = max(cycle.members)
            for idx in range(entry, len(path)):
                conv[path[idx]] = (0, cid, cyc_max)
            m = cyc_max
            for i in range(entry - 1, -1, -1):
                if path[i] > m:
                    m = path[i]
                conv[path[i]] = (entry - i, cid, m)
            d_x, _cid, exc_x = conv[x]
            return (1 if d_x == 0 else 2), d_x, exc_x

        if nxt > limits.max_value:
            # every path point sees this violation within its own budget
            m = 0
            for i in range(len(path) - 1, -1, -1):
                if path[i] > m:
                    m = path[i]
                vlim[path[i]] = (apps - i, m)
            return 3, None, vlim[x][1]

        pos[nxt] = len(path)
        path.append(nxt)


def partition(
    desc: MapDescriptor, domain_bound: int, limits: Limits | None = None
) -> PartitionResult:
    """Classify every x in 1..domain_bound exactly as iterate() would."""
    if type(domain_bound) is not int or domain_bound < 1:
        raise InvalidParameters(f"domain_bound must be >= 1, got {domain_bound!r}")
    limits = limits or Limits()
    if domain_bound > limits.max_value:
        # every domain point must be iterable inside the box
        raise InvalidParameters(
            f"domain_bound {domain_bound} exceeds max_value {limits.max_value}"
        )
    conv: dict[int, tuple[int, int, int]] = {}
    vlim: dict[int, tuple[int, int]] = {}
    cycles: list[CycleInfo] = []
    cycle_ids: dict[tuple[int, ...], int] = {}
    codes = bytearray(domain_bound + 1)
    steps_arr: list = [None] * (domain_bound + 1)
    exc_arr: list = [0] * (domain_bound + 1)
    for x in range(1, domain_bound + 1):
        rec = conv.get(x)
        if rec is not None:
            d_x, _cid, exc = rec
            code, st = (1 if d_x == 0 else 2), d_x
        else:
            v_rec = vlim.get(x)
            if v_rec is not None:
                code, st, exc = 3, None, v_rec[1]
            else:
                code, st, exc = _walk(desc, x, limits, conv, vlim, cycles, cycle_ids)
        codes[x] = code
        steps_arr[x] = st
        exc_arr[x] = exc
    ordered = tuple(sorted(cycles, key=lambda c: c.members[0]))
    return PartitionResult(desc, domain_bound, limits, ordered, codes, steps_arr, exc_arr)


def export_csv(result: PartitionResult, stream) -> None:
    """Columns x, class, steps_to_cycle (empty for D2?), max_excursion."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["x", "class", "steps_to_cycle", "max_excursion"])
    for x in range(1, result.domain_bound + 1):
        st = result._steps[x]
        writer.writerow([
            str(x),
            _CODE_NAMES[result._codes[x]],
            "" if st is None else str(st),
            str(result._excursions[x]),
        ])


def summary_dict(result: PartitionResult) -> dict:
    return {
        "map": result.descriptor.to_text(),
        "domain_bound": str(result.domain_bound),
        "limits": {
            "max_steps": result.limits.max_steps,
            "max_value": str(result.limits.max_value),
        },
        "counts": result.counts(),
        "cycles": [[str(m) for m in c.members] for c in result.cycles],
    }
