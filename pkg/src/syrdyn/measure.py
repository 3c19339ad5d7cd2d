"""A finite measure on a truncated preimage forest, power-bounded with M = 2.

Construction, per cycle i of length N (cycle trees are disjoint):

* level 0: every cycle member gets 1/(2N), so the cycle carries 1/2;
* level 1, nodes ascending as j = 1, 2, ...: 2^(-j-3), total below 2^-2;
* level l >= 2: children of a node with value m, ascending as t = 1, 2, ...:
  m * 2^(-t-1), so each node's children carry less than half its value;
* combined: mu = sum over cycles of 2^(-i-1) * mu_i, total at most 1.

1/(2N) is dyadic only when N is a power of two, so values are stored as a
DyadicRational times a symbolic 1/denom with odd denom; all comparisons are
exact cross-multiplications.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import InvalidParameters, OverlappingCycles, BoundViolation
from .maps import MapDescriptor
from .numeric import DyadicRational
from .trajectory import CycleInfo

__all__ = [
    "MeasureValue",
    "PreimageForest",
    "MeasureAssignment",
    "PowerBoundReport",
    "build_forest",
    "assign_measure",
    "measure_of",
    "check_power_bound",
    "export_json",
]


class MeasureValue:
    """Non-negative rational (dyadic) * 1/denom with odd denom, exact ops.

    Canonical: factors of two in the denominator move into the dyadic
    exponent, the odd gcd is divided out, and zero is stored over denom 1.
    Immutable by convention, like DyadicRational.
    """

    __slots__ = ("dyadic", "denom")

    def __init__(self, dyadic: DyadicRational | None = None, denom: int = 1):
        dyadic = dyadic if dyadic is not None else DyadicRational.zero()
        if not isinstance(dyadic, DyadicRational):
            raise InvalidParameters("dyadic part must be a DyadicRational")
        if type(denom) is not int or denom < 1:
            raise InvalidParameters(f"denominator must be a positive int, got {denom!r}")
        twos = (denom & -denom).bit_length() - 1
        denom >>= twos
        dyadic = dyadic.mul_pow2(-twos)
        if dyadic.num == 0:
            denom = 1
        else:
            g = math.gcd(dyadic.num, denom)
            if g > 1:
                dyadic = DyadicRational(dyadic.num // g, dyadic.exp)
                denom //= g
        self.dyadic = dyadic
        self.denom = denom

    @classmethod
    def zero(cls) -> "MeasureValue":
        return cls(DyadicRational.zero(), 1)

    def __add__(self, other):
        if not isinstance(other, MeasureValue):
            return NotImplemented
        if self.denom == other.denom:
            return MeasureValue(self.dyadic + other.dyadic, self.denom)
        g = math.gcd(self.denom, other.denom)
        lcm = self.denom // g * other.denom
        return MeasureValue(
            self.dyadic * (lcm // self.denom) + other.dyadic * (lcm // other.denom),
            lcm,
        )

    def mul_pow2(self, k: int) -> "MeasureValue":
        return MeasureValue(self.dyadic.mul_pow2(k), self.denom)

    def _diff(self, other) -> int:
        a, b = self.dyadic * other.denom, other.dyadic * self.denom
        return (a.num << b.exp) - (b.num << a.exp)

    def __eq__(self, other):
        if not isinstance(other, MeasureValue):
            return NotImplemented
        return self.dyadic == other.dyadic and self.denom == other.denom

    def __lt__(self, other):
        if not isinstance(other, MeasureValue):
            return NotImplemented
        return self._diff(other) < 0

    def __le__(self, other):
        if not isinstance(other, MeasureValue):
            return NotImplemented
        return self._diff(other) <= 0

    def __gt__(self, other):
        if not isinstance(other, MeasureValue):
            return NotImplemented
        return self._diff(other) > 0

    def __ge__(self, other):
        if not isinstance(other, MeasureValue):
            return NotImplemented
        return self._diff(other) >= 0

    def __hash__(self):
        return hash((self.dyadic, self.denom))

    def __bool__(self):
        return bool(self.dyadic)

    def __float__(self):
        return self.dyadic.num / ((1 << self.dyadic.exp) * self.denom)

    def __repr__(self):
        return f"MeasureValue({self.dyadic!r}, {self.denom})"

    def __str__(self):
        if self.denom == 1:
            return str(self.dyadic)
        return f"{self.dyadic} * 1/{self.denom}"

    def to_json_dict(self) -> dict:
        return {
            "dyadic": str(self.dyadic),
            "denom": str(self.denom),
            "decimal": self.dyadic.decimal_str()
            if self.denom == 1 and self.dyadic.exp <= 64
            else None,
        }


@dataclass(frozen=True)
class PreimageForest:
    """Truncated preimage trees over one tree per cycle, levels ascending.

    levels[i][l] lists level-l nodes of cycle i ascending; level 0 holds the
    cycle members.  parent maps every non-cycle node to its image under the
    map; children is the inverse, each tuple ascending.  The enumeration
    order is part of the contract: the measure depends on it.
    """

    descriptor: MapDescriptor
    cycles: tuple[CycleInfo, ...]
    depth: int
    levels: tuple[tuple[tuple[int, ...], ...], ...]
    parent: dict
    children: dict
    node_cycle: dict
    node_level: dict
    covered: frozenset


def build_forest(
    desc: MapDescriptor, cycles, depth: int
) -> PreimageForest:
    """Breadth-first preimage closure of each cycle, ascending within levels."""
    if type(depth) is not int or depth < 0:
        raise InvalidParameters(f"depth must be a non-negative int, got {depth!r}")
    cycles = tuple(cycles)
    if not cycles:
        raise InvalidParameters("need at least one cycle to build a forest")
    seen: set[int] = set()
    for cyc in cycles:
        cyc.verify(desc)
        overlap = seen.intersection(cyc.members)
        if overlap:
            raise OverlappingCycles(f"cycles share members {sorted(overlap)}")
        seen.update(cyc.members)
    parent: dict[int, int] = {}
    children: dict[int, tuple[int, ...]] = {}
    node_cycle: dict[int, int] = {}
    node_level: dict[int, int] = {}
    all_levels = []
    for ci, cyc in enumerate(cycles):
        level0 = tuple(sorted(cyc.members))
        levels = [level0]
        for v in level0:
            node_cycle[v] = ci
            node_level[v] = 0
        for lvl in range(1, depth + 1):
            staged = []
            for v in levels[lvl - 1]:
                for q in desc.preimage(v):
                    if q not in seen:
                        staged.append((q, v))
            staged.sort()
            for q, v in staged:
                seen.add(q)
                parent[q] = v
                children[v] = children.get(v, ()) + (q,)
                node_cycle[q] = ci
                node_level[q] = lvl
            levels.append(tuple(q for q, _v in staged))
        all_levels.append(tuple(levels))
    return PreimageForest(
        desc, cycles, depth, tuple(all_levels), parent, children,
        node_cycle, node_level, frozenset(seen),
    )


@dataclass(frozen=True)
class MeasureAssignment:
    forest: PreimageForest
    per_cycle: dict          # node -> MeasureValue under its own cycle's mu_i
    combined: dict           # node -> 2^(-i-1) * per_cycle, i 1-based
    per_cycle_totals: tuple  # MeasureValue per cycle (cycle-local scale)
    total: "MeasureValue"    # combined mass of the whole forest


def assign_measure(forest: PreimageForest) -> MeasureAssignment:
    per_cycle: dict[int, MeasureValue] = {}
    combined: dict[int, MeasureValue] = {}
    totals = []
    half = DyadicRational(1, 1)
    for ci, cyc in enumerate(forest.cycles):
        levels = forest.levels[ci]
        for v in levels[0]:
            per_cycle[v] = MeasureValue(half, cyc.length)
        if forest.depth >= 1:
            for j, v in enumerate(levels[1], start=1):
                per_cycle[v] = MeasureValue(DyadicRational(1, j + 3), 1)
        for lvl in range(2, forest.depth + 1):
            for parent_v in levels[lvl - 1]:
                for t, child in enumerate(forest.children.get(parent_v, ()), start=1):
                    per_cycle[child] = per_cycle[parent_v].mul_pow2(-(t + 1))
        cycle_total = MeasureValue.zero()
        scale = -(ci + 2)  # 2^(-i-1) with i 1-based
        for level in levels:
            for v in level:
                cycle_total = cycle_total + per_cycle[v]
                combined[v] = per_cycle[v].mul_pow2(scale)
        totals.append(cycle_total)
    total = MeasureValue.zero()
    for value in combined.values():
        total = total + value
    return MeasureAssignment(forest, per_cycle, combined, tuple(totals), total)


def measure_of(assignment: MeasureAssignment, a) -> MeasureValue:
    """Exact combined mass of a set of integers; uncovered points weigh 0."""
    out = MeasureValue.zero()
    combined = assignment.combined
    for v in set(a):
        mv = combined.get(v)
        if mv is not None:
            out = out + mv
    return out


@dataclass(frozen=True)
class PowerBoundReport:
    trials: int
    max_n: int
    seed: int
    comparisons: int
    violations: int
    worst_ratio: float | None
    worst: dict | None

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "max_n": self.max_n,
            "seed": self.seed,
            "comparisons": self.comparisons,
            "violations": self.violations,
            "bound_constant": 2,
            "worst_ratio": self.worst_ratio,
            "worst": self.worst,
        }


def check_power_bound(
    assignment: MeasureAssignment, trials: int = 1000, max_n: int = 5, seed: int = 1729
) -> PowerBoundReport:
    """Sample subsets A of covered nodes; assert mu(T^-n(A)) <= 2 mu(A), n <= max_n.

    Subsets are drawn reproducibly from the seed.  Preimages are recomputed
    through the map (not read off the stored tree links) and intersected with
    the covered set; the covered set is forward-closed, so iterating the
    one-step intersected preimage equals intersecting the n-step preimage.
    A violation is an internal bug: the construction guarantees the bound.
    """
    forest = assignment.forest
    if type(trials) is not int or trials < 1:
        raise InvalidParameters(f"trials must be >= 1, got {trials!r}")
    if type(max_n) is not int or max_n < 1:
        raise InvalidParameters(f"max_n must be >= 1, got {max_n!r}")
    if max_n > forest.depth:
        raise InvalidParameters(
            f"max_n {max_n} exceeds forest depth {forest.depth}; deeper preimages are unknowable"
        )
    rng = random.Random(seed)
    nodes = sorted(forest.covered)
    desc = forest.descriptor
    covered = forest.covered
    comparisons = 0
    worst_ratio = None
    worst = None
    for _ in range(trials):
        subset = frozenset(v for v in nodes if rng.getrandbits(1))
        mu_a = measure_of(assignment, subset)
        bound = mu_a.mul_pow2(1)
        current = subset
        for n in range(1, max_n + 1):
            pre = set()
            for y in current:
                for q in desc.preimage(y):
                    if q in covered:
                        pre.add(q)
            current = frozenset(pre)
            mu_n = measure_of(assignment, current)
            comparisons += 1
            if mu_n > bound:
                raise BoundViolation(
                    f"mu(T^-{n}(A)) = {mu_n} > 2*mu(A) = {bound} for |A| = {len(subset)}, seed {seed}"
                )
            if mu_a:
                ratio = float(mu_n) / float(mu_a)
                if worst_ratio is None or ratio > worst_ratio:
                    worst_ratio = ratio
                    worst = {
                        "n": n,
                        "set_size": len(subset),
                        "mu_set": str(mu_a),
                        "mu_preimage": str(mu_n),
                    }
    return PowerBoundReport(trials, max_n, seed, comparisons, 0, worst_ratio, worst)


def export_json(assignment: MeasureAssignment, report: PowerBoundReport | None = None) -> dict:
    forest = assignment.forest
    nodes = []
    for v in sorted(forest.covered):
        parent = forest.parent.get(v)
        nodes.append({
            "value": str(v),
            "cycle": forest.node_cycle[v] + 1,
            "level": forest.node_level[v],
            "parent": None if parent is None else str(parent),
            "cycle_local": assignment.per_cycle[v].to_json_dict(),
            "combined": assignment.combined[v].to_json_dict(),
        })
    cycles = []
    for ci, cyc in enumerate(forest.cycles):
        cycles.append({
            "index": ci + 1,
            "length": cyc.length,
            "members": [str(m) for m in cyc.members],
            "weight": str(DyadicRational(1, ci + 2)),
            "cycle_local_total": assignment.per_cycle_totals[ci].to_json_dict(),
        })
    return {
        "map": forest.descriptor.to_text(),
        "depth": forest.depth,
        "covered_nodes": len(forest.covered),
        "cycles": cycles,
        "nodes": nodes,
        "total": assignment.total.to_json_dict(),
        "power_bound": report.to_json_dict() if report else None,
    }
