"""Simulation and bisimulation machinery.

Two relations drive everything downstream:

* the largest simulation between two transition systems (one system's
  states mimicking another's, action by action), computed as a greatest
  fixpoint by deleting violating pairs until stable;
* the coarsest bisimulation partition of a single system, computed by
  signature-based partition refinement, from which we build quotients.

Simulation equivalence (each side simulates the other from the initial
states) is the notion of "same observable capability" used throughout:
quotients are compared to originals with it, and exactness of a candidate
target is decided by it.
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .model import Ltfs


@dataclass(frozen=True)
class SimulationRelation:
    """The largest simulation of ``left`` by ``right``, as state-name pairs.

    A pair (p, q) present in ``pairs`` means: every move p can take, q can
    match on the same action, landing in a pair that is again present.
    """

    left_name: str
    right_name: str
    pairs: frozenset

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def contains(self, left_state: str, right_state: str) -> bool:
        return (left_state, right_state) in self.pairs

    @cached_property
    def as_sorted_tuples(self) -> tuple:
        return tuple(sorted(self.pairs))


def _succ_by_action(system: Ltfs) -> list:
    """Per state, a dict action-name -> tuple of successor state indices."""
    table: list[dict] = [dict() for _ in system.states]
    for s, a, d in system.itransitions:
        table[s].setdefault(system.actions[a], []).append(d)
    return [{a: tuple(v) for a, v in row.items()} for row in table]


def largest_simulation(left: Ltfs, right: Ltfs) -> SimulationRelation:
    """Greatest fixpoint: start from the full relation, delete bad pairs.

    A pair (p, q) is bad when p has a move that q cannot currently match
    into a surviving pair. Deletions propagate through a worklist keyed on
    predecessor pairs, so each pair is only re-examined when one of the
    pairs it relied on disappears.
    """
    lsucc = _succ_by_action(left)
    rsucc = _succ_by_action(right)
    n1, n2 = len(left.states), len(right.states)

    lpred: list[dict] = [dict() for _ in range(n1)]
    for s, a, d in left.itransitions:
        lpred[d].setdefault(left.actions[a], set()).add(s)
    rpred: list[dict] = [dict() for _ in range(n2)]
    for s, a, d in right.itransitions:
        rpred[d].setdefault(right.actions[a], set()).add(s)

    ok = [[True] * n2 for _ in range(n1)]

    def holds(p: int, q: int) -> bool:
        for action, targets in lsucc[p].items():
            matches = rsucc[q].get(action, ())
            for pd in targets:
                if not any(ok[pd][qd] for qd in matches):
                    return False
        return True

    removed = deque()
    for p in range(n1):
        for q in range(n2):
            if not holds(p, q):
                ok[p][q] = False
                removed.append((p, q))

    while removed:
        pd, qd = removed.popleft()
        for action, lps in lpred[pd].items():
            rqs = rpred[qd].get(action)
            if not rqs:
                continue
            for p in lps:
                for q in rqs:
                    if ok[p][q] and not holds(p, q):
                        ok[p][q] = False
                        removed.append((p, q))

    pairs = frozenset(
        (left.states[p], right.states[q])
        for p in range(n1) for q in range(n2) if ok[p][q])
    return SimulationRelation(left.name, right.name, pairs)


def simulates(left: Ltfs, right: Ltfs) -> bool:
    """True when ``right`` can mimic ``left`` from the initial states on."""
    rel = largest_simulation(left, right)
    return rel.contains(left.initial, right.initial)


def sim_equivalent(a: Ltfs, b: Ltfs) -> bool:
    """Mutual initial-state simulation: same realizable capability."""
    return simulates(a, b) and simulates(b, a)


@dataclass(frozen=True)
class Partition:
    """A partition of a system's states into equivalence blocks.

    Blocks are ordered by their smallest member's interned index, and each
    block lists its members in interned order, so the partition (and any
    quotient built from it) is deterministic for a fixed input.
    """

    blocks: tuple  # tuple of tuples of state names

    @cached_property
    def _lookup(self) -> dict:
        return {s: i for i, block in enumerate(self.blocks) for s in block}

    def block_of(self, state: str) -> int:
        return self._lookup[state]

    @property
    def size(self) -> int:
        return len(self.blocks)


def bisim_partition(system: Ltfs) -> Partition:
    """Coarsest bisimulation partition, by signature refinement.

    Start with all states in one block; repeatedly split blocks whose
    members disagree on the signature {(action, destination block)} until
    nothing splits.
    """
    n = len(system.states)
    block_of = [0] * n
    adj = system.iadjacency

    while True:
        signatures = [
            frozenset((a, block_of[d]) for a, d in adj[s]) for s in range(n)
        ]
        # Renumber: group states by (old block, signature), numbering groups
        # by the smallest state index they contain.
        groups: dict = {}
        for s in range(n):
            groups.setdefault((block_of[s], signatures[s]), []).append(s)
        ordered = sorted(groups.values(), key=lambda members: members[0])
        new_block_of = [0] * n
        for i, members in enumerate(ordered):
            for s in members:
                new_block_of[s] = i
        if new_block_of == block_of:
            break
        block_of = new_block_of

    count = max(block_of) + 1 if n else 0
    members: list[list[str]] = [[] for _ in range(count)]
    for s in range(n):
        members[block_of[s]].append(system.states[s])
    return Partition(tuple(tuple(m) for m in members))


def quotient(system: Ltfs, partition: Partition | None = None,
             prefix: str = "q") -> Ltfs:
    """Collapse each block to one state; transitions lift blockwise.

    With the default (bisimulation) partition the result is the smallest
    system bisimilar to the input. Block k becomes state ``q<k>``; block
    order follows the partition, so names are stable for a fixed input.
    """
    if partition is None:
        partition = bisim_partition(system)
    name_of = {
        s: f"{prefix}{i}"
        for i, block in enumerate(partition.blocks) for s in block
    }
    states = tuple(f"{prefix}{i}" for i in range(partition.size))
    transitions = []
    seen = set()
    for s, a, d in system.transitions:
        lifted = (name_of[s], a, name_of[d])
        if lifted not in seen:
            seen.add(lifted)
            transitions.append(lifted)
    return Ltfs(system.name, states, name_of[system.initial],
                tuple(transitions))
