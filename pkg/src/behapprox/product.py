"""Product constructions over a system of behaviors.

Two products matter:

* the enacted system: the asynchronous product of the available behaviors,
  where at each step exactly one behavior moves and the transition records
  which one (its 1-based index);
* the enacted pairing of system and target: the enacted system constrained
  so that every step also advances the target by the same action. States
  that end up with no outgoing move (dead ends) are kept, deliberately:
  they are exactly what the pruning stage feeds on.

Both are built reachable-first by breadth-first search, interning states to
dense integers in discovery order; discovery order itself is fixed by
declaration order of behaviors, transitions and indexes, so the products
are deterministic artifacts. Full materialization (unreachable state tuples
included) is available behind a flag for inspection and counting.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import ProductError, E_EMPTY_SYSTEM
from .model import Ltfs, SystemSpec

#: (source state id, action, 1-based behavior index, destination state id)
IndexedTransition = tuple[int, str, int, int]


def _label_sys(sys_states: tuple) -> str:
    return ",".join(sys_states)


@dataclass(frozen=True)
class EnactedSystem:
    """Asynchronous product of the system's behaviors.

    ``states[i]`` is the tuple of per-behavior state names for interned
    state i; state 0 is always the initial state when built reachable-first.
    """

    system: SystemSpec
    states: tuple            # tuple of tuples of behavior state names
    initial: int
    transitions: tuple       # of IndexedTransition

    @property
    def potential_state_count(self) -> int:
        """Cardinality of the unrestricted product of state sets."""
        n = 1
        for b in self.system.behaviors:
            n *= len(b.states)
        return n

    @cached_property
    def state_id(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def state_label(self, i: int) -> str:
        return _label_sys(self.states[i])

    @cached_property
    def adjacency(self) -> tuple:
        adj = [[] for _ in self.states]
        for t in self.transitions:
            adj[t[0]].append(t)
        return tuple(tuple(row) for row in adj)

    def transitions_from(self, i: int) -> tuple:
        return self.adjacency[i]


@dataclass(frozen=True)
class FullEnactedSystem:
    """The enacted system advancing in lockstep with the target.

    ``states[i]`` is a pair (behavior state tuple, target state). A
    transition (i, a, k, j) reads: in state i the target requests action a,
    behavior k executes it, and the pair moves to state j. Dead-end states
    are retained.
    """

    system: SystemSpec
    target: Ltfs
    states: tuple            # tuple of ((behavior states...), target state)
    initial: int
    transitions: tuple       # of IndexedTransition

    @property
    def potential_state_count(self) -> int:
        n = len(self.target.states)
        for b in self.system.behaviors:
            n *= len(b.states)
        return n

    @cached_property
    def state_id(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def state_label(self, i: int) -> str:
        sys_states, t = self.states[i]
        return f"{_label_sys(sys_states)}|{t}"

    def sys_part(self, i: int) -> tuple:
        return self.states[i][0]

    def target_part(self, i: int) -> str:
        return self.states[i][1]

    @cached_property
    def adjacency(self) -> tuple:
        adj = [[] for _ in self.states]
        for t in self.transitions:
            adj[t[0]].append(t)
        return tuple(tuple(row) for row in adj)

    def transitions_from(self, i: int) -> tuple:
        return self.adjacency[i]

    @cached_property
    def dead_ends(self) -> tuple:
        """State ids with no outgoing transition."""
        return tuple(i for i in range(len(self.states))
                     if not self.adjacency[i])


def _require_nonempty(system: SystemSpec) -> None:
    if not system.behaviors:
        raise ProductError(
            E_EMPTY_SYSTEM,
            "cannot build a product over a system with no behaviors")


def _sys_moves(system: SystemSpec, sys_states: tuple, action: str):
    """Yield (index, successor tuple) for every behavior able to do action.

    Enumeration order: behaviors in declaration order, each behavior's
    nondeterministic outcomes in its declared transition order.
    """
    for k, b in enumerate(system.behaviors, start=1):
        for nxt in b.successors(sys_states[k - 1], action):
            yield k, sys_states[:k - 1] + (nxt,) + sys_states[k:]


def enacted_system(system: SystemSpec,
                   include_unreachable: bool = False) -> EnactedSystem:
    """Build the asynchronous product of the system's behaviors."""
    _require_nonempty(system)
    initial = system.initial_tuple

    if include_unreachable:
        states = tuple(itertools.product(*(b.states for b in system.behaviors)))
        ids = {s: i for i, s in enumerate(states)}
        transitions = []
        for i, tup in enumerate(states):
            for k, b in enumerate(system.behaviors, start=1):
                for _, a, d in b.transitions_from(tup[k - 1]):
                    transitions.append(
                        (i, a, k, ids[tup[:k - 1] + (d,) + tup[k:]]))
        return EnactedSystem(system, states, ids[initial], tuple(transitions))

    ids = {initial: 0}
    order = [initial]
    transitions = []
    queue = [initial]
    while queue:
        tup = queue.pop(0)
        i = ids[tup]
        for k, b in enumerate(system.behaviors, start=1):
            for _, a, d in b.transitions_from(tup[k - 1]):
                nxt = tup[:k - 1] + (d,) + tup[k:]
                if nxt not in ids:
                    ids[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                transitions.append((i, a, k, ids[nxt]))
    return EnactedSystem(system, tuple(order), 0, tuple(transitions))


def full_enacted_system(system: SystemSpec, target: Ltfs,
                        include_unreachable: bool = False) -> FullEnactedSystem:
    """Build the synchronized product of the enacted system with the target.

    From a state (S, t), every target transition t -a-> t' combined with
    every behavior move on a yields a successor (S', t'). States with no
    such combination are dead ends and stay in.
    """
    _require_nonempty(system)
    initial = (system.initial_tuple, target.initial)

    if include_unreachable:
        states = tuple(
            (combo, t)
            for combo in itertools.product(*(b.states for b in system.behaviors))
            for t in target.states)
        ids = {s: i for i, s in enumerate(states)}
        transitions = []
        for i, (tup, t) in enumerate(states):
            for _, a, t_next in target.transitions_from(t):
                for k, nxt in _sys_moves(system, tup, a):
                    transitions.append((i, a, k, ids[(nxt, t_next)]))
        return FullEnactedSystem(system, target, states, ids[initial],
                                 tuple(transitions))

    ids = {initial: 0}
    order = [initial]
    transitions = []
    queue = [initial]
    while queue:
        tup, t = queue.pop(0)
        i = ids[(tup, t)]
        for _, a, t_next in target.transitions_from(t):
            for k, nxt in _sys_moves(system, tup, a):
                pair = (nxt, t_next)
                if pair not in ids:
                    ids[pair] = len(order)
                    order.append(pair)
                    queue.append(pair)
                transitions.append((i, a, k, ids[pair]))
    return FullEnactedSystem(system, target, tuple(order), 0,
                             tuple(transitions))
