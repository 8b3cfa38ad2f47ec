"""Independent oracles and random-instance generators for the test suite.

Everything here is deliberately written against the public name-level API
(or from scratch) rather than reusing the library's internals, so that a
bug in the implementation cannot silently agree with its own check.
"""

import itertools
import random

from behapprox.model import Ltfs, RawBehavior, SystemSpec, validate_behavior

ACTIONS = ("alpha", "beta", "gamma", "delta")


# -- generators -----------------------------------------------------------

def random_ltfs(rng: random.Random, name: str, n_states: int,
                actions=ACTIONS, n_trans: int | None = None,
                deterministic: bool = False) -> Ltfs:
    """A random live behavior: every state keeps at least one outgoing move."""
    states = [f"s{i}" for i in range(n_states)]
    if n_trans is None:
        n_trans = rng.randint(n_states, 3 * n_states)
    triples = []
    used = set()
    for _ in range(n_trans):
        s = rng.choice(states)
        a = rng.choice(actions)
        d = rng.choice(states)
        key = (s, a) if deterministic else (s, a, d)
        if key in used:
            continue
        used.add(key)
        triples.append((s, a, d))
    covered = {s for s, _, _ in triples}
    for s in states:
        if s not in covered:
            a = rng.choice(actions)
            triples.append((s, a, rng.choice(states)))
    return validate_behavior(RawBehavior.make(name, states, "s0", triples))


def random_system(rng: random.Random, n_behaviors: int, n_states: int,
                  actions=ACTIONS, deterministic: bool = False) -> SystemSpec:
    behaviors = [
        random_ltfs(rng, f"beh{k}", rng.randint(1, n_states), actions,
                    deterministic=deterministic)
        for k in range(n_behaviors)
    ]
    return SystemSpec.make(behaviors, name="random")


def random_target(rng: random.Random, n_states: int, actions=ACTIONS,
                  deterministic: bool = True) -> Ltfs:
    return random_ltfs(rng, "target", n_states, actions,
                       deterministic=deterministic)


# -- simulation oracles ----------------------------------------------------

def naive_largest_simulation(left: Ltfs, right: Ltfs) -> set:
    """Reference fixpoint: rescan every pair until a full pass removes none."""
    pairs = {(p, q) for p in left.states for q in right.states}
    while True:
        drop = set()
        for p, q in pairs:
            for _, a, pd in left.transitions_from(p):
                if not any((pd, qd) in pairs
                           for qd in right.successors(q, a)):
                    drop.add((p, q))
                    break
        if not drop:
            return pairs
        pairs -= drop


def brute_force_largest_simulation(left: Ltfs, right: Ltfs) -> set:
    """Exhaustive search over every relation (state products up to 16 pairs).

    Checks all 2^(n1*n2) candidate relations with vectorized bit tricks and
    unions the ones that are simulations; the union of simulations is again
    a simulation, and by construction the largest one.
    """
    import numpy as np

    n1, n2 = len(left.states), len(right.states)
    nbits = n1 * n2
    if nbits > 16:
        raise ValueError("brute force capped at 16 state pairs")

    def bit(p: int, q: int) -> int:
        return 1 << (p * n2 + q)

    candidates = np.arange(1 << nbits, dtype=np.uint32)
    is_sim = np.ones(candidates.shape, dtype=bool)
    for p, pname in enumerate(left.states):
        for q, qname in enumerate(right.states):
            present = (candidates & bit(p, q)) != 0
            for _, a, pd_name in left.transitions_from(pname):
                pd = left.state_index[pd_name]
                match_mask = 0
                for qd_name in right.successors(qname, a):
                    match_mask |= bit(pd, right.state_index[qd_name])
                is_sim &= ~(present & ((candidates & match_mask) == 0))
    union = int(np.bitwise_or.reduce(candidates[is_sim]))
    return {(left.states[p], right.states[q])
            for p in range(n1) for q in range(n2) if union & bit(p, q)}


def naive_sim_equivalent(a: Ltfs, b: Ltfs) -> bool:
    return ((a.initial, b.initial) in naive_largest_simulation(a, b)
            and (b.initial, a.initial) in naive_largest_simulation(b, a))


# -- bounded language view ---------------------------------------------------

def bounded_action_sequences(behavior: Ltfs, depth: int) -> set:
    """All action sequences of length <= depth along paths from the initial."""
    out = {()}
    frontier = {((), behavior.initial)}
    for _ in range(depth):
        nxt = set()
        for seq, s in frontier:
            for _, a, d in behavior.transitions_from(s):
                nxt.add((seq + (a,), d))
        out |= {seq for seq, _ in nxt}
        frontier = nxt
    return out


# -- sub-behavior enumeration (maximality oracle) ---------------------------

def live_sub_behaviors(projection: Ltfs):
    """Every deadlock-free reachable restriction of the projection.

    Enumerates all subsets of the transition set, restricts each to the
    part reachable from the initial state, and yields those where every
    reachable state keeps an outgoing transition (legal behaviors only).
    """
    trans = projection.transitions
    for bits in range(1, 1 << len(trans)):
        chosen = [t for i, t in enumerate(trans) if bits >> i & 1]
        adj: dict = {}
        for s, a, d in chosen:
            adj.setdefault(s, []).append((a, d))
        seen = {projection.initial}
        queue = [projection.initial]
        while queue:
            s = queue.pop()
            for a, d in adj.get(s, ()):
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
        if any(s not in adj for s in seen):
            continue
        states = tuple(s for s in projection.states if s in seen)
        kept = tuple(t for t in chosen if t[0] in seen)
        yield Ltfs("candidate", states, projection.initial, kept)


# -- exact-composition oracle ----------------------------------------------

def composition_exists(system: SystemSpec, target: Ltfs) -> bool:
    """Independent decider: can the system realize the target exactly?

    Computes the largest "winning" set W of configurations
    (behavior-state tuple, target state) such that every request the target
    can issue has some delegate whose every nondeterministic outcome stays
    in W and matches the target's move. Exact composition exists iff the
    initial configuration wins. Written from first principles (direct
    fixpoint on configuration sets, no product construction).
    """
    behaviors = system.behaviors

    def config_ok(config, winning) -> bool:
        sys_states, t = config
        for _, action, t_next in target.transitions_from(t):
            honored = False
            for k, b in enumerate(behaviors):
                outcomes = b.successors(sys_states[k], action)
                if not outcomes:
                    continue
                if all(
                    (sys_states[:k] + (o,) + sys_states[k + 1:], t_next)
                        in winning
                        for o in outcomes):
                    honored = True
                    break
            if not honored:
                return False
        return True

    all_configs = {
        (combo, t)
        for combo in itertools.product(*(b.states for b in behaviors))
        for t in target.states
    }
    winning = set(all_configs)
    while True:
        bad = {c for c in winning if not config_ok(c, winning)}
        if not bad:
            break
        winning -= bad
    return (system.initial_tuple, target.initial) in winning


def target_request_sequences(target: Ltfs, depth: int):
    """All walks of the target from its initial state, as tuples of
    transition triples, up to the given length (the empty walk included)."""
    sequences = [()]
    frontier = [(target.initial, ())]
    for _ in range(depth):
        grown = []
        for state, prefix in frontier:
            for tr in target.transitions_from(state):
                extended = prefix + (tr,)
                sequences.append(extended)
                grown.append((tr[2], extended))
        frontier = grown
    return sequences


def positional_trace_realizable(system: SystemSpec, target: Ltfs, seq) -> bool:
    """Whether some positional table honors the request sequence under every
    nondeterministic outcome.  Backtracking search over per-(state, request)
    delegation assignments, shared across all outcome branches."""
    assignment = {}

    def place(i, belief):
        if i == len(seq):
            return True
        request = seq[i]
        states = sorted(belief)

        def per_state(j, next_belief):
            if j == len(states):
                return place(i + 1, frozenset(next_belief))
            sys_states = states[j]
            key = (sys_states, request)
            owned = key not in assignment
            indexes = range(1, system.size + 1) if owned else [assignment[key]]
            for k in indexes:
                outcomes = system.behavior(k).successors(sys_states[k - 1], request[1])
                if not outcomes:
                    continue
                if owned:
                    assignment[key] = k
                grown = next_belief + [
                    sys_states[:k - 1] + (o,) + sys_states[k:] for o in outcomes
                ]
                if per_state(j + 1, grown):
                    return True
                if owned:
                    del assignment[key]
            return False

        return per_state(0, [])

    return place(0, frozenset([system.initial_tuple]))


def imported_trace_realizable(result, seq) -> bool:
    """Whether some candidate-choice policy of an imported session honors the
    request sequence (in target vocabulary) under every outcome."""
    base = result.full
    system = result.system
    if base.initial not in result.pruned.kept_state_set or result.is_empty:
        return not seq
    adjacency = {}
    for (src, action, index, dst) in result.pruned.kept_transitions:
        adjacency.setdefault(src, []).append((action, index, dst))
    memo = {}

    def go(candidates, i):
        if i == len(seq):
            return True
        key = (candidates, i)
        if key in memo:
            return memo[key]
        _, action, requested_dst = seq[i]
        sys_states = base.states[next(iter(candidates))][0]
        indexes = sorted({
            k
            for c in candidates
            for (a, k, d) in adjacency.get(c, ())
            if a == action and base.target_part(d) == requested_dst
        })
        verdict = False
        for k in indexes:
            outcomes = system.behavior(k).successors(sys_states[k - 1], action)
            branch_ok = bool(outcomes)
            for outcome in outcomes:
                sys_after = sys_states[:k - 1] + (outcome,) + sys_states[k:]
                survivors = frozenset(
                    d
                    for c in candidates
                    for (a, kk, d) in adjacency.get(c, ())
                    if a == action and kk == k
                    and base.target_part(d) == requested_dst
                    and base.states[d][0] == sys_after
                )
                if not survivors or not go(survivors, i + 1):
                    branch_ok = False
                    break
            if branch_ok:
                verdict = True
                break
        memo[key] = verdict
        return verdict

    return go(frozenset([base.initial]), 0)


def check_ispl_structure(text):
    """Structural sanity check for exported ISPL text.

    Returns a list of problems (empty when the document is well-formed):
    the semantics header, a balanced Agent/end-Agent nesting with an
    Environment agent first, exactly one Evaluation/InitStates/Groups/
    Formulae section in that order, and statement lines ending in
    semicolons inside section bodies.
    """
    problems = []
    lines = [ln.rstrip() for ln in text.splitlines()]
    stripped = [ln.strip() for ln in lines if ln.strip()]
    if not stripped or stripped[0] != "Semantics = SA;":
        problems.append("first statement is not the semantics header")

    agent_names = []
    section_order = []
    stack = []
    openers = {
        "Obsvars:": "end Obsvars", "Vars:": "end Vars",
        "Protocol:": "end Protocol", "Evolution:": "end Evolution",
    }
    for line in stripped:
        if line.startswith("Agent "):
            stack.append("end Agent")
            agent_names.append(line.split()[1])
        elif line in ("Evaluation", "InitStates", "Groups", "Formulae"):
            stack.append("end " + line)
            section_order.append(line)
        elif line in openers:
            if not stack or stack[-1] != "end Agent":
                problems.append("%r outside an agent" % line)
            stack.append(openers[line])
        elif line.startswith("end "):
            if not stack or stack[-1] != line:
                problems.append("unbalanced %r" % line)
            else:
                stack.pop()
        elif not line.endswith(";"):
            problems.append("statement without semicolon: %r" % line)
    if stack:
        problems.append("unclosed sections: %r" % (stack,))
    if not agent_names or agent_names[0] != "Environment":
        problems.append("Environment agent is missing or not first")
    if "T" not in agent_names:
        problems.append("target agent T is missing")
    if section_order != ["Evaluation", "InitStates", "Groups", "Formulae"]:
        problems.append("trailing sections are %r" % (section_order,))
    return problems
