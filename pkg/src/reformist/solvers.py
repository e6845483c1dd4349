"""Exact solvers for the shortest reformist sequence problem.

All solvers answer the same question: the minimum number of improvement
steps from the initial matching to the reformist matching.  ``bfs_shortest``
is the reference search over the full state space.  The structural solvers
exploit restrictions (list length at most three, at most two acceptors per
item, few stopover items, small step budgets) and agree with the search
exactly; every one returns a witness sequence that replays cleanly.

Solvers other than ``bfs_shortest`` require a preprocessed instance: every
preference list must run from the agent's reformist item at the top to her
initial item at the bottom (see ``engine.preprocess``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .engine import compute_reformist, preprocess, verify_sequence
from .errors import (
    BudgetExceededError,
    InternalInvariantError,
    ValidationError,
)
from .model import (
    ExchangeStep,
    Instance,
    Matching,
    ReformSequence,
    apply_exchange,
    best_feasible_item,
    check_instance,
    check_matching,
    is_envy_free,
)

DEFAULT_STATE_BUDGET = 2_000_000


@dataclass(frozen=True)
class SolveResult:
    """Answer of a shortest-sequence solver.

    ``length`` is None when the question was a bounded decision and the
    answer is no.  ``nodes`` and ``depth`` expose search effort for tests.
    """

    length: int | None
    sequence: ReformSequence | None
    algorithm: str
    nodes: int = 0
    depth: int = 0

    @property
    def feasible(self) -> bool:
        return self.length is not None


def _rank_state(inst: Instance, matching: Matching) -> tuple[int, ...]:
    return tuple(
        inst.rank_of(i, matching.item_of(i)) for i in range(inst.num_agents)
    )


def _state_matching(inst: Instance, state: tuple[int, ...]) -> Matching:
    return Matching(tuple(inst.prefs[i][r] for i, r in enumerate(state)))


def _successors(inst: Instance, state: tuple[int, ...]):
    """All improvement steps from a state, lowest agent and best item first."""
    assigned = {inst.prefs[i][r] for i, r in enumerate(state)}
    for i, cur_rank in enumerate(state):
        for pos in range(cur_rank):
            y = inst.prefs[i][pos]
            if y in assigned:
                continue
            blocked = False
            for j, rank_j in inst.acceptors(y):
                if j != i and rank_j < state[j]:
                    blocked = True
                    break
            if not blocked:
                nxt = list(state)
                nxt[i] = pos
                yield i, y, tuple(nxt)


def bfs_shortest(
    inst: Instance,
    initial: Matching,
    max_states: int = DEFAULT_STATE_BUDGET,
) -> SolveResult:
    """Breadth-first search from the initial matching to the reformist one.

    States are per-agent preference ranks.  Neighbours expand lowest agent
    first and most preferred target first, so the witness is the first
    shortest step list in that canonical order.  Raises BudgetExceededError
    instead of ever guessing.
    """
    check_instance(inst)
    check_matching(inst, initial)
    if not is_envy_free(inst, initial):
        raise ValidationError("initial matching is not envy-free")
    sigma, _ = compute_reformist(inst, initial)
    start = _rank_state(inst, initial)
    goal = _rank_state(inst, sigma)

    parents: dict[tuple[int, ...], tuple[tuple[int, ...], ExchangeStep] | None] = {
        start: None
    }
    queue = deque([start])
    expanded = 0
    while queue:
        state = queue.popleft()
        if state == goal:
            steps: list[ExchangeStep] = []
            walk = state
            while parents[walk] is not None:
                prev, step = parents[walk]
                steps.append(step)
                walk = prev
            steps.reverse()
            return SolveResult(
                length=len(steps),
                sequence=ReformSequence(initial, tuple(steps)),
                algorithm="bfs",
                nodes=expanded,
            )
        expanded += 1
        if expanded > max_states:
            raise BudgetExceededError(
                f"bfs state budget of {max_states} states exceeded"
            )
        for i, y, nxt in _successors(inst, state):
            if nxt not in parents:
                parents[nxt] = (state, ExchangeStep(i, inst.prefs[i][state[i]], y))
                queue.append(nxt)
    raise InternalInvariantError("reformist matching unreachable in state search")


def reachable_matchings(
    inst: Instance,
    initial: Matching,
    max_states: int = DEFAULT_STATE_BUDGET,
) -> list[Matching]:
    """Every matching reachable by improvement steps, found by flood fill."""
    check_instance(inst)
    check_matching(inst, initial)
    if not is_envy_free(inst, initial):
        raise ValidationError("initial matching is not envy-free")
    start = _rank_state(inst, initial)
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        if len(seen) > max_states:
            raise BudgetExceededError(f"state budget of {max_states} exceeded")
        for _, _, nxt in _successors(inst, state):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return [_state_matching(inst, s) for s in sorted(seen)]


def _require_preprocessed(inst: Instance, initial: Matching) -> Matching:
    """Check the preprocessed shape and return the reformist matching."""
    check_instance(inst)
    check_matching(inst, initial)
    if not is_envy_free(inst, initial):
        raise ValidationError("initial matching is not envy-free")
    sigma, _ = compute_reformist(inst, initial)
    for i in range(inst.num_agents):
        plist = inst.prefs[i]
        if plist[0] != sigma.item_of(i) or plist[-1] != initial.item_of(i):
            raise ValidationError(
                "instance is not preprocessed: run engine.preprocess first "
                f"(agent {inst.agent_names[i]} holds items outside her band)"
            )
    return sigma


def shortest_deg3(inst: Instance, initial: Matching) -> SolveResult:
    """Exact solver when every preference list has at most three items.

    After preprocessing each agent holds the bottom of her list and wants
    the top, with at most one item between.  Arcs i -> j between agents
    whenever i's top item is j's middle item give an acyclic digraph;
    moving a sink agent straight to her top never creates envy, so
    eliminating sinks yields a sequence with exactly one step per agent.
    """
    sigma = _require_preprocessed(inst, initial)
    n = inst.num_agents
    for i in range(n):
        if inst.list_length(i) > 3:
            raise ValidationError(
                f"agent {inst.agent_names[i]} has more than three acceptable items"
            )

    middle_owner = {
        inst.prefs[i][1]: i for i in range(n) if inst.list_length(i) == 3
    }
    out_arcs: dict[int, set[int]] = {i: set() for i in range(n)}
    in_arcs: dict[int, set[int]] = {i: set() for i in range(n)}
    for i in range(n):
        j = middle_owner.get(sigma.item_of(i))
        if j is not None and j != i:
            out_arcs[i].add(j)
            in_arcs[j].add(i)

    cur = initial
    steps: list[ExchangeStep] = []
    remaining = set(range(n))
    while remaining:
        sink = next((i for i in sorted(remaining) if not out_arcs[i]), None)
        if sink is None:
            raise InternalInvariantError("agent digraph has a cycle")
        step = ExchangeStep(sink, cur.item_of(sink), sigma.item_of(sink))
        cur = apply_exchange(inst, cur, step)
        steps.append(step)
        remaining.remove(sink)
        for i in in_arcs[sink]:
            out_arcs[i].discard(sink)
        in_arcs[sink] = set()
    if cur != sigma:
        raise InternalInvariantError("sink elimination missed the reformist matching")
    return SolveResult(
        length=len(steps),
        sequence=ReformSequence(initial, tuple(steps)),
        algorithm="deg3",
    )


# ---------------------------------------------------------------------------
# Group-target relaxation used for instances whose items have at most two
# acceptors.  Each agent gets a target set (a top segment of her list) and
# the agents are partitioned into groups; envy across groups is suppressed
# once any member of the envier's group holds one of her own target items.
# Sought: the shortest sequence of relaxed-envy-free improvement steps after
# which every group has a member inside her targets.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneralizedInstance:
    """Shortest-sequence question with per-agent target sets and groups.

    ``targets[i]`` is the least preferred item agent i would settle for; her
    target set is everything she ranks at least as high.  ``partition``
    must split the agents into disjoint groups.
    """

    base: Instance
    initial: Matching
    targets: tuple[int, ...]
    partition: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(
            self, "partition", tuple(tuple(g) for g in self.partition)
        )


def _check_generalized(g: GeneralizedInstance) -> None:
    inst = g.base
    check_instance(inst)
    check_matching(inst, g.initial)
    if len(g.targets) != inst.num_agents:
        raise ValidationError("one target item per agent is required")
    for i, x in enumerate(g.targets):
        if inst.rank_of(i, x) is None:
            raise ValidationError(
                f"target of agent {inst.agent_names[i]} is not acceptable to her"
            )
    seen: set[int] = set()
    for group in g.partition:
        for i in group:
            if i in seen or not (0 <= i < inst.num_agents):
                raise ValidationError("groups must partition the agents")
            seen.add(i)
    if len(seen) != inst.num_agents:
        raise ValidationError("groups must partition the agents")
    for x in range(inst.num_items):
        if len(inst.acceptors(x)) > 2:
            raise ValidationError(
                f"item {inst.item_names[x]} is acceptable to more than two agents"
            )


def _group_envy_pairs(
    inst: Instance,
    cur: dict[int, int],
    groups: list[tuple[int, ...]],
    thr: dict[int, int],
) -> list[tuple[int, int]]:
    """Relaxed envy among the given agents at the given holdings."""
    group_of = {i: gi for gi, group in enumerate(groups) for i in group}
    satisfied = [
        any(inst.rank_of(i, cur[i]) <= thr[i] for i in group) for group in groups
    ]
    agents = sorted(cur)
    pairs = []
    for i in agents:
        own = inst.rank_of(i, cur[i])
        for j in agents:
            if i == j:
                continue
            other = inst.rank_of(i, cur[j])
            if other is None or other >= own:
                continue
            if group_of[i] != group_of[j] and satisfied[group_of[i]]:
                continue
            pairs.append((i, j))
    return pairs


def generalized_envy_pairs(
    g: GeneralizedInstance, matching: Matching
) -> list[tuple[int, int]]:
    """Relaxed envy pairs of a full matching, for tests and demos."""
    _check_generalized(g)
    inst = g.base
    check_matching(inst, matching)
    thr = {i: inst.rank_of(i, g.targets[i]) for i in range(inst.num_agents)}
    cur = {i: matching.item_of(i) for i in range(inst.num_agents)}
    groups = [tuple(sorted(group)) for group in g.partition if group]
    return _group_envy_pairs(inst, cur, groups, thr)


def is_satisfactory(g: GeneralizedInstance, matching: Matching) -> bool:
    """True when every group has a member holding one of her targets."""
    inst = g.base
    check_matching(inst, matching)
    for group in g.partition:
        if group and not any(
            inst.rank_of(i, matching.item_of(i)) <= inst.rank_of(i, g.targets[i])
            for i in group
        ):
            return False
    return True


def _ln_feasible(
    inst: Instance,
    cur: dict[int, int],
    held_elsewhere: set[int],
    groups: list[tuple[int, ...]],
    thr: dict[int, int],
    agent: int,
    item: int,
) -> bool:
    if item in held_elsewhere or item in cur.values():
        return False
    if inst.rank_of(agent, item) >= inst.rank_of(agent, cur[agent]):
        return False
    trial = dict(cur)
    trial[agent] = item
    return not _group_envy_pairs(inst, trial, groups, thr)


def _sccs(adj: dict[int, set[int]]) -> list[list[int]]:
    """Strongly connected components, iterative Tarjan, deterministic order."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in sorted(adj):
        if root in index:
            continue
        work = [(root, iter(sorted(adj[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(adj[w]))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def _solve_groups(
    inst: Instance,
    cur: dict[int, int],
    groups: list[tuple[int, ...]],
    thr: dict[int, int],
    held_elsewhere: set[int],
    depth: int,
    stats: dict[str, int],
    prev_measure: int | None,
) -> tuple[int, list[ExchangeStep]]:
    """Recursive core of the group-target solver.

    Groups already holding a target are dropped with their members frozen
    in place.  Failing that, a single relaxed-envy-free swap that lands an
    agent inside her targets is taken and the group dropped.  Otherwise
    every target item is unassigned but envied by its one other acceptor,
    and the groups of a source strongly connected component of the
    "my list meets your targets" digraph are merged with lowered targets;
    the deeper solution is spliced open at the first moment a merged agent
    enters her lowered target set, a chain of original-target assignments
    walks the component, and the rest of the deeper solution replays.
    """
    stats["depth"] = max(stats["depth"], depth)
    measure = sum(
        inst.list_length(i) - (thr[i] + 1) for group in groups for i in group
    ) + sum(len(group) for group in groups)
    if prev_measure is not None and measure >= prev_measure:
        raise InternalInvariantError("group recursion measure failed to decrease")

    if not groups:
        return 0, []

    # Drop any group that already holds one of its targets.
    for gi, group in enumerate(groups):
        if any(inst.rank_of(i, cur[i]) <= thr[i] for i in group):
            rest = groups[:gi] + groups[gi + 1 :]
            sub_cur = {i: x for i, x in cur.items() if i not in group}
            sub_held = held_elsewhere | {cur[i] for i in group}
            return _solve_groups(
                inst, sub_cur, rest, thr, sub_held, depth + 1, stats, measure
            )

    # A single swap that satisfies a group outright.
    for gi, group in enumerate(groups):
        for i in group:
            for pos in range(thr[i] + 1):
                x = inst.prefs[i][pos]
                if _ln_feasible(inst, cur, held_elsewhere, groups, thr, i, x):
                    step = ExchangeStep(i, cur[i], x)
                    rest = groups[:gi] + groups[gi + 1 :]
                    sub_cur = {a: v for a, v in cur.items() if a not in group}
                    sub_held = (
                        held_elsewhere
                        | {x}
                        | {cur[a] for a in group if a != i}
                    )
                    length, steps = _solve_groups(
                        inst,
                        sub_cur,
                        rest,
                        thr,
                        sub_held,
                        depth + 1,
                        stats,
                        measure,
                    )
                    return length + 1, [step] + steps

    # Merge a source strongly connected component of the group digraph.
    k = len(groups)
    target_sets = {
        i: {inst.prefs[i][pos] for pos in range(thr[i] + 1)}
        for group in groups
        for i in group
    }
    adj: dict[int, set[int]] = {a: set() for a in range(k)}
    for a, ga in enumerate(groups):
        for b, gb in enumerate(groups):
            if a != b and any(
                target_sets[j] & set(inst.prefs[i]) for i in ga for j in gb
            ):
                adj[a].add(b)
    comps = _sccs(adj)
    comp_of = {v: ci for ci, comp in enumerate(comps) for v in comp}
    has_incoming = set()
    for a in range(k):
        for b in adj[a]:
            if comp_of[a] != comp_of[b]:
                has_incoming.add(comp_of[b])
    sources = [ci for ci in range(len(comps)) if ci not in has_incoming]
    source = min(sources, key=lambda ci: min(comps[ci]))
    component = comps[source]
    merged_agents = sorted(i for gi in component for i in groups[gi])
    merged_set = set(merged_agents)

    pooled: set[int] = set()
    for i in merged_agents:
        pooled |= target_sets[i]
    new_thr = dict(thr)
    for i in merged_agents:
        new_thr[i] = max(
            inst.rank_of(i, x)
            for x in pooled
            if inst.rank_of(i, x) is not None
        )

    merged_groups = [g for gi, g in enumerate(groups) if gi not in component]
    merged_groups.append(tuple(merged_agents))
    merged_groups.sort(key=lambda g: min(g))
    sub_len, sub_steps = _solve_groups(
        inst,
        dict(cur),
        merged_groups,
        new_thr,
        set(held_elsewhere),
        depth + 1,
        stats,
        measure,
    )

    # Splice: replay until a merged agent first enters her lowered targets.
    trail = dict(cur)
    prefix: list[ExchangeStep] = []
    entered: int | None = None
    split = 0
    for i in merged_agents:
        if inst.rank_of(i, trail[i]) <= new_thr[i]:
            entered = i
            break
    if entered is None:
        for idx, step in enumerate(sub_steps):
            trail[step.agent] = step.to_item
            prefix.append(step)
            split = idx + 1
            if (
                step.agent in merged_set
                and inst.rank_of(step.agent, trail[step.agent])
                <= new_thr[step.agent]
            ):
                entered = step.agent
                break
    if entered is None:
        raise InternalInvariantError(
            "no merged agent ever reached her lowered targets"
        )

    anchor = next(
        x
        for x in inst.prefs[entered]
        if x in pooled and inst.rank_of(entered, x) == new_thr[entered]
    )
    insert: list[ExchangeStep] = []

    def place(agent: int, item: int) -> None:
        if item in trail.values() or item in held_elsewhere:
            raise InternalInvariantError("splice target item is already held")
        if inst.rank_of(agent, item) >= inst.rank_of(agent, trail[agent]):
            raise InternalInvariantError("splice step is not an improvement")
        trial = dict(trail)
        trial[agent] = item
        if _group_envy_pairs(inst, trial, groups, thr):
            raise InternalInvariantError("splice step creates relaxed envy")
        insert.append(ExchangeStep(agent, trail[agent], item))
        trail[agent] = item

    first_gi, first_agent = next(
        (gi, i)
        for gi in component
        for i in groups[gi]
        if anchor in target_sets[i]
    )
    place(first_agent, anchor)
    covered = [first_gi]
    while len(covered) < len(component):
        found: tuple[int, int, int] | None = None
        for gi in component:
            if gi in covered or found:
                continue
            for src_gi in covered:
                for holder in groups[src_gi]:
                    for j in sorted(groups[gi]):
                        shared = sorted(
                            target_sets[j] & set(inst.prefs[holder]),
                            key=lambda x: inst.rank_of(j, x),
                        )
                        for x in shared:
                            if (
                                x not in trail.values()
                                and x not in held_elsewhere
                            ):
                                found = (gi, j, x)
                                break
                        if found:
                            break
                    if found:
                        break
                if found:
                    break
        if not found:
            raise InternalInvariantError(
                "component walk could not cover every group"
            )
        gi, agent, item = found
        place(agent, item)
        covered.append(gi)

    suffix: list[ExchangeStep] = []
    for step in sub_steps[split:]:
        if step.agent in merged_set:
            continue
        suffix.append(ExchangeStep(step.agent, trail[step.agent], step.to_item))
        trail[step.agent] = step.to_item

    steps = prefix + insert + suffix
    length = sub_len + len(component)
    if len(steps) != length:
        raise InternalInvariantError(
            "spliced sequence length drifted from the recurrence"
        )
    return length, steps


def solve_general_LN(g: GeneralizedInstance) -> SolveResult:
    """Shortest sequence to a matching where every group holds a target.

    Requires every item acceptable to at most two agents and a relaxed-
    envy-free initial matching.
    """
    _check_generalized(g)
    inst = g.base
    thr = {i: inst.rank_of(i, g.targets[i]) for i in range(inst.num_agents)}
    cur = {i: g.initial.item_of(i) for i in range(inst.num_agents)}
    groups = [tuple(sorted(group)) for group in g.partition if group]
    groups.sort(key=lambda grp: min(grp))
    if _group_envy_pairs(inst, cur, groups, thr):
        raise ValidationError("initial matching has relaxed envy")
    stats = {"depth": 0}
    length, steps = _solve_groups(inst, cur, groups, thr, set(), 0, stats, None)
    return SolveResult(
        length=length,
        sequence=ReformSequence(g.initial, tuple(steps)),
        algorithm="general-ln",
        depth=stats["depth"],
    )


def shortest_two_acceptor(inst: Instance, initial: Matching) -> SolveResult:
    """Exact solver when every item is acceptable to at most two agents.

    On a preprocessed instance the target set of each agent collapses to
    her reformist item alone, which makes the group-target relaxation with
    singleton groups coincide with plain envy-freeness; the generalized
    solver then answers precisely the shortest reformist sequence question.
    """
    sigma = _require_preprocessed(inst, initial)
    g = GeneralizedInstance(
        base=inst,
        initial=initial,
        targets=tuple(sigma.assignment),
        partition=tuple((i,) for i in range(inst.num_agents)),
    )
    inner = solve_general_LN(g)
    report = verify_sequence(inst, inner.sequence)
    if not report.valid or report.final != sigma:
        raise InternalInvariantError(
            f"two-acceptor solver produced an invalid witness: {report.reason}"
        )
    return SolveResult(
        length=inner.length,
        sequence=inner.sequence,
        algorithm="two-acceptor",
        depth=inner.depth,
    )


def fpt_by_length(inst: Instance, initial: Matching, budget: int) -> SolveResult:
    """Decide whether the reformist matching is reachable within ``budget``
    steps, returning the shortest witness when it is.

    Branches over which agent moves next, always to her most preferred
    feasible item; that choice loses no optimal solution because an item
    feasible now stays below every other agent's holdings forever.  After
    preprocessing every surviving agent still has to move, so more agents
    than budget is immediately infeasible.
    """
    sigma = _require_preprocessed(inst, initial)
    if budget < 0:
        raise ValidationError("step budget must be non-negative")
    n = inst.num_agents
    if n > budget:
        return SolveResult(length=None, sequence=None, algorithm="fpt-length")

    best: dict[str, object] = {"len": None, "steps": None}
    seen: dict[tuple[int, ...], int] = {}
    counter = {"nodes": 0}

    def pending(matching: Matching) -> int:
        return sum(
            1 for i in range(n) if matching.item_of(i) != sigma.item_of(i)
        )

    def dfs(matching: Matching, spent: int, trail: list[ExchangeStep]) -> None:
        if matching == sigma:
            if best["len"] is None or spent < best["len"]:
                best["len"] = spent
                best["steps"] = tuple(trail)
            return
        bound = spent + pending(matching)
        if bound > budget:
            return
        if best["len"] is not None and bound >= best["len"]:
            return
        prior = seen.get(matching.assignment)
        if prior is not None and prior <= spent:
            return
        seen[matching.assignment] = spent
        counter["nodes"] += 1
        for i in range(n):
            y = best_feasible_item(inst, matching, i)
            if y is None:
                continue
            step = ExchangeStep(i, matching.item_of(i), y)
            trail.append(step)
            dfs(matching.replace(i, y), spent + 1, trail)
            trail.pop()

    dfs(initial, 0, [])
    if counter["nodes"] > max(n, 1) ** budget:
        raise InternalInvariantError("branching explored more nodes than its bound")
    if best["len"] is None:
        return SolveResult(
            length=None,
            sequence=None,
            algorithm="fpt-length",
            nodes=counter["nodes"],
        )
    return SolveResult(
        length=best["len"],
        sequence=ReformSequence(initial, best["steps"]),
        algorithm="fpt-length",
        nodes=counter["nodes"],
    )


def fpt_by_intermediate(inst: Instance, initial: Matching) -> SolveResult:
    """Exact solver parameterized by the number of stopover items, those
    neither initially held nor reformist targets.

    Direct moves to reformist items are performed greedily whenever
    feasible; deferring one never helps because nobody else will ever want
    a currently takeable target again.  When no direct move remains, the
    next exchange in any continuation must grab a stopover that improves
    on exactly one agent's current item, since a second such agent would
    envy the grab.  Branch on hopping onto such an item now versus
    discarding it for good.  Agents holding something better already will
    never come back down for it, so the discard is genuine and either
    branch burns the item, bounding the depth by the number of stopovers.
    """
    sigma = _require_preprocessed(inst, initial)
    n = inst.num_agents
    pool = frozenset(range(inst.num_items)) - set(initial.assignment) - set(
        sigma.assignment
    )
    stats = {"depth": 0}

    def greedy_direct(cur: dict[int, int], finished: set[int]) -> list[ExchangeStep]:
        steps = []
        while True:
            held = set(cur.values())
            for i in sorted(set(cur) - finished):
                target = sigma.item_of(i)
                if target in held:
                    continue
                if any(
                    j != i and rank_j < inst.rank_of(j, cur[j])
                    for j, rank_j in inst.acceptors(target)
                ):
                    continue
                steps.append(ExchangeStep(i, cur[i], target))
                cur[i] = target
                finished.add(i)
                break
            else:
                return steps

    def solve(
        cur: dict[int, int],
        finished: set[int],
        available: frozenset[int],
        depth: int,
    ) -> tuple[int, list[ExchangeStep]] | None:
        stats["depth"] = max(stats["depth"], depth)
        cur = dict(cur)
        finished = set(finished)
        prefix = greedy_direct(cur, finished)
        if len(finished) == n:
            return len(prefix), prefix
        held = set(cur.values())
        candidate: tuple[int, int] | None = None
        for x in sorted(available - held):
            takers = [
                j
                for j, rank_j in inst.acceptors(x)
                if rank_j < inst.rank_of(j, cur[j])
            ]
            if len(takers) == 1:
                candidate = (takers[0], x)
                break
        if candidate is None:
            return None
        agent, x = candidate
        outcomes = []
        hop_cur = dict(cur)
        hop_cur[agent] = x
        sub = solve(hop_cur, finished, available - {x}, depth + 1)
        if sub is not None:
            length, steps = sub
            outcomes.append(
                (
                    length + 1 + len(prefix),
                    prefix + [ExchangeStep(agent, cur[agent], x)] + steps,
                )
            )
        sub = solve(cur, finished, available - {x}, depth + 1)
        if sub is not None:
            length, steps = sub
            outcomes.append((length + len(prefix), prefix + steps))
        if not outcomes:
            return None
        return min(outcomes, key=lambda pair: pair[0])

    answer = solve(
        {i: initial.item_of(i) for i in range(n)},
        set(),
        pool,
        0,
    )
    if answer is None:
        raise InternalInvariantError("stopover branching found no sequence at all")
    if stats["depth"] > len(pool):
        raise InternalInvariantError("stopover branching exceeded its depth bound")
    length, steps = answer
    return SolveResult(
        length=length,
        sequence=ReformSequence(initial, tuple(steps)),
        algorithm="fpt-k",
        depth=stats["depth"],
    )


@dataclass(frozen=True)
class SolveOptions:
    """Budgets steering which exact solver ``solve_auto`` dispatches to."""

    stopover_cap: int = 12
    bfs_state_budget: int = 200_000
    length_cap: int | None = None


def solve_auto(
    inst: Instance,
    initial: Matching,
    options: SolveOptions | None = None,
) -> SolveResult:
    """Preprocess, pick the cheapest applicable exact solver, and translate
    the witness back to the original instance's ids."""
    options = options or SolveOptions()
    report = preprocess(inst, initial)
    red, red_mu = report.reduced, report.reduced_initial
    n = red.num_agents

    if n == 0:
        return SolveResult(
            length=0,
            sequence=ReformSequence(initial, ()),
            algorithm="preprocess-only",
        )

    if all(red.list_length(i) <= 3 for i in range(n)):
        inner = shortest_deg3(red, red_mu)
    elif all(len(red.acceptors(x)) <= 2 for x in range(red.num_items)):
        inner = shortest_two_acceptor(red, red_mu)
    elif red.num_items - 2 * n <= options.stopover_cap:
        inner = fpt_by_intermediate(red, red_mu)
    else:
        estimate = 1
        for i in range(n):
            estimate *= red.list_length(i)
            if estimate > options.bfs_state_budget:
                break
        if estimate <= options.bfs_state_budget:
            inner = bfs_shortest(red, red_mu, max_states=options.bfs_state_budget)
        else:
            most_steps = sum(red.list_length(i) - 1 for i in range(n))
            budget = n
            inner = SolveResult(length=None, sequence=None, algorithm="fpt-length")
            while not inner.feasible:
                if options.length_cap is not None and budget > options.length_cap:
                    raise BudgetExceededError(
                        "no exact solver applicable within budgets: "
                        f"longest list has {max(red.list_length(i) for i in range(n))} items, "
                        f"{red.num_items - 2 * n} stopovers exceed cap {options.stopover_cap}, "
                        f"state estimate exceeds {options.bfs_state_budget}, "
                        f"step budget capped at {options.length_cap}"
                    )
                if budget > most_steps:
                    raise InternalInvariantError(
                        "deepening passed the trivial length bound without an answer"
                    )
                inner = fpt_by_length(red, red_mu, budget)
                budget += 1

    lifted = report.lift_sequence(inner.sequence, initial)
    return SolveResult(
        length=inner.length,
        sequence=lifted,
        algorithm=inner.algorithm,
        nodes=inner.nodes,
        depth=inner.depth,
    )
