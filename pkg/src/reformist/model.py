"""Core data model: instances, matchings, exchange steps, and the item graph.

An instance is a set of agents with strict, possibly incomplete preference
lists over indivisible items.  A matching assigns each agent one acceptable
item, no item twice.  The improvement relation moves one agent to a strictly
better unassigned item such that the result is again envy-free; everything
else in the package is built on top of that single-step relation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import StepError, ValidationError


def _default_names(prefix: str, count: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{k}" for k in range(count))


@dataclass(frozen=True)
class Instance:
    """Agents with strict preference lists over a common pool of items.

    Agents and items are dense 0-based indices.  ``prefs[i]`` lists agent
    ``i``'s acceptable items, most preferred first.  Items acceptable to no
    agent are permitted; they can never be assigned.  Rank tables and
    acceptor lists are precomputed once so preference tests are dict lookups.
    """

    prefs: tuple[tuple[int, ...], ...]
    num_items: int
    agent_names: tuple[str, ...] = ()
    item_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        prefs = tuple(tuple(p) for p in self.prefs)
        object.__setattr__(self, "prefs", prefs)
        if not self.agent_names:
            object.__setattr__(self, "agent_names", _default_names("a", len(prefs)))
        else:
            object.__setattr__(self, "agent_names", tuple(self.agent_names))
        if not self.item_names:
            object.__setattr__(self, "item_names", _default_names("x", self.num_items))
        else:
            object.__setattr__(self, "item_names", tuple(self.item_names))
        rank: list[dict[int, int]] = []
        for plist in prefs:
            table: dict[int, int] = {}
            for pos, x in enumerate(plist):
                if x not in table:
                    table[x] = pos
            rank.append(table)
        object.__setattr__(self, "_rank", tuple(rank))
        acceptors: list[list[tuple[int, int]]] = [[] for _ in range(self.num_items)]
        for i, table in enumerate(rank):
            for x, pos in table.items():
                if 0 <= x < self.num_items:
                    acceptors[x].append((i, pos))
        object.__setattr__(self, "_acceptors", tuple(tuple(sorted(a)) for a in acceptors))

    @property
    def num_agents(self) -> int:
        return len(self.prefs)

    def rank_of(self, agent: int, item: int) -> int | None:
        """Position of ``item`` in the agent's list (0 = best), None if unacceptable."""
        return self._rank[agent].get(item)

    def accepts(self, agent: int, item: int) -> bool:
        return item in self._rank[agent]

    def prefers(self, agent: int, item_a: int, item_b: int) -> bool:
        """True when the agent strictly prefers ``item_a`` to ``item_b``.

        Both items must be acceptable to the agent.
        """
        ra = self._rank[agent].get(item_a)
        rb = self._rank[agent].get(item_b)
        if ra is None or rb is None:
            raise ValidationError(
                f"prefers() needs items acceptable to agent {self.agent_names[agent]}"
            )
        return ra < rb

    def acceptors(self, item: int) -> tuple[tuple[int, int], ...]:
        """Agents that accept ``item``, as (agent, rank) pairs in agent order."""
        return self._acceptors[item]

    def list_length(self, agent: int) -> int:
        return len(self.prefs[agent])

    def agent_label(self, agent: int) -> str:
        return self.agent_names[agent]

    def item_label(self, item: int) -> str:
        return self.item_names[item]


@dataclass(frozen=True)
class Matching:
    """A total assignment of agents to items, one item each."""

    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(self.assignment))

    def item_of(self, agent: int) -> int:
        return self.assignment[agent]

    def assigned_items(self) -> frozenset[int]:
        return frozenset(self.assignment)

    def replace(self, agent: int, item: int) -> "Matching":
        pieces = list(self.assignment)
        pieces[agent] = item
        return Matching(tuple(pieces))


@dataclass(frozen=True)
class ExchangeStep:
    """One improvement step: ``agent`` trades ``from_item`` for ``to_item``."""

    agent: int
    from_item: int
    to_item: int


@dataclass(frozen=True)
class ReformSequence:
    """A sequence of exchange steps starting from ``initial``."""

    initial: Matching
    steps: tuple[ExchangeStep, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def matchings(self) -> list[Matching]:
        """All matchings along the sequence, initial first (no validity checks)."""
        out = [self.initial]
        cur = self.initial
        for step in self.steps:
            cur = cur.replace(step.agent, step.to_item)
            out.append(cur)
        return out

    @property
    def final(self) -> Matching:
        cur = self.initial
        for step in self.steps:
            cur = cur.replace(step.agent, step.to_item)
        return cur


@dataclass(frozen=True)
class ItemGraph:
    """Directed graph on items: an arc x -> y labeled i means agent i ranks y
    directly above x, so a token on x may try to slide to y for agent i."""

    num_items: int
    arcs: tuple[tuple[int, int, int], ...]  # (tail, head, agent)

    @property
    def vertices(self) -> range:
        return range(self.num_items)


def validate_instance(inst: Instance) -> list[str]:
    """Structural checks; returns a list of human-readable violations."""
    problems: list[str] = []
    if inst.num_items < 0:
        problems.append("num_items is negative")
    if len(inst.agent_names) != inst.num_agents:
        problems.append("agent_names length differs from number of agents")
    if len(inst.item_names) != inst.num_items:
        problems.append("item_names length differs from number of items")
    for i, plist in enumerate(inst.prefs):
        name = inst.agent_names[i] if i < len(inst.agent_names) else str(i)
        if not plist:
            problems.append(f"agent {name} has an empty preference list")
        seen: set[int] = set()
        for x in plist:
            if not (0 <= x < inst.num_items):
                problems.append(f"agent {name} lists unknown item id {x}")
            elif x in seen:
                problems.append(f"agent {name} lists item {inst.item_names[x]} twice")
            seen.add(x)
    return problems


def check_instance(inst: Instance) -> None:
    problems = validate_instance(inst)
    if problems:
        raise ValidationError("; ".join(problems))


def validate_matching(inst: Instance, matching: Matching) -> list[str]:
    """Checks the matching is total, injective, and individually acceptable."""
    problems: list[str] = []
    if len(matching.assignment) != inst.num_agents:
        problems.append("matching does not cover every agent")
        return problems
    used: dict[int, int] = {}
    for i, x in enumerate(matching.assignment):
        name = inst.agent_names[i]
        if not (0 <= x < inst.num_items):
            problems.append(f"agent {name} is assigned unknown item id {x}")
            continue
        if not inst.accepts(i, x):
            problems.append(f"agent {name} is assigned unacceptable item {inst.item_names[x]}")
        if x in used:
            problems.append(
                f"item {inst.item_names[x]} is assigned to both "
                f"{inst.agent_names[used[x]]} and {name}"
            )
        used[x] = i
    return problems


def check_matching(inst: Instance, matching: Matching) -> None:
    problems = validate_matching(inst, matching)
    if problems:
        raise ValidationError("; ".join(problems))


def envy_pairs(inst: Instance, matching: Matching) -> list[tuple[int, int]]:
    """All ordered pairs (i, j) where i prefers j's item to her own."""
    pairs: list[tuple[int, int]] = []
    ranks = [inst.rank_of(i, matching.item_of(i)) for i in range(inst.num_agents)]
    for i in range(inst.num_agents):
        own = ranks[i]
        for j in range(inst.num_agents):
            if i == j:
                continue
            other = inst.rank_of(i, matching.item_of(j))
            if other is not None and own is not None and other < own:
                pairs.append((i, j))
    return pairs


def is_envy_free(inst: Instance, matching: Matching) -> bool:
    ranks = [inst.rank_of(i, matching.item_of(i)) for i in range(inst.num_agents)]
    for i in range(inst.num_agents):
        own = ranks[i]
        for j in range(inst.num_agents):
            if i == j:
                continue
            other = inst.rank_of(i, matching.item_of(j))
            if other is not None and own is not None and other < own:
                return False
    return True


def _blocking_agent(
    inst: Instance, matching: Matching, mover: int, item: int
) -> int | None:
    """Agent that would envy ``mover`` holding ``item``, or None.

    Starting from an envy-free matching, moving one agent up can only create
    envy aimed at the item she takes, so this is the whole feasibility test
    beyond availability and improvement.
    """
    for j, rank_j in inst.acceptors(item):
        if j == mover:
            continue
        own = inst.rank_of(j, matching.item_of(j))
        if own is None or rank_j < own:
            return j
    return None


def feasible_exchanges(inst: Instance, matching: Matching) -> list[ExchangeStep]:
    """All single improvement steps available from an envy-free matching.

    Ordered by agent index, then by the mover's preference for the target
    (most preferred first).  Rejects matchings that are not envy-free.
    """
    if not is_envy_free(inst, matching):
        raise ValidationError("feasible_exchanges requires an envy-free matching")
    assigned = set(matching.assignment)
    steps: list[ExchangeStep] = []
    for i in range(inst.num_agents):
        cur = matching.item_of(i)
        cur_rank = inst.rank_of(i, cur)
        if cur_rank is None:
            raise ValidationError("matching assigns an unacceptable item")
        for pos in range(cur_rank):
            y = inst.prefs[i][pos]
            if y in assigned:
                continue
            if _blocking_agent(inst, matching, i, y) is None:
                steps.append(ExchangeStep(i, cur, y))
    return steps


def best_feasible_item(inst: Instance, matching: Matching, agent: int) -> int | None:
    """The agent's most preferred feasible target, or None if she is stuck."""
    assigned = set(matching.assignment)
    cur_rank = inst.rank_of(agent, matching.item_of(agent))
    if cur_rank is None:
        raise ValidationError("matching assigns an unacceptable item")
    for pos in range(cur_rank):
        y = inst.prefs[agent][pos]
        if y in assigned:
            continue
        if _blocking_agent(inst, matching, agent, y) is None:
            return y
    return None


def apply_exchange(inst: Instance, matching: Matching, step: ExchangeStep) -> Matching:
    """Apply one step, raising StepError naming the violated condition."""
    i = step.agent
    if not (0 <= i < inst.num_agents):
        raise StepError(f"unknown agent id {i}")
    if matching.item_of(i) != step.from_item:
        raise StepError(
            f"agent {inst.agent_names[i]} holds "
            f"{inst.item_names[matching.item_of(i)]}, not the declared item"
        )
    if not (0 <= step.to_item < inst.num_items) or not inst.accepts(i, step.to_item):
        raise StepError(
            f"target item is not acceptable to agent {inst.agent_names[i]}"
        )
    if step.to_item in matching.assignment:
        raise StepError(f"target item {inst.item_names[step.to_item]} is not unassigned")
    if not inst.prefers(i, step.to_item, step.from_item):
        raise StepError(
            f"target item {inst.item_names[step.to_item]} is not an improvement "
            f"for agent {inst.agent_names[i]}"
        )
    blocker = _blocking_agent(inst, matching, i, step.to_item)
    if blocker is not None:
        raise StepError(
            f"creates envy ({inst.agent_names[blocker]},{inst.agent_names[i]})",
            envy_pair=(blocker, i),
        )
    return matching.replace(i, step.to_item)


def build_item_graph(inst: Instance) -> ItemGraph:
    """Arcs from each item to the one directly above it in every list."""
    arcs: list[tuple[int, int, int]] = []
    for i, plist in enumerate(inst.prefs):
        for pos in range(len(plist) - 1, 0, -1):
            arcs.append((plist[pos], plist[pos - 1], i))
    return ItemGraph(inst.num_items, tuple(arcs))
