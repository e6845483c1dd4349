"""Improvement engine: exhaustive reform, preprocessing, reachability.

Running improvement steps until no agent can move always ends in the same
matching no matter who is nominated when; that terminal matching is the
reformist matching of the instance.  The engine exposes nomination policies
for experiments, the standard preprocessing that strips everything outside
the band between initial and reformist item per agent, and the reachability
test for arbitrary envy-free targets.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InternalInvariantError, ValidationError
from .errors import StepError
from .model import (
    ExchangeStep,
    Instance,
    Matching,
    ReformSequence,
    apply_exchange,
    best_feasible_item,
    check_instance,
    check_matching,
    envy_pairs,
    is_envy_free,
    validate_matching,
)


@dataclass(frozen=True)
class NominationPolicy:
    """How the engine picks which agent moves next.

    kinds:
      best-first   -- lowest-index agent with a feasible step (default)
      round-robin  -- cycle 0,1,...,n-1, skipping stuck agents
      fixed-order  -- cycle an explicit agent sequence, skipping stuck agents
      random       -- uniform choice among agents with a feasible step
    """

    kind: str = "best-first"
    order: tuple[int, ...] = ()
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("best-first", "round-robin", "fixed-order", "random"):
            raise ValidationError(f"unknown nomination policy kind {self.kind!r}")
        if self.kind == "fixed-order" and not self.order:
            raise ValidationError("fixed-order policy needs a non-empty agent sequence")
        if self.kind == "random" and self.seed is None:
            raise ValidationError("random policy needs an explicit seed")
        object.__setattr__(self, "order", tuple(self.order))


def best_first() -> NominationPolicy:
    return NominationPolicy("best-first")


def round_robin() -> NominationPolicy:
    return NominationPolicy("round-robin")


def fixed_order(order: tuple[int, ...] | list[int]) -> NominationPolicy:
    return NominationPolicy("fixed-order", order=tuple(order))


def random_policy(seed: int) -> NominationPolicy:
    return NominationPolicy("random", seed=seed)


def compute_reformist(
    inst: Instance,
    initial: Matching,
    policy: NominationPolicy | None = None,
) -> tuple[Matching, ReformSequence]:
    """Run improvement steps to exhaustion and return (reformist, sequence).

    Each nominated agent moves to her most preferred feasible unassigned
    item.  The final matching is independent of the policy; the sequence is
    not.  Runs at most num_items * num_agents steps before concluding that
    an internal invariant broke.
    """
    check_instance(inst)
    check_matching(inst, initial)
    if not is_envy_free(inst, initial):
        raise ValidationError("initial matching is not envy-free")
    if policy is None:
        policy = best_first()
    if policy.kind == "fixed-order":
        for a in policy.order:
            if not (0 <= a < inst.num_agents):
                raise ValidationError(f"policy order names unknown agent id {a}")
        if set(policy.order) != set(range(inst.num_agents)):
            raise ValidationError("fixed-order policy must mention every agent")

    n = inst.num_agents
    cap = inst.num_items * max(1, n)
    rng = random.Random(policy.seed) if policy.kind == "random" else None
    cycle = {
        "best-first": tuple(range(n)),
        "round-robin": tuple(range(n)),
        "fixed-order": policy.order,
    }.get(policy.kind, ())
    pointer = 0

    cur = initial
    steps: list[ExchangeStep] = []
    while True:
        movers = [
            (i, y)
            for i in range(n)
            if (y := best_feasible_item(inst, cur, i)) is not None
        ]
        if not movers:
            break
        if len(steps) >= cap:
            raise InternalInvariantError("improvement did not terminate within m*n steps")
        if policy.kind == "random":
            agent, target = rng.choice(movers)
        elif policy.kind == "best-first":
            agent, target = movers[0]
        else:
            movable = {i for i, _ in movers}
            while cycle[pointer % len(cycle)] not in movable:
                pointer += 1
            agent = cycle[pointer % len(cycle)]
            pointer += 1
            target = dict(movers)[agent]
        steps.append(ExchangeStep(agent, cur.item_of(agent), target))
        cur = cur.replace(agent, target)
    return cur, ReformSequence(initial, tuple(steps))


@dataclass(frozen=True)
class PreprocessReport:
    """Outcome of shrinking an instance around a shortest-sequence question.

    The reduced instance keeps only agents that still have to move and only
    items some surviving agent can ever hold; index maps translate reduced
    ids back to the original instance.
    """

    reduced: Instance
    reduced_initial: Matching
    reduced_reformist: Matching
    removed_agents: tuple[int, ...]
    removed_items: tuple[int, ...]
    trimmed: dict[int, tuple[int, ...]]
    agent_to_original: tuple[int, ...]
    item_to_original: tuple[int, ...]
    original_reformist: Matching

    @property
    def agent_from_original(self) -> dict[int, int]:
        return {orig: red for red, orig in enumerate(self.agent_to_original)}

    @property
    def item_from_original(self) -> dict[int, int]:
        return {orig: red for red, orig in enumerate(self.item_to_original)}

    def lift_sequence(self, seq: ReformSequence, original_initial: Matching) -> ReformSequence:
        """Translate a reduced-instance sequence back to original ids."""
        amap = self.agent_to_original
        imap = self.item_to_original
        steps = tuple(
            ExchangeStep(amap[s.agent], imap[s.from_item], imap[s.to_item])
            for s in seq.steps
        )
        return ReformSequence(original_initial, steps)


def preprocess(inst: Instance, initial: Matching) -> PreprocessReport:
    """Strip items and agents that no shortest reformist sequence can touch.

    Three rules are applied to a fixpoint: drop items an agent ranks below
    her initial item (from her list only); drop items an agent ranks above
    her reformist item (from the whole instance); drop agents whose initial
    and reformist items coincide, together with that held item.  Afterwards
    every surviving list runs exactly from the reformist item at the top to
    the initial item at the bottom, and the sets of initial and reformist
    items are disjoint.
    """
    check_instance(inst)
    check_matching(inst, initial)
    if not is_envy_free(inst, initial):
        raise ValidationError("initial matching is not envy-free")
    sigma, _ = compute_reformist(inst, initial)

    alive_agents = set(range(inst.num_agents))
    alive_items = set(range(inst.num_items))
    lists: dict[int, list[int]] = {i: list(inst.prefs[i]) for i in alive_agents}
    trimmed: dict[int, list[int]] = {i: [] for i in alive_agents}
    removed_agents: list[int] = []
    removed_items: list[int] = []

    def drop_item_everywhere(x: int) -> None:
        alive_items.discard(x)
        removed_items.append(x)
        for lst in lists.values():
            if x in lst:
                lst.remove(x)

    changed = True
    while changed:
        changed = False
        # Rule 1: trim below the initial item.
        for i in sorted(alive_agents):
            mu_rank = inst.rank_of(i, initial.item_of(i))
            below = [x for x in lists[i] if inst.rank_of(i, x) > mu_rank]
            for x in below:
                lists[i].remove(x)
                trimmed[i].append(x)
                changed = True
        # Rule 2: items above the reformist item disappear entirely.
        for i in sorted(alive_agents):
            sig_rank = inst.rank_of(i, sigma.item_of(i))
            above = [x for x in lists[i] if inst.rank_of(i, x) < sig_rank]
            for x in above:
                drop_item_everywhere(x)
                changed = True
        # Rule 3: satisfied agents leave and take their held item with them.
        for i in sorted(alive_agents):
            if sigma.item_of(i) == initial.item_of(i):
                alive_agents.remove(i)
                removed_agents.append(i)
                del lists[i]
                drop_item_everywhere(initial.item_of(i))
                changed = True

    agent_to_original = tuple(sorted(alive_agents))
    item_to_original = tuple(sorted(alive_items))
    item_new = {orig: new for new, orig in enumerate(item_to_original)}
    reduced = Instance(
        prefs=tuple(tuple(item_new[x] for x in lists[i]) for i in agent_to_original),
        num_items=len(item_to_original),
        agent_names=tuple(inst.agent_names[i] for i in agent_to_original),
        item_names=tuple(inst.item_names[x] for x in item_to_original),
    )
    reduced_initial = Matching(
        tuple(item_new[initial.item_of(i)] for i in agent_to_original)
    )
    reduced_sigma = Matching(tuple(item_new[sigma.item_of(i)] for i in agent_to_original))

    check_sigma, _ = compute_reformist(reduced, reduced_initial)
    if check_sigma != reduced_sigma:
        raise InternalInvariantError("preprocessing changed the reformist matching")
    for i in range(reduced.num_agents):
        plist = reduced.prefs[i]
        if plist[0] != reduced_sigma.item_of(i) or plist[-1] != reduced_initial.item_of(i):
            raise InternalInvariantError("preprocessed list does not run reformist-to-initial")
    if set(reduced_initial.assignment) & set(reduced_sigma.assignment):
        raise InternalInvariantError("initial and reformist items overlap after preprocessing")

    return PreprocessReport(
        reduced=reduced,
        reduced_initial=reduced_initial,
        reduced_reformist=reduced_sigma,
        removed_agents=tuple(removed_agents),
        removed_items=tuple(sorted(removed_items)),
        trimmed={i: tuple(v) for i, v in trimmed.items() if v},
        agent_to_original=agent_to_original,
        item_to_original=item_to_original,
        original_reformist=sigma,
    )


def is_reachable(inst: Instance, initial: Matching, target: Matching) -> bool:
    """Whether some sequence of improvement steps turns ``initial`` into ``target``.

    A target that is not itself envy-free is unreachable and yields False.
    The test never enumerates sequences: the target is reachable exactly when
    no agent already sits above it and the reformist matching of the instance
    restricted to items nobody ranks above her target equals the target.
    """
    check_instance(inst)
    check_matching(inst, initial)
    check_matching(inst, target)
    if not is_envy_free(inst, initial):
        raise ValidationError("initial matching is not envy-free")
    if not is_envy_free(inst, target):
        return False
    for i in range(inst.num_agents):
        held, wanted = initial.item_of(i), target.item_of(i)
        if held != wanted and inst.prefers(i, held, wanted):
            return False
    doomed: set[int] = set()
    for i in range(inst.num_agents):
        t_rank = inst.rank_of(i, target.item_of(i))
        for pos in range(t_rank):
            doomed.add(inst.prefs[i][pos])
    restricted = Instance(
        prefs=tuple(tuple(x for x in plist if x not in doomed) for plist in inst.prefs),
        num_items=inst.num_items,
        agent_names=inst.agent_names,
        item_names=inst.item_names,
    )
    sigma, _ = compute_reformist(restricted, initial)
    return sigma == target


@dataclass(frozen=True)
class VerifyReport:
    valid: bool
    failed_at: int | None = None
    reason: str | None = None
    final: Matching | None = None


def verify_sequence(inst: Instance, seq: ReformSequence) -> VerifyReport:
    """Replay a sequence, checking every step is a legal improvement step."""
    problems = validate_matching(inst, seq.initial)
    if problems:
        return VerifyReport(False, failed_at=0, reason="; ".join(problems))
    cur = seq.initial
    if not is_envy_free(inst, cur):
        pairs = envy_pairs(inst, cur)
        i, j = pairs[0]
        return VerifyReport(
            False,
            failed_at=0,
            reason=f"initial matching has envy ({inst.agent_names[i]},{inst.agent_names[j]})",
        )
    for idx, step in enumerate(seq.steps, start=1):
        try:
            cur = apply_exchange(inst, cur, step)
        except (StepError, ValidationError) as exc:
            return VerifyReport(False, failed_at=idx, reason=str(exc))
    return VerifyReport(True, final=cur)
