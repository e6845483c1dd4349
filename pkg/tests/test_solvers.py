"""Exact solvers against brute-force oracles on seeded corpora."""

import random
from collections import deque

import pytest

from conftest import (
    EX1,
    EX1_INITIAL,
    EX1_STEPS,
    POOL_TRAP,
    POOL_TRAP_INITIAL,
    POOL_TRAP_SHORTEST,
    build_corpus,
    build_preprocessed,
)
from reformist import (
    BudgetExceededError,
    GeneralizedInstance,
    Instance,
    Matching,
    SolveOptions,
    ValidationError,
    apply_exchange,
    bfs_shortest,
    feasible_exchanges,
    fpt_by_intermediate,
    fpt_by_length,
    gen_exponential_gap,
    generalized_envy_pairs,
    is_satisfactory,
    preprocess,
    shortest_deg3,
    shortest_two_acceptor,
    solve_auto,
    solve_general_LN,
    verify_sequence,
)


def exhaustive_shortest(inst, initial):
    """Depth-first search over raw improvement steps, minimizing length."""
    best = [None]
    seen = {}

    def walk(cur, depth):
        if best[0] is not None and depth >= best[0]:
            return
        key = cur.assignment
        if key in seen and seen[key] <= depth:
            return
        seen[key] = depth
        moves = feasible_exchanges(inst, cur)
        if not moves:
            best[0] = depth
            return
        for step in moves:
            walk(apply_exchange(inst, cur, step), depth + 1)

    walk(initial, 0)
    return best[0]


def test_bfs_on_worked_example():
    res = bfs_shortest(EX1, EX1_INITIAL)
    assert res.length == 3
    assert tuple((s.agent, s.from_item, s.to_item) for s in res.sequence.steps) == EX1_STEPS
    assert res.algorithm == "bfs"
    assert verify_sequence(EX1, res.sequence).valid


def test_bfs_budget():
    with pytest.raises(BudgetExceededError):
        bfs_shortest(EX1, EX1_INITIAL, max_states=2)


def test_bfs_matches_exhaustive_search():
    for inst, initial in build_corpus(50, seed0=314, n_max=4, m_max=6, len_max=4):
        assert bfs_shortest(inst, initial).length == exhaustive_shortest(inst, initial)


def test_deg3_matches_bfs(deg3_corpus):
    for red, red_mu in deg3_corpus[:80]:
        res = shortest_deg3(red, red_mu)
        assert res.length == red.num_agents
        assert res.length == bfs_shortest(red, red_mu).length
        assert verify_sequence(red, res.sequence).valid


def test_deg3_rejects_long_lists():
    report = preprocess(EX1, EX1_INITIAL)
    with pytest.raises(ValidationError):
        shortest_deg3(report.reduced, report.reduced_initial)


def test_deg3_wants_preprocessed_shape():
    inst = Instance(prefs=((1, 2, 0), (0, 1, 2)), num_items=3)
    with pytest.raises(ValidationError):
        shortest_deg3(inst, Matching((0, 1)))


def ln_oracle(g):
    """Breadth-first minimum over moves legal under the relaxed envy rule."""
    inst = g.base
    start = g.initial
    dist = {start.assignment: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if is_satisfactory(g, cur):
            return dist[cur.assignment]
        free = set(range(inst.num_items)) - set(cur.assignment)
        for i in range(inst.num_agents):
            own = inst.rank_of(i, cur.item_of(i))
            for x in inst.prefs[i][:own]:
                if x not in free:
                    continue
                trial = cur.replace(i, x)
                if trial.assignment in dist:
                    continue
                if generalized_envy_pairs(g, trial):
                    continue
                dist[trial.assignment] = dist[cur.assignment] + 1
                queue.append(trial)
    return None


def ln_replay(g, seq):
    inst = g.base
    cur = seq.initial
    assert cur == g.initial
    for step in seq.steps:
        assert cur.item_of(step.agent) == step.from_item
        assert step.to_item not in cur.assignment
        assert inst.prefers(step.agent, step.to_item, step.from_item)
        cur = cur.replace(step.agent, step.to_item)
        assert generalized_envy_pairs(g, cur) == []
    assert is_satisfactory(g, cur)


def random_generalized(count, seed0):
    # Targets lean toward list tops and groups toward singletons, otherwise
    # almost every drawn question is satisfied before anyone moves.
    rng = random.Random(seed0)
    bases = build_preprocessed(count, seed0=seed0, max_acceptors=2)
    out = []
    for inst, initial in bases:
        n = inst.num_agents
        agents = list(range(n))
        rng.shuffle(agents)
        groups = []
        bucket = [agents[0]]
        for a in agents[1:]:
            if rng.random() < 0.8:
                groups.append(tuple(sorted(bucket)))
                bucket = [a]
            else:
                bucket.append(a)
        groups.append(tuple(sorted(bucket)))
        targets = tuple(
            inst.prefs[i][0]
            if rng.random() < 0.7
            else rng.choice(inst.prefs[i])
            for i in range(n)
        )
        out.append(GeneralizedInstance(inst, initial, targets, tuple(groups)))
    return out


def test_general_ln_matches_oracle():
    nontrivial = 0
    for g in random_generalized(60, seed0=622):
        res = solve_general_LN(g)
        want = ln_oracle(g)
        assert res.length == want
        ln_replay(g, res.sequence)
        assert len(res.sequence.steps) == res.length
        if res.length >= 2:
            nontrivial += 1
    assert nontrivial >= 10


def test_two_acceptor_matches_bfs(two_acceptor_corpus):
    for red, red_mu in two_acceptor_corpus[:120]:
        res = shortest_two_acceptor(red, red_mu)
        assert res.length == bfs_shortest(red, red_mu).length
        assert verify_sequence(red, res.sequence).valid


def test_two_acceptor_rejects_three_acceptors():
    report = preprocess(POOL_TRAP, POOL_TRAP_INITIAL)
    with pytest.raises(ValidationError):
        shortest_two_acceptor(report.reduced, report.reduced_initial)


def test_fpt_length_matches_bfs(deg3_corpus, two_acceptor_corpus):
    corpus = deg3_corpus[:40] + two_acceptor_corpus[:40]
    for red, red_mu in corpus:
        want = bfs_shortest(red, red_mu).length
        res = fpt_by_length(red, red_mu, want)
        assert res.length == want
        assert verify_sequence(red, res.sequence).valid
        assert res.nodes <= red.num_agents ** max(want, 1)
        if want > red.num_agents:
            tight = fpt_by_length(red, red_mu, want - 1)
            assert not tight.feasible


def test_fpt_length_short_budget_is_instant():
    report = preprocess(EX1, EX1_INITIAL)
    res = fpt_by_length(report.reduced, report.reduced_initial, 1)
    assert not res.feasible and res.nodes == 0
    with pytest.raises(ValidationError):
        fpt_by_length(report.reduced, report.reduced_initial, -1)


def test_fpt_intermediate_pool_trap():
    # Both stopovers must be grabbed before anyone finishes; counting takers
    # against original lists instead of current holdings used to dead-end here.
    res = fpt_by_intermediate(POOL_TRAP, POOL_TRAP_INITIAL)
    assert res.length == POOL_TRAP_SHORTEST
    assert res.length == bfs_shortest(POOL_TRAP, POOL_TRAP_INITIAL).length
    assert verify_sequence(POOL_TRAP, res.sequence).valid
    assert res.depth <= 2


def test_fpt_intermediate_matches_bfs(deg3_corpus, two_acceptor_corpus):
    checked = 0
    for red, red_mu in deg3_corpus[:60] + two_acceptor_corpus[:60]:
        pool = red.num_items - 2 * red.num_agents
        if pool > 4:
            continue
        res = fpt_by_intermediate(red, red_mu)
        assert res.length == bfs_shortest(red, red_mu).length
        assert verify_sequence(red, res.sequence).valid
        assert res.depth <= pool
        checked += 1
    assert checked >= 40


def test_solve_auto_picks_two_acceptor_for_ex1():
    res = solve_auto(EX1, EX1_INITIAL)
    assert res.length == 3
    assert res.algorithm == "two-acceptor"
    assert tuple((s.agent, s.from_item, s.to_item) for s in res.sequence.steps) == EX1_STEPS


def test_solve_auto_dispatch_paths():
    inst, initial = gen_exponential_gap(2)
    res = solve_auto(inst, initial)
    assert res.algorithm == "deg3" and res.length == 3

    res = solve_auto(POOL_TRAP, POOL_TRAP_INITIAL)
    assert res.algorithm == "fpt-k" and res.length == POOL_TRAP_SHORTEST

    done = Instance(prefs=((0,), (1,)), num_items=2)
    res = solve_auto(done, Matching((0, 1)))
    assert res.algorithm == "preprocess-only" and res.length == 0

    forced_bfs = solve_auto(
        POOL_TRAP, POOL_TRAP_INITIAL, SolveOptions(stopover_cap=-1)
    )
    assert forced_bfs.algorithm == "bfs" and forced_bfs.length == POOL_TRAP_SHORTEST

    forced_deepening = solve_auto(
        POOL_TRAP,
        POOL_TRAP_INITIAL,
        SolveOptions(stopover_cap=-1, bfs_state_budget=1),
    )
    assert forced_deepening.algorithm == "fpt-length"
    assert forced_deepening.length == POOL_TRAP_SHORTEST

    with pytest.raises(BudgetExceededError):
        solve_auto(
            POOL_TRAP,
            POOL_TRAP_INITIAL,
            SolveOptions(stopover_cap=-1, bfs_state_budget=1, length_cap=3),
        )


def test_solve_auto_lifts_to_original_ids():
    inst = Instance(prefs=((0,), (2, 1)), num_items=3)
    initial = Matching((0, 1))
    res = solve_auto(inst, initial)
    assert res.length == 1
    check = verify_sequence(inst, res.sequence)
    assert check.valid and check.final == Matching((0, 2))
