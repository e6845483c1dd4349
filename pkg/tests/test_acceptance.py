"""Acceptance suite: one test per advertised guarantee.

Each test owns a wall-clock budget and asserts the exact behaviour the
package promises, from the two-agent worked example up to the reduction
certificates.  Run with -v to get one pass/fail line per criterion.
"""

import itertools
import random
import time

from conftest import EX1, EX1_INITIAL, build_corpus
from reformist import (
    Matching,
    bfs_shortest,
    best_first,
    compute_reformist,
    dumps_instance,
    fixed_order,
    fpt_by_intermediate,
    fpt_by_length,
    gen_exponential_gap,
    gen_multicolored_clique,
    gen_set_cover,
    gen_vertex_cover,
    is_envy_free,
    is_reachable,
    preprocess,
    random_policy,
    reachable_matchings,
    round_robin,
    set_cover_sequence,
    shortest_deg3,
    shortest_two_acceptor,
    solve_auto,
    validate_matching,
    verify_sequence,
    vertex_cover_sequence,
    clique_sequence,
)
from reformist.cli import main


def test_criterion_1_worked_example_cli(tmp_path, capsys):
    start = time.monotonic()
    path = tmp_path / "ex1.json"
    path.write_text(dumps_instance(EX1, EX1_INITIAL))

    assert main(["shortest", str(path)]) == 0
    out = capsys.readouterr().out
    assert "length: 3" in out
    steps = [line for line in out.splitlines() if " -> " in line]
    assert steps == ["1: x -> r", "2: y -> q", "1: r -> p"]

    assert main(["reform", str(path)]) == 0
    out = capsys.readouterr().out
    assert "steps: 3" in out
    final = out[out.index("final:"):].splitlines()
    assert final[1:3] == ["  1: p", "  2: q"]
    assert time.monotonic() - start < 1.0


def test_criterion_2_policy_independence(corpus200):
    start = time.monotonic()
    policies = [best_first(), round_robin()]
    policies += [random_policy(seed) for seed in range(9)]
    order_rng = random.Random(7)
    for inst, initial in corpus200:
        finals = set()
        for policy in policies:
            final, _ = compute_reformist(inst, initial, policy)
            finals.add(final)
        for _ in range(9):
            order = list(range(inst.num_agents))
            order_rng.shuffle(order)
            final, _ = compute_reformist(inst, initial, fixed_order(order))
            finals.add(final)
        assert len(finals) == 1
    assert time.monotonic() - start < 30.0


def test_criterion_3_exponential_gap():
    start = time.monotonic()
    for p in (2, 3, 4, 5, 6):
        inst, initial = gen_exponential_gap(p)
        _, greedy = compute_reformist(inst, initial, best_first())
        assert len(greedy) == 2 * p - 1
        short = solve_auto(inst, initial)
        assert short.length <= 4
        if p <= 4:
            assert short.length == bfs_shortest(inst, initial).length
    assert time.monotonic() - start < 10.0


def test_criterion_4_degree_three_corpus(deg3_corpus):
    start = time.monotonic()
    assert len(deg3_corpus) == 300
    for inst, initial in deg3_corpus:
        res = shortest_deg3(inst, initial)
        assert res.length == inst.num_agents
        report = verify_sequence(inst, res.sequence)
        assert report.valid
        assert res.length == bfs_shortest(inst, initial).length
    assert time.monotonic() - start < 60.0


def test_criterion_5_two_acceptor_corpus(two_acceptor_corpus):
    # The recursion measure is recomputed at every nested call and the
    # solver raises if it ever fails to strictly decrease, so a clean run
    # over the corpus is a check of that bound as well.
    start = time.monotonic()
    assert len(two_acceptor_corpus) == 500
    for inst, initial in two_acceptor_corpus:
        res = shortest_two_acceptor(inst, initial)
        report = verify_sequence(inst, res.sequence)
        assert report.valid
        assert res.length == bfs_shortest(inst, initial).length
    assert time.monotonic() - start < 120.0


def test_criterion_6_fpt_solvers(deg3_corpus, two_acceptor_corpus):
    start = time.monotonic()
    pool_hits = 0
    for inst, initial in itertools.chain(deg3_corpus, two_acceptor_corpus):
        want = bfs_shortest(inst, initial).length
        res = fpt_by_length(inst, initial, budget=want)
        assert res.length == want
        assert res.nodes <= inst.num_agents ** want

        pool = inst.num_items - 2 * inst.num_agents
        if pool <= 4:
            pool_hits += 1
            res = fpt_by_intermediate(inst, initial)
            assert res.length == want
            assert res.depth <= pool
    assert pool_hits >= 100
    assert time.monotonic() - start < 120.0


def test_criterion_7_reduction_certificates():
    # The certificate lengths are checked for validity and the closed
    # forms only; nothing here asserts these schedules are optimal.
    start = time.monotonic()

    k4 = tuple(itertools.combinations(range(4), 2))
    inst, initial, cert = gen_vertex_cover(k4)
    seq = vertex_cover_sequence(inst, initial, cert, (0, 1, 2))
    assert verify_sequence(inst, seq).valid
    assert len(seq) == cert.counts["agents"] + cert.counts["edges"] + 3 == 65
    assert len(seq) == cert.predicted_length(3)

    inst, initial, cert = gen_set_cover(((1, 2), (2, 3)), p=3)
    seq = set_cover_sequence(inst, initial, cert, (0, 1))
    assert verify_sequence(inst, seq).valid
    assert len(seq) == cert.predicted_length(2) == 24

    edges = (("u1", "v1"), ("u1", "w1"), ("v1", "w1"))
    parts = (("u1",), ("v1",), ("w1",))
    inst, initial, cert = gen_multicolored_clique(edges, parts, 3)
    seq = clique_sequence(inst, initial, cert, ("u1", "v1", "w1"))
    assert verify_sequence(inst, seq).valid
    assert len(seq) == cert.counts["agents"] + 3 * 2 // 2 + 3 == 19
    assert len(seq) == cert.predicted_length(3)

    assert time.monotonic() - start < 10.0


def _sample_envy_free(inst, rng, count):
    found = []
    for _ in range(80):
        if len(found) >= count:
            break
        picks = []
        used = set()
        ok = True
        for i in range(inst.num_agents):
            options = [x for x in inst.prefs[i] if x not in used]
            if not options:
                ok = False
                break
            x = rng.choice(options)
            picks.append(x)
            used.add(x)
        if not ok:
            continue
        m = Matching(tuple(picks))
        if validate_matching(inst, m) == [] and is_envy_free(inst, m):
            found.append(m)
    return found


def test_criterion_8_reachability_oracle(corpus200):
    start = time.monotonic()
    rng = random.Random(2026)
    checked = 0
    for inst, initial in corpus200:
        reachable = set(reachable_matchings(inst, initial))
        targets = list(reachable)[:2] + _sample_envy_free(inst, rng, 3)
        while len(targets) < 5:
            targets.append(rng.choice(sorted(reachable, key=repr)))
        for target in targets[:5]:
            checked += 1
            assert is_reachable(inst, initial, target) == (target in reachable)
    assert checked == 5 * len(corpus200)
    assert time.monotonic() - start < 60.0


def test_criterion_9_preprocessing_invariants(
    corpus200, deg3_corpus, two_acceptor_corpus
):
    start = time.monotonic()
    everything = list(itertools.chain(corpus200, deg3_corpus, two_acceptor_corpus))
    for inst, initial in everything:
        report = preprocess(inst, initial)
        red, mu, sigma = report.reduced, report.reduced_initial, report.reduced_reformist
        held = set(mu.assignment)
        wanted = set(sigma.assignment)
        assert held & wanted == set()
        for i in range(red.num_agents):
            prefs = red.prefs[i]
            assert prefs[0] == sigma.item_of(i)
            assert prefs[-1] == mu.item_of(i)
            assert prefs[0] != prefs[-1]

        full_len = bfs_shortest(inst, initial).length
        if red.num_agents == 0:
            assert full_len == 0
        else:
            assert full_len == bfs_shortest(red, mu).length
            assert full_len >= red.num_agents
    assert time.monotonic() - start < 120.0
