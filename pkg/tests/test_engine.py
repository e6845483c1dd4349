"""Improvement engine: policies, preprocessing, reachability, verification."""

import random

import pytest

from conftest import EX1, EX1_INITIAL, EX1_STEPS, FIG1, FIG1_INITIAL, build_corpus
from reformist import (
    ExchangeStep,
    Instance,
    Matching,
    ReformSequence,
    ValidationError,
    best_first,
    compute_reformist,
    fixed_order,
    is_reachable,
    preprocess,
    random_policy,
    reachable_matchings,
    round_robin,
    verify_sequence,
)


def test_best_first_reform_is_canonical():
    final, seq = compute_reformist(EX1, EX1_INITIAL)
    assert final.assignment == (2, 3)
    assert tuple((s.agent, s.from_item, s.to_item) for s in seq.steps) == EX1_STEPS


def test_policies_share_the_terminal():
    policies = [
        best_first(),
        round_robin(),
        random_policy(7),
        fixed_order((0, 1)),
        fixed_order((1, 0)),
    ]
    finals = {compute_reformist(EX1, EX1_INITIAL, p)[0] for p in policies}
    assert finals == {Matching((2, 3))}


def test_policy_agreement_random_instances():
    for inst, initial in build_corpus(40, seed0=777):
        n = inst.num_agents
        rng = random.Random(n)
        order = list(range(n))
        rng.shuffle(order)
        policies = [best_first(), round_robin(), random_policy(13), fixed_order(order)]
        finals = {compute_reformist(inst, initial, p)[0] for p in policies}
        assert len(finals) == 1


def test_fixed_order_must_cover_all_agents():
    with pytest.raises(ValidationError):
        compute_reformist(EX1, EX1_INITIAL, fixed_order((0,)))
    with pytest.raises(ValidationError):
        fixed_order(())


def test_random_policy_needs_seed():
    from reformist import NominationPolicy

    with pytest.raises(ValidationError):
        NominationPolicy("random")
    with pytest.raises(ValidationError):
        NominationPolicy("fanciful")


def test_reform_rejects_envy():
    with pytest.raises(ValidationError):
        compute_reformist(FIG1, FIG1_INITIAL)


def test_preprocess_keeps_ex1_whole():
    report = preprocess(EX1, EX1_INITIAL)
    red = report.reduced
    assert red.num_agents == 2
    assert red.prefs[0][0] == report.item_from_original[2]  # p stays on top
    assert report.reduced_reformist == Matching(
        tuple(report.item_from_original[x] for x in (2, 3))
    )


def test_preprocess_drops_satisfied_agents():
    inst = Instance(prefs=((0,), (2, 1)), num_items=3, agent_names=("s", "t"))
    initial = Matching((0, 1))
    report = preprocess(inst, initial)
    assert report.reduced.num_agents == 1
    assert report.agent_to_original == (1,)
    assert 0 in report.removed_agents
    # the satisfied agent's item left the instance with her
    assert 0 in report.removed_items
    red, red_mu = report.reduced, report.reduced_initial
    assert red.prefs[0] == (red.prefs[0][0], red_mu.item_of(0))


def test_preprocess_band_invariants():
    for inst, initial in build_corpus(60, seed0=888):
        report = preprocess(inst, initial)
        red, red_mu, red_sigma = (
            report.reduced,
            report.reduced_initial,
            report.reduced_reformist,
        )
        held = set(red_mu.assignment)
        wanted = set(red_sigma.assignment)
        assert not held & wanted
        for i in range(red.num_agents):
            assert red.prefs[i][0] == red_sigma.item_of(i)
            assert red.prefs[i][-1] == red_mu.item_of(i)
            assert red.prefs[i][0] != red.prefs[i][-1]


def test_lift_sequence_verifies_on_original():
    inst = Instance(prefs=((0,), (2, 1)), num_items=3)
    initial = Matching((0, 1))
    report = preprocess(inst, initial)
    red_final, red_seq = compute_reformist(report.reduced, report.reduced_initial)
    lifted = report.lift_sequence(red_seq, initial)
    check = verify_sequence(inst, lifted)
    assert check.valid
    assert check.final == report.original_reformist


def test_is_reachable_on_ex1():
    assert is_reachable(EX1, EX1_INITIAL, Matching((2, 3)))
    assert is_reachable(EX1, EX1_INITIAL, Matching((4, 1)))
    assert is_reachable(EX1, EX1_INITIAL, EX1_INITIAL)
    # envy in the target means no
    assert not is_reachable(EX1, EX1_INITIAL, Matching((3, 2)))


def test_is_reachable_matches_flood_fill():
    hits = {True: 0, False: 0}
    for inst, initial in build_corpus(40, seed0=999):
        reachable = reachable_matchings(inst, initial)
        rng = random.Random(inst.num_agents * 31 + inst.num_items)
        targets = list(reachable[: 2]) + _sample_envy_free(inst, rng, 3)
        for target in targets:
            answer = is_reachable(inst, initial, target)
            truth = target in reachable
            assert answer == truth
            hits[answer] += 1
    assert hits[True] > 0 and hits[False] > 0


def _sample_envy_free(inst, rng, count):
    from reformist import is_envy_free, validate_matching

    found = []
    for _ in range(60):
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


def test_verify_sequence_reports():
    good = ReformSequence(
        EX1_INITIAL, tuple(ExchangeStep(*s) for s in EX1_STEPS)
    )
    report = verify_sequence(EX1, good)
    assert report.valid and report.final.assignment == (2, 3)

    swapped = ReformSequence(
        EX1_INITIAL,
        (ExchangeStep(1, 1, 3), ExchangeStep(0, 0, 4), ExchangeStep(0, 4, 2)),
    )
    report = verify_sequence(EX1, swapped)
    assert not report.valid
    assert report.failed_at == 1
    assert "envy" in report.reason

    envious_start = verify_sequence(FIG1, ReformSequence(FIG1_INITIAL, ()))
    assert not envious_start.valid and envious_start.failed_at == 0
