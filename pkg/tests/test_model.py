"""Data model: ranks, envy, feasible steps, the item graph."""

import pytest

from conftest import EX1, EX1_INITIAL, FIG1, FIG1_INITIAL
from reformist import (
    ExchangeStep,
    Instance,
    Matching,
    ReformSequence,
    StepError,
    ValidationError,
    apply_exchange,
    best_feasible_item,
    build_item_graph,
    check_instance,
    check_matching,
    envy_pairs,
    feasible_exchanges,
    is_envy_free,
    validate_instance,
    validate_matching,
)


def test_default_names():
    inst = Instance(prefs=((0,), (1, 0)), num_items=2)
    assert inst.agent_names == ("a0", "a1")
    assert inst.item_names == ("x0", "x1")


def test_rank_and_accepts():
    assert EX1.rank_of(0, 2) == 0
    assert EX1.rank_of(0, 0) == 3
    assert EX1.rank_of(1, 4) is None
    assert EX1.accepts(1, 3) and not EX1.accepts(1, 4)
    assert EX1.prefers(0, 2, 0)
    assert not EX1.prefers(0, 0, 2)
    with pytest.raises(ValidationError):
        EX1.prefers(1, 4, 3)


def test_acceptors_sorted_with_ranks():
    assert EX1.acceptors(2) == ((0, 0), (1, 1))
    assert EX1.acceptors(4) == ((0, 1),)
    assert EX1.acceptors(1) == ((1, 2),)


def test_list_lengths():
    assert [EX1.list_length(i) for i in range(2)] == [4, 3]
    assert EX1.num_agents == 2


def test_validate_instance_flags_bad_lists():
    empty = Instance(prefs=((), (0,)), num_items=1)
    assert any("empty" in p for p in validate_instance(empty))
    doubled = Instance(prefs=((0, 1, 0),), num_items=2)
    assert any("twice" in p for p in validate_instance(doubled))
    with pytest.raises(ValidationError):
        check_instance(doubled)
    assert validate_instance(EX1) == []
    check_instance(EX1)


def test_matching_basics():
    m = EX1_INITIAL
    assert m.item_of(0) == 0 and m.item_of(1) == 1
    assert m.assigned_items() == frozenset({0, 1})
    moved = m.replace(0, 4)
    assert moved.assignment == (4, 1)
    assert m.assignment == (0, 1)


def test_validate_matching():
    assert validate_matching(EX1, EX1_INITIAL) == []
    unacceptable = Matching((4, 1))
    assert validate_matching(EX1, unacceptable) == []  # r is acceptable to agent 1
    bad = Matching((1, 1))
    problems = validate_matching(EX1, bad)
    assert any("both" in p for p in problems) or any("unacceptable" in p for p in problems)
    with pytest.raises(ValidationError):
        check_matching(EX1, bad)


def test_envy_pairs_frozen_example():
    assert envy_pairs(FIG1, FIG1_INITIAL) == [(2, 0), (3, 1), (3, 2)]
    assert not is_envy_free(FIG1, FIG1_INITIAL)
    assert is_envy_free(EX1, EX1_INITIAL)


def test_feasible_exchanges_from_start():
    # p and q would each make the other agent envious; only r is safe.
    assert feasible_exchanges(EX1, EX1_INITIAL) == [ExchangeStep(0, 0, 4)]
    assert best_feasible_item(EX1, EX1_INITIAL, 0) == 4
    assert best_feasible_item(EX1, EX1_INITIAL, 1) is None


def test_apply_exchange_progression():
    m1 = apply_exchange(EX1, EX1_INITIAL, ExchangeStep(0, 0, 4))
    assert m1.assignment == (4, 1)
    m2 = apply_exchange(EX1, m1, ExchangeStep(1, 1, 3))
    m3 = apply_exchange(EX1, m2, ExchangeStep(0, 4, 2))
    assert m3.assignment == (2, 3)


def test_apply_exchange_rejections():
    with pytest.raises(StepError):
        apply_exchange(EX1, EX1_INITIAL, ExchangeStep(0, 1, 4))  # wrong source
    with pytest.raises(StepError):
        apply_exchange(EX1, EX1_INITIAL, ExchangeStep(1, 1, 0))  # target held
    with pytest.raises(StepError):
        apply_exchange(EX1, EX1_INITIAL, ExchangeStep(1, 1, 4))  # unacceptable
    m = Matching((4, 1))
    with pytest.raises(StepError):
        apply_exchange(EX1, m, ExchangeStep(0, 4, 3))  # q sits below r, no improvement
    try:
        apply_exchange(EX1, EX1_INITIAL, ExchangeStep(0, 0, 3))
    except StepError as exc:
        assert exc.envy_pair == (1, 0)
    else:
        pytest.fail("taking q from the start must create envy")


def test_item_graph_shape():
    graph = build_item_graph(FIG1)
    assert len(graph.vertices) == 7
    assert len(graph.arcs) == 17
    # agent 0 ranks item 0 directly above item 1
    assert (1, 0, 0) in graph.arcs


def test_sequence_replay():
    seq = ReformSequence(
        EX1_INITIAL,
        (ExchangeStep(0, 0, 4), ExchangeStep(1, 1, 3), ExchangeStep(0, 4, 2)),
    )
    mats = seq.matchings()
    assert len(mats) == 4
    assert mats[0] == EX1_INITIAL
    assert seq.final.assignment == (2, 3)
    assert len(seq) == 3
