"""Shared fixtures: the worked examples and seeded random corpora."""

import random

import pytest

from reformist import (
    GenerationError,
    Instance,
    Matching,
    gen_random,
    preprocess,
)

# Two agents, five items; the shortest route to the reformist matching (p, q)
# takes a detour through r.
EX1 = Instance(
    prefs=((2, 4, 3, 0), (3, 2, 1)),
    num_items=5,
    agent_names=("1", "2"),
    item_names=("x", "y", "p", "q", "r"),
)
EX1_INITIAL = Matching((0, 1))
EX1_STEPS = ((0, 0, 4), (1, 1, 3), (0, 4, 2))

# Four agents, seven items, an initial matching with envy; used for the
# static model checks, not for reforms.
FIG1 = Instance(
    prefs=(
        (0, 1, 2, 3, 4, 5, 6),
        (5, 3, 0, 6, 4),
        (1, 6, 0, 2),
        (3, 2, 6, 4, 5),
    ),
    num_items=7,
)
FIG1_INITIAL = Matching((1, 3, 6, 4))

# Pool-item branching once went wrong here: with initial (4, 5, 6, 7) the
# stopover items 8 and 9 must both be grabbed before anyone can finish.
POOL_TRAP = Instance(
    prefs=((0, 1, 4), (1, 8, 9, 2, 5), (2, 9, 0, 3, 6), (3, 2, 7)),
    num_items=10,
)
POOL_TRAP_INITIAL = Matching((4, 5, 6, 7))
POOL_TRAP_SHORTEST = 6


def build_corpus(count, seed0, n_max=6, m_max=10, len_max=6, max_acceptors=None):
    """Deterministic stream of random envy-free starting positions."""
    rng = random.Random(seed0)
    out = []
    tries = 0
    while len(out) < count:
        n = rng.randint(1, n_max)
        m = rng.randint(n, m_max)
        max_len = rng.randint(1, len_max)
        tries += 1
        try:
            out.append(
                gen_random(n, m, max_len, seed0 + tries, max_acceptors=max_acceptors)
            )
        except GenerationError:
            continue
    return out


def build_preprocessed(count, seed0, len_max=6, max_acceptors=None):
    """Reduced instances with at least one surviving agent."""
    rng = random.Random(seed0)
    out = []
    tries = 0
    while len(out) < count:
        n = rng.randint(1, 6)
        m = rng.randint(n, 10)
        max_len = rng.randint(1, len_max)
        tries += 1
        try:
            inst, initial = gen_random(
                n, m, max_len, seed0 + tries, max_acceptors=max_acceptors
            )
        except GenerationError:
            continue
        report = preprocess(inst, initial)
        if report.reduced.num_agents >= 1:
            out.append((report.reduced, report.reduced_initial))
    return out


@pytest.fixture(scope="session")
def corpus200():
    return build_corpus(200, seed0=20600)


@pytest.fixture(scope="session")
def deg3_corpus():
    return build_preprocessed(300, seed0=40300, len_max=3)


@pytest.fixture(scope="session")
def two_acceptor_corpus():
    return build_preprocessed(500, seed0=50500, max_acceptors=2)
