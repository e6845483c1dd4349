"""Generated families where sequence length behaves badly.

First the ladder instances where an unlucky nomination order pays an
exponential-in-description price while the optimum stays at four steps,
then one certificate schedule from each reduction family, replayed and
checked against its closed form length.
"""

import itertools

from reformist import (
    best_first,
    clique_sequence,
    compute_reformist,
    gen_exponential_gap,
    gen_multicolored_clique,
    gen_set_cover,
    gen_vertex_cover,
    set_cover_sequence,
    solve_auto,
    verify_sequence,
    vertex_cover_sequence,
)


def ladder():
    print("ladder family: greedy nomination vs the optimum")
    print(f"  {'p':>2}  {'agents':>6}  {'items':>5}  {'greedy':>6}  {'optimal':>7}")
    for p in range(2, 7):
        inst, initial = gen_exponential_gap(p)
        _, seq = compute_reformist(inst, initial, best_first())
        short = solve_auto(inst, initial)
        print(
            f"  {p:>2}  {inst.num_agents:>6}  {inst.num_items:>5}"
            f"  {len(seq):>6}  {short.length:>7}"
        )
    print("  greedy pays 2p-1 while the optimum never leaves 4\n")


def replay(name, inst, initial, seq, predicted):
    report = verify_sequence(inst, seq)
    status = "valid" if report.valid else f"INVALID ({report.reason})"
    print(
        f"  {name}: {inst.num_agents} agents, {inst.num_items} items,"
        f" schedule {len(seq)} steps (formula {predicted}), {status}"
    )


def certificates():
    print("certificate schedules from the three reductions")

    k4 = tuple(itertools.combinations(range(4), 2))
    inst, initial, cert = gen_vertex_cover(k4)
    seq = vertex_cover_sequence(inst, initial, cert, (0, 1, 2))
    replay("vertex cover on K4, cover {0,1,2}", inst, initial, seq,
           cert.predicted_length(3))

    inst, initial, cert = gen_set_cover(((1, 2), (2, 3)), p=3)
    seq = set_cover_sequence(inst, initial, cert, (0, 1))
    replay("set cover {1,2},{2,3}, both chosen", inst, initial, seq,
           cert.predicted_length(2))

    edges = (("u1", "v1"), ("u1", "w1"), ("v1", "w1"))
    parts = (("u1",), ("v1",), ("w1",))
    inst, initial, cert = gen_multicolored_clique(edges, parts, 3)
    seq = clique_sequence(inst, initial, cert, ("u1", "v1", "w1"))
    replay("triangle clique, one vertex per class", inst, initial, seq,
           cert.predicted_length(3))

    print("  lengths match the formulas; optimality is what the reductions encode")


if __name__ == "__main__":
    ladder()
    certificates()
