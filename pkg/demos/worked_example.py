"""Tour of the core workflow on a two agent instance.

Builds the instance from the README, walks it to its reformist matching
under two nomination policies, asks for a shortest sequence, and shows
what preprocessing keeps.
"""

from reformist import (
    Instance,
    Matching,
    best_first,
    bfs_shortest,
    compute_reformist,
    export_dot,
    fixed_order,
    is_reachable,
    preprocess,
    solve_auto,
)

INST = Instance(
    prefs=((2, 4, 3, 0), (3, 2, 1)),
    num_items=5,
    agent_names=("1", "2"),
    item_names=("x", "y", "p", "q", "r"),
)
INITIAL = Matching((0, 1))


def show(title, seq):
    print(f"{title}:")
    for step in seq.steps:
        print(
            f"  {INST.agent_label(step.agent)}:"
            f" {INST.item_label(step.from_item)} -> {INST.item_label(step.to_item)}"
        )


def main():
    print("agent 1 wants p > r > q > x, agent 2 wants q > p > y")
    print("start: 1 holds x, 2 holds y\n")

    final, seq = compute_reformist(INST, INITIAL, best_first())
    show("best-first run", seq)
    _, other = compute_reformist(INST, INITIAL, fixed_order((1, 0)))
    show("agent 2 nominated first (taking q would anger 1, so she waits)", other)
    print("both end at:", {INST.agent_label(i): INST.item_label(final.item_of(i))
                           for i in range(2)})

    short = solve_auto(INST, INITIAL)
    print(f"\nshortest has {short.length} steps (found by {short.algorithm}),")
    print(f"brute force agrees: {bfs_shortest(INST, INITIAL).length}")

    print("\nreachable intermediate (1=r, 2=q)?",
          is_reachable(INST, INITIAL, Matching((4, 3))))
    print("reachable the other way (1=q, 2=p)?",
          is_reachable(INST, INITIAL, Matching((3, 2))))

    report = preprocess(INST, INITIAL)
    red = report.reduced
    print("\nafter preprocessing each list runs from goal down to holding:")
    for i in range(red.num_agents):
        labels = [red.item_label(x) for x in red.prefs[i]]
        print(f"  agent {red.agent_label(i)}: {' > '.join(labels)}")

    print("\nitem graph in DOT, holdings circled twice:\n")
    print(export_dot(INST, INITIAL))


if __name__ == "__main__":
    main()
