"""Command line front end.

Subcommands: validate, reform, shortest, reachable, gen, export-dot, verify.
Exit status is 0 for a successful computation (including a "no" answer to a
decision question), 1 for domain failures (envy, invalid schedules, budget
exhaustion, impossible generator inputs), and 2 for unusable invocations or
files that do not parse.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import engine, fileio, generators, solvers
from .errors import (
    FileFormatError,
    InternalInvariantError,
    ReformistError,
)
from .model import (
    Instance,
    Matching,
    ReformSequence,
    envy_pairs,
    validate_instance,
    validate_matching,
)


def _load_instance_with_ref(path: str) -> tuple[Instance, Matching, str]:
    text = fileio.read_text(path)
    inst, initial = fileio.loads_instance(text)
    return inst, initial, fileio.sha256_text(text)


def _print_final(inst: Instance, matching: Matching) -> None:
    print("final:")
    for i in range(inst.num_agents):
        print(f"  {inst.agent_label(i)}: {inst.item_label(matching.item_of(i))}")


def _print_steps(inst: Instance, seq: ReformSequence) -> None:
    for step in seq.steps:
        print(
            f"{inst.agent_label(step.agent)}: "
            f"{inst.item_label(step.from_item)} -> {inst.item_label(step.to_item)}"
        )


def _parse_policy(spec: str, seed: int | None, inst: Instance) -> engine.NominationPolicy:
    if spec == "best-first":
        return engine.best_first()
    if spec == "round-robin":
        return engine.round_robin()
    if spec == "random":
        if seed is None:
            raise FileFormatError("policy 'random' needs --seed")
        return engine.random_policy(seed)
    if spec.startswith("order:"):
        names = [token.strip() for token in spec[len("order:"):].split(",")]
        if not names or any(not name for name in names):
            raise FileFormatError(f"bad policy {spec!r}: empty agent name in order")
        order = []
        for name in names:
            if name not in inst.agent_names:
                raise FileFormatError(f"policy order names unknown agent {name!r}")
            order.append(inst.agent_names.index(name))
        return engine.fixed_order(order)
    raise FileFormatError(
        f"unknown policy {spec!r} "
        "(expected best-first, round-robin, random, or order:NAME,NAME,...)"
    )


def _parse_matching_spec(spec: str, inst: Instance) -> Matching:
    """Inline ``agent=item,agent=item`` form, or ``@path`` to a JSON map."""
    if spec.startswith("@"):
        doc = fileio._parse_json(fileio.read_text(spec[1:]))
        if not isinstance(doc, dict):
            raise FileFormatError("matching file: expected an object of agent: item")
        pairs = list(doc.items())
    else:
        pairs = []
        for token in spec.split(","):
            token = token.strip()
            if "=" not in token:
                raise FileFormatError(
                    f"bad matching entry {token!r} (expected agent=item)"
                )
            name, _, item = token.partition("=")
            pairs.append((name.strip(), item.strip()))

    assignment: dict[int, int] = {}
    for name, item in pairs:
        if not isinstance(item, str):
            raise FileFormatError(f"matching entry for {name!r}: expected an item name")
        if name not in inst.agent_names:
            raise FileFormatError(f"matching names unknown agent {name!r}")
        if item not in inst.item_names:
            raise FileFormatError(f"matching names unknown item {item!r}")
        i = inst.agent_names.index(name)
        if i in assignment:
            raise FileFormatError(f"matching lists agent {name!r} twice")
        assignment[i] = inst.item_names.index(item)
    missing = [
        inst.agent_label(i) for i in range(inst.num_agents) if i not in assignment
    ]
    if missing:
        raise FileFormatError(f"matching misses agent {missing[0]!r}")
    return Matching(tuple(assignment[i] for i in range(inst.num_agents)))


def _labels(spec: str) -> tuple[fileio.Label, ...]:
    tokens = [token.strip() for token in spec.split(",")]
    if not tokens or any(not token for token in tokens):
        raise FileFormatError(f"bad list {spec!r}: empty entry")
    return tuple(fileio._label(token) for token in tokens)


def cmd_validate(args: argparse.Namespace) -> int:
    inst, initial, _ = _load_instance_with_ref(args.instance)
    problems = validate_instance(inst) + validate_matching(inst, initial)
    if problems:
        for line in problems:
            print(line)
        return 1
    envy = envy_pairs(inst, initial)
    if envy:
        for i, j in envy:
            print(f"envy: {inst.agent_label(i)} envies {inst.agent_label(j)}")
        return 1
    print(
        f"ok: {inst.num_agents} agents, {inst.num_items} items, "
        "initial matching is envy-free"
    )
    return 0


def cmd_reform(args: argparse.Namespace) -> int:
    inst, initial, ref = _load_instance_with_ref(args.instance)
    policy = _parse_policy(args.policy, args.seed, inst)
    final, seq = engine.compute_reformist(inst, initial, policy)
    print(f"steps: {len(seq)}")
    _print_final(inst, final)
    if args.out:
        fileio.save_sequence(args.out, seq, inst, ref)
        print(f"sequence written to {args.out}")
    return 0


def _forced_shortest(
    inst: Instance, initial: Matching, args: argparse.Namespace
) -> solvers.SolveResult:
    report = engine.preprocess(inst, initial)
    red, red_mu = report.reduced, report.reduced_initial
    if red.num_agents == 0:
        return solvers.SolveResult(
            length=0, sequence=ReformSequence(initial, ()), algorithm="preprocess-only"
        )
    if args.algo == "deg3":
        inner = solvers.shortest_deg3(red, red_mu)
    elif args.algo == "two-acceptor":
        inner = solvers.shortest_two_acceptor(red, red_mu)
    elif args.algo == "fpt-k":
        inner = solvers.fpt_by_intermediate(red, red_mu)
    elif args.algo == "fpt-length":
        if args.decision is not None:
            inner = solvers.fpt_by_length(red, red_mu, args.decision)
        else:
            most_steps = sum(red.list_length(i) - 1 for i in range(red.num_agents))
            budget = red.num_agents
            inner = solvers.SolveResult(None, None, "fpt-length")
            while not inner.feasible and budget <= most_steps:
                inner = solvers.fpt_by_length(red, red_mu, budget)
                budget += 1
            if not inner.feasible:
                raise InternalInvariantError(
                    "deepening passed the trivial length bound without an answer"
                )
    else:
        raise InternalInvariantError(f"unhandled algorithm {args.algo}")
    if inner.sequence is None:
        return inner
    lifted = report.lift_sequence(inner.sequence, initial)
    return solvers.SolveResult(
        length=inner.length,
        sequence=lifted,
        algorithm=inner.algorithm,
        nodes=inner.nodes,
        depth=inner.depth,
    )


def cmd_shortest(args: argparse.Namespace) -> int:
    inst, initial, ref = _load_instance_with_ref(args.instance)
    if args.algo == "auto":
        options = solvers.SolveOptions()
        if args.budget is not None:
            options = solvers.SolveOptions(
                stopover_cap=options.stopover_cap, bfs_state_budget=args.budget
            )
        result = solvers.solve_auto(inst, initial, options)
    elif args.algo == "bfs":
        result = solvers.bfs_shortest(
            inst, initial, max_states=args.budget or solvers.DEFAULT_STATE_BUDGET
        )
    else:
        result = _forced_shortest(inst, initial, args)

    if args.decision is not None and args.algo != "fpt-length":
        if result.length is not None and result.length > args.decision:
            result = solvers.SolveResult(None, None, result.algorithm)
    if not result.feasible:
        print("infeasible")
        return 0
    print(f"length: {result.length}")
    print(f"algorithm: {result.algorithm}")
    _print_steps(inst, result.sequence)
    if args.out:
        fileio.save_sequence(args.out, result.sequence, inst, ref)
        print(f"sequence written to {args.out}")
    return 0


def cmd_reachable(args: argparse.Namespace) -> int:
    inst, initial, _ = _load_instance_with_ref(args.instance)
    target = _parse_matching_spec(args.target, inst)
    problems = validate_matching(inst, target)
    if problems:
        for line in problems:
            print(line)
        return 1
    print("yes" if engine.is_reachable(inst, initial, target) else "no")
    return 0


def _sequence_out_path(out: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    if out.endswith(".json"):
        return out[: -len(".json")] + ".sequence.json"
    return out + ".sequence.json"


def cmd_gen(args: argparse.Namespace) -> int:
    witness: tuple[ReformSequence, tuple[str, ...]] | None = None
    if args.family == "exponential-gap":
        if args.p is None:
            raise FileFormatError("exponential-gap needs --p")
        inst, initial = generators.gen_exponential_gap(args.p)
        summary = f"ladder with p={args.p}"
    elif args.family == "vertex-cover":
        if not args.graph:
            raise FileFormatError("vertex-cover needs --graph")
        edges, _ = fileio.load_graph(args.graph)
        inst, initial, cert = generators.gen_vertex_cover(edges)
        summary = (
            f"{cert.counts['vertices']} vertices, {cert.counts['edges']} edges"
        )
        if args.cover:
            cover = _labels(args.cover)
            seq, notes = generators.vertex_cover_sequence(
                inst, initial, cert, cover, annotated=True
            )
            witness = (seq, notes)
    elif args.family == "set-cover":
        if not args.subsets or args.p is None:
            raise FileFormatError("set-cover needs --subsets and --p")
        family = []
        for chunk in args.subsets.split(";"):
            chunk = chunk.strip()
            if not chunk:
                raise FileFormatError("empty subset in --subsets")
            family.append(_labels(chunk))
        inst, initial, cert = generators.gen_set_cover(family, args.p)
        summary = (
            f"{cert.counts['subsets']} subsets over "
            f"{cert.counts['elements']} elements, p={args.p}"
        )
        if args.chosen:
            chosen = []
            for token in args.chosen.split(","):
                token = token.strip()
                if not token.isdigit() or int(token) < 1:
                    raise FileFormatError(
                        f"--chosen wants subset numbers starting at 1, got {token!r}"
                    )
                chosen.append(int(token) - 1)
            seq, notes = generators.set_cover_sequence(
                inst, initial, cert, chosen, annotated=True
            )
            witness = (seq, notes)
    elif args.family == "multicolored-clique":
        if not args.graph or args.k is None:
            raise FileFormatError("multicolored-clique needs --graph and --k")
        edges, parts = fileio.load_graph(args.graph)
        if parts is None:
            raise FileFormatError(
                "multicolored-clique needs vertex classes; "
                "use the JSON graph form with a parts field"
            )
        inst, initial, cert = generators.gen_multicolored_clique(edges, parts, args.k)
        summary = (
            f"{cert.counts['vertices']} vertices, {cert.counts['edges']} edges, "
            f"k={args.k}"
        )
        if args.clique:
            clique = _labels(args.clique)
            seq, notes = generators.clique_sequence(
                inst, initial, cert, clique, annotated=True
            )
            witness = (seq, notes)
    elif args.family == "random":
        for flag, value in (("--n", args.n), ("--m", args.m), ("--max-len", args.max_len), ("--seed", args.seed)):
            if value is None:
                raise FileFormatError(f"random needs {flag}")
        inst, initial = generators.gen_random(
            args.n, args.m, args.max_len, args.seed, max_acceptors=args.max_acceptors
        )
        summary = f"seed {args.seed}"
    else:
        raise InternalInvariantError(f"unhandled family {args.family}")

    text = fileio.dumps_instance(inst, initial)
    fileio._write(args.out, text)
    print(
        f"instance: {inst.num_agents} agents, {inst.num_items} items "
        f"({summary}) -> {args.out}"
    )
    if witness is not None:
        seq, notes = witness
        seq_path = _sequence_out_path(args.out, args.out_sequence)
        fileio.save_sequence(
            seq_path, seq, inst, fileio.sha256_text(text), annotations=notes
        )
        print(f"sequence: {len(seq)} steps -> {seq_path}")
    return 0


def cmd_export_dot(args: argparse.Namespace) -> int:
    inst, initial, _ = _load_instance_with_ref(args.instance)
    dot = fileio.export_dot(inst, initial if args.matching else None)
    if args.out:
        fileio._write(args.out, dot)
        print(f"dot written to {args.out}")
    else:
        print(dot, end="")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    text = fileio.read_text(args.instance)
    inst, initial = fileio.loads_instance(text)
    seq, _, ref = fileio.load_sequence(args.sequence, inst, initial)
    if ref.startswith("sha256:") and ref != fileio.sha256_text(text):
        print("instance reference mismatch: sequence was made for a different file")
        return 1
    report = engine.verify_sequence(inst, seq)
    if not report.valid:
        print(f"invalid at step {report.failed_at}: {report.reason}")
        return 1
    print(f"valid: {len(seq)} steps")
    _print_final(inst, report.final)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reformist",
        description="Envy-free matching reforms: validate, run, and solve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an instance file and its matching")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("reform", help="run exchanges to the reformist matching")
    p.add_argument("instance")
    p.add_argument(
        "--policy",
        default="best-first",
        help="best-first, round-robin, random, or order:NAME,NAME,...",
    )
    p.add_argument("--seed", type=int, help="seed for the random policy")
    p.add_argument("--out", help="write the step sequence to this file")
    p.set_defaults(func=cmd_reform)

    p = sub.add_parser("shortest", help="shortest sequence to the reformist matching")
    p.add_argument("instance")
    p.add_argument(
        "--algo",
        default="auto",
        choices=["auto", "bfs", "deg3", "two-acceptor", "fpt-length", "fpt-k"],
    )
    p.add_argument("--budget", type=int, help="state budget for search")
    p.add_argument(
        "--decision",
        type=int,
        metavar="L",
        help="ask whether a sequence of at most L steps exists",
    )
    p.add_argument("--out", help="write the witness sequence to this file")
    p.set_defaults(func=cmd_shortest)

    p = sub.add_parser("reachable", help="can exchanges reach a target matching")
    p.add_argument("instance")
    p.add_argument(
        "target",
        help="agent=item,... or @FILE with a JSON object of agent: item",
    )
    p.set_defaults(func=cmd_reachable)

    p = sub.add_parser("gen", help="generate a benchmark instance")
    p.add_argument(
        "family",
        choices=[
            "exponential-gap",
            "vertex-cover",
            "set-cover",
            "multicolored-clique",
            "random",
        ],
    )
    p.add_argument("--out", required=True, help="instance file to write")
    p.add_argument("--out-sequence", help="where to write a witness sequence")
    p.add_argument("--p", type=int, help="ladder depth (exponential-gap, set-cover)")
    p.add_argument("--graph", help="edge-list or JSON graph file")
    p.add_argument("--cover", help="vertex names forming a cover, comma separated")
    p.add_argument(
        "--subsets", help="subset family like 1,2;2,3 (semicolon separated)"
    )
    p.add_argument("--chosen", help="subset numbers (1-based) forming a cover")
    p.add_argument("--k", type=int, help="number of vertex classes")
    p.add_argument("--clique", help="vertex names forming a clique, comma separated")
    p.add_argument("--n", type=int, help="agents (random)")
    p.add_argument("--m", type=int, help="items (random)")
    p.add_argument("--max-len", type=int, help="longest preference list (random)")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--max-acceptors", type=int, help="cap acceptors per item (random)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("export-dot", help="write the item graph as DOT")
    p.add_argument("instance")
    p.add_argument(
        "--matching",
        action="store_true",
        help="mark items held in the initial matching",
    )
    p.add_argument("--out", help="write DOT here instead of stdout")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("verify", help="replay a sequence file against an instance")
    p.add_argument("instance")
    p.add_argument("sequence")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError:
        raise
    except ReformistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
