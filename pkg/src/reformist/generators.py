"""Builders for instance families with known shortest-sequence behavior.

Each family wires small gadgets so that the number of improvement steps
needed to reach the reformist matching encodes a combinatorial quantity:
the size of a vertex cover, of a set cover, or of a multicolored clique,
or the gap between a four-step shortcut and a long two-agent ladder.
Every family ships a schedule builder that realizes the closed-form
length with a concrete witness, and a seeded random generator rounds out
test corpora.  All orderings left open by the constructions are fixed to
ascending id order so output is reproducible byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (
    GenerationError,
    InternalInvariantError,
    StepError,
    ValidationError,
)
from .model import (
    ExchangeStep,
    Instance,
    Matching,
    ReformSequence,
    apply_exchange,
    check_instance,
    is_envy_free,
)


@dataclass(frozen=True)
class ReductionCertificate:
    """Audit trail for a generated instance.

    Carries the combinatorial source, the counts its length formula needs,
    and name tables resolving every gadget agent and item to its id in the
    generated instance.
    """

    family: str
    source: tuple
    counts: dict[str, int]
    agent_ids: dict[str, int]
    item_ids: dict[str, int]

    def predicted_length(self, k: int) -> int:
        """Closed-form schedule length for a witness of size ``k``."""
        c = self.counts
        if self.family == "vertex-cover":
            return c["agents"] + c["edges"] + k
        if self.family == "set-cover":
            return (
                (2 * c["p"] - 4) * k
                + 2 * c["memberships"]
                + 4 * c["subsets"]
                + c["elements"]
                + 1
            )
        if self.family == "multicolored-clique":
            return c["agents"] + k * (k - 1) // 2 + k
        raise ValidationError(f"family {self.family!r} has no length formula")


class _Builder:
    """Accumulates named agents and items, then freezes an Instance."""

    def __init__(self) -> None:
        self.agent_ids: dict[str, int] = {}
        self.item_ids: dict[str, int] = {}
        self._pref_names: dict[str, tuple[str, ...]] = {}

    def agent(self, name: str) -> None:
        if name in self.agent_ids:
            raise InternalInvariantError(f"duplicate agent name {name!r}")
        self.agent_ids[name] = len(self.agent_ids)

    def item(self, name: str) -> None:
        if name in self.item_ids:
            raise InternalInvariantError(f"duplicate item name {name!r}")
        self.item_ids[name] = len(self.item_ids)

    def prefs(self, agent_name: str, item_names: list[str]) -> None:
        self._pref_names[agent_name] = tuple(item_names)

    def build(self) -> Instance:
        prefs = []
        for name in self.agent_ids:
            try:
                prefs.append(
                    tuple(self.item_ids[x] for x in self._pref_names[name])
                )
            except KeyError as exc:
                raise InternalInvariantError(
                    f"agent {name!r} references unregistered item {exc}"
                ) from None
        inst = Instance(
            prefs=tuple(prefs),
            num_items=len(self.item_ids),
            agent_names=tuple(self.agent_ids),
            item_names=tuple(self.item_ids),
        )
        check_instance(inst)
        return inst

    def matching(self, holdings: dict[str, str]) -> Matching:
        return Matching(
            tuple(self.item_ids[holdings[name]] for name in self.agent_ids)
        )


class _Runner:
    """Replays a schedule by name, validating every step as it is built."""

    def __init__(self, inst: Instance, initial: Matching) -> None:
        self.inst = inst
        self.initial = initial
        self.cur = initial
        self.steps: list[ExchangeStep] = []
        self.labels: list[str] = []
        self._aid = {name: i for i, name in enumerate(inst.agent_names)}
        self._iid = {name: x for x, name in enumerate(inst.item_names)}

    def move(self, agent_name: str, item_name: str, label: str = "") -> None:
        i = self._aid[agent_name]
        step = ExchangeStep(i, self.cur.item_of(i), self._iid[item_name])
        try:
            self.cur = apply_exchange(self.inst, self.cur, step)
        except (StepError, ValidationError) as exc:
            raise InternalInvariantError(
                f"schedule broke at {agent_name} -> {item_name}: {exc}"
            ) from None
        self.steps.append(step)
        self.labels.append(label)

    def finish(self, expected_length: int) -> ReformSequence:
        if len(self.steps) != expected_length:
            raise InternalInvariantError(
                f"schedule has {len(self.steps)} steps, formula says "
                f"{expected_length}"
            )
        for i in range(self.inst.num_agents):
            if self.cur.item_of(i) != self.inst.prefs[i][0]:
                raise InternalInvariantError(
                    f"schedule left agent {self.inst.agent_names[i]} short "
                    "of her top item"
                )
        return ReformSequence(self.initial, tuple(self.steps))


def gen_exponential_gap(p: int) -> tuple[Instance, Matching]:
    """Three agents whose nomination order decides between a four-step
    shortcut through the side item z and a ladder of 2p-1 alternating
    exchanges.

    Agent 3 guards z; until she leaves her bottom item, agents 1 and 2
    must climb their interleaved rungs one at a time.
    """
    if p < 2:
        raise ValidationError("ladder depth p must be at least 2")
    a = {l: f"a{l}" for l in range(1, p + 1)}
    b = {l: f"b{l}" for l in range(1, p + 1)}
    first: list[str] = []
    for l in range(p, 1, -1):
        first += [a[l], b[l]]
    first.append(a[1])
    second = [b[p], "z"]
    for l in range(p - 1, 1, -1):
        second += [b[l], a[l + 1]]
    second.append(b[1])

    bld = _Builder()
    for name in ("1", "2", "3"):
        bld.agent(name)
    for l in range(1, p + 1):
        bld.item(a[l])
    for l in range(1, p + 1):
        bld.item(b[l])
    for name in ("z", "r", "s"):
        bld.item(name)
    bld.prefs("1", first)
    bld.prefs("2", second)
    bld.prefs("3", ["r", "z", "s"])
    inst = bld.build()
    if inst.num_items != 2 * p + 3:
        raise InternalInvariantError("ladder family item count is off")
    return inst, bld.matching({"1": a[1], "2": b[1], "3": "s"})


def _normalize_edges(edges) -> tuple[tuple, list, dict]:
    """Sorted loop-free simple edge list, vertex list, and incidence map."""
    seen: set = set()
    out = []
    for e in edges:
        u, v = e
        if u == v:
            raise ValidationError(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise ValidationError(f"duplicate edge {key[0]}-{key[1]}")
        seen.add(key)
        out.append(key)
    out.sort()
    vertices = sorted({w for e in out for w in e})
    delta = {w: tuple(e for e in out if w in e) for w in vertices}
    return tuple(out), vertices, delta


def _ename(e: tuple) -> str:
    return f"{e[0]}-{e[1]}"


def _vc_names(delta: dict):
    """Name helpers shared by the cover generator and its schedule."""

    def eag(q: int, e: tuple) -> str:
        return f"e{q}[{_ename(e)}]"

    def vag(q, w) -> str:
        return f"v{q}[{w}]"

    def top(agent: str) -> str:
        return f"r[{agent}]"

    def vtop(q: int, w) -> str:
        if q in (6, 7, 8):
            return f"x[v={w},e={_ename(delta[w][q - 6])}]"
        return top(vag(q, w))

    def y(e: tuple, w) -> str:
        return f"y[e={_ename(e)},v={w}]"

    return eag, vag, top, vtop, y


def gen_vertex_cover(edges) -> tuple[Instance, Matching, ReductionCertificate]:
    """Instance whose shortest sequence length is agents + edges + the
    minimum vertex cover size of the given 3-regular graph.

    Four agents per edge and eight per vertex; lists have at most four
    entries and no item is acceptable to more than three agents.
    """
    norm_edges, vertices, delta = _normalize_edges(edges)
    if not norm_edges:
        raise ValidationError("graph has no edges")
    for w in vertices:
        if len(delta[w]) != 3:
            raise ValidationError(
                f"vertex {w} has degree {len(delta[w])}, the gadget needs "
                "a 3-regular graph"
            )
    eag, vag, top, vtop, y = _vc_names(delta)

    bld = _Builder()
    for e in norm_edges:
        for q in (1, 2, 3, 4):
            bld.agent(eag(q, e))
    for w in vertices:
        for q in range(1, 9):
            bld.agent(vag(q, w))
    for e in norm_edges:
        for q in (1, 2, 3, 4):
            bld.item(top(eag(q, e)))
            bld.item(f"s[{eag(q, e)}]")
    for w in vertices:
        for q in range(1, 9):
            bld.item(vtop(q, w))
            bld.item(f"s[{vag(q, w)}]")
    for w in vertices:
        bld.item(f"t[{w}]")
    for e in norm_edges:
        bld.item(y(e, e[1]))
        bld.item(y(e, e[0]))

    for e in norm_edges:
        low, high = e
        bld.prefs(eag(1, e), [top(eag(1, e)), y(e, high), top(eag(2, e)), f"s[{eag(1, e)}]"])
        bld.prefs(eag(2, e), [top(eag(2, e)), top(eag(3, e)), f"x[v={high},e={_ename(e)}]", f"s[{eag(2, e)}]"])
        bld.prefs(eag(3, e), [top(eag(3, e)), y(e, low), top(eag(4, e)), f"s[{eag(3, e)}]"])
        bld.prefs(eag(4, e), [top(eag(4, e)), top(eag(1, e)), f"x[v={low},e={_ename(e)}]", f"s[{eag(4, e)}]"])
    for w in vertices:
        ea, eb, ec = delta[w]
        bld.prefs(vag(1, w), [top(vag(1, w)), f"t[{w}]", top(vag(2, w)), f"s[{vag(1, w)}]"])
        bld.prefs(vag(2, w), [top(vag(2, w)), top(vag(3, w)), top(vag(4, w)), f"s[{vag(2, w)}]"])
        bld.prefs(vag(3, w), [top(vag(3, w)), y(ea, w), y(eb, w), f"s[{vag(3, w)}]"])
        bld.prefs(vag(4, w), [top(vag(4, w)), y(ec, w), f"s[{vag(4, w)}]"])
        bld.prefs(vag(5, w), [top(vag(5, w)), top(vag(1, w)), f"s[{vag(5, w)}]"])
        bld.prefs(vag(6, w), [vtop(6, w), top(vag(1, w)), f"s[{vag(6, w)}]"])
        bld.prefs(vag(7, w), [vtop(7, w), top(vag(5, w)), f"s[{vag(7, w)}]"])
        bld.prefs(vag(8, w), [vtop(8, w), top(vag(5, w)), f"s[{vag(8, w)}]"])

    inst = bld.build()
    ne, nv = len(norm_edges), len(vertices)
    if inst.num_agents != 4 * ne + 8 * nv:
        raise InternalInvariantError("cover family agent count is off")
    if inst.num_items != 10 * ne + 17 * nv:
        raise InternalInvariantError("cover family item count is off")
    for i in range(inst.num_agents):
        if inst.list_length(i) > 4:
            raise InternalInvariantError("cover family list longer than four")
    for x in range(inst.num_items):
        if len(inst.acceptors(x)) > 3:
            raise InternalInvariantError("cover family item with four acceptors")

    initial = bld.matching(
        {name: f"s[{name}]" for name in bld.agent_ids}
    )
    cert = ReductionCertificate(
        family="vertex-cover",
        source=norm_edges,
        counts={"agents": inst.num_agents, "edges": ne, "vertices": nv},
        agent_ids=bld.agent_ids,
        item_ids=bld.item_ids,
    )
    return inst, initial, cert


def vertex_cover_sequence(
    inst: Instance,
    initial: Matching,
    cert: ReductionCertificate,
    cover,
    annotated: bool = False,
):
    """Schedule of length agents + edges + |cover| built from a vertex
    cover.

    Covered vertices park their lead agent on the buffer item, every edge
    gadget then drains through the y item on a covered side, incidence
    agents and the parked leads finish, and uncovered vertex gadgets close
    out.  With ``annotated`` the per-step phase labels are returned too.
    """
    if cert.family != "vertex-cover":
        raise ValidationError("certificate is not from the vertex cover family")
    norm_edges = cert.source
    vertices = sorted({w for e in norm_edges for w in e})
    delta = {w: tuple(e for e in norm_edges if w in e) for w in vertices}
    cover_set = set(cover)
    for w in cover_set:
        if w not in delta:
            raise ValidationError(f"cover names unknown vertex {w}")
    for e in norm_edges:
        if e[0] not in cover_set and e[1] not in cover_set:
            raise ValidationError(f"not a vertex cover: edge {_ename(e)} is uncovered")
    eag, vag, top, vtop, y = _vc_names(delta)

    run = _Runner(inst, initial)
    for w in sorted(cover_set):
        run.move(vag(1, w), f"t[{w}]", "park-cover")
        for q in (2, 3, 4):
            run.move(vag(q, w), top(vag(q, w)), "park-cover")
    for e in norm_edges:
        low, high = e
        if high in cover_set:
            run.move(eag(1, e), y(e, high), "drain-edges")
            for q in (2, 3, 4):
                run.move(eag(q, e), top(eag(q, e)), "drain-edges")
            run.move(eag(1, e), top(eag(1, e)), "drain-edges")
        else:
            run.move(eag(3, e), y(e, low), "drain-edges")
            for q in (4, 1, 2):
                run.move(eag(q, e), top(eag(q, e)), "drain-edges")
            run.move(eag(3, e), top(eag(3, e)), "drain-edges")
    for w in vertices:
        for q in (6, 7, 8, 5):
            run.move(vag(q, w), vtop(q, w), "incidence-tops")
    for w in sorted(cover_set):
        run.move(vag(1, w), top(vag(1, w)), "unpark-cover")
    for w in vertices:
        if w in cover_set:
            continue
        run.move(vag(1, w), top(vag(1, w)), "finish-rest")
        for q in (2, 3, 4):
            run.move(vag(q, w), top(vag(q, w)), "finish-rest")

    seq = run.finish(cert.predicted_length(len(cover_set)))
    if annotated:
        return seq, tuple(run.labels)
    return seq


def gen_set_cover(
    subsets, p: int
) -> tuple[Instance, Matching, ReductionCertificate]:
    """Instance whose shortest sequence prices each chosen subset at a
    ladder of 2p-2 steps, so covering all elements cheaply means choosing
    few subsets.

    Subsets are indexed by their position in ``subsets``; the element
    universe is their union.
    """
    if p < 2:
        raise ValidationError("ladder depth p must be at least 2")
    family = [tuple(sorted(set(s))) for s in subsets]
    if not family:
        raise ValidationError("the subset family is empty")
    elements = sorted({v for s in family for v in s})
    owners = {v: [j for j, s in enumerate(family) if v in s] for v in elements}
    h = len(family)
    total = sum(len(s) for s in family)

    def sname(j: int) -> str:
        return f"S{j + 1}"

    def x0(j: int) -> str:
        return f"x0[{sname(j)}]"

    def xl(j: int, l: int) -> str:
        return f"x{l}[{sname(j)}]"

    def yj(j: int) -> str:
        return f"y[{sname(j)}]"

    def yq(j: int) -> str:
        return f"y'[{sname(j)}]"

    def vag(v, l: int) -> str:
        return f"v{l}[{v}]"

    def top(agent: str) -> str:
        return f"r[{agent}]"

    def tname(j: int, v) -> str:
        return f"t[{sname(j)},v={v}]"

    def uname(j: int) -> str:
        return f"u[{sname(j)}]"

    def aname(j: int, l: int) -> str:
        return f"a{l}[{sname(j)}]"

    def bname(j: int, l: int) -> str:
        return f"b{l}[{sname(j)}]"

    bld = _Builder()
    for j in range(h):
        bld.agent(x0(j))
        for l in range(1, len(family[j]) + 1):
            bld.agent(xl(j, l))
        bld.agent(yj(j))
        bld.agent(yq(j))
    for v in elements:
        for l in range(1, len(owners[v]) + 1):
            bld.agent(vag(v, l))
    bld.agent("z")

    for j in range(h):
        bld.item(top(x0(j)))
        bld.item(f"s[{x0(j)}]")
        for l in range(1, len(family[j]) + 1):
            bld.item(top(xl(j, l)))
            bld.item(f"s[{xl(j, l)}]")
        bld.item(uname(j))
        for v in family[j]:
            bld.item(tname(j, v))
        for l in range(1, p + 1):
            bld.item(aname(j, l))
        for l in range(1, p + 1):
            bld.item(bname(j, l))
    for v in elements:
        for l in range(1, len(owners[v]) + 1):
            bld.item(top(vag(v, l)))
            bld.item(f"s[{vag(v, l)}]")
    bld.item("r[z]")
    bld.item("s[z]")

    for j in range(h):
        d = len(family[j])
        lead = [top(x0(j)), uname(j)]
        lead += [top(xl(j, l)) for l in range(d, 0, -1)]
        lead.append(f"s[{x0(j)}]")
        bld.prefs(x0(j), lead)
        for l in range(1, d + 1):
            bld.prefs(
                xl(j, l),
                [top(xl(j, l)), tname(j, family[j][l - 1]), f"s[{xl(j, l)}]"],
            )
        ladder = []
        for l in range(p, 1, -1):
            ladder += [aname(j, l), bname(j, l)]
        ladder.append(aname(j, 1))
        bld.prefs(yj(j), ladder)
        shortcut = [bname(j, p), uname(j)]
        for l in range(p - 1, 1, -1):
            shortcut += [bname(j, l), aname(j, l + 1)]
        shortcut.append(bname(j, 1))
        bld.prefs(yq(j), shortcut)
    for v in elements:
        fv = len(owners[v])
        for l in range(1, fv + 1):
            plist = [top(vag(v, l)), tname(owners[v][l - 1], v)]
            if fv > 1:
                succ = l % fv + 1
                plist.append(top(vag(v, succ)))
            plist += ["r[z]", f"s[{vag(v, l)}]"]
            bld.prefs(vag(v, l), plist)
    bld.prefs("z", ["r[z]"] + [top(x0(j)) for j in range(h)] + ["s[z]"])

    inst = bld.build()
    if inst.num_agents != 2 * total + 3 * h + 1:
        raise InternalInvariantError("cover pricing family agent count is off")

    holdings = {name: f"s[{name}]" for name in bld.agent_ids}
    for j in range(h):
        holdings[yj(j)] = aname(j, 1)
        holdings[yq(j)] = bname(j, 1)
    initial = bld.matching(holdings)
    cert = ReductionCertificate(
        family="set-cover",
        source=(tuple(family), p),
        counts={
            "agents": inst.num_agents,
            "subsets": h,
            "memberships": total,
            "elements": len(elements),
            "p": p,
        },
        agent_ids=bld.agent_ids,
        item_ids=bld.item_ids,
    )
    return inst, initial, cert


def set_cover_sequence(
    inst: Instance,
    initial: Matching,
    cert: ReductionCertificate,
    chosen,
    annotated: bool = False,
):
    """Schedule built from a choice of covering subsets, exactly matching
    the certificate's length formula.

    Chosen subsets pay the full ladder to free their buffer item, element
    cycles then drain through the chosen side, the gate agent rises, and
    everyone left finishes directly, skipped subsets taking the three-step
    shortcut instead of the ladder.
    """
    if cert.family != "set-cover":
        raise ValidationError("certificate is not from the set cover family")
    family, p = cert.source
    elements = sorted({v for s in family for v in s})
    owners = {v: [j for j, s in enumerate(family) if v in s] for v in elements}
    h = len(family)
    chosen_set = set(chosen)
    for j in chosen_set:
        if not (0 <= j < h):
            raise ValidationError(f"chosen subset index {j} is out of range")
    for v in elements:
        if not any(j in chosen_set for j in owners[v]):
            raise ValidationError(f"not a set cover: element {v} is uncovered")

    def sname(j: int) -> str:
        return f"S{j + 1}"

    run = _Runner(inst, initial)
    for j in sorted(chosen_set):
        for l in range(1, p):
            run.move(f"y[{sname(j)}]", f"a{l + 1}[{sname(j)}]", "pay-chosen")
            run.move(f"y'[{sname(j)}]", f"b{l + 1}[{sname(j)}]", "pay-chosen")
        run.move(f"x0[{sname(j)}]", f"u[{sname(j)}]", "pay-chosen")
        for l in range(1, len(family[j]) + 1):
            run.move(f"x{l}[{sname(j)}]", f"r[x{l}[{sname(j)}]]", "pay-chosen")
    for v in elements:
        fv = len(owners[v])
        j0 = min(j for j in owners[v] if j in chosen_set)
        l0 = owners[v].index(j0) + 1
        run.move(f"v{l0}[{v}]", f"t[{sname(j0)},v={v}]", "element-cycles")
        for off in range(1, fv):
            l = (l0 - 1 + off) % fv + 1
            run.move(f"v{l}[{v}]", f"r[v{l}[{v}]]", "element-cycles")
        run.move(f"v{l0}[{v}]", f"r[v{l0}[{v}]]", "element-cycles")
    run.move("z", "r[z]", "gate")
    for j in range(h):
        run.move(f"x0[{sname(j)}]", f"r[x0[{sname(j)}]]", "finish-direct")
        if j not in chosen_set:
            for l in range(1, len(family[j]) + 1):
                run.move(f"x{l}[{sname(j)}]", f"r[x{l}[{sname(j)}]]", "finish-direct")
    for j in range(h):
        if j in chosen_set:
            continue
        run.move(f"y'[{sname(j)}]", f"u[{sname(j)}]", "shortcut-skipped")
        run.move(f"y[{sname(j)}]", f"a{p}[{sname(j)}]", "shortcut-skipped")
        run.move(f"y'[{sname(j)}]", f"b{p}[{sname(j)}]", "shortcut-skipped")

    seq = run.finish(cert.predicted_length(len(chosen_set)))
    if annotated:
        return seq, tuple(run.labels)
    return seq


def gen_multicolored_clique(
    edges, parts, k: int
) -> tuple[Instance, Matching, ReductionCertificate]:
    """Instance over a k-partite graph whose shortest sequence drops to
    agents + C(k,2) + k exactly when one vertex per class forms a clique.

    Every vertex gets a lead agent plus one guard per incident edge; each
    class pair's edges sit on a cycle that only a parked lead can open.
    """
    parts_n = [tuple(sorted(set(s))) for s in parts]
    if len(parts_n) != k:
        raise ValidationError(f"expected {k} classes, got {len(parts_n)}")
    if k < 1:
        raise ValidationError("need at least one class")
    vertices = sorted({v for s in parts_n for v in s})
    if sum(len(s) for s in parts_n) != len(vertices):
        raise ValidationError("classes must be disjoint")
    class_of = {v: c for c, s in enumerate(parts_n) for v in s}
    norm_edges, edge_vertices, delta = _normalize_edges(edges)
    for e in norm_edges:
        for w in e:
            if w not in class_of:
                raise ValidationError(f"edge endpoint {w} is in no class")
        if class_of[e[0]] == class_of[e[1]]:
            raise ValidationError(f"edge {_ename(e)} stays inside one class")
    delta = {v: tuple(e for e in norm_edges if v in e) for v in vertices}
    pair_edges: dict[tuple[int, int], list[tuple]] = {}
    for e in norm_edges:
        key = tuple(sorted((class_of[e[0]], class_of[e[1]])))
        pair_edges.setdefault(key, []).append(e)
    for lst in pair_edges.values():
        lst.sort()

    def vag(v, l: int) -> str:
        return f"v{l}[{v}]"

    def eagent(e: tuple) -> str:
        return f"e[{_ename(e)}]"

    def top(agent: str) -> str:
        return f"r[{agent}]"

    bld = _Builder()
    for v in vertices:
        for l in range(len(delta[v]) + 1):
            bld.agent(vag(v, l))
    for key in sorted(pair_edges):
        for e in pair_edges[key]:
            bld.agent(eagent(e))
    bld.agent("a")
    for name in bld.agent_ids:
        bld.item(top(name))
        bld.item(f"s[{name}]")
    for e in norm_edges:
        bld.item(f"y[{_ename(e)}]")
    for v in vertices:
        bld.item(f"z[{v}]")

    for v in vertices:
        d = len(delta[v])
        for l in range(1, d + 1):
            bld.prefs(
                vag(v, l),
                [top(vag(v, l)), f"y[{_ename(delta[v][l - 1])}]", f"s[{vag(v, l)}]"],
            )
        lead = [top(vag(v, 0)), f"z[{v}]"]
        lead += [top(vag(v, l)) for l in range(d, 0, -1)]
        lead.append(f"s[{vag(v, 0)}]")
        bld.prefs(vag(v, 0), lead)
    for key in sorted(pair_edges):
        cyc = pair_edges[key]
        t = len(cyc)
        for l, e in enumerate(cyc):
            plist = [top(eagent(e)), f"y[{_ename(e)}]"]
            if t > 1:
                plist.append(top(eagent(cyc[(l + 1) % t])))
            plist += [top("a"), f"s[{eagent(e)}]"]
            bld.prefs(eagent(e), plist)
    bld.prefs(
        "a",
        [top("a")] + [top(vag(v, 0)) for v in reversed(vertices)] + ["s[a]"],
    )

    inst = bld.build()
    if inst.num_agents != len(vertices) + 3 * len(norm_edges) + 1:
        raise InternalInvariantError("clique family agent count is off")

    initial = bld.matching({name: f"s[{name}]" for name in bld.agent_ids})
    cert = ReductionCertificate(
        family="multicolored-clique",
        source=(norm_edges, tuple(parts_n)),
        counts={
            "agents": inst.num_agents,
            "edges": len(norm_edges),
            "vertices": len(vertices),
            "k": k,
        },
        agent_ids=bld.agent_ids,
        item_ids=bld.item_ids,
    )
    return inst, initial, cert


def clique_sequence(
    inst: Instance,
    initial: Matching,
    cert: ReductionCertificate,
    clique,
    annotated: bool = False,
):
    """Schedule built from a multicolored clique, one parked lead per
    class, matching the certificate's length formula exactly."""
    if cert.family != "multicolored-clique":
        raise ValidationError("certificate is not from the clique family")
    norm_edges, parts_n = cert.source
    k = cert.counts["k"]
    vertices = sorted({v for s in parts_n for v in s})
    class_of = {v: c for c, s in enumerate(parts_n) for v in s}
    delta = {v: tuple(e for e in norm_edges if v in e) for v in vertices}
    edge_set = set(norm_edges)
    pair_edges: dict[tuple[int, int], list[tuple]] = {}
    for e in norm_edges:
        key = tuple(sorted((class_of[e[0]], class_of[e[1]])))
        pair_edges.setdefault(key, []).append(e)
    for lst in pair_edges.values():
        lst.sort()

    members = sorted(set(clique))
    if len(members) != k:
        raise ValidationError(f"witness must name {k} vertices")
    for v in members:
        if v not in class_of:
            raise ValidationError(f"witness names unknown vertex {v}")
    if {class_of[v] for v in members} != set(range(k)):
        raise ValidationError("witness must take exactly one vertex per class")
    by_class = {class_of[v]: v for v in members}
    for ci in range(k):
        for cj in range(ci + 1, k):
            u, w = by_class[ci], by_class[cj]
            key = (u, w) if u < w else (w, u)
            if key not in edge_set:
                raise ValidationError(
                    f"not a multicolored clique: {_ename(key)} is missing"
                )

    run = _Runner(inst, initial)
    for v in members:
        run.move(f"v0[{v}]", f"z[{v}]", "park-clique")
        for l in range(1, len(delta[v]) + 1):
            run.move(f"v{l}[{v}]", f"r[v{l}[{v}]]", "park-clique")
    for key in sorted(pair_edges):
        cyc = pair_edges[key]
        u, w = by_class[key[0]], by_class[key[1]]
        e1 = (u, w) if u < w else (w, u)
        idx0 = cyc.index(e1)
        run.move(f"e[{_ename(e1)}]", f"y[{_ename(e1)}]", "edge-cycles")
        for off in range(1, len(cyc)):
            e = cyc[(idx0 + off) % len(cyc)]
            run.move(f"e[{_ename(e)}]", f"r[e[{_ename(e)}]]", "edge-cycles")
        run.move(f"e[{_ename(e1)}]", f"r[e[{_ename(e1)}]]", "edge-cycles")
    run.move("a", "r[a]", "gate")
    for v in members:
        run.move(f"v0[{v}]", f"r[v0[{v}]]", "unpark-clique")
    for v in vertices:
        if v in by_class.values():
            continue
        run.move(f"v0[{v}]", f"r[v0[{v}]]", "finish-rest")
        for l in range(1, len(delta[v]) + 1):
            run.move(f"v{l}[{v}]", f"r[v{l}[{v}]]", "finish-rest")

    seq = run.finish(cert.predicted_length(k))
    if annotated:
        return seq, tuple(run.labels)
    return seq


def gen_random(
    n: int,
    m: int,
    max_len: int,
    seed: int,
    max_acceptors: int | None = None,
) -> tuple[Instance, Matching]:
    """Seeded random instance with an envy-free starting matching.

    Draws preference lists, assigns agents their least preferred free
    acceptable item in a random order, and resamples everything until the
    start is envy-free.  ``max_acceptors`` optionally caps how many lists
    any single item may appear in.  Raises after a bounded number of
    failed attempts rather than looping forever.
    """
    if n < 1:
        raise ValidationError("need at least one agent")
    if m < n:
        raise ValidationError("need at least as many items as agents")
    if max_len < 1:
        raise ValidationError("preference lists need at least one entry")
    if max_acceptors is not None and max_acceptors < 1:
        raise ValidationError("max_acceptors must be positive when given")
    rng = random.Random(seed)
    attempts = 200
    for _ in range(attempts):
        counts = [0] * m
        prefs: list[tuple[int, ...]] = []
        feasible = True
        for _i in range(n):
            eligible = (
                list(range(m))
                if max_acceptors is None
                else [x for x in range(m) if counts[x] < max_acceptors]
            )
            if not eligible:
                feasible = False
                break
            length = min(rng.randint(1, max_len), len(eligible))
            row = tuple(rng.sample(eligible, length))
            for x in row:
                counts[x] += 1
            prefs.append(row)
        if not feasible:
            continue
        order = list(range(n))
        rng.shuffle(order)
        assigned: dict[int, int] = {}
        taken: set[int] = set()
        for i in order:
            pick = next((x for x in reversed(prefs[i]) if x not in taken), None)
            if pick is None:
                break
            assigned[i] = pick
            taken.add(pick)
        if len(assigned) < n:
            continue
        inst = Instance(prefs=tuple(prefs), num_items=m)
        start = Matching(tuple(assigned[i] for i in range(n)))
        if is_envy_free(inst, start):
            return inst, start
    raise GenerationError(
        f"no envy-free start found in {attempts} attempts "
        f"(n={n}, m={m}, max_len={max_len}, seed={seed})"
    )
