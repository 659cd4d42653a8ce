"""Shared oracles and generators.

The oracles here are written directly against the definitions and share
no search machinery with the package: homomorphism existence by complete
enumeration of value mappings, query satisfaction by complete enumeration
of variable assignments.  Solver results are always checkable against
these on small inputs, and returned witnesses are re-verified fact by
fact with :func:`is_hom`.
"""

from __future__ import annotations

import itertools
import random

import pytest

from cqfit.core import CQ, Example, Fact, Instance, PathExample


# ---------------------------------------------------------------------------
# independent checkers


def is_hom(mapping: dict[str, str], src: Example, dst: Example) -> bool:
    """Fact-by-fact check that ``mapping`` is an answer-respecting hom."""
    if set(mapping) != set(src.instance.domain):
        return False
    if any(v not in dst.instance.domain for v in mapping.values()):
        return False
    if tuple(mapping[a] for a in src.answers) != dst.answers:
        return False
    for f in src.instance.facts:
        if Fact(f.relation, tuple(mapping[a] for a in f.args)) not in dst.instance.facts:
            return False
    return True


def brute_hom(src: Example, dst: Example) -> bool:
    """Homomorphism existence by enumerating every total value mapping."""
    svals = sorted(src.instance.domain)
    tvals = sorted(dst.instance.domain)
    if not svals:
        return len(src.answers) == len(dst.answers)
    if not tvals:
        return False
    for images in itertools.product(tvals, repeat=len(svals)):
        mapping = dict(zip(svals, images))
        if is_hom(mapping, src, dst):
            return True
    return False


def brute_holds(q: CQ, e: Example) -> bool:
    """Query satisfaction by enumerating every variable assignment."""
    if len(q.head) != len(e.answers):
        return False
    variables = sorted(q.variables)
    dom = sorted(e.instance.domain)
    if not variables:
        return not e.answers
    if not dom:
        return False
    pinned = dict(zip(q.head, e.answers))
    # conflicting pins on a repeated head variable
    for i, v in enumerate(q.head):
        if pinned[v] != e.answers[i]:
            return False
    free = [v for v in variables if v not in pinned]
    for images in itertools.product(dom, repeat=len(free)):
        assignment = dict(pinned)
        assignment.update(zip(free, images))
        if all(
            Fact(a.relation, tuple(assignment[x] for x in a.args)) in e.instance.facts
            for a in q.atoms
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# random structure generators


def random_example(
    rng: random.Random,
    max_values: int = 4,
    max_facts: int = 6,
    arity: int = 1,
    ternary: bool = False,
) -> Example:
    """A random small example over R/2, A/1, B/1 and optionally T/3."""
    k = rng.randint(max(1, arity), max_values)
    values = [f"v{i}" for i in range(k)]
    rels: list[tuple[str, int]] = [("R", 2), ("A", 1), ("B", 1)]
    if ternary:
        rels.append(("T", 3))
    facts = set()
    for _ in range(rng.randint(0, max_facts)):
        rel, a = rng.choice(rels)
        facts.add(Fact(rel, tuple(rng.choice(values) for _ in range(a))))
    answers = tuple(rng.choice(values) for _ in range(arity))
    return Example(Instance(frozenset(facts), frozenset(values)), answers)


def random_path(
    rng: random.Random,
    edge_names: list[str],
    label_names: list[str],
    max_len: int = 6,
    prefix: str = "p",
) -> PathExample:
    length = rng.randint(1, max_len)
    values = tuple(f"{prefix}{i}" for i in range(length + 1))
    rels = tuple(rng.choice(edge_names) for _ in range(length))
    labels = tuple(
        frozenset(l for l in label_names if rng.random() < 0.5) for _ in range(length)
    )
    return PathExample(values, rels, labels)


def random_path_pair(rng: random.Random) -> tuple[PathExample, PathExample]:
    """A source/anchor pair with small alphabets, biased toward tiny schemas.

    Edge alphabet size is 1 or 2 and label alphabet size 0, 1, or 2, each
    uniform, so a sizeable fraction of pairs lives over the one-relation
    schema and stays exhaustively checkable.  Half the time the source is
    carved out of the anchor (a prefix with thinned labels), which makes
    the mapping case common; otherwise both sides are independent.
    """
    edge_names = ["R", "S"][: rng.randint(1, 2)]
    label_names = ["A", "B"][: rng.randint(0, 2)]
    anchor = random_path(rng, edge_names, label_names, prefix="x")
    if rng.random() < 0.5:
        n = rng.randint(1, anchor.length)
        labels = tuple(
            frozenset(l for l in anchor.labels[i] if rng.random() < 0.7)
            for i in range(n)
        )
        source = PathExample(
            tuple(f"y{i}" for i in range(n + 1)),
            anchor.edge_relations[:n],
            labels,
        )
    else:
        source = random_path(rng, edge_names, label_names, prefix="y")
    return source, anchor


def path_pairs(count: int, seed: int = 20240814) -> list[tuple[PathExample, PathExample]]:
    rng = random.Random(f"pairs:{seed}")
    return [random_path_pair(rng) for _ in range(count)]


# ---------------------------------------------------------------------------
# the worked two-step chain dual, stated literally


def fig_source() -> PathExample:
    return PathExample(
        ("y0", "y1", "y2"), ("R", "R"), (frozenset({"A"}), frozenset({"B"}))
    )


def fig_anchor() -> PathExample:
    return PathExample(
        ("x0", "x1", "x2"), ("R", "R"), (frozenset({"A", "B"}), frozenset({"A", "B"}))
    )


def fig_expected_dual() -> Example:
    """The dual of the worked pair, spelled out value by value."""
    v_dummy = "<x0,o>"
    v_d = "<x0,R<y0,y1>>"
    v1_in = "<x1,R<y0,y1>>"
    v1_out = "<x1,R<y1,y2>>"
    v1_lab = "<x1,A<y1>>"
    v2_in = "<x2,R<y1,y2>>"
    v2_lab = "<x2,B<y2>>"
    facts = {
        # level 0 -> 1: everything except d to the matching in-edge value
        Fact("R", (v_d, v1_out)),
        Fact("R", (v_d, v1_lab)),
        Fact("R", (v_dummy, v1_in)),
        Fact("R", (v_dummy, v1_out)),
        Fact("R", (v_dummy, v1_lab)),
        # level 1 -> 2: everything except out-edge to the matching in-edge
        Fact("R", (v1_in, v2_in)),
        Fact("R", (v1_in, v2_lab)),
        Fact("R", (v1_out, v2_lab)),
        Fact("R", (v1_lab, v2_in)),
        Fact("R", (v1_lab, v2_lab)),
        # labels at level 1: A and B everywhere except on the matching label value
        Fact("A", (v1_in,)),
        Fact("A", (v1_out,)),
        Fact("B", (v1_in,)),
        Fact("B", (v1_out,)),
        Fact("B", (v1_lab,)),
        # labels at level 2
        Fact("A", (v2_in,)),
        Fact("A", (v2_lab,)),
        Fact("B", (v2_in,)),
    }
    domain = frozenset({v_dummy, v_d, v1_in, v1_out, v1_lab, v2_in, v2_lab})
    return Example(Instance(frozenset(facts), domain), (v_d,))


def normalize_values(e: Example) -> Example:
    """Rename values to n0.. by sorted order; equal shapes serialize equally."""
    renaming = {v: f"n{i}" for i, v in enumerate(sorted(e.instance.domain))}
    facts = frozenset(
        Fact(f.relation, tuple(renaming[a] for a in f.args)) for f in e.instance.facts
    )
    return Example(
        Instance(facts, frozenset(renaming.values())),
        tuple(renaming[a] for a in e.answers),
    )


# ---------------------------------------------------------------------------
# shared expensive fixtures


@pytest.fixture(scope="session")
def tiny_thm4():
    from cqfit.pac import build_theorem4_scenario

    return build_theorem4_scenario(3)


@pytest.fixture(scope="session")
def tiny_thm5():
    from cqfit.pac import build_theorem5_scenario

    return build_theorem5_scenario(4)
