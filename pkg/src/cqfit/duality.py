"""Relativized homomorphism dualities for anchored path examples.

A duality here is relative to an anchor example: within the class of
examples mapping into the anchor, mapping into one of the dual examples is
equivalent to *not* admitting a map from any of the source examples.  For
a single source path and a single anchor path the dual is one example,
built in polynomial time by :func:`build_path_dual`.

The construction layers the anchor path: level ``i`` of the dual carries
one value per "reason" the source path could fail to have reached its own
position ``i``, namely each incoming or outgoing edge fact and each label
fact of the source at that position, plus a dummy reason at level 0 and at
levels beyond the source's length.  Edges connect consecutive levels
except from an edge-fact reason to itself, and anchor labels attach at a
level except on the matching label reason.  The distinguished value is the
outgoing-edge reason at level 0: any map landing on it must keep failing
the source's next requirement all the way up, so the source never maps
into an example that maps into the dual, while everything else that maps
into the anchor but not from the source threads through some chain of
reasons.

If the source does not map into the anchor at all, the anchor itself is
the dual: everything in the relativized class maps into it, and nothing
in the class admits a map from the source.

:func:`verify_relative_duality` spot-checks a duality on probe examples;
:func:`verify_duality_exhaustive` enumerates every example up to a given
domain size and settles the claim for that fragment outright.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .core import (
    CqfitError,
    Example,
    Fact,
    Instance,
    PathExample,
    Schema,
    fact_token,
    pair_value,
    serialize_example,
)
from .hom import hom_exists
from .product import product_example

__all__ = [
    "DUMMY_REASON",
    "PathDual",
    "RelativeDuality",
    "VerifyResult",
    "build_path_dual",
    "verify_relative_duality",
    "verify_duality_exhaustive",
    "generate_probes",
    "enumerate_examples",
]

# token for the "no requirement yet / no requirement any more" reason
DUMMY_REASON = "o"


@dataclass(frozen=True)
class PathDual:
    """Outcome of the dual construction for one source/anchor path pair."""

    dual: Example
    source: PathExample
    anchor: PathExample
    constructed: bool  # False: source does not map into anchor; dual is the anchor

    def as_duality(self) -> RelativeDuality:
        return RelativeDuality(
            (self.source.to_example(),), (self.dual,), self.anchor.to_example()
        )


@dataclass(frozen=True)
class RelativeDuality:
    """Sources, duals, and the anchor the duality is relativized to."""

    sources: tuple[Example, ...]
    duals: tuple[Example, ...]
    anchor: Example


@dataclass(frozen=True)
class VerifyResult:
    """Outcome of checking a duality against a batch of probe examples.

    ``checked`` counts probes inside the relativized class, ``skipped``
    those that do not map into the anchor and hence assert nothing.  A
    failure records the probe and which side of the equivalence held.
    """

    checked: int
    skipped: int
    failures: tuple[tuple[Example, bool, bool], ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.failures


def _family_tokens(source: PathExample, level: int, length: int) -> list[str]:
    """Reason tokens at one anchor level, in a fixed deterministic order."""
    a = source.values
    rels = source.edge_relations
    n = source.length
    toks: list[str] = []
    if level == 0:
        toks.append(DUMMY_REASON)
        toks.append(fact_token(Fact(rels[0], (a[0], a[1]))))
    elif level <= n:
        toks.append(fact_token(Fact(rels[level - 1], (a[level - 1], a[level]))))
        if level < n:
            toks.append(fact_token(Fact(rels[level], (a[level], a[level + 1]))))
        for p in sorted(source.labels[level - 1]):
            toks.append(fact_token(Fact(p, (a[level],))))
    else:
        toks.append(DUMMY_REASON)
    return toks


def build_path_dual(
    source: PathExample, anchor: PathExample, node_budget: int | None = None
) -> PathDual:
    """The dual of ``source`` relative to ``anchor``, both path examples.

    The dual has at most ``(anchor length + 1) * (source facts + 1)``
    values and polynomially many facts.  The construction re-checks its
    own defining property, that the source does not map into the dual,
    and raises :class:`~cqfit.core.CqfitError` if that ever failed.
    """
    sex = source.to_example()
    aex = anchor.to_example()
    if not hom_exists(sex, aex, node_budget):
        return PathDual(aex, source, anchor, constructed=False)
    n, m = source.length, anchor.length
    # an anchored map between simple chains is forced level by level
    if n > m or source.edge_relations != anchor.edge_relations[:n]:
        raise CqfitError("path map exists but the chains disagree level by level")
    fams = [_family_tokens(source, i, m) for i in range(m + 1)]
    a = source.values
    b = anchor.values
    facts: set[Fact] = set()
    for i in range(m):
        rel = anchor.edge_relations[i]
        conn = (
            fact_token(Fact(rel, (a[i], a[i + 1]))) if i < n else None
        )
        for f in fams[i]:
            for f2 in fams[i + 1]:
                if conn is not None and f == conn and f2 == conn:
                    continue
                facts.add(Fact(rel, (pair_value(b[i], f), pair_value(b[i + 1], f2))))
    for i in range(1, m + 1):
        for p in sorted(anchor.labels[i - 1]):
            avoid = fact_token(Fact(p, (a[i],))) if i <= n else None
            for f2 in fams[i]:
                if f2 != avoid:
                    facts.add(Fact(p, (pair_value(b[i], f2),)))
    domain = frozenset(
        pair_value(b[i], f) for i in range(m + 1) for f in fams[i]
    )
    d = pair_value(b[0], fams[0][1])
    dual = Example(Instance(frozenset(facts), domain), (d,))
    if hom_exists(sex, dual, node_budget):
        raise CqfitError("dual construction failed: the source maps into the dual")
    return PathDual(dual, source, anchor, constructed=True)


def verify_relative_duality(
    duality: RelativeDuality,
    probes,
    node_budget: int | None = None,
) -> VerifyResult:
    """Check the duality equivalence on each probe that maps into the anchor.

    For a probe in the relativized class, exactly one of the following
    must hold: it maps into some dual, or some source maps into it.
    """
    checked = 0
    skipped = 0
    failures: list[tuple[Example, bool, bool]] = []
    for p in probes:
        if not hom_exists(p, duality.anchor, node_budget):
            skipped += 1
            continue
        checked += 1
        into_dual = any(hom_exists(p, d, node_budget) for d in duality.duals)
        from_source = any(hom_exists(s, p, node_budget) for s in duality.sources)
        if into_dual == from_source:
            failures.append((p, into_dual, from_source))
    return VerifyResult(checked, skipped, tuple(failures))


def enumerate_examples(
    schema: Schema, num_values: int, arity: int = 1
):
    """Every example over ``schema`` with ``num_values`` values, up to iso.

    Values are ``u0..u{k-1}`` and the answer tuple is the first ``arity``
    of them; all fact subsets are produced.  Together with the convention
    that unused values are just isolated, this covers every example with
    at most ``num_values`` values up to isomorphism, because both sides of
    a duality are isomorphism-invariant and indifferent to isolated
    values.
    """
    values = tuple(f"u{i}" for i in range(num_values))
    if arity > num_values:
        raise ValueError(f"arity {arity} over {num_values} values")
    pool: list[Fact] = []
    for name, k in schema.relations:
        for args in itertools.product(values, repeat=k):
            pool.append(Fact(name, args))
    pool.sort()
    domain = frozenset(values)
    answers = values[:arity]
    for r in range(len(pool) + 1):
        for chosen in itertools.combinations(pool, r):
            yield Example(Instance(frozenset(chosen), domain), answers)


def verify_duality_exhaustive(
    duality: RelativeDuality,
    max_values: int = 3,
    node_budget: int | None = None,
    max_probes: int = 200_000,
) -> VerifyResult:
    """Settle the duality for every example with at most ``max_values`` values.

    The schema is the merge of all participating examples' schemas.  With
    ``v`` values, ``u`` unary and ``b`` binary relations this enumerates
    ``2**(v*u + v*v*b)`` examples, so it is only for small fragments;
    ``max_probes`` guards against accidental blowups.
    """
    schema = duality.anchor.schema
    for e in duality.sources + duality.duals:
        schema = schema.merge(e.schema)
    arity = len(duality.anchor.answers)
    total = 0
    for _, k in schema.relations:
        total += max_values**k
    if 2**total > max_probes:
        raise ValueError(
            f"{2**total} examples over this schema; over the cap of {max_probes}"
        )
    results = [
        verify_relative_duality(
            duality,
            enumerate_examples(schema, v, arity),
            node_budget,
        )
        for v in range(max(1, arity), max_values + 1)
    ]
    return VerifyResult(
        sum(r.checked for r in results),
        sum(r.skipped for r in results),
        tuple(f for r in results for f in r.failures),
    )


def generate_probes(anchor: Example, count: int, seed: int | str) -> list[Example]:
    """Deterministically generate ``count`` probes that map into ``anchor``.

    Mixes sub-examples of the anchor, products of the anchor with short
    random paths (optionally thinned), and random paths kept only when
    they map into the anchor.  Everything is driven by one seeded stream,
    so equal arguments give equal probe lists.
    """
    rng = random.Random(f"probes:{seed}")
    schema = anchor.schema
    unary = list(schema.unary_names)
    binary = list(schema.binary_names)
    probes: list[Example] = [anchor]
    while len(probes) < count:
        kind = len(probes) % 3
        if kind == 1 and binary:
            path = _random_path(rng, unary, binary)
            prod = product_example(path.to_example(), anchor)
            probes.append(_sub_example(rng, prod, keep=0.8))
        elif kind == 2 and binary:
            probe = None
            for _ in range(30):
                path = _random_path(rng, unary, binary)
                cand = path.to_example()
                if hom_exists(cand, anchor):
                    probe = cand
                    break
            probes.append(probe if probe is not None else _sub_example(rng, anchor))
        else:
            probes.append(_sub_example(rng, anchor))
    return probes[:count]


def _random_path(rng: random.Random, unary: list[str], binary: list[str]) -> PathExample:
    length = rng.randint(1, 3)
    values = tuple(f"z{i}" for i in range(length + 1))
    rels = tuple(rng.choice(binary) for _ in range(length))
    labels = tuple(
        frozenset(p for p in unary if rng.random() < 0.4) for _ in range(length)
    )
    return PathExample(values, rels, labels)


def _sub_example(rng: random.Random, e: Example, keep: float = 0.6) -> Example:
    """A random fact subset of ``e``; includes into ``e``, so it maps there."""
    kept = frozenset(
        f for f in sorted(e.instance.facts) if rng.random() < keep
    )
    domain = frozenset(a for f in kept for a in f.args) | frozenset(e.answers)
    return Example(Instance(kept, domain), e.answers)
