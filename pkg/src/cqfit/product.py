"""Direct products of examples and the most-specific fitting query.

The product of two examples has every pair value ``<u,v>`` as domain, one
fact ``R(<u1,v1>,...,<uk,vk>)`` for every pair of same-relation facts on
the two sides, and the pairwise answer tuple.  Products of many factors are
kept implicit until needed: an :class:`ImplicitProduct` records the factor
list and materializes on demand, guarded by a fact budget, because the
materialized fact count is the product of the factors' per-relation
counts and grows fast.

The product is the categorical one: a homomorphism into it is exactly a
homomorphism into every factor, which is what :func:`hom_into_product`
exploits, and which makes the canonical query of the product of all
positive examples the most specific query fitting them.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

from .core import (
    CQ,
    CqfitError,
    Example,
    Fact,
    Instance,
    IsolatedValueWarning,
    LabeledCollection,
    SchemaError,
    canonical_cq,
    canonical_example,
    pair_value,
    serialize_example,
)
from .hom import hom_exists

__all__ = [
    "DEFAULT_MAX_FACTS",
    "ProductSizeError",
    "NoFittingError",
    "ImplicitProduct",
    "product_example",
    "product_many",
    "hom_into_product",
    "most_specific_fitting",
]

DEFAULT_MAX_FACTS = 2_000_000


class ProductSizeError(CqfitError):
    """Materializing a product would exceed the fact budget."""


class NoFittingError(CqfitError):
    """The collection admits no fitting query; carries a witness pair.

    ``positive_product`` is the implicit product of the positives and
    ``negative`` a negative example it maps into.  Because the product
    query is the most specific one fitting the positives, its mapping
    into a negative example rules out every other candidate too.
    """

    def __init__(self, positive_product: ImplicitProduct, negative: Example):
        super().__init__(
            "no query fits: the most specific query over the positives "
            "already holds on a negative example"
        )
        self.positive_product = positive_product
        self.negative = negative


def _estimate_facts(factors: tuple[Example, ...]) -> int:
    schema = factors[0].schema
    for e in factors[1:]:
        schema = schema.merge(e.schema)
    total = 0
    for rel in schema.names:
        per = 1
        for e in factors:
            per *= sum(1 for f in e.instance.facts if f.relation == rel)
        total += per
    return total


@dataclass(frozen=True)
class ImplicitProduct:
    """A product of examples, held as its factor tuple.

    Factors are stored in a canonical order so that equal factor sets give
    equal products.  ``fact_count`` is exact and cheap; ``materialize``
    builds the product example and refuses beyond ``max_facts``.
    """

    factors: tuple[Example, ...]

    def __post_init__(self) -> None:
        if not self.factors:
            raise ValueError("product needs at least one factor")
        arities = {e.arity for e in self.factors}
        if len(arities) != 1:
            raise SchemaError(f"factors of mixed arities {sorted(arities)}")
        ordered = tuple(sorted(self.factors, key=serialize_example))
        object.__setattr__(self, "factors", ordered)
        _estimate_facts(self.factors)  # surfaces schema conflicts now

    @property
    def fact_count(self) -> int:
        return _estimate_facts(self.factors)

    def materialize(self, max_facts: int = DEFAULT_MAX_FACTS) -> Example:
        if self.fact_count > max_facts:
            raise ProductSizeError(
                f"product would have {self.fact_count} facts, over the "
                f"budget of {max_facts}"
            )
        out = self.factors[0]
        for e in self.factors[1:]:
            out = product_example(out, e, max_facts)
        return out


def product_example(
    e1: Example, e2: Example, max_facts: int = DEFAULT_MAX_FACTS
) -> Example:
    """The direct product of two examples of the same answer arity.

    The domain is the full Cartesian pairing of the factor domains, not
    just the values used in facts: pair values isolated in the product
    still serve as images for unconstrained source values, and dropping
    them would break the universal property for fact-free sources.
    """
    if e1.arity != e2.arity:
        raise SchemaError(f"answer arities differ: {e1.arity} vs {e2.arity}")
    e1.schema.merge(e2.schema)
    dom_size = len(e1.instance.domain) * len(e2.instance.domain)
    if dom_size > max_facts:
        raise ProductSizeError(
            f"product domain would have {dom_size} values, over the budget "
            f"of {max_facts}"
        )
    facts: set[Fact] = set()
    by_rel: dict[str, list[Fact]] = {}
    for g in e2.instance.facts:
        by_rel.setdefault(g.relation, []).append(g)
    for f in e1.instance.facts:
        for g in by_rel.get(f.relation, ()):
            facts.add(
                Fact(f.relation, tuple(itertools.starmap(pair_value, zip(f.args, g.args))))
            )
            if len(facts) > max_facts:
                raise ProductSizeError(
                    f"product exceeds the fact budget of {max_facts}"
                )
    answers = tuple(itertools.starmap(pair_value, zip(e1.answers, e2.answers)))
    domain = {
        pair_value(u, v) for u in e1.instance.domain for v in e2.instance.domain
    }
    return Example(Instance(frozenset(facts), frozenset(domain)), answers)


def product_many(examples) -> ImplicitProduct:
    """The implicit product of a non-empty iterable of examples."""
    return ImplicitProduct(tuple(examples))


def hom_into_product(
    src: Example, prod: ImplicitProduct, node_budget: int | None = None
) -> bool:
    """Whether ``src`` maps into the product, tested factor by factor.

    Uses the universal property instead of materializing: a map into the
    product exists iff one exists into every factor.
    """
    return all(hom_exists(src, e, node_budget) for e in prod.factors)


def most_specific_fitting(
    collection: LabeledCollection,
    max_facts: int = DEFAULT_MAX_FACTS,
    node_budget: int | None = None,
) -> CQ:
    """The most specific query fitting the collection, as a materialized CQ.

    The candidate is the canonical query of the product of all positive
    examples; it holds on each positive by projection.  If it also holds
    on some negative example then no fitting query exists at all, and
    :class:`NoFittingError` reports a witness.  Collections without
    positives are rejected: every query holds on the canonical example of
    itself, so "most specific" is not well defined without a floor.
    """
    if not collection.positives:
        raise ValueError("most specific fitting needs at least one positive example")
    prod = product_many(collection.positives)
    materialized = prod.materialize(max_facts)
    # pair values isolated in the product are routine, not anomalies
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IsolatedValueWarning)
        q = canonical_cq(materialized)
    ce = canonical_example(q)
    # construction guarantees the positives hold; re-check anyway
    for pos in sorted(collection.positives, key=serialize_example):
        if not hom_exists(ce, pos, node_budget):
            raise CqfitError("product query unexpectedly misses a positive example")
    for neg in sorted(collection.negatives, key=serialize_example):
        if hom_exists(ce, neg, node_budget):
            raise NoFittingError(prod, neg)
    return q
