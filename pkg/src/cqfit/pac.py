"""Sample-based fitting experiments over exactly weighted example families.

Everything here is exact and reproducible: distributions carry rational
weights, errors are computed as :class:`fractions.Fraction` sums over the
finite support, and each trial draws from ``random.Random(f"{seed}:{trial}")``
so reruns and parallel runs agree bit for bit.

Two scenario families are built in, both over one binary relation ``R``
and unary labels on anchored label chains:

* the *most-general* scenario (``build_theorem4_scenario``): the target
  is the chain of length ``n`` labelled ``A`` and ``B`` everywhere; one
  heavily weighted positive example realizes it, and for each of the
  ``2**n`` single-label words there is a lightly weighted negative, the
  dual of that word's chain relative to the target's chain.  The fitter
  under study joins the word chains of the negatives it has seen at the
  answer variable.  The join fits every sample, yet it keeps holding on
  every dual it has not seen, so its error stays put as samples grow.
* the *most-specific* scenario (``build_theorem5_scenario``): for each
  half-sized subset of ``{1..n}`` there is one positive support point,
  and the fitter under study is the product of the positives seen so
  far.  The product keeps rejecting every unseen support point, so again
  the error barely moves with the sample size.

The baseline fitter (:func:`fit_smallest_path_cq`) returns the smallest
fitting labelled-chain query instead and does fine on both families,
which is the point of the comparison.
"""

from __future__ import annotations

import itertools
import json
import math
import multiprocessing
import random
import time
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .core import (
    CQ,
    CqfitError,
    Example,
    Fact,
    Instance,
    LabeledCollection,
    PathExample,
    canonical_example,
)
from .duality import build_path_dual
from .hom import hom_exists
from .product import ImplicitProduct, hom_into_product, product_many

__all__ = [
    "ScenarioError",
    "WeightedExample",
    "FiniteDistribution",
    "exact_error",
    "sample",
    "MostGeneralScenario",
    "build_theorem4_scenario",
    "fit_scenario_most_general",
    "MostSpecificScenario",
    "build_theorem5_scenario",
    "MostSpecificFit",
    "fit_most_specific",
    "fit_smallest_path_cq",
    "TrialRecord",
    "ExperimentReport",
    "run_experiment",
    "SCENARIO_NAMES",
]

EDGE_REL = "R"
LABELS = ("A", "B")
SCENARIO_NAMES = ("thm4", "thm5", "baseline")


class ScenarioError(CqfitError):
    """An input does not belong to the scenario it was used with."""


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class WeightedExample:
    """One support point: an example, its true label, and its weight."""

    example: Example
    positive: bool
    weight: Fraction


@dataclass(frozen=True)
class FiniteDistribution:
    """A finite labelled distribution with exact rational weights."""

    points: tuple[WeightedExample, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("distribution needs at least one point")
        for p in self.points:
            if p.weight <= 0:
                raise ValueError(f"non-positive weight {p.weight}")
        total = sum(p.weight for p in self.points)
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")

    @cached_property
    def _cumulative(self) -> tuple[int, list[int]]:
        denom = math.lcm(*(p.weight.denominator for p in self.points))
        acc = 0
        cum: list[int] = []
        for p in self.points:
            acc += int(p.weight * denom)
            cum.append(acc)
        return denom, cum

    def draw_index(self, rng: random.Random) -> int:
        denom, cum = self._cumulative
        return bisect_right(cum, rng.randrange(denom))

    def draw_indices(self, m: int, rng: random.Random) -> list[int]:
        return [self.draw_index(rng) for _ in range(m)]

    def collection_of(self, indices) -> LabeledCollection:
        pos = {self.points[i].example for i in indices if self.points[i].positive}
        neg = {self.points[i].example for i in indices if not self.points[i].positive}
        return LabeledCollection(frozenset(pos), frozenset(neg))


def exact_error(
    q: CQ, dist: FiniteDistribution, node_budget: int | None = None
) -> Fraction:
    """The exact weight of support points ``q`` labels differently."""
    ce = canonical_example(q)
    err = Fraction(0)
    for p in dist.points:
        if hom_exists(ce, p.example, node_budget) != p.positive:
            err += p.weight
    return err


def sample(dist: FiniteDistribution, m: int, seed: int | str) -> LabeledCollection:
    """Draw ``m`` labelled examples; repeats collapse in the collection."""
    rng = random.Random(str(seed))
    return dist.collection_of(dist.draw_indices(m, rng))


# ---------------------------------------------------------------------------
# chains and their canonical shapes


def _chain(values_prefix: str, n: int, labels: list[frozenset[str]]) -> PathExample:
    values = tuple(f"{values_prefix}{i}" for i in range(n + 1))
    return PathExample(values, (EDGE_REL,) * n, tuple(labels))


# ---------------------------------------------------------------------------
# the most-general scenario


class MostGeneralScenario:
    """The join-of-seen-negatives family at chain length ``n``.

    Holds the heavy positive example, the per-word chains and duals, the
    distribution, and a cache of chain-into-point map checks that backs
    both fit verification and exact error computation.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"need n >= 1, got {n}")
        self.n = n
        self.words: tuple[str, ...] = tuple(
            "".join(w) for w in itertools.product(LABELS, repeat=n)
        )
        full = [frozenset(LABELS) for _ in range(n)]
        self.anchor_chain = _chain("x", n, full)
        self.positive = self.anchor_chain.to_example()
        self.target: CQ = CQ(
            ("x0",), tuple(sorted(self.positive.instance.facts))
        )
        self.branch: dict[str, Example] = {}
        self.dual: dict[str, Example] = {}
        for w in self.words:
            chain = _chain("y", n, [frozenset(c) for c in w])
            pd = build_path_dual(chain, self.anchor_chain)
            if not pd.constructed:
                raise CqfitError(f"word chain {w} should map into the full chain")
            self.branch[w] = chain.to_example()
            self.dual[w] = pd.dual
        self.word_of_dual = {self.dual[w]: w for w in self.words}
        light = Fraction(1, 2 ** (n + 1))
        self.dist = FiniteDistribution(
            (WeightedExample(self.positive, True, Fraction(1, 2)),)
            + tuple(WeightedExample(self.dual[w], False, light) for w in self.words)
        )
        self._into: dict[tuple[str, int], bool] = {}
        # realizability: the target holds on the positive and on no dual
        if not hom_exists(self.positive, self.positive):
            raise CqfitError("target misses its own canonical example")
        for i, w in enumerate(self.words):
            if hom_exists(self.positive, self.dual[w]):
                raise CqfitError(f"target holds on the dual of word {w}")
            if self.chain_into(w, i + 1):
                raise CqfitError(f"chain of word {w} maps into its own dual")

    def chain_into(self, word: str, index: int) -> bool:
        """Cached: does the word's chain map into support point ``index``?"""
        key = (word, index)
        hit = self._into.get(key)
        if hit is None:
            hit = hom_exists(self.branch[word], self.dist.points[index].example)
            self._into[key] = hit
        return hit

    def classify_join(self, seen_words, index: int) -> bool:
        """Whether the join over ``seen_words`` holds on support point ``index``."""
        return all(self.chain_into(w, index) for w in seen_words)


def build_theorem4_scenario(n: int) -> MostGeneralScenario:
    """Scenario with ``2**n`` negative duals and one heavy positive."""
    return MostGeneralScenario(n)


def _join_variable(word: str, i: int) -> str:
    return "x0" if i == 0 else f"y{i}_{word}"


def fit_scenario_most_general(
    collection: LabeledCollection, scenario: MostGeneralScenario
) -> CQ:
    """The join, at the answer variable, of the chains of the seen negatives.

    Positives must be the scenario's positive example and negatives must
    be scenario duals; anything else raises :class:`ScenarioError`.  An
    all-positive collection yields the empty-body query, the join of
    nothing, which holds everywhere and still fits.
    """
    for e in collection.positives:
        if e != scenario.positive:
            raise ScenarioError("unknown positive example for this scenario")
    seen: list[str] = []
    for e in collection.negatives:
        w = scenario.word_of_dual.get(e)
        if w is None:
            raise ScenarioError("negative example is not a dual of this scenario")
        seen.append(w)
    seen.sort()
    atoms: list[Fact] = []
    for w in seen:
        for i in range(scenario.n):
            atoms.append(
                Fact(EDGE_REL, (_join_variable(w, i), _join_variable(w, i + 1)))
            )
            atoms.append(Fact(w[i], (_join_variable(w, i + 1),)))
    return CQ(("x0",), tuple(atoms))


# ---------------------------------------------------------------------------
# the most-specific scenario


class MostSpecificScenario:
    """The product-of-seen-positives family at even chain length ``n``.

    Support points are indexed by the half-sized subsets of ``{1..n}``:
    the point of a subset is the dual of its labelled chain relative to
    the everywhere-labelled chain, with one extra label on the answer
    value so that a single-label query realizes the distribution.  The
    labelled chain of a subset maps into the support point of every
    *other* subset but not into its own, which is what makes the product
    fitter reject unseen points; the first half is verified for all
    subsets at build time, the second half is spot-checked per trial.
    """

    def __init__(self, n: int):
        if n < 2 or n % 2:
            raise ValueError(f"need even n >= 2, got {n}")
        self.n = n
        self.subsets: tuple[tuple[int, ...], ...] = tuple(
            sorted(itertools.combinations(range(1, n + 1), n // 2))
        )
        full = [frozenset({LABELS[0]}) for _ in range(n)]
        self.anchor_chain = _chain("x", n, full)
        self.chain: dict[tuple[int, ...], Example] = {}
        self.point: dict[tuple[int, ...], Example] = {}
        for s in self.subsets:
            chain = _chain(
                "y",
                n,
                [frozenset({LABELS[0]}) if i in s else frozenset() for i in range(1, n + 1)],
            )
            pd = build_path_dual(chain, self.anchor_chain)
            if not pd.constructed:
                raise CqfitError(f"chain of subset {s} should map into the full chain")
            self.chain[s] = chain.to_example()
            self.point[s] = _label_answer(pd.dual, LABELS[0])
        self.subset_of_point = {self.point[s]: s for s in self.subsets}
        weight = Fraction(1, len(self.subsets))
        self.dist = FiniteDistribution(
            tuple(
                WeightedExample(self.point[s], True, weight) for s in self.subsets
            )
        )
        self.target: CQ = CQ(("x0",), (Fact(LABELS[0], ("x0",)),))
        self._cross: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}
        # each chain must miss its own support point; cross maps are
        # spot-checked per trial instead of all pairs up front
        for s in self.subsets:
            if hom_exists(self.chain[s], self.point[s]):
                raise CqfitError(f"chain of subset {s} maps into its own point")
            if not hom_exists(canonical_example(self.target), self.point[s]):
                raise CqfitError(f"target misses the point of subset {s}")

    def chain_into_point(self, s: tuple[int, ...], t: tuple[int, ...]) -> bool:
        """Cached: does the chain of subset ``s`` map into the point of ``t``?"""
        key = (s, t)
        hit = self._cross.get(key)
        if hit is None:
            hit = hom_exists(self.chain[s], self.point[t])
            self._cross[key] = hit
        return hit


def _label_answer(e: Example, label: str) -> Example:
    facts = set(e.instance.facts)
    facts.add(Fact(label, (e.answers[0],)))
    return Example(Instance(frozenset(facts), e.instance.domain), e.answers)


def build_theorem5_scenario(n: int) -> MostSpecificScenario:
    """Scenario with one positive support point per half-sized subset."""
    return MostSpecificScenario(n)


@dataclass(frozen=True)
class MostSpecificFit:
    """The product of the positive examples, kept implicit.

    ``maps_from`` tests a query/example against the product through the
    universal property.  ``classifies_positive`` decides whether the
    product query holds on a point: projection settles factors, a witness
    example that maps into every factor but not into the point settles a
    rejection, and otherwise the product is materialized and checked
    directly.
    """

    product: ImplicitProduct

    def maps_from(self, src: Example, node_budget: int | None = None) -> bool:
        return hom_into_product(src, self.product, node_budget)

    def classifies_positive(
        self,
        point: Example,
        witness: Example | None = None,
        node_budget: int | None = None,
    ) -> bool:
        if point in self.product.factors:
            return True
        if witness is not None:
            if not hom_exists(witness, point, node_budget) and self.maps_from(
                witness, node_budget
            ):
                return False
        return hom_exists(self.product.materialize(), point, node_budget)

    @property
    def atom_count(self) -> int:
        return self.product.fact_count


def fit_most_specific(collection: LabeledCollection) -> MostSpecificFit:
    """The implicit product of the collection's positive examples."""
    if not collection.positives:
        raise ValueError("most specific fitting needs at least one positive example")
    return MostSpecificFit(product_many(collection.positives))


# ---------------------------------------------------------------------------
# the baseline fitter: smallest fitting labelled chain


def _labelled_chain_cq(
    edge_rels: tuple[str, ...], labels: tuple[frozenset[str], ...]
) -> CQ:
    """The chain query with the given edges and per-position label sets."""
    atoms: list[Fact] = []
    for i, rel in enumerate(edge_rels):
        atoms.append(Fact(rel, (f"x{i}", f"x{i + 1}")))
    for i, labelset in enumerate(labels):
        for p in sorted(labelset):
            atoms.append(Fact(p, (f"x{i}",)))
    return CQ(("x0",), tuple(atoms))


def _label_distributions(names: tuple[str, ...], positions: int, total: int):
    """All ways to place ``total`` labels over ``positions`` slots, sorted."""
    if positions == 0:
        if total == 0:
            yield ()
        return
    for here in range(min(total, len(names)) + 1):
        for subset in itertools.combinations(names, here):
            for rest in _label_distributions(names, positions - 1, total - here):
                yield (frozenset(subset),) + rest


def fit_smallest_path_cq(
    collection: LabeledCollection,
    scenario: MostGeneralScenario | None = None,
    max_atoms: int = 12,
    node_budget: int | None = None,
) -> CQ:
    """The fitting labelled-chain query with the fewest atoms.

    The search space is the anchored chains: ``x0 -> x1 -> ... -> xL``
    through any binary relations with a set of unary labels at every
    position, the answer at ``x0``.  Candidates are tried by atom count,
    then by length, then lexicographically, so the result is the unique
    first fitting query in that order.  The empty-body query (zero atoms)
    is deliberately not a candidate: it fits any all-positive collection
    and would make the baseline degenerate.  Raises
    :class:`~cqfit.core.CqfitError` when nothing fits within
    ``max_atoms``.

    When ``scenario`` is given and the collection consists of that
    scenario's positive example plus some of its duals, the smallest
    fitting chain is known in closed form: length ``n`` with the label
    union of the seen words at each position.  That shortcut is taken and
    the result re-verified against the collection with the real solver.
    """
    if scenario is not None:
        fast = _fast_path_most_general(collection, scenario, node_budget)
        if fast is not None:
            return fast
    schema = collection.schema
    unary = tuple(schema.unary_names)
    binary = tuple(schema.binary_names)
    for total in range(1, max_atoms + 1):
        for length in range(0, total + 1):
            if not binary and length > 0:
                break
            for rels in itertools.product(binary, repeat=length):
                for labels in _label_distributions(unary, length + 1, total - length):
                    q = _labelled_chain_cq(rels, labels)
                    if _fits(q, collection, node_budget):
                        return q
    raise CqfitError(f"no labelled-chain query with at most {max_atoms} atoms fits")


def _fits(q: CQ, collection: LabeledCollection, node_budget: int | None) -> bool:
    ce = canonical_example(q)
    return all(
        hom_exists(ce, e, node_budget) for e in collection.positives
    ) and not any(hom_exists(ce, e, node_budget) for e in collection.negatives)


def _fast_path_most_general(
    collection: LabeledCollection,
    scenario: MostGeneralScenario,
    node_budget: int | None,
) -> CQ | None:
    if collection.positives != frozenset({scenario.positive}):
        return None
    if not collection.negatives:
        return None
    seen: list[str] = []
    for e in collection.negatives:
        w = scenario.word_of_dual.get(e)
        if w is None:
            return None
        seen.append(w)
    unions = tuple(
        frozenset(w[i] for w in seen) for i in range(scenario.n)
    )
    q = _labelled_chain_cq(
        (EDGE_REL,) * scenario.n, (frozenset(),) + unions
    )
    if not _fits(q, collection, node_budget):
        raise CqfitError("closed-form smallest chain failed re-verification")
    return q


# ---------------------------------------------------------------------------
# trial records and reports


@dataclass(frozen=True)
class TrialRecord:
    """One trial: what was drawn, what was fitted, and the exact error."""

    trial: int
    m: int
    seen_support: int
    error: Fraction
    output_atoms: int
    positive_drawn: bool | None = None
    empty_join: bool = False
    draw_counts: dict[int, int] = field(default_factory=dict)
    spot_checked: tuple[int, ...] = ()
    elapsed_ms: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "trial": self.trial,
            "m": self.m,
            "seen_support": self.seen_support,
            "error_num": self.error.numerator,
            "error_den": self.error.denominator,
            "output_atoms": self.output_atoms,
            "positive_drawn": self.positive_drawn,
            "empty_join": self.empty_join,
            "draw_counts": {str(k): v for k, v in sorted(self.draw_counts.items())},
            "spot_checked": list(self.spot_checked),
        }


@dataclass(frozen=True)
class ExperimentReport:
    """A full experiment run; JSON output is deterministic for fixed inputs.

    Wall-clock timings appear only in the CSV rows, never in the JSON, so
    reruns with the same arguments produce byte-identical JSON.
    """

    scenario: str
    base: str | None
    fitter: str
    n: int
    m: int
    trials: int
    epsilon: Fraction
    delta: Fraction
    seed: int
    records: tuple[TrialRecord, ...]

    def aggregates(self) -> dict:
        exceed = sum(1 for r in self.records if r.error > self.epsilon)
        empty = sum(1 for r in self.records if r.empty_join)
        mean = sum((r.error for r in self.records), Fraction(0)) / max(
            1, len(self.records)
        )
        worst = max((r.error for r in self.records), default=Fraction(0))
        return {
            "trials_error_above_epsilon": exceed,
            "empty_join_trials": empty,
            "mean_error": f"{mean.numerator}/{mean.denominator}",
            "max_error": f"{worst.numerator}/{worst.denominator}",
        }

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "base": self.base,
            "fitter": self.fitter,
            "n": self.n,
            "m": self.m,
            "trials": self.trials,
            "epsilon": f"{self.epsilon.numerator}/{self.epsilon.denominator}",
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
            "seed": self.seed,
            "aggregates": self.aggregates(),
            "records": [r.to_json_dict() for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        lines = ["trial,m,seen,error_num,error_den,fitter,elapsed_ms"]
        for r in self.records:
            lines.append(
                f"{r.trial},{r.m},{r.seen_support},{r.error.numerator},"
                f"{r.error.denominator},{self.fitter},{r.elapsed_ms:.3f}"
            )
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# trial execution


def _trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}:{trial}")


def _run_trial_most_general(
    scenario: MostGeneralScenario, m: int, seed: int, trial: int
) -> TrialRecord:
    start = time.perf_counter()
    rng = _trial_rng(seed, trial)
    idxs = scenario.dist.draw_indices(m, rng)
    counts = Counter(idxs)
    collection = scenario.dist.collection_of(idxs)
    q = fit_scenario_most_general(collection, scenario)
    seen_words = sorted(
        scenario.word_of_dual[e] for e in collection.negatives
    )
    # the join fits by construction; confirm through the cached checks
    for i, w in enumerate(scenario.words):
        if w in seen_words and scenario.classify_join(seen_words, i + 1):
            raise CqfitError(f"join unexpectedly holds on the seen dual {w}")
    err = Fraction(0)
    for i, p in enumerate(scenario.dist.points):
        if scenario.classify_join(seen_words, i) != p.positive:
            err += p.weight
    closed = Fraction(
        2**scenario.n - len(seen_words), 2 ** (scenario.n + 1)
    )
    if err != closed:
        raise CqfitError(f"error {err} disagrees with closed form {closed}")
    return TrialRecord(
        trial=trial,
        m=m,
        seen_support=len(counts),
        error=err,
        output_atoms=q.size(),
        positive_drawn=0 in counts,
        empty_join=not seen_words,
        draw_counts=dict(counts),
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )


def _run_trial_most_specific(
    scenario: MostSpecificScenario, m: int, seed: int, trial: int
) -> TrialRecord:
    start = time.perf_counter()
    rng = _trial_rng(seed, trial)
    idxs = scenario.dist.draw_indices(m, rng)
    counts = Counter(idxs)
    collection = scenario.dist.collection_of(idxs)
    fit = fit_most_specific(collection)
    seen = sorted({scenario.subsets[i] for i in counts})
    if len(fit.product.factors) != len(seen):
        raise CqfitError("product factors disagree with the seen support")
    total = len(scenario.subsets)
    err = Fraction(total - len(seen), total)
    # spot-check the rejection argument on a few unseen points: their
    # chain maps into every factor but not into the point itself, so the
    # product cannot hold there
    unseen = [s for s in scenario.subsets if s not in set(seen)]
    spot = sorted(rng.sample(range(len(unseen)), min(10, len(unseen))))
    spot_subsets = [unseen[i] for i in spot]
    for s in spot_subsets:
        if hom_exists(scenario.chain[s], scenario.point[s]):
            raise CqfitError(f"chain of {s} maps into its own point after all")
        for t in seen:
            if not scenario.chain_into_point(s, t):
                raise CqfitError(f"chain of {s} misses the seen point {t}")
        if fit.classifies_positive(scenario.point[s], witness=scenario.chain[s]):
            raise CqfitError(f"product unexpectedly holds on unseen point {s}")
    for s in seen:
        if not fit.classifies_positive(scenario.point[s]):
            raise CqfitError(f"product misses the seen point {s}")
    return TrialRecord(
        trial=trial,
        m=m,
        seen_support=len(counts),
        error=err,
        output_atoms=fit.atom_count,
        draw_counts=dict(counts),
        spot_checked=tuple(scenario.subsets.index(s) for s in spot_subsets),
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )


def _run_trial_baseline(
    scenario: MostGeneralScenario | MostSpecificScenario,
    m: int,
    seed: int,
    trial: int,
) -> TrialRecord:
    start = time.perf_counter()
    rng = _trial_rng(seed, trial)
    idxs = scenario.dist.draw_indices(m, rng)
    counts = Counter(idxs)
    collection = scenario.dist.collection_of(idxs)
    if isinstance(scenario, MostGeneralScenario):
        q = fit_smallest_path_cq(collection, scenario)
    else:
        q = fit_smallest_path_cq(collection)
    err = exact_error(q, scenario.dist)
    return TrialRecord(
        trial=trial,
        m=m,
        seen_support=len(counts),
        error=err,
        output_atoms=q.size(),
        positive_drawn=(
            0 in counts if isinstance(scenario, MostGeneralScenario) else None
        ),
        draw_counts=dict(counts),
        elapsed_ms=(time.perf_counter() - start) * 1000,
    )


# fork-shared state for parallel trial execution
_POOL_STATE: dict = {}


def _pool_trial(trial: int) -> TrialRecord:
    s = _POOL_STATE
    return s["runner"](s["scenario"], s["m"], s["seed"], trial)


def run_experiment(
    scenario_name: str,
    n: int,
    m: int,
    trials: int,
    epsilon: Fraction = Fraction(1, 4),
    delta: Fraction = Fraction(1, 20),
    seed: int = 0,
    jobs: int = 1,
    base: str = "thm4",
) -> ExperimentReport:
    """Run ``trials`` independent trials and collect an exact report.

    ``scenario_name`` is one of ``thm4`` (most-general join fitter),
    ``thm5`` (most-specific product fitter), or ``baseline`` (smallest
    labelled-chain fitter on the scenario named by ``base``).  Trial ``t``
    draws with ``random.Random(f"{seed}:{t}")`` regardless of ``jobs``,
    so reports are reproducible and parallelism cannot change them.
    """
    if scenario_name not in SCENARIO_NAMES:
        raise ValueError(f"unknown scenario {scenario_name!r}; pick from {SCENARIO_NAMES}")
    if trials < 1 or m < 1:
        raise ValueError("need at least one trial and one draw")
    if scenario_name == "thm4":
        scn: MostGeneralScenario | MostSpecificScenario = build_theorem4_scenario(n)
        runner = _run_trial_most_general
        fitter = "most-general-join"
        base_name: str | None = None
    elif scenario_name == "thm5":
        scn = build_theorem5_scenario(n)
        runner = _run_trial_most_specific
        fitter = "most-specific-product"
        base_name = None
    else:
        if base not in ("thm4", "thm5"):
            raise ValueError(f"baseline base must be thm4 or thm5, got {base!r}")
        scn = (
            build_theorem4_scenario(n) if base == "thm4" else build_theorem5_scenario(n)
        )
        runner = _run_trial_baseline
        fitter = "smallest-path"
        base_name = base
    if jobs > 1:
        _POOL_STATE.update(runner=runner, scenario=scn, m=m, seed=seed)
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs) as pool:
            records = tuple(pool.map(_pool_trial, range(trials)))
        _POOL_STATE.clear()
    else:
        records = tuple(runner(scn, m, seed, t) for t in range(trials))
    return ExperimentReport(
        scenario=scenario_name,
        base=base_name,
        fitter=fitter,
        n=n,
        m=m,
        trials=trials,
        epsilon=epsilon,
        delta=delta,
        seed=seed,
        records=records,
    )
