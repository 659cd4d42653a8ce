"""The ten gate checks.

Each test prints exactly one ``[PASS]``/``[FAIL]`` line with its elapsed
time and then asserts.  The heavy experiment reports are shared module
fixtures so the determinism check at the end can rerun them against the
originals.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from cqfit.core import (
    CQ,
    Example,
    Fact,
    Instance,
    LabeledCollection,
    canonical_example,
    serialize_example,
)
from cqfit.duality import (
    build_path_dual,
    generate_probes,
    verify_duality_exhaustive,
    verify_relative_duality,
)
from cqfit.hom import contained, find_hom, hom_exists
from cqfit.pac import (
    build_theorem5_scenario,
    exact_error,
    fit_smallest_path_cq,
    run_experiment,
)
from cqfit.product import NoFittingError, most_specific_fitting, product_example

from conftest import (
    brute_hom,
    fig_anchor,
    fig_expected_dual,
    fig_source,
    is_hom,
    normalize_values,
    path_pairs,
    random_example,
)

SEED = 11


def check(num: int, label: str, ok: bool, elapsed: float) -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"[{verdict}] {num}. {label} ({elapsed:.2f}s)")
    assert ok, f"gate check {num} failed: {label}"


# ---------------------------------------------------------------------------
# shared heavy fixtures


@pytest.fixture(scope="module")
def built_pairs():
    pairs = path_pairs(500)
    start = time.perf_counter()
    built = [(s, a, build_path_dual(s, a)) for s, a in pairs]
    return built, time.perf_counter() - start


def _timed_run(*args, **kwargs):
    start = time.perf_counter()
    report = run_experiment(*args, **kwargs)
    return report, time.perf_counter() - start


@pytest.fixture(scope="module")
def thm4_run():
    return _timed_run("thm4", n=8, m=64, trials=100, seed=SEED)


@pytest.fixture(scope="module")
def thm5_run():
    return _timed_run(
        "thm5", n=10, m=50, trials=20, seed=SEED, epsilon=Fraction(1, 2)
    )


@pytest.fixture(scope="module")
def base4_run():
    return _timed_run("baseline", n=8, m=64, trials=100, seed=SEED, base="thm4")


@pytest.fixture(scope="module")
def base5_run():
    return _timed_run(
        "baseline", n=10, m=50, trials=20, seed=SEED, base="thm5",
        epsilon=Fraction(1, 2),
    )


# ---------------------------------------------------------------------------
# the checks


def test_1_dual_golden_example():
    start = time.perf_counter()
    pd = build_path_dual(fig_source(), fig_anchor())
    elapsed = time.perf_counter() - start
    expected = fig_expected_dual()
    ok = (
        pd.constructed
        and len(pd.dual.instance.domain) == 7
        and pd.dual.answers == ("<x0,R<y0,y1>>",)
        and serialize_example(normalize_values(pd.dual))
        == serialize_example(normalize_values(expected))
        and elapsed < 1.0
    )
    check(1, "two-step chain dual matches the hand construction", ok, elapsed)


def test_2_dual_size_bound(built_pairs):
    built, build_time = built_pairs
    start = time.perf_counter()
    ok = len(built) >= 500
    for source, anchor, pd in built:
        i_facts = len(source.to_example().instance.facts)
        j_facts = len(anchor.to_example().instance.facts)
        if len(pd.dual.instance.facts) > j_facts * (i_facts + 1) ** 2:
            ok = False
            break
    elapsed = build_time + time.perf_counter() - start
    ok = ok and elapsed < 10
    check(2, "dual size stays within the quadratic bound on 500 pairs", ok, elapsed)


def test_3_duality_law(built_pairs):
    built, _ = built_pairs
    start = time.perf_counter()
    ok = True
    for i, (source, anchor, pd) in enumerate(built):
        rd = pd.as_duality()
        res = verify_relative_duality(rd, generate_probes(rd.anchor, 50, seed=i))
        if not (res.ok and res.checked == 50):
            ok = False
            break

    def pool_size(source, anchor):
        schema = source.to_example().schema.merge(anchor.to_example().schema)
        return sum(3**k for _, k in schema.relations)

    smallest = sorted(
        range(len(built)),
        key=lambda i: (pool_size(built[i][0], built[i][1]), i),
    )[:20]
    for i in smallest:
        if ok and not verify_duality_exhaustive(built[i][2].as_duality()).ok:
            ok = False
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 120
    check(
        3,
        "duality law holds on 25000 probes and 20 exhaustive sweeps",
        ok,
        elapsed,
    )


def test_4_hom_matches_enumeration():
    rng = random.Random(1009)
    start = time.perf_counter()
    ok = True
    count = 0
    for k in range(1000):
        arity = k % 2
        ternary = k % 5 == 0
        src = random_example(rng, max_values=4, max_facts=6, arity=arity, ternary=ternary)
        dst = random_example(rng, max_values=4, max_facts=6, arity=arity, ternary=ternary)
        witness = find_hom(src, dst)
        if witness is not None and not is_hom(witness, src, dst):
            ok = False
            break
        if (witness is not None) != brute_hom(src, dst):
            ok = False
            break
        count += 1
    elapsed = time.perf_counter() - start
    ok = ok and count >= 1000 and elapsed < 30
    check(4, "search agrees with mapping enumeration on 1000 pairs", ok, elapsed)


def test_5_product_universal_property():
    rng = random.Random(1013)
    start = time.perf_counter()
    ok = True
    for k in range(500):
        arity = k % 2
        x = random_example(rng, max_values=3, max_facts=5, arity=arity)
        e1 = random_example(rng, max_values=3, max_facts=5, arity=arity)
        e2 = random_example(rng, max_values=3, max_facts=5, arity=arity)
        prod = product_example(e1, e2)
        if hom_exists(x, prod) != (hom_exists(x, e1) and hom_exists(x, e2)):
            ok = False
            break
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 30
    check(5, "products have the universal property on 500 triples", ok, elapsed)


def _pool() -> tuple[list[CQ], list[Example]]:
    values = ("z0", "z1", "z2")
    atoms = [Fact("R", (u, v)) for u in values for v in values]
    atoms += [Fact("A", (u,)) for u in values]
    queries = [
        CQ(("z0",), combo)
        for size in range(0, 5)
        for combo in itertools.combinations(atoms, size)
    ]
    return queries, [canonical_example(q) for q in queries]


def _small_ra_example(rng: random.Random) -> Example:
    values = tuple(f"u{i}" for i in range(rng.randint(1, 3)))
    facts = set()
    for _ in range(rng.randint(1, 5)):
        if rng.random() < 0.6:
            facts.add(Fact("R", (rng.choice(values), rng.choice(values))))
        else:
            facts.add(Fact("A", (rng.choice(values),)))
    return Example(Instance.of(facts, extra_domain=values), (rng.choice(values),))


def _fits_collection(ce: Example, coll: LabeledCollection) -> bool:
    return all(hom_exists(ce, e) for e in coll.positives) and not any(
        hom_exists(ce, e) for e in coll.negatives
    )


def test_6_most_specific_is_most_specific():
    queries, examples = _pool()
    rng = random.Random(1019)
    start = time.perf_counter()
    ok = True
    fitted = 0
    attempts = 0
    while ok and fitted < 200 and attempts < 600:
        attempts += 1
        coll = LabeledCollection(
            frozenset(_small_ra_example(rng) for _ in range(rng.randint(1, 3))),
            frozenset(_small_ra_example(rng) for _ in range(rng.randint(0, 3))),
        )
        try:
            q = most_specific_fitting(coll)
        except NoFittingError:
            # then no pool query of at most 4 atoms may fit either
            for ce in examples:
                if _fits_collection(ce, coll):
                    ok = False
                    break
            continue
        fitted += 1
        if not _fits_collection(canonical_example(q), coll):
            ok = False
            break
        for pq, ce in zip(queries, examples):
            if _fits_collection(ce, coll) and not contained(q, pq):
                ok = False
                break
    elapsed = time.perf_counter() - start
    ok = ok and fitted >= 200 and elapsed < 120
    check(
        6,
        "fitted product is contained in every small fitting query, 200 collections",
        ok,
        elapsed,
    )


def test_7_join_fitter_generalizes_badly(thm4_run):
    report, elapsed = thm4_run
    ok = len(report.records) == 100 and elapsed < 300
    exceeded = 0
    for r in report.records:
        seen = sum(1 for i in r.draw_counts if i != 0)
        if r.error != Fraction(2**8 - seen, 2**9):
            ok = False
        if r.positive_drawn:
            if r.error > Fraction(1, 4):
                exceeded += 1
            else:
                ok = False
    ok = ok and exceeded >= 95
    check(
        7,
        f"join fitter error formula exact, above 1/4 in {exceeded}/100 trials",
        ok,
        elapsed,
    )


def test_8_product_fitter_generalizes_badly(thm5_run):
    report, elapsed = thm5_run
    ok = len(report.records) == 20 and elapsed < 300
    floor = Fraction(252 - 50, 252)
    for r in report.records:
        if r.error < floor or len(r.spot_checked) != 10:
            ok = False
    check(8, "product fitter error stays above 202/252 in 20 trials", ok, elapsed)


def test_9_baseline_generalizes(base4_run, base5_run, thm4_run):
    b4, t4 = base4_run
    b5, t5 = base5_run
    join_report, _ = thm4_run
    start = time.perf_counter()
    ok = len(b4.records) == 100 and len(b5.records) == 20
    target = CQ(("x0",), (Fact("A", ("x0",)),))
    scn5 = build_theorem5_scenario(10)
    for r in b5.records:
        if r.error != 0 or r.output_atoms != 1:
            ok = False
            break
        idxs = scn5.dist.draw_indices(50, random.Random(f"{SEED}:{r.trial}"))
        q = fit_smallest_path_cq(scn5.dist.collection_of(idxs))
        if q != target or exact_error(q, scn5.dist) != 0:
            ok = False
            break
    wins = sum(
        1 for rb, rj in zip(b4.records, join_report.records) if rb.error < rj.error
    )
    elapsed = t4 + t5 + time.perf_counter() - start
    ok = ok and wins >= 90 and elapsed < 300
    check(
        9,
        f"one-atom baseline exact on thm5, beats the join in {wins}/100 trials",
        ok,
        elapsed,
    )


def test_10_reports_reproduce(thm4_run, thm5_run, base4_run, base5_run):
    start = time.perf_counter()
    fresh = (
        _timed_run("thm4", n=8, m=64, trials=100, seed=SEED)[0],
        _timed_run("thm5", n=10, m=50, trials=20, seed=SEED, epsilon=Fraction(1, 2))[0],
        _timed_run("baseline", n=8, m=64, trials=100, seed=SEED, base="thm4")[0],
        _timed_run(
            "baseline", n=10, m=50, trials=20, seed=SEED, base="thm5",
            epsilon=Fraction(1, 2),
        )[0],
    )
    originals = (thm4_run[0], thm5_run[0], base4_run[0], base5_run[0])
    ok = all(f.to_json() == o.to_json() for f, o in zip(fresh, originals))
    elapsed = time.perf_counter() - start
    check(10, "rerunning all four reports is byte-identical", ok, elapsed)
