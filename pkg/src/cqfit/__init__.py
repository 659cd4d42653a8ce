"""Conjunctive-query fitting over labelled relational examples.

The pieces, bottom up: :mod:`cqfit.core` holds the data model and text
formats; :mod:`cqfit.hom` decides homomorphism existence and everything
reducible to it (evaluation, containment, fitting); :mod:`cqfit.product`
builds direct products and the most specific fitting query;
:mod:`cqfit.duality` builds and verifies relativized dualities for path
examples; :mod:`cqfit.pac` runs exact sample-efficiency experiments; and
:mod:`cqfit.cli` exposes it all as the ``cqfit`` command.
"""

from .core import (
    CQ,
    CqfitError,
    Example,
    Fact,
    Instance,
    IsolatedValueWarning,
    LabeledCollection,
    ParseError,
    PathExample,
    Schema,
    SchemaError,
    as_path_example,
    canonical_cq,
    canonical_example,
    canonical_instance,
    infer_schema,
    parse_cq,
    parse_collection,
    parse_example,
    parse_instance,
    serialize_cq,
    serialize_collection,
    serialize_example,
    serialize_instance,
)
from .duality import (
    PathDual,
    RelativeDuality,
    VerifyResult,
    build_path_dual,
    generate_probes,
    verify_duality_exhaustive,
    verify_relative_duality,
)
from .hom import (
    BudgetExceeded,
    contained,
    equivalent,
    evaluate,
    find_hom,
    fits,
    hom_exists,
)
from .pac import (
    ExperimentReport,
    FiniteDistribution,
    TrialRecord,
    WeightedExample,
    build_theorem4_scenario,
    build_theorem5_scenario,
    exact_error,
    fit_most_specific,
    fit_scenario_most_general,
    fit_smallest_path_cq,
    run_experiment,
    sample,
)
from .product import (
    ImplicitProduct,
    NoFittingError,
    ProductSizeError,
    hom_into_product,
    most_specific_fitting,
    product_example,
    product_many,
)

__version__ = "0.1.0"

__all__ = [
    "CQ",
    "CqfitError",
    "Example",
    "Fact",
    "Instance",
    "IsolatedValueWarning",
    "LabeledCollection",
    "ParseError",
    "PathExample",
    "Schema",
    "SchemaError",
    "as_path_example",
    "canonical_cq",
    "canonical_example",
    "canonical_instance",
    "infer_schema",
    "parse_cq",
    "parse_collection",
    "parse_example",
    "parse_instance",
    "serialize_cq",
    "serialize_collection",
    "serialize_example",
    "serialize_instance",
    "PathDual",
    "RelativeDuality",
    "VerifyResult",
    "build_path_dual",
    "generate_probes",
    "verify_duality_exhaustive",
    "verify_relative_duality",
    "BudgetExceeded",
    "contained",
    "equivalent",
    "evaluate",
    "find_hom",
    "fits",
    "hom_exists",
    "ExperimentReport",
    "FiniteDistribution",
    "TrialRecord",
    "WeightedExample",
    "build_theorem4_scenario",
    "build_theorem5_scenario",
    "exact_error",
    "fit_most_specific",
    "fit_scenario_most_general",
    "fit_smallest_path_cq",
    "run_experiment",
    "sample",
    "ImplicitProduct",
    "NoFittingError",
    "ProductSizeError",
    "hom_into_product",
    "most_specific_fitting",
    "product_example",
    "product_many",
    "__version__",
]
