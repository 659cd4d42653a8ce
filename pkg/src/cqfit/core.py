"""Relational instances, data examples, conjunctive queries, and their conversions.

The object model is deliberately small and structural:

* :class:`Schema` maps relation names to arities and exists for validation
  and merging; instances and queries do not carry a schema of their own,
  they infer one from their facts or atoms on demand.
* :class:`Instance` is a finite set of facts over an explicit domain.  The
  domain may strictly contain the values used in facts, so isolated values
  survive serialization round trips.
* :class:`Example` pairs an instance with a distinguished answer tuple.
* :class:`CQ` is a conjunctive query: a head variable tuple plus a body of
  relational atoms.  Atoms are kept sorted and deduplicated, which makes
  syntactic equality insensitive to atom order and repetition.
* :class:`PathExample` is the shape used by the duality construction: a
  directed chain of binary edges with optional unary labels at positions
  ``1..n`` and the answer at position 0.

Text formats (used by the CLI and the parse/serialize functions):

* instance/example files hold one fact per line, ``R(v1,...,vk)``.  An
  optional ``#domain v1 v2 ...`` line declares extra isolated values and a
  ``#answer v1 v2 ...`` line names the answer tuple; a missing ``#answer``
  means a 0-ary (Boolean) example.
* query files hold a single rule ``q(x1,...,xk) :- R(y,z), A(y)``.  An
  empty body is written ``q(x1,...,xk) :-``.
* collection files interleave ``#positive`` / ``#negative`` header lines,
  each followed by one example block.

Values, variables, and relation names are opaque strings drawn from
``[A-Za-z0-9_<>,]+``.  Angle brackets must nest; ``<u,v>`` is the pair
value produced by direct products, and commas split arguments only at
bracket depth zero, so pair values parse without escaping.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

__all__ = [
    "CqfitError",
    "SchemaError",
    "ParseError",
    "IsolatedValueWarning",
    "Schema",
    "Fact",
    "Instance",
    "Example",
    "CQ",
    "PathExample",
    "LabeledCollection",
    "pair_value",
    "split_pair",
    "fact_token",
    "infer_schema",
    "canonical_instance",
    "canonical_example",
    "canonical_cq",
    "as_path_example",
    "parse_example",
    "parse_instance",
    "parse_cq",
    "parse_collection",
    "serialize_instance",
    "serialize_example",
    "serialize_cq",
    "serialize_collection",
]


class CqfitError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(CqfitError):
    """Arity clash, unknown relation, or malformed structural data."""


class ParseError(CqfitError):
    """Malformed textual input; message names the offending line."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IsolatedValueWarning(UserWarning):
    """An isolated non-answer value was dropped when forming a query.

    A domain value that occurs in no fact and is not part of the answer
    tuple would become an existential variable occurring in no atom.  Such
    a variable is semantically vacuous, and the query type cannot carry
    it, so :func:`canonical_cq` drops it and emits this warning.
    """


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_VALUE_RE = re.compile(r"[A-Za-z0-9_<>,]+\Z")


def _check_name(name: str) -> str:
    if not _NAME_RE.match(name):
        raise SchemaError(f"bad relation name {name!r}")
    return name


def _check_value(value: str) -> str:
    if not _VALUE_RE.match(value) or not _balanced(value):
        raise SchemaError(f"bad value {value!r}")
    return value


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def _split_top(s: str, seps: str = ",") -> list[str]:
    """Split at separators that sit outside every ``<>`` and ``()`` nesting."""
    parts: list[str] = []
    depth = 0
    start = 0
    for i, ch in enumerate(s):
        if ch in "<(":
            depth += 1
        elif ch in ">)":
            depth -= 1
        elif ch in seps and depth == 0:
            parts.append(s[start:i])
            start = i + 1
    parts.append(s[start:])
    return parts


# ---------------------------------------------------------------------------
# schema


@dataclass(frozen=True)
class Schema:
    """A finite map from relation names to arities, stored sorted by name."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        seen: dict[str, int] = {}
        for name, arity in self.relations:
            _check_name(name)
            if arity < 1:
                raise SchemaError(f"relation {name!r} has arity {arity}; must be >= 1")
            if seen.get(name, arity) != arity:
                raise SchemaError(
                    f"relation {name!r} declared with arities {seen[name]} and {arity}"
                )
            seen[name] = arity
        ordered = tuple(sorted(seen.items()))
        if ordered != self.relations:
            object.__setattr__(self, "relations", ordered)

    @classmethod
    def from_mapping(cls, mapping: dict[str, int]) -> Schema:
        return cls(tuple(sorted(mapping.items())))

    def arity(self, name: str) -> int:
        for rel, k in self.relations:
            if rel == name:
                return k
        raise SchemaError(f"unknown relation {name!r}")

    def __contains__(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.relations)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(rel for rel, _ in self.relations)

    @property
    def unary_names(self) -> tuple[str, ...]:
        return tuple(rel for rel, k in self.relations if k == 1)

    @property
    def binary_names(self) -> tuple[str, ...]:
        return tuple(rel for rel, k in self.relations if k == 2)

    def merge(self, other: Schema) -> Schema:
        merged = dict(self.relations)
        for name, arity in other.relations:
            if merged.get(name, arity) != arity:
                raise SchemaError(
                    f"relation {name!r} has arity {merged[name]} on one side "
                    f"and {arity} on the other"
                )
            merged[name] = arity
        return Schema.from_mapping(merged)


# ---------------------------------------------------------------------------
# instances and examples


@dataclass(frozen=True, order=True)
class Fact:
    """A single ground atom ``relation(args)``."""

    relation: str
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_name(self.relation)
        if not self.args:
            raise SchemaError(f"fact {self.relation!r} has no arguments")
        for a in self.args:
            _check_value(a)

    def __str__(self) -> str:
        return f"{self.relation}({','.join(self.args)})"


@dataclass(frozen=True)
class Instance:
    """A finite relational instance: a fact set over an explicit domain.

    The domain must contain every value used in a fact and may contain
    further isolated values.
    """

    facts: frozenset[Fact]
    domain: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "facts", frozenset(self.facts))
        object.__setattr__(self, "domain", frozenset(self.domain))
        arities: dict[str, int] = {}
        for f in self.facts:
            k = arities.setdefault(f.relation, len(f.args))
            if k != len(f.args):
                raise SchemaError(
                    f"relation {f.relation!r} used with arities {k} and {len(f.args)}"
                )
        used = {a for f in self.facts for a in f.args}
        if not used <= self.domain:
            missing = sorted(used - self.domain)
            raise SchemaError(f"fact values missing from domain: {missing}")
        for v in self.domain:
            _check_value(v)

    @classmethod
    def of(cls, facts: Iterable[Fact], extra_domain: Iterable[str] = ()) -> Instance:
        facts = frozenset(facts)
        dom = {a for f in facts for a in f.args} | set(extra_domain)
        return cls(facts, frozenset(dom))

    @cached_property
    def schema(self) -> Schema:
        return infer_schema(self)

    def facts_of(self, relation: str) -> list[Fact]:
        return sorted(f for f in self.facts if f.relation == relation)

    def __len__(self) -> int:
        return len(self.facts)


@dataclass(frozen=True)
class Example:
    """An instance with a distinguished answer tuple (possibly empty)."""

    instance: Instance
    answers: tuple[str, ...]

    def __post_init__(self) -> None:
        if not set(self.answers) <= self.instance.domain:
            missing = sorted(set(self.answers) - self.instance.domain)
            raise SchemaError(f"answer values missing from domain: {missing}")

    @classmethod
    def of(
        cls,
        facts: Iterable[Fact],
        answers: Iterable[str] = (),
        extra_domain: Iterable[str] = (),
    ) -> Example:
        answers = tuple(answers)
        return cls(Instance.of(facts, set(extra_domain) | set(answers)), answers)

    @property
    def arity(self) -> int:
        return len(self.answers)

    @property
    def schema(self) -> Schema:
        return self.instance.schema


@dataclass(frozen=True)
class CQ:
    """A conjunctive query ``q(head) :- atoms``.

    Atoms are stored sorted and without duplicates, so two queries that
    differ only in atom order or repetition compare equal.  Head variables
    need not occur in the body.
    """

    head: tuple[str, ...]
    atoms: tuple[Fact, ...]

    def __post_init__(self) -> None:
        for v in self.head:
            _check_value(v)
        arities: dict[str, int] = {}
        for a in self.atoms:
            k = arities.setdefault(a.relation, len(a.args))
            if k != len(a.args):
                raise SchemaError(
                    f"relation {a.relation!r} used with arities {k} and {len(a.args)}"
                )
        ordered = tuple(sorted(set(self.atoms)))
        if ordered != self.atoms:
            object.__setattr__(self, "atoms", ordered)

    @property
    def arity(self) -> int:
        return len(self.head)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.head) | {a for atom in self.atoms for a in atom.args}

    @cached_property
    def schema(self) -> Schema:
        return infer_schema(self)

    def size(self) -> int:
        """Number of atoms in the body."""
        return len(self.atoms)


@dataclass(frozen=True)
class PathExample:
    """A directed chain with labels, the input shape of the dual construction.

    ``values`` are the n+1 chain values in order; ``edge_relations[i]`` is
    the binary relation of the edge from position i to i+1; ``labels[i]``
    is the set of unary relations holding at position i+1.  Position 0 is
    the answer and carries no label.
    """

    values: tuple[str, ...]
    edge_relations: tuple[str, ...]
    labels: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        n = len(self.edge_relations)
        if n < 1:
            raise SchemaError("path must have at least one edge")
        if len(self.values) != n + 1:
            raise SchemaError(
                f"path with {n} edges needs {n + 1} values, got {len(self.values)}"
            )
        if len(set(self.values)) != len(self.values):
            raise SchemaError("path values must be distinct")
        object.__setattr__(self, "labels", tuple(frozenset(s) for s in self.labels))
        if len(self.labels) != n:
            raise SchemaError(f"path with {n} edges needs {n} label sets")
        for v in self.values:
            _check_value(v)
        for r in self.edge_relations:
            _check_name(r)
        for s in self.labels:
            for r in s:
                _check_name(r)

    @property
    def length(self) -> int:
        return len(self.edge_relations)

    def to_example(self) -> Example:
        facts: set[Fact] = set()
        for i, rel in enumerate(self.edge_relations):
            facts.add(Fact(rel, (self.values[i], self.values[i + 1])))
        for i, labelset in enumerate(self.labels):
            for rel in sorted(labelset):
                facts.add(Fact(rel, (self.values[i + 1],)))
        return Example(Instance(frozenset(facts), frozenset(self.values)), (self.values[0],))


@dataclass(frozen=True)
class LabeledCollection:
    """A finite set of positive and a finite set of negative examples."""

    positives: frozenset[Example]
    negatives: frozenset[Example]

    def __post_init__(self) -> None:
        object.__setattr__(self, "positives", frozenset(self.positives))
        object.__setattr__(self, "negatives", frozenset(self.negatives))
        arities = {e.arity for e in self.positives} | {e.arity for e in self.negatives}
        if len(arities) > 1:
            raise SchemaError(f"examples of mixed arities {sorted(arities)}")
        self.schema  # merge now so conflicts surface at construction

    @cached_property
    def schema(self) -> Schema:
        merged = Schema(())
        for e in sorted(self.positives | self.negatives, key=serialize_example):
            merged = merged.merge(e.schema)
        return merged

    @property
    def arity(self) -> int:
        for e in self.positives | self.negatives:
            return e.arity
        return 0

    def __len__(self) -> int:
        return len(self.positives) + len(self.negatives)


# ---------------------------------------------------------------------------
# value helpers shared by products and dualities


def pair_value(left: str, right: str) -> str:
    """Render the product value of ``left`` and ``right`` as ``<left,right>``."""
    return f"<{left},{right}>"


def split_pair(value: str) -> tuple[str, str]:
    """Inverse of :func:`pair_value`; raises :class:`SchemaError` otherwise."""
    if not (value.startswith("<") and value.endswith(">")):
        raise SchemaError(f"{value!r} is not a pair value")
    parts = _split_top(value[1:-1])
    if len(parts) != 2 or not all(parts):
        raise SchemaError(f"{value!r} is not a pair value")
    return parts[0], parts[1]


def fact_token(f: Fact) -> str:
    """A fact rendered as a single value token, ``R<y0,y1>`` for ``R(y0,y1)``."""
    return f"{f.relation}<{','.join(f.args)}>"


# ---------------------------------------------------------------------------
# schema inference and canonical conversions


def infer_schema(obj: Instance | Example | CQ | LabeledCollection) -> Schema:
    """The schema an object implicitly uses: each relation at its seen arity."""
    if isinstance(obj, LabeledCollection):
        return obj.schema
    if isinstance(obj, Example):
        obj = obj.instance
    atoms: Iterable[Fact] = obj.atoms if isinstance(obj, CQ) else obj.facts
    return Schema.from_mapping({a.relation: len(a.args) for a in atoms})


def canonical_instance(q: CQ) -> Instance:
    """The instance whose values are q's variables and whose facts are q's atoms."""
    return Instance(frozenset(q.atoms), frozenset(q.variables))


def canonical_example(q: CQ) -> Example:
    """The canonical instance of ``q`` with the head as answer tuple."""
    return Example(canonical_instance(q), q.head)


def canonical_cq(e: Example) -> CQ:
    """The query whose variables are e's values, atoms its facts, head its answers.

    Isolated values outside the answer tuple cannot be represented in a
    query and are dropped with an :class:`IsolatedValueWarning`; this does
    not change the query's semantics.
    """
    used = {a for f in e.instance.facts for a in f.args} | set(e.answers)
    dropped = e.instance.domain - used
    if dropped:
        warnings.warn(
            f"dropping isolated values {sorted(dropped)} not in the answer tuple",
            IsolatedValueWarning,
            stacklevel=2,
        )
    return CQ(e.answers, tuple(sorted(e.instance.facts)))


def as_path_example(e: Example) -> PathExample:
    """Recover the path shape of an example, or raise :class:`SchemaError`.

    Succeeds exactly when ``e`` equals ``p.to_example()`` for some
    :class:`PathExample` ``p``: a single answer value at position 0, a
    simple directed chain of binary facts through all domain values, unary
    labels only at positions ``1..n``, and nothing else.
    """
    if len(e.answers) != 1:
        raise SchemaError(f"path example needs exactly one answer, got {len(e.answers)}")
    start = e.answers[0]
    edges: dict[str, tuple[str, str]] = {}
    labels: dict[str, set[str]] = {v: set() for v in e.instance.domain}
    for f in e.instance.facts:
        if len(f.args) == 1:
            labels[f.args[0]].add(f.relation)
        elif len(f.args) == 2:
            src, dst = f.args
            if src in edges:
                raise SchemaError(f"value {src!r} has two outgoing edges")
            edges[src] = (f.relation, dst)
        else:
            raise SchemaError(f"fact {f} has arity {len(f.args)}; paths are binary")
    values = [start]
    edge_relations: list[str] = []
    seen = {start}
    cur = start
    while cur in edges:
        rel, nxt = edges[cur]
        if nxt in seen:
            raise SchemaError("edges form a cycle, not a path")
        edge_relations.append(rel)
        values.append(nxt)
        seen.add(nxt)
        cur = nxt
    if seen != e.instance.domain:
        stray = sorted(e.instance.domain - seen)
        raise SchemaError(f"values not on the chain from the answer: {stray}")
    if len(edges) != len(edge_relations):
        stray_edges = sorted(v for v in edges if v not in seen or v == values[-1])
        raise SchemaError(f"edges leaving the chain at: {stray_edges}")
    if not edge_relations:
        raise SchemaError("path must have at least one edge")
    if labels[start]:
        raise SchemaError(f"answer position carries labels {sorted(labels[start])}")
    return PathExample(
        tuple(values),
        tuple(edge_relations),
        tuple(frozenset(labels[v]) for v in values[1:]),
    )


# ---------------------------------------------------------------------------
# parsing


def _parse_fact(text: str, line: int) -> Fact:
    m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\((.*)\)\s*\Z", text)
    if not m:
        raise ParseError(f"malformed fact {text!r}", line)
    rel, body = m.group(1), m.group(2)
    args = [a.strip() for a in _split_top(body)]
    if args == [""]:
        raise ParseError(f"fact {rel!r} has no arguments", line)
    for a in args:
        if not _VALUE_RE.match(a) or not _balanced(a):
            raise ParseError(f"bad value {a!r} in fact {text!r}", line)
    try:
        return Fact(rel, tuple(args))
    except SchemaError as exc:
        raise ParseError(str(exc), line) from exc


def _example_lines(text: str) -> Iterator[tuple[int, str]]:
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped:
            yield i, stripped


def parse_example(text: str) -> Example:
    """Parse an example block; a missing ``#answer`` yields a 0-ary example."""
    facts: list[Fact] = []
    extra: list[str] = []
    answers: tuple[str, ...] | None = None
    arities: dict[str, int] = {}
    for line, stripped in _example_lines(text):
        if stripped.startswith("#answer"):
            if answers is not None:
                raise ParseError("second #answer line", line)
            vals = stripped[len("#answer"):].split()
            if not vals:
                raise ParseError("#answer needs at least one value", line)
            answers = tuple(vals)
        elif stripped.startswith("#domain"):
            extra.extend(stripped[len("#domain"):].split())
        elif stripped.startswith("#"):
            raise ParseError(f"unknown directive {stripped.split()[0]!r}", line)
        else:
            f = _parse_fact(stripped, line)
            k = arities.setdefault(f.relation, len(f.args))
            if k != len(f.args):
                raise ParseError(
                    f"relation {f.relation!r} used with arities {k} and {len(f.args)}",
                    line,
                )
            facts.append(f)
    try:
        return Example.of(facts, answers or (), extra)
    except SchemaError as exc:
        raise ParseError(str(exc)) from exc


def parse_instance(text: str) -> Instance:
    """Parse an instance block; an ``#answer`` line is rejected here."""
    for line, stripped in _example_lines(text):
        if stripped.startswith("#answer"):
            raise ParseError("#answer not allowed in an instance", line)
    return parse_example(text).instance


def parse_cq(text: str) -> CQ:
    """Parse ``q(x1,...,xk) :- atom, atom, ...`` (empty body allowed)."""
    stripped = text.strip()
    if ":-" not in stripped:
        raise ParseError("query needs ':-' between head and body", 1)
    head_txt, body_txt = stripped.split(":-", 1)
    m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\((.*)\)\s*\Z", head_txt.strip())
    if not m:
        raise ParseError(f"malformed head {head_txt.strip()!r}", 1)
    head_args = [a.strip() for a in _split_top(m.group(2))]
    if head_args == [""]:
        head: tuple[str, ...] = ()
    else:
        for a in head_args:
            if not _VALUE_RE.match(a) or not _balanced(a):
                raise ParseError(f"bad head variable {a!r}", 1)
        head = tuple(head_args)
    body_txt = body_txt.strip()
    atoms: list[Fact] = []
    if body_txt:
        for part in _split_top(body_txt):
            part = part.strip()
            if not part:
                raise ParseError("empty atom in body", 1)
            atoms.append(_parse_fact(part, 1))
    try:
        return CQ(head, tuple(atoms))
    except SchemaError as exc:
        raise ParseError(str(exc), 1) from exc


def parse_collection(text: str) -> LabeledCollection:
    """Parse ``#positive`` / ``#negative`` headed example blocks."""
    positives: list[Example] = []
    negatives: list[Example] = []
    current: list[str] | None = None
    current_line = 0
    blocks: list[tuple[str, int, list[str]]] = []
    for i, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped in ("#positive", "#negative"):
            current = []
            current_line = i
            blocks.append((stripped, i, current))
        elif stripped:
            if current is None:
                raise ParseError("content before the first #positive/#negative", i)
            current.append(raw)
    for tag, line, lines in blocks:
        try:
            e = parse_example("\n".join(lines))
        except ParseError as exc:
            raise ParseError(f"in block at line {line}: {exc}") from exc
        (positives if tag == "#positive" else negatives).append(e)
    try:
        return LabeledCollection(frozenset(positives), frozenset(negatives))
    except SchemaError as exc:
        raise ParseError(str(exc)) from exc


# ---------------------------------------------------------------------------
# serialization; output is canonical: sorted facts, then #domain, then #answer


def serialize_instance(inst: Instance) -> str:
    lines = [str(f) for f in sorted(inst.facts)]
    used = {a for f in inst.facts for a in f.args}
    extra = sorted(inst.domain - used)
    if extra:
        lines.append("#domain " + " ".join(extra))
    return "\n".join(lines) + "\n"


def serialize_example(e: Example) -> str:
    text = serialize_instance(e.instance)
    if e.answers:
        text += "#answer " + " ".join(e.answers) + "\n"
    return text


def serialize_cq(q: CQ) -> str:
    head = f"q({','.join(q.head)})"
    if not q.atoms:
        return f"{head} :-\n"
    return f"{head} :- " + ", ".join(str(a) for a in q.atoms) + "\n"


def serialize_collection(c: LabeledCollection) -> str:
    parts: list[str] = []
    for e in sorted(c.positives, key=serialize_example):
        parts.append("#positive\n" + serialize_example(e))
    for e in sorted(c.negatives, key=serialize_example):
        parts.append("#negative\n" + serialize_example(e))
    return "".join(parts)
