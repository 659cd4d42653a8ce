"""Homomorphism search between examples, and the query operations built on it.

The decision problem is solved as a constraint satisfaction search: source
values are variables, target domain values are candidates, and every source
fact induces a constraint.  Candidate sets are bitmasks over the sorted
target domain, pruned by arc consistency before and during a backtracking
search that picks the smallest live candidate set first.  All tie-breaks
are lexicographic, so searches are deterministic and the returned witness
depends only on the inputs.

Answer tuples anchor the search: the i-th source answer may only map to
the i-th target answer.  Source values that occur in no fact are filled in
after the search with the first target value their (label-pruned) candidate
set allows.

The search is budgeted by a node count, settable per call, via the
``CQFIT_NODE_BUDGET`` environment variable, or falling back to 10_000_000.
Exceeding it raises :class:`BudgetExceeded`; a clean ``None`` answer is
only returned when the search space was exhausted.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .core import (
    CQ,
    CqfitError,
    Example,
    Instance,
    SchemaError,
    canonical_example,
)

__all__ = [
    "BudgetExceeded",
    "DEFAULT_NODE_BUDGET",
    "NODE_BUDGET_ENV",
    "find_hom",
    "hom_exists",
    "evaluate",
    "contained",
    "equivalent",
    "fits",
]

DEFAULT_NODE_BUDGET = 10_000_000
NODE_BUDGET_ENV = "CQFIT_NODE_BUDGET"


class BudgetExceeded(CqfitError):
    """The search node budget ran out before the search space did."""


def _resolve_budget(node_budget: int | None) -> int:
    if node_budget is not None:
        if node_budget < 1:
            raise ValueError(f"node budget must be positive, got {node_budget}")
        return node_budget
    env = os.environ.get(NODE_BUDGET_ENV)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"{NODE_BUDGET_ENV}={env!r} is not an integer") from exc
        if value < 1:
            raise ValueError(f"{NODE_BUDGET_ENV} must be positive, got {value}")
        return value
    return DEFAULT_NODE_BUDGET


@dataclass
class _Search:
    """One solve; builds target indexes, then runs MAC backtracking."""

    src: Example
    dst: Example
    budget: int

    def __post_init__(self) -> None:
        self.src.schema.merge(self.dst.schema)  # arity clash -> SchemaError
        if len(self.src.answers) != len(self.dst.answers):
            raise SchemaError(
                f"answer arities differ: {len(self.src.answers)} vs {len(self.dst.answers)}"
            )
        self.svals = sorted(self.src.instance.domain)
        self.tvals = sorted(self.dst.instance.domain)
        self.vidx = {v: i for i, v in enumerate(self.svals)}
        self.tidx = {v: i for i, v in enumerate(self.tvals)}
        self.nodes = 0

    # -- target-side indexes ------------------------------------------------

    def _index_target(self) -> None:
        nt = len(self.tvals)
        self.unary: dict[str, int] = {}
        self.succ: dict[str, list[int]] = {}
        self.pred: dict[str, list[int]] = {}
        self.wide: dict[str, set[tuple[int, ...]]] = {}
        self.wide_pos: dict[str, list[int]] = {}
        for f in self.dst.instance.facts:
            idxs = tuple(self.tidx[a] for a in f.args)
            if len(idxs) == 1:
                self.unary[f.relation] = self.unary.get(f.relation, 0) | (1 << idxs[0])
            elif len(idxs) == 2:
                if f.relation not in self.succ:
                    self.succ[f.relation] = [0] * nt
                    self.pred[f.relation] = [0] * nt
                self.succ[f.relation][idxs[0]] |= 1 << idxs[1]
                self.pred[f.relation][idxs[1]] |= 1 << idxs[0]
            else:
                if f.relation not in self.wide:
                    self.wide[f.relation] = set()
                    self.wide_pos[f.relation] = [0] * len(idxs)
                self.wide[f.relation].add(idxs)
                for pos, i in enumerate(idxs):
                    self.wide_pos[f.relation][pos] |= 1 << i

    # -- source-side constraints --------------------------------------------

    def _collect_constraints(self) -> bool:
        """Build initial candidate masks; False means an early wipeout."""
        nt = len(self.tvals)
        full = (1 << nt) - 1
        self.dom = [full] * len(self.svals)
        # arcs[v] lists (other, succ_row, pred_row): v's value must have an
        # edge into other's value along succ_row, checked via pred_row.
        self.arcs: list[list[tuple[int, list[int], list[int]]]] = [
            [] for _ in self.svals
        ]
        self.wide_cons: list[tuple[str, tuple[int, ...]]] = []
        self.wide_of: list[list[int]] = [[] for _ in self.svals]
        seen_bin: set[tuple[int, int, str]] = set()
        for u, v in zip(self.src.answers, self.dst.answers):
            self.dom[self.vidx[u]] &= 1 << self.tidx[v]
        for f in sorted(self.src.instance.facts):
            idxs = tuple(self.vidx[a] for a in f.args)
            if len(idxs) == 1:
                self.dom[idxs[0]] &= self.unary.get(f.relation, 0)
            elif len(idxs) == 2:
                u, w = idxs
                if (u, w, f.relation) in seen_bin:
                    continue
                seen_bin.add((u, w, f.relation))
                succ = self.succ.get(f.relation)
                if succ is None:
                    return False
                pred = self.pred[f.relation]
                if u == w:
                    loops = 0
                    for i in range(nt):
                        if succ[i] >> i & 1:
                            loops |= 1 << i
                    self.dom[u] &= loops
                else:
                    self.arcs[u].append((w, succ, pred))
                    self.arcs[w].append((u, pred, succ))
            else:
                rows = self.wide.get(f.relation)
                if rows is None:
                    return False
                pos_masks = self.wide_pos[f.relation]
                for pos, var in enumerate(idxs):
                    self.dom[var] &= pos_masks[pos]
                cid = len(self.wide_cons)
                self.wide_cons.append((f.relation, idxs))
                for var in set(idxs):
                    self.wide_of[var].append(cid)
        self.constrained = sorted(
            v
            for v in range(len(self.svals))
            if self.arcs[v] or self.wide_of[v]
        )
        return all(self.dom)

    # -- propagation --------------------------------------------------------

    def _revise_all(self, seeds: list[int]) -> bool:
        """AC-3 from the seed variables; False on a domain wipeout."""
        queue = list(seeds)
        queued = set(queue)
        while queue:
            u = queue.pop()
            queued.discard(u)
            for w, _, pred_rows in self.arcs[u]:
                # shrink w against u: w's value needs a u-neighbour alive
                mask = self.dom[w]
                du = self.dom[u]
                new = 0
                m = mask
                while m:
                    low = m & -m
                    i = low.bit_length() - 1
                    if pred_rows[i] & du:
                        new |= low
                    m ^= low
                if new != mask:
                    if not new:
                        return False
                    self.dom[w] = new
                    if w not in queued:
                        queue.append(w)
                        queued.add(w)
            if self.dom[u].bit_count() == 1:
                if not self._check_wide(u):
                    return False
        return True

    def _check_wide(self, var: int) -> bool:
        """Check wide constraints on ``var`` whose variables are all pinned."""
        for cid in self.wide_of[var]:
            rel, idxs = self.wide_cons[cid]
            if all(self.dom[i].bit_count() == 1 for i in idxs):
                row = tuple(self.dom[i].bit_length() - 1 for i in idxs)
                if row not in self.wide[rel]:
                    return False
        return True

    # -- search -------------------------------------------------------------

    def run(self) -> dict[str, str] | None:
        if not self.svals:
            return {}
        if not self.tvals:
            return None
        self._index_target()
        if not self._collect_constraints():
            return None
        if not self._revise_all(list(range(len(self.svals)))):
            return None
        live = [v for v in self.constrained if self.dom[v].bit_count() > 1]
        # frames: (var, remaining candidate mask, saved domains)
        stack: list[tuple[int, int, list[int]]] = []
        while True:
            if not live:
                return self._extract()
            var = min(live, key=lambda v: (self.dom[v].bit_count(), v))
            rest = self.dom[var]
            saved = list(self.dom)
            placed = False
            while rest:
                low = rest & -rest
                rest ^= low
                self.nodes += 1
                if self.nodes > self.budget:
                    raise BudgetExceeded(
                        f"homomorphism search exceeded {self.budget} nodes"
                    )
                self.dom[var] = low
                if self._check_wide(var) and self._revise_all([var]):
                    stack.append((var, rest, saved))
                    live = [v for v in self.constrained if self.dom[v].bit_count() > 1]
                    placed = True
                    break
                self.dom = list(saved)
            if placed:
                continue
            # var has no workable value: backtrack to the last open frame
            while stack:
                var, rest, saved = stack.pop()
                self.dom = list(saved)
                placed = False
                while rest:
                    low = rest & -rest
                    rest ^= low
                    self.nodes += 1
                    if self.nodes > self.budget:
                        raise BudgetExceeded(
                            f"homomorphism search exceeded {self.budget} nodes"
                        )
                    self.dom[var] = low
                    if self._check_wide(var) and self._revise_all([var]):
                        stack.append((var, rest, saved))
                        live = [
                            v for v in self.constrained if self.dom[v].bit_count() > 1
                        ]
                        placed = True
                        break
                    self.dom = list(saved)
                if placed:
                    break
            else:
                return None

    def _extract(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for v in range(len(self.svals)):
            first = self.dom[v] & -self.dom[v]
            out[self.svals[v]] = self.tvals[first.bit_length() - 1]
        return out


def find_hom(
    src: Example, dst: Example, node_budget: int | None = None
) -> dict[str, str] | None:
    """A homomorphism from ``src`` to ``dst`` respecting answers, or ``None``.

    The witness maps every source domain value; it is deterministic for
    fixed inputs.  Raises :class:`~cqfit.core.SchemaError` on arity clashes
    and :class:`BudgetExceeded` when the node budget runs out.
    """
    return _Search(src, dst, _resolve_budget(node_budget)).run()


def hom_exists(src: Example, dst: Example, node_budget: int | None = None) -> bool:
    return find_hom(src, dst, node_budget) is not None


def evaluate(q: CQ, inst: Instance, node_budget: int | None = None) -> set[tuple[str, ...]]:
    """All answer tuples of ``q`` on ``inst``, by anchored homomorphism checks."""
    ce = canonical_example(q)
    dom = sorted(inst.domain)
    out: set[tuple[str, ...]] = set()
    for tup in itertools.product(dom, repeat=q.arity):
        if hom_exists(ce, Example(inst, tup), node_budget):
            out.add(tup)
    return out


def contained(q1: CQ, q2: CQ, node_budget: int | None = None) -> bool:
    """Whether every answer of ``q1`` is an answer of ``q2``, on all instances.

    Decided by the classical criterion: a homomorphism from the canonical
    example of ``q2`` into the canonical example of ``q1``.
    """
    if q1.arity != q2.arity:
        raise SchemaError(f"query arities differ: {q1.arity} vs {q2.arity}")
    return hom_exists(canonical_example(q2), canonical_example(q1), node_budget)


def equivalent(q1: CQ, q2: CQ, node_budget: int | None = None) -> bool:
    return contained(q1, q2, node_budget) and contained(q2, q1, node_budget)


def fits(q: CQ, collection, node_budget: int | None = None) -> bool:
    """Whether ``q`` answers yes on every positive and no on every negative."""
    ce = canonical_example(q)
    for e in collection.positives:
        if q.arity != e.arity:
            raise SchemaError(f"query arity {q.arity} vs example arity {e.arity}")
        if not hom_exists(ce, e, node_budget):
            return False
    for e in collection.negatives:
        if q.arity != e.arity:
            raise SchemaError(f"query arity {q.arity} vs example arity {e.arity}")
        if hom_exists(ce, e, node_budget):
            return False
    return True
