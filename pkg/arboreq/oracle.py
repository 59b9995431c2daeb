"""Exact decision procedures.

All three deciders share one backtracking engine: vertices in descending
degree order (ties by index), colors ascending, a class rejected as soon
as it would exceed its size bound or close a cycle.  Cycles are detected
with a single rollback union-find over all vertices; color classes are
disjoint, so their trees never mix.

Only a completed search yields `Feasible` or `Infeasible`; running out of
budget yields `Unknown`.

"""

from collections import defaultdict
from contextlib import closing
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, islice, product
from multiprocessing import Pool
import time
from typing import Any, Generator, Iterable, Iterator

from arboreq import BudgetExhausted, InternalConsistencyError, ParameterError
from arboreq.coloring import (
    ListAssignment,
    PartialColoring,
    equity_cap,
    verify_arborable_L_coloring,
    verify_equitable_vertex_partition,
)
from arboreq.graph import Graph
from arboreq.unionfind import UnionFind


class Status(Enum):
    feasible = "Feasible"
    infeasible = "Infeasible"
    unknown = "Unknown"


@dataclass(frozen=True)
class SearchBudget:
    """Limits for one decision; ``0`` means unlimited."""

    node_limit: int = 0
    time_limit: float = 0.0

    def meter(self) -> "Meter":
        return Meter(self)


class Meter:
    """Counts search nodes against a `SearchBudget`."""

    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self._deadline = (
            time.monotonic() + budget.time_limit if budget.time_limit > 0 else None
        )

    def tick(self):
        self.nodes += 1
        limit = self.budget.node_limit
        if limit and self.nodes > limit:
            raise BudgetExhausted(f"node limit of {limit} reached")
        if (
            self._deadline is not None
            and self.nodes % 256 == 0
            and time.monotonic() > self._deadline
        ):
            raise BudgetExhausted(f"time limit of {self.budget.time_limit}s reached")


@dataclass
class Verdict:
    status: Status
    witness: PartialColoring | None = None
    refuted_assignment: ListAssignment | None = None
    nodes: int = 0
    checked: int = 0
    complete: bool = True
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.status is Status.feasible

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "status": self.status.value,
            "nodes": self.nodes,
            "complete": self.complete,
        }
        if self.witness is not None:
            data["colors"] = {str(v): c for v, c in sorted(self.witness.items())}
        if self.refuted_assignment is not None:
            data["lists"] = {
                str(v): sorted(lst)
                for v, lst in enumerate(self.refuted_assignment.lists)
            }
        if self.checked:
            data["checked"] = self.checked
        if self.reason:
            data["reason"] = self.reason
        return data


class _ClassSearch:
    """Backtracking over colorings whose classes stay acyclic and bounded.

    In list mode each vertex picks from its own list and every class is
    capped at `cap`.  In partition mode (`sizes` = ``(k, q, r)``) colors
    are ``0..k-1``, introduced in order, at most `r` classes may reach
    ``q + 1`` and no class may exceed it.  Vertices with equal
    neighborhoods (twins) also take non-decreasing colors in search order;
    the lexicographically least member of every symmetry orbit obeys both
    rules, so no partition is lost.

    """

    def __init__(
        self,
        g: Graph,
        lists: list[tuple[int, ...]],
        cap: int,
        meter: Meter,
        sizes: tuple[int, int, int] | None = None,
    ):
        self.g = g
        self.lists = lists
        self.cap = cap
        self.meter = meter
        self.sizes = sizes
        self.order = sorted(g.vertices, key=lambda v: (-g.degree(v), v))
        self.color: list[int | None] = [None] * g.n
        self.size: defaultdict[int, int] = defaultdict(int)
        self.uf = UnionFind(g.n)
        self.opened = 0
        self.big = 0
        self.twin_before: dict[int, int] = {}
        if sizes is not None:
            last: dict[tuple[int, ...], int] = {}
            for v in self.order:
                if (u := last.get(g.adjacency[v])) is not None:
                    self.twin_before[v] = u
                last[g.adjacency[v]] = v

    def room(self, c: int) -> bool:
        s = self.size[c]
        if self.sizes is None:
            return s < self.cap
        _, q, r = self.sizes
        return s < q or (s == q and self.big < r)

    def allowed(self, v: int, c: int) -> bool:
        if not self.room(c):
            return False
        roots = set()
        for u in self.g.adjacency[v]:
            if self.color[u] == c:
                root = self.uf.find(u)
                if root in roots:
                    return False
                roots.add(root)
        return True

    def candidates(self, v: int) -> Iterable[int]:
        if self.sizes is None:
            return self.lists[v]
        lo = 0
        if (u := self.twin_before.get(v)) is not None:
            lo = self.color[u] or 0
        return range(lo, min(self.opened + 1, self.sizes[0]))

    def place(self, v: int, c: int) -> int:
        mark = self.uf.mark()
        for u in self.g.adjacency[v]:
            if self.color[u] == c:
                self.uf.union(v, u)
        self.color[v] = c
        self.size[c] += 1
        if self.sizes is not None:
            if self.size[c] == self.sizes[1] + 1:
                self.big += 1
            if c == self.opened:
                self.opened += 1
        return mark

    def unplace(self, v: int, c: int, mark: int):
        if self.sizes is not None:
            if self.size[c] == self.sizes[1] + 1:
                self.big -= 1
            if self.size[c] == 1:
                self.opened -= 1
        self.size[c] -= 1
        self.color[v] = None
        self.uf.rollback(mark)

    def consistent(self, rest: list[int]) -> bool:
        if self.sizes is None:
            return all(any(self.allowed(u, c) for c in self.lists[u]) for u in rest)
        k, q, _ = self.sizes
        fresh = self.opened < k and self.room(self.opened)
        reach = [0] * self.opened
        for u in rest:
            hit = fresh
            for c in range(self.opened):
                if self.allowed(u, c):
                    reach[c] += 1
                    hit = True
            if not hit:
                return False
        if any(self.size[c] + reach[c] < q for c in range(self.opened)):
            return False
        deficit = sum(max(0, q - self.size[c]) for c in range(self.opened))
        return len(rest) >= deficit + (k - self.opened) * q

    def run(self) -> PartialColoring | None:
        if self._dfs(0):
            return PartialColoring({v: c for v, c in enumerate(self.color) if c is not None})
        return None

    def _dfs(self, depth: int) -> bool:
        if depth == len(self.order):
            return True
        self.meter.tick()
        v = self.order[depth]
        for c in self.candidates(v):
            if not self.allowed(v, c):
                continue
            mark = self.place(v, c)
            if self.consistent(self.order[depth + 1 :]) and self._dfs(depth + 1):
                return True
            self.unplace(v, c, mark)
        return False


def exact_equitable_arborable(
    g: Graph,
    L: ListAssignment,
    cap: int,
    budget: SearchBudget = SearchBudget(),
    meter: Meter | None = None,
) -> Verdict:
    """Decide whether `g` has an arborable L-coloring with classes <= `cap`.

    Parameters
    ----------
    g : Graph
    L : ListAssignment
        One list per vertex of `g`.
    cap : int
        Largest permitted class size.
    budget : SearchBudget
        Ignored when a running `meter` is passed in.

    Returns
    -------
    Verdict
        A feasible verdict carries a re-verified witness.

    """
    if L.n != g.n:
        raise ParameterError(f"assignment covers {L.n} vertices, graph has {g.n}")
    meter = meter or budget.meter()
    search = _ClassSearch(g, [tuple(sorted(L[v])) for v in g.vertices], cap, meter)
    try:
        witness = search.run()
    except BudgetExhausted as exc:
        return Verdict(Status.unknown, nodes=meter.nodes, reason=str(exc))
    if witness is None:
        return Verdict(Status.infeasible, nodes=meter.nodes)
    report = verify_arborable_L_coloring(g, L, witness, require_total=True)
    if not report.ok or report.max_class_size > cap:
        raise InternalConsistencyError(
            f"search produced an invalid witness: {'; '.join(report.failures())}"
        )
    return Verdict(Status.feasible, witness=witness, nodes=meter.nodes)


def decide_equitable_vertex_arborable(
    g: Graph, k: int, budget: SearchBudget = SearchBudget()
) -> Verdict:
    """Search for `k` forest classes whose sizes differ by at most one."""
    if k < 1:
        raise ParameterError(f"need k >= 1: {k=}")
    q, r = divmod(g.n, k)
    meter = budget.meter()
    lists = [tuple(range(k))] * g.n
    search = _ClassSearch(g, lists, q + (r > 0), meter, sizes=(k, q, r))
    try:
        witness = search.run()
    except BudgetExhausted as exc:
        return Verdict(Status.unknown, nodes=meter.nodes, reason=str(exc))
    if witness is None:
        return Verdict(Status.infeasible, nodes=meter.nodes)
    if not verify_equitable_vertex_partition(g, k, witness):
        raise InternalConsistencyError(f"search produced an invalid partition: {witness}")
    return Verdict(Status.feasible, witness=witness, nodes=meter.nodes)


def canonical_assignments(n: int, k: int, universe: int) -> Iterator[ListAssignment]:
    """k-assignments over ``range(universe)`` with colors numbered by first use.

    Every assignment is a color permutation of at least one yielded
    assignment.  Lists reusing old colors come before lists opening new ones.

    """
    lists: list[frozenset[int]] = []

    def extend(v: int, used: int) -> Iterator[ListAssignment]:
        if v == n:
            yield ListAssignment(tuple(lists))
            return
        for t in range(k + 1):
            if used + t > universe or k - t > used:
                continue
            new = frozenset(range(used, used + t))
            for old in combinations(range(used), k - t):
                lists.append(new.union(old))
                yield from extend(v + 1, used + t)
                lists.pop()

    yield from extend(0, 0)


def all_assignments(n: int, k: int, universe: int) -> Iterator[ListAssignment]:
    """Every k-assignment over ``range(universe)``, without symmetry reduction."""
    for choice in product(combinations(range(universe), k), repeat=n):
        yield ListAssignment.of(choice)


def _decide_one(
    args: tuple[Graph, ListAssignment, int, SearchBudget],
) -> tuple[ListAssignment, Verdict]:
    g, L, cap, budget = args
    return L, exact_equitable_arborable(g, L, cap, budget)


def _pooled_verdicts(
    g: Graph,
    assignments: Iterator[ListAssignment],
    cap: int,
    budget: SearchBudget,
    jobs: int,
    batch: int = 256,
) -> Generator[tuple[ListAssignment, Verdict], None, None]:
    """Verdicts for `assignments`, computed by `jobs` processes, in input order."""
    work = ((g, L, cap, budget) for L in assignments)
    with Pool(processes=jobs) as pool:
        while chunk := list(islice(work, batch * jobs)):
            yield from pool.map(_decide_one, chunk)


def decide_equitably_k_list_arborable(
    g: Graph,
    k: int,
    universe: int,
    budget: SearchBudget = SearchBudget(),
    canonical: bool = True,
    jobs: int = 1,
) -> Verdict:
    """Check every k-assignment over a bounded color universe.

    The decision is complete only when ``universe >= k * n``: no
    k-assignment needs more colors than that.  `Verdict.complete` records
    which case applies.  Assignments are visited in a fixed order, so the
    first refutation found is reproducible.

    With ``jobs > 1`` the assignments are decided by a process pool in
    batches and the verdicts are combined in enumeration order, so the
    answer matches the sequential one.  `budget` then applies to each
    assignment on its own instead of to the whole enumeration.

    """
    if k < 1:
        raise ParameterError(f"need k >= 1: {k=}")
    if universe < k:
        raise ParameterError(f"universe smaller than list size: {universe=} < {k=}")
    cap = equity_cap(g.n, k)
    complete = universe >= k * g.n
    meter = budget.meter()
    source = canonical_assignments if canonical else all_assignments
    assignments = source(g.n, k, universe)
    verdicts: Generator[tuple[ListAssignment, Verdict], None, None]
    if jobs > 1:
        verdicts = _pooled_verdicts(g, assignments, cap, budget, jobs)
    else:
        verdicts = ((L, exact_equitable_arborable(g, L, cap, meter=meter)) for L in assignments)
    checked = nodes = 0
    with closing(verdicts):
        for L, verdict in verdicts:
            checked += 1
            nodes = nodes + verdict.nodes if jobs > 1 else meter.nodes
            match verdict.status:
                case Status.unknown:
                    return Verdict(
                        Status.unknown,
                        nodes=nodes,
                        checked=checked,
                        complete=complete,
                        reason=verdict.reason,
                    )
                case Status.infeasible:
                    return Verdict(
                        Status.infeasible,
                        refuted_assignment=L,
                        nodes=nodes,
                        checked=checked,
                        complete=complete,
                    )
    return Verdict(Status.feasible, nodes=nodes, checked=checked, complete=complete)
