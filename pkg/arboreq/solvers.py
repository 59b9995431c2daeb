"""Constructive solvers for graph families with a known guarantee.

The inductive solvers are written as plans: peel sets, outermost first,
and a small core.  The core gets an exact search; then the peels are put
back innermost first, each one extending the coloring of everything
colored so far.  Nothing recurses, so long paths are fine.

"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

from arboreq import (
    BudgetExhausted,
    Infeasible,
    InternalConsistencyError,
    ParameterError,
    StructuralError,
)
from arboreq.coloring import (
    ListAssignment,
    PartialColoring,
    color_classes,
    equity_cap,
    restrict_assignment,
    verify_certificate,
)
from arboreq.extension import compute_d_lists, merge_colorings, zhang_extend
from arboreq.graph import (
    Family,
    FamilySpec,
    Graph,
    build_family,
    induced_subgraph,
    is_complete,
    is_cycle,
    is_degenerate,
    max_degree,
)
from arboreq.oracle import SearchBudget, Status, exact_equitable_arborable

Extender = Callable[[Graph, list[int], ListAssignment, PartialColoring], PartialColoring]

STRATEGIES = (
    "auto",
    "path-power",
    "path-power-pminus1",
    "cycle-power",
    "2-degenerate",
    "low-degree",
    "complete-minus-edge",
    "complete",
    "regular-small",
    "bipartite",
    "large-k",
    "exact",
)


@dataclass
class SolveOutcome:
    coloring: PartialColoring
    theorem_tag: str
    recursion_trace: list[list[int]] = field(default_factory=list)
    base: list[int] = field(default_factory=list)


@dataclass
class _Plan:
    peels: list[tuple[list[int], Extender]] = field(default_factory=list)
    core: list[int] = field(default_factory=list)

    def peel(self, S: Iterable[int], extend: Extender):
        self.peels.append((list(S), extend))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _check_assignment(g: Graph, k: int, L: ListAssignment):
    if L.n != g.n:
        raise ParameterError(f"assignment covers {L.n} vertices, graph has {g.n}")
    if not L.is_k_assignment(k):
        raise ParameterError(f"every list must have exactly {k} colors")


def _finish(
    g: Graph,
    L: ListAssignment,
    k: int,
    f: PartialColoring,
    tag: str,
    plan: _Plan | None = None,
) -> SolveOutcome:
    report = verify_certificate(g, L, f, k)
    if not report.ok:
        raise InternalConsistencyError(
            f"{tag} produced an invalid coloring: {'; '.join(report.failures())}"
        )
    if plan is None:
        return SolveOutcome(f, tag)
    return SolveOutcome(f, tag, [S for S, _ in plan.peels], list(plan.core))


def _solve_core(g: Graph, L: ListAssignment, k: int, core: list[int]) -> PartialColoring:
    sub = induced_subgraph(g, core)
    sub_L = restrict_assignment(L, core)
    verdict = exact_equitable_arborable(sub, sub_L, equity_cap(sub.n, k))
    if verdict.witness is None:
        raise InternalConsistencyError(
            f"no equitable arborable coloring of the {sub.n}-vertex base {core}"
        )
    assert sub.origin is not None
    return verdict.witness.lift(sub.origin)


def _carry_out(g: Graph, L: ListAssignment, k: int, plan: _Plan, tag: str) -> SolveOutcome:
    colored = _solve_core(g, L, k, plan.core)
    for S, extend in reversed(plan.peels):
        host = induced_subgraph(g, [*colored, *S])
        assert host.origin is not None
        local = {v: i for i, v in enumerate(host.origin)}
        f = PartialColoring({local[v]: c for v, c in colored.items()})
        h = extend(host, [local[v] for v in S], restrict_assignment(L, host.origin), f)
        colored = h.lift(host.origin)
    return _finish(g, L, k, colored, tag, plan)


def _distinct_greedy(
    seq: Sequence[int], options: dict[int, frozenset[int]], into: PartialColoring
):
    """Color `seq` in order with pairwise distinct colors, smallest first."""
    taken: set[int] = set()
    for v in seq:
        if not (free := options[v] - taken):
            raise InternalConsistencyError(f"no color left for peel vertex {v}")
        into[v] = min(free)
        taken.add(into[v])


def _peel_path(plan: _Plan, order: Sequence[int], k: int):
    rest = list(order)
    while len(rest) >= 2 * k:
        plan.peel(rest[:k], zhang_extend)
        rest = rest[k:]
    plan.core = rest


def solve_path_power(n: int, p: int, k: int, L: ListAssignment) -> SolveOutcome:
    """Equitable arborable L-coloring of the p-th power of a path, k >= p.

    Peels the first `k` path vertices while at least ``2k`` remain;
    ``|N(v_i) - S| = max(0, p - (k - i)) <= 2i - 1`` makes every peel
    extendable.

    """
    if not k >= p >= 1:
        raise ParameterError(f"path power solver needs k >= p >= 1: {p=}, {k=}")
    g = build_family(FamilySpec(Family.path_power, n=n, p=p))
    _check_assignment(g, k, L)
    plan = _Plan()
    _peel_path(plan, range(n), k)
    return _carry_out(g, L, k, plan, "path-power")


def _pminus1_extend(
    host: Graph, S: list[int], L: ListAssignment, f: PartialColoring
) -> PartialColoring:
    k = len(S) // 2
    p = k + 1
    ctx = compute_d_lists(host, S, L, f, m=2, k=k)
    vp = S[p - 1]
    if len(ctx.D[vp]) == p - 1:
        first = S[p - 1 :][::-1]
        second = S[: p - 1][::-1]
    else:
        if ctx.D[vp] != ctx.safe[vp]:
            raise InternalConsistencyError(
                f"v_p = {vp} has a short D-list with dangerous colors {sorted(ctx.dangerous[vp])}"
            )
        first = S[p:][::-1] + [S[p - 2]]
        second = [vp] + S[: p - 2][::-1]
    peel_coloring = PartialColoring()
    _distinct_greedy(first, ctx.D, peel_coloring)
    _distinct_greedy(second, ctx.safe, peel_coloring)
    return merge_colorings(host, L, ctx, peel_coloring)


def solve_path_power_pminus1(n: int, p: int, L: ListAssignment) -> SolveOutcome:
    """Equitable arborable coloring of the p-th power of a path from (p-1)-lists.

    Peels ``2p - 2`` vertices at a time; each color may appear twice on
    the peel, once from the D-lists and once from the safe lists.

    """
    if p < 3:
        raise ParameterError(f"the (p-1)-list solver needs p >= 3: {p=}")
    k = p - 1
    g = build_family(FamilySpec(Family.path_power, n=n, p=p))
    _check_assignment(g, k, L)
    plan = _Plan()
    rest = list(range(n))
    while len(rest) > 2 * k:
        plan.peel(rest[: 2 * k], _pminus1_extend)
        rest = rest[2 * k :]
    plan.core = rest
    return _carry_out(g, L, k, plan, "path-power-pminus1")


def _cycle_extend(
    host: Graph, S: list[int], L: ListAssignment, f: PartialColoring
) -> PartialColoring:
    k = len(S) // 2
    ctx = compute_d_lists(host, S, L, f, m=2, k=k)
    peel_coloring = PartialColoring()
    _distinct_greedy(S[:k], ctx.safe, peel_coloring)
    _distinct_greedy(S[k:][::-1], ctx.safe, peel_coloring)
    return merge_colorings(host, L, ctx, peel_coloring)


def solve_cycle_power(n: int, p: int, k: int, L: ListAssignment) -> SolveOutcome:
    """Equitable arborable coloring of the p-th power of a cycle, k >= p + 1.

    Removing ``v_1..v_2k`` leaves the p-th power of a path, solved first;
    both halves of the peel then get distinct safe colors.

    """
    if p < 2 or n < 2 * p + 2 or k < p + 1:
        raise ParameterError(
            f"cycle power solver needs p >= 2, n >= 2p + 2 and k >= p + 1: {n=}, {p=}, {k=}"
        )
    g = build_family(FamilySpec(Family.cycle_power, n=n, p=p))
    _check_assignment(g, k, L)
    plan = _Plan()
    if n <= 2 * k:
        plan.core = list(range(n))
    else:
        plan.peel(range(2 * k), _cycle_extend)
        _peel_path(plan, range(2 * k, n), k)
    return _carry_out(g, L, k, plan, "cycle-power")


def _live_degree(g: Graph, v: int, alive: set[int]) -> int:
    return sum(u in alive for u in g.adjacency[v])


def _walk_peel(g: Graph, rest: set[int], k: int) -> list[int]:
    """k vertices taken consecutively along paths and cycles.

    The first vertex is an endpoint when one exists, otherwise a cycle
    vertex whose successor is also taken, so it keeps at most one
    neighbor outside the peel.

    """
    left = set(rest)
    order: list[int] = []
    while len(order) < k:
        ends = [v for v in left if _live_degree(g, v, left) <= 1]
        v: int | None = min(ends) if ends else min(left)
        while v is not None and len(order) < k:
            order.append(v)
            left.discard(v)
            ahead = [u for u in g.adjacency[v] if u in left]
            v = min(ahead) if ahead else None
    return order


def _peel_low_degree(g: Graph, k: int, rest: set[int], plan: _Plan):
    while len(rest) >= 2 * k:
        S = _walk_peel(g, rest, k)
        plan.peel(S, zhang_extend)
        rest -= set(S)
    plan.core = sorted(rest)


def solve_low_degree(g: Graph, k: int, L: ListAssignment) -> SolveOutcome:
    """Graphs of maximum degree at most 2 (paths, cycles, isolated vertices)."""
    if max_degree(g) > 2:
        raise StructuralError(f"maximum degree {max_degree(g)} > 2")
    if k < 2:
        raise ParameterError(f"the low-degree solver needs k >= 2: {k=}")
    _check_assignment(g, k, L)
    plan = _Plan()
    _peel_low_degree(g, k, set(g.vertices), plan)
    return _carry_out(g, L, k, plan, "low-degree")


def _two_degenerate_peel(g: Graph, rest: set[int], k: int) -> list[int]:
    u = min(v for v in rest if 1 <= _live_degree(g, v, rest) <= 2)
    v = min(w for w in g.adjacency[u] if w in rest)
    chosen = [u]
    alive = rest - {u, v}
    for _ in range(k - 2):
        x = min(w for w in alive if _live_degree(g, w, alive) <= 2)
        chosen.append(x)
        alive.discard(x)
    return chosen + [v]


def solve_2degenerate(g: Graph, k: int, L: ListAssignment) -> SolveOutcome:
    """2-degenerate graphs with maximum degree Δ >= 3 and k >= ⌈Δ/2⌉.

    Each peel starts at a vertex `u` of degree at most 2, ends at a
    neighbor `v` of it, and is filled with low-degree vertices in between.
    Once the remainder has maximum degree 2 the low-degree peeling takes
    over.

    """
    if not is_degenerate(g, 2):
        raise StructuralError("graph is not 2-degenerate")
    delta = max_degree(g)
    if delta < 3:
        return solve_low_degree(g, k, L)
    if k < _ceil_div(delta, 2):
        raise ParameterError(f"need k >= ⌈Δ/2⌉ = {_ceil_div(delta, 2)}: {k=}")
    _check_assignment(g, k, L)
    plan = _Plan()
    rest = set(g.vertices)
    while len(rest) >= 2 * k and max(_live_degree(g, v, rest) for v in rest) >= 3:
        S = _two_degenerate_peel(g, rest, k)
        plan.peel(S, zhang_extend)
        rest -= set(S)
    _peel_low_degree(g, k, rest, plan)
    return _carry_out(g, L, k, plan, "2-degenerate")


def _least_used(colors: frozenset[int], usage: Counter[int], limit: int) -> int | None:
    """Least used color below `limit`, smallest id first on ties."""
    room = [c for c in colors if usage[c] < limit]
    return min(room, key=lambda c: (usage[c], c)) if room else None


def solve_large_k(
    g: Graph, k: int, L: ListAssignment, tag: str = "large-k"
) -> SolveOutcome:
    """Any graph with k >= n/2: classes of at most two vertices are forests."""
    cap = equity_cap(g.n, k)
    if cap > 2:
        raise ParameterError(f"greedy needs classes of at most 2 (k >= n/2): n={g.n}, {k=}")
    _check_assignment(g, k, L)
    usage: Counter[int] = Counter()
    f = PartialColoring()
    for v in g.vertices:
        c = _least_used(L[v], usage, cap)
        if c is None:
            raise InternalConsistencyError(f"every color of vertex {v} is used {cap} times")
        f[v] = c
        usage[c] += 1
    return _finish(g, L, k, f, tag)


def solve_complete(n: int, k: int, L: ListAssignment) -> SolveOutcome:
    """K_n, which is equitably k-list arborable exactly when 2k >= n."""
    if 2 * k < n:
        raise ParameterError(f"K_{n} needs k >= ⌈n/2⌉ = {_ceil_div(n, 2)}: {k=}")
    g = build_family(FamilySpec(Family.complete, n=n))
    return solve_large_k(g, k, L, tag="complete")


def solve_complete_minus_edge(n: int, k: int, L: ListAssignment) -> SolveOutcome:
    """K_n minus the edge joining its first and last vertex.

    Only odd ``n = 2l + 1`` with ``k = l`` allows classes of three.  Then
    ``v_1..v_2l`` are colored greedily with every color used at most
    twice, and ``v_n`` takes a color used at most once, or else the color
    of its non-neighbor ``v_1`` (a three-vertex path).

    """
    if n < 3:
        raise ParameterError(f"K_n - e solver needs n >= 3: {n=}")
    if k < _ceil_div(n - 1, 2):
        raise ParameterError(f"need k >= ⌈(n-1)/2⌉ = {_ceil_div(n - 1, 2)}: {k=}")
    g = build_family(FamilySpec(Family.complete_minus_edge, n=n))
    _check_assignment(g, k, L)
    if equity_cap(n, k) <= 2:
        return solve_large_k(g, k, L, tag="complete-minus-edge")
    usage: Counter[int] = Counter()
    f = PartialColoring()
    for v in range(n - 1):
        if (c := _least_used(L[v], usage, 2)) is None:
            raise InternalConsistencyError(f"all colors of vertex {v} already used twice")
        f[v] = c
        usage[c] += 1
    last = n - 1
    if (c := _least_used(L[last], usage, 2)) is None:
        # every color of v_n covers two vertices, so v_1's color is among them
        c = f[0]
    f[last] = c
    return _finish(g, L, k, f, "complete-minus-edge")


def solve_regular_small(g: Graph, k: int, L: ListAssignment) -> SolveOutcome:
    """2l-regular graphs on 2l + 2 vertices, l >= 2, with k >= l.

    Any arborable coloring is equitable here: a class of four or more
    vertices has minimum degree at least two inside it.

    """
    n = g.n
    if n < 6 or n % 2 or any(g.degree(v) != n - 2 for v in g.vertices):
        raise ParameterError("expected a 2l-regular graph on 2l + 2 vertices, l >= 2")
    ell = (n - 2) // 2
    if k < ell:
        raise ParameterError(f"need k >= l = {ell}: {k=}")
    _check_assignment(g, k, L)
    if equity_cap(n, k) <= 2:
        return solve_large_k(g, k, L, tag="regular-small")
    verdict = exact_equitable_arborable(g, L, cap=n)
    if verdict.witness is None:
        raise InternalConsistencyError(
            f"no arborable coloring for lists {[sorted(lst) for lst in L.lists]}"
        )
    f = verdict.witness
    if (largest := max(map(len, color_classes(f).values()))) > 3:
        raise InternalConsistencyError(f"arborable coloring with a class of {largest}")
    return _finish(g, L, k, f, "regular-small")


class ConjectureBounds(NamedTuple):
    general: int
    stronger: int
    excepted: bool


def conjecture_bounds(g: Graph) -> ConjectureBounds:
    """⌈(Δ+1)/2⌉, ⌈Δ/2⌉, and whether g is a cycle or an odd complete graph."""
    delta = max_degree(g)
    excepted = is_cycle(g) or (is_complete(g) and g.n % 2 == 1)
    return ConjectureBounds(_ceil_div(delta + 1, 2), _ceil_div(delta, 2), excepted)


def _family_params(g: Graph, family: Family, *keys: str) -> tuple[int, ...]:
    if g.family_name != family.value:
        raise ParameterError(
            f"strategy needs a {family.value} graph, got {g.family_name}"
        )
    assert g.family is not None
    params = tuple(int(g.family[key]) for key in keys)
    spec = FamilySpec(family, **dict(zip(keys, params)))
    if build_family(spec) != g:
        raise ParameterError(f"graph does not match its {family.value} tag")
    return params


def pick_strategy(g: Graph, k: int) -> str:
    """The strategy `auto` resolves to for this graph and list size."""
    fam = g.family or {}
    match g.family_name:
        case "path_power" if k >= fam["p"]:
            return "path-power"
        case "path_power" if fam["p"] >= 3 and k == fam["p"] - 1:
            return "path-power-pminus1"
        case "cycle_power" if (
            fam["p"] >= 2 and k >= fam["p"] + 1 and g.n >= 2 * fam["p"] + 2
        ):
            return "cycle-power"
        case "complete_minus_edge" if g.n >= 3 and k >= _ceil_div(g.n - 1, 2):
            return "complete-minus-edge"
        case "complete" if 2 * k >= g.n:
            return "complete"
        case "cocktail_party" if g.n >= 6 and k >= (g.n - 2) // 2:
            return "regular-small"
        case "complete_bipartite":
            return "bipartite"
    if 2 * k >= g.n:
        return "large-k"
    delta = max_degree(g)
    if delta <= 2 and k >= 2:
        return "low-degree"
    if delta >= 3 and 2 * k >= delta and is_degenerate(g, 2):
        return "2-degenerate"
    return "exact"


def solve(
    g: Graph,
    k: int,
    L: ListAssignment,
    strategy: str = "auto",
    budget: SearchBudget = SearchBudget(),
) -> SolveOutcome:
    """Route to the solver for `strategy`; `auto` dispatches on the family tag.

    Raises
    ------
    Infeasible
        The exact routes proved that this assignment has no valid coloring.
    BudgetExhausted
        An exact route ran out of budget.

    """
    if strategy == "auto":
        strategy = pick_strategy(g, k)
    match strategy:
        case "path-power":
            n, p = _family_params(g, Family.path_power, "n", "p")
            return solve_path_power(n, p, k, L)
        case "path-power-pminus1":
            n, p = _family_params(g, Family.path_power, "n", "p")
            if k != p - 1:
                raise ParameterError(f"(p-1)-list solver needs k = p - 1 = {p - 1}: {k=}")
            return solve_path_power_pminus1(n, p, L)
        case "cycle-power":
            n, p = _family_params(g, Family.cycle_power, "n", "p")
            return solve_cycle_power(n, p, k, L)
        case "complete-minus-edge":
            (n,) = _family_params(g, Family.complete_minus_edge, "n")
            return solve_complete_minus_edge(n, k, L)
        case "complete":
            (n,) = _family_params(g, Family.complete, "n")
            return solve_complete(n, k, L)
        case "regular-small":
            return solve_regular_small(g, k, L)
        case "2-degenerate":
            return solve_2degenerate(g, k, L)
        case "low-degree":
            return solve_low_degree(g, k, L)
        case "large-k":
            return solve_large_k(g, k, L)
        case "bipartite":
            from arboreq.bipartite import BipartiteInstance, Refutation, solve_bipartite_exact

            a, b = _family_params(g, Family.complete_bipartite, "a", "b")
            _check_assignment(g, k, L)
            result = solve_bipartite_exact(
                BipartiteInstance(a, b, L), k, equity_cap(g.n, k), budget
            )
            if isinstance(result, Refutation):
                raise Infeasible(f"K_{a},{b}: {result.reason}", refutation=result)
            return result
        case "exact":
            _check_assignment(g, k, L)
            verdict = exact_equitable_arborable(g, L, equity_cap(g.n, k), budget)
            match verdict.status:
                case Status.unknown:
                    raise BudgetExhausted(verdict.reason)
                case Status.infeasible:
                    raise Infeasible(
                        f"no equitable arborable coloring ({verdict.nodes} nodes searched)",
                        refutation=verdict,
                    )
            assert verdict.witness is not None
            return _finish(g, L, k, verdict.witness, "exact")
        case _:
            raise ParameterError(f"unknown strategy {strategy!r}, pick one of {STRATEGIES}")
