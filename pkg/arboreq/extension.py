"""Extending an equitable arborable coloring of G - S onto a peel set S.

Given a coloring `f` of ``G - S``, every peel vertex `v` gets a D-list:
its list minus the colors already held by two or more of its neighbors.
A color of the D-list is *dangerous* for `v` when exactly one neighbor
holds it and *safe* when none does.  A coloring of `S` drawn from the
D-lists merges with `f` into an equitable arborable coloring of `G` as
long as no color is used more than `m` times on `S`, no color has two
dangerous holders, and the classes stay acyclic inside ``G[S]``.

"""

from collections import Counter
from dataclasses import dataclass
import json
from typing import Any, Sequence

from arboreq import (
    HypothesisViolation,
    InternalConsistencyError,
    ParameterError,
    PreconditionError,
)
from arboreq.coloring import (
    ListAssignment,
    PartialColoring,
    color_classes,
    equity_cap,
    verify_certificate,
)
from arboreq.graph import Graph, find_cycle
from arboreq.unionfind import UnionFind


@dataclass(frozen=True)
class ExtensionContext:
    peel: tuple[int, ...]
    m: int
    k: int
    D: dict[int, frozenset[int]]
    dangerous: dict[int, frozenset[int]]
    safe: dict[int, frozenset[int]]
    base_coloring: PartialColoring
    outside_degree: dict[int, int]
    relaxed: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "peel": list(self.peel),
            "m": self.m,
            "k": self.k,
            "relaxed": self.relaxed,
            "vertices": {
                str(v): {
                    "D": sorted(self.D[v]),
                    "dangerous": sorted(self.dangerous[v]),
                    "safe": sorted(self.safe[v]),
                    "outside_degree": self.outside_degree[v],
                }
                for v in self.peel
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check_peel(g: Graph, S: Sequence[int]):
    if len(set(S)) != len(S):
        raise ParameterError(f"peel set has repeated vertices: {list(S)}")
    if bad := [v for v in S if not 0 <= v < g.n]:
        raise ParameterError(f"peel vertices outside the graph: {bad}")


def compute_d_lists(
    g: Graph,
    S: Sequence[int],
    L: ListAssignment,
    f: dict[int, int],
    m: int,
    k: int | None = None,
    relaxed: bool = False,
) -> ExtensionContext:
    """Build the D-lists of the peel set `S` against the base coloring `f`.

    Parameters
    ----------
    g : Graph
    S : Sequence[int]
        Peel vertices, in peel order.
    L : ListAssignment
        A k-assignment for `g`.
    f : dict[int, int]
        Coloring of exactly the vertices outside `S`.
    m : int
        How many times a color may be used on `S`.
    k : int, optional
        List size, taken from `L` when omitted.
    relaxed : bool
        Accept ``|S| < m * k``.

    Raises
    ------
    PreconditionError
        When `f` does not color exactly ``V(G) - S`` or `S` has the wrong size.
    InternalConsistencyError
        When the guaranteed lower bounds on the D-list sizes fail.

    """
    _check_peel(g, S)
    k = L.k if k is None else k
    if k is None or not L.is_k_assignment(k):
        raise ParameterError("the list assignment must have lists of one common size")
    if m < 1:
        raise ParameterError(f"need m >= 1: {m=}")
    if L.n != g.n:
        raise ParameterError(f"assignment covers {L.n} vertices, graph has {g.n}")
    if len(S) > m * k or (len(S) < m * k and not relaxed):
        raise PreconditionError(
            f"peel set has {len(S)} vertices, expected {m * k} (m={m}, k={k})"
        )
    peel = set(S)
    if colored := sorted(peel.intersection(f)):
        raise PreconditionError(f"base coloring already colors peel vertices {colored}")
    if missing := [v for v in g.vertices if v not in peel and v not in f]:
        raise PreconditionError(f"base coloring is not total on G - S, missing {missing}")

    D, dangerous, safe, outside = {}, {}, {}, {}
    for v in S:
        around = Counter(f[u] for u in g.adjacency[v] if u not in peel)
        outside[v] = sum(around.values())
        D[v] = frozenset(c for c in L[v] if around[c] < 2)
        dangerous[v] = frozenset(c for c in L[v] if around[c] == 1)
        safe[v] = frozenset(c for c in L[v] if around[c] == 0)
        t = outside[v]
        if len(D[v]) < k - t // 2 or len(safe[v]) < k - t:
            raise InternalConsistencyError(
                f"D-list bounds fail at vertex {v}: |D|={len(D[v])}, "
                f"|safe|={len(safe[v])}, k={k}, outside degree {t}"
            )
    return ExtensionContext(
        peel=tuple(S),
        m=m,
        k=k,
        D=D,
        dangerous=dangerous,
        safe=safe,
        base_coloring=PartialColoring(f),
        outside_degree=outside,
        relaxed=len(S) < m * k,
    )


def check_peel_coloring(g: Graph, ctx: ExtensionContext, peel_coloring: dict[int, int]):
    """Raise `HypothesisViolation` naming the first merge hypothesis that fails."""
    if set(peel_coloring) != set(ctx.peel):
        raise HypothesisViolation(
            "total", f"peel coloring must color exactly {sorted(ctx.peel)}"
        )
    for v in ctx.peel:
        if peel_coloring[v] not in ctx.D[v]:
            raise HypothesisViolation(
                "d-list", f"vertex {v} colored {peel_coloring[v]} outside D = {sorted(ctx.D[v])}"
            )
    for c, members in color_classes(peel_coloring).items():
        if len(members) > ctx.m:
            raise HypothesisViolation(
                "usage", f"color {c} used {len(members)} > {ctx.m} times on {members}"
            )
        if len(holders := [v for v in members if c in ctx.dangerous[v]]) > 1:
            raise HypothesisViolation(
                "dangerous", f"color {c} is dangerous for several of its holders {holders}"
            )
        if cycle := find_cycle(g, members):
            raise HypothesisViolation("forest", f"color {c} closes the cycle {cycle} in G[S]")


def merge_colorings(
    g: Graph, L: ListAssignment, ctx: ExtensionContext, peel_coloring: dict[int, int]
) -> PartialColoring:
    """h = f + g, re-verified as an equitable arborable L-coloring of `g`."""
    check_peel_coloring(g, ctx, peel_coloring)
    h = PartialColoring(ctx.base_coloring)
    h.update(peel_coloring)
    report = verify_certificate(g, L, h, ctx.k)
    if not report.ok:
        msg = "; ".join(report.failures())
        if ctx.relaxed:
            raise HypothesisViolation("equity", f"relaxed merge does not verify: {msg}")
        raise InternalConsistencyError(f"merged coloring does not verify: {msg}")
    return h


def find_peel_coloring(g: Graph, ctx: ExtensionContext) -> PartialColoring | None:
    """First peel coloring satisfying every merge hypothesis, or `None`.

    Vertices are tried in peel order and colors in ascending order;
    `None` means the search was exhaustive.  `g` is the host graph, only
    its edges inside the peel set matter.

    """
    peel = ctx.peel
    index = {v: i for i, v in enumerate(peel)}
    inner = [[index[u] for u in g.adjacency[v] if u in index] for v in peel]
    uf = UnionFind(len(peel))
    chosen: list[int | None] = [None] * len(peel)
    usage: Counter[int] = Counter()
    dangerous_holder: dict[int, int] = {}

    def fits(i: int, c: int) -> bool:
        if usage[c] >= ctx.m:
            return False
        if c in ctx.dangerous[peel[i]] and c in dangerous_holder:
            return False
        roots = set()
        for j in inner[i]:
            if chosen[j] == c:
                if (root := uf.find(j)) in roots:
                    return False
                roots.add(root)
        return True

    def search(i: int) -> bool:
        if i == len(peel):
            return True
        v = peel[i]
        for c in sorted(ctx.D[v]):
            if not fits(i, c):
                continue
            mark = uf.mark()
            for j in inner[i]:
                if chosen[j] == c:
                    uf.union(i, j)
            chosen[i] = c
            usage[c] += 1
            if danger := c in ctx.dangerous[v]:
                dangerous_holder[c] = v
            if search(i + 1):
                return True
            if danger:
                del dangerous_holder[c]
            usage[c] -= 1
            chosen[i] = None
            uf.rollback(mark)
        return False

    if not search(0):
        return None
    return PartialColoring({v: c for v, c in zip(peel, chosen) if c is not None})


def zhang_extend(
    g: Graph, S: Sequence[int], L: ListAssignment, f: dict[int, int]
) -> PartialColoring:
    """Extend `f` onto ``S = (x_1, ..., x_k)`` with pairwise distinct colors.

    Requires ``|N(x_i) - S| <= 2i - 1``; then ``|D(x_i)| >= k - i + 1`` and
    coloring ``x_k`` down to ``x_1`` greedily never runs out of colors.

    Raises
    ------
    PreconditionError
        If the degree condition fails for some `x_i`.

    """
    _check_peel(g, S)
    if (k := L.k) is None:
        raise ParameterError("the list assignment must have lists of one common size")
    if len(S) != k:
        raise PreconditionError(f"peel set must have k={k} vertices, got {len(S)}")
    peel = set(S)
    for i, v in enumerate(S, start=1):
        t = sum(u not in peel for u in g.adjacency[v])
        if t > 2 * i - 1:
            raise PreconditionError(
                f"x_{i} = {v} has {t} neighbors outside S, more than {2 * i - 1}"
            )
    ctx = compute_d_lists(g, S, L, f, m=1, k=k)
    taken: set[int] = set()
    peel_coloring = PartialColoring()
    for v in reversed(S):
        free = ctx.D[v] - taken
        if not free:
            raise InternalConsistencyError(f"no D-list color left for peel vertex {v}")
        peel_coloring[v] = min(free)
        taken.add(peel_coloring[v])
    return merge_colorings(g, L, ctx, peel_coloring)


def extension_cap(n: int, k: int, m: int) -> int:
    """Class size bound on G - S when ``|S| = m * k``: ``⌈n/k⌉ - m``."""
    return equity_cap(n, k) - m
