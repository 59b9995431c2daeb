"""Graph representation, family builders and structural predicates.

Vertices are dense integers ``0..n-1``.  The family builders fix the
orderings the inductive constructions rely on: path powers are numbered in
path order and cycle powers in cyclic order, so peel sets are index ranges.

"""

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import combinations
import json
from pathlib import Path
import random
from typing import Any, Iterable, Iterator

import networkx as nx

from arboreq import ParameterError, StructuralError
from arboreq.unionfind import UnionFind


class Family(Enum):
    path_power = "path_power"
    cycle_power = "cycle_power"
    complete = "complete"
    complete_minus_edge = "complete_minus_edge"
    complete_bipartite = "complete_bipartite"
    cocktail_party = "cocktail_party"
    union = "union"
    custom = "custom"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with sorted adjacency lists.

    `family` is the provenance tag (e.g. ``{"name": "path_power", "n": 5,
    "p": 2}``), `origin` maps each vertex to its id in the graph it was
    induced from, and `boundaries` holds the first vertex of every operand
    of a disjoint union.

    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    family: dict[str, Any] | None = field(default=None, compare=False)
    origin: tuple[int, ...] | None = field(default=None, compare=False)
    boundaries: tuple[int, ...] = field(default=(), compare=False)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @property
    def family_name(self) -> str:
        return self.family["name"] if self.family else Family.custom.value

    @cached_property
    def _adjsets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(nbrs) for nbrs in self.adjacency)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._adjsets[u]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges `(u, v)` with ``u < v`` in lexicographic order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield u, v

    @cached_property
    def num_edges(self) -> int:
        return sum(map(len, self.adjacency)) // 2


def from_edges(
    n: int,
    edges: Iterable[tuple[int, int]] | Iterable[list[int]],
    family: dict[str, Any] | None = None,
) -> Graph:
    """Build a graph from an edge list; duplicate edges collapse."""
    if n < 0:
        raise ParameterError(f"vertex count must be non-negative: {n=}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for edge in edges:
        if not isinstance(edge, (tuple, list)) or len(edge) != 2 or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in edge
        ):
            raise ParameterError(f"edge {edge!r} is not a pair of vertex ids")
        u, v = edge
        if not (0 <= u < n and 0 <= v < n):
            raise ParameterError(f"edge {u}-{v} out of range for {n=}")
        if u == v:
            raise ParameterError(f"self-loop at vertex {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    return Graph(n, adjacency, family=family)


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    n: int = 0
    p: int = 0
    a: int = 0
    b: int = 0
    parts: tuple[Graph, ...] = ()


def _check_positive(**params: int):
    if bad := {k: v for k, v in params.items() if v < 1}:
        raise ParameterError(f"parameters must be positive: {bad}")


def build_family(spec: FamilySpec) -> Graph:
    """Build a member of one of the supported graph families."""
    n, p = spec.n, spec.p
    match spec.family:
        case Family.path_power:
            _check_positive(n=n, p=p)
            edges = [(u, v) for u in range(n) for v in range(u + 1, min(u + p, n - 1) + 1)]
            tag = {"name": spec.family.value, "n": n, "p": p}
        case Family.cycle_power:
            _check_positive(n=n, p=p)
            if n < 3:
                raise ParameterError(f"cycle power needs n >= 3: {n=}")
            edges = [
                (u, v)
                for u, v in combinations(range(n), 2)
                if min(v - u, n - (v - u)) <= p
            ]
            tag = {"name": spec.family.value, "n": n, "p": p}
        case Family.complete:
            _check_positive(n=n)
            edges = list(combinations(range(n), 2))
            tag = {"name": spec.family.value, "n": n}
        case Family.complete_minus_edge:
            _check_positive(n=n)
            if n < 2:
                raise ParameterError(f"K_n - e needs n >= 2: {n=}")
            # the missing edge joins the first and the last vertex
            edges = [e for e in combinations(range(n), 2) if e != (0, n - 1)]
            tag = {"name": spec.family.value, "n": n}
        case Family.complete_bipartite:
            _check_positive(a=spec.a, b=spec.b)
            a, b = spec.a, spec.b
            edges = [(x, y) for x in range(a) for y in range(a, a + b)]
            tag = {"name": spec.family.value, "a": a, "b": b}
            n = a + b
        case Family.cocktail_party:
            _check_positive(n=n)
            if n % 2:
                raise ParameterError(f"cocktail party graph needs even n: {n=}")
            edges = [(u, v) for u, v in combinations(range(n), 2) if v != u + 1 or u % 2]
            tag = {"name": spec.family.value, "n": n}
        case Family.union:
            if not spec.parts:
                raise ParameterError("disjoint union needs at least one operand")
            return disjoint_union(*spec.parts)
        case _:
            raise ParameterError(f"no builder for family {spec.family.value!r}")
    return from_edges(n, edges, family=tag)


def disjoint_union(*parts: Graph) -> Graph:
    """Disjoint union; each operand is shifted by the size of those before it."""
    offset, edges, boundaries, tags = 0, [], [], []
    for part in parts:
        boundaries.append(offset)
        edges.extend((u + offset, v + offset) for u, v in part.edges())
        tags.append(part.family or {"name": Family.custom.value})
        offset += part.n
    g = from_edges(offset, edges, family={"name": Family.union.value, "of": tags})
    return Graph(g.n, g.adjacency, g.family, boundaries=tuple(boundaries))


def induced_subgraph(g: Graph, s: Iterable[int]) -> Graph:
    """G[S], relabeled ``0..|S|-1`` in increasing order of the original ids.

    The original id of new vertex `i` is ``origin[i]``.

    """
    keep = sorted(set(s))
    if keep and not (0 <= keep[0] and keep[-1] < g.n):
        raise ParameterError(f"vertex set not within 0..{g.n - 1}: {keep}")
    index = {v: i for i, v in enumerate(keep)}
    adjacency = tuple(
        tuple(index[u] for u in g.adjacency[v] if u in index) for v in keep
    )
    return Graph(
        len(keep),
        adjacency,
        family={"name": Family.custom.value},
        origin=tuple(keep),
    )


def find_cycle(g: Graph, members: Iterable[int] | None = None) -> list[int] | None:
    """A cycle of G[members] as a vertex list, or `None` if it is a forest."""
    vs = g.vertices if members is None else members
    inside = set(vs)
    uf = UnionFind(g.n)
    forest: dict[int, list[int]] = {v: [] for v in inside}
    for u in sorted(inside):
        for v in g.adjacency[u]:
            if v <= u or v not in inside:
                continue
            if uf.union(u, v):
                forest[u].append(v)
                forest[v].append(u)
                continue
            # u and v already joined: the tree path between them closes a cycle
            parent = {u: u}
            queue = deque([u])
            while queue:
                w = queue.popleft()
                if w == v:
                    break
                for x in forest[w]:
                    if x not in parent:
                        parent[x] = w
                        queue.append(x)
            cycle = [v]
            while cycle[-1] != u:
                cycle.append(parent[cycle[-1]])
            return cycle
    return None


def is_forest(g: Graph) -> bool:
    uf = UnionFind(g.n)
    return all(uf.union(u, v) for u, v in g.edges())


def max_degree(g: Graph) -> int:
    return max(map(len, g.adjacency), default=0)


def remove_low_degree_vertex(g: Graph, bound: int) -> tuple[int, Graph]:
    """The smallest vertex of degree at most `bound`, and `g` without it.

    The returned graph carries `origin`, mapping its vertices back to `g`.

    Raises
    ------
    StructuralError
        If every vertex has degree above `bound`.

    """
    if g.n == 0:
        raise ParameterError("cannot remove a vertex from the empty graph")
    for v in g.vertices:
        if g.degree(v) <= bound:
            return v, induced_subgraph(g, (u for u in g.vertices if u != v))
    raise StructuralError(f"no vertex of degree <= {bound}: not {bound}-degenerate here")


def degeneracy(g: Graph) -> int:
    """Largest minimum degree met while peeling minimum-degree vertices."""
    degree = [g.degree(v) for v in g.vertices]
    alive = set(g.vertices)
    result = 0
    while alive:
        v = min(alive, key=lambda u: (degree[u], u))
        result = max(result, degree[v])
        alive.remove(v)
        for u in g.adjacency[v]:
            if u in alive:
                degree[u] -= 1
    return result


def is_degenerate(g: Graph, d: int) -> bool:
    return degeneracy(g) <= d


def components(g: Graph) -> list[list[int]]:
    """Connected components, each sorted, ordered by smallest vertex."""
    seen: set[int] = set()
    result = []
    for root in g.vertices:
        if root in seen:
            continue
        seen.add(root)
        comp, queue = [], deque([root])
        while queue:
            v = queue.popleft()
            comp.append(v)
            for u in g.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        result.append(sorted(comp))
    return result


def is_cycle(g: Graph) -> bool:
    return g.n >= 3 and all(g.degree(v) == 2 for v in g.vertices) and len(components(g)) == 1


def is_complete(g: Graph) -> bool:
    return all(g.degree(v) == g.n - 1 for v in g.vertices)


def to_networkx(g: Graph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(g.vertices)
    G.add_edges_from(g.edges())
    return G


def from_networkx(G: nx.Graph, family: dict[str, Any] | None = None) -> Graph:
    index = {v: i for i, v in enumerate(sorted(G.nodes))}
    return from_edges(len(index), ((index[u], index[v]) for u, v in G.edges), family)


def to_json(g: Graph) -> str:
    data: dict[str, Any] = {"n": g.n, "edges": [list(e) for e in g.edges()]}
    if g.family is not None:
        data["family"] = g.family
    return json.dumps(data)


def from_json(text: str) -> Graph:
    try:
        data = json.loads(text)
        n, edges = data["n"], data["edges"]
    except (json.JSONDecodeError, KeyError, TypeError) as err:
        raise ParameterError(f"malformed graph JSON: {err}") from err
    if not isinstance(n, int) or not isinstance(edges, list):
        raise ParameterError("malformed graph JSON: 'n' must be an integer and 'edges' a list")
    return from_edges(n, edges, family=data.get("family"))


def read_graph(path: str | Path) -> Graph:
    return from_json(Path(path).read_text())


def write_graph(g: Graph, path: str | Path):
    Path(path).write_text(to_json(g) + "\n")


def to_dot(g: Graph, colors: dict[int, int] | None = None) -> str:
    """DOT text: vertices in order, then edges in lexicographic order."""
    lines = ["graph G {"]
    for v in g.vertices:
        if colors is not None and v in colors:
            lines.append(f'  {v} [label="{v}:{colors[v]}"];')
        else:
            lines.append(f"  {v};")
    lines.extend(f"  {u} -- {v};" for u, v in g.edges())
    lines.append("}")
    return "\n".join(lines) + "\n"


def random_2degenerate(n: int, seed: int, max_degree: int | None = None) -> Graph:
    """Random 2-degenerate graph: an edge, then vertices attached to <= 2 others.

    With `max_degree` set, attachments only go to vertices below that degree.

    """
    if n < 2:
        raise ParameterError(f"need at least two vertices: {n=}")
    rng = random.Random(seed)
    degree = [0] * n
    edges = [(0, 1)]
    degree[0] = degree[1] = 1
    for v in range(2, n):
        pool = [u for u in range(v) if max_degree is None or degree[u] < max_degree]
        for u in rng.sample(pool, min(len(pool), rng.randint(1, 2))):
            edges.append((u, v))
            degree[u] += 1
            degree[v] += 1
    return from_edges(n, edges, family={"name": Family.custom.value, "seed": seed})


def random_bounded_degree(
    n: int, seed: int, max_degree: int = 4, max_full: int = 3
) -> Graph:
    """Random graph with at most `max_full` vertices of degree `max_degree`.

    Candidate edges are visited in a seeded random order and kept whenever
    both bounds still hold afterwards.

    """
    rng = random.Random(seed)
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    degree = [0] * n
    full = 0
    edges = []
    for u, v in pairs:
        if degree[u] >= max_degree or degree[v] >= max_degree:
            continue
        reach = (degree[u] + 1 == max_degree) + (degree[v] + 1 == max_degree)
        if full + reach > max_full:
            continue
        edges.append((u, v))
        degree[u] += 1
        degree[v] += 1
        full += reach
    return from_edges(n, edges, family={"name": Family.custom.value, "seed": seed})


def _labeled_regular(n: int, d: int) -> Iterator[list[tuple[int, int]]]:
    """d-regular edge sets on `n` vertices with vertex 0 adjacent to 1..d.

    Every d-regular graph has such a labeling, so this covers all of them up
    to isomorphism.

    """
    need = [d] * n
    edges = [(0, v) for v in range(1, d + 1)]
    need[0] = 0
    for v in range(1, d + 1):
        need[v] -= 1

    def extend(v: int):
        if v == n:
            yield list(edges)
            return
        if need[v] == 0:
            yield from extend(v + 1)
            return
        candidates = [u for u in range(v + 1, n) if need[u] > 0]
        for chosen in combinations(candidates, need[v]):
            for u in chosen:
                need[u] -= 1
                edges.append((v, u))
            saved, need[v] = need[v], 0
            yield from extend(v + 1)
            need[v] = saved
            for u in chosen:
                need[u] += 1
                edges.pop()

    if d < n:
        yield from extend(1)


def enumerate_regular(n: int, d: int, connected_only: bool = True) -> list[Graph]:
    """All d-regular graphs on `n` vertices, one per isomorphism class.

    Works on complements (degree ``n - 1 - d``), which are sparse for the
    dense regular graphs of interest.

    """
    if not (0 <= d < n) or (n * d) % 2:
        return []
    e = n - 1 - d
    found: list[nx.Graph] = []
    hashes: list[str] = []
    for edges in _labeled_regular(n, e):
        H = nx.complement(nx.Graph(edges)) if edges else nx.complete_graph(n)
        H.add_nodes_from(range(n))
        if connected_only and not nx.is_connected(H):
            continue
        h = nx.weisfeiler_lehman_graph_hash(H)
        if any(h == h2 and nx.is_isomorphic(H, G2) for h2, G2 in zip(hashes, found)):
            continue
        found.append(H)
        hashes.append(h)
    tag = {"name": Family.custom.value, "regular": d}
    return [from_networkx(H, dict(tag, index=i)) for i, H in enumerate(found)]
