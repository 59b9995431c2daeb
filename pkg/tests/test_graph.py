from hypothesis import given, settings
from hypothesis import strategies as st
import networkx as nx
import pytest

from arboreq import ParameterError, StructuralError
from arboreq.graph import (
    Family,
    FamilySpec,
    Graph,
    build_family,
    components,
    degeneracy,
    disjoint_union,
    enumerate_regular,
    find_cycle,
    from_edges,
    from_json,
    induced_subgraph,
    is_complete,
    is_cycle,
    is_degenerate,
    is_forest,
    max_degree,
    random_2degenerate,
    random_bounded_degree,
    remove_low_degree_vertex,
    to_dot,
    to_json,
    to_networkx,
)


def fam(family: Family, **params) -> Graph:
    return build_family(FamilySpec(family, **params))


@pytest.mark.parametrize(
    "family,params,n,m",
    [
        (Family.path_power, {"n": 3, "p": 5}, 3, 3),
        (Family.path_power, {"n": 5, "p": 2}, 5, 7),
        (Family.cycle_power, {"n": 6, "p": 2}, 6, 12),
        (Family.cycle_power, {"n": 9, "p": 3}, 9, 27),
        (Family.complete, {"n": 5}, 5, 10),
        (Family.complete_minus_edge, {"n": 5}, 5, 9),
        (Family.complete_bipartite, {"a": 11, "b": 17}, 28, 187),
        (Family.cocktail_party, {"n": 6}, 6, 12),
    ],
)
def test_build_family(family, params, n, m):
    g = fam(family, **params)
    assert g.n == n
    assert g.num_edges == m
    assert g.family_name == family.value


def test_family_shapes():
    assert is_complete(fam(Family.path_power, n=3, p=5))
    c62 = fam(Family.cycle_power, n=6, p=2)
    assert {c62.degree(v) for v in c62.vertices} == {4}
    k5e = fam(Family.complete_minus_edge, n=5)
    assert sorted((k5e.degree(v) for v in k5e.vertices), reverse=True) == [4, 4, 4, 3, 3]
    assert not k5e.has_edge(0, 4)
    kab = fam(Family.complete_bipartite, a=2, b=3)
    assert kab.neighbors(0) == (2, 3, 4)
    assert max_degree(fam(Family.cycle_power, n=9, p=3)) == 6
    assert nx.is_isomorphic(to_networkx(c62), to_networkx(fam(Family.cocktail_party, n=6)))


@pytest.mark.parametrize(
    "family,params",
    [
        (Family.path_power, {"n": 0, "p": 2}),
        (Family.cycle_power, {"n": 2, "p": 1}),
        (Family.complete_bipartite, {"a": 0, "b": 3}),
        (Family.cocktail_party, {"n": 5}),
        (Family.union, {}),
    ],
)
def test_build_family_errors(family, params):
    with pytest.raises(ParameterError):
        fam(family, **params)


def test_disjoint_union():
    g = disjoint_union(fam(Family.complete, n=3), fam(Family.path_power, n=4, p=1))
    assert g.n == 7
    assert g.boundaries == (0, 3)
    assert sorted(g.edges()) == [(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (5, 6)]
    assert components(g) == [[0, 1, 2], [3, 4, 5, 6]]
    assert g.family["name"] == "union"


@pytest.mark.parametrize(
    "g,s,edges",
    [
        (fam(Family.complete, n=4), [0, 1], [(0, 1)]),
        (fam(Family.cycle_power, n=5, p=1), [1, 2, 3], [(0, 1), (1, 2)]),
        (
            fam(Family.cycle_power, n=8, p=2),
            [0, 1, 2, 3],
            [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
        ),
    ],
)
def test_induced_subgraph(g, s, edges):
    sub = induced_subgraph(g, s)
    assert list(sub.edges()) == edges
    assert sub.origin == tuple(sorted(s))


def test_induced_subgraph_out_of_range():
    with pytest.raises(ParameterError):
        induced_subgraph(fam(Family.complete, n=3), [0, 5])


def test_is_forest():
    assert is_forest(from_edges(1, []))
    assert not is_forest(fam(Family.complete, n=3))
    assert is_forest(fam(Family.path_power, n=10, p=1))


def test_find_cycle():
    g = fam(Family.complete_bipartite, a=2, b=2)
    cycle = find_cycle(g)
    assert cycle is not None and sorted(cycle) == [0, 1, 2, 3]
    assert all(g.has_edge(u, v) for u, v in zip(cycle, cycle[1:] + cycle[:1]))
    assert find_cycle(g, [0, 2, 3]) is None


@settings(max_examples=50)
@given(st.integers(2, 9), st.data())
def test_find_cycle_matches_networkx(n, data):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True))
    g = from_edges(n, edges)
    cycle = find_cycle(g)
    assert (cycle is None) == nx.is_forest(to_networkx(g))
    if cycle is not None:
        assert len(set(cycle)) == len(cycle) >= 3
        assert all(g.has_edge(u, v) for u, v in zip(cycle, cycle[1:] + cycle[:1]))


def test_remove_low_degree_vertex():
    v, rest = remove_low_degree_vertex(fam(Family.path_power, n=5, p=1), 1)
    assert v == 0
    assert rest.n == 4 and rest.origin == (1, 2, 3, 4)
    with pytest.raises(StructuralError):
        remove_low_degree_vertex(fam(Family.complete, n=4), 2)


@given(st.integers(2, 30), st.integers(0, 10**6))
def test_random_2degenerate(n, seed):
    g = random_2degenerate(n, seed)
    assert g.n == n
    assert is_degenerate(g, 2)
    while g.n:
        _, g = remove_low_degree_vertex(g, 2)


@given(st.integers(4, 14), st.integers(0, 10**6))
def test_random_bounded_degree(n, seed):
    g = random_bounded_degree(n, seed)
    degrees = [g.degree(v) for v in g.vertices]
    assert max(degrees) <= 4
    assert degrees.count(4) <= 3


def test_degeneracy():
    assert degeneracy(fam(Family.complete, n=5)) == 4
    assert degeneracy(fam(Family.path_power, n=8, p=2)) == 2
    assert degeneracy(from_edges(3, [])) == 0


def test_predicates():
    assert is_cycle(fam(Family.cycle_power, n=7, p=1))
    assert not is_cycle(disjoint_union(*[fam(Family.complete, n=3)] * 2))
    assert is_complete(fam(Family.complete, n=4))
    assert not is_complete(fam(Family.complete_minus_edge, n=4))


@pytest.mark.parametrize("n,d,count", [(6, 4, 1), (7, 4, 2), (8, 4, 6), (5, 2, 1), (7, 3, 0)])
def test_enumerate_regular(n, d, count):
    graphs = enumerate_regular(n, d)
    assert len(graphs) == count
    for g in graphs:
        assert {g.degree(v) for v in g.vertices} == {d}
        assert nx.is_connected(to_networkx(g))
    for g, h in zip(graphs, graphs[1:]):
        assert not nx.is_isomorphic(to_networkx(g), to_networkx(h))


def test_json_and_dot():
    g = fam(Family.path_power, n=4, p=2)
    h = from_json(to_json(g))
    assert h == g
    assert h.family == {"name": "path_power", "n": 4, "p": 2}
    dot = to_dot(g, {0: 3})
    assert dot.startswith("graph G {")
    assert '0 [label="0:3"];' in dot
    assert "  2 -- 3;" in dot


@pytest.mark.parametrize(
    "text",
    [
        "{",
        '{"n": 2}',
        '{"n": 2, "edges": [[0, 5]]}',
        '{"n": 2, "edges": [["0", 1]]}',
        '{"n": 2, "edges": [[0.5, 1]]}',
        '{"n": 2, "edges": [0, 1]}',
        '{"n": 3, "edges": [[0, 1, 2]]}',
        '{"n": "2", "edges": []}',
        '{"n": 2, "edges": {"0": 1}}',
    ],
)
def test_from_json_errors(text):
    with pytest.raises(ParameterError):
        from_json(text)
