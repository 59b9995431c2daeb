from itertools import product

import networkx as nx
import pytest

from arboreq import ParameterError
from arboreq.bipartite import profile_oracle
from arboreq.coloring import (
    ListAssignment,
    constant_assignment,
    equity_cap,
    random_assignment,
    verify_equitable_vertex_partition,
)
from arboreq.graph import Family, FamilySpec, build_family, from_networkx
from arboreq.oracle import (
    SearchBudget,
    Status,
    all_assignments,
    canonical_assignments,
    decide_equitable_vertex_arborable,
    decide_equitably_k_list_arborable,
    exact_equitable_arborable,
)

from .conftest import nx_certificate_ok


def fam(family: Family, **params):
    return build_family(FamilySpec(family, **params))


def test_k5_constant_lists():
    k5 = fam(Family.complete, n=5)
    verdict = exact_equitable_arborable(k5, constant_assignment(5, (0, 1)), cap=3)
    assert verdict.status is Status.infeasible
    assert verdict.witness is None
    assert verdict.to_dict()["status"] == "Infeasible"


def test_k5_minus_edge_constant_lists():
    g = fam(Family.complete_minus_edge, n=5)
    L = constant_assignment(5, (0, 1))
    verdict = exact_equitable_arborable(g, L, cap=3)
    assert verdict.feasible
    assert nx_certificate_ok(g, L, verdict.witness, 2)
    assert verdict.to_dict()["colors"] == {str(v): c for v, c in sorted(verdict.witness.items())}


@pytest.mark.parametrize("seed", range(10))
def test_witness_is_valid(seed):
    g = fam(Family.path_power, n=8, p=2)
    L = random_assignment(8, 2, 4, seed)
    verdict = exact_equitable_arborable(g, L, equity_cap(8, 2))
    assert verdict.feasible
    assert nx_certificate_ok(g, L, verdict.witness, 2)


def test_budget_exhausted():
    g = fam(Family.complete, n=7)
    verdict = exact_equitable_arborable(
        g, constant_assignment(7, (0, 1, 2)), cap=3, budget=SearchBudget(node_limit=5)
    )
    assert verdict.status is Status.unknown
    assert "node limit" in verdict.reason
    assert not verdict.feasible


def test_size_mismatch():
    with pytest.raises(ParameterError):
        exact_equitable_arborable(fam(Family.complete, n=3), constant_assignment(2, (0,)), 2)


@pytest.mark.parametrize(
    "g,k,status",
    [
        (fam(Family.complete, n=4), 2, Status.feasible),
        (fam(Family.complete, n=5), 2, Status.infeasible),
        (fam(Family.complete_bipartite, a=9, b=9), 2, Status.feasible),
        (fam(Family.complete_bipartite, a=9, b=9), 3, Status.infeasible),
        (fam(Family.complete_bipartite, a=4, b=15), 3, Status.infeasible),
        (fam(Family.cycle_power, n=6, p=2), 2, Status.feasible),
    ],
)
def test_vertex_arborable(g, k, status):
    verdict = decide_equitable_vertex_arborable(g, k)
    assert verdict.status is status
    if verdict.feasible:
        assert verify_equitable_vertex_partition(g, k, verdict.witness)


@pytest.mark.parametrize("a,b,k", product(range(1, 5), range(1, 6), (2, 3)))
def test_vertex_arborable_matches_profiles(a, b, k):
    g = fam(Family.complete_bipartite, a=a, b=b)
    verdict = decide_equitable_vertex_arborable(g, k)
    expected = profile_oracle(a, b, k, equity_cap(a + b, k), exact_sizes=True).feasible
    assert verdict.feasible == expected


def test_canonical_assignments():
    canon = list(canonical_assignments(3, 2, 6))
    everything = set(all_assignments(3, 2, 6))
    assert len(canon) < len(everything)
    assert set(canon) <= everything
    assert canon[0] == constant_assignment(3, (0, 1))
    # every assignment is a relabeling of a canonical one
    shapes = {
        tuple(sorted(len(L[u] & L[v]) for u in range(3) for v in range(u))) for L in canon
    }
    for L in everything:
        assert tuple(sorted(len(L[u] & L[v]) for u in range(3) for v in range(u))) in shapes


def test_decide_k_list():
    verdict = decide_equitably_k_list_arborable(fam(Family.complete, n=3), 2, 6)
    assert verdict.feasible
    assert verdict.complete
    assert verdict.checked == len(list(canonical_assignments(3, 2, 6)))

    verdict = decide_equitably_k_list_arborable(fam(Family.complete, n=5), 2, 2)
    assert verdict.status is Status.infeasible
    assert not verdict.complete
    assert verdict.refuted_assignment == constant_assignment(5, (0, 1))
    assert verdict.to_dict()["lists"]["0"] == [0, 1]


SMALL_GRAPHS = [
    from_networkx(G) for G in nx.graph_atlas_g() if 1 <= G.number_of_nodes() <= 4
]


@pytest.mark.parametrize("g", SMALL_GRAPHS, ids=lambda g: f"n{g.n}m{g.num_edges}")
def test_canonical_pruning_agrees(g):
    pruned = decide_equitably_k_list_arborable(g, 2, 4, canonical=True)
    full = decide_equitably_k_list_arborable(g, 2, 4, canonical=False)
    assert pruned.status is full.status
    assert pruned.checked <= full.checked


@pytest.mark.parametrize(
    "g,status",
    [
        (fam(Family.complete, n=5), Status.infeasible),
        (fam(Family.complete_minus_edge, n=5), Status.feasible),
    ],
)
def test_canonical_pruning_agrees_on_five_vertices(g, status):
    pruned = decide_equitably_k_list_arborable(g, 2, 4, canonical=True)
    full = decide_equitably_k_list_arborable(g, 2, 4, canonical=False)
    assert pruned.status is full.status is status
    for verdict in (pruned, full):
        if verdict.refuted_assignment is not None:
            again = exact_equitable_arborable(g, verdict.refuted_assignment, 3)
            assert again.status is Status.infeasible


@pytest.mark.parametrize(
    "g,k,universe",
    [
        (fam(Family.complete, n=3), 2, 6),
        (fam(Family.complete, n=5), 2, 4),
        (fam(Family.path_power, n=5, p=2), 2, 4),
    ],
)
def test_decide_k_list_in_parallel(g, k, universe):
    alone = decide_equitably_k_list_arborable(g, k, universe)
    pooled = decide_equitably_k_list_arborable(g, k, universe, jobs=2)
    assert pooled.status is alone.status
    assert pooled.checked == alone.checked
    assert pooled.refuted_assignment == alone.refuted_assignment


def test_decide_k_list_errors():
    with pytest.raises(ParameterError):
        decide_equitably_k_list_arborable(fam(Family.complete, n=3), 0, 3)
    with pytest.raises(ParameterError):
        decide_equitably_k_list_arborable(fam(Family.complete, n=3), 3, 2)


def test_decide_k_list_budget():
    verdict = decide_equitably_k_list_arborable(
        fam(Family.path_power, n=6, p=2), 2, 12, SearchBudget(node_limit=3)
    )
    assert verdict.status is Status.unknown
    assert verdict.checked >= 1


def test_assignment_type():
    assert all(isinstance(L, ListAssignment) for L in canonical_assignments(2, 1, 2))
    assert [sorted(map(sorted, L.lists)) for L in canonical_assignments(2, 1, 2)] == [
        [[0], [0]],
        [[0], [1]],
    ]
