from pathlib import Path

import networkx as nx
import pytest

from arboreq.coloring import ListAssignment, equity_cap
from arboreq.config import read_conf
from arboreq.graph import Graph, to_networkx, write_graph


@pytest.fixture
def conf(tmp_path, monkeypatch):
    """Defaults with small sample counts, independent of the working directory."""
    monkeypatch.delenv("ARBOREQ_BUDGET_SECS", raising=False)
    CONF = read_conf(f"{tmp_path / 'absent.toml'}")
    CONF.update(samples=3, budget_secs=120.0)
    return CONF


@pytest.fixture
def graph_file(tmp_path):
    """Writes a graph to a JSON file in `tmp_path` and returns the path."""

    def _write(g: Graph, name: str = "graph.json") -> Path:
        path = tmp_path / name
        write_graph(g, path)
        return path

    return _write


def nx_certificate_ok(g: Graph, L: ListAssignment, f: dict[int, int], k: int) -> bool:
    """Independent check of an equitable arborable L-coloring with networkx."""
    if sorted(f) != list(g.vertices):
        return False
    if any(f[v] not in L[v] for v in g.vertices):
        return False
    G = to_networkx(g)
    cap = equity_cap(g.n, k)
    for c in set(f.values()):
        members = [v for v in g.vertices if f[v] == c]
        if len(members) > cap or not nx.is_forest(G.subgraph(members)):
            return False
    return True
