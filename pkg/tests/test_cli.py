import json

import pytest
from typer.testing import CliRunner

from arboreq import ErrorCodes
from arboreq.__main__ import cli
from arboreq.coloring import assignment_to_json, constant_assignment
from arboreq.graph import Family, FamilySpec, build_family, from_json

runner = CliRunner()


def fam(family: Family, **params):
    return build_family(FamilySpec(family, **params))


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    """Run every command away from the project pyproject.toml."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("ARBOREQ_BUDGET_SECS", raising=False)


def test_gen(tmp_path):
    out = tmp_path / "g.json"
    result = runner.invoke(
        cli, ["gen", "--family", "path-power", "--n", "6", "--p", "2", "-o", f"{out}"]
    )
    assert result.exit_code == 0
    assert from_json(out.read_text()) == fam(Family.path_power, n=6, p=2)

    result = runner.invoke(cli, ["gen", "--family", "complete-bipartite", "--a", "2", "--b", "3"])
    assert result.exit_code == 0
    assert json.loads(result.output)["family"] == {"name": "complete_bipartite", "a": 2, "b": 3}


def test_gen_union(graph_file, tmp_path):
    one = graph_file(fam(Family.complete, n=3), "one.json")
    two = graph_file(fam(Family.path_power, n=4, p=1), "two.json")
    out = tmp_path / "union.json"
    result = runner.invoke(
        cli, ["gen", "--family", "union", "--of", f"{one},{two}", "-o", f"{out}"]
    )
    assert result.exit_code == 0
    g = from_json(out.read_text())
    assert g.n == 7 and g.num_edges == 6
    assert g.family_name == "union"


def test_gen_bad_parameters():
    result = runner.invoke(cli, ["gen", "--family", "path-power", "--n", "0", "--p", "2"])
    assert result.exit_code == ErrorCodes.PRECONDITION_ERR

    result = runner.invoke(cli, ["gen", "--family", "union", "--of", "missing.json"])
    assert result.exit_code == 2
    assert "missing.json does not exist" in result.output


def test_solve_and_verify(graph_file, tmp_path):
    graph = graph_file(fam(Family.path_power, n=10, p=2))
    cert = tmp_path / "cert.json"
    context = tmp_path / "context.json"
    result = runner.invoke(
        cli,
        ["solve", f"{graph}", "--k", "2", "--seed", "3", "-o", f"{cert}", "-v"]
        + ["--dump-context", f"{context}"],
    )
    assert result.exit_code == 0
    assert "path-power" in result.output
    assert "peel" in result.output
    data = json.loads(cert.read_text())
    assert data["report"]["ok"]
    assert data["strategy"] == "path-power"
    assert json.loads(context.read_text())["peel"] == [0, 1]

    result = runner.invoke(cli, ["verify", f"{graph}", f"{cert}"])
    assert result.exit_code == 0


def test_solve_with_lists(graph_file, tmp_path):
    graph = graph_file(fam(Family.complete_minus_edge, n=5))
    lists = tmp_path / "lists.json"
    lists.write_text(assignment_to_json(constant_assignment(5, (0, 1))))
    result = runner.invoke(cli, ["solve", f"{graph}", "--lists", f"{lists}"])
    assert result.exit_code == 0
    assert json.loads(result.output)["colors"] == {"0": 0, "1": 1, "2": 0, "3": 1, "4": 0}


def test_verify_monochrome_cycle(graph_file, tmp_path):
    graph = graph_file(fam(Family.complete_bipartite, a=2, b=2))
    cert = tmp_path / "cert.json"
    cert.write_text(
        json.dumps(
            {
                "colors": {str(v): 0 for v in range(4)},
                "lists": {str(v): [0, 1] for v in range(4)},
            }
        )
    )
    result = runner.invoke(cli, ["verify", f"{graph}", f"{cert}"])
    assert result.exit_code == ErrorCodes.VERIFY_ERR
    assert "cycle" in result.output


def test_verify_over_cap(graph_file, tmp_path):
    graph = graph_file(fam(Family.path_power, n=4, p=1))
    cert = tmp_path / "cert.json"
    cert.write_text(json.dumps({"colors": {str(v): 0 for v in range(4)}}))
    lists = tmp_path / "lists.json"
    lists.write_text(assignment_to_json(constant_assignment(4, (0, 1))))
    result = runner.invoke(cli, ["verify", f"{graph}", f"{cert}", "--lists", f"{lists}"])
    assert result.exit_code == ErrorCodes.VERIFY_ERR
    assert "class 0 has 4" in result.output

    result = runner.invoke(cli, ["verify", f"{graph}", f"{cert}"])
    assert result.exit_code == ErrorCodes.PRECONDITION_ERR


def test_solve_precondition_failure(graph_file):
    graph = graph_file(fam(Family.path_power, n=6, p=2))
    result = runner.invoke(cli, ["solve", f"{graph}", "--k", "2", "--strategy", "complete"])
    assert result.exit_code == ErrorCodes.PRECONDITION_ERR
    result = runner.invoke(cli, ["solve", f"{graph}"])
    assert result.exit_code == ErrorCodes.PRECONDITION_ERR


def test_solve_infeasible(graph_file, tmp_path):
    graph = graph_file(fam(Family.complete, n=5))
    lists = tmp_path / "lists.json"
    lists.write_text(assignment_to_json(constant_assignment(5, (0, 1))))
    result = runner.invoke(cli, ["solve", f"{graph}", "--lists", f"{lists}"])
    assert result.exit_code == ErrorCodes.VERIFY_ERR


def test_missing_graph(tmp_path):
    result = runner.invoke(cli, ["solve", f"{tmp_path / 'nope.json'}", "--k", "2"])
    assert result.exit_code == 2


def test_solve_bipartite(tmp_path):
    cert = tmp_path / "cert.json"
    result = runner.invoke(
        cli, ["solve", "--bipartite", "1", "5", "--k", "2", "--seed", "1", "-o", f"{cert}"]
    )
    assert result.exit_code == 0
    data = json.loads(cert.read_text())
    assert data["strategy"] == "bipartite"
    assert data["report"]["ok"]
    assert len(data["colors"]) == 6


@pytest.mark.parametrize("extra", [[], ["--bipartite", "2", "2"]])
def test_solve_needs_one_graph(graph_file, extra):
    args = [f"{graph_file(fam(Family.complete, n=3))}"] if extra else []
    result = runner.invoke(cli, ["solve", *args, *extra, "--k", "2"])
    assert result.exit_code == ErrorCodes.PRECONDITION_ERR
    assert "--bipartite" in result.output


def test_verify_short_lists(graph_file, tmp_path):
    graph = graph_file(fam(Family.path_power, n=4, p=1))
    cert = tmp_path / "cert.json"
    cert.write_text(json.dumps({"colors": {"0": 0, "1": 1, "2": 0, "3": 1}}))
    lists = tmp_path / "lists.json"
    lists.write_text(assignment_to_json(constant_assignment(3, (0, 1))))
    result = runner.invoke(cli, ["verify", f"{graph}", f"{cert}", "--lists", f"{lists}"])
    assert result.exit_code == ErrorCodes.PRECONDITION_ERR
    assert "covers 3 vertices" in result.output


def test_decide(graph_file):
    k3 = graph_file(fam(Family.complete, n=3), "k3.json")
    result = runner.invoke(cli, ["decide", f"{k3}", "--k", "2", "--universe", "2"])
    assert result.exit_code == 0
    assert "INCOMPLETE" in result.output
    assert "Feasible" in result.output

    result = runner.invoke(cli, ["decide", f"{k3}", "--k", "2", "--universe", "6"])
    assert result.exit_code == 0
    assert "INCOMPLETE" not in result.output

    k5 = graph_file(fam(Family.complete, n=5), "k5.json")
    result = runner.invoke(cli, ["decide", f"{k5}", "--k", "2", "--vertex"])
    assert result.exit_code == ErrorCodes.VERIFY_ERR
    assert "Infeasible" in result.output


def test_decide_bipartite():
    result = runner.invoke(cli, ["decide", "--bipartite", "9", "9", "--k", "2", "--vertex"])
    assert result.exit_code == 0
    assert json.loads(result.output)["feasible"]

    result = runner.invoke(cli, ["decide", "--bipartite", "9", "9", "--k", "3", "--vertex"])
    assert result.exit_code == ErrorCodes.VERIFY_ERR
    assert json.loads(result.output) == {"feasible": False, "profile": None}

    result = runner.invoke(cli, ["decide", "--bipartite", "4", "15", "--k", "3"])
    assert result.exit_code == 0
    profile = json.loads(result.output)["profile"]
    assert [sum(pair[0] for pair in profile), sum(pair[1] for pair in profile)] == [4, 15]


def test_decide_in_parallel(graph_file):
    k3 = graph_file(fam(Family.complete, n=3), "k3.json")
    args = ["decide", f"{k3}", "--k", "2", "--universe", "4"]
    sequential = runner.invoke(cli, args)
    pooled = runner.invoke(cli, [*args, "--jobs", "2"])
    assert sequential.exit_code == pooled.exit_code == 0
    assert "Feasible" in pooled.output


def test_decide_out_of_budget(graph_file, tmp_path):
    conf = tmp_path / "arboreq.toml"
    conf.write_text("[tool.arboreq]\nnode_limit = 3\n")
    graph = graph_file(fam(Family.path_power, n=6, p=2))
    result = runner.invoke(cli, ["decide", f"{graph}", "--k", "2", "--conf", f"{conf}"])
    assert result.exit_code == ErrorCodes.UNKNOWN_ERR
    assert "Unknown" in result.output


def test_bad_config(graph_file, tmp_path):
    conf = tmp_path / "arboreq.toml"
    conf.write_text("[tool.arboreq]\ncolour = 3\n")
    graph = graph_file(fam(Family.complete, n=3))
    result = runner.invoke(cli, ["decide", f"{graph}", "--k", "2", "--conf", f"{conf}"])
    assert result.exit_code == ErrorCodes.PRECONDITION_ERR
    assert "Unknown keys" in result.output


def test_reproduce(tmp_path):
    out = tmp_path / "claims.json"
    result = runner.invoke(cli, ["reproduce", "--subset", "k9-9", "--json", f"{out}"])
    assert result.exit_code == 0
    assert "PASS" in result.output
    lines = json.loads(out.read_text())
    assert [line["claim_id"] for line in lines] == ["k9-9-two", "k9-9-three"]
    assert all(line["status"] == "PASS" for line in lines)


@pytest.mark.parametrize(
    "args",
    [
        ["--subset", "k9-9", "--all"],
        [],
        ["--subset", "no-such-claim"],
    ],
)
def test_reproduce_usage(args):
    result = runner.invoke(cli, ["reproduce", *args])
    assert result.exit_code == 2


def test_reproduce_by_section_ref(tmp_path):
    out = tmp_path / "claims.json"
    result = runner.invoke(cli, ["reproduce", "--subset", "sec1.2", "--json", f"{out}"])
    assert result.exit_code == 0
    lines = json.loads(out.read_text())
    assert [line["claim_id"] for line in lines] == ["k9-9-two", "k9-9-three"]
    assert {line["paper_ref"] for line in lines} == {"sec1.2"}


def test_export_dot(graph_file, tmp_path):
    graph = graph_file(fam(Family.path_power, n=3, p=1))
    colors = tmp_path / "colors.json"
    colors.write_text(json.dumps({"colors": {"0": 0, "1": 1, "2": 0}}))
    result = runner.invoke(cli, ["export-dot", f"{graph}", "--coloring", f"{colors}"])
    assert result.exit_code == 0
    assert result.output.startswith("graph G {")
    assert '1 [label="1:1"];' in result.output
    assert "0 -- 1;" in result.output
