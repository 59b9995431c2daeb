import pytest

from arboreq import ErrorCodes, HypothesisViolation, Infeasible, format_exc


@pytest.mark.parametrize(
    "name,val", [(name, val) for val, name in enumerate(ErrorCodes._member_names_, 1)]
)
def test_errors(name, val, capsys):
    err = getattr(ErrorCodes, name)
    assert err == val

    with pytest.raises(SystemExit, match=f"{val}"):
        err.exit("test message")

    captured = capsys.readouterr()
    assert f"{name}: test message" in captured.err


def test_format_exc():
    err = format_exc(ValueError("bad input"), "while parsing")
    assert "ValueError:" in err
    assert "bad input" in err
    assert "while parsing" in err


def test_hypothesis_violation_clause():
    exc = HypothesisViolation("usage", "color 3 used twice")
    assert exc.clause == "usage"
    assert "[usage]" in str(exc)


def test_infeasible_carries_refutation():
    exc = Infeasible("nope", refutation={"nodes": 4})
    assert exc.refutation == {"nodes": 4}
