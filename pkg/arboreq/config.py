from copy import deepcopy
import os
from typing import Any

from rich.console import Console
import tomlkit
from tomlkit.exceptions import ParseError

from arboreq import ErrorCodes, format_exc

# fmt: off
_CONF: dict[str, Any] = {
    "budget_secs": 600.0,   # per decision, overridden by ARBOREQ_BUDGET_SECS
    "node_limit": 0,        # search nodes per decision, 0 is unlimited
    "universe": 0,          # colors to draw lists from, 0 means 2k
    "jobs": 1,              # worker processes for reproduce and decide
    "seed": 0,              # base seed for every random draw
    "samples": 500,         # random assignments per large reproduce claim
}
# fmt: on

ENV_BUDGET = "ARBOREQ_BUDGET_SECS"

console = Console()


def read_toml(path: str) -> dict:
    with open(path, mode="r", newline="") as toml_file:
        return tomlkit.load(toml_file)


def write_toml(data: dict, path: str):
    with open(path, mode="w", newline="") as toml_file:
        tomlkit.dump(data, toml_file)


def _coerce(key: str, value: Any) -> Any:
    """Value of `key` converted to the type of its default."""
    expected = type(_CONF[key])
    value = value.unwrap() if hasattr(value, "unwrap") else value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"'tool.arboreq.{key}' must be a number, got {value!r}")
    if expected is int and not isinstance(value, int):
        raise TypeError(f"'tool.arboreq.{key}' must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"'tool.arboreq.{key}' must not be negative, got {value!r}")
    return expected(value)


def read_conf(path: str | None = None, /) -> dict[str, Any]:
    """Defaults overlaid with the ``[tool.arboreq]`` table of `path`.

    A missing file or table leaves the defaults; unknown keys and values
    of the wrong type end the program with the precondition exit code.

    """
    CONF = deepcopy(_CONF)
    config: dict = {}
    if path is not None and os.path.exists(path):
        try:
            doc = read_toml(path)
        except ParseError as err:
            console.print(format_exc(err, f"Invalid TOML in {path!r}"))
            ErrorCodes.PRECONDITION_ERR.exit()
        if "tool" in doc and "arboreq" in doc["tool"]:
            config = doc["tool"]["arboreq"]

    if unknown := [key for key in config if key not in _CONF]:
        console.print(f"[b]Unknown keys in 'tool.arboreq': {', '.join(unknown)}")
        ErrorCodes.PRECONDITION_ERR.exit()

    error_count = 0
    for key, value in config.items():
        try:
            CONF[key] = _coerce(key, value)
        except (TypeError, ValueError) as err:
            console.print(format_exc(err))
            error_count += 1
    if error_count > 0:
        ErrorCodes.PRECONDITION_ERR.exit()

    if (budget := os.environ.get(ENV_BUDGET)) is not None:
        try:
            CONF["budget_secs"] = _coerce("budget_secs", float(budget))
        except ValueError as err:
            console.print(format_exc(err, f"Invalid {ENV_BUDGET}={budget!r}"))
            ErrorCodes.PRECONDITION_ERR.exit()
    return CONF
