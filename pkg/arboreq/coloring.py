"""List assignments, colorings and the verification predicates.

Colors are non-negative integers; equality is the only operation ever
applied to them.  Verification failures are reported, not raised, and an
arborability failure carries a witness cycle inside the offending class.

"""

from collections import defaultdict
from dataclasses import asdict, dataclass, field
import json
from pathlib import Path
import random
from typing import Any, Iterable

from arboreq import ParameterError
from arboreq.graph import Graph, find_cycle

SCHEMA = 1


@dataclass(frozen=True)
class ListAssignment:
    lists: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, lists: Iterable[Iterable[int]]) -> "ListAssignment":
        return cls(tuple(frozenset(lst) for lst in lists))

    @property
    def n(self) -> int:
        return len(self.lists)

    def __getitem__(self, v: int) -> frozenset[int]:
        return self.lists[v]

    @property
    def k(self) -> int | None:
        """Common list size, or `None` when the sizes differ."""
        sizes = set(map(len, self.lists))
        return sizes.pop() if len(sizes) == 1 else None

    def is_k_assignment(self, k: int) -> bool:
        return all(len(lst) == k for lst in self.lists)

    def palette(self) -> list[int]:
        return sorted(set().union(*self.lists))

    def holders(self, colors: Iterable[int]) -> list[int]:
        """L^{-1}(A): vertices whose list meets `colors`."""
        wanted = set(colors)
        return [v for v, lst in enumerate(self.lists) if lst & wanted]


class PartialColoring(dict[int, int]):
    """Partial map vertex -> color."""

    def classes(self) -> dict[int, list[int]]:
        return color_classes(self)

    def is_total(self, n: int) -> bool:
        return len(self) == n and all(v in self for v in range(n))

    def lift(self, origin: tuple[int, ...]) -> "PartialColoring":
        """Rename vertices through an `origin` map of an induced subgraph."""
        return PartialColoring({origin[v]: c for v, c in self.items()})

    def restrict(self, keep: Iterable[int]) -> "PartialColoring":
        return PartialColoring({v: self[v] for v in keep if v in self})


def color_classes(f: dict[int, int]) -> dict[int, list[int]]:
    classes: defaultdict[int, list[int]] = defaultdict(list)
    for v in sorted(f):
        classes[f[v]].append(v)
    return dict(sorted(classes.items()))


@dataclass
class VerificationReport:
    list_respected: bool = True
    arborable: bool = True
    total: bool = True
    equitable: bool = True
    cap: int = 0
    max_class_size: int = 0
    offending_class: int | None = None
    offending_cycle: list[int] | None = None
    over_cap_class: int | None = None
    missing: list[int] = field(default_factory=list)
    off_list: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.list_respected and self.arborable and self.total and self.equitable

    def to_dict(self) -> dict[str, Any]:
        return {**asdict(self), "ok": self.ok}

    def failures(self) -> list[str]:
        msgs = []
        if not self.total:
            msgs.append(f"uncolored vertices: {self.missing}")
        if not self.list_respected:
            msgs.append(f"colors outside their lists at: {self.off_list}")
        if not self.arborable:
            msgs.append(
                f"class {self.offending_class} contains the cycle {self.offending_cycle}"
            )
        if not self.equitable:
            msgs.append(
                f"class {self.over_cap_class} has {self.max_class_size} > {self.cap} vertices"
            )
        return msgs


def equity_cap(n: int, k: int) -> int:
    """⌈n/k⌉, the largest class size an equitable coloring may use."""
    if k < 1 or n < 0:
        raise ParameterError(f"equity cap needs n >= 0 and k >= 1: {n=}, {k=}")
    return -(-n // k)


def verify_arborable_L_coloring(
    g: Graph, L: ListAssignment, f: dict[int, int], require_total: bool = True
) -> VerificationReport:
    if L.n != g.n:
        raise ParameterError(f"assignment covers {L.n} vertices, graph has {g.n}")
    if bad := [v for v in f if not 0 <= v < g.n]:
        raise ParameterError(f"coloring domain outside the graph: {bad}")
    report = VerificationReport()
    report.off_list = [v for v in sorted(f) if f[v] not in L[v]]
    report.list_respected = not report.off_list
    if require_total:
        report.missing = [v for v in g.vertices if v not in f]
        report.total = not report.missing
    classes = color_classes(f)
    report.max_class_size = max(map(len, classes.values()), default=0)
    if (k := L.k) is not None and g.n:
        report.cap = equity_cap(g.n, k)
    for c, members in classes.items():
        if cycle := find_cycle(g, members):
            report.arborable = False
            report.offending_class = c
            report.offending_cycle = cycle
            break
    return report


def verify_equitable(g: Graph, k: int, f: dict[int, int]) -> VerificationReport:
    report = VerificationReport(cap=equity_cap(g.n, k))
    classes = color_classes(f)
    report.missing = [v for v in g.vertices if v not in f]
    report.total = not report.missing
    if classes:
        largest = max(classes, key=lambda c: (len(classes[c]), -c))
        report.max_class_size = len(classes[largest])
        if report.max_class_size > report.cap:
            report.equitable = False
            report.over_cap_class = largest
    return report


def verify_equitable_vertex_partition(g: Graph, k: int, f: dict[int, int]) -> bool:
    """Exactly `k` forest classes (empty ones included) of sizes ⌊n/k⌋ or ⌈n/k⌉."""
    if not PartialColoring(f).is_total(g.n):
        return False
    classes = color_classes(f)
    if len(classes) > k:
        return False
    sizes = sorted([len(m) for m in classes.values()] + [0] * (k - len(classes)))
    q, r = divmod(g.n, k)
    if sizes != [q] * (k - r) + [q + 1] * r:
        return False
    return all(find_cycle(g, members) is None for members in classes.values())


def verify_certificate(
    g: Graph, L: ListAssignment, f: dict[int, int], k: int
) -> VerificationReport:
    """All checks at once: total, list-respecting, arborable, equitable."""
    report = verify_arborable_L_coloring(g, L, f, require_total=True)
    equity = verify_equitable(g, k, f)
    report.cap = equity.cap
    report.equitable = equity.equitable
    report.over_cap_class = equity.over_cap_class
    report.max_class_size = equity.max_class_size
    return report


def restrict_assignment(L: ListAssignment, keep: Iterable[int]) -> ListAssignment:
    """L restricted to `keep`, relabeled like `induced_subgraph`."""
    kept = sorted(set(keep))
    if kept and not (0 <= kept[0] and kept[-1] < L.n):
        raise ParameterError(f"vertex set not within 0..{L.n - 1}: {kept}")
    return ListAssignment(tuple(L[v] for v in kept))


def constant_assignment(n: int, colors: Iterable[int]) -> ListAssignment:
    lst = frozenset(colors)
    return ListAssignment((lst,) * n)


def random_assignment(n: int, k: int, universe: int, seed: int) -> ListAssignment:
    """k-subsets of ``range(universe)`` drawn independently per vertex."""
    if universe < k:
        raise ParameterError(f"universe smaller than list size: {universe=} < {k=}")
    rng = random.Random(seed)
    return ListAssignment.of(rng.sample(range(universe), k) for _ in range(n))


def assignment_to_json(L: ListAssignment) -> str:
    return json.dumps({"lists": {str(v): sorted(lst) for v, lst in enumerate(L.lists)}})


def assignment_from_dict(data: dict[str, Any]) -> ListAssignment:
    try:
        lists = data["lists"]
        return ListAssignment.of(lists[str(v)] for v in range(len(lists)))
    except (KeyError, TypeError) as err:
        raise ParameterError(f"malformed list assignment: {err!r}") from err


def assignment_from_json(text: str) -> ListAssignment:
    try:
        return assignment_from_dict(json.loads(text))
    except json.JSONDecodeError as err:
        raise ParameterError(f"malformed list assignment JSON: {err}") from err


def coloring_to_json(f: dict[int, int]) -> str:
    return json.dumps({"colors": {str(v): f[v] for v in sorted(f)}})


def coloring_from_dict(data: dict[str, Any]) -> PartialColoring:
    try:
        return PartialColoring({int(v): int(c) for v, c in data["colors"].items()})
    except (AttributeError, KeyError, TypeError, ValueError) as err:
        raise ParameterError(f"malformed coloring: {err!r}") from err


def coloring_from_json(text: str) -> PartialColoring:
    try:
        return coloring_from_dict(json.loads(text))
    except json.JSONDecodeError as err:
        raise ParameterError(f"malformed coloring JSON: {err}") from err


def certificate_to_json(
    f: dict[int, int],
    report: VerificationReport,
    k: int,
    L: ListAssignment | None = None,
    **extra: Any,
) -> str:
    data: dict[str, Any] = {
        "schema": SCHEMA,
        "k": k,
        "colors": {str(v): f[v] for v in sorted(f)},
        "report": report.to_dict(),
        **extra,
    }
    if L is not None:
        data["lists"] = {str(v): sorted(lst) for v, lst in enumerate(L.lists)}
    return json.dumps(data, indent=2)


def read_json(path: str | Path) -> dict[str, Any]:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ParameterError(f"{path}: invalid JSON: {err}") from err
