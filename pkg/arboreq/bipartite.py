"""Complete bipartite graphs K_{a,b}.

Side X is vertices ``0..a-1`` and side Y is ``a..a+b-1``.  A color class
of K_{a,b} induces a forest exactly when it has at most one vertex on one
of the two sides, so everything here works with per-color side counts
instead of cycles.

"""

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from importlib import resources
import json
from typing import NamedTuple

import networkx as nx

from arboreq import InternalConsistencyError, ParameterError, PreconditionError
from arboreq.coloring import ListAssignment, PartialColoring, verify_arborable_L_coloring
from arboreq.graph import Family, FamilySpec, Graph, build_family
from arboreq.oracle import SearchBudget
from arboreq.solvers import SolveOutcome

X, Y = "X", "Y"


@dataclass(frozen=True)
class BipartiteInstance:
    a: int
    b: int
    L: ListAssignment

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ParameterError(f"both sides must be nonempty: a={self.a}, b={self.b}")
        if self.L.n != self.a + self.b:
            raise ParameterError(
                f"assignment covers {self.L.n} vertices, K_{self.a},{self.b} has {self.a + self.b}"
            )

    @property
    def n(self) -> int:
        return self.a + self.b

    def side(self, v: int) -> str:
        return X if v < self.a else Y

    def members(self, side: str) -> range:
        return range(self.a) if side == X else range(self.a, self.n)

    def eta(self, side: str, c: int) -> int:
        """How many lists on `side` contain `c`."""
        return sum(c in self.L[v] for v in self.members(side))

    def graph(self) -> Graph:
        return build_family(FamilySpec(Family.complete_bipartite, a=self.a, b=self.b))


@dataclass(frozen=True)
class ClassProfile:
    """Per-color pairs ``(a_c, b_c)`` of X- and Y-counts."""

    counts: tuple[tuple[int, int], ...]

    @property
    def arborable(self) -> bool:
        return all(min(pair) <= 1 for pair in self.counts)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(x + y for x, y in self.counts)


class ProfileVerdict(NamedTuple):
    feasible: bool
    witness: ClassProfile | None


@dataclass
class Obstruction:
    """Three or more Y-vertices whose lists meet the two heavy colors."""

    heavy: tuple[int, int]
    witnesses: list[int]


@dataclass
class Refutation:
    a: int
    b: int
    cap: int
    reason: str
    nodes: int = 0


@dataclass
class SplitOutcome:
    coloring: PartialColoring
    sides: dict[int, str]
    leftovers: list[int]
    expectation: Fraction
    within_bound: bool = True


def profile_of(inst: BipartiteInstance, f: dict[int, int]) -> dict[int, tuple[int, int]]:
    counts: dict[int, list[int]] = {}
    for v, c in f.items():
        counts.setdefault(c, [0, 0])[inst.side(v) == Y] += 1
    return {c: (x, y) for c, (x, y) in sorted(counts.items())}


def bipartite_arborable_check(inst: BipartiteInstance, f: dict[int, int]) -> bool:
    """True when every class has at most one vertex on some side."""
    if missing := [v for v in range(inst.n) if v not in f]:
        raise ParameterError(f"coloring is not total, missing {missing}")
    return all(min(pair) <= 1 for pair in profile_of(inst, f).values())


def profile_oracle(a: int, b: int, k: int, cap: int, exact_sizes: bool) -> ProfileVerdict:
    """Is there an arborable class profile for K_{a,b} with `k` shared colors?

    With `exact_sizes` the class sizes must be the equitable multiset
    (``(a+b) mod k`` classes of ``⌈(a+b)/k⌉``, the rest ``⌊(a+b)/k⌋``);
    otherwise every class is at most `cap`.

    """
    if k < 1 or cap < 0:
        raise ParameterError(f"need k >= 1 and cap >= 0: {k=}, {cap=}")
    q, r = divmod(a + b, k)

    def sizes(big_left: int) -> list[tuple[int, int]]:
        if not exact_sizes:
            return [(s, big_left) for s in range(cap + 1)]
        options = [(q, big_left)]
        if big_left:
            options.append((q + 1, big_left - 1))
        return options

    @cache
    def place(
        i: int, left_x: int, left_y: int, big_left: int
    ) -> tuple[tuple[int, int], ...] | None:
        if i == k:
            return () if left_x == left_y == 0 and (not exact_sizes or big_left == 0) else None
        for size, rest_big in sizes(big_left):
            for x in range(min(left_x, size), -1, -1):
                y = size - x
                if y > left_y or min(x, y) > 1:
                    continue
                if (tail := place(i + 1, left_x - x, left_y - y, rest_big)) is not None:
                    return ((x, y), *tail)
        return None

    found = place(0, a, b, r if exact_sizes else 0)
    if found is None:
        return ProfileVerdict(False, None)
    return ProfileVerdict(True, ClassProfile(found))


def extend_two_heavy(
    inst: BipartiteInstance, f_on_X: dict[int, int], heavy: tuple[int, int]
) -> PartialColoring | Obstruction:
    """Extend a coloring of X whose only repeated colors are `heavy` onto Y.

    Y-vertices whose lists avoid both heavy colors take any list color;
    when at most two Y-lists meet a heavy color those vertices get
    distinct colors and the result is arborable.  Otherwise the three or
    more such vertices are returned as an `Obstruction`.

    """
    if set(f_on_X) != set(inst.members(X)):
        raise ParameterError("f_on_X must color exactly the X side")
    if off := [v for v, c in f_on_X.items() if c not in inst.L[v]]:
        raise ParameterError(f"X-vertices colored outside their lists: {off}")
    usage = Counter(f_on_X.values())
    repeated = {c for c, used in usage.items() if used >= 2}
    if repeated != set(heavy) or len(set(heavy)) != 2:
        raise ParameterError(
            f"heavy colors {heavy} must be exactly the repeated colors {sorted(repeated)}"
        )
    hot = inst.L.holders(heavy)
    hot_y = [v for v in hot if inst.side(v) == Y]
    if len(hot_y) > 2:
        return Obstruction(heavy=tuple(heavy), witnesses=hot_y)
    h = PartialColoring(f_on_X)
    taken: set[int] = set()
    for v in inst.members(Y):
        if v in hot_y:
            if not (free := inst.L[v] - taken):
                raise ParameterError(f"no distinct color left for Y-vertex {v}")
            h[v] = min(free)
            taken.add(h[v])
        else:
            h[v] = min(inst.L[v])
    if not bipartite_arborable_check(inst, h):
        raise InternalConsistencyError(f"two-heavy extension is not arborable: {h}")
    return h


def _expected_uncolored(inst: BipartiteInstance, sides: dict[int, str]) -> Fraction:
    """Expected count of vertices without a color on their own side.

    Colors in `sides` are fixed; the others go to either side with
    probability one half.

    """
    total = Fraction(0)
    for v in range(inst.n):
        own = inst.side(v)
        undecided = 0
        for c in inst.L[v]:
            if c not in sides:
                undecided += 1
            elif sides[c] == own:
                break
        else:
            total += Fraction(1, 2**undecided)
    return total


def derandomized_split(inst: BipartiteInstance, k: int, strict: bool = True) -> SplitOutcome:
    """Arborable L-coloring by sending every color to one side.

    Colors are processed in ascending order and each goes to the side that
    minimizes the conditional expected number of vertices left without a
    color on their own side (X on ties).  Under ``a + b <= (k+1) 2^k - 1``
    at most `k` vertices are left over; they get pairwise distinct colors.

    Raises
    ------
    ParameterError
        If `strict` and the size bound fails.

    """
    if not inst.L.is_k_assignment(k):
        raise ParameterError(f"every list must have exactly {k} colors")
    bound = (k + 1) * 2**k - 1
    within = inst.n <= bound
    if strict and not within:
        raise ParameterError(f"a + b = {inst.n} exceeds (k+1)2^k - 1 = {bound}")
    sides: dict[int, str] = {}
    start = _expected_uncolored(inst, sides)
    for c in inst.L.palette():
        sides[c] = X
        to_x = _expected_uncolored(inst, sides)
        sides[c] = Y
        to_y = _expected_uncolored(inst, sides)
        sides[c] = X if to_x <= to_y else Y
    f = PartialColoring()
    leftovers = []
    for v in range(inst.n):
        own = sorted(c for c in inst.L[v] if sides[c] == inst.side(v))
        if own:
            f[v] = own[0]
        else:
            leftovers.append(v)
    taken: set[int] = set()
    for v in leftovers:
        if not (free := inst.L[v] - taken):
            raise PreconditionError(
                f"{len(leftovers)} leftover vertices cannot get distinct colors"
            )
        f[v] = min(free)
        taken.add(f[v])
    if not bipartite_arborable_check(inst, f):
        raise InternalConsistencyError(f"split coloring is not arborable: {f}")
    return SplitOutcome(f, sides, leftovers, start, within)


def _flow_coloring(
    inst: BipartiteInstance, cap: int, palette: list[int], types: dict[int, str]
) -> PartialColoring | None:
    """Max-flow assignment honoring the class types fixed so far.

    An X-type color admits at most one Y-vertex and a Y-type color at
    most one X-vertex; untyped colors are only bounded by `cap`.

    """
    G = nx.DiGraph()
    for v in range(inst.n):
        G.add_edge("source", ("v", v), capacity=1)
        for c in inst.L[v]:
            G.add_edge(("v", v), (c, inst.side(v)))
    for c in palette:
        for side in (X, Y):
            narrow = types.get(c) not in (None, side)
            G.add_edge((c, side), ("c", c), capacity=1 if narrow else cap)
        G.add_edge(("c", c), "sink", capacity=cap)
    value, flow = nx.maximum_flow(G, "source", "sink")
    if value < inst.n:
        return None
    f = PartialColoring()
    for v in range(inst.n):
        for (c, _), amount in flow[("v", v)].items():
            if amount:
                f[v] = c
    return f


def solve_bipartite_exact(
    inst: BipartiteInstance, k: int, cap: int, budget: SearchBudget = SearchBudget()
) -> SolveOutcome | Refutation:
    """Complete search for an arborable L-coloring with classes <= `cap`.

    Every color is eventually typed X (at most one Y-vertex) or Y (at most
    one X-vertex); a max-flow over the typed network both prunes and
    produces colorings.  Colors listed at most once on one side are typed
    for free, and a color found in at least `cap` Y-lists is tried as
    Y-type first.  The split coloring is tried before any search.

    Raises
    ------
    BudgetExhausted
        If `budget` runs out before the search completes.

    """
    g = inst.graph()
    if inst.L.is_k_assignment(k) and inst.n <= (k + 1) * 2**k - 1:
        split = derandomized_split(inst, k)
        if max(Counter(split.coloring.values()).values()) <= cap:
            return _outcome(g, inst, cap, split.coloring)
    meter = budget.meter()
    palette = inst.L.palette()
    eta = {c: (inst.eta(X, c), inst.eta(Y, c)) for c in palette}
    types: dict[int, str] = {}
    for c, (ex, ey) in eta.items():
        if ey <= 1:
            types[c] = X
        elif ex <= 1:
            types[c] = Y
    undecided = sorted((c for c in palette if c not in types), key=lambda c: (-sum(eta[c]), c))

    def order(c: int) -> tuple[str, str]:
        ex, ey = eta[c]
        return (Y, X) if ey >= cap or ey > ex else (X, Y)

    def search(i: int) -> PartialColoring | None:
        meter.tick()
        f = _flow_coloring(inst, cap, palette, types)
        if f is None or bipartite_arborable_check(inst, f):
            return f
        c = undecided[i]
        for side in order(c):
            types[c] = side
            if (found := search(i + 1)) is not None:
                return found
        del types[c]
        return None

    f = search(0)
    if f is None:
        return Refutation(
            inst.a, inst.b, cap, f"no arborable coloring with classes <= {cap}", meter.nodes
        )
    return _outcome(g, inst, cap, f)


def _outcome(g: Graph, inst: BipartiteInstance, cap: int, f: PartialColoring) -> SolveOutcome:
    report = verify_arborable_L_coloring(g, inst.L, f)
    if not report.ok or report.max_class_size > cap:
        raise InternalConsistencyError(
            f"bipartite search produced an invalid coloring: {report.failures()}"
        )
    return SolveOutcome(f, "bipartite")


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: BipartiteInstance
    k: int
    cap: int
    note: str = ""


def load_fixture(name: str, text: str) -> Fixture:
    data = json.loads(text)
    a, b = data["bipartite"]
    lists = data["lists"]
    L = ListAssignment.of(lists[str(v)] for v in range(len(lists)))
    return Fixture(name, BipartiteInstance(a, b, L), data["k"], data["cap"], data.get("note", ""))


def structured_fixtures() -> dict[str, Fixture]:
    """The structured worst-case list patterns shipped with the package."""
    folder = resources.files("arboreq") / "fixtures"
    found = {}
    for entry in sorted(folder.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            name = entry.name.removesuffix(".json")
            found[name] = load_fixture(name, entry.read_text())
    return found
