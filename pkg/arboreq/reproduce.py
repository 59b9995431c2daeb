"""Replays the catalogued claims as checks with PASS/FAIL/SKIP outcomes.

Every claim is a function of the configuration returning the observed
outcome; `run_claims` evaluates them, in parallel when asked, and always
reports them in registry order.  Exhausting the search budget is the only
way to get SKIP.

"""

from dataclasses import asdict, dataclass
from functools import partial
from itertools import product
import json
from multiprocessing import Pool
from pathlib import Path
import random
from typing import Any, Callable, Iterator

import networkx as nx
from rich.console import Console
from rich.table import Table

from arboreq import BudgetExhausted, HypothesisViolation
from arboreq.bipartite import (
    BipartiteInstance,
    Refutation,
    derandomized_split,
    profile_oracle,
    solve_bipartite_exact,
    structured_fixtures,
)
from arboreq.coloring import (
    ListAssignment,
    PartialColoring,
    constant_assignment,
    equity_cap,
    random_assignment,
    restrict_assignment,
    verify_arborable_L_coloring,
    verify_certificate,
)
from arboreq.extension import (
    ExtensionContext,
    check_peel_coloring,
    compute_d_lists,
    extension_cap,
    find_peel_coloring,
    merge_colorings,
)
from arboreq.graph import (
    Family,
    FamilySpec,
    Graph,
    build_family,
    enumerate_regular,
    from_networkx,
    induced_subgraph,
    max_degree,
    random_2degenerate,
    random_bounded_degree,
    to_networkx,
)
from arboreq.oracle import (
    SearchBudget,
    Status,
    decide_equitable_vertex_arborable,
    exact_equitable_arborable,
)
from arboreq.solvers import (
    solve_2degenerate,
    solve_complete_minus_edge,
    solve_cycle_power,
    solve_path_power,
    solve_path_power_pminus1,
    solve_regular_small,
)

FEASIBLE, INFEASIBLE = "Feasible", "Infeasible"
PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

console = Console()


@dataclass
class ReproLine:
    claim_id: str
    paper_ref: str
    statement: str
    command: str
    expected: str
    observed: str
    status: str

    def to_dict(self) -> dict[str, str]:
        return asdict(self)


@dataclass(frozen=True)
class Claim:
    claim_id: str
    paper_ref: str
    statement: str
    expected: str
    check: Callable[[dict[str, Any], SearchBudget], str]


class Failed(Exception):
    """A sample contradicts the claim; the message is the observation."""


def budget_of(conf: dict[str, Any]) -> SearchBudget:
    return SearchBudget(node_limit=conf["node_limit"], time_limit=conf["budget_secs"])


def universe_of(conf: dict[str, Any], k: int) -> int:
    return conf["universe"] or 2 * k


def _seeds(conf: dict[str, Any], count: int, salt: int = 0) -> range:
    start = conf["seed"] * 1_000_003 + salt * 10_007
    return range(start, start + count)


def _decide(g: Graph, L: ListAssignment, cap: int, budget: SearchBudget) -> bool:
    verdict = exact_equitable_arborable(g, L, cap, budget)
    if verdict.status is Status.unknown:
        raise BudgetExhausted(verdict.reason)
    return verdict.feasible


def _certify(g: Graph, L: ListAssignment, k: int, f: PartialColoring, label: str):
    report = verify_certificate(g, L, f, k)
    if not report.ok:
        raise Failed(f"{label}: {'; '.join(report.failures())}")


def _bipartite_samples(
    conf: dict[str, Any],
    budget: SearchBudget,
    a: int,
    b: int,
    k: int,
    cap: int,
    salt: int,
) -> str:
    universe = universe_of(conf, k)
    instances: list[tuple[str, BipartiteInstance]] = [
        (f"seed {seed}", BipartiteInstance(a, b, random_assignment(a + b, k, universe, seed)))
        for seed in _seeds(conf, conf["samples"], salt)
    ]
    instances += [
        (f"fixture {name}", fx.instance)
        for name, fx in structured_fixtures().items()
        if (fx.instance.a, fx.instance.b, fx.k) == (a, b, k)
    ]
    g = build_family(FamilySpec(Family.complete_bipartite, a=a, b=b))
    for label, inst in instances:
        result = solve_bipartite_exact(inst, k, cap, budget)
        if isinstance(result, Refutation):
            raise Failed(f"{INFEASIBLE} at {label}")
        report = verify_arborable_L_coloring(g, inst.L, result.coloring)
        if not report.ok or report.max_class_size > cap:
            raise Failed(f"invalid coloring at {label}")
    return FEASIBLE


def k11_17_lists(conf: dict[str, Any], budget: SearchBudget) -> str:
    return _bipartite_samples(conf, budget, 11, 17, 3, 10, salt=1)


def k11_17_four_lists(conf: dict[str, Any], budget: SearchBudget) -> str:
    if profile_oracle(11, 17, 4, 7, exact_sizes=False).feasible:
        return FEASIBLE
    inst = BipartiteInstance(11, 17, constant_assignment(28, range(4)))
    result = solve_bipartite_exact(inst, 4, 7, budget)
    return INFEASIBLE if isinstance(result, Refutation) else FEASIBLE


def k4_15_vertex(conf: dict[str, Any], budget: SearchBudget) -> str:
    g = build_family(FamilySpec(Family.complete_bipartite, a=4, b=15))
    verdict = decide_equitable_vertex_arborable(g, 3, budget)
    if verdict.status is Status.unknown:
        raise BudgetExhausted(verdict.reason)
    by_profile = profile_oracle(4, 15, 3, 7, exact_sizes=True).feasible
    if by_profile != verdict.feasible:
        raise Failed(f"search says {verdict.status.value}, profiles say {by_profile}")
    return verdict.status.value


def k4_15_lists(conf: dict[str, Any], budget: SearchBudget) -> str:
    return _bipartite_samples(conf, budget, 4, 15, 3, 7, salt=2)


def k7_11_lists(conf: dict[str, Any], budget: SearchBudget) -> str:
    return _bipartite_samples(conf, budget, 7, 11, 2, 10, salt=3)


def k99_two(conf: dict[str, Any], budget: SearchBudget) -> str:
    return FEASIBLE if profile_oracle(9, 9, 2, 9, exact_sizes=True).feasible else INFEASIBLE


def k99_three(conf: dict[str, Any], budget: SearchBudget) -> str:
    return FEASIBLE if profile_oracle(9, 9, 3, 6, exact_sizes=True).feasible else INFEASIBLE


def _small_samples(conf: dict[str, Any], cap: int) -> int:
    return max(1, min(conf["samples"], cap))


def path_power_grid() -> Iterator[tuple[int, int, int]]:
    for p, n in product(range(1, 5), range(1, 41)):
        for k in (p, p + 1):
            yield n, p, k


def path_powers(conf: dict[str, Any], budget: SearchBudget) -> str:
    count = _small_samples(conf, 50)
    for n, p, k in path_power_grid():
        g = build_family(FamilySpec(Family.path_power, n=n, p=p))
        for seed in _seeds(conf, count, salt=n * 100 + p * 10 + k):
            L = random_assignment(n, k, universe_of(conf, k), seed)
            out = solve_path_power(n, p, k, L)
            _certify(g, L, k, out.coloring, f"n={n} p={p} k={k} seed={seed}")
            if n <= 8 and not _decide(g, L, equity_cap(n, k), budget):
                raise Failed(f"oracle disagrees at n={n} p={p} k={k} seed={seed}")
    return FEASIBLE


def path_powers_short(conf: dict[str, Any], budget: SearchBudget) -> str:
    count = _small_samples(conf, 50)
    for p, n in product((3, 4), range(1, 41)):
        k = p - 1
        g = build_family(FamilySpec(Family.path_power, n=n, p=p))
        for seed in _seeds(conf, count, salt=n * 100 + p):
            L = random_assignment(n, k, universe_of(conf, k), seed)
            out = solve_path_power_pminus1(n, p, L)
            _certify(g, L, k, out.coloring, f"n={n} p={p} seed={seed}")
            if n <= 8 and not _decide(g, L, equity_cap(n, k), budget):
                raise Failed(f"oracle disagrees at n={n} p={p} seed={seed}")
    return FEASIBLE


def cycle_powers(conf: dict[str, Any], budget: SearchBudget) -> str:
    count = _small_samples(conf, 50)
    for p in (2, 3):
        k = p + 1
        for n in range(2 * p + 2, 31):
            g = build_family(FamilySpec(Family.cycle_power, n=n, p=p))
            for seed in _seeds(conf, count, salt=n * 10 + p):
                L = random_assignment(n, k, universe_of(conf, k), seed)
                out = solve_cycle_power(n, p, k, L)
                _certify(g, L, k, out.coloring, f"n={n} p={p} seed={seed}")
    return FEASIBLE


def random_wide_2degenerate(seed: int, max_n: int = 25) -> Graph:
    """A random 2-degenerate graph with maximum degree at least 3."""
    rng = random.Random(seed)
    while True:
        g = random_2degenerate(rng.randint(4, max_n), rng.randrange(2**32))
        if max_degree(g) >= 3:
            return g


def two_degenerate(conf: dict[str, Any], budget: SearchBudget) -> str:
    for seed in _seeds(conf, _small_samples(conf, 200), salt=34):
        g = random_wide_2degenerate(seed)
        k = -(-max_degree(g) // 2)
        L = random_assignment(g.n, k, universe_of(conf, k), seed)
        out = solve_2degenerate(g, k, L)
        _certify(g, L, k, out.coloring, f"seed={seed}")
    return FEASIBLE


def k5_minus_edge(conf: dict[str, Any], budget: SearchBudget) -> str:
    L = constant_assignment(5, (0, 1))
    out = solve_complete_minus_edge(5, 2, L)
    _certify(build_family(FamilySpec(Family.complete_minus_edge, n=5)), L, 2, out.coloring, "K5-e")
    return FEASIBLE


def k5(conf: dict[str, Any], budget: SearchBudget) -> str:
    g = build_family(FamilySpec(Family.complete, n=5))
    L = constant_assignment(5, (0, 1))
    return FEASIBLE if _decide(g, L, 3, budget) else INFEASIBLE


def complete_minus_edge(conf: dict[str, Any], budget: SearchBudget) -> str:
    count = _small_samples(conf, 100)
    for n in (5, 7, 9, 11):
        k = (n - 1) // 2
        g = build_family(FamilySpec(Family.complete_minus_edge, n=n))
        for seed in _seeds(conf, count, salt=n):
            L = random_assignment(n, k, universe_of(conf, k), seed)
            out = solve_complete_minus_edge(n, k, L)
            _certify(g, L, k, out.coloring, f"n={n} seed={seed}")
    return FEASIBLE


def regular_small(conf: dict[str, Any], budget: SearchBudget) -> str:
    graphs = enumerate_regular(6, 4)
    cocktail = build_family(FamilySpec(Family.cocktail_party, n=6))
    if len(graphs) != 1 or not nx.is_isomorphic(
        to_networkx(graphs[0]), to_networkx(cocktail)
    ):
        raise Failed(f"expected one 4-regular graph on 6 vertices, found {len(graphs)}")
    for g in (*graphs, cocktail):
        for seed in _seeds(conf, _small_samples(conf, 100), salt=32):
            L = random_assignment(6, 2, universe_of(conf, 2), seed)
            out = solve_regular_small(g, 2, L)
            _certify(g, L, 2, out.coloring, f"seed={seed}")
    return FEASIBLE


def split_grid() -> Iterator[tuple[int, int, int]]:
    for k in (2, 3):
        total = (k + 1) * 2**k - 1
        for a in range(1, total // 2 + 1):
            yield k, a, total - a


def split_leftovers(conf: dict[str, Any], budget: SearchBudget) -> str:
    count = _small_samples(conf, 100)
    for k, a, b in split_grid():
        if (a + b) // 2**k > k:
            raise Failed(f"⌊(a+b)/2^k⌋ > k at a={a} b={b} k={k}")
        for seed in _seeds(conf, count, salt=a * 10 + k):
            inst = BipartiteInstance(a, b, random_assignment(a + b, k, universe_of(conf, k), seed))
            split = derandomized_split(inst, k)
            if len(split.leftovers) > k:
                raise Failed(f"{len(split.leftovers)} leftovers at a={a} b={b} seed={seed}")
    return "leftovers <= k"


def random_extension_instance(
    seed: int, max_n: int = 12
) -> tuple[Graph, list[int], ListAssignment, PartialColoring] | None:
    """Random (G, S, L, f) with f an equitable arborable coloring of G - S.

    Returns `None` when G - S happens to have no such coloring.

    """
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    m = rng.randint(1, 6 // k)
    n = rng.randint(m * k + 1, max(max_n, m * k + 1))
    g = from_networkx(nx.gnp_random_graph(n, rng.uniform(0.2, 0.6), seed=rng.randrange(2**32)))
    S = rng.sample(range(n), m * k)
    L = random_assignment(n, k, 2 * k, rng.randrange(2**32))
    keep = [v for v in g.vertices if v not in S]
    sub = induced_subgraph(g, keep)
    verdict = exact_equitable_arborable(sub, restrict_assignment(L, keep), extension_cap(n, k, m))
    if verdict.witness is None:
        return None
    return g, S, L, verdict.witness.lift(tuple(keep))


def brute_force_peel(g: Graph, ctx: ExtensionContext) -> bool:
    """Whether any choice from the D-lists meets every merge hypothesis."""
    for choice in product(*(sorted(ctx.D[v]) for v in ctx.peel)):
        try:
            check_peel_coloring(g, ctx, dict(zip(ctx.peel, choice)))
        except HypothesisViolation:
            continue
        return True
    return False


def peel_merges(conf: dict[str, Any], budget: SearchBudget) -> str:
    for seed in _seeds(conf, _small_samples(conf, 1000), salt=15):
        if (found := random_extension_instance(seed)) is None:
            continue
        g, S, L, f = found
        ctx = compute_d_lists(g, S, L, f, m=len(S) // L.k)
        peel_coloring = find_peel_coloring(g, ctx)
        if (peel_coloring is not None) != brute_force_peel(g, ctx):
            raise Failed(f"peel search disagrees with enumeration at seed={seed}")
        if peel_coloring is not None:
            merge_colorings(g, L, ctx, peel_coloring)
    return "merges verify"


def degree4_sparse(conf: dict[str, Any], budget: SearchBudget) -> str:
    for seed in _seeds(conf, _small_samples(conf, 100), salt=351):
        g = random_bounded_degree(random.Random(seed).randint(4, 14), seed)
        for draw in range(20):
            L = random_assignment(g.n, 2, universe_of(conf, 2), seed * 20 + draw)
            if not _decide(g, L, equity_cap(g.n, 2), budget):
                raise Failed(f"{INFEASIBLE} at graph seed={seed} draw={draw}")
    return FEASIBLE


def degree4_regular(conf: dict[str, Any], budget: SearchBudget) -> str:
    for n in (6, 7, 8):
        for index, g in enumerate(enumerate_regular(n, 4)):
            for seed in _seeds(conf, 20, salt=n * 100 + index):
                L = random_assignment(n, 2, universe_of(conf, 2), seed)
                if not _decide(g, L, equity_cap(n, 2), budget):
                    raise Failed(f"{INFEASIBLE} at n={n} graph {index} seed={seed}")
    return FEASIBLE


LOWER_BOUND_CASES = ((6, 4, 2), (8, 5, 2), (7, 6, 3))


def path_power_lower(conf: dict[str, Any], budget: SearchBudget) -> str:
    for n, p, k in LOWER_BOUND_CASES:
        g = build_family(FamilySpec(Family.path_power, n=n, p=p))
        L = constant_assignment(n, range(k))
        if _decide(g, L, equity_cap(n, k), budget):
            return FEASIBLE
    return INFEASIBLE


# fmt: off
CLAIMS: tuple[Claim, ...] = (
    Claim("k11-17-lists", "thm2.7", "K_{11,17} is equitably 3-list arborable", FEASIBLE, k11_17_lists),
    Claim("k11-17-four-lists", "thm2.7", "K_{11,17} is not equitably 4-list arborable", INFEASIBLE, k11_17_four_lists),
    Claim("k4-15-vertex", "prop2.2", "K_{4,15} is not equitably vertex 3-arborable", INFEASIBLE, k4_15_vertex),
    Claim("k4-15-lists", "prop2.2", "K_{4,15} is equitably 3-list arborable", FEASIBLE, k4_15_lists),
    Claim("k7-11-lists", "lemma2.6", "K_{7,11}: 2-assignments admit arborable colorings with classes <= 10", FEASIBLE, k7_11_lists),
    Claim("k9-9-two", "sec1.2", "K_{9,9} is equitably vertex 2-arborable", FEASIBLE, k99_two),
    Claim("k9-9-three", "sec1.2", "K_{9,9} is not equitably vertex 3-arborable", INFEASIBLE, k99_three),
    Claim("path-power", "thm1.4", "path powers P_n^p are equitably k-list arborable for k >= p", FEASIBLE, path_powers),
    Claim("path-power-short", "prop1.6", "path powers P_n^p are equitably (p-1)-list arborable for p >= 3", FEASIBLE, path_powers_short),
    Claim("cycle-power", "thm1.8", "cycle powers C_n^p are equitably k-list arborable for k >= p + 1", FEASIBLE, cycle_powers),
    Claim("2-degenerate", "thm3.4", "2-degenerate graphs are equitably k-list arborable for k >= ⌈Δ/2⌉", FEASIBLE, two_degenerate),
    Claim("k5-minus-edge", "sec3", "K_5 - e is equitably 2-list arborable", FEASIBLE, k5_minus_edge),
    Claim("k5-constant", "sec3", "K_5 has no equitable arborable coloring from constant 2-lists", INFEASIBLE, k5),
    Claim("complete-minus-edge", "prop3.1", "K_{2l+1} - e is equitably l-list arborable", FEASIBLE, complete_minus_edge),
    Claim("regular-small", "prop3.2", "the 4-regular graph on 6 vertices is equitably 2-list arborable", FEASIBLE, regular_small),
    Claim("split", "prop2.4", "the derandomized split leaves at most k vertices uncolored", "leftovers <= k", split_leftovers),
    Claim("peel-merge", "lemma1.5", "peel colorings meeting the merge hypotheses extend equitably", "merges verify", peel_merges),
    Claim("degree4-sparse", "thm3.5", "Δ <= 4 with at most 3 vertices of degree 4: equitably 2-list arborable", FEASIBLE, degree4_sparse),
    Claim("degree4-regular", "thm3.5", "connected 4-regular graphs on 6 to 8 vertices: equitably 2-list arborable", FEASIBLE, degree4_regular),
    Claim("path-power-lower", "conj1.7", "P_n^p with k < ⌈(p+1)/2⌉ fails on constant lists", INFEASIBLE, path_power_lower),
)
# fmt: on

CLAIM_IDS = tuple(claim.claim_id for claim in CLAIMS)


def select_claims(subset: str | None) -> list[Claim]:
    """Claims whose id equals `subset` or starts with ``subset + "-"``; all for `None`.

    `subset` may also name a section ref such as ``thm2.7``, selecting every
    claim carrying it.
    """
    if subset is None:
        return list(CLAIMS)
    chosen = [
        claim
        for claim in CLAIMS
        if claim.claim_id == subset
        or claim.claim_id.startswith(f"{subset}-")
        or claim.paper_ref == subset.lower()
    ]
    if not chosen:
        raise ValueError(f"no claim matches {subset!r}, known: {', '.join(CLAIM_IDS)}")
    return chosen


def run_claim(claim: Claim, conf: dict[str, Any]) -> ReproLine:
    command = f"arboreq reproduce --subset {claim.claim_id}"
    line = partial(
        ReproLine, claim.claim_id, claim.paper_ref, claim.statement, command, claim.expected
    )
    try:
        observed = claim.check(conf, budget_of(conf))
    except BudgetExhausted as exc:
        return line(f"Unknown ({exc})", SKIP)
    except Failed as exc:
        return line(str(exc), FAIL)
    return line(observed, PASS if observed == claim.expected else FAIL)


def _run_by_id(args: tuple[str, dict[str, Any]]) -> ReproLine:
    claim_id, conf = args
    (claim,) = [c for c in CLAIMS if c.claim_id == claim_id]
    return run_claim(claim, conf)


def run_claims(claims: list[Claim], conf: dict[str, Any], jobs: int = 1) -> list[ReproLine]:
    """Evaluate `claims`; the result keeps their order whatever `jobs` is."""
    work = [(claim.claim_id, conf) for claim in claims]
    if jobs <= 1 or len(work) <= 1:
        return [_run_by_id(item) for item in work]
    with Pool(processes=min(jobs, len(work))) as pool:
        return pool.map(_run_by_id, work)


def fmt_results(lines: list[ReproLine]) -> tuple[Table, int]:
    """Formats the claim outcomes

    Returns
    -------
    tuple[Table, int]
        The table and the number of failed claims

    """
    tbl = Table(title="Claims")
    for col in ("Claim", "Ref", "Statement", "Expected", "Observed", "Status"):
        tbl.add_column(col)
    styles = {PASS: "green", FAIL: "bold red", SKIP: "yellow"}
    for line in lines:
        tbl.add_row(
            line.claim_id,
            line.paper_ref,
            line.statement,
            line.expected,
            line.observed,
            line.status,
            style=styles[line.status],
        )
    return tbl, sum(line.status == FAIL for line in lines)


def print_results(lines: list[ReproLine], json_out: Path | None = None) -> int:
    """Print the table and its JSON form; returns the number of failures."""
    tbl, failures = fmt_results(lines)
    console.print(tbl)
    payload = json.dumps([line.to_dict() for line in lines], indent=2)
    console.print_json(payload)
    if json_out is not None:
        json_out.write_text(payload + "\n")
    return failures
