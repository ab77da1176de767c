"""Susceptible-infected spreading over a generated network.

Infection advances in synchronous steps. A susceptible node with E
infected neighbours is infected in the next step with probability
1 - (1 - p1)^E, where p1, the per-exposure probability, is the product of
the multipliers of all susceptibility conditions the node currently meets
(a plain transmissibility is the single condition "exposed"). Spread is
ruled by two budgets: a time horizon and a distance cap, measured in hops
from the nearest seed; nodes beyond the cap never convert.

Randomness is counter-addressed: the uniform that decides node v at step t
depends only on the stream key and (t, v), so traces are reproducible no
matter how many draws other steps consumed, and replicates can be compared
under common random numbers.

Outcomes are reported as the population-at-risk share PaR(T, D): the
fraction of nodes infected within T steps at seed distance at most D
(D <= T, since reaching distance d takes at least d steps).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .features import GROUP_COUNT, GROUP_WIDTH, Population
from .netgen import NetworkSnapshot
from .scenario import CounterStream, Scenario

# Condition evaluators: (population | None, exposures, infected | None) -> value
# vector. A susceptibility condition is met when its value equals its
# threshold exactly.
_CONDITIONS: dict = {}


def register_condition(name: str, fn) -> None:
    """Register a named condition evaluator usable in Susceptibility."""
    _CONDITIONS[name] = fn


def _cond_exposed(population, exposures, infected):
    return (np.asarray(exposures) >= 1).astype(np.int64)


def _cond_age_group(population, exposures, infected):
    if population is None:
        raise ValueError("condition 'age_group' requires a population")
    return population.groups


def _cond_susceptible(population, exposures, infected):
    if infected is None:
        raise ValueError("condition 'susceptible' requires infection status")
    return (~np.asarray(infected, dtype=bool)).astype(np.int64)


register_condition("exposed", _cond_exposed)
register_condition("age_group", _cond_age_group)
register_condition("susceptible", _cond_susceptible)


@dataclass(frozen=True)
class Susceptibility:
    """Conditional per-exposure infection probability.

    Parallel tuples of condition names, thresholds and multipliers; a
    node's per-exposure probability is the product of the multipliers of
    its met conditions (a condition is met when its value equals the
    threshold). Multipliers lie in [0, 1]; 0 expresses full immunity under
    that condition. With no met conditions the product is the empty
    product, 1.
    """

    conditions: tuple[str, ...]
    thresholds: tuple[float, ...]
    multipliers: tuple[float, ...]

    def __post_init__(self) -> None:
        q = len(self.conditions)
        if q < 1:
            raise ValueError("need at least one condition")
        if len(self.thresholds) != q or len(self.multipliers) != q:
            raise ValueError(
                f"conditions ({q}), thresholds ({len(self.thresholds)}) and "
                f"multipliers ({len(self.multipliers)}) must have equal length"
            )
        for name in self.conditions:
            if name not in _CONDITIONS:
                known = ", ".join(sorted(_CONDITIONS))
                raise ValueError(f"unknown condition {name!r}; known: {known}")
        for w in self.multipliers:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"multipliers must lie in [0, 1], got {w!r}")

    @classmethod
    def from_transmissibility(cls, tau: float) -> "Susceptibility":
        """Uniform per-exposure probability tau for every exposed node."""
        if not 0.0 <= tau <= 1.0:
            raise ValueError(f"transmissibility must lie in [0, 1], got {tau!r}")
        return cls(("exposed",), (1,), (tau,))

    def per_exposure(self, exposures, population=None, infected=None) -> np.ndarray:
        """Vector of per-exposure probabilities, one entry per node."""
        exposures = np.asarray(exposures)
        prob = np.ones(exposures.shape[0])
        for name, theta, w in zip(self.conditions, self.thresholds, self.multipliers):
            value = _CONDITIONS[name](population, exposures, infected)
            prob = np.where(np.asarray(value) == theta, prob * w, prob)
        return prob


def transition_probability(
    node: int,
    susceptibility: Susceptibility,
    exposures: int,
    population: Population | None = None,
    infected: np.ndarray | None = None,
) -> float:
    """Probability that a susceptible node converts this step given its
    count of infected neighbours: 1 - (1 - p1)^exposures, 0 when there are
    no exposures."""
    if exposures < 0:
        raise ValueError(f"exposures must be non-negative, got {exposures}")
    if exposures == 0:
        return 0.0
    if population is not None:
        evec = np.zeros(population.size, dtype=np.int64)
        evec[node] = exposures
        p1 = susceptibility.per_exposure(evec, population, infected)[node]
    else:
        p1 = susceptibility.per_exposure(np.array([exposures]), None, infected)[0]
    return float(1.0 - (1.0 - p1) ** exposures)


@dataclass(frozen=True)
class SeedRule:
    """Scoring rule for initial spreaders.

    Nodes are ranked by sign-weighted extended features [normalised age,
    normalised degree]; the top `count` scores are seeded, ties going to
    the lower node id. The default seeks the highest-degree nodes.
    """

    signs: tuple[int, ...] = (0, 1)
    weights: tuple[float, ...] = (1.0, 1.0)
    count: int = 1

    def __post_init__(self) -> None:
        if len(self.signs) != 2 or len(self.weights) != 2:
            raise ValueError("seed rule covers exactly [age, degree]")
        for s in self.signs:
            if s not in (-1, 0, 1):
                raise ValueError(f"seed signs must be -1, 0 or 1, got {s!r}")
        for w in self.weights:
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"seed weights must lie in [0, 1], got {w!r}")
        if self.count < 0:
            raise ValueError(f"seed count must be non-negative, got {self.count}")


def seed_scores(net: NetworkSnapshot, population: Population, rule: SeedRule) -> np.ndarray:
    """Sign-weighted seeding score per node."""
    n = net.node_count
    age_norm = population.features[:, 0]
    degree_norm = net.degrees / (n - 1) if n > 1 else net.degrees.astype(np.float64)
    coeff = np.array(rule.signs, dtype=np.float64) * np.array(rule.weights)
    return age_norm * coeff[0] + degree_norm * coeff[1]


def select_seeds(net: NetworkSnapshot, population: Population, rule: SeedRule) -> np.ndarray:
    """Ids of the top-scoring nodes, score descending, ties to lower id."""
    if population.size != net.node_count:
        raise ValueError("population and network disagree on node count")
    scores = seed_scores(net, population, rule)
    order = np.lexsort((np.arange(net.node_count), -scores))
    return np.sort(order[: rule.count]).astype(np.int64)


def multi_source_distances(net: NetworkSnapshot, sources: np.ndarray) -> np.ndarray:
    """Hop distance from the nearest source; unreachable nodes (and every
    node when there are no sources) get the sentinel value node_count."""
    n = net.node_count
    dist = np.full(n, n, dtype=np.int64)
    frontier = np.zeros(n, dtype=bool)
    frontier[np.asarray(sources, dtype=np.int64)] = True
    dist[frontier] = 0
    adj = net.adjacency
    d = 0
    while frontier.any():
        d += 1
        reached = adj[frontier].any(axis=0)
        new = reached & (dist == n)
        dist[new] = d
        frontier = new
    return dist


@dataclass
class EpidemicTrace:
    """Step-by-step infection record.

    status[t, v] says whether v is infected at step t (row 0 holds the
    seeds); rows are cumulative since recovery does not occur. distances
    holds hops from the nearest seed (sentinel node_count if unreachable).
    """

    seeds: np.ndarray
    status: np.ndarray
    distances: np.ndarray
    horizon: int
    distance_cap: int

    def __post_init__(self) -> None:
        self.seeds = np.asarray(self.seeds, dtype=np.int64)
        self.status = np.asarray(self.status, dtype=bool)
        self.distances = np.asarray(self.distances, dtype=np.int64)
        if self.status.shape[0] != self.horizon + 1:
            raise ValueError("status must have horizon + 1 rows")
        if self.status.shape[1] != self.distances.shape[0]:
            raise ValueError("status and distances disagree on node count")

    @property
    def node_count(self) -> int:
        return int(self.status.shape[1])

    def infection_times(self) -> np.ndarray:
        """First step at which each node is infected, -1 if never."""
        ever = self.status.any(axis=0)
        first = self.status.argmax(axis=0)
        return np.where(ever, first, -1).astype(np.int64)

    def infected_count(self, t: int) -> int:
        return int(self.status[t].sum())


def run_si(
    net: NetworkSnapshot,
    population: Population,
    scenario: Scenario,
    stream: CounterStream,
    seed_rule: SeedRule | None = None,
    susceptibility: Susceptibility | None = None,
) -> EpidemicTrace:
    """Run the synchronous SI process for scenario.horizon steps.

    At each step t, every susceptible node v with E > 0 infected
    neighbours and seed distance within the cap converts when its uniform
    draw (addressed by (t, v) in the infection stream) falls below
    1 - (1 - p1)^E. Susceptibility defaults to the scenario's plain
    transmissibility, seeding to the scenario's count of highest-degree
    nodes.
    """
    n = net.node_count
    if population.size != n or scenario.node_count != n:
        raise ValueError("network, population and scenario disagree on node count")
    if seed_rule is None:
        seed_rule = SeedRule(count=scenario.seed_count)
    if susceptibility is None:
        susceptibility = Susceptibility.from_transmissibility(scenario.transmissibility)

    seeds = select_seeds(net, population, seed_rule)
    distances = multi_source_distances(net, seeds)
    adj_int = net.adjacency.astype(np.int64)
    reachable = distances <= scenario.distance_cap

    status = np.zeros((scenario.horizon + 1, n), dtype=bool)
    status[0, seeds] = True
    for t in range(1, scenario.horizon + 1):
        prev = status[t - 1]
        exposures = adj_int @ prev
        p1 = susceptibility.per_exposure(exposures, population, prev)
        prob = 1.0 - (1.0 - p1) ** exposures
        eligible = (~prev) & (exposures > 0) & reachable
        draws = stream.uniforms(t, n)
        status[t] = prev | (eligible & (draws < prob))
    return EpidemicTrace(
        seeds=seeds,
        status=status,
        distances=distances,
        horizon=scenario.horizon,
        distance_cap=scenario.distance_cap,
    )


def infection_by_distance(trace: EpidemicTrace) -> np.ndarray:
    """Counts of infected nodes by step and seed distance: entry [t, d] is
    the number of nodes at distance d infected by step t (cumulative in t,
    exact in d)."""
    cap = trace.distance_cap
    table = np.zeros((trace.horizon + 1, cap + 1), dtype=np.int64)
    for d in range(cap + 1):
        at_d = trace.distances == d
        table[:, d] = (trace.status & at_d).sum(axis=1)
    return table


def _check_window(trace: EpidemicTrace, time: int, distance: int) -> None:
    if not 0 <= time <= trace.horizon:
        raise ValueError(f"time {time} outside [0, horizon={trace.horizon}]")
    if not 0 <= distance <= trace.distance_cap:
        raise ValueError(
            f"distance {distance} outside [0, distance_cap={trace.distance_cap}]"
        )
    if distance > time:
        raise ValueError(
            f"distance {distance} exceeds time {time}; reaching distance d "
            f"takes at least d steps"
        )


def par(trace: EpidemicTrace, time: int, distance: int) -> float:
    """Population at risk: the fraction of all nodes infected within `time`
    steps at seed distance at most `distance` (requires distance <= time)."""
    _check_window(trace, time, distance)
    hit = trace.status[time] & (trace.distances <= distance)
    return float(hit.sum() / trace.node_count)


def par_exact(trace: EpidemicTrace, time: int, distance: int) -> float:
    """Fraction of nodes first infected exactly at step `time` and sitting
    exactly at seed distance `distance`."""
    _check_window(trace, time, distance)
    times = trace.infection_times()
    hit = (times == time) & (trace.distances == distance)
    return float(hit.sum() / trace.node_count)


def par_matrix(trace: EpidemicTrace) -> np.ndarray:
    """par(time, distance) for every valid window; cells with distance >
    time hold NaN."""
    rows = trace.horizon + 1
    cols = trace.distance_cap + 1
    out = np.full((rows, cols), np.nan)
    for t in range(rows):
        for d in range(min(t, cols - 1) + 1):
            out[t, d] = par(trace, t, d)
    return out


def par_by_group(
    trace: EpidemicTrace, population: Population, time: int, distance: int
) -> np.ndarray:
    """PaR restricted to each decade age group: infected members meeting
    the window over group size. Empty groups give NaN."""
    _check_window(trace, time, distance)
    if population.size != trace.node_count:
        raise ValueError("population and trace disagree on node count")
    hit = trace.status[time] & (trace.distances <= distance)
    groups = population.groups
    out = np.full(GROUP_COUNT, np.nan)
    for g in range(GROUP_COUNT):
        members = groups == g
        size = int(members.sum())
        if size:
            out[g] = hit[members].sum() / size
    return out


def risk_report(
    trace: EpidemicTrace, population: Population, net: NetworkSnapshot | None = None
) -> dict:
    """JSON-ready summary: seeds, final share, the PaR matrix, per-group
    PaR at the widest valid window, and the infection-by-distance table."""
    matrix = par_matrix(trace)
    final_t = trace.horizon
    final_d = min(trace.distance_cap, final_t)
    if final_d >= 0:
        groups = par_by_group(trace, population, final_t, final_d)
        final_share = par(trace, final_t, final_d)
    else:
        groups = np.full(GROUP_COUNT, np.nan)
        final_share = 0.0
    report = {
        "seeds": [int(s) for s in trace.seeds],
        "horizon": trace.horizon,
        "distance_cap": trace.distance_cap,
        "infected_total": int(trace.status[-1].sum()),
        "final_share": final_share,
        "par": [
            [None if np.isnan(x) else float(x) for x in row] for row in matrix
        ],
        "par_by_group": [None if np.isnan(x) else float(x) for x in groups],
        "infection_by_distance": infection_by_distance(trace).tolist(),
        "group_width": GROUP_WIDTH,
    }
    if net is not None:
        report["seed_degrees"] = [int(net.degrees[s]) for s in trace.seeds]
    return report


def trace_to_csv(trace: EpidemicTrace, path) -> None:
    """Per-node record: distance from the seed set and first infection
    step (-1 if never infected)."""
    times = trace.infection_times()
    seed_set = set(int(s) for s in trace.seeds)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node_id", "is_seed", "distance", "infection_time"])
        for v in range(trace.node_count):
            writer.writerow(
                [v, int(v in seed_set), int(trace.distances[v]), int(times[v])]
            )
