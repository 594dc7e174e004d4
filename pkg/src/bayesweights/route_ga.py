"""Weighted-sum route optimization on a time-slotted parking graph.

A candidate solution is a simple path from the origin to any parking lot.
Three normalized objectives are scalarized with a weight vector and
minimized by a genetic algorithm: path distance (relative to the longest
sampled path), slowness (one minus the distance-weighted mean edge speed
relative to the fastest edge in the slot), and lot fullness (one minus the
terminal lot's availability in the slot). Distance is slot-invariant; the
other two change with the time slot.

The GA uses random-walk initialization, tournament selection, common-node
path crossover, detour mutation, and elitism, which makes every best-fitness
trace non-increasing. Runs are independent and seeded from per-run
substreams, so repeated invocations are identical and two weight vectors can
be compared under common random numbers.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

import numpy as np

from .core import ObjectiveValues, WeightVector
from .dirichlet import RngSeed

# Four-hour slots covering a day; index 0 starts at midnight.
SLOT_LABELS = ("12AM-4AM", "4AM-8AM", "8AM-12PM", "12PM-4PM", "4PM-8PM", "8PM-12AM")

# Seed of the internal stream used only for the distance-normalization
# pre-pass; independent of user seeds so the constant is a property of the
# graph alone.
_DMAX_STREAM = RngSeed(seed=0x6D617870617468, stream_id=0)


class GaError(RuntimeError):
    """Raised when the GA cannot produce a valid population."""


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    distance_km: float
    speeds: tuple


@dataclass(frozen=True)
class Chromosome:
    """Simple origin-to-lot path with its scalarized fitness."""

    path: tuple
    fitness: float


class RouteProblem:
    """Static road graph with per-slot edge speeds and lot availabilities."""

    def __init__(self, nodes, edges, parking_lots, origin, slots: int = 6,
                 dmax_samples: int = 10_000):
        self.nodes = tuple(nodes)
        self.slots = int(slots)
        self.origin = origin
        if self.slots < 1:
            raise ValueError("slots must be positive")
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ValueError("duplicate node ids")
        if origin not in known:
            raise ValueError("origin %r is not a node" % (origin,))

        parsed = []
        seen_pairs = set()
        for e in edges:
            u, v, dist, speeds = e
            if u not in known or v not in known:
                raise ValueError("edge (%r, %r) references unknown node" % (u, v))
            if (u, v) in seen_pairs:
                raise ValueError("duplicate edge (%r, %r)" % (u, v))
            seen_pairs.add((u, v))
            speeds = tuple(float(s) for s in speeds)
            if len(speeds) != self.slots:
                raise ValueError("edge (%r, %r) needs one speed per slot" % (u, v))
            if not all(s > 0 for s in speeds) or not float(dist) > 0:
                raise ValueError("edge (%r, %r) needs positive distance and speeds" % (u, v))
            parsed.append(Edge(u=u, v=v, distance_km=float(dist), speeds=speeds))
        self.edges = tuple(parsed)

        self.parking_lots = {}
        for node, avail in parking_lots:
            if node not in known:
                raise ValueError("parking lot %r is not a node" % (node,))
            avail = tuple(float(a) for a in avail)
            if len(avail) != self.slots:
                raise ValueError("lot %r needs one availability per slot" % (node,))
            if not all(0.0 <= a <= 1.0 for a in avail):
                raise ValueError("lot %r availabilities must lie in [0, 1]" % (node,))
            self.parking_lots[node] = avail
        if not self.parking_lots:
            raise ValueError("at least one parking lot is required")
        if origin in self.parking_lots:
            raise ValueError("origin cannot itself be a parking lot")

        self._adjacency = {u: [] for u in self.nodes}
        self._edge_lookup = {}
        for e in self.edges:
            self._adjacency[e.u].append(e.v)
            self._edge_lookup[(e.u, e.v)] = e
        for u in self._adjacency:
            self._adjacency[u] = tuple(self._adjacency[u])

        if not self._reachable_lots():
            raise ValueError("no parking lot is reachable from the origin")

        self.max_speed_per_slot = tuple(
            max(e.speeds[t] for e in self.edges) for t in range(self.slots)
        )
        self.d_max = self._normalization_distance(dmax_samples)

    def neighbors(self, node) -> tuple:
        return self._adjacency[node]

    def edge_between(self, u, v) -> Edge:
        try:
            return self._edge_lookup[(u, v)]
        except KeyError:
            raise ValueError("no edge from %r to %r" % (u, v)) from None

    def is_lot(self, node) -> bool:
        return node in self.parking_lots

    def path_distance(self, path) -> float:
        return sum(self.edge_between(u, v).distance_km for u, v in zip(path, path[1:]))

    def _reachable_lots(self) -> set:
        seen = {self.origin}
        stack = [self.origin]
        while stack:
            u = stack.pop()
            for v in self._adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen & set(self.parking_lots)

    def _shortest_distances(self) -> dict:
        dist = {self.origin: 0.0}
        heap = [(0.0, self.origin)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist.get(u, np.inf):
                continue
            for v in self._adjacency[u]:
                nd = d + self._edge_lookup[(u, v)].distance_km
                if nd < dist.get(v, np.inf):
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        return dist

    def _normalization_distance(self, samples: int) -> float:
        """Longest origin-to-lot simple-path distance found by sampling.

        Exact longest-path search is intractable, so the constant comes from
        shortest paths plus seeded random simple walks; path distances beyond
        it clamp to 1 in the objective.
        """
        shortest = self._shortest_distances()
        best = max((shortest[lot] for lot in self.parking_lots if lot in shortest), default=0.0)
        rng = _DMAX_STREAM.generator()
        for _ in range(samples):
            node = self.origin
            visited = {node}
            travelled = 0.0
            while True:
                options = [v for v in self._adjacency[node] if v not in visited]
                if not options:
                    break
                nxt = options[int(rng.integers(len(options)))]
                travelled += self._edge_lookup[(node, nxt)].distance_km
                visited.add(nxt)
                node = nxt
                if node in self.parking_lots and travelled > best:
                    best = travelled
        return best


def scalarize(weights: WeightVector, objectives: ObjectiveValues) -> float:
    """Weighted sum of the objective values; a convex combination."""
    w = weights.weights
    f = objectives.values
    if len(w) != len(f):
        raise ValueError("weights and objectives must have equal length")
    return float(np.dot(w, f))


def route_objectives(problem: RouteProblem, path, slot: int) -> ObjectiveValues:
    """Normalized (distance, slowness, lot fullness) triple for a path."""
    if isinstance(path, Chromosome):
        path = path.path
    if not (0 <= slot < problem.slots):
        raise ValueError("slot %d out of range" % slot)
    if len(path) < 2 or path[0] != problem.origin:
        raise ValueError("path must start at the origin and traverse at least one edge")
    terminal = path[-1]
    if not problem.is_lot(terminal):
        raise ValueError("path does not reach a parking lot")

    distances = np.array([problem.edge_between(u, v).distance_km
                          for u, v in zip(path, path[1:])])
    speeds = np.array([problem.edge_between(u, v).speeds[slot]
                       for u, v in zip(path, path[1:])])
    total = distances.sum()
    f_distance = min(total / problem.d_max, 1.0)
    mean_speed = float((distances * speeds).sum() / total)
    f_slowness = min(max(1.0 - mean_speed / problem.max_speed_per_slot[slot], 0.0), 1.0)
    f_fullness = min(max(1.0 - problem.parking_lots[terminal][slot], 0.0), 1.0)
    return ObjectiveValues(values=np.array([f_distance, f_slowness, f_fullness]))


def enumerate_simple_paths(problem: RouteProblem, limit: int = 1_000_000) -> list:
    """All simple origin-to-lot paths (DFS); the brute-force oracle."""
    out = []
    stack = [(problem.origin, (problem.origin,))]
    while stack:
        node, path = stack.pop()
        if problem.is_lot(node) and len(path) > 1:
            out.append(path)
            if len(out) > limit:
                raise ValueError("path count exceeds limit")
        for v in problem.neighbors(node):
            if v not in path:
                stack.append((v, path + (v,)))
    return out


@dataclass(frozen=True)
class GaConfig:
    population: int = 50
    generations: int = 30
    tournament_size: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    elitism: int = 1
    seed: RngSeed = RngSeed(0)
    runs: int = 30

    def __post_init__(self):
        if self.population < 2 or self.generations < 1 or self.runs < 1:
            raise ValueError("population, generations, and runs must be positive")
        if self.tournament_size < 2:
            raise ValueError("tournament size must be at least 2")
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("rates must lie in [0, 1]")
        if not (0 < self.elitism < self.population):
            raise ValueError("elitism must be positive and below the population size")


@dataclass(frozen=True)
class GaRunTrace:
    best_per_generation: np.ndarray
    best_path: tuple
    best_fitness: float


@dataclass(frozen=True)
class GaTrace:
    """Per-run traces plus the across-run fitness summary."""

    runs: tuple
    mean: float
    worst: float
    best: float
    best_chromosome: Chromosome

    @property
    def final_fitnesses(self) -> np.ndarray:
        return np.array([r.best_fitness for r in self.runs])


@dataclass(frozen=True)
class PairedTraces:
    """Common-random-number comparison of two weight vectors."""

    freq: GaTrace
    bayes: GaTrace

    def as_dict(self) -> dict:
        return {"freq": self.freq, "bayes": self.bayes}


def _random_walk_to_lot(problem: RouteProblem, rng) -> tuple | None:
    """Random simple walk from the origin; may continue past a lot so every
    lot stays sampleable. Returns None on a dead end short of any lot."""
    node = problem.origin
    path = [node]
    visited = {node}
    while True:
        options = [v for v in problem.neighbors(node) if v not in visited]
        if problem.is_lot(node):
            if not options or rng.random() < 0.5:
                return tuple(path)
        elif not options:
            return None
        node = options[int(rng.integers(len(options)))]
        path.append(node)
        visited.add(node)


def _random_segment(problem: RouteProblem, rng, start, goal, banned: set,
                    max_tries: int = 10) -> tuple | None:
    """Random simple path start->goal avoiding banned nodes, or None."""
    for _ in range(max_tries):
        node = start
        seg = [node]
        visited = set(banned) | {node}
        while node != goal:
            options = [v for v in problem.neighbors(node) if v == goal or v not in visited]
            if not options:
                seg = None
                break
            node = options[int(rng.integers(len(options)))]
            seg.append(node)
            visited.add(node)
        if seg is not None:
            return tuple(seg)
    return None


def _crossover(problem: RouteProblem, rng, p1: tuple, p2: tuple) -> tuple:
    """Splice the parents at a shared node; fall back to the first parent."""
    common = [c for c in set(p1) & set(p2) if c != problem.origin]
    if common:
        order = rng.permutation(len(common))
        common_sorted = sorted(common)  # stable candidate order, then shuffled
        for k in order:
            c = common_sorted[int(k)]
            child = p1[: p1.index(c)] + p2[p2.index(c):]
            if len(set(child)) == len(child):
                return child
    return p1


def _mutate(problem: RouteProblem, rng, path: tuple) -> tuple:
    """Detour mutation: resample a random subpath between its endpoints."""
    if len(path) < 2:
        return path
    i = int(rng.integers(len(path) - 1))
    j = int(rng.integers(i + 1, len(path)))
    banned = set(path[:i]) | set(path[j + 1:])
    seg = _random_segment(problem, rng, path[i], path[j], banned)
    if seg is None:
        return path
    child = path[:i] + seg + path[j + 1:]
    if len(set(child)) != len(child):
        return path
    return child


def _evaluate(problem: RouteProblem, weights: WeightVector, slot: int, path: tuple) -> Chromosome:
    return Chromosome(path=path, fitness=scalarize(weights, route_objectives(problem, path, slot)))


def _initial_population(problem: RouteProblem, weights: WeightVector, slot: int,
                        rng, size: int) -> list:
    pop = []
    failures = 0
    budget = 200 * size
    while len(pop) < size:
        path = _random_walk_to_lot(problem, rng)
        if path is None:
            failures += 1
            if failures > budget:
                raise GaError("could not build a valid population "
                              "(origin walks keep dead-ending)")
            continue
        pop.append(_evaluate(problem, weights, slot, path))
    return pop


def _tournament(rng, pop: list, k: int) -> Chromosome:
    picks = rng.integers(len(pop), size=k)
    return min((pop[int(i)] for i in picks), key=lambda c: c.fitness)


def _single_run(problem: RouteProblem, weights: WeightVector, slot: int,
                config: GaConfig, rng) -> GaRunTrace:
    pop = _initial_population(problem, weights, slot, rng, config.population)
    trace = np.empty(config.generations)
    pop.sort(key=lambda c: c.fitness)
    trace[0] = pop[0].fitness
    for gen in range(1, config.generations):
        nxt = pop[: config.elitism]
        while len(nxt) < config.population:
            p1 = _tournament(rng, pop, config.tournament_size)
            p2 = _tournament(rng, pop, config.tournament_size)
            child = p1.path
            if rng.random() < config.crossover_rate:
                child = _crossover(problem, rng, p1.path, p2.path)
            if rng.random() < config.mutation_rate:
                child = _mutate(problem, rng, child)
            nxt.append(_evaluate(problem, weights, slot, child))
        pop = sorted(nxt, key=lambda c: c.fitness)
        trace[gen] = pop[0].fitness
    return GaRunTrace(best_per_generation=trace, best_path=pop[0].path,
                      best_fitness=pop[0].fitness)


def evolve(problem: RouteProblem, weights: WeightVector, slot: int,
           config: GaConfig = GaConfig()) -> GaTrace:
    """Run the GA ``config.runs`` times on independent seed substreams."""
    if not (0 <= slot < problem.slots):
        raise ValueError("slot %d out of range" % slot)
    runs = []
    for run_index in range(config.runs):
        rng = config.seed.derive(run_index).generator()
        runs.append(_single_run(problem, weights, slot, config, rng))
    finals = np.array([r.best_fitness for r in runs])
    champion = min(runs, key=lambda r: r.best_fitness)
    return GaTrace(
        runs=tuple(runs),
        mean=float(finals.mean()),
        worst=float(finals.max()),
        best=float(finals.min()),
        best_chromosome=Chromosome(path=champion.best_path, fitness=champion.best_fitness),
    )


def compare_weightings(problem: RouteProblem, freq: WeightVector, bayes: WeightVector,
                       slot: int, config: GaConfig = GaConfig()) -> PairedTraces:
    """Evolve under both weightings with identical per-run seed substreams."""
    return PairedTraces(
        freq=evolve(problem, freq, slot, config),
        bayes=evolve(problem, bayes, slot, config),
    )


# ---------------------------------------------------------------------------
# Graph document I/O and trace artifacts
# ---------------------------------------------------------------------------

def problem_from_dict(doc: dict, dmax_samples: int = 10_000) -> RouteProblem:
    try:
        nodes = doc["nodes"]
        edges = [(e["from"], e["to"], e["distance_km"], e["speeds"]) for e in doc["edges"]]
        lots = [(p["node"], p["availability"]) for p in doc["parking_lots"]]
        origin = doc["origin"]
        slots = doc.get("slots", 6)
    except (KeyError, TypeError) as exc:
        raise ValueError("graph document is missing field %s" % exc) from exc
    return RouteProblem(nodes=nodes, edges=edges, parking_lots=lots,
                        origin=origin, slots=slots, dmax_samples=dmax_samples)


def load_problem(path, dmax_samples: int = 10_000) -> RouteProblem:
    """Parse a graph document; parse errors carry the line/column position."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError("graph parse failure at line %d column %d: %s"
                         % (exc.lineno, exc.colno, exc.msg)) from exc
    return problem_from_dict(doc, dmax_samples=dmax_samples)


def demo_problem() -> RouteProblem:
    """The bundled 12-node, 3-lot, 6-slot demonstration graph."""
    from importlib import resources

    ref = resources.files("bayesweights").joinpath("data/demo_graph.json")
    doc = json.loads(ref.read_text(encoding="utf-8"))
    return problem_from_dict(doc)


def _trace_columns(traces: dict) -> list:
    return ["fitness_%s" % label for label in traces]


def write_generation_trace_csv(traces: dict, path) -> None:
    """Per-generation best fitness of the first run, one column per weighting."""
    labels = list(traces)
    lengths = {len(traces[k].runs[0].best_per_generation) for k in labels}
    if len(lengths) != 1:
        raise ValueError("traces have differing generation counts")
    lines = [",".join(["generation"] + _trace_columns(traces))]
    for g in range(lengths.pop()):
        row = [str(g + 1)]
        row += [repr(float(traces[k].runs[0].best_per_generation[g])) for k in labels]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_run_trace_csv(traces: dict, path) -> None:
    """Final best fitness of every run, one column per weighting."""
    labels = list(traces)
    counts = {len(traces[k].runs) for k in labels}
    if len(counts) != 1:
        raise ValueError("traces have differing run counts")
    lines = [",".join(["run"] + _trace_columns(traces))]
    for r in range(counts.pop()):
        row = [str(r + 1)]
        row += [repr(float(traces[k].runs[r].best_fitness)) for k in labels]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


_METHOD_NAMES = {"freq": "frequentist", "bayes": "bayesian"}


def summary_rows(traces: dict) -> list:
    """(method, mean, worst, best) tuples, one per weighting."""
    return [(_METHOD_NAMES.get(label, label), t.mean, t.worst, t.best)
            for label, t in traces.items()]


def write_summary_csv(traces: dict, path) -> None:
    lines = ["method,mean,worst,best"]
    for method, mean, worst, best in summary_rows(traces):
        lines.append("%s,%r,%r,%r" % (method, mean, worst, best))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
