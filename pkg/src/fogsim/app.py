"""Dataflow application model.

An application is a DAG of processing modules connected by typed tuple
streams. Two distinguished endpoints, SENSOR and DISPLAY, mark where data
enters (periodic sensor readings) and where results are consumed. Each
sensor-to-display path is declared as a named loop; a loop is the unit for
which end-to-end latency is reported.

The built-in application models a soil-monitoring pipeline with five
modules and three result loops (status, alert, recommendation).
"""

from collections import deque
from dataclasses import dataclass, field

from .errors import ConsistencyError, ParameterError

# Distinguished graph endpoints. They are not modules: they host no
# computation and have no MIPS allocation.
SENSOR = "SENSOR"
DISPLAY = "DISPLAY"


@dataclass(frozen=True)
class TupleType:
    """A kind of data unit flowing along exactly one edge of the graph.

    size_bytes is the payload size charged to every link the tuple crosses;
    cpu_length_mi is the work (million instructions) its consumer executes.
    """

    name: str
    size_bytes: int
    cpu_length_mi: float

    def __post_init__(self):
        if not self.name:
            raise ParameterError("tuple type name must be non-empty")
        if not isinstance(self.size_bytes, int) or isinstance(self.size_bytes, bool):
            raise ParameterError(f"tuple {self.name}: size_bytes must be an integer")
        if self.size_bytes <= 0:
            raise ParameterError(f"tuple {self.name}: size_bytes must be > 0, got {self.size_bytes}")
        if self.cpu_length_mi < 0:
            raise ParameterError(f"tuple {self.name}: cpu_length_mi must be >= 0, got {self.cpu_length_mi}")


@dataclass(frozen=True)
class OutputSpec:
    """One output stream of a module: emit one `out_type` per `ratio` inputs."""

    out_type: str
    ratio: int = 1

    def __post_init__(self):
        if not isinstance(self.ratio, int) or isinstance(self.ratio, bool) or self.ratio < 1:
            raise ParameterError(f"output {self.out_type}: emission ratio must be an integer >= 1, got {self.ratio}")


@dataclass(frozen=True)
class AppModule:
    """A processing stage with a fixed MIPS allocation.

    io_map maps an input tuple type to the outputs produced when a tuple of
    that type finishes executing. Output order is preserved; it fixes the
    creation order of child tuples and therefore downstream FIFO order.
    """

    name: str
    allocated_mips: float
    io_map: dict[str, tuple[OutputSpec, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.name:
            raise ParameterError("module name must be non-empty")
        if self.allocated_mips <= 0:
            raise ParameterError(f"module {self.name}: allocated_mips must be > 0, got {self.allocated_mips}")


@dataclass(frozen=True)
class Edge:
    """A directed data flow carrying one tuple type between two endpoints."""

    src: str
    dst: str
    tuple_type: TupleType


@dataclass(frozen=True)
class Loop:
    """A declared sensor-to-display path producing one kind of result."""

    name: str
    endpoints: tuple[str, ...]


@dataclass(frozen=True)
class LoopRoute:
    """A loop resolved against the edge set: endpoint path plus edge labels."""

    name: str
    endpoints: tuple[str, ...]
    tuple_types: tuple[str, ...]


class ApplicationGraph:
    """Immutable dataflow graph: modules, typed edges, and declared loops.

    Construction only indexes the inputs; structural invariants are checked
    by :func:`validate_dag` so that deliberately broken graphs can be built
    and inspected.
    """

    def __init__(self, modules: list[AppModule], edges: list[Edge], loops: list[Loop]):
        names = [m.name for m in modules]
        if len(names) != len(set(names)):
            raise ParameterError("duplicate module names")
        self.modules: dict[str, AppModule] = {m.name: m for m in modules}
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.loops: tuple[Loop, ...] = tuple(loops)

        self.tuple_types: dict[str, TupleType] = {}
        self._edge_by_type: dict[str, Edge] = {}
        for e in self.edges:
            if e.tuple_type.name not in self.tuple_types:
                self.tuple_types[e.tuple_type.name] = e.tuple_type
                self._edge_by_type[e.tuple_type.name] = e

    def edge_for_type(self, type_name: str) -> Edge:
        return self._edge_by_type[type_name]

    def endpoints(self) -> set[str]:
        return set(self.modules) | {SENSOR, DISPLAY}

    def __eq__(self, other):
        if not isinstance(other, ApplicationGraph):
            return NotImplemented
        return (self.modules, self.edges, self.loops) == (other.modules, other.edges, other.loops)


# Table of per-module MIPS allocations for the built-in soil application.
SOIL_MODULE_MIPS = {
    "Sense": 500.0,
    "DataAggregation": 600.0,
    "StatusGeneration": 500.0,
    "EventDetection": 1200.0,
    "SoilAnalytics": 1200.0,
}

SOIL_TUPLE_NAMES = ("t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8")

# Uniform payload sizes keep network-usage arithmetic checkable by hand.
DEFAULT_TUPLE_SIZES_BYTES = {name: 100 for name in SOIL_TUPLE_NAMES}

# Work per tuple, chosen so every processing step takes 10 ms at the default
# allocations (e.g. 5 MI / 500 MIPS). Display-bound tuples execute nothing.
DEFAULT_TUPLE_CPU_MI = {
    "t1": 5.0,
    "t2": 6.0,
    "t3": 5.0,
    "t4": 12.0,
    "t5": 12.0,
    "t6": 0.0,
    "t7": 0.0,
    "t8": 0.0,
}

# One output per input on every stream; keyed by output tuple type.
DEFAULT_EMISSION_RATIOS = {name: 1 for name in SOIL_TUPLE_NAMES if name != "t1"}

SOIL_LOOP_NAMES = ("status", "alert", "recommendation")


def _merged(defaults: dict, overrides: dict | None, what: str) -> dict:
    if not overrides:
        return dict(defaults)
    unknown = sorted(set(overrides) - set(defaults))
    if unknown:
        raise ParameterError(f"unknown {what}: {', '.join(unknown)}")
    out = dict(defaults)
    out.update(overrides)
    return out


def build_soil_app(
    sizes_bytes: dict[str, int] | None = None,
    cpu_mi: dict[str, float] | None = None,
    emission_ratios: dict[str, int] | None = None,
) -> ApplicationGraph:
    """Build the soil-monitoring application graph.

    Sensors feed raw readings (t1) into Sense, which filters them into t2
    for DataAggregation. Aggregated data fans out to StatusGeneration (t3),
    EventDetection (t4) and SoilAnalytics (t5), whose results (t6, t7, t8)
    go to the display. Overrides are partial maps keyed by tuple type name;
    ratios are keyed by output tuple type.

    Raises ParameterError for unknown tuple names or invalid values.
    """
    sizes = _merged(DEFAULT_TUPLE_SIZES_BYTES, sizes_bytes, "tuple type in sizes")
    mi = _merged(DEFAULT_TUPLE_CPU_MI, cpu_mi, "tuple type in cpu_mi")
    ratios = _merged(DEFAULT_EMISSION_RATIOS, emission_ratios, "output tuple type in emission_ratios")

    tt = {name: TupleType(name, sizes[name], mi[name]) for name in SOIL_TUPLE_NAMES}

    def out(name):
        return OutputSpec(name, ratios[name])

    modules = [
        AppModule("Sense", SOIL_MODULE_MIPS["Sense"], {"t1": (out("t2"),)}),
        AppModule("DataAggregation", SOIL_MODULE_MIPS["DataAggregation"], {"t2": (out("t3"), out("t4"), out("t5"))}),
        AppModule("StatusGeneration", SOIL_MODULE_MIPS["StatusGeneration"], {"t3": (out("t6"),)}),
        AppModule("EventDetection", SOIL_MODULE_MIPS["EventDetection"], {"t4": (out("t7"),)}),
        AppModule("SoilAnalytics", SOIL_MODULE_MIPS["SoilAnalytics"], {"t5": (out("t8"),)}),
    ]
    edges = [
        Edge(SENSOR, "Sense", tt["t1"]),
        Edge("Sense", "DataAggregation", tt["t2"]),
        Edge("DataAggregation", "StatusGeneration", tt["t3"]),
        Edge("DataAggregation", "EventDetection", tt["t4"]),
        Edge("DataAggregation", "SoilAnalytics", tt["t5"]),
        Edge("StatusGeneration", DISPLAY, tt["t6"]),
        Edge("EventDetection", DISPLAY, tt["t7"]),
        Edge("SoilAnalytics", DISPLAY, tt["t8"]),
    ]
    loops = [
        Loop("status", (SENSOR, "Sense", "DataAggregation", "StatusGeneration", DISPLAY)),
        Loop("alert", (SENSOR, "Sense", "DataAggregation", "EventDetection", DISPLAY)),
        Loop("recommendation", (SENSOR, "Sense", "DataAggregation", "SoilAnalytics", DISPLAY)),
    ]
    return ApplicationGraph(modules, edges, loops)


def _module_cycles(graph: ApplicationGraph) -> list[list[str]]:
    """Strongly connected components of size > 1 (or with a self edge)."""
    adjacency: dict[str, list[str]] = {m: [] for m in graph.modules}
    for e in graph.edges:
        if e.src in graph.modules and e.dst in graph.modules:
            adjacency[e.src].append(e.dst)

    # Iterative Tarjan; recursion depth is unbounded for long chains.
    index_of: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0

    for root in adjacency:
        if root in index_of:
            continue
        work = [(root, iter(adjacency[root]))]
        index_of[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index_of:
                    index_of[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(adjacency[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index_of[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index_of[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1:
                    sccs.append(sorted(component))
                elif any(d == node for d in adjacency[node]):
                    sccs.append(component)
    return sccs


def validate_dag(graph: ApplicationGraph) -> list[str]:
    """Check all structural invariants; return one message per violation.

    An empty list means the graph is valid. Violations are data, not
    exceptions, so callers can report several problems at once.
    """
    report: list[str] = []
    endpoints = graph.endpoints()

    for e in graph.edges:
        for end in (e.src, e.dst):
            if end not in endpoints:
                report.append(f"edge {e.tuple_type.name}: unknown endpoint {end}")

    seen_types: dict[str, int] = {}
    for e in graph.edges:
        seen_types[e.tuple_type.name] = seen_types.get(e.tuple_type.name, 0) + 1
    for name, n in seen_types.items():
        if n > 1:
            report.append(f"tuple type {name} appears on {n} edges; each type must label exactly one edge")

    for m in graph.modules.values():
        for in_type, outputs in m.io_map.items():
            if in_type not in seen_types:
                report.append(f"module {m.name}: io_map input {in_type} is not a tuple type of the graph")
            for spec in outputs:
                if spec.out_type not in seen_types:
                    report.append(f"module {m.name}: io_map output {spec.out_type} is not a tuple type of the graph")

    for cycle in _module_cycles(graph):
        report.append("cycle among modules: {" + ", ".join(cycle) + "}")

    forward: dict[str, set[str]] = {end: set() for end in endpoints}
    backward: dict[str, set[str]] = {end: set() for end in endpoints}
    for e in graph.edges:
        if e.src in endpoints and e.dst in endpoints:
            forward[e.src].add(e.dst)
            backward[e.dst].add(e.src)

    def reached(start, adjacency):
        seen = {start}
        frontier = deque([start])
        while frontier:
            for nxt in adjacency[frontier.popleft()]:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    from_sensor = reached(SENSOR, forward)
    to_display = reached(DISPLAY, backward)
    for name in graph.modules:
        if name not in from_sensor:
            report.append(f"module {name} is not reachable from {SENSOR}")
        if name not in to_display:
            report.append(f"module {name} cannot reach {DISPLAY}")

    edge_pairs = {(e.src, e.dst) for e in graph.edges}
    for loop in graph.loops:
        if len(loop.endpoints) < 2 or loop.endpoints[0] != SENSOR or loop.endpoints[-1] != DISPLAY:
            report.append(f"loop {loop.name}: must start at {SENSOR} and end at {DISPLAY}")
            continue
        for a, b in zip(loop.endpoints, loop.endpoints[1:]):
            if (a, b) not in edge_pairs:
                report.append(f"loop {loop.name}: no edge {a} -> {b}")

    return report


def loops_of(graph: ApplicationGraph) -> list[LoopRoute]:
    """Resolve each declared loop to its ordered tuple-type sequence.

    Raises ConsistencyError if a loop references an edge that does not
    exist (e.g. after the graph was edited).
    """
    edge_types = {(e.src, e.dst): e.tuple_type.name for e in graph.edges}
    routes = []
    for loop in graph.loops:
        types = []
        for a, b in zip(loop.endpoints, loop.endpoints[1:]):
            if (a, b) not in edge_types:
                raise ConsistencyError(f"loop {loop.name} references missing edge {a} -> {b}")
            types.append(edge_types[(a, b)])
        routes.append(LoopRoute(loop.name, loop.endpoints, tuple(types)))
    return routes
