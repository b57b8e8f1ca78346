"""Fluid queuing network instances: exact rationals, file format, validation,
and the minimum queuing-capacity cut."""
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .maxflow import max_flow

_RAT = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


class InstanceError(ValueError):
    """Raised for malformed or invalid instance files."""


def rat(value):
    """Parse an exact rational from ``"p/q"``, ``"n"``, an int or a Fraction.

    Floats are rejected: they are not exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InstanceError(f"malformed rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RAT.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise InstanceError(f"malformed rational: {value!r} (zero denominator)")
    raise InstanceError(f"malformed rational: {value!r}")


def rat_str(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Arc:
    id: str
    tail: str
    head: str
    capacity: Fraction
    delay: Fraction
    initial_queue: Fraction = Fraction(0)


@dataclass(frozen=True)
class Instance:
    nodes: tuple
    arcs: tuple
    source: str
    sink: str
    inflow: Fraction
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def arc(self, arc_id):
        return self.arc_map[arc_id]

    @property
    def arc_map(self):
        cached = self.__dict__.get("_arc_map")
        if cached is None:
            cached = {a.id: a for a in self.arcs}
            object.__setattr__(self, "_arc_map", cached)
        return cached

    def out_arcs(self, v):
        return [a for a in self.arcs if a.tail == v]

    def in_arcs(self, v):
        return [a for a in self.arcs if a.head == v]

    def with_changes(self, **kw):
        data = dict(nodes=self.nodes, arcs=self.arcs, source=self.source,
                    sink=self.sink, inflow=self.inflow, metadata=dict(self.metadata))
        data.update(kw)
        return Instance(**data)

    def with_initial_queues(self, queues):
        arcs = tuple(
            Arc(a.id, a.tail, a.head, a.capacity, a.delay, Fraction(queues.get(a.id, a.initial_queue)))
            for a in self.arcs
        )
        return self.with_changes(arcs=arcs)

    def scaled(self, factor):
        """Scale all capacities, the inflow and initial queue volumes."""
        k = Fraction(factor)
        arcs = tuple(
            Arc(a.id, a.tail, a.head, a.capacity * k, a.delay, a.initial_queue * k)
            for a in self.arcs
        )
        return self.with_changes(arcs=arcs, inflow=self.inflow * k)


# --------------------------------------------------------------------------
# serialization


def instance_to_dict(inst):
    out = {
        "nodes": list(inst.nodes),
        "source": inst.source,
        "sink": inst.sink,
        "inflow": rat_str(inst.inflow),
        "arcs": [
            {
                "id": a.id,
                "tail": a.tail,
                "head": a.head,
                "capacity": rat_str(a.capacity),
                "delay": rat_str(a.delay),
                "initial_queue": rat_str(a.initial_queue),
            }
            for a in inst.arcs
        ],
    }
    if inst.metadata:
        out["metadata"] = inst.metadata
    return out


def emit_instance(inst, indent=None):
    return json.dumps(instance_to_dict(inst), indent=indent)


def instance_from_dict(data):
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object")
    for key in ("source", "sink"):
        if key not in data:
            raise InstanceError(f"missing {key}")
    for key in ("nodes", "arcs", "inflow"):
        if key not in data:
            raise InstanceError(f"missing {key}")
    nodes = tuple(str(v) for v in data["nodes"])
    if len(set(nodes)) != len(nodes):
        raise InstanceError("duplicate node id")
    node_set = set(nodes)
    arcs = []
    seen = set()
    for raw in data["arcs"]:
        try:
            aid = str(raw["id"])
            tail, head = str(raw["tail"]), str(raw["head"])
            cap, delay = raw["capacity"], raw["delay"]
        except (KeyError, TypeError):
            raise InstanceError(f"arc record missing fields: {raw!r}")
        if aid in seen:
            raise InstanceError(f"duplicate arc id {aid!r}")
        seen.add(aid)
        for v in (tail, head):
            if v not in node_set:
                raise InstanceError(f"arc {aid!r} references unknown node {v!r}")
        arcs.append(Arc(aid, tail, head, rat(cap), rat(delay), rat(raw.get("initial_queue", "0"))))
    source, sink = str(data["source"]), str(data["sink"])
    for v in (source, sink):
        if v not in node_set:
            raise InstanceError(f"unknown node reference {v!r}")
    return Instance(nodes, tuple(arcs), source, sink, rat(data["inflow"]),
                    dict(data.get("metadata", {})))


def parse_instance(text):
    """Parse and validate an instance file; raises InstanceError."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}")
    inst = instance_from_dict(data)
    report = validate(inst)
    if report.errors:
        raise InstanceError("; ".join(v.message for v in report.errors))
    return inst


def load_instance(path):
    with open(path) as fh:
        return parse_instance(fh.read())


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    ref: str
    message: str


@dataclass
class Validation:
    errors: list
    warnings: list
    reachable: set = field(default_factory=set)

    @property
    def ok(self):
        return not self.errors


def _reach(adj, start):
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def validate(inst):
    errors, warnings = [], []
    if inst.source == inst.sink:
        errors.append(Violation("source-sink", inst.source, "source and sink must differ"))
    if inst.inflow <= 0:
        errors.append(Violation("inflow", "inflow", "inflow must be positive"))
    node_set = set(inst.nodes)
    for v in (inst.source, inst.sink):
        if v not in node_set:
            errors.append(Violation("node", v, f"unknown node reference {v!r}"))
    seen = set()
    for a in inst.arcs:
        if a.id in seen:
            errors.append(Violation("arc", a.id, f"duplicate arc id {a.id!r}"))
        seen.add(a.id)
        if a.capacity <= 0:
            errors.append(Violation("capacity", a.id, f"arc {a.id}: capacity must be positive"))
        if a.delay < 0:
            errors.append(Violation("delay", a.id, f"arc {a.id}: delay must be nonnegative"))
        if a.initial_queue < 0:
            errors.append(Violation("initial_queue", a.id, f"arc {a.id}: initial queue must be nonnegative"))
        for v in (a.tail, a.head):
            if v not in node_set:
                errors.append(Violation("node", a.id, f"arc {a.id}: unknown node {v!r}"))

    cyc = _zero_delay_cycle(inst)
    if cyc:
        errors.append(Violation("zero-delay cycle", cyc[0], "zero-delay cycle through arcs " + ",".join(cyc)))

    fwd, bwd = {}, {}
    for a in inst.arcs:
        fwd.setdefault(a.tail, []).append(a.head)
        bwd.setdefault(a.head, []).append(a.tail)
    reach = _reach(fwd, inst.source)
    coreach = _reach(bwd, inst.sink)
    if inst.sink not in reach:
        errors.append(Violation("unreachable sink", inst.sink, "sink is not reachable from the source"))
    for v in inst.nodes:
        if v not in reach:
            warnings.append(Violation("unreachable node", v, f"node {v} is unreachable from the source"))
    for a in inst.arcs:
        if a.tail in reach and a.head not in coreach:
            warnings.append(Violation("dead-end arc", a.id, f"arc {a.id} lies on no source-sink path"))
    return Validation(errors, warnings, reach)


def ensure_valid(inst):
    report = validate(inst)
    if report.errors:
        raise InstanceError("; ".join(v.message for v in report.errors))
    return report


def _zero_delay_cycle(inst):
    zero = {}
    for a in inst.arcs:
        if a.delay == 0:
            zero.setdefault(a.tail, []).append(a)
    color = {}
    stack_arcs = []

    def dfs(u):
        color[u] = 1
        for a in zero.get(u, ()):
            stack_arcs.append(a.id)
            if color.get(a.head) == 1:
                return True
            if color.get(a.head) is None and dfs(a.head):
                return True
            stack_arcs.pop()
        color[u] = 2
        return False

    for v in list(zero):
        if color.get(v) is None and dfs(v):
            return list(stack_arcs)
    return None


# --------------------------------------------------------------------------
# cuts


@dataclass(frozen=True)
class CutReport:
    capacity: Fraction
    cut_arcs: frozenset
    source_side: frozenset


def min_queuing_cut(inst):
    """Minimum-capacity s-t cut with the setwise-minimal source side."""
    value, _, side = max_flow(
        inst.nodes, [(a.tail, a.head, a.capacity) for a in inst.arcs], inst.source, inst.sink
    )
    cut = frozenset(a.id for a in inst.arcs if a.tail in side and a.head not in side)
    return CutReport(value, cut, frozenset(side))
