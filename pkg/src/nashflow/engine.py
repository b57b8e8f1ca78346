"""Phase-by-phase integration of a dynamic equilibrium.

Each phase solves the thin flow for the arc classes at its start, moves
every label, queue and cumulative flow linearly, and stops at the first
time an inactive arc becomes tight or a queue empties.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .dynamics import (CorruptedState, Snapshot, classify_arcs, initial_labels,
                       queue_slope)
from .model import ensure_valid, min_queuing_cut
from .ntfr import ThinFlowProblem, solve_ntfr

ZERO = Fraction(0)
ONE = Fraction(1)
DEFAULT_MAX_PHASES = 10000


@dataclass(frozen=True)
class Event:
    """Why a phase ended.

    ``kind`` is one of ``ArcActivates``, ``QueueDepletes`` (or both joined
    by ``+``), ``SteadyState``, ``Horizon``.
    """
    kind: str
    activates: frozenset = frozenset()
    depletes: frozenset = frozenset()


@dataclass(frozen=True)
class Phase:
    index: int
    theta_start: Fraction
    theta_end: Fraction  # None stands for infinity
    thin_flow: object
    classification: object
    ending_event: Event
    start: Snapshot = field(repr=False)
    queue_slopes: dict = field(repr=False, default_factory=dict)

    def snapshot_at(self, theta):
        return advance(self.start, self.thin_flow, theta - self.theta_start, self.queue_slopes)

    def end_snapshot(self):
        if self.theta_end is None:
            raise ValueError("phase never ends")
        return self.snapshot_at(self.theta_end)


@dataclass(frozen=True)
class SteadyState:
    theta: Fraction
    name = "steady"
    exit_code = 0


@dataclass(frozen=True)
class UnboundedGrowth:
    theta: Fraction
    sink_rate: Fraction
    name = "unbounded"
    exit_code = 2


@dataclass(frozen=True)
class HorizonReached:
    theta: Fraction
    name = "horizon"
    exit_code = 3


@dataclass(frozen=True)
class PhaseCapReached:
    theta: Fraction
    recent: tuple = ()
    name = "phase-cap"
    exit_code = 3


@dataclass(frozen=True)
class Trajectory:
    instance: object
    initial: Snapshot
    phases: tuple
    status: object

    def phase_at(self, theta):
        for ph in self.phases:
            if ph.theta_end is None or theta < ph.theta_end:
                if theta < ph.theta_start:
                    break
                return ph
        if self.phases and theta == self.phases[-1].theta_end:
            return self.phases[-1]
        raise ValueError(f"theta {theta} outside the simulated range")

    def snapshot_at(self, theta):
        return self.phase_at(Fraction(theta)).snapshot_at(Fraction(theta))

    @property
    def boundaries(self):
        return [ph.theta_end for ph in self.phases if ph.theta_end is not None]

    @property
    def end_time(self):
        return self.phases[-1].theta_end


def _slopes(snap, tf):
    inst = snap.instance
    out = {}
    for a in inst.arcs:
        if a.tail not in tf.labels:
            out[a.id] = ZERO
            continue
        out[a.id] = queue_slope(a, snap.entry_queues[a.id], tf.flows.get(a.id, ZERO),
                                tf.labels[a.tail])
    return out


def phase_horizon(snap, tf, slopes=None):
    """Time ``delta`` until the next event, and the event (None if never)."""
    inst = snap.instance
    if slopes is None:
        slopes = _slopes(snap, tf)
    values, rates, refs = [], [], []
    for a in inst.arcs:
        if a.tail not in tf.labels or a.head not in tf.labels:
            continue
        z = snap.entry_queues[a.id]
        if z < 0:
            raise CorruptedState(f"negative queue on {a.id}")
        if z > 0:
            values.append(z)
            rates.append(slopes[a.id])
            refs.append(("depletes", a.id))
        sl = snap.slack(a)
        if sl < 0:
            raise CorruptedState(f"negative slack on {a.id}")
        if sl > 0:
            rate = tf.labels[a.tail] + slopes[a.id] / a.capacity - tf.labels[a.head]
            values.append(sl)
            rates.append(rate)
            refs.append(("activates", a.id))
    delta, hits = kernels.earliest_event(values, rates)
    if delta is None:
        return None, None
    act = frozenset(refs[i][1] for i in hits if refs[i][0] == "activates")
    dep = frozenset(refs[i][1] for i in hits if refs[i][0] == "depletes")
    kind = "+".join(k for k, s in (("ArcActivates", act), ("QueueDepletes", dep)) if s)
    return delta, Event(kind, act, dep)


def advance(snap, tf, delta, slopes=None):
    """Move a snapshot ``delta`` time units along a thin flow."""
    if delta == 0:
        return snap
    if delta < 0:
        raise ValueError("cannot advance backwards")
    inst = snap.instance
    if slopes is None:
        slopes = _slopes(snap, tf)
    nodes = list(snap.labels)
    labels = dict(zip(nodes, kernels.axpy([snap.labels[v] for v in nodes],
                                          [tf.labels.get(v, ZERO) for v in nodes], delta)))
    ids = [a.id for a in inst.arcs]
    queues = kernels.axpy([snap.entry_queues[i] for i in ids], [slopes[i] for i in ids], delta)
    flows = kernels.axpy([snap.static_flows[i] for i in ids],
                         [tf.flows.get(i, ZERO) for i in ids], delta)
    for i, z in zip(ids, queues):
        if z < 0:
            raise CorruptedState(f"queue on {i} would turn negative")
    return Snapshot(inst, snap.theta + delta, labels, dict(zip(ids, queues)), dict(zip(ids, flows)))


def detect_steady_state(tf, delta):
    return delta is None and all(v == 1 for v in tf.labels.values())


def default_horizon(inst):
    """The pseudopolynomial convergence bound when it applies, else None."""
    from .potential import pseudo_bounds

    if inst.inflow > min_queuing_cut(inst).capacity:
        return None
    return pseudo_bounds(inst).time_bound


def solve_phase(snap, method="auto", tie_break="lexmax"):
    cls = classify_arcs(snap)
    prob = ThinFlowProblem.from_instance(snap.instance, cls.active, cls.queued)
    return cls, solve_ntfr(prob, method=method, tie_break=tie_break)


def solve_equilibrium(inst, max_phases=DEFAULT_MAX_PHASES, horizon="auto",
                      method="auto", tie_break="lexmax"):
    """Integrate the equilibrium from time 0 until it becomes steady or a
    limit is hit. ``horizon="auto"`` uses :func:`default_horizon`; None
    disables it."""
    ensure_valid(inst)
    if horizon == "auto":
        # may be 0 when every delay and initial queue vanishes
        horizon = default_horizon(inst)
    elif horizon is not None and horizon <= 0:
        raise ValueError("horizon must be positive")
    snap = initial_labels(inst)
    first = snap
    phases = []
    while True:
        theta = snap.theta
        if len(phases) >= max_phases:
            recent = tuple(ph.classification for ph in phases[-10:])
            return Trajectory(inst, first, tuple(phases), PhaseCapReached(theta, recent))
        cls, tf = solve_phase(snap, method, tie_break)
        slopes = _slopes(snap, tf)
        delta, event = phase_horizon(snap, tf, slopes)
        idx = len(phases)
        if delta is None:
            if detect_steady_state(tf, delta):
                phases.append(Phase(idx, theta, None, tf, cls, Event("SteadyState"), snap, slopes))
                return Trajectory(inst, first, tuple(phases), SteadyState(theta))
            if inst.inflow <= min_queuing_cut(inst).capacity:
                raise CorruptedState("labels grow forever although the inflow fits the min cut")
            phases.append(Phase(idx, theta, None, tf, cls, None, snap, slopes))
            rate = inst.inflow / tf.labels[inst.sink]
            return Trajectory(inst, first, tuple(phases), UnboundedGrowth(theta, rate))
        if horizon is not None and theta + delta > horizon:
            end = max(Fraction(horizon), theta)
            if end > theta:
                phases.append(Phase(idx, theta, end, tf, cls, Event("Horizon"), snap, slopes))
            return Trajectory(inst, first, tuple(phases), HorizonReached(end))
        phases.append(Phase(idx, theta, theta + delta, tf, cls, event, snap, slopes))
        snap = advance(snap, tf, delta, slopes)
