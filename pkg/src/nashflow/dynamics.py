"""Point-in-time state of an equilibrium: labels, queues, arc classes, and
the cumulative-flow identity that characterizes equilibria."""
import heapq
from dataclasses import dataclass, field
from fractions import Fraction

ZERO = Fraction(0)


class CorruptedState(RuntimeError):
    """An internal consistency check on a snapshot failed."""


def exit_time(entry, z, arc):
    """Time a particle entering ``arc`` at ``entry`` behind queue ``z`` leaves it."""
    if z < 0:
        raise ValueError("queue must be nonnegative")
    return entry + z / arc.capacity + arc.delay


def drain_exit_time(entry, arc):
    """Exit time through an arc that holds only its initial queue.

    The initial queue is served from local time 0, so at local time ``entry``
    ``max(0, z0 - nu*entry)`` of it is still waiting.
    """
    return max(entry, arc.initial_queue / arc.capacity) + arc.delay


def queue_slope(arc, zhat, x_prime, tail_prime):
    """Derivative of the entry-time queue under a thin flow."""
    s = x_prime - arc.capacity * tail_prime
    return s if zhat > 0 else max(ZERO, s)


@dataclass(frozen=True)
class Snapshot:
    instance: object = field(repr=False, compare=False)
    theta: Fraction
    labels: dict
    entry_queues: dict
    static_flows: dict

    def slack(self, arc):
        """``T_e(l_v) - l_w``; zero exactly on active arcs."""
        lv = self.labels[arc.tail]
        return lv + self.entry_queues[arc.id] / arc.capacity + arc.delay - self.labels[arc.head]


@dataclass(frozen=True)
class ArcClassification:
    active: frozenset
    queued: frozenset
    # inactive arcs still emptying their initial queue
    draining: frozenset = frozenset()


def initial_labels(inst):
    """Earliest arrival labels at global time 0 (dynamic Dijkstra)."""
    labels = {inst.source: ZERO}
    done = set()
    heap = [(ZERO, 0, inst.source)]
    tick = 1
    while heap:
        d, _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for a in inst.out_arcs(v):
            t = drain_exit_time(d, a)
            if a.head not in labels or t < labels[a.head]:
                labels[a.head] = t
                heapq.heappush(heap, (t, tick, a.head))
                tick += 1
    if inst.sink not in labels:
        raise ValueError("sink is not reachable from the source")
    queues = {}
    for a in inst.arcs:
        if a.tail in labels:
            queues[a.id] = max(ZERO, a.initial_queue - a.capacity * labels[a.tail])
        else:
            queues[a.id] = a.initial_queue
    return Snapshot(inst, ZERO, labels, queues, {a.id: ZERO for a in inst.arcs})


def classify_arcs(snap):
    inst = snap.instance
    active, queued, draining = set(), set(), set()
    for a in inst.arcs:
        if a.tail not in snap.labels or a.head not in snap.labels:
            continue
        sl = snap.slack(a)
        if sl < 0:
            raise CorruptedState(f"arc {a.id} beats its head label by {-sl}")
        if sl == 0:
            active.add(a.id)
            if snap.entry_queues[a.id] > 0:
                queued.add(a.id)
        elif snap.entry_queues[a.id] > 0:
            draining.add(a.id)
    return ArcClassification(frozenset(active), frozenset(queued), frozenset(draining))


def check_snapshot(snap):
    """Snapshot invariant violations as strings (empty when consistent)."""
    out = []
    inst = snap.instance
    if snap.labels.get(inst.source) != snap.theta:
        out.append("source label differs from theta")
    for v, lab in snap.labels.items():
        if lab < 0:
            out.append(f"negative label at {v}")
    for a in inst.arcs:
        if snap.entry_queues[a.id] < 0:
            out.append(f"negative queue on {a.id}")
        if a.tail not in snap.labels:
            continue
        sl = snap.slack(a)
        if sl < 0:
            out.append(f"label of {a.head} exceeds exit time via {a.id}")
        elif sl > 0 and snap.entry_queues[a.id] > 0:
            # only the untouched initial queue may sit on an inactive arc
            left = a.initial_queue - a.capacity * snap.labels[a.tail]
            if snap.entry_queues[a.id] != left or snap.static_flows[a.id] != 0:
                out.append(f"queue on inactive arc {a.id}")
    return out


# --------------------------------------------------------------------------
# cumulative flows


def inflow_curve(traj, arc_id):
    """Cumulative inflow ``F+`` of an arc as a function of tail local time.

    Returns ``(points, final_slope)`` with points ``(xi, F)``; ``F`` is 0
    before the first point and continues linearly after the last one.
    """
    arc = traj.instance.arc(arc_id)
    pts = []
    for ph in traj.phases:
        snap = ph.start
        pts.append((snap.labels[arc.tail], snap.static_flows[arc_id]))
    last = traj.phases[-1]
    if last.theta_end is not None:
        end = last.end_snapshot()
        pts.append((end.labels[arc.tail], end.static_flows[arc_id]))
        slope = ZERO
    else:
        lp = last.thin_flow.labels.get(arc.tail, ZERO)
        xp = last.thin_flow.flows.get(arc_id, ZERO)
        slope = xp / lp if lp else ZERO
    # equal local times (frozen tail label) keep the latest value
    clean = []
    for xi, val in pts:
        if clean and clean[-1][0] == xi:
            clean[-1] = (xi, val)
        else:
            clean.append((xi, val))
    return clean, slope


def _eval_curve(pts, slope, xi):
    if xi < pts[0][0]:
        return ZERO
    for (x0, f0), (x1, f1) in zip(pts, pts[1:]):
        if xi < x1:
            return f0 + (f1 - f0) * (xi - x0) / (x1 - x0)
    return pts[-1][1] + slope * (xi - pts[-1][0])


def departures(arc, pts, slope, xi):
    """Cumulative outflow of the queue (before the delay) by local time ``xi``.

    The queue is a point queue of rate ``nu`` fed by the initial volume at
    local time 0 and the cumulative inflow ``F+``; with ``A = z0 + F+`` this
    is ``min(nu*xi, min over s in [0, xi] of A(s) + nu*(xi - s))``.
    """
    if xi <= 0:
        return ZERO
    nu = arc.capacity
    z0 = arc.initial_queue

    def arrived(s):
        return z0 + _eval_curve(pts, slope, s)

    best = min(nu * xi, arrived(xi))
    for s in [ZERO] + [p[0] for p in pts]:
        if 0 <= s <= xi:
            best = min(best, arrived(s) + nu * (xi - s))
    return best


@dataclass(frozen=True)
class IdentityCheck:
    ok: bool
    arc: str = None
    inflow: Fraction = None
    outflow: Fraction = None

    def __bool__(self):
        return self.ok


def check_cumulative_identity(traj, theta):
    """Check ``z0 + F+_e(l_v(theta)) = F-_e(T_e(l_v(theta)))`` on every arc.

    ``F-`` is computed from the inflow history alone, so this independently
    checks the integrated queues, and ``T_e = l_w`` on active arcs.
    """
    snap = traj.snapshot_at(theta)
    for a in traj.instance.arcs:
        if a.tail not in snap.labels:
            continue
        pts, slope = inflow_curve(traj, a.id)
        lv = snap.labels[a.tail]
        lhs = a.initial_queue + _eval_curve(pts, slope, lv)
        exit_ = exit_time(lv, snap.entry_queues[a.id], a)
        if snap.slack(a) == 0:
            exit_ = snap.labels[a.head]
        rhs = departures(a, pts, slope, exit_ - a.delay)
        if lhs != rhs:
            return IdentityCheck(False, a.id, lhs, rhs)
    return IdentityCheck(True)


def sink_inflow_schedule(traj):
    """Total flow rate into the sink as a function of sink local time.

    Returns ``[(start, end, value), ...]`` with ``end`` None for the last
    piece. The rate is ``u0 / l'_t`` on the local image of each phase,
    cross-checked against the thin flow on the arcs into the sink.
    """
    inst = traj.instance
    t = inst.sink
    pieces = []
    first = traj.phases[0].start.labels[t]
    if first > 0:
        pieces.append((ZERO, first, ZERO))
    into = [a.id for a in inst.arcs if a.head == t]
    for ph in traj.phases:
        lp = ph.thin_flow.labels[t]
        if lp == 0:
            continue
        val = inst.inflow / lp
        direct = sum((ph.thin_flow.flows[a] for a in into), ZERO) / lp
        if direct != val:
            raise CorruptedState(f"sink rate mismatch in phase {ph.index}")
        start = ph.start.labels[t]
        end = None if ph.theta_end is None else ph.end_snapshot().labels[t]
        if end is not None and end == start:
            continue
        if pieces and pieces[-1][2] == val:
            pieces[-1] = (pieces[-1][0], end, val)
        else:
            pieces.append((start, end, val))
    return pieces


def schedule_value(pieces, xi):
    for start, end, val in pieces:
        if start <= xi and (end is None or xi < end):
            return val
    return ZERO
