"""The potential ``Phi = u0 (l_t - l_s) - sum of queues`` and the
pseudopolynomial convergence bounds built on it."""
import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

ZERO = Fraction(0)


def phi(snap, inst=None):
    inst = inst or snap.instance
    queues = sum(snap.entry_queues.values(), ZERO)
    return inst.inflow * (snap.labels[inst.sink] - snap.labels[inst.source]) - queues


def _plus_arcs(tf, cls):
    """E+ : resetting arcs plus active arcs carrying flow."""
    return set(cls.queued) | {e for e in cls.active if tf.flows.get(e, ZERO) > 0}


def phi_rate(tf, cls, inst):
    lp = tf.labels
    rate = inst.inflow * (lp[inst.sink] - lp[inst.source])
    for a in inst.arcs:
        if a.id in _plus_arcs(tf, cls):
            rate -= a.capacity * (lp[a.head] - lp[a.tail])
    for e in cls.draining:
        a = inst.arc(e)
        rate += a.capacity * lp[a.tail]
    return rate


def phi_rate_oracle(tf, cls, inst):
    """Rate of ``Phi`` by integrating capacity imbalances of level sets.

    For each ``z`` let ``V_z`` be the nodes with ``l'_v <= z``. With the
    arcs of E+ and a return arc t->s of capacity u0, the rate is minus the
    integral over ``z`` of (capacity leaving ``V_z``) - (capacity entering).
    Initial queues still draining on inactive arcs add ``nu * l'_v``.
    """
    lp = tf.labels
    arcs = [(a.tail, a.head, a.capacity) for a in inst.arcs if a.id in _plus_arcs(tf, cls)]
    arcs.append((inst.sink, inst.source, inst.inflow))
    levels = sorted(set(lp.values()))
    total = ZERO
    for lo, hi in zip(levels, levels[1:]):
        inside = {v for v, x in lp.items() if x <= lo}
        imbalance = ZERO
        for u, v, cap in arcs:
            if u in inside and v not in inside:
                imbalance += cap
            elif v in inside and u not in inside:
                imbalance -= cap
        total -= imbalance * (hi - lo)
    for e in cls.draining:
        a = inst.arc(e)
        total += a.capacity * lp[a.tail]
    return total


@dataclass(frozen=True)
class PseudoBounds:
    K: int
    M: Fraction
    T: Fraction
    time_bound: Fraction
    queue_bound: Fraction


def pseudo_bounds(inst):
    K = lcm(inst.inflow.denominator, *(a.capacity.denominator for a in inst.arcs))
    M = sum((a.capacity for a in inst.arcs), ZERO)
    T = sum((a.delay + a.initial_queue / a.capacity for a in inst.arcs), ZERO)
    return PseudoBounds(K, M, T, 2 * K**2 * M**2 * T, 2 * inst.inflow * K**3 * M**2 * T)


@dataclass(frozen=True)
class PotentialTrace:
    theta_starts: tuple
    values: tuple
    rates: tuple
    alpha: Fraction  # optimum of the steady-state LP, None if infeasible

    def rows(self):
        return list(zip(self.theta_starts, self.values, self.rates))


def potential_trace(traj):
    from .steady import LPInfeasible, solve_primal

    inst = traj.instance
    try:
        alpha = solve_primal(inst).cost
    except LPInfeasible:
        alpha = None
    starts, vals, rates = [], [], []
    for ph in traj.phases:
        starts.append(ph.theta_start)
        vals.append(phi(ph.start))
        rates.append(phi_rate(ph.thin_flow, ph.classification, inst))
    return PotentialTrace(tuple(starts), tuple(vals), tuple(rates), alpha)


def _dec(q):
    from .report import decimal_str

    return decimal_str(q)


def trace_csv(trace):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta_start", "phi", "phi_rate", "theta_start_dec", "phi_dec", "phi_rate_dec"])
    for th, val, rate in trace.rows():
        w.writerow([str(th), str(val), str(rate), _dec(th), _dec(val), _dec(rate)])
    return buf.getvalue()
