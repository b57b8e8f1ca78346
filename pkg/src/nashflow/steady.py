"""The steady-state linear programs.

(P) is a min-cost flow: route ``u0`` from s to t within capacities at
minimum total delay. Its dual (D) carries node distances ``d`` and arc
queue times ``q``. A dynamic equilibrium that settles reaches a steady
state whose label offsets and queue times solve (D).
"""
import heapq
from dataclasses import dataclass
from fractions import Fraction

from .maxflow import FlowNetwork

ZERO = Fraction(0)


class LPInfeasible(ValueError):
    """The inflow exceeds the minimum cut capacity."""


@dataclass(frozen=True)
class SteadyFlow:
    flows: dict
    cost: Fraction


@dataclass(frozen=True)
class DualSolution:
    d: dict
    q: dict
    objective: Fraction


def _network(inst):
    net = FlowNetwork(inst.nodes)
    cost = []
    ids = []
    for a in inst.arcs:
        ids.append(net.add_edge(a.tail, a.head, a.capacity))
        cost += [a.delay, -a.delay]
    return net, cost, ids


def _dijkstra(net, cost, pot, s):
    dist = {s: ZERO}
    pred = {}
    heap = [(ZERO, 0, s)]
    tick = 1
    done = set()
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for i in net.adj[u]:
            if net.residual(i) <= 0:
                continue
            v = net.to[i]
            nd = d + cost[i] + pot[u] - pot[v]
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                pred[v] = i
                heapq.heappush(heap, (nd, tick, v))
                tick += 1
    return dist, pred


def _min_cost_flow(inst):
    net, cost, ids = _network(inst)
    pot = {v: ZERO for v in inst.nodes}
    need = inst.inflow
    while need > 0:
        dist, pred = _dijkstra(net, cost, pot, inst.source)
        if inst.sink not in dist:
            raise LPInfeasible("inflow exceeds the minimum cut capacity")
        far = max(dist.values())
        for v in inst.nodes:
            pot[v] += dist.get(v, far)
        path = []
        v = inst.sink
        while v != inst.source:
            i = pred[v]
            path.append(i)
            v = net.to[i ^ 1]
        delta = min([need] + [net.residual(i) for i in path])
        for i in path:
            net.flow[i] += delta
            net.flow[i ^ 1] -= delta
        need -= delta
    return net, cost, ids


def solve_primal(inst):
    _, _, _, flow = _solve(inst)
    return flow


def _solve(inst):
    net, cost, ids = _min_cost_flow(inst)
    flows = {a.id: net.flow[i] for a, i in zip(inst.arcs, ids)}
    total = sum((a.delay * flows[a.id] for a in inst.arcs), ZERO)
    return net, cost, ids, SteadyFlow(flows, total)


def extract_dual(inst, primal=None):
    """Dual optimum complementary to the min-cost flow.

    ``d`` is the shortest-path distance from s in the final residual graph,
    where nodes cut off from s are attached by an expensive artificial arc
    so every distance is finite; ``q`` absorbs the remaining slack on
    saturated arcs. Every optimal primal has the same dual optima, so
    ``primal`` is only accepted for symmetry with the LP pair.
    """
    net, cost, ids, flow = _solve(inst)
    big = sum((a.delay for a in inst.arcs), ZERO) + 1
    d = {v: big for v in inst.nodes}
    d[inst.source] = ZERO
    edges = [(net.to[i ^ 1], net.to[i], cost[i]) for i in range(len(net.to)) if net.residual(i) > 0]
    for _ in range(len(inst.nodes)):
        changed = False
        for u, v, c in edges:
            if d[u] + c < d[v]:
                d[v] = d[u] + c
                changed = True
        if not changed:
            break
    q = {}
    for a in inst.arcs:
        q[a.id] = ZERO
        if flow.flows[a.id] == a.capacity:
            q[a.id] = max(ZERO, d[a.head] - d[a.tail] - a.delay)
    return DualSolution(d, q, dual_objective(inst, d, q))


def dual_objective(inst, d, q):
    return inst.inflow * d[inst.sink] - sum((a.capacity * q[a.id] for a in inst.arcs), ZERO)


def primal_violations(inst, flows):
    out = []
    bal = {v: ZERO for v in inst.nodes}
    for a in inst.arcs:
        y = flows.get(a.id, ZERO)
        if y < 0 or y > a.capacity:
            out.append(f"flow on {a.id} outside [0, capacity]")
        bal[a.tail] += y
        bal[a.head] -= y
    for v in inst.nodes:
        want = inst.inflow if v == inst.source else (-inst.inflow if v == inst.sink else ZERO)
        if bal[v] != want:
            out.append(f"conservation at {v}")
    return out


def dual_violations(inst, d, q):
    out = []
    if d.get(inst.source) != 0:
        out.append("d_s != 0")
    for a in inst.arcs:
        if q[a.id] < 0:
            out.append(f"negative q on {a.id}")
        if a.tail in d and a.head in d and d[a.head] > d[a.tail] + a.delay + q[a.id]:
            out.append(f"dual constraint of {a.id}")
    return out


def verify_optimal_pair(inst, flow, dual):
    """Both feasible, equal objectives and complementary slackness."""
    if primal_violations(inst, flow.flows) or dual_violations(inst, dual.d, dual.q):
        return False
    cost = sum((a.delay * flow.flows.get(a.id, ZERO) for a in inst.arcs), ZERO)
    if cost != dual_objective(inst, dual.d, dual.q):
        return False
    for a in inst.arcs:
        y = flow.flows.get(a.id, ZERO)
        if dual.q[a.id] > 0 and y != a.capacity:
            return False
        if y > 0 and dual.d[a.head] != dual.d[a.tail] + a.delay + dual.q[a.id]:
            return False
    return True


@dataclass(frozen=True)
class SteadyReport:
    theta_star: Fraction
    z: dict
    q: dict
    d: dict
    alpha: Fraction
    lp_flow: SteadyFlow
    lp_dual: DualSolution
    simulated_objective: Fraction
    dual_feasible: bool
    dual_optimal: bool
    matches_lp_objective: bool
    max_transient_queue: dict
    problems: tuple

    @property
    def ok(self):
        return self.dual_feasible and self.dual_optimal and self.matches_lp_objective


def steady_report(traj):
    """Compare the simulated steady state with the LP optimum."""
    if traj.status.name != "steady":
        raise ValueError("trajectory did not reach a steady state")
    inst = traj.instance
    theta = traj.status.theta
    final = traj.phases[-1]
    snap = final.start
    z = dict(snap.entry_queues)
    q = {a.id: z[a.id] / a.capacity for a in inst.arcs}
    d = {v: lab - theta for v, lab in snap.labels.items()}
    flow = solve_primal(inst)
    dual = extract_dual(inst, flow)
    problems = list(dual_violations(inst, d, q))
    for a in inst.arcs:
        if a.tail not in d and q[a.id] != 0:
            problems.append(f"queue on unreachable arc {a.id}")
    sim_obj = inst.inflow * d[inst.sink] - sum((a.capacity * q[a.id] for a in inst.arcs), ZERO)
    dual_feasible = not problems
    dual_optimal = sim_obj == flow.cost
    xp = {a.id: final.thin_flow.flows.get(a.id, ZERO) for a in inst.arcs}
    prim = primal_violations(inst, xp)
    xp_cost = sum((a.delay * xp[a.id] for a in inst.arcs), ZERO)
    matches = not prim and xp_cost == flow.cost
    if not dual_optimal:
        problems.append(f"dual objective {sim_obj} != LP optimum {flow.cost}")
    if not matches:
        problems += prim + [f"final flow cost {xp_cost} != LP optimum {flow.cost}"]
    peak = {a.id: ZERO for a in inst.arcs}
    for ph in traj.phases:
        snaps = [ph.start] + ([ph.end_snapshot()] if ph.theta_end is not None else [])
        for s in snaps:
            for e, val in s.entry_queues.items():
                peak[e] = max(peak[e], val)
    return SteadyReport(theta, z, q, d, flow.cost, flow, dual, sim_obj, dual_feasible,
                        dual_optimal, matches, peak, tuple(problems))
