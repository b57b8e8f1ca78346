from fractions import Fraction
import sys
from functools import lru_cache
from itertools import combinations

import pytest

from nashflow import gadgets
from nashflow.engine import solve_equilibrium

F = Fraction


def catalog():
    """Small instances covering every generator; all satisfy u0 <= min cut."""
    ex1 = gadgets.example_one(1, 2)
    steady_start = ex1.with_initial_queues({"g": F(2, 3)})
    return {
        "example_one": ex1,
        "example_one_u12": gadgets.example_one(12, 1),
        "example_one_steady_start": steady_start,
        "example_three": gadgets.example_three(),
        "example_three_eps": gadgets.example_three(F(1, 100)),
        "figure_chain": gadgets.figure_chain(1, 1),
        "pulse_2": gadgets.pulse(1, 2, 1),
        "two_link_3": gadgets.two_link(3),
        "single_arc": gadgets.single_arc(2, 1),
        "exponential_1": gadgets.exponential(1),
        "damper_1": gadgets.damper(1, 1),
    }


CATALOG = catalog()


@lru_cache(maxsize=None)
def trajectory(name):
    return solve_equilibrium(CATALOG[name])


@pytest.fixture(params=sorted(CATALOG))
def catalog_name(request):
    return request.param


# --------------------------------------------------------------------------
# independent oracles (deliberately naive)


def gauss_solve(rows, rhs):
    """Plain Gauss-Jordan over Fractions; None if singular."""
    n = len(rows)
    a = [list(map(F, r)) + [F(b)] for r, b in zip(rows, rhs)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return None
        a[c], a[piv] = a[piv], a[c]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c] / a[c][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[i][n] / a[i][i] for i in range(n)]


def st_paths(inst):
    out = []

    def walk(v, seen, path):
        if v == inst.sink:
            out.append(tuple(path))
            return
        for a in inst.out_arcs(v):
            if a.head not in seen:
                walk(a.head, seen | {a.head}, path + [a.id])

    walk(inst.source, {inst.source}, [])
    return out


def path_lp_optimum(inst):
    """Min-cost steady flow by enumerating vertices of the path-flow LP."""
    paths = st_paths(inst)
    cost = [sum(inst.arc(e).delay for e in p) for p in paths]
    n = len(paths)
    # constraints: sum p = u0 (always tight), arc loads <= nu, p >= 0
    cons = []
    for a in inst.arcs:
        cons.append(([F(1) if a.id in p else F(0) for p in paths], a.capacity))
    for i in range(n):
        cons.append(([F(1) if j == i else F(0) for j in range(n)], F(0)))
    best = None
    eq = ([F(1)] * n, inst.inflow)
    for subset in combinations(range(len(cons)), n - 1):
        rows = [eq[0]] + [cons[i][0] for i in subset]
        rhs = [eq[1]] + [cons[i][1] for i in subset]
        x = gauss_solve(rows, rhs)
        if x is None or any(v < 0 for v in x):
            continue
        if any(sum(c * v for c, v in zip(row, x)) > b for row, b in cons[: len(inst.arcs)]):
            continue
        val = sum(c * v for c, v in zip(cost, x))
        best = val if best is None else min(best, val)
    return best


def brute_force_cut(inst):
    """Minimum s-t cut capacity and all minimizing source sides."""
    others = [v for v in inst.nodes if v not in (inst.source, inst.sink)]
    best, sides = None, []
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            side = {inst.source, *extra}
            cap = sum((a.capacity for a in inst.arcs if a.tail in side and a.head not in side), F(0))
            if best is None or cap < best:
                best, sides = cap, [side]
            elif cap == best:
                sides.append(side)
    return best, sides


def random_ntfr_problems(count=200, seed=2024):
    """Random thin-flow problems: at most 6 nodes and 10 arcs, random E* in E'."""
    import random

    from nashflow.model import Arc
    from nashflow.ntfr import ThinFlowProblem

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(2, 6)
        nodes = [f"n{i}" for i in range(n)]
        arcs = [Arc(f"p{i}", nodes[i], nodes[i + 1], F(rng.randint(1, 6), rng.randint(1, 4)), F(0))
                for i in range(n - 1)]
        for j in range(rng.randint(0, 10 - (n - 1))):
            a, b = sorted(rng.sample(range(n), 2))
            arcs.append(Arc(f"a{j:02d}", nodes[a], nodes[b], F(rng.randint(1, 6), rng.randint(1, 4)), F(0)))
        active = {a.id for a in arcs if rng.random() < 0.8} | {f"p{i}" for i in range(n - 1)}
        resetting = {e for e in sorted(active) if rng.random() < 0.4}
        out.append(ThinFlowProblem(tuple(nodes), tuple(arcs), nodes[0], nodes[-1], frozenset(active),
                                   frozenset(resetting), F(rng.randint(1, 5), rng.randint(1, 3))))
    return out


def cycle_cancel_optimum(inst):
    """Min-cost steady flow by BFS augmentation then negative-cycle canceling."""
    edges = []  # [tail, head, residual capacity, cost, partner index]
    for a in inst.arcs:
        edges.append([a.tail, a.head, a.capacity, a.delay, len(edges) + 1])
        edges.append([a.head, a.tail, F(0), -a.delay, len(edges) - 1])
    left = inst.inflow
    while left > 0:
        prev = {inst.source: None}
        queue = [inst.source]
        for v in queue:
            for i, (x, y, cap, _, _) in enumerate(edges):
                if x == v and cap > 0 and y not in prev:
                    prev[y] = i
                    queue.append(y)
        if inst.sink not in prev:
            return None
        path, v = [], inst.sink
        while prev[v] is not None:
            path.append(prev[v])
            v = edges[prev[v]][0]
        push = min([left] + [edges[i][2] for i in path])
        for i in path:
            edges[i][2] -= push
            edges[edges[i][4]][2] += push
        left -= push
    while True:
        dist = {v: F(0) for v in inst.nodes}
        pred = {v: None for v in inst.nodes}
        last = None
        for _ in range(len(inst.nodes)):
            last = None
            for i, (x, y, cap, c, _) in enumerate(edges):
                if cap > 0 and dist[x] + c < dist[y]:
                    dist[y] = dist[x] + c
                    pred[y] = i
                    last = y
        if last is None:
            break
        for _ in range(len(inst.nodes)):
            last = edges[pred[last]][0]
        cycle, v = [], last
        while True:
            i = pred[v]
            cycle.append(i)
            v = edges[i][0]
            if v == last:
                break
        push = min(edges[i][2] for i in cycle)
        for i in cycle:
            edges[i][2] -= push
            edges[edges[i][4]][2] += push
    return sum(e[3] * (inst.arc(a.id).capacity - e[2]) for a, e in zip(inst.arcs, edges[::2]))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(number))
