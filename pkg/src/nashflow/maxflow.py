"""Exact augmenting-path max flow (Edmonds-Karp) over rationals."""
from collections import deque
from fractions import Fraction


class FlowNetwork:
    """Residual network with paired forward/backward edges.

    Edges are stored in flat lists; edge ``i ^ 1`` is the reverse of ``i``.
    """

    def __init__(self, nodes=()):
        self.adj = {v: [] for v in nodes}
        self.to = []
        self.cap = []
        self.flow = []

    def add_node(self, v):
        self.adj.setdefault(v, [])

    def add_edge(self, u, v, cap, flow=0):
        self.add_node(u)
        self.add_node(v)
        idx = len(self.to)
        self.to += [v, u]
        self.cap += [Fraction(cap), Fraction(0)]
        self.flow += [Fraction(flow), -Fraction(flow)]
        self.adj[u].append(idx)
        self.adj[v].append(idx + 1)
        return idx

    def residual(self, i):
        return self.cap[i] - self.flow[i]

    def _bfs(self, s, t, blocked):
        pred = {s: None}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for i in self.adj[u]:
                if i in blocked:
                    continue
                v = self.to[i]
                if v not in pred and self.cap[i] - self.flow[i] > 0:
                    pred[v] = i
                    if v == t:
                        return pred
                    queue.append(v)
        return pred

    def augment(self, s, t, limit=None, blocked=frozenset()):
        """Push up to ``limit`` (default: unbounded) units from s to t."""
        pushed = Fraction(0)
        if s == t:
            return pushed
        while limit is None or pushed < limit:
            pred = self._bfs(s, t, blocked)
            if t not in pred:
                break
            path = []
            v = t
            while v != s:
                i = pred[v]
                path.append(i)
                v = self.to[i ^ 1]
            delta = min(self.cap[i] - self.flow[i] for i in path)
            if limit is not None:
                delta = min(delta, limit - pushed)
            for i in path:
                self.flow[i] += delta
                self.flow[i ^ 1] -= delta
            pushed += delta
        return pushed

    def reachable(self, s, blocked=frozenset()):
        return set(self._bfs(s, object(), blocked))


def max_flow(nodes, arcs, source, sink):
    """Max flow for ``arcs = [(tail, head, capacity), ...]``.

    Returns ``(value, flows, source_side)`` where ``source_side`` is the set
    of nodes reachable from the source in the final residual graph (the
    setwise-minimal minimum cut).
    """
    net = FlowNetwork(nodes)
    ids = [net.add_edge(u, v, c) for u, v, c in arcs]
    value = net.augment(source, sink)
    flows = [net.flow[i] for i in ids]
    return value, flows, net.reachable(source)
