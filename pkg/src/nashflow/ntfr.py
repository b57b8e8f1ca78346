"""Normalized thin flows with resetting (NTFR).

Given the active arcs E' and the resetting (queued) arcs E* ⊆ E', an NTFR is
a pair (label derivatives, flow derivatives) with

* the flow derivatives forming a static s-t flow of value ``inflow``,
* ``l'_s = 1`` and ``l'_w = min over active e=vw of rho_e(l'_v, x'_e)``,
* every flow-carrying active arc attaining that minimum,

where ``rho_e = x'_e / nu_e`` on resetting arcs and
``max(l'_v, x'_e / nu_e)`` otherwise. The label part is unique.

Solving is split in two steps. First the labels: the active subgraph is
acyclic, so it is cut into series blocks at nodes every s-t path passes
through; each block is solved through its series-parallel decomposition
when it has one, and by exhaustive enumeration otherwise. Second the flow:
once labels are known the admissible flows form a polytope, and the
lexicographically smallest point (by arc id) is returned.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import kernels
from .maxflow import FlowNetwork

ONE = Fraction(1)
ZERO = Fraction(0)


class NTFRError(RuntimeError):
    pass


@dataclass(frozen=True)
class ThinFlowProblem:
    nodes: tuple
    arcs: tuple
    source: str
    sink: str
    active: frozenset
    resetting: frozenset
    inflow: Fraction

    @classmethod
    def from_instance(cls, inst, active, resetting):
        return cls(inst.nodes, inst.arcs, inst.source, inst.sink,
                   frozenset(active), frozenset(resetting), inst.inflow)


@dataclass(frozen=True)
class ThinFlow:
    labels: dict
    flows: dict

    def label(self, v):
        return self.labels[v]


def rho(arc, tail_label, flow, resetting):
    if arc.id in resetting:
        return flow / arc.capacity
    return max(tail_label, flow / arc.capacity)


# --------------------------------------------------------------------------
# graph helpers


def _reach(arcs, start, forward=True):
    adj = {}
    for a in arcs:
        u, v = (a.tail, a.head) if forward else (a.head, a.tail)
        adj.setdefault(u, []).append(v)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _topo(nodes, arcs):
    indeg = {v: 0 for v in nodes}
    out = {v: [] for v in nodes}
    for a in arcs:
        indeg[a.head] += 1
        out[a.tail].append(a.head)
    order = [v for v in nodes if indeg[v] == 0]
    i = 0
    while i < len(order):
        for w in out[order[i]]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
        i += 1
    if len(order) != len(nodes):
        raise NTFRError("active arcs contain a directed cycle")
    return order


def core_arcs(prob):
    """Active arcs lying on some s-t path inside the active subgraph."""
    act = [a for a in prob.arcs if a.id in prob.active]
    reach = _reach(act, prob.source)
    if prob.sink not in reach:
        raise NTFRError("no s-t path among the active arcs")
    coreach = _reach(act, prob.sink, forward=False)
    return act, reach, [a for a in act if a.tail in reach and a.head in coreach]


def series_blocks(nodes, arcs, source, sink):
    """Split a two-terminal DAG at its s-t separating nodes.

    Returns a list of ``(block_source, block_sink, block_nodes, block_arcs)``.
    """
    order = _topo(list(nodes), arcs)
    pos = {v: i for i, v in enumerate(order)}
    # covered[i] > 0 iff some arc jumps over position i
    diff = [0] * (len(order) + 1)
    for a in arcs:
        lo, hi = pos[a.tail], pos[a.head]
        if hi - lo > 1:
            diff[lo + 1] += 1
            diff[hi] -= 1
    cuts = []
    run = 0
    for i, v in enumerate(order):
        run += diff[i]
        if run == 0:
            cuts.append(v)
    blocks = []
    for b0, b1 in zip(cuts, cuts[1:]):
        lo, hi = pos[b0], pos[b1]
        bnodes = order[lo:hi + 1]
        barcs = [a for a in arcs if lo <= pos[a.tail] and pos[a.head] <= hi]
        blocks.append((b0, b1, bnodes, barcs))
    return blocks


# --------------------------------------------------------------------------
# piecewise-linear response curves for series-parallel blocks


class Curve:
    """Nondecreasing continuous piecewise-linear map inflow -> head label.

    ``pts`` are breakpoints ``(u, L)`` with strictly increasing ``u``
    starting at 0; ``slope`` is the slope of the final ray.
    """

    __slots__ = ("pts", "slope")

    def __init__(self, pts, slope):
        self.pts = pts
        self.slope = slope
        if slope <= 0:
            raise NTFRError("response curve with non-increasing tail")

    def __call__(self, u):
        pts = self.pts
        if u >= pts[-1][0]:
            return pts[-1][1] + self.slope * (u - pts[-1][0])
        for (u0, l0), (u1, l1) in zip(pts, pts[1:]):
            if u <= u1:
                return l0 + (l1 - l0) * (u - u0) / (u1 - u0)
        raise AssertionError

    def segment(self, u):
        """Intercept/slope ``(p, q)`` of the piece valid just right of ``u``."""
        pts = self.pts
        for (u0, l0), (u1, l1) in zip(pts, pts[1:]):
            if u < u1:
                q = (l1 - l0) / (u1 - u0)
                return l0 - q * u0, q
        u0, l0 = pts[-1]
        return l0 - self.slope * u0, self.slope

    def hi(self, lam):
        """Largest inflow whose label is <= lam (0 if none)."""
        pts = self.pts
        if pts[0][1] > lam:
            return ZERO
        u_last, l_last = pts[-1]
        if lam >= l_last:
            return u_last + (lam - l_last) / self.slope
        for (u0, l0), (u1, l1) in zip(pts, pts[1:]):
            if l0 <= lam < l1:
                return u0 + (u1 - u0) * (lam - l0) / (l1 - l0)
        raise AssertionError

    def lo(self, lam):
        """Smallest inflow whose label is >= lam."""
        pts = self.pts
        if pts[0][1] >= lam:
            return ZERO
        u_last, l_last = pts[-1]
        if lam > l_last:
            return u_last + (lam - l_last) / self.slope
        for (u0, l0), (u1, l1) in zip(pts, pts[1:]):
            if l0 < lam <= l1:
                return u0 + (u1 - u0) * (lam - l0) / (l1 - l0)
        raise AssertionError


def _dedupe(pts):
    out = []
    for p in pts:
        if out and out[-1][0] == p[0]:
            continue
        out.append(p)
    return out


def arc_curve(arc, resetting):
    nu = arc.capacity
    if arc.id in resetting:
        return Curve([(ZERO, ZERO)], 1 / nu)
    return Curve([(ZERO, ONE), (nu, ONE)], 1 / nu)


def parallel_curve(curves):
    lam_min = min(c.pts[0][1] for c in curves)
    lams = sorted({l for c in curves for _, l in c.pts if l >= lam_min} | {lam_min})
    pts = []
    for lam in lams:
        pts.append((sum(c.lo(lam) for c in curves), lam))
        pts.append((sum(c.hi(lam) for c in curves), lam))
    inv = sum(1 / c.slope for c in curves)
    return Curve(_dedupe(pts), 1 / inv)


def series_curve(a, b):
    def value(u):
        if u == 0:
            av = a(ZERO)
            return av * b(ZERO) if av > 0 else ZERO
        av = a(u)
        return av * b(u / av)

    cands = {u for u, _ in a.pts}
    bounds = [u for u, _ in a.pts] + [None]
    for k in range(len(a.pts)):
        u_lo, u_hi = bounds[k], bounds[k + 1]
        p, q = a.segment(u_lo)
        for y, _ in b.pts:
            den = 1 - y * q
            if den == 0:
                continue
            u = y * p / den
            if u > 0 and u >= u_lo and (u_hi is None or u <= u_hi):
                cands.add(u)
    us = sorted(cands)
    pts = [(u, value(u)) for u in us]
    # final ray: a is affine and u/a(u) stays inside one piece of b
    u_far = us[-1] + 1
    p, q = a.segment(us[-1])
    pb, qb = b.segment(u_far / a(u_far))
    return Curve(pts, pb * q + qb)


class _SPNode:
    __slots__ = ("kind", "children", "mid", "arc", "curve", "tail", "head")

    def __init__(self, kind, tail, head, children=(), mid=None, arc=None):
        self.kind = kind
        self.tail = tail
        self.head = head
        self.children = list(children)
        self.mid = mid
        self.arc = arc
        self.curve = None


def sp_decompose(source, sink, arcs):
    """Series-parallel decomposition tree of a two-terminal DAG, or None."""
    elems = [_SPNode("arc", a.tail, a.head, arc=a) for a in arcs]
    changed = True
    while changed:
        changed = False
        groups = {}
        for e in elems:
            groups.setdefault((e.tail, e.head), []).append(e)
        if any(len(g) > 1 for g in groups.values()):
            elems = []
            for (u, v), g in groups.items():
                if len(g) == 1:
                    elems.append(g[0])
                else:
                    elems.append(_SPNode("P", u, v, children=g))
            changed = True
        ins, outs = {}, {}
        for e in elems:
            outs.setdefault(e.tail, []).append(e)
            ins.setdefault(e.head, []).append(e)
        done = set()
        merged = []
        for x in list(ins):
            if x in (source, sink):
                continue
            if len(ins[x]) == 1 and len(outs.get(x, ())) == 1:
                e1, e2 = ins[x][0], outs[x][0]
                if id(e1) in done or id(e2) in done:
                    continue
                done.update((id(e1), id(e2)))
                merged.append(_SPNode("S", e1.tail, e2.head, children=(e1, e2), mid=x))
        if merged:
            elems = [e for e in elems if id(e) not in done] + merged
            changed = True
    if len(elems) == 1 and elems[0].tail == source and elems[0].head == sink:
        return elems[0]
    return None


def _build_curves(node, resetting):
    if node.kind == "arc":
        node.curve = arc_curve(node.arc, resetting)
    elif node.kind == "S":
        a, b = node.children
        _build_curves(a, resetting)
        _build_curves(b, resetting)
        node.curve = series_curve(a.curve, b.curve)
    else:
        for c in node.children:
            _build_curves(c, resetting)
        node.curve = parallel_curve([c.curve for c in node.children])


def _recover(node, alpha, flow, labels):
    if node.kind == "arc":
        return
    if alpha == 0:
        for c in node.children:
            _zero_labels(c, labels)
        if node.kind == "S":
            labels[node.mid] = ZERO
        return
    y = flow / alpha
    if node.kind == "S":
        a, b = node.children
        mid = alpha * a.curve(y)
        labels[node.mid] = mid
        _recover(a, alpha, flow, labels)
        _recover(b, mid, flow, labels)
        return
    lam = node.curve(y)
    shares = [c.curve.lo(lam) for c in node.children]
    rest = y - sum(shares)
    for i, c in enumerate(node.children):
        if rest <= 0:
            break
        extra = min(c.curve.hi(lam) - shares[i], rest)
        shares[i] += extra
        rest -= extra
    for c, share in zip(node.children, shares):
        _recover(c, alpha, alpha * share, labels)


def _zero_labels(node, labels):
    if node.kind == "S":
        labels[node.mid] = ZERO
    for c in node.children:
        _zero_labels(c, labels)


def solve_block_sp(source, sink, arcs, resetting, inflow):
    tree = sp_decompose(source, sink, arcs)
    if tree is None:
        return None
    _build_curves(tree, resetting)
    labels = {source: ONE, sink: tree.curve(inflow)}
    _recover(tree, ONE, inflow, labels)
    return labels


# --------------------------------------------------------------------------
# enumeration


def _ordered_partitions(items):
    """All weak orders of ``items`` as lists of blocks (lowest level first)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _ordered_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        for i in range(len(part) + 1):
            yield part[:i] + [[first]] + part[i:]


class _UF:
    def __init__(self, items):
        self.p = {v: v for v in items}

    def find(self, v):
        while self.p[v] != v:
            self.p[v] = self.p[self.p[v]]
            v = self.p[v]
        return v

    def union(self, a, b):
        self.p[self.find(a)] = self.find(b)


def _try_pattern(source, sink, nodes, arcs, resetting, inflow, states, group):
    """Solve one guessed pattern.

    ``states[arc.id]`` is "forced", "free" or "zero" for non-resetting arcs;
    ``group[v]`` names the label variable of node ``v``. Returns labels or
    None when the guess is inconsistent.
    """
    uf = _UF(nodes)
    for a in arcs:
        if states.get(a.id) == "free":
            uf.union(a.tail, a.head)
    classes = sorted({uf.find(v) for v in nodes}, key=str)
    cls_index = {c: i for i, c in enumerate(classes)}
    var_names = sorted({group[v] for v in nodes if group[v] != group[source]}, key=str)
    var_index = {g: i for i, g in enumerate(var_names)}
    n = len(var_names)
    rows = [[ZERO] * n for _ in classes]
    rhs = [ZERO] * len(classes)
    src_cls = cls_index[uf.find(source)]
    snk_cls = cls_index[uf.find(sink)]
    rhs[snk_cls] += inflow
    rhs[src_cls] -= inflow
    for a in arcs:
        if a.id not in resetting and states[a.id] != "forced":
            continue
        ci, co = cls_index[uf.find(a.head)], cls_index[uf.find(a.tail)]
        if ci == co:
            continue
        g = group[a.head]
        if g == group[source]:
            rhs[ci] -= a.capacity
            rhs[co] += a.capacity
        else:
            j = var_index[g]
            rows[ci][j] += a.capacity
            rows[co][j] -= a.capacity
    sol = kernels.solve_exact(rows, rhs) if n else ([] if all(r == 0 for r in rhs) else None)
    if sol is None:
        return None
    val = {group[source]: ONE}
    for g, x in zip(var_names, sol):
        if x < 0:
            return None
        val[g] = x
    labels = {v: val[group[v]] for v in nodes}
    # sign conditions and the minimum condition
    has_tight = {v: False for v in nodes}
    for a in arcs:
        lv, lw = labels[a.tail], labels[a.head]
        if a.id in resetting:
            has_tight[a.head] = True
            continue
        st = states[a.id]
        if st == "forced":
            if lv > lw:
                return None
            has_tight[a.head] = True
        elif st == "free":
            if lv != lw:
                return None
            has_tight[a.head] = True
        else:
            if lv < lw:
                return None
            if lv == lw:
                has_tight[a.head] = True
    for v in nodes:
        if v != source and not has_tight[v]:
            return None
    if admissible_flows(source, sink, arcs, resetting, inflow, labels, set(a.id for a in arcs)) is None:
        return None
    return labels


def solve_block_orderings(source, sink, nodes, arcs, resetting, inflow, reverse=False):
    """Enumerate weak orders of the labels; each fixes every arc's regime."""
    items = sorted(nodes, key=str, reverse=reverse)
    for levels in _ordered_partitions(items):
        lev = {v: i for i, blk in enumerate(levels) for v in blk}
        states = {}
        for a in arcs:
            if a.id in resetting:
                continue
            lv, lw = lev[a.tail], lev[a.head]
            states[a.id] = "forced" if lv < lw else ("free" if lv == lw else "zero")
        labels = _try_pattern(source, sink, nodes, arcs, resetting, inflow, states, lev)
        if labels is None:
            continue
        vals = sorted({(lev[v], labels[v]) for v in nodes})
        if any(x[1] >= y[1] for x, y in zip(vals, vals[1:])):
            continue
        return labels
    return None


def solve_block_patterns(source, sink, nodes, arcs, resetting, inflow, reverse=False):
    """Enumerate per-arc regimes (forced / free / zero) directly."""
    free_arcs = sorted((a for a in arcs if a.id not in resetting), key=lambda a: a.id, reverse=reverse)
    choices = ("forced", "free", "zero") if not reverse else ("zero", "free", "forced")
    for combo in product(choices, repeat=len(free_arcs)):
        states = {a.id: s for a, s in zip(free_arcs, combo)}
        uf = _UF(nodes)
        for a in free_arcs:
            if states[a.id] == "free":
                uf.union(a.tail, a.head)
        group = {v: uf.find(v) for v in nodes}
        labels = _try_pattern(source, sink, nodes, arcs, resetting, inflow, states, group)
        if labels is not None:
            return labels
    return None


_BLOCK_METHODS = {
    "orderings": solve_block_orderings,
    "patterns": solve_block_patterns,
}


def _solve_block(b0, b1, bnodes, barcs, resetting, inflow, method, reverse):
    if method in ("auto", "sp"):
        labels = solve_block_sp(b0, b1, barcs, resetting, inflow)
        if labels is not None:
            return labels
        if method == "sp":
            raise NTFRError("block is not series-parallel")
        method = "orderings"
    labels = _BLOCK_METHODS[method](b0, b1, bnodes, barcs, resetting, inflow, reverse=reverse)
    if labels is None:
        raise NTFRError(f"no thin flow found for block {b0}->{b1}")
    return labels


# --------------------------------------------------------------------------
# flows


def arc_bounds(arc, labels, resetting):
    """Admissible flow interval ``(lo, hi)`` on an active arc given labels."""
    lv, lw = labels[arc.tail], labels[arc.head]
    full = arc.capacity * lw
    if arc.id in resetting or lv < lw:
        return full, full
    if lv == lw:
        return ZERO, full
    return ZERO, ZERO


def admissible_flows(source, sink, arcs, resetting, inflow, labels, active, tie_break=None):
    """A flow of value ``inflow`` within the label-implied arc bounds.

    ``tie_break`` selects a canonical point of that polytope: ``"lexmax"``
    gives the lexicographically largest flow vector ordered by arc id,
    ``"lexmin"`` the smallest. Returns None if no such flow exists.
    """
    bounds = {}
    for a in arcs:
        if a.id in active and a.tail in labels and a.head in labels:
            bounds[a.id] = arc_bounds(a, labels, resetting)
        else:
            bounds[a.id] = (ZERO, ZERO)
    demand = {}
    demand[source] = demand.get(source, ZERO) + inflow
    demand[sink] = demand.get(sink, ZERO) - inflow
    for a in arcs:
        lo = bounds[a.id][0]
        if lo:
            demand[a.tail] = demand.get(a.tail, ZERO) - lo
            demand[a.head] = demand.get(a.head, ZERO) + lo
    net = FlowNetwork()
    edge = {}
    for a in sorted(arcs, key=lambda a: a.id):
        lo, hi = bounds[a.id]
        if hi > lo:
            edge[a.id] = net.add_edge(a.tail, a.head, hi - lo)
    src, snk = ("__S__",), ("__T__",)
    net.add_node(src)
    net.add_node(snk)
    supers = set()
    need = ZERO
    for v, d in demand.items():
        if d > 0:
            i = net.add_edge(src, v, d)
            need += d
        elif d < 0:
            i = net.add_edge(v, snk, -d)
        else:
            continue
        supers.update((i, i ^ 1))
    if net.augment(src, snk) != need:
        return None
    if tie_break is not None:
        blocked = set(supers)
        by_id = {a.id: a for a in arcs}
        for aid in sorted(edge):
            i = edge[aid]
            a = by_id[aid]
            blocked.update((i, i ^ 1))
            if tie_break == "lexmin":
                # cancel flow on a by rerouting it tail -> head elsewhere
                moved = net.augment(a.tail, a.head, limit=net.flow[i], blocked=blocked)
                net.flow[i] -= moved
                net.flow[i ^ 1] += moved
            else:
                # close cycles through a: route head -> tail elsewhere
                room = net.residual(i)
                if room > 0:
                    moved = net.augment(a.head, a.tail, limit=room, blocked=blocked)
                    net.flow[i] += moved
                    net.flow[i ^ 1] -= moved
    flows = {}
    for a in arcs:
        lo = bounds[a.id][0]
        flows[a.id] = lo + (net.flow[edge[a.id]] if a.id in edge else ZERO)
    return flows


# --------------------------------------------------------------------------
# public API


def solve_ntfr(prob, method="auto", reverse=False, tie_break="lexmax"):
    """Compute the NTFR of ``prob``.

    ``method`` is ``"auto"`` (series-parallel where possible, weak-order
    enumeration otherwise), ``"sp"``, ``"orderings"`` or ``"patterns"``.
    ``reverse`` flips the enumeration order; the result must not change.
    ``tie_break`` picks x' when it is not unique (see ``admissible_flows``).
    """
    act, reach, core = core_arcs(prob)
    resetting = prob.resetting
    core_nodes = {prob.source, prob.sink}
    for a in core:
        core_nodes.update((a.tail, a.head))
    labels = {prob.source: ONE}
    for b0, b1, bnodes, barcs in series_blocks(core_nodes, core, prob.source, prob.sink):
        alpha = labels[b0]
        if alpha == 0:
            raise NTFRError("zero label at a series node")
        sub = _solve_block(b0, b1, bnodes, barcs, resetting, prob.inflow / alpha, method, reverse)
        for v, lab in sub.items():
            if v != b0:
                labels[v] = alpha * lab

    # nodes reached by active arcs but not leading to the sink
    reach_arcs = [a for a in act if a.tail in reach]
    for w in _topo(sorted(reach, key=str), reach_arcs):
        if w in labels:
            continue
        best = None
        for a in reach_arcs:
            if a.head == w:
                r = ZERO if a.id in resetting else labels[a.tail]
                best = r if best is None or r < best else best
        labels[w] = best

    flows = admissible_flows(prob.source, prob.sink, prob.arcs, resetting, prob.inflow,
                             labels, prob.active, tie_break=tie_break)
    if flows is None:
        raise NTFRError("labels admit no feasible flow")
    return ThinFlow(labels, flows)


def verify_ntfr(prob, cand):
    """List of violated NTFR conditions; empty iff ``cand`` is an NTFR."""
    out = []
    labels, flows = cand.labels, cand.flows
    resetting, active = prob.resetting, prob.active
    if not resetting <= active:
        out.append("resetting arcs not active: " + ",".join(sorted(resetting - active)))
    if labels.get(prob.source) != ONE:
        out.append(f"source label {labels.get(prob.source)} != 1")
    bal = {v: ZERO for v in prob.nodes}
    for a in prob.arcs:
        x = flows.get(a.id, ZERO)
        if x < 0:
            out.append(f"negative flow on {a.id}")
        if a.id not in active and x != 0:
            out.append(f"inactive arc {a.id} carries flow")
        bal[a.tail] += x
        bal[a.head] -= x
    for v in prob.nodes:
        want = prob.inflow if v == prob.source else (-prob.inflow if v == prob.sink else ZERO)
        if bal[v] != want:
            out.append(f"conservation at {v}")
    act = [a for a in prob.arcs if a.id in active]
    reach = _reach(act, prob.source)
    for w in sorted(reach, key=str):
        if w not in labels:
            out.append(f"missing label at {w}")
    for w in sorted(reach - {prob.source}, key=str):
        if w not in labels:
            continue
        rhos = [rho(a, labels[a.tail], flows.get(a.id, ZERO), resetting)
                for a in act if a.head == w and a.tail in labels]
        if rhos and labels[w] != min(rhos):
            out.append(f"label recursion at {w}")
    for a in act:
        x = flows.get(a.id, ZERO)
        if x > 0 and a.tail in labels and a.head in labels:
            if labels[a.head] != rho(a, labels[a.tail], x, resetting):
                out.append(f"tightness on {a.id}")
    return out
