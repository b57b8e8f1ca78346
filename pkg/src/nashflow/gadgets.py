"""Generators for the instance families: Example 1 and 3, the pulse
chain, the damper, the exponential-phase construction and the two-link
lower bound, plus series composition."""
from fractions import Fraction
from math import ceil

from .model import Arc, Instance, ensure_valid, rat_str

LAMBDA = Fraction(13, 12)
ZERO = Fraction(0)


def _instance(nodes, arcs, source, sink, inflow, **meta):
    inst = Instance(tuple(nodes), tuple(Arc(*a) for a in arcs), source, sink, Fraction(inflow), meta)
    ensure_valid(inst)
    return inst


def single_arc(capacity=1, delay=0, inflow=1, initial_queue=0):
    return _instance(["s", "t"], [("e", "s", "t", Fraction(capacity), Fraction(delay),
                                   Fraction(initial_queue))],
                     "s", "t", inflow, gadget="single_arc")


def example_one(u=1, tau=2):
    u, tau = Fraction(u), Fraction(tau)
    arcs = [
        ("e", "s", "t", u / 3, tau),
        ("f", "s", "v", 3 * u / 4, ZERO),
        ("g", "v", "t", u / 3, ZERO),
        ("h", "v", "t", u, tau),
    ]
    return _instance(["s", "v", "t"], arcs, "s", "t", u,
                     gadget="example_one", u=rat_str(u), tau=rat_str(tau))


def example_three(eps=0):
    """Example 1 (u=1, tau=2) followed by two parallel arcs into a new sink.

    With ``eps > 0`` the capacity of arc b is raised to ``1/3 + eps``.
    """
    base = example_one(1, 2)
    arcs = [(a.id, a.tail, a.head, a.capacity, a.delay) for a in base.arcs]
    arcs += [("a", "t", "t^", Fraction(2, 3), ZERO),
             ("b", "t", "t^", Fraction(1, 3) + Fraction(eps), Fraction(1))]
    return _instance(["s", "v", "t", "t^"], arcs, "s", "t^", 1,
                     gadget="example_three", eps=rat_str(eps))


def figure_chain(u=1, rho=1):
    """Example 1 with tau = 5 rho / 6, then arcs e' and f' into a new sink."""
    u, rho = Fraction(u), Fraction(rho)
    base = example_one(u, 5 * rho / 6)
    arcs = [(a.id, a.tail, a.head, a.capacity, a.delay) for a in base.arcs]
    arcs += [("e'", "t", "t'", u, rho / 4), ("f'", "t", "t'", u / 3, ZERO)]
    return _instance(["s", "v", "t", "t'"], arcs, "s", "t'", u,
                     gadget="figure_chain", u=rat_str(u), rho=rat_str(rho))


def _renamed(inst, prefix, rename=None):
    rename = dict(rename or {})

    def node(v):
        return rename.get(v, prefix + v)

    nodes = [node(v) for v in inst.nodes]
    arcs = [(prefix + a.id, node(a.tail), node(a.head), a.capacity, a.delay, a.initial_queue)
            for a in inst.arcs]
    return nodes, arcs, node(inst.source), node(inst.sink)


def series_compose(g, h, left="G.", right="H.", **meta):
    """Feed the sink of ``g`` into the source of ``h``.

    Node and arc ids get the prefixes ``left`` and ``right``; the source of
    ``h`` is merged into the sink of ``g``. The inflow is that of ``g``.
    """
    gn, ga, gs, gt = _renamed(g, left)
    hn, ha, _, ht = _renamed(h, right, {h.source: gt})
    nodes = gn + [v for v in hn if v != gt]
    meta = dict(meta) or {"gadget": "series", "parts": [g.metadata, h.metadata]}
    return _instance(nodes, ga + ha, gs, ht, g.inflow, **meta)


def _chain(parts, inflow, **meta):
    """Series composition of named parts ``[(prefix, instance), ...]``."""
    nodes, arcs = [], []
    prev_sink = None
    source = None
    for prefix, inst in parts:
        rename = {inst.source: prev_sink} if prev_sink is not None else {}
        n, a, s, t = _renamed(inst, prefix, rename)
        if source is None:
            source = s
        nodes += [v for v in n if v not in nodes]
        arcs += a
        prev_sink = t
    return _instance(nodes, arcs, source, prev_sink, inflow, **meta)


def pulse(u=1, k=1, rho=1):
    """PULSE(u, k, rho): k figure chains in series with growing capacities.

    Stage j (1-based) is ``figure_chain(LAMBDA**(j-1) u, (5/3)**(k-j) rho)``,
    which unrolls the recursion PULSE(u, k-1, 5 rho / 3) then
    PULSE(LAMBDA**(k-1) u, 1, rho).
    """
    u, rho = Fraction(u), Fraction(rho)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k == 1:
        inst = figure_chain(u, rho)
        return inst.with_changes(metadata={"gadget": "pulse", "u": rat_str(u), "k": 1,
                                           "rho": rat_str(rho)})
    parts = [(f"p{j}.", figure_chain(LAMBDA ** (j - 1) * u, Fraction(5, 3) ** (k - j) * rho))
             for j in range(1, k + 1)]
    return _chain(parts, u, gadget="pulse", u=rat_str(u), k=k, rho=rat_str(rho))


def pulse_alpha(k):
    """Start of the amplified pulse in units of rho (sink local time)."""
    return Fraction(21, 8) * (Fraction(5, 3) ** k - 1)


# --------------------------------------------------------------------------
# damper


def _damper_core(k, rho):
    """Arc e feeding PULSE(LAMBDA**-k, k, rho), then arc g into the sink."""
    low = LAMBDA ** -k
    inner = pulse(low, k, rho)
    e = _instance(["s", "a"], [("e", "s", "a", low, ZERO)], "s", "a", 1)
    g = _instance(["b", "t"], [("g", "b", "t", Fraction(1), ZERO)], "b", "t", 1)
    return _chain([("", e), ("P.", inner), ("", g)], 1)


def calibrate_damper(k, rho, max_phases=200000):
    """Choose the bypass delay of DAMPER(k, rho).

    Simulate the damper without its bypass. Its last phase starts when the
    pulse gadget settles into constant outflow LAMBDA**-k; call that time
    ``theta_ss``. The bypass must stay longer than the gadget route until
    that damped outflow has lasted 2 rho in sink local time, i.e. until
    ``theta_c = theta_ss + 2 rho / LAMBDA**k`` at the source. Then the last
    rho of the damped window is preceded by at least rho more of it, which
    puts the two full-rate windows more than 2 rho apart. The delay is the
    largest travel time through the gadget up to ``theta_c``.
    """
    from .engine import solve_equilibrium

    core = _damper_core(k, rho)
    traj = solve_equilibrium(core, max_phases=max_phases, horizon=None)
    if traj.status.name != "unbounded":
        raise RuntimeError(f"damper calibration: unexpected status {traj.status.name}")
    theta_ss = traj.phases[-1].theta_start
    theta_c = theta_ss + 2 * rho / LAMBDA ** k
    t = core.sink
    best = ZERO
    for ph in traj.phases:
        if ph.theta_start > theta_c:
            break
        best = max(best, ph.start.labels[t] - ph.theta_start)
    snap = traj.snapshot_at(theta_c)
    best = max(best, snap.labels[t] - theta_c)
    return best, theta_ss, theta_c


def damper(k=1, rho=1, tau_f=None):
    """DAMPER(k, rho) with inflow 1 and a calibrated bypass arc f."""
    rho = Fraction(rho)
    core = _damper_core(k, rho)
    meta = {"gadget": "damper", "k": k, "rho": rat_str(rho)}
    if tau_f is None:
        tau_f, theta_ss, theta_c = calibrate_damper(k, rho)
        meta.update(theta_ss=rat_str(theta_ss), theta_c=rat_str(theta_c))
    meta["tau_f"] = rat_str(tau_f)
    arcs = [(a.id, a.tail, a.head, a.capacity, a.delay) for a in core.arcs]
    arcs.append(("f", core.source, core.sink, Fraction(1), Fraction(tau_f)))
    return _instance(core.nodes, arcs, core.source, core.sink, 1, **meta)


# --------------------------------------------------------------------------
# exponential


def min_exponential_c(d):
    """Smallest power of two with 2 (10d)^4 (12^(15d))^2 <= C^(d-1)."""
    if d < 2:
        return 1
    need = 2 * (10 * d) ** 4 * 12 ** (30 * d)
    # smallest e with 2^(e (d-1)) >= need
    e = ceil((need.bit_length() - 1) / (d - 1))
    while 2 ** (e * (d - 1)) < need:
        e += 1
    while e > 0 and 2 ** ((e - 1) * (d - 1)) >= need:
        e -= 1
    return 2 ** e


def exponential(d=1, C=None):
    """EXPONENTIAL(d): DAMPER(15d, C^((d-1)^2)) followed by EXPONENTIAL(d-1)."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if d == 1:
        return _instance(["s", "t"], [("a", "s", "t", Fraction(1, 3), ZERO),
                                      ("b", "s", "t", Fraction(2, 3), Fraction(1))],
                         "s", "t", 1, gadget="exponential", d=1)
    least = min_exponential_c(d)
    if C is None:
        C = least
    if C < least:
        raise ValueError(f"C={C} is below the minimum {least} for d={d}")
    g = damper(15 * d, Fraction(C) ** ((d - 1) ** 2))
    h = exponential(d - 1, C if d - 1 >= 2 and C >= min_exponential_c(d - 1) else None)
    return _chain([("D.", g), ("X.", h)], 1, gadget="exponential", d=d, C=str(C),
                  tau_f=g.metadata["tau_f"])


def two_link(L=1):
    short = 1 - Fraction(1, 2 ** L)
    return _instance(["s", "t"], [("short", "s", "t", short, ZERO),
                                  ("long", "s", "t", Fraction(1), Fraction(1))],
                     "s", "t", 1, gadget="two_link", L=L)


GENERATORS = {
    "single_arc": single_arc,
    "example_one": example_one,
    "example_three": example_three,
    "figure_chain": figure_chain,
    "pulse": pulse,
    "damper": damper,
    "exponential": exponential,
    "two_link": two_link,
}
