import random
from fractions import Fraction as F

import pytest

from nashflow import gadgets
from nashflow.dynamics import (check_cumulative_identity, check_snapshot, classify_arcs, exit_time,
                               initial_labels, schedule_value, sink_inflow_schedule)
from nashflow.engine import solve_equilibrium
from nashflow.model import Arc, Instance

from .conftest import CATALOG, trajectory


def test_exit_time_examples():
    arc = Arc("e", "s", "t", F(1), F(3))
    assert exit_time(F(0), F(0), arc) == 3
    assert exit_time(F(2), F(1, 2), Arc("e", "s", "t", F(1, 4), F(0))) == 4
    with pytest.raises(ValueError):
        exit_time(F(0), F(-1), arc)


def test_exit_time_on_g_tracks_sink_label():
    traj = trajectory("example_one")
    snap = traj.snapshot_at(F(1))
    g = CATALOG["example_one"].arc("g")
    # l_t grows at rate 3 during the first phase
    assert exit_time(snap.labels["v"], snap.entry_queues["g"], g) == snap.labels["t"] == 3


def test_initial_labels():
    snap = initial_labels(gadgets.example_one(1, 2))
    assert snap.labels == {"s": 0, "v": 0, "t": 0}
    assert initial_labels(gadgets.single_arc(1, 3)).labels["t"] == 3
    assert initial_labels(gadgets.single_arc(1, 3, initial_queue=2)).labels["t"] == 5
    assert all(x == 0 for x in snap.static_flows.values())


def test_classification_after_events():
    traj = trajectory("example_one")
    cls = classify_arcs(traj.snapshot_at(F(6, 5)))
    assert cls.active == {"e", "f", "g"} and cls.queued == {"e", "f", "g"}
    cls = classify_arcs(traj.snapshot_at(F(3, 2)))
    assert cls.active == {"e", "f", "g", "h"} and cls.queued == {"e", "f", "g"}
    assert classify_arcs(initial_labels(CATALOG["example_one"])).queued == set()


def test_single_arc_identity_equals_u0_theta():
    inst = gadgets.single_arc(2, 1)
    traj = solve_equilibrium(inst)
    for th in (F(0), F(1, 3), F(5)):
        res = check_cumulative_identity(traj, th)
        assert res
        assert traj.snapshot_at(th).static_flows["e"] == inst.inflow * th


def test_example_one_identity_at_tau():
    traj = trajectory("example_one")
    snap = traj.snapshot_at(F(2))
    x = snap.static_flows
    assert x["e"] + x["f"] == 2 and x["f"] == x["g"] + x["h"]
    assert check_cumulative_identity(traj, F(2))
    for th in traj.boundaries:
        assert check_cumulative_identity(traj, th)


def test_identity_detects_corrupted_queue():
    traj = trajectory("example_one")
    bad_phase = traj.phases[1]
    slopes = dict(bad_phase.queue_slopes)
    slopes["g"] += F(1, 7)
    object.__setattr__(bad_phase, "queue_slopes", slopes)
    try:
        res = check_cumulative_identity(traj, F(6, 5))
        assert not res and res.arc == "g" and res.inflow != res.outflow
    finally:
        slopes["g"] -= F(1, 7)


def test_sink_schedules():
    sched = sink_inflow_schedule(trajectory("example_one"))
    assert sched == [(0, 3, F(1, 3)), (3, F(18, 5), F(2, 3)), (F(18, 5), 6, F(13, 12)), (6, None, 1)]
    sched = sink_inflow_schedule(trajectory("figure_chain"))
    assert sched == [(0, F(7, 4), F(1, 3)), (F(7, 4), F(11, 4), F(13, 12)), (F(11, 4), None, 1)]
    sched = sink_inflow_schedule(trajectory("single_arc"))
    assert sched == [(0, 1, 0), (1, None, 1)]
    assert schedule_value(sched, F(1, 2)) == 0 and schedule_value(sched, F(9)) == 1


def test_draining_initial_queue():
    # a starts with queue 3 while b queues at rate 1/2; slack of a is 2 - 3 theta / 2
    inst = Instance(("s", "t"), (Arc("a", "s", "t", F(1), F(0), F(3)), Arc("b", "s", "t", F(1), F(1))),
                    "s", "t", F(3, 2))
    traj = solve_equilibrium(inst)
    assert traj.status.name == "steady"
    first = traj.phases[0]
    assert first.classification.draining == {"a"}
    assert first.theta_end == F(4, 3) and first.ending_event.activates == {"a"}
    for th in [F(i, 4) for i in range(0, 24)]:
        assert check_cumulative_identity(traj, th)
        assert check_snapshot(traj.snapshot_at(th)) == []


# --------------------------------------------------------------------------
# invariants along every catalog trajectory


def sample_thetas(traj, count, seed=0):
    rng = random.Random(seed)
    end = traj.phases[-1].theta_start + 2
    out = list(traj.boundaries) + [F(0)]
    while len(out) < count:
        out.append(end * F(rng.randint(0, 10**6), 10**6))
    return out


def test_snapshot_invariants(catalog_name):
    traj = trajectory(catalog_name)
    inst = traj.instance
    for th in sample_thetas(traj, 30):
        snap = traj.snapshot_at(th)
        assert check_snapshot(snap) == []
        assert snap.labels[inst.source] == th
        cls = classify_arcs(snap)
        assert cls.queued <= cls.active
        for e in cls.active:
            a = inst.arc(e)
            assert snap.entry_queues[e] == a.capacity * (snap.labels[a.head] - snap.labels[a.tail] - a.delay)


def test_labels_continuous_and_monotone(catalog_name):
    traj = trajectory(catalog_name)
    for a, b in zip(traj.phases, traj.phases[1:]):
        assert a.end_snapshot().labels == b.start.labels
        assert a.end_snapshot().entry_queues == b.start.entry_queues
    for ph in traj.phases:
        assert all(x >= 0 for x in ph.thin_flow.labels.values())


def test_cumulative_identity_random_thetas(catalog_name):
    traj = trajectory(catalog_name)
    for th in sample_thetas(traj, 100, seed=len(catalog_name)):
        res = check_cumulative_identity(traj, th)
        assert res, (th, res)


def test_sink_rate_is_inflow_over_label_rate(catalog_name):
    traj = trajectory(catalog_name)
    inst = traj.instance
    for ph in traj.phases:
        lp = ph.thin_flow.labels[inst.sink]
        into = sum(ph.thin_flow.flows[a.id] for a in inst.arcs if a.head == inst.sink)
        assert into == inst.inflow
        if ph.theta_end is None or ph.end_snapshot().labels[inst.sink] > ph.start.labels[inst.sink]:
            xi = ph.start.labels[inst.sink]
            assert schedule_value(sink_inflow_schedule(traj), xi) == inst.inflow / lp
