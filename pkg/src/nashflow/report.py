"""JSON and CSV renderings of trajectories and steady-state reports.

Every number is written twice: exactly as ``"p/q"`` and as a decimal
string with 20 significant digits.
"""
import hashlib
import json
from decimal import Context, Decimal
from fractions import Fraction

from .model import instance_to_dict, rat_str

_CTX = Context(prec=20)


def decimal_str(q):
    q = Fraction(q)
    return str(_CTX.divide(Decimal(q.numerator), Decimal(q.denominator)))


def num(q):
    if q is None:
        return None
    return {"q": rat_str(q), "d": decimal_str(q)}


def nums(mapping):
    return {k: num(v) for k, v in sorted(mapping.items())}


def instance_digest(inst):
    text = json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def event_dict(ev):
    if ev is None:
        return None
    return {"kind": ev.kind, "activates": sorted(ev.activates), "depletes": sorted(ev.depletes)}


def phase_dict(ph, inst):
    from .potential import phi, phi_rate

    return {
        "index": ph.index,
        "theta_start": num(ph.theta_start),
        "theta_end": num(ph.theta_end),
        "active": sorted(ph.classification.active),
        "queued": sorted(ph.classification.queued),
        "draining": sorted(ph.classification.draining),
        "label_rates": nums(ph.thin_flow.labels),
        "flow_rates": nums(ph.thin_flow.flows),
        "labels": nums(ph.start.labels),
        "queues": nums(ph.start.entry_queues),
        "phi": num(phi(ph.start)),
        "phi_rate": num(phi_rate(ph.thin_flow, ph.classification, inst)),
        "event": event_dict(ph.ending_event),
    }


def status_dict(status):
    out = {"name": status.name, "theta": num(status.theta)}
    if status.name == "unbounded":
        out["sink_rate"] = num(status.sink_rate)
    if status.name == "phase-cap":
        out["recent"] = [{"active": sorted(c.active), "queued": sorted(c.queued)} for c in status.recent]
    return out


def steady_dict(rep):
    return {
        "lp": {
            "flow": nums(rep.lp_flow.flows),
            "cost": num(rep.lp_flow.cost),
            "dual": {"d": nums(rep.lp_dual.d), "q": nums(rep.lp_dual.q)},
            "objective": num(rep.lp_dual.objective),
        },
        "simulated": {
            "theta_star": num(rep.theta_star),
            "z": nums(rep.z),
            "q": nums(rep.q),
            "d": nums(rep.d),
            "objective": num(rep.simulated_objective),
            "max_transient_queue": nums(rep.max_transient_queue),
        },
        "checks": {
            "dual_feasible": rep.dual_feasible,
            "dual_optimal": rep.dual_optimal,
            "matches_lp_objective": rep.matches_lp_objective,
            "problems": list(rep.problems),
        },
    }


def trajectory_report(traj):
    """Full JSON-ready report of a trajectory."""
    from .dynamics import sink_inflow_schedule
    from .model import min_queuing_cut
    from .potential import pseudo_bounds
    from .steady import steady_report

    inst = traj.instance
    cut = min_queuing_cut(inst)
    bounds = pseudo_bounds(inst)
    out = {
        "instance": instance_to_dict(inst),
        "instance_sha256": instance_digest(inst),
        "status": status_dict(traj.status),
        "min_cut": {"capacity": num(cut.capacity), "arcs": sorted(cut.cut_arcs),
                    "source_side": sorted(cut.source_side)},
        "bounds": {"K": bounds.K, "M": num(bounds.M), "T": num(bounds.T),
                   "time_bound": num(bounds.time_bound), "queue_bound": num(bounds.queue_bound)},
        "phases": [phase_dict(ph, inst) for ph in traj.phases],
        "sink_schedule": [
            {"start": num(a), "end": num(b), "rate": num(v)} for a, b, v in sink_inflow_schedule(traj)
        ],
    }
    if traj.status.name == "steady":
        out["steady"] = steady_dict(steady_report(traj))
    return out


def phase_csv(traj):
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "theta_start", "theta_end", "sink_label_rate", "event",
                "theta_start_dec", "theta_end_dec", "sink_label_rate_dec"])
    t = traj.instance.sink
    for ph in traj.phases:
        end = ph.theta_end
        lp = ph.thin_flow.labels[t]
        w.writerow([ph.index, rat_str(ph.theta_start), "inf" if end is None else rat_str(end),
                    rat_str(lp), ph.ending_event.kind if ph.ending_event else "",
                    decimal_str(ph.theta_start), "inf" if end is None else decimal_str(end),
                    decimal_str(lp)])
    return buf.getvalue()
