"""Command line: ``nashflow solve|gen|verify|report``.

Exit codes: 0 steady state, 1 bad input, 2 unbounded growth, 3 phase cap
or horizon reached, 4 verification failure.
"""
import argparse
import inspect
import json
import sys
from fractions import Fraction

from . import gadgets
from .model import InstanceError, emit_instance, instance_from_dict, load_instance, rat
from .report import decimal_str, instance_digest, phase_csv, trajectory_report

EXIT_OK, EXIT_INPUT, EXIT_UNBOUNDED, EXIT_LIMIT, EXIT_VERIFY = 0, 1, 2, 3, 4


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_solve(args):
    from .engine import solve_equilibrium

    try:
        inst = load_instance(args.instance)
    except (OSError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    horizon = "auto" if args.horizon is None else (None if args.horizon == "none" else rat(args.horizon))
    if horizon not in ("auto", None) and horizon <= 0:
        print("error: horizon must be positive", file=sys.stderr)
        return EXIT_INPUT
    traj = solve_equilibrium(inst, max_phases=args.max_phases, horizon=horizon)
    if args.format == "csv":
        text = phase_csv(traj)
    else:
        text = json.dumps(trajectory_report(traj), indent=1) + "\n"
    _write(text, args.output)
    st = traj.status
    print(f"status {st.name} at theta={st.theta} after {len(traj.phases)} phases", file=sys.stderr)
    return st.exit_code


def _gadget_kwargs(fn, args):
    out = {}
    for name in inspect.signature(fn).parameters:
        val = getattr(args, name, None)
        if val is None:
            continue
        out[name] = int(val) if name in ("k", "d", "L") else rat(val)
    if "C" in out:
        out["C"] = int(out["C"])
    return out


def cmd_gen(args):
    fn = gadgets.GENERATORS[args.gadget]
    try:
        inst = fn(**_gadget_kwargs(fn, args))
    except (ValueError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(emit_instance(inst, indent=1) + "\n", args.output)
    return EXIT_OK


def _q(cell):
    return None if cell is None else Fraction(cell["q"])


def verify_report(data):
    """Re-check a stored report. Returns ``(failures, notes)``."""
    from .dynamics import check_cumulative_identity
    from .engine import solve_equilibrium
    from .model import min_queuing_cut
    from .potential import phi_rate_oracle, pseudo_bounds
    from .steady import dual_violations

    fails, notes = [], []
    inst = instance_from_dict(data["instance"])
    if instance_digest(inst) != data.get("instance_sha256"):
        fails.append("core-model/digest: embedded instance does not match its digest")
    phases = data["phases"]
    for cell_ok in _decimal_mismatches(data):
        fails.append(f"cli/decimal: {cell_ok}")
    # potential telescoping and monotonicity from the stored columns
    for a, b in zip(phases, phases[1:]):
        expect = _q(a["phi"]) + _q(a["phi_rate"]) * (_q(a["theta_end"]) - _q(a["theta_start"]))
        if expect != _q(b["phi"]):
            fails.append(f"potential/phi telescoping: phase {b['index']} starts at {_q(b['phi'])}, expected {expect}")
    for ph in phases:
        if _q(ph["phi_rate"]) < 0:
            fails.append(f"potential/monotonicity: phase {ph['index']} has negative rate")
    steady = data["status"]["name"] == "steady"
    if steady and _q(phases[-1]["phi_rate"]) != 0:
        fails.append("potential/monotonicity: steady phase has nonzero rate")
    # recompute the trajectory and compare with the table
    horizon = _q(data["status"]["theta"]) if data["status"]["name"] == "horizon" else None
    traj = solve_equilibrium(inst, max_phases=max(len(phases), 1), horizon=horizon)
    fresh = trajectory_report(traj)["phases"]
    if len(fresh) < len(phases) or any(
        (f["theta_start"], f["theta_end"], f["label_rates"]) != (p["theta_start"], p["theta_end"], p["label_rates"])
        for f, p in zip(fresh, phases)
    ):
        fails.append("engine/determinism: stored phase table differs from a fresh solve")
    for ph in traj.phases:
        if phi_rate_oracle(ph.thin_flow, ph.classification, inst) != _q(fresh[ph.index]["phi_rate"]):
            fails.append(f"potential/oracle: phase {ph.index}")
    for th in traj.boundaries:
        res = check_cumulative_identity(traj, th)
        if not res:
            fails.append(f"dynamics/cumulative identity: arc {res.arc} at theta={th}")
    # LP complementarity and bounds
    if steady:
        s = data["steady"]
        d = {k: _q(v) for k, v in s["simulated"]["d"].items()}
        q = {k: _q(v) for k, v in s["simulated"]["q"].items()}
        for v in dual_violations(inst, d, q):
            fails.append(f"steady-state/dual feasibility: {v}")
        if _q(s["simulated"]["objective"]) != _q(s["lp"]["cost"]):
            fails.append("steady-state/strong duality: simulated dual objective differs from LP optimum")
        flows = {k: _q(v) for k, v in s["lp"]["flow"].items()}
        for a in inst.arcs:
            if q[a.id] > 0 and flows[a.id] != a.capacity:
                fails.append(f"steady-state/complementarity: {a.id} queued but not saturated")
    if inst.inflow <= min_queuing_cut(inst).capacity:
        b = pseudo_bounds(inst)
        end = _q(data["status"]["theta"])
        if steady and end > b.time_bound:
            fails.append(f"potential/bounds: theta*={end} exceeds {b.time_bound}")
        for ph in phases:
            for e, z in ph["queues"].items():
                if _q(z) / inst.arc(e).capacity > b.queue_bound:
                    fails.append(f"potential/bounds: queue delay on {e} exceeds {b.queue_bound}")
    ends = [ph["theta_end"]["q"] for ph in phases if ph["theta_end"] is not None]
    notes.append("phase boundaries: " + (", ".join(ends) if ends else "none"))
    if ends:
        notes.append(f"first phase ends at {ends[0]}")
    return fails, notes


def _decimal_mismatches(data):
    out = []

    def walk(node, path):
        if isinstance(node, dict):
            if set(node) == {"q", "d"} and isinstance(node["q"], str):
                if decimal_str(Fraction(node["q"])) != node["d"]:
                    out.append(path)
                return
            for k, v in node.items():
                walk(v, f"{path}.{k}")
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(v, f"{path}[{i}]")

    walk({k: v for k, v in data.items() if k != "instance"}, "")
    return out


def cmd_verify(args):
    try:
        with open(args.report) as fh:
            data = json.load(fh)
        fails, notes = verify_report(data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: unreadable report: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for n in notes:
        print(n)
    for f in fails:
        print(f"FAIL {f}")
    print("verify: ok" if not fails else f"verify: {len(fails)} failure(s)")
    return EXIT_OK if not fails else EXIT_VERIFY


def cmd_report(args):
    try:
        with open(args.report) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "json":
        _write(json.dumps(data.get(args.table) if args.table != "all" else data, indent=1) + "\n", args.output)
        return EXIT_OK
    rows = _table_rows(data, args.table)
    if args.format == "csv":
        import csv
        import io

        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        _write(buf.getvalue(), args.output)
    else:
        widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
        text = "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)
        _write(text + "\n", args.output)
    return EXIT_OK


def _cell(c, key="q"):
    return "inf" if c is None else c[key]


def _table_rows(data, table):
    if table in ("phases", "all"):
        rows = [["index", "theta_start (source time)", "theta_end", "l't", "phi", "phi_rate", "event",
                 "theta_start_dec", "phi_dec"]]
        t = data["instance"]["sink"]
        for ph in data["phases"]:
            ev = ph["event"]["kind"] if ph["event"] else ""
            rows.append([ph["index"], _cell(ph["theta_start"]), _cell(ph["theta_end"]),
                         _cell(ph["label_rates"][t]), _cell(ph["phi"]), _cell(ph["phi_rate"]), ev,
                         _cell(ph["theta_start"], "d"), _cell(ph["phi"], "d")])
        return rows
    if table == "potential":
        rows = [["theta_start (source time)", "phi", "phi_rate", "theta_start_dec", "phi_dec", "phi_rate_dec"]]
        for ph in data["phases"]:
            rows.append([_cell(ph["theta_start"]), _cell(ph["phi"]), _cell(ph["phi_rate"]),
                         _cell(ph["theta_start"], "d"), _cell(ph["phi"], "d"), _cell(ph["phi_rate"], "d")])
        return rows
    rows = [["start (sink local time)", "end", "rate", "start_dec", "rate_dec"]]
    for p in data["sink_schedule"]:
        rows.append([_cell(p["start"]), _cell(p["end"]), _cell(p["rate"]),
                     _cell(p["start"], "d"), _cell(p["rate"], "d")])
    return rows


def build_parser():
    p = argparse.ArgumentParser(prog="nashflow", description="Solve Nash flows over time with point queues, in exact rational arithmetic.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="integrate the equilibrium of an instance file")
    s.add_argument("instance")
    s.add_argument("-o", "--output", default="-")
    s.add_argument("--max-phases", type=int, default=10**6)
    s.add_argument("--horizon", help="rational time limit, or 'none' (default: convergence bound)")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="emit a gadget instance")
    g.add_argument("gadget", choices=sorted(gadgets.GENERATORS))
    for name in ("u", "tau", "rho", "eps", "capacity", "delay", "inflow", "initial_queue", "tau_f"):
        g.add_argument("--" + name.replace("_", "-"), dest=name)
    for name in ("k", "d", "L", "C"):
        g.add_argument("--" + name, dest=name)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="re-check every invariant of a stored report")
    v.add_argument("report")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="re-render tables of a stored report")
    r.add_argument("report")
    r.add_argument("--table", choices=("phases", "potential", "schedule", "all"), default="phases")
    r.add_argument("--format", choices=("text", "csv", "json"), default="text")
    r.add_argument("-o", "--output", default="-")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
