"""Nash flows over time with point queues, solved phase by phase in exact arithmetic."""
from . import gadgets
from .engine import solve_equilibrium
from .model import Arc, Instance, InstanceError, load_instance, min_queuing_cut, parse_instance, validate
from .ntfr import ThinFlowProblem, solve_ntfr, verify_ntfr
from .steady import steady_report

__all__ = [
    "Arc", "Instance", "InstanceError", "ThinFlowProblem", "gadgets", "load_instance", "min_queuing_cut",
    "parse_instance", "solve_equilibrium", "solve_ntfr", "steady_report", "validate", "verify_ntfr",
]
