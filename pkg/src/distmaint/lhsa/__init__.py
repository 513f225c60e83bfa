"""Long-term routing of maintenance operations (CVRPTW)."""

from .divide import solve_long_term, solve_routing_problem, split_operations
from .exact import EXACT_CAP, solve_exact
from .graph import OperationNode, RoutingProblem, VehicleSpec, build_operation_graph, euclidean_matrix
from .solution import RoutingInfeasible, RoutingSolution, route_times, solution_from_routes
from .textio import dump_problem, dump_solution, load_problem, load_solution
from .validate import CONSTRAINTS, ConstraintCheck, ConstraintReport, validate_solution

__all__ = [
    "CONSTRAINTS", "ConstraintCheck", "ConstraintReport", "EXACT_CAP", "OperationNode",
    "RoutingInfeasible", "RoutingProblem", "RoutingSolution", "VehicleSpec",
    "build_operation_graph", "dump_problem", "dump_solution", "euclidean_matrix",
    "load_problem", "load_solution", "route_times", "solution_from_routes", "solve_exact",
    "solve_long_term", "solve_routing_problem", "split_operations", "validate_solution",
]
