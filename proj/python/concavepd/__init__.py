"""Primal-dual solvers for concave-cost facility location, economic
lot-sizing and joint replenishment, with exact-rational certificates."""

from _concavepd import (  # noqa: F401
    algorithms,
    cost_eval,
    cost_tangent,
    generate,
    solve,
    verify,
)

__all__ = ["algorithms", "cost_eval", "cost_tangent", "generate", "solve", "verify"]
