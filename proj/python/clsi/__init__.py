"""Numerical toolkit for convex log-Sobolev inequalities on the real line.

The heavy lifting lives in the C++ extension module ``clsi._core``; this
package re-exports its public surface.
"""

from ._core import (  # noqa: F401
    ConfigError,
    CostFunction,
    DivergenceError,
    EdgeAttainedError,
    GridFunction,
    Measure1D,
    c_theta,
    chain_a_to_b_from_t0,
    chain_a_to_b_with_ctheta,
    chain_b_to_c,
    chain_c_to_a,
    chain_delta_bound,
    chain_delta_bound_sharp,
    classical_ot_1d,
    convex_poincare_test,
    cost,
    criterion_check,
    delta_mu,
    dual_ic_test,
    entropy,
    fit_subgaussian,
    inf_convolution,
    linear_growth_bound,
    lsi_test,
    maurey_bound_check,
    maurey_k,
    relative_entropy,
    run_cli,
    selftest,
    simulate_tails,
    tail_cost_bound,
    tail_decay_check,
    theta_inverse,
    u_mu,
    weak_ot_solve,
    weak_transport_verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
