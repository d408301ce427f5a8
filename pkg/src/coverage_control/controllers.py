"""Velocity laws: Lloyd descent, the feedforward-corrected variant, and the
time-varying-density laws built on the centroid Jacobian (exact inverse and
its k-hop Neumann truncations).

The proportional gain is named kappa throughout; k is reserved for the
Neumann hop count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem
from .jacobian import CentroidJacobian, neumann_apply, solve_exact
from .moments import MomentSet

DEFAULT_V_MAX = 5.0


@dataclass(frozen=True)
class ControlState:
    """Everything a controller may read, evaluated at one (positions, time)."""

    tessellation: object
    moments: MomentSet
    jacobian: CentroidJacobian | None = None
    kappa: float = 1.0
    time: float = 0.0
    v_max: float = DEFAULT_V_MAX


@dataclass(frozen=True)
class VelocityCommand:
    velocities: np.ndarray          # (n, 2) m/s, already speed-capped
    tracking_error: float           # max_i |p_i - c_i|
    lambda_max: float | None = None
    condition_flag: bool = False
    capped: bool = False


def _finish(state: ControlState, vel: np.ndarray, condition_flag=False) -> VelocityCommand:
    p = state.tessellation.positions
    c = state.moments.centroids
    err = float(np.max(np.linalg.norm(p - c, axis=1)))
    speeds = np.linalg.norm(vel, axis=1)
    capped = bool(np.any(speeds > state.v_max))
    if capped:
        scale = np.minimum(1.0, state.v_max / np.maximum(speeds, 1e-300))
        vel = vel * scale[:, None]
    lam = state.jacobian._spectral_radius if state.jacobian is not None else None
    return VelocityCommand(velocities=vel, tracking_error=err, lambda_max=lam,
                           condition_flag=condition_flag, capped=capped)


def _stacked_target(state: ControlState) -> np.ndarray:
    """-kappa (p - c) + dc/dt as one 2n vector."""
    p = state.tessellation.positions
    m = state.moments
    u = -state.kappa * (p - m.centroids) + m.centroid_rates
    return u.reshape(-1)


def lloyd(state: ControlState) -> VelocityCommand:
    """p_dot = -kappa (p - c): scaled gradient descent of the locational cost."""
    p = state.tessellation.positions
    vel = -state.kappa * (p - state.moments.centroids)
    return _finish(state, vel)


def cortes(state: ControlState) -> VelocityCommand:
    """p_dot_i = c_rate_i - (kappa + m_rate_i / m_i)(p_i - c_i)."""
    p = state.tessellation.positions
    m = state.moments
    gain = state.kappa + m.mass_rates / m.masses
    vel = m.centroid_rates - gain[:, None] * (p - m.centroids)
    return _finish(state, vel)


def tvd_c(state: ControlState) -> VelocityCommand:
    """Centralized law p_dot = (I - dc/dp)^{-1} (-kappa (p - c) + dc/dt).

    When the system is numerically singular the command falls back to the
    always-well-posed 1-hop truncation and raises the condition flag.
    """
    u = _stacked_target(state)
    try:
        x, _ = solve_exact(state.jacobian, u)
        flag = False
    except SingularSystem:
        x = neumann_apply(state.jacobian, 1, u)
        flag = True
    return _finish(state, x.reshape(-1, 2), condition_flag=flag)


def tvd_dk(state: ControlState, hops: int) -> VelocityCommand:
    """k-hop truncation p_dot = sum_{l<=k} (dc/dp)^l (-kappa (p - c) + dc/dt)."""
    u = _stacked_target(state)
    x = neumann_apply(state.jacobian, hops, u)
    return _finish(state, x.reshape(-1, 2))


def controller_needs_jacobian(name: str) -> bool:
    return name in ("tvd_c", "tvd_dk")


def make_controller(name: str, hops: int = 1):
    """Controller callable ControlState -> VelocityCommand by name."""
    if name == "lloyd":
        return lloyd
    if name == "cortes":
        return cortes
    if name == "tvd_c":
        return tvd_c
    if name == "tvd_dk":
        if hops < 0:
            raise ValueError("hop count must be >= 0")
        return lambda state: tvd_dk(state, hops)
    raise ValueError(f"unknown controller {name!r}")
