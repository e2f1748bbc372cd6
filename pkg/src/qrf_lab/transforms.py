"""Grid realizations of the frame-change unitaries.

Every jump takes the state as seen from the current frame (state.frame) and
returns the state as seen from ``new_frame``; the axis of the new frame is
consumed and the old frame appears as a fresh axis (parity-inverted, and
mass-dilated for the velocity/boost family).  Conditional factors are exact
diagonal phases in mixed representations; the only interpolating step is the
photon-mode dilation of the Doppler jump.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .grids import Subsystem
from .states import (MultiState, StateError, apply_parity_axis, phase_multiply,
                     phase_multiply_pair, relabel_axis, rescale_axis)


class TransformError(StateError):
    """Unsupported or unsafe frame-change application."""


class WraparoundError(TransformError):
    """A controlled displacement would wrap around the periodic grid."""


def _grid_spectators(state: MultiState, new_frame: str,
                     frozen: tuple[str, ...] = ()) -> list[str]:
    out = []
    for s in state.subsystems:
        if s.label == new_frame or s.label in frozen:
            continue
        if s.kind == "grid":
            out.append(s.label)
    return out


def _support_bound(values: np.ndarray, weights: np.ndarray, mass_tol: float) -> float:
    """Largest |value| carrying more than mass_tol of probability."""
    order = np.argsort(np.abs(values))
    w = weights[order]
    cum = np.cumsum(w[::-1])[::-1]  # mass at or above each |value|
    keep = cum > mass_tol
    if not np.any(keep):
        return 0.0
    return float(np.abs(values[order])[keep].max())


def guard_translation(state: MultiState, control: str, targets: list[str],
                      mass_tol: float = 1e-12) -> None:
    """Refuse controlled translations that wrap beyond half the target grid."""
    st = state.to_position(control)
    rho = st.marginal_density(control)
    g = st.subsystem(control).grid
    bound = _support_bound(g.points, rho * g.dx, mass_tol)
    for label in targets:
        half = state.subsystem(label).grid.half_width
        if bound > half:
            raise WraparoundError(
                f"translation of {label!r} by up to {bound:.3g} exceeds half "
                f"the grid length {2 * half:.3g}")


# -- parity swaps -------------------------------------------------------------


def parity_swap(state: MultiState, from_label: str, to_label: str,
                new_mass: float | None = None) -> MultiState:
    """Relabel axis from_label -> to_label with the exact x -> -x involution.

    The consumed axis becomes the new observer: the frame tag moves to
    ``from_label``.  ``new_mass`` sets the mass of the fresh axis (defaults
    to the consumed axis's mass).
    """
    i = state.axis(from_label)
    sub = state.subsystems[i]
    if sub.kind != "grid":
        raise TransformError("parity swap needs a continuous axis")
    out = apply_parity_axis(state, from_label)
    out = relabel_axis(out, from_label, to_label, frame=from_label)
    if new_mass is not None:
        subs = list(out.subsystems)
        j = out.axis(to_label)
        subs[j] = replace(subs[j], mass=new_mass)
        out = MultiState(tuple(subs), out.amps, out.frame, out.time, out.reps)
    return out


def velocity_parity(state: MultiState, from_label: str, to_label: str,
                    m_from: float, m_to: float) -> MultiState:
    """Parity swap composed with the exact mass-ratio dilation.

    Velocities invert: <p>/m maps to -<p>/m.  Position centers map as
    <x> -> -(m_from/m_to) <x>; momentum centers as <p> -> -(m_to/m_from) <p>.
    Realized as grid-metadata rescale, so unit norm is preserved exactly.
    """
    if m_from <= 0 or m_to <= 0:
        raise TransformError("velocity parity needs positive masses")
    out = parity_swap(state, from_label, to_label, new_mass=m_to)
    if m_from != m_to:
        out = rescale_axis(out, to_label, m_from / m_to)
    return out


# -- relative-coordinate jumps -----------------------------------------------


def relative_position_jump(state: MultiState, new_frame: str, m_old: float | None = None,
                           frozen: tuple[str, ...] = (),
                           wrap_guard: bool = True) -> MultiState:
    """Jump to the frame whose origin is the new frame's position.

    Controlled translation of every continuous spectator by the new frame's
    position, then the parity swap new_frame -> old frame.
    """
    old = state.frame
    ctrl = state.subsystem(new_frame)
    if ctrl.kind != "grid":
        raise TransformError("the new frame must be a continuous subsystem")
    spectators = _grid_spectators(state, new_frame, frozen)
    if wrap_guard:
        guard_translation(state, new_frame, spectators)
    out = state.to_position(new_frame)
    x_ctrl = ctrl.grid.points
    hbar = ctrl.grid.hbar
    for label in spectators:
        out = out.to_momentum(label)
        p = out.subsystem(label).grid.momenta
        out = phase_multiply_pair(out, new_frame, label, np.outer(x_ctrl, p) / hbar)
        out = out.to_position(label)
    return parity_swap(out, new_frame, old, new_mass=m_old)


def relative_momentum_jump(state: MultiState, new_frame: str, m_old: float | None = None,
                           frozen: tuple[str, ...] = ()) -> MultiState:
    """Momentum-relative analog: spectators get kicked by minus the control momentum."""
    old = state.frame
    ctrl = state.subsystem(new_frame)
    if ctrl.kind != "grid":
        raise TransformError("the new frame must be a continuous subsystem")
    out = state.to_momentum(new_frame)
    p_ctrl = ctrl.grid.momenta
    hbar = ctrl.grid.hbar
    for label in _grid_spectators(state, new_frame, frozen):
        out = out.to_position(label)
        x = out.subsystem(label).grid.points
        out = phase_multiply_pair(out, new_frame, label, -np.outer(p_ctrl, x) / hbar)
    out = out.to_position(new_frame)
    return parity_swap(out, new_frame, old, new_mass=m_old)


def translation_jump(state: MultiState, new_frame: str, t: float, tau: float,
                     m_old: float, frozen: tuple[str, ...] = (),
                     wrap_guard: bool = True) -> MultiState:
    """Galilean translation relative to the new frame's position at time tau.

    Free-particle context: backward free phase on the new frame, the
    relative-position core, forward free phase on the old frame's fresh axis.
    """
    ctrl = state.subsystem(new_frame)
    m_new = ctrl.mass
    hbar = ctrl.grid.hbar
    dt = t - tau
    out = state.to_momentum(new_frame)
    out = phase_multiply(out, new_frame, ctrl.grid.momenta**2 * dt / (2 * m_new * hbar))
    out = relative_position_jump(out, new_frame, m_old=m_old, frozen=frozen,
                                 wrap_guard=wrap_guard)
    old_axis = out.subsystem(state.frame)
    out = out.to_momentum(state.frame)
    out = phase_multiply(out, state.frame,
                         -old_axis.grid.momenta**2 * dt / (2 * m_old * hbar))
    return out.to_position(state.frame)


def _controlled_boost(state: MultiState, control: str, target: str,
                      t: float, scalar_phases: bool = True) -> MultiState:
    """exp((i/hbar) (p_ctrl/m_ctrl) (p_tgt t - m_tgt x_tgt)) with exact factors.

    Order (right to left): position kick, scalar phase, momentum drift.
    """
    ctrl = state.subsystem(control)
    tgt = state.subsystem(target)
    hbar = ctrl.grid.hbar
    v = ctrl.grid.momenta / ctrl.mass
    out = state.to_momentum(control).to_position(target)
    x = tgt.grid.points
    out = phase_multiply_pair(out, control, target, -np.outer(v * tgt.mass, x) / hbar)
    if scalar_phases:
        out = phase_multiply(out, control, tgt.mass * v**2 * t / (2 * hbar))
    if t != 0.0:
        out = out.to_momentum(target)
        p = tgt.grid.momenta
        out = phase_multiply_pair(out, control, target, np.outer(v * t, p) / hbar)
        out = out.to_position(target)
    return out


def boost_jump(state: MultiState, new_frame: str, t: float, m_old: float,
               frozen: tuple[str, ...] = (),
               wrap_guard: bool = True) -> MultiState:
    """Jump to the frame moving with the new frame's velocity.

    Free-particle context.  The spectator displacement v*t is guarded against
    grid wraparound.
    """
    old = state.frame
    ctrl = state.subsystem(new_frame)
    m_new, hbar = ctrl.mass, ctrl.grid.hbar
    spectators = _grid_spectators(state, new_frame, frozen)
    if t != 0.0 and wrap_guard:
        stp = state.to_momentum(new_frame)
        rho = stp.marginal_density(new_frame)
        bound = _support_bound(ctrl.grid.momenta / m_new * t, rho * ctrl.grid.dp, 1e-12)
        for label in spectators:
            half = state.subsystem(label).grid.half_width
            if bound > half:
                raise WraparoundError(
                    f"boost drift {bound:.3g} of {label!r} exceeds half the "
                    f"grid length {2 * half:.3g}")
    out = state.to_momentum(new_frame)
    out = phase_multiply(out, new_frame, ctrl.grid.momenta**2 * t / (2 * m_new * hbar))
    for label in spectators:
        out = _controlled_boost(out, new_frame, label, t)
    out = velocity_parity(out, new_frame, old, m_new, m_old)
    old_axis = out.subsystem(old)
    out = out.to_momentum(old)
    out = phase_multiply(out, old, -old_axis.grid.momenta**2 * t / (2 * m_old * hbar))
    return out.to_position(old)


def velocity_jump(state: MultiState, new_frame: str, m_old: float,
                  frozen: tuple[str, ...] = (),
                  wrap_guard: bool = True) -> MultiState:
    """Instantaneous relative-velocity jump; identical to the boost at t=0."""
    return boost_jump(state, new_frame, 0.0, m_old, frozen, wrap_guard)
