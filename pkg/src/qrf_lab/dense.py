"""Explicit-matrix oracle for validation at tiny grid sizes.

Operators are assembled in the measure-weighted convention (amplitudes times
sqrt(dx) per grid axis), where every transformation is an honest unitary
matrix and grid-metadata rescales are the identity.  Conditional exponentials
are built with scipy.linalg.expm from discretized generators, independently
of the FFT-phase application path, so the two can validate each other.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from .grids import Grid1D, Subsystem
from .states import MultiState, _centered_fft
from .transforms import velocity_parity  # conventions shared with the apply path


class DenseLimitError(ValueError):
    """Total dimension exceeds the dense-oracle budget."""


MAX_DENSE_DIM = 4096


def momentum_frame(grid: Grid1D) -> np.ndarray:
    """Unitary mapping weighted position vectors to weighted momentum vectors."""
    n = grid.n
    f = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    for k in range(n):
        f[:, k] = _centered_fft(eye[:, k].astype(complex), 0, grid)
    return f * np.sqrt(grid.dp / grid.dx)


def position_operator(grid: Grid1D) -> np.ndarray:
    return np.diag(grid.points).astype(complex)


def momentum_operator(grid: Grid1D) -> np.ndarray:
    f = momentum_frame(grid)
    return f.conj().T @ np.diag(grid.momenta).astype(complex) @ f


def parity_matrix(n: int) -> np.ndarray:
    p = np.zeros((n, n))
    for k in range(n):
        p[(-k) % n, k] = 1.0
    return p


def momentum_phase(grid: Grid1D, theta_of_p: np.ndarray) -> np.ndarray:
    f = momentum_frame(grid)
    return f.conj().T @ np.diag(np.exp(1j * theta_of_p)) @ f


@dataclass
class DenseSpace:
    """Kron workspace over an ordered subsystem tuple."""

    subsystems: tuple[Subsystem, ...]

    def __post_init__(self):
        if self.dim > MAX_DENSE_DIM:
            raise DenseLimitError(f"total dimension {self.dim} exceeds {MAX_DENSE_DIM}")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def axis(self, label: str) -> int:
        for i, s in enumerate(self.subsystems):
            if s.label == label:
                return i
        raise KeyError(label)

    def lift(self, label: str, matrix: np.ndarray) -> np.ndarray:
        """Embed a single-axis operator into the full tensor space."""
        out = np.array([[1.0 + 0j]])
        for i, s in enumerate(self.subsystems):
            blk = matrix if i == self.axis(label) else np.eye(s.dim)
            out = np.kron(out, blk)
        return out

    def lift_pair(self, label_a: str, mat_a: np.ndarray,
                  label_b: str, mat_b: np.ndarray) -> np.ndarray:
        """kron of two single-axis operators (other axes identity)."""
        out = np.array([[1.0 + 0j]])
        for i, s in enumerate(self.subsystems):
            if i == self.axis(label_a):
                blk = mat_a
            elif i == self.axis(label_b):
                blk = mat_b
            else:
                blk = np.eye(s.dim)
            out = np.kron(out, blk)
        return out

    def x(self, label: str) -> np.ndarray:
        return self.lift(label, position_operator(self.subsystems[self.axis(label)].grid))

    def p(self, label: str) -> np.ndarray:
        return self.lift(label, momentum_operator(self.subsystems[self.axis(label)].grid))

    def state_vector(self, state: MultiState) -> np.ndarray:
        """Measure-weighted amplitude vector of a position/native-rep state."""
        st = state.all_position()
        w = np.sqrt(st.total_measure)
        return (st.amps * w).reshape(-1)

    def vector_state(self, vec: np.ndarray, frame: str, time: float = 0.0) -> MultiState:
        amps = vec.reshape(self.dims)
        st = MultiState(self.subsystems, amps, frame, time)
        return st.with_amps(amps / np.sqrt(st.total_measure))


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


# -- dense frame-change unitaries ---------------------------------------------
#
# Output subsystem tuples mirror the apply path: the control axis is
# relabelled in place to the old frame (with parity and, for the boost
# family, the mass-ratio grid rescale).


def _swap_subsystem(sub: Subsystem, old: str, m_old: float | None,
                    rescale: float | None = None) -> Subsystem:
    g = sub.grid if rescale is None else sub.grid.rescaled(rescale)
    return replace(sub, label=old, mass=m_old if m_old is not None else sub.mass, grid=g)


def dense_relative_position_jump(space: DenseSpace, new_frame: str, old: str,
                                 m_old: float | None = None,
                                 frozen: tuple[str, ...] = ()) -> tuple[np.ndarray, DenseSpace]:
    hbar = space.subsystems[space.axis(new_frame)].grid.hbar
    u = np.eye(space.dim, dtype=complex)
    xa = position_operator(space.subsystems[space.axis(new_frame)].grid)
    for s in space.subsystems:
        if s.label == new_frame or s.kind != "grid" or s.label in frozen:
            continue
        pb = momentum_operator(s.grid)
        u = expm(1j / hbar * space.lift_pair(new_frame, xa, s.label, pb)) @ u
    u = space.lift(new_frame, parity_matrix(space.subsystems[space.axis(new_frame)].dim)) @ u
    subs = list(space.subsystems)
    i = space.axis(new_frame)
    subs[i] = _swap_subsystem(subs[i], old, m_old)
    return u, DenseSpace(tuple(subs))


def dense_relative_momentum_jump(space: DenseSpace, new_frame: str, old: str,
                                 m_old: float | None = None) -> tuple[np.ndarray, DenseSpace]:
    hbar = space.subsystems[space.axis(new_frame)].grid.hbar
    u = np.eye(space.dim, dtype=complex)
    pa = momentum_operator(space.subsystems[space.axis(new_frame)].grid)
    for s in space.subsystems:
        if s.label == new_frame or s.kind != "grid":
            continue
        xb = position_operator(s.grid)
        u = expm(-1j / hbar * space.lift_pair(new_frame, pa, s.label, xb)) @ u
    u = space.lift(new_frame, parity_matrix(space.subsystems[space.axis(new_frame)].dim)) @ u
    subs = list(space.subsystems)
    i = space.axis(new_frame)
    subs[i] = _swap_subsystem(subs[i], old, m_old)
    return u, DenseSpace(tuple(subs))


def dense_translation_jump(space: DenseSpace, new_frame: str, old: str,
                           t: float, tau: float, m_old: float) -> tuple[np.ndarray, DenseSpace]:
    sub = space.subsystems[space.axis(new_frame)]
    hbar, m_new = sub.grid.hbar, sub.mass
    dt = t - tau
    ka = momentum_operator(sub.grid)
    ka = ka @ ka / (2 * m_new)
    u = space.lift(new_frame, expm(1j * dt / hbar * ka))
    core, out_space = dense_relative_position_jump(space, new_frame, old, m_old)
    u = core @ u
    old_sub = out_space.subsystems[out_space.axis(old)]
    kc = momentum_operator(old_sub.grid)
    kc = kc @ kc / (2 * m_old)
    u = out_space.lift(old, expm(-1j * dt / hbar * kc)) @ u
    return u, out_space


def dense_boost_generator(space: DenseSpace, new_frame: str, label: str,
                          t: float) -> np.ndarray:
    """Hermitian generator v_new kron (p t - m x) of the conditional boost."""
    sub = space.subsystems[space.axis(new_frame)]
    s = space.subsystems[space.axis(label)]
    pa = momentum_operator(sub.grid)
    gb = momentum_operator(s.grid) * t - s.mass * position_operator(s.grid)
    return space.lift_pair(new_frame, pa / sub.mass, label, gb)


def dense_conditional_boost(space: DenseSpace, new_frame: str, label: str,
                            t: float) -> np.ndarray:
    """Factorized conditional boost: momentum drift x position kick x scalar.

    Agrees with expm of dense_boost_generator on smooth states; the scalar
    factor exp(i m v^2 t / (2 hbar)) is the closure phase of the splitting.
    """
    sub = space.subsystems[space.axis(new_frame)]
    s = space.subsystems[space.axis(label)]
    hbar = sub.grid.hbar
    pa = momentum_operator(sub.grid)
    va = pa / sub.mass
    xb = position_operator(s.grid)
    pb = momentum_operator(s.grid)
    eye_b = np.eye(s.dim)
    u = expm(-1j / hbar * s.mass * space.lift_pair(new_frame, va, label, xb))
    u = space.lift(new_frame, expm(1j / hbar * s.mass * t / 2 * va @ va)) @ u
    if t != 0.0:
        u = expm(1j / hbar * t * space.lift_pair(new_frame, va, label, pb)) @ u
    return u


def dense_boost_jump(space: DenseSpace, new_frame: str, old: str,
                     t: float, m_old: float) -> tuple[np.ndarray, DenseSpace]:
    sub = space.subsystems[space.axis(new_frame)]
    hbar, m_new = sub.grid.hbar, sub.mass
    pa = momentum_operator(sub.grid)
    u = space.lift(new_frame, expm(1j * t / hbar * pa @ pa / (2 * m_new)))
    for s in space.subsystems:
        if s.label == new_frame or s.kind != "grid":
            continue
        u = dense_conditional_boost(space, new_frame, s.label, t) @ u
    u = space.lift(new_frame, parity_matrix(sub.dim)) @ u
    subs = list(space.subsystems)
    i = space.axis(new_frame)
    subs[i] = _swap_subsystem(subs[i], old, m_old, rescale=m_new / m_old)
    out_space = DenseSpace(tuple(subs))
    old_sub = out_space.subsystems[out_space.axis(old)]
    kc = momentum_operator(old_sub.grid)
    u = out_space.lift(old, expm(-1j * t / hbar * kc @ kc / (2 * m_old))) @ u
    return u, out_space


def dense_velocity_jump(space: DenseSpace, new_frame: str, old: str,
                        m_old: float) -> tuple[np.ndarray, DenseSpace]:
    return dense_boost_jump(space, new_frame, old, 0.0, m_old)


def dense_acceleration_jump(space: DenseSpace, new_frame: str, spectator: str,
                            old: str, t: float, slope: float,
                            m_old: float) -> tuple[np.ndarray, DenseSpace]:
    """Accelerated-frame jump for a globally linear potential V = slope * x."""
    sub = space.subsystems[space.axis(new_frame)]
    hbar, m_new = sub.grid.hbar, sub.mass
    spec = space.subsystems[space.axis(spectator)]
    m_spec = spec.mass
    pa = momentum_operator(sub.grid)
    xa = position_operator(sub.grid)
    ha = pa @ pa / (2 * m_new) + slope * xa
    u = space.lift(new_frame, expm(1j * t / hbar * ha))
    # conditional-acceleration factor, three exponentials right to left
    xb = position_operator(spec.grid)
    pb = momentum_operator(spec.grid)
    eye_b = np.eye(spec.dim)
    integ = pa @ pa * t - pa * slope * t**2 + np.eye(sub.dim) * slope**2 * t**3 / 3.0
    u = expm(-1j / hbar * (m_spec / (2 * m_new**2))
             * space.lift_pair(new_frame, integ, spectator, eye_b)) @ u
    u = expm(1j / hbar * (t / m_new)
             * space.lift_pair(new_frame, pa - 0.5 * slope * t * np.eye(sub.dim),
                               spectator, pb)) @ u
    u = expm(-1j / hbar * (m_spec / m_new)
             * space.lift_pair(new_frame, pa - slope * t * np.eye(sub.dim),
                               spectator, xb)) @ u
    u = space.lift(new_frame, parity_matrix(sub.dim)) @ u
    subs = list(space.subsystems)
    i = space.axis(new_frame)
    subs[i] = _swap_subsystem(subs[i], old, m_old, rescale=m_new / m_old)
    out_space = DenseSpace(tuple(subs))
    old_sub = out_space.subsystems[out_space.axis(old)]
    qc = position_operator(old_sub.grid)
    kc = momentum_operator(old_sub.grid)
    hc = kc @ kc / (2 * m_old) + (m_old / m_new) * slope * (-qc)
    u = out_space.lift(old, expm(-1j * t / hbar * hc)) @ u
    return u, out_space


def frequency_dual_dp(n: int, domega: float) -> float:
    return 2.0 * np.pi / (n * domega)


def photon_dilation_generator(sub: Subsystem) -> np.ndarray:
    """Hermitian generator K with R_f = expm(-i log(f) K) on the mode block.

    K acts as -i(omega d/domega + 1/2); discretized with the periodic
    spectral derivative on the frequency grid.  The vacuum slot is inert.
    """
    fg = sub.freq_grid
    n = fg.n
    grid = Grid1D(n, fg.domega, 1.0)
    f = momentum_frame(grid)
    d_domega = f.conj().T @ np.diag(1j * grid.momenta) @ f  # d/domega (spectral)
    omega = np.diag(fg.omegas).astype(complex)
    k_mode = -1j * (omega @ d_domega + 0.5 * np.eye(n))
    k = np.zeros((n + 1, n + 1), dtype=complex)
    k[1:, 1:] = 0.5 * (k_mode + k_mode.conj().T)
    return k


def dense_doppler_jump(space: DenseSpace, lab: str, atom: str, photon_label: str,
                       t: float, m_atom: float) -> tuple[np.ndarray, DenseSpace]:
    """Rest-frame -> lab transformation on (lab axis, photon axis)."""
    lab_sub = space.subsystems[space.axis(lab)]
    ph_sub = space.subsystems[space.axis(photon_label)]
    hbar, m_lab = lab_sub.grid.hbar, lab_sub.mass
    c = ph_sub.light_speed
    pc = momentum_operator(lab_sub.grid)
    u = space.lift(lab, expm(1j * t / hbar * pc @ pc / (2 * m_lab)))
    # conditional mode dilation: log f(pi_C) kron K
    fw = momentum_frame(lab_sub.grid)
    fvals = 1.0 + lab_sub.grid.momenta / (c * m_lab)
    if np.any(fvals <= 0):
        raise ValueError("Doppler factor must stay positive on the lab grid")
    logf = fw.conj().T @ np.diag(np.log(fvals)).astype(complex) @ fw
    k = photon_dilation_generator(ph_sub)
    u = expm(-1j * space.lift_pair(lab, logf, photon_label, k)) @ u
    u = space.lift(lab, parity_matrix(lab_sub.dim)) @ u
    subs = list(space.subsystems)
    i = space.axis(lab)
    subs[i] = _swap_subsystem(subs[i], atom, m_atom, rescale=m_lab / m_atom)
    out_space = DenseSpace(tuple(subs))
    atom_sub = out_space.subsystems[out_space.axis(atom)]
    pa = momentum_operator(atom_sub.grid)
    u = out_space.lift(atom, expm(-1j * t / hbar * pa @ pa / (2 * m_atom))) @ u
    return u, out_space


# -- classical single-axis frame changes --------------------------------------


def dense_classical(kind: str, grid: Grid1D, mass: float, t: float,
                    **params) -> np.ndarray:
    """U_translation / U_boost / U_acceleration as exact dense matrices."""
    hbar = grid.hbar
    x = position_operator(grid)
    p = momentum_operator(grid)
    if kind == "translation":
        return expm(1j / hbar * params["x0"] * p)
    if kind == "boost":
        v = params["v"]
        return expm(1j / hbar * v * (p * t - mass * x))
    if kind == "acceleration":
        a = params["a"]
        xdot = a * t
        xt = 0.5 * a * t**2
        phase = np.exp(-1j / hbar * 0.5 * mass * a**2 * t**3 / 3.0)
        return phase * (expm(-1j / hbar * mass * xdot * x) @ expm(1j / hbar * xt * p))
    raise ValueError(f"unknown classical transformation {kind!r}")


# -- smooth comparison mask ----------------------------------------------------


def interior_window(space: DenseSpace, n_modes: int = 6,
                    width_fraction: float = 0.22) -> np.ndarray:
    """Projector-like smoothing onto phase-space-interior states.

    Per grid axis, the span of the lowest harmonic-oscillator eigenfunctions
    with length scale width_fraction * half_width; localized in both position
    and momentum, so periodic-wraparound rows carry no weight.  Non-grid axes
    are untouched.
    """
    from numpy.polynomial.hermite import hermval

    out = np.array([[1.0 + 0j]])
    for s in space.subsystems:
        if s.kind != "grid":
            out = np.kron(out, np.eye(s.dim))
            continue
        g = s.grid
        ell = width_fraction * g.half_width
        xi = g.points / ell
        cols = []
        for m in range(n_modes):
            coef = np.zeros(m + 1)
            coef[m] = 1.0
            h = hermval(xi, coef) * np.exp(-0.5 * xi**2)
            cols.append(h / np.linalg.norm(h))
        v = np.stack(cols, axis=1)
        q, _ = np.linalg.qr(v)
        out = np.kron(out, q @ q.conj().T)
    return out


def masked_frobenius(a: np.ndarray, b: np.ndarray, window: np.ndarray) -> float:
    """Relative Frobenius distance after projecting both sides by the window."""
    da = window @ (a - b) @ window
    db = window @ b @ window
    scale = np.linalg.norm(db)
    if scale == 0:
        scale = 1.0
    return float(np.linalg.norm(da) / scale)
