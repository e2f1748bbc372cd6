"""Multipartite state vectors on labelled 1D grids.

States are immutable values; every operation returns a new state.  Grid axes
store wavefunction values in either the position ("x") or momentum ("p")
representation; photon and level axes are always in their native basis.
The L2 norm uses the measure dx (or dp) on grid axes and counting measure
elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grids import Grid1D, GridError, Subsystem

NORM_TOL = 1e-10


class StateError(ValueError):
    """Invalid state construction or operation."""


class SupportOverflowError(StateError):
    """State support does not fit on the grid to the requested tolerance."""


def _centered_fft(values: np.ndarray, axis: int, grid: Grid1D) -> np.ndarray:
    """Position -> momentum values on the centered dual grids.

    psi_p(p_j) = (1/sqrt(2*pi*hbar)) * sum_k psi(x_k) exp(-i p_j x_k / hbar) dx
    """
    n = grid.n
    sign = np.ones(n)
    sign[1::2] = -1.0
    shape = [1] * values.ndim
    shape[axis] = n
    sign = sign.reshape(shape)
    phase0 = (-1.0) ** (n // 2)  # exp(-i pi n / 2) for even n
    out = np.fft.fft(values * sign, axis=axis)
    return out * sign * (grid.dx / np.sqrt(2.0 * np.pi * grid.hbar) * phase0)


def _centered_ifft(values: np.ndarray, axis: int, grid: Grid1D) -> np.ndarray:
    n = grid.n
    sign = np.ones(n)
    sign[1::2] = -1.0
    shape = [1] * values.ndim
    shape[axis] = n
    sign = sign.reshape(shape)
    phase0 = (-1.0) ** (n // 2)
    out = np.fft.ifft(values * sign, axis=axis)
    return out * sign * (n * grid.dp / np.sqrt(2.0 * np.pi * grid.hbar) * phase0)


@dataclass(frozen=True)
class MultiState:
    """Labelled tensor of complex amplitudes over subsystems.

    ``frame`` names the reference system whose perspective the state
    represents; ``reps`` records per-axis representation ("x", "p", or
    "native").
    """

    subsystems: tuple[Subsystem, ...]
    amps: np.ndarray
    frame: str
    time: float = 0.0
    reps: tuple[str, ...] = ()

    def __post_init__(self):
        labels = [s.label for s in self.subsystems]
        if len(set(labels)) != len(labels):
            raise StateError(f"duplicate subsystem labels: {labels}")
        dims = tuple(s.dim for s in self.subsystems)
        if self.amps.shape != dims:
            raise StateError(f"amplitude shape {self.amps.shape} != dims {dims}")
        if not self.reps:
            object.__setattr__(
                self,
                "reps",
                tuple("x" if s.kind == "grid" else "native" for s in self.subsystems),
            )
        for s, r in zip(self.subsystems, self.reps):
            if s.kind == "grid" and r not in ("x", "p"):
                raise StateError(f"bad representation {r!r} for grid axis {s.label!r}")
            if s.kind != "grid" and r != "native":
                raise StateError(f"axis {s.label!r} only supports its native basis")

    # -- bookkeeping ------------------------------------------------------

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.subsystems)

    def axis(self, label: str) -> int:
        for i, s in enumerate(self.subsystems):
            if s.label == label:
                return i
        raise StateError(f"no subsystem labelled {label!r} (have {self.labels})")

    def subsystem(self, label: str) -> Subsystem:
        return self.subsystems[self.axis(label)]

    def _measure(self, i: int) -> float:
        s, r = self.subsystems[i], self.reps[i]
        if s.kind == "grid":
            return s.grid.dx if r == "x" else s.grid.dp
        return 1.0

    @property
    def total_measure(self) -> float:
        m = 1.0
        for i in range(len(self.subsystems)):
            m *= self._measure(i)
        return m

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2) * self.total_measure))

    def overlap(self, other: "MultiState") -> complex:
        """<self|other> with both states in matching representations."""
        if self.labels != other.labels or self.reps != other.reps:
            raise StateError("overlap requires matching labels and representations")
        return complex(np.vdot(self.amps, other.amps) * self.total_measure)

    def fidelity(self, other: "MultiState") -> float:
        return abs(self.overlap(other)) ** 2

    def normalized(self) -> "MultiState":
        return replace(self, amps=self.amps / self.norm())

    def with_amps(self, amps: np.ndarray) -> "MultiState":
        return replace(self, amps=amps)

    def check_norm(self, tol: float = NORM_TOL) -> "MultiState":
        n = self.norm()
        if abs(n - 1.0) > tol:
            raise StateError(f"state norm {n} deviates from 1 beyond {tol}")
        return self

    # -- representation changes -------------------------------------------

    def to_momentum(self, label: str) -> "MultiState":
        i = self.axis(label)
        s = self.subsystems[i]
        if s.kind != "grid":
            raise StateError(f"axis {label!r} has no momentum representation")
        if self.reps[i] == "p":
            return self
        amps = _centered_fft(self.amps, i, s.grid)
        reps = list(self.reps)
        reps[i] = "p"
        return replace(self, amps=amps, reps=tuple(reps))

    def to_position(self, label: str) -> "MultiState":
        i = self.axis(label)
        s = self.subsystems[i]
        if s.kind != "grid":
            raise StateError(f"axis {label!r} has no position representation")
        if self.reps[i] == "x":
            return self
        amps = _centered_ifft(self.amps, i, s.grid)
        reps = list(self.reps)
        reps[i] = "x"
        return replace(self, amps=amps, reps=tuple(reps))

    def in_reps(self, **rep_by_label: str) -> "MultiState":
        out = self
        for label, rep in rep_by_label.items():
            out = out.to_momentum(label) if rep == "p" else out.to_position(label)
        return out

    def all_position(self) -> "MultiState":
        out = self
        for s, r in zip(self.subsystems, self.reps):
            if r == "p":
                out = out.to_position(s.label)
        return out

    # -- diagnostics --------------------------------------------------------

    def marginal_density(self, label: str) -> np.ndarray:
        """Probability density (per unit measure) on one axis."""
        i = self.axis(label)
        other = tuple(j for j in range(self.amps.ndim) if j != i)
        w = self.total_measure / self._measure(i)
        return np.sum(np.abs(self.amps) ** 2, axis=other) * w

    def axis_coordinates(self, label: str) -> np.ndarray:
        i = self.axis(label)
        s, r = self.subsystems[i], self.reps[i]
        if s.kind == "grid":
            return s.grid.points if r == "x" else s.grid.momenta
        if s.kind == "photon":
            return np.concatenate([[0.0], s.freq_grid.omegas])
        return np.arange(s.dim, dtype=float)

    def mean_x(self, label: str) -> float:
        st = self.to_position(label)
        rho = st.marginal_density(label)
        g = st.subsystem(label).grid
        return float(np.sum(g.points * rho) * g.dx)

    def var_x(self, label: str) -> float:
        st = self.to_position(label)
        rho = st.marginal_density(label)
        g = st.subsystem(label).grid
        m = np.sum(g.points * rho) * g.dx
        return float(np.sum((g.points - m) ** 2 * rho) * g.dx)

    def mean_p(self, label: str) -> float:
        st = self.to_momentum(label)
        rho = st.marginal_density(label)
        g = st.subsystem(label).grid
        return float(np.sum(g.momenta * rho) * g.dp)

    def var_p(self, label: str) -> float:
        st = self.to_momentum(label)
        rho = st.marginal_density(label)
        g = st.subsystem(label).grid
        m = np.sum(g.momenta * rho) * g.dp
        return float(np.sum((g.momenta - m) ** 2 * rho) * g.dp)


# -- constructors -----------------------------------------------------------


def single_axis_state(sub: Subsystem, values: np.ndarray, frame: str,
                      time: float = 0.0) -> MultiState:
    return MultiState((sub,), np.asarray(values, dtype=complex), frame, time)


def coherent_state(sub: Subsystem, x0: float, p0: float, sigma: float,
                   frame: str = "lab", time: float = 0.0,
                   tail_tol: float = 1e-12) -> MultiState:
    """Normalized Gaussian exp(-(x-x0)^2/(4 sigma^2) + i p0 x / hbar)."""
    if sub.kind != "grid":
        raise StateError("coherent_state needs a spatial subsystem")
    g = sub.grid
    if sigma <= 2 * g.dx:
        raise StateError(f"sigma={sigma} must exceed 2*dx={2 * g.dx}")
    x_lo, x_hi = g.points[0], g.points[-1]
    if x0 - 5 * sigma < x_lo or x0 + 5 * sigma > x_hi:
        raise SupportOverflowError("5-sigma support does not fit inside the grid")
    # |psi|^2 is N(x0, sigma^2); analytic tail mass outside the grid span
    from scipy.special import erfc
    tail = 0.5 * erfc((x0 - x_lo) / (sigma * np.sqrt(2))) \
        + 0.5 * erfc((x_hi - x0) / (sigma * np.sqrt(2)))
    if tail > tail_tol:
        raise SupportOverflowError(f"Gaussian tail mass {tail:.3e} exceeds {tail_tol}")
    x = g.points
    psi = np.exp(-((x - x0) ** 2) / (4 * sigma**2) + 1j * p0 * x / g.hbar)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * g.dx)
    return single_axis_state(sub, psi, frame, time)


def sharp_state(sub: Subsystem, x0: float, frame: str = "lab",
                time: float = 0.0) -> MultiState:
    """Single grid-point spike at x0, unit norm under measure dx."""
    if sub.kind != "grid":
        raise StateError("sharp_state needs a spatial subsystem")
    g = sub.grid
    k = g.index_of(x0)  # raises GridError for off-grid x0; no snapping
    psi = np.zeros(g.n, dtype=complex)
    psi[k] = 1.0 / np.sqrt(g.dx)
    return single_axis_state(sub, psi, frame, time)


def grid_state(sub: Subsystem, values: np.ndarray, frame: str = "lab",
               time: float = 0.0, normalize: bool = True) -> MultiState:
    st = single_axis_state(sub, values, frame, time)
    return st.normalized() if normalize else st


def tensor(*states: MultiState) -> MultiState:
    """Product state over disjoint labels; norms multiply."""
    if not states:
        raise StateError("tensor of zero states")
    frame, time = states[0].frame, states[0].time
    subs: list[Subsystem] = []
    for st in states:
        if st.frame != frame:
            raise StateError("tensor factors must share the frame tag")
        subs.extend(st.subsystems)
    labels = [s.label for s in subs]
    if len(set(labels)) != len(labels):
        raise StateError(f"duplicate labels in tensor: {labels}")
    amps = states[0].amps
    for st in states[1:]:
        amps = np.tensordot(amps, st.amps, axes=0)
    reps = tuple(r for st in states for r in st.reps)
    return MultiState(tuple(subs), amps, frame, time, reps)


def correlated_pair_state(sub_a: Subsystem, sub_b: Subsystem,
                          envelope: np.ndarray, profile: np.ndarray,
                          frame: str = "lab", time: float = 0.0) -> MultiState:
    """Two-axis state psi(x_a, x_b) = f(x_a) g(x_b - x_a) on equal grids.

    ``profile`` g is indexed on sub_b's grid; the x_a-shift is the exact
    cyclic index shift, so the relative coordinate is sharp on the grid.
    """
    ga, gb = sub_a.grid, sub_b.grid
    if ga.n != gb.n or abs(ga.dx - gb.dx) > 1e-12 * ga.dx:
        raise StateError("correlated pair needs identical grids")
    f = np.asarray(envelope, dtype=complex)
    g = np.asarray(profile, dtype=complex)
    amps = np.zeros((ga.n, gb.n), dtype=complex)
    for k in range(ga.n):
        amps[k, :] = f[k] * np.roll(g, k - ga.n // 2)
    st = MultiState((sub_a, sub_b), amps, frame, time)
    return st.normalized()


# -- elementary unitary moves ----------------------------------------------


def parity_flip_indices(n: int) -> np.ndarray:
    """The exact involution k -> (n - k) mod n realizing x -> -x."""
    return (-np.arange(n)) % n


def apply_parity_axis(state: MultiState, label: str) -> MultiState:
    """x -> -x (or p -> -p) on one grid axis via the exact index involution."""
    i = state.axis(label)
    if state.subsystems[i].kind != "grid":
        raise StateError(f"parity needs a grid axis, got {label!r}")
    idx = parity_flip_indices(state.amps.shape[i])
    amps = np.take(state.amps, idx, axis=i)
    return state.with_amps(amps)


def relabel_axis(state: MultiState, old: str, new: str,
                 frame: str | None = None) -> MultiState:
    i = state.axis(old)
    subs = list(state.subsystems)
    subs[i] = replace(subs[i], label=new)
    return MultiState(tuple(subs), state.amps, frame or state.frame,
                      state.time, state.reps)


def rescale_axis(state: MultiState, label: str, factor: float) -> MultiState:
    """Exact dilation by grid-metadata rescale dx -> factor*dx.

    In the position representation amplitudes scale by 1/sqrt(factor); in the
    momentum representation by sqrt(factor) (dp -> dp/factor).  Unit norm is
    preserved exactly; no interpolation is performed.
    """
    if factor <= 0:
        raise StateError(f"rescale factor must be positive, got {factor}")
    i = state.axis(label)
    sub = state.subsystems[i]
    if sub.kind != "grid":
        raise StateError(f"rescale needs a continuous axis, got {label!r}")
    subs = list(state.subsystems)
    subs[i] = replace(sub, grid=sub.grid.rescaled(factor))
    scale = factor ** (-0.5) if state.reps[i] == "x" else factor**0.5
    return MultiState(tuple(subs), state.amps * scale, state.frame,
                      state.time, state.reps)


def phase_multiply(state: MultiState, label: str, phase_values: np.ndarray) -> MultiState:
    """Multiply by exp(i * phase_values) diagonal along one axis."""
    i = state.axis(label)
    shape = [1] * state.amps.ndim
    shape[i] = state.amps.shape[i]
    return state.with_amps(state.amps * np.exp(1j * np.asarray(phase_values)).reshape(shape))


def phase_multiply_pair(state: MultiState, label_a: str, label_b: str,
                        phase_matrix: np.ndarray) -> MultiState:
    """Multiply by exp(i * phase[a_index, b_index]) over two axes."""
    ia, ib = state.axis(label_a), state.axis(label_b)
    shape = [1] * state.amps.ndim
    shape[ia] = state.amps.shape[ia]
    shape[ib] = state.amps.shape[ib]
    ph = np.exp(1j * phase_matrix)
    if ia > ib:
        ph = ph.T
    return state.with_amps(state.amps * ph.reshape(shape))


# -- reductions and entanglement diagnostics --------------------------------


def _weighted_matrix(state: MultiState, left_labels: tuple[str, ...]) -> np.ndarray:
    """Reshape to (left, right) with measure weights folded into amplitudes."""
    amps = state.amps
    for i in range(amps.ndim):
        m = state._measure(i)
        if m != 1.0:
            shape = [1] * amps.ndim
            shape[i] = amps.shape[i]
            w = np.full(amps.shape[i], np.sqrt(m)).reshape(shape)
            amps = amps * w
    left = [state.axis(l) for l in left_labels]
    right = [i for i in range(amps.ndim) if i not in left]
    perm = left + right
    amps = np.transpose(amps, perm)
    dl = int(np.prod([amps.shape[i] for i in range(len(left))])) if left else 1
    return amps.reshape(dl, -1)


def reduced_density(state: MultiState, keep: set[str] | tuple[str, ...]) -> np.ndarray:
    """Density matrix of the kept axes (measure-weighted; trace 1)."""
    keep = tuple(keep)
    if not keep or len(keep) >= len(state.subsystems):
        raise StateError("keep must be a nonempty proper subset of labels")
    for l in keep:
        state.axis(l)
    m = _weighted_matrix(state, keep)
    return m @ m.conj().T


def schmidt_coefficients(state: MultiState, side: set[str] | tuple[str, ...]) -> np.ndarray:
    side = tuple(side)
    if not side or len(side) >= len(state.subsystems):
        raise StateError("bipartition side must be a nonempty proper subset")
    m = _weighted_matrix(state, side)
    return np.linalg.svd(m, compute_uv=False)


def schmidt_entropy(state: MultiState, side: set[str] | tuple[str, ...]) -> float:
    """Von Neumann entropy (nats) of either side of the bipartition."""
    s = schmidt_coefficients(state, side)
    lam = s**2
    lam = lam[lam > 1e-15]
    lam = lam / np.sum(lam)
    return float(-np.sum(lam * np.log(lam)))


def purity(state: MultiState, side: set[str] | tuple[str, ...]) -> float:
    s = schmidt_coefficients(state, side)
    lam = s**2
    return float(np.sum(lam**2) / np.sum(lam) ** 2)


def random_smooth_state(subs: tuple[Subsystem, ...], frame: str,
                        rng: np.random.Generator, components: int = 4,
                        x_fill: float = 0.3, p_fill: float = 0.25,
                        sigma_points: float = 6.0) -> MultiState:
    """Random superposition of coherent states, localized in phase space.

    Suitable for transform property tests: support stays away from both the
    position and momentum grid boundaries (fractions ``x_fill``/``p_fill`` of
    the half-widths), so periodic wraparound is negligible.
    """
    dims = tuple(s.dim for s in subs)
    amps = np.zeros(dims, dtype=complex)
    for _ in range(components):
        factors = []
        for s in subs:
            if s.kind != "grid":
                v = rng.standard_normal(s.dim) + 1j * rng.standard_normal(s.dim)
                factors.append(v / np.linalg.norm(v))
                continue
            g = s.grid
            x0 = rng.uniform(-x_fill, x_fill) * g.half_width
            p0 = rng.uniform(-p_fill, p_fill) * (0.5 * g.n * g.dp)
            sig = sigma_points * g.dx * rng.uniform(0.8, 1.5)
            x = g.points
            psi = np.exp(-((x - x0) ** 2) / (4 * sig**2) + 1j * p0 * x / g.hbar)
            factors.append(psi / np.linalg.norm(psi))
        term = factors[0]
        for f in factors[1:]:
            term = np.tensordot(term, f, axes=0)
        c = rng.standard_normal() + 1j * rng.standard_normal()
        amps = amps + c * term
    return MultiState(subs, amps, frame).normalized()


def random_state(subs: tuple[Subsystem, ...], frame: str,
                 rng: np.random.Generator, envelope: float | None = 0.25) -> MultiState:
    """Normalized complex Gaussian state, optionally edge-tapered.

    ``envelope`` is the Gaussian envelope width as a fraction of each grid's
    half-width (None for full-support noise).
    """
    dims = tuple(s.dim for s in subs)
    amps = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
    if envelope is not None:
        for i, s in enumerate(subs):
            if s.kind != "grid":
                continue
            x = s.grid.points
            w = np.exp(-(x**2) / (2 * (envelope * s.grid.half_width) ** 2))
            shape = [1] * len(dims)
            shape[i] = dims[i]
            amps = amps * w.reshape(shape)
    st = MultiState(subs, amps, frame)
    return st.normalized()
