"""Affine-symplectic shadows of the frame transformations.

A PhaseSpaceMap records how the conjugation by a frame-change unitary acts on
the operator vector (x_1, p_1, ..., x_N, p_N): the image of each input
operator is an affine combination of output operators.  Canonicity is the
statement M Omega M^T = Omega for the row-image convention used here, which
is equivalent to preservation of [q, pi] = i*hbar.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class PhaseSpaceError(ValueError):
    """Label-interface or canonicity violation."""


def symplectic_form(n_labels: int) -> np.ndarray:
    """Standard form for the interleaved ordering (x1, p1, x2, p2, ...)."""
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n_labels, 2 * n_labels))
    for k in range(n_labels):
        out[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = j
    return out


@dataclass(frozen=True)
class PhaseSpaceMap:
    """S z_in S^dagger = sum_j M[i, j] z_out[j] + shift[i].

    Rows index input operators, columns output operators, both in the
    interleaved (x, p) ordering of ``in_labels`` / ``out_labels``.
    """

    in_labels: tuple[str, ...]
    out_labels: tuple[str, ...]
    matrix: np.ndarray
    shift: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        n = 2 * len(self.in_labels)
        if self.matrix.shape != (n, 2 * len(self.out_labels)):
            raise PhaseSpaceError("matrix shape does not match label lists")
        if self.shift is None:
            object.__setattr__(self, "shift", np.zeros(n))

    def in_index(self, label: str, which: str) -> int:
        return 2 * self.in_labels.index(label) + (0 if which == "x" else 1)

    def out_index(self, label: str, which: str) -> int:
        return 2 * self.out_labels.index(label) + (0 if which == "x" else 1)

    def image_row(self, label: str, which: str) -> np.ndarray:
        return self.matrix[self.in_index(label, which)]

    def symplectic_defect(self) -> float:
        omega = symplectic_form(len(self.in_labels))
        return float(np.max(np.abs(self.matrix @ omega @ self.matrix.T - omega)))

    def is_canonical(self, tol: float = 1e-12) -> bool:
        return self.symplectic_defect() <= tol

    def require_canonical(self, tol: float = 1e-12) -> "PhaseSpaceMap":
        d = self.symplectic_defect()
        if d > tol:
            raise PhaseSpaceError(f"map is not canonical: defect {d:.3e}")
        return self

    def inverse(self) -> "PhaseSpaceMap":
        m_inv = np.linalg.inv(self.matrix)
        return PhaseSpaceMap(self.out_labels, self.in_labels, m_inv,
                             -m_inv @ self.shift, dict(self.params))

    @property
    def position_block_pure(self) -> bool:
        """True when position images involve output positions only."""
        for i in range(0, self.matrix.shape[0], 2):
            if np.any(self.matrix[i, 1::2] != 0.0):
                return False
        return True


def identity_map(labels: tuple[str, ...]) -> PhaseSpaceMap:
    n = 2 * len(labels)
    return PhaseSpaceMap(tuple(labels), tuple(labels), np.eye(n))


def compose(outer: PhaseSpaceMap, inner: PhaseSpaceMap) -> PhaseSpaceMap:
    """Map of (outer unitary applied after inner unitary)."""
    if inner.out_labels != outer.in_labels:
        raise PhaseSpaceError(
            f"label interface mismatch: {inner.out_labels} vs {outer.in_labels}")
    m = inner.matrix @ outer.matrix
    shift = inner.shift + inner.matrix @ outer.shift
    return PhaseSpaceMap(inner.in_labels, outer.out_labels, m, shift)


# -- the catalogue of frame-change maps --------------------------------------
#
# Frame change old -> new acting on externals (new, spectator); outputs are
# labelled (spectator, old).  Parameters follow the operator definitions in
# transforms.py.


def position_jump_map(new: str = "A", spectator: str = "B", old: str = "C") -> PhaseSpaceMap:
    """Relative-position frame change (controlled translation + parity swap)."""
    labels_in = (new, spectator)
    labels_out = (spectator, old)
    m = np.zeros((4, 4))
    # rows: x_new, p_new, x_spec, p_spec; cols: q_spec, pi_spec, q_old, pi_old
    m[0, 2] = -1.0                 # x_new -> -q_old
    m[1, 1] = -1.0                 # p_new -> -(pi_old + pi_spec)
    m[1, 3] = -1.0
    m[2, 0] = 1.0                  # x_spec -> q_spec - q_old
    m[2, 2] = -1.0
    m[3, 1] = 1.0                  # p_spec -> pi_spec
    return PhaseSpaceMap(labels_in, labels_out, m)


def momentum_jump_map(new: str = "A", spectator: str = "B", old: str = "C") -> PhaseSpaceMap:
    """Relative-momentum frame change (momentum kick + parity swap)."""
    labels_in = (new, spectator)
    labels_out = (spectator, old)
    m = np.zeros((4, 4))
    m[0, 0] = -1.0                 # x_new -> -(q_old + q_spec)
    m[0, 2] = -1.0
    m[1, 3] = -1.0                 # p_new -> -pi_old
    m[2, 0] = 1.0                  # x_spec -> q_spec
    m[3, 1] = 1.0                  # p_spec -> pi_spec - pi_old
    m[3, 3] = -1.0
    return PhaseSpaceMap(labels_in, labels_out, m)


def translation_jump_map(t: float, tau: float, m_new: float, m_old: float,
                         new: str = "A", spectator: str = "B",
                         old: str = "C") -> PhaseSpaceMap:
    """Galilean translation relative to the new frame's position at time tau."""
    dt = t - tau
    m = np.zeros((4, 4))
    # x_new -> -q_old + (pi_old/m_old) dt - (pi_spec + pi_old)/m_new dt
    m[0, 2] = -1.0
    m[0, 3] = dt / m_old - dt / m_new
    m[0, 1] = -dt / m_new
    # p_new -> -(pi_spec + pi_old)
    m[1, 1] = -1.0
    m[1, 3] = -1.0
    # x_spec -> q_spec - q_old + (pi_old/m_old) dt
    m[2, 0] = 1.0
    m[2, 2] = -1.0
    m[2, 3] = dt / m_old
    # p_spec -> pi_spec
    m[3, 1] = 1.0
    return PhaseSpaceMap((new, spectator), (spectator, old), m,
                         params={"t": t, "tau": tau, "m_new": m_new, "m_old": m_old})


def boost_jump_map(t: float, m_new: float, m_spec: float, m_old: float,
                   new: str = "A", spectator: str = "B",
                   old: str = "C") -> PhaseSpaceMap:
    """Boost by the new frame's velocity, with velocity-parity mass scaling."""
    m = np.zeros((4, 4))
    # x_new -> -(m_old q_old + m_spec q_spec)/m_new + (pi_old + pi_spec) t/m_new
    #          - (pi_old/m_old) t
    m[0, 0] = -m_spec / m_new
    m[0, 2] = -m_old / m_new
    m[0, 1] = t / m_new
    m[0, 3] = t / m_new - t / m_old
    # p_new -> -(m_new/m_old) pi_old
    m[1, 3] = -m_new / m_old
    # x_spec -> q_spec - (pi_old/m_old) t
    m[2, 0] = 1.0
    m[2, 3] = -t / m_old
    # p_spec -> pi_spec - (m_spec/m_old) pi_old
    m[3, 1] = 1.0
    m[3, 3] = -m_spec / m_old
    return PhaseSpaceMap((new, spectator), (spectator, old), m,
                         params={"t": t, "m_new": m_new, "m_spec": m_spec,
                                 "m_old": m_old})


def velocity_jump_map(m_new: float, m_spec: float, m_old: float,
                      new: str = "A", spectator: str = "B",
                      old: str = "C") -> PhaseSpaceMap:
    """Instantaneous relative-velocity frame change; equals the boost at t=0."""
    out = boost_jump_map(0.0, m_new, m_spec, m_old, new, spectator, old)
    return replace(out, params={"m_new": m_new, "m_spec": m_spec, "m_old": m_old})


# -- quadrature observables ---------------------------------------------------


@dataclass(frozen=True)
class QuadObservable:
    """const + sum_i lin[i] z_i + z^T quad z over (x_1, p_1, ..., x_N, p_N)."""

    labels: tuple[str, ...]
    lin: np.ndarray
    const: float = 0.0
    quad: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        n = 2 * len(self.labels)
        if self.lin.shape != (n,):
            raise PhaseSpaceError("linear coefficient length mismatch")
        if self.quad is not None:
            if self.quad.shape != (n, n):
                raise PhaseSpaceError("quadratic coefficient shape mismatch")
            if np.max(np.abs(self.quad - self.quad.T)) > 1e-12:
                raise PhaseSpaceError("quadratic coefficient matrix must be symmetric")

    def index(self, label: str, which: str) -> int:
        return 2 * self.labels.index(label) + (0 if which == "x" else 1)

    def coeff(self, label: str, which: str) -> float:
        return float(self.lin[self.index(label, which)])

    def quad_coeff(self, la: str, wa: str, lb: str, wb: str) -> float:
        if self.quad is None:
            return 0.0
        i, j = self.index(la, wa), self.index(lb, wb)
        return float(self.quad[i, j] + self.quad[j, i]) if i != j else float(self.quad[i, i])

    def coefficient_vector(self) -> np.ndarray:
        """Flattened (const, lin, upper-triangular quad) vector."""
        n = 2 * len(self.labels)
        q = self.quad if self.quad is not None else np.zeros((n, n))
        sym = 0.5 * (q + q.T)
        iu = np.triu_indices(n)
        # double off-diagonal entries so the vector determines the form
        w = np.where(iu[0] == iu[1], 1.0, 2.0)
        return np.concatenate([[self.const], self.lin, sym[iu] * w])

    def relabel(self, mapping: dict[str, str]) -> "QuadObservable":
        labels = tuple(mapping.get(l, l) for l in self.labels)
        return replace(self, labels=labels)

    def restricted_to(self, labels: tuple[str, ...]) -> "QuadObservable":
        """Embed/reorder onto a target label tuple (missing labels get zeros)."""
        n = 2 * len(labels)
        lin = np.zeros(n)
        quad = np.zeros((n, n))
        src_q = self.quad if self.quad is not None else None
        for a, la in enumerate(self.labels):
            if la not in labels:
                if np.any(self.lin[2 * a : 2 * a + 2]):
                    raise PhaseSpaceError(f"observable uses label {la!r} absent from target")
                continue
            ia = labels.index(la)
            lin[2 * ia : 2 * ia + 2] = self.lin[2 * a : 2 * a + 2]
            if src_q is not None:
                for b, lb in enumerate(self.labels):
                    if lb not in labels:
                        continue
                    ib = labels.index(lb)
                    quad[2 * ia : 2 * ia + 2, 2 * ib : 2 * ib + 2] = \
                        src_q[2 * a : 2 * a + 2, 2 * b : 2 * b + 2]
        qq = quad if np.any(quad) else None
        return QuadObservable(tuple(labels), lin, self.const, qq, self.name)


def linear_observable(labels: tuple[str, ...], name: str = "",
                      **coeffs: float) -> QuadObservable:
    """Build from keyword coefficients like x_B=1.0, p_A=-2.0."""
    lin = np.zeros(2 * len(labels))
    const = coeffs.pop("const", 0.0)
    for key, val in coeffs.items():
        which, label = key.split("_", 1)
        lin[2 * labels.index(label) + (0 if which == "x" else 1)] = val
    return QuadObservable(tuple(labels), lin, const, None, name)


def position_observable(label: str, labels: tuple[str, ...]) -> QuadObservable:
    return linear_observable(labels, name=f"x_{label}", **{f"x_{label}": 1.0})


def momentum_observable(label: str, labels: tuple[str, ...]) -> QuadObservable:
    return linear_observable(labels, name=f"p_{label}", **{f"p_{label}": 1.0})


def boost_generator_observable(label: str, mass: float, t: float,
                               labels: tuple[str, ...]) -> QuadObservable:
    """G = p t - m x for one subsystem."""
    return linear_observable(labels, name=f"G_{label}",
                             **{f"p_{label}": t, f"x_{label}": -mass})


def conjugate_observable(psmap: PhaseSpaceMap, obs: QuadObservable) -> QuadObservable:
    """Image S O S^dagger of a quadrature observable under the frame map."""
    src = obs.restricted_to(psmap.in_labels)
    m, s = psmap.matrix, psmap.shift
    lin = m.T @ src.lin
    const = src.const + float(src.lin @ s)
    quad = None
    if src.quad is not None:
        quad = m.T @ src.quad @ m
        lin = lin + 2.0 * (m.T @ src.quad @ s)
        const += float(s @ src.quad @ s)
        if not np.any(quad):
            quad = None
    return QuadObservable(psmap.out_labels, lin, const, quad, obs.name)


def observables_close(a: QuadObservable, b: QuadObservable, tol: float = 1e-10) -> bool:
    labels = tuple(sorted(set(a.labels) | set(b.labels)))
    va = a.restricted_to(labels).coefficient_vector()
    vb = b.restricted_to(labels).coefficient_vector()
    return bool(np.max(np.abs(va - vb)) <= tol)


@dataclass(frozen=True)
class ConservedSetMap:
    """Recombination of conjugated conserved quantities into swapped forms."""

    images: tuple[QuadObservable, ...]
    targets: tuple[QuadObservable, ...]
    gamma: np.ndarray
    residual: float


def map_conserved_set(psmap: PhaseSpaceMap, observables: list[QuadObservable],
                      swap: tuple[str, str], tol: float = 1e-9) -> ConservedSetMap:
    """Map conserved quantities to the new frame and recombine.

    The targets are the input observables with the two frame labels swapped
    (the old frame takes the place of the new one).  Returns the images
    S C_i S^dagger, the targets, and the gamma coefficients with
    target_i = sum_j gamma[i, j] * image_j.  Raises if no linear
    recombination reaches the swapped functional forms.
    """
    if not observables:
        return ConservedSetMap((), (), np.zeros((0, 0)), 0.0)
    images = tuple(conjugate_observable(psmap, o) for o in observables)
    mapping = {swap[0]: swap[1], swap[1]: swap[0]}
    targets = tuple(o.relabel(mapping).restricted_to(psmap.out_labels)
                    for o in observables)
    a = np.stack([im.coefficient_vector() for im in images], axis=1)
    gamma = np.zeros((len(targets), len(images)))
    worst = 0.0
    for i, tgt in enumerate(targets):
        b = tgt.coefficient_vector()
        sol, *_ = np.linalg.lstsq(a, b, rcond=None)
        res = float(np.max(np.abs(a @ sol - b)))
        worst = max(worst, res)
        if res > tol:
            raise PhaseSpaceError(
                f"no linear recombination reproduces swapped form of "
                f"{tgt.name or i}: residual {res:.3e}")
        sol[np.abs(sol) < 1e-12] = 0.0
        gamma[i] = sol
    return ConservedSetMap(images, targets, gamma, worst)


# -- the naive relative-coordinate map ---------------------------------------


@dataclass(frozen=True)
class CanonicityReport:
    """Poisson-bracket audit of the naive relative-coordinate map."""

    n_particles: int
    matrix: np.ndarray          # rows: (x^r_1, p^r_1, ...) over (x_0, p_0, ..., x_N-1, p_N-1)
    bracket_matrix: np.ndarray  # brackets of the relative operator vector
    canonical: bool
    offending_pairs: tuple[tuple[int, int], ...]


def naive_relative_map(n_particles: int, masses: list[float]) -> CanonicityReport:
    """Audit x^r_i = x_i - x_0, p^r_i = mu_i0 (p_i/m_i - p_0/m_0).

    ``n_particles`` counts all particles including the reference particle 0;
    the map produces n_particles - 1 relative pairs.  The bracket matrix is
    evaluated directly from the Poisson structure; off-diagonal {x^r_i, p^r_j}
    brackets do not vanish once there are at least two relative pairs.
    """
    if n_particles < 2:
        raise PhaseSpaceError("need at least two particles")
    if len(masses) != n_particles:
        raise PhaseSpaceError("one mass per particle required")
    n_rel = n_particles - 1
    rows = np.zeros((2 * n_rel, 2 * n_particles))
    m0 = masses[0]
    for i in range(1, n_particles):
        mi = masses[i]
        mu = mi * m0 / (mi + m0)
        r = 2 * (i - 1)
        rows[r, 2 * i] = 1.0
        rows[r, 0] = -1.0
        rows[r + 1, 2 * i + 1] = mu / mi
        rows[r + 1, 1] = -mu / m0
    omega = symplectic_form(n_particles)
    bracket = rows @ omega @ rows.T
    target = symplectic_form(n_rel)
    bad = []
    for i in range(2 * n_rel):
        for j in range(2 * n_rel):
            if abs(bracket[i, j] - target[i, j]) > 1e-12:
                bad.append((i, j))
    return CanonicityReport(n_particles, rows, bracket, not bad, tuple(bad))


# -- pretty printing ----------------------------------------------------------


def format_map_table(family: str, new: str = "A", spectator: str = "B",
                     old: str = "C") -> list[str]:
    """Symbolic transformation table, one line per operator image."""
    n, b, c = new, spectator, old
    tables = {
        "position": [
            (f"x_{b}", f"q_{b} - q_{c}"),
            (f"p_{b}", f"pi_{b}"),
            (f"x_{n}", f"-q_{c}"),
            (f"p_{n}", f"-(pi_{c} + pi_{b})"),
        ],
        "momentum": [
            (f"x_{b}", f"q_{b}"),
            (f"p_{b}", f"pi_{b} - pi_{c}"),
            (f"x_{n}", f"-(q_{c} + q_{b})"),
            (f"p_{n}", f"-pi_{c}"),
        ],
        "translation": [
            (f"x_{b}", f"q_{b} - q_{c} + (1/m_{c})(t-tau) pi_{c}"),
            (f"p_{b}", f"pi_{b}"),
            (f"x_{n}", f"-q_{c} + (1/m_{c})(t-tau) pi_{c} - (1/m_{n})(t-tau)(pi_{b} + pi_{c})"),
            (f"p_{n}", f"-(pi_{b} + pi_{c})"),
        ],
        "boost": [
            (f"x_{b}", f"q_{b} - (1/m_{c}) t pi_{c}"),
            (f"p_{b}", f"pi_{b} - (m_{b}/m_{c}) pi_{c}"),
            (f"x_{n}", f"-(m_{c} q_{c} + m_{b} q_{b})/m_{n} + (1/m_{n}) t (pi_{c} + pi_{b}) - (1/m_{c}) t pi_{c}"),
            (f"p_{n}", f"-(m_{n}/m_{c}) pi_{c}"),
        ],
        "velocity": [
            (f"x_{b}", f"q_{b}"),
            (f"p_{b}", f"pi_{b} - (m_{b}/m_{c}) pi_{c}"),
            (f"x_{n}", f"-(m_{c} q_{c} + m_{b} q_{b})/m_{n}"),
            (f"p_{n}", f"-(m_{n}/m_{c}) pi_{c}"),
        ],
    }
    if family not in tables:
        raise PhaseSpaceError(f"no printable table for family {family!r}")
    return [f"{lhs} -> {rhs}" for lhs, rhs in tables[family]]
