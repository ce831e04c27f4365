"""Link (correlation) matrices and their composition around closed site paths.

A two-site density matrix ``rho_ab`` defines the map ``M_a -> tr_a[(M_a x I) rho_ab]``
from operators on site ``a`` to operators on site ``b``.  Written on Pauli
vectors it is the real 4x4 matrix

    S(b, a)[j, i] = 1/2 tr(sigma_i x sigma_j rho_ab)

and the trace of the product of such matrices around a closed path is
unchanged by local SU(2) operations.  Inserting the spin flip ``eta`` at every
site lifts the invariance to SL(2,C).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ClassError, DimensionError, ParseError, RealityError, SiteError
from .qstate import (
    PAULI,
    SL2C,
    SU2,
    DensityMatrix,
    LocalOperation,
    PureState,
    as_density,
    partial_trace_array,
)

REALITY_TOL = 1e-10

_ETA = np.diag([1.0, -1.0, -1.0, -1.0])
_ETA.setflags(write=False)

# sigma_i (x) sigma_j as a (4, 4, 4, 4) array indexed [i, j, row, col]
_PAULI_PAIRS = np.einsum("iab,jcd->ijacbd", PAULI, PAULI).reshape(4, 4, 4, 4)
_SIGMA_Y2 = np.kron(PAULI[2], PAULI[2])


def minkowski_eta() -> np.ndarray:
    """Spin flip on Pauli vectors: ``diag(1, -1, -1, -1)``."""
    return _ETA.copy()


@dataclass(frozen=True, eq=False)
class LinkMatrix:
    """``S(to_site, from_site)``: maps Pauli vectors on ``from_site`` to ``to_site``."""

    s: np.ndarray
    from_site: int
    to_site: int

    def __array__(self, dtype=None, copy=None):
        return self.s if dtype is None else self.s.astype(dtype)

    @property
    def T(self) -> "LinkMatrix":
        return LinkMatrix(self.s.T, self.to_site, self.from_site)


def link_array(rho_ab: np.ndarray) -> np.ndarray:
    """Unchecked link matrix of a 4x4 array; works on unnormalized input too."""
    s = 0.5 * np.einsum("ijab,ba->ji", _PAULI_PAIRS, rho_ab)
    if np.max(np.abs(s.imag)) > REALITY_TOL:
        raise RealityError(f"imaginary residue {np.max(np.abs(s.imag))!r} in link matrix")
    return s.real


def link_matrix(rho_ab, from_site: int = 0, to_site: int = 1) -> LinkMatrix:
    """Link matrix ``S(to, from)`` of a two-site state with tensor order ``(from, to)``."""
    m = rho_ab.matrix if isinstance(rho_ab, DensityMatrix) else np.asarray(rho_ab)
    if m.shape != (4, 4):
        raise DimensionError(f"link matrix needs a two-qubit state, got shape {m.shape}")
    return LinkMatrix(link_array(m), int(from_site), int(to_site))


def flip_two_qubit(rho_ab) -> np.ndarray:
    """Spin-flipped two-qubit matrix ``(Y x Y) rho^T (Y x Y)``."""
    m = rho_ab.matrix if isinstance(rho_ab, DensityMatrix) else np.asarray(rho_ab)
    if m.shape != (4, 4):
        raise DimensionError(f"spin flip needs a two-qubit state, got shape {m.shape}")
    return _SIGMA_Y2 @ m.T @ _SIGMA_Y2


def flip_operator(M) -> np.ndarray:
    """Single-qubit spin flip ``sigma_y M^T sigma_y``."""
    M = np.asarray(M)
    return PAULI[2] @ M.T @ PAULI[2]


def adjoint_representation(op: LocalOperation | np.ndarray, group: str | None = None) -> np.ndarray:
    """Real 4x4 image ``U[j1, j2] = 1/2 tr(u^dag sigma_j1 u sigma_j2)`` of a 2x2 operation.

    SU(2) maps to ``1 (+) SO(3)``; SL(2,C) maps to the proper orthochronous
    Lorentz group.  Raises ``ClassError`` when the image violates the group the
    operation claims to belong to.
    """
    if isinstance(op, LocalOperation):
        u, group = op.matrix, group or op.group
    else:
        u = np.asarray(op, dtype=np.complex128)
    U = 0.5 * np.einsum("ba,jbc,cd,kda->jk", u.conj(), PAULI, u, PAULI)
    if np.max(np.abs(U.imag)) > REALITY_TOL:
        raise RealityError("adjoint representation has an imaginary part")
    U = U.real
    if group == SU2:
        R = U[1:, 1:]
        block = max(abs(U[0, 0] - 1), np.max(np.abs(U[0, 1:])), np.max(np.abs(U[1:, 0])))
        if block > 1e-10 or np.max(np.abs(R.T @ R - np.eye(3))) > 1e-10 or abs(np.linalg.det(R) - 1) > 1e-10:
            raise ClassError("SU2 operation does not map to a rotation")
    elif group == SL2C:
        if np.max(np.abs(U @ _ETA @ U.T - _ETA)) > 1e-9 or U[0, 0] < 1 - 1e-12:
            raise ClassError("SL2C operation does not map to a proper Lorentz transformation")
    return U


@dataclass(frozen=True)
class LoopSpec:
    """Closed path over sites; each step is ``(site, flipped)``.

    The closing link from the last site back to the first is implicit.  A
    flipped site contributes ``eta`` on departure, so ``a ~b c`` gives
    ``tr S(a,c) S(c,b) eta S(b,a)``.
    """

    steps: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        steps = tuple((int(s), bool(f)) for s, f in self.steps)
        if len(steps) < 2:
            raise SiteError("a loop needs at least two steps")
        if any(s < 0 for s, _ in steps):
            raise SiteError("sites must be non-negative")
        for k in range(len(steps)):
            if steps[k][0] == steps[k - 1][0]:
                raise SiteError(f"consecutive repeat of site {steps[k][0]} in loop")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def of(cls, sites: Iterable[int], flipped: bool | Iterable[bool] = False) -> "LoopSpec":
        sites = list(sites)
        flags = [flipped] * len(sites) if isinstance(flipped, bool) else list(flipped)
        return cls(tuple(zip(sites, flags)))

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(s for s, _ in self.steps)

    @property
    def n_links(self) -> int:
        return len(self.steps)

    @property
    def all_flipped(self) -> bool:
        return all(f for _, f in self.steps)

    def canonical(self) -> "LoopSpec":
        """Rotation of the loop that sorts first; all rotations share one trace."""
        n = len(self.steps)
        rots = [self.steps[k:] + self.steps[:k] for k in range(n)]
        return LoopSpec(min(rots))

    def label(self, letters: bool = False) -> str:
        steps = self.canonical().steps
        if letters:
            toks = [("~" if f else "") + "abcdefghijklmnopqrstuvwxyz"[s] for s, f in steps]
            return "I(" + "".join(toks) + ")"
        toks = [("~" if f else "") + str(s) for s, f in steps]
        sep = "," if any(s > 9 for s, _ in steps) else ""
        return "I(" + sep.join(toks) + ")"

    def __str__(self) -> str:
        return self.label()


def parse_loop(text: str, n_sites: int | None = None) -> LoopSpec:
    """Parse ``"0,1,2"`` / ``"~0,~1"`` style path strings."""
    steps = []
    pos = 0
    for tok in text.split(","):
        raw = tok
        t = tok.strip()
        lead = len(raw) - len(raw.lstrip())
        flipped = t.startswith("~")
        digits = t[1:] if flipped else t
        if not digits.isdigit():
            raise ParseError(f"bad site token {raw!r}", pos + lead)
        site = int(digits)
        if n_sites is not None and site >= n_sites:
            raise ParseError(f"site {site} out of range for {n_sites} sites", pos + lead)
        if steps and steps[-1][0] == site:
            raise ParseError(f"site {site} repeated consecutively", pos + lead)
        steps.append((site, flipped))
        pos += len(raw) + 1
    if len(steps) < 2:
        raise ParseError("a path needs at least two sites", 0)
    if steps[0][0] == steps[-1][0]:
        raise ParseError("first and last sites coincide; closure is implicit", len(text) - 1)
    return LoopSpec(tuple(steps))


def pair_links(matrix: np.ndarray, n_sites: int, pairs: Iterable[tuple[int, int]]) -> dict:
    """``{(from, to): S(to, from)}`` for each ordered pair, reusing transposes."""
    out = {}
    for a, b in pairs:
        if (a, b) in out:
            continue
        if (b, a) in out:
            out[(a, b)] = out[(b, a)].T
            continue
        out[(a, b)] = link_array(partial_trace_array(matrix, [a, b], n_sites))
    return out


def loop_product(links: dict, loop: LoopSpec) -> np.ndarray:
    """Ordered product of link matrices (with flips) for a precomputed link table."""
    steps = loop.steps
    total = np.eye(4)
    for k, (site, flipped) in enumerate(steps):
        nxt = steps[(k + 1) % len(steps)][0]
        if flipped:
            total = _ETA @ total
        total = links[(site, nxt)] @ total
    return total


def _loop_pairs(loop: LoopSpec):
    s = loop.sites
    return [(s[k], s[(k + 1) % len(s)]) for k in range(len(s))]


def _matrix_of(state) -> tuple[np.ndarray, int]:
    if isinstance(state, (DensityMatrix, PureState)):
        rho = as_density(state)
        return rho.matrix, rho.n_sites
    m = np.asarray(state)
    n = int(m.shape[0]).bit_length() - 1
    return m, n


def loop_transform(state, loop: LoopSpec) -> np.ndarray:
    """``S(a, a; C)`` for the closed path ``loop`` starting and ending at its first site."""
    m, n = _matrix_of(state)
    if max(loop.sites) >= n:
        raise SiteError(f"loop {loop.sites} exceeds {n} sites")
    return loop_product(pair_links(m, n, _loop_pairs(loop)), loop)


def transport_operator(state, from_site: int, to_site: int, M) -> np.ndarray:
    """``tr_from[(M x I) rho_(from,to)]``: the collapsed operator on ``to_site``."""
    m, n = _matrix_of(state)
    rho = partial_trace_array(m, [from_site, to_site], n).reshape(2, 2, 2, 2)
    return np.einsum("ab,bjak->jk", np.asarray(M), rho)


def transport_around(state, loop: LoopSpec, M) -> np.ndarray:
    """Carry an operator around ``loop`` one measurement at a time, flipping where marked."""
    steps = loop.steps
    M = np.asarray(M, dtype=np.complex128)
    for k, (site, flipped) in enumerate(steps):
        if flipped:
            M = flip_operator(M)
        M = transport_operator(state, site, steps[(k + 1) % len(steps)][0], M)
    return M
