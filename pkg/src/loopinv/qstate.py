"""States, reduced density matrices, Pauli expansions and random sampling.

Bit convention: site 0 is the most significant bit of a computational-basis
index, so ``|abc>`` has index ``4*a + 2*b + c``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    DimensionError,
    HermiticityError,
    NormError,
    RankError,
    SamplingError,
    SiteError,
    ValidationError,
)

STRUCT_TOL = 1e-9

# sigma_0 .. sigma_3
PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=np.complex128,
)
PAULI.setflags(write=False)

SU2 = "SU2"
SL2C = "SL2C"

SeedLike = Union[None, int, Sequence[int], np.random.SeedSequence, np.random.Generator]


def _n_sites_for(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if n < 1 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    return n


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector on ``n_sites`` qubits."""

    amplitudes: np.ndarray
    n_sites: int = field(default=0)

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be a 1-d vector")
        n = _n_sites_for(amps.size)
        if self.n_sites and self.n_sites != n:
            raise DimensionError(f"expected {2**self.n_sites} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > STRUCT_TOL:
            raise NormError(f"state norm {norm!r} deviates from 1")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_sites", n)

    @classmethod
    def from_unnormalized(cls, amplitudes) -> "PureState":
        a = np.asarray(amplitudes, dtype=np.complex128)
        return cls(a / np.linalg.norm(a))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_sites)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix on ``n_sites`` qubits."""

    matrix: np.ndarray
    n_sites: int = field(default=0)

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        n = _n_sites_for(m.shape[0])
        if self.n_sites and self.n_sites != n:
            raise DimensionError(f"expected dimension {2**self.n_sites}, got {m.shape[0]}")
        if np.max(np.abs(m - m.conj().T)) > STRUCT_TOL:
            raise HermiticityError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STRUCT_TOL:
            raise ValidationError(f"trace {tr!r} deviates from 1")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < -STRUCT_TOL:
            raise ValidationError(f"minimum eigenvalue {lam_min!r} is negative")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_sites", n)

    def tensor(self) -> np.ndarray:
        return self.matrix.reshape((2,) * (2 * self.n_sites))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))


@dataclass(frozen=True, eq=False)
class LocalOperation:
    """A 2x2 operation acting on one site; ``group`` is ``"SU2"`` or ``"SL2C"``."""

    site: int
    matrix: np.ndarray
    group: str = SU2

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.shape != (2, 2):
            raise DimensionError("local operation must be 2x2")
        if self.group not in (SU2, SL2C):
            raise ValueError(f"unknown group {self.group!r}")
        if abs(np.linalg.det(m) - 1.0) > STRUCT_TOL:
            raise ValidationError("local operation must have unit determinant")
        if self.group == SU2 and np.max(np.abs(m.conj().T @ m - np.eye(2))) > STRUCT_TOL:
            raise ValidationError("SU2 operation is not unitary")
        object.__setattr__(self, "matrix", m)

    def on(self, site: int) -> "LocalOperation":
        return LocalOperation(site, self.matrix, self.group)


def as_density(state: PureState | DensityMatrix) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    return density_from_pure(state)


def density_from_pure(psi: PureState) -> DensityMatrix:
    a = psi.amplitudes
    if abs(np.linalg.norm(a) - 1.0) > STRUCT_TOL:
        raise NormError("state is not normalized")
    return DensityMatrix(np.outer(a, a.conj()))


def _check_sites(sites: Sequence[int], n_sites: int) -> list[int]:
    sites = [int(s) for s in sites]
    if len(set(sites)) != len(sites):
        raise SiteError(f"duplicate sites in {sites}")
    bad = [s for s in sites if not 0 <= s < n_sites]
    if bad:
        raise SiteError(f"sites {bad} out of range for {n_sites} qubits")
    return sites


def partial_trace_array(matrix: np.ndarray, keep: Sequence[int], n_sites: int) -> np.ndarray:
    """Reduced matrix on ``keep`` (in that order). No validation, no renormalization."""
    t = matrix.reshape((2,) * (2 * n_sites))
    rows = list(range(n_sites))
    cols = [k + n_sites if k in keep else k for k in range(n_sites)]
    out = list(keep) + [k + n_sites for k in keep]
    d = 2 ** len(keep)
    return np.einsum(t, rows + cols, out).reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduce ``rho`` to the sites in ``keep``, ordered as given."""
    keep = _check_sites(keep, rho.n_sites)
    if not keep:
        raise SiteError("keep must name at least one site")
    return DensityMatrix(partial_trace_array(rho.matrix, keep, rho.n_sites))


def _apply_site(t: np.ndarray, u: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)


def _check_ops(ops: Sequence[LocalOperation], n_sites: int) -> None:
    _check_sites([op.site for op in ops], n_sites)


def apply_local_array(state: np.ndarray, ops: Sequence[LocalOperation], n_sites: int) -> np.ndarray:
    """Apply ``ops`` to an amplitude vector (1-d) or a matrix (2-d) without renormalizing."""
    if state.ndim == 1:
        t = state.reshape((2,) * n_sites)
        for op in ops:
            t = _apply_site(t, op.matrix, op.site)
        return t.reshape(-1)
    t = state.reshape((2,) * (2 * n_sites))
    for op in ops:
        t = _apply_site(t, op.matrix, op.site)
        t = _apply_site(t, op.matrix.conj(), op.site + n_sites)
    return t.reshape(state.shape)


def apply_local(state, ops: Sequence[LocalOperation], *, return_norm: bool = False):
    """Act with a product of local operations on a pure state or density matrix.

    For SL(2,C) operations the result is renormalized (unit norm for pure
    states, unit trace for density matrices).  With ``return_norm=True`` the
    removed factor is returned as well: ``<psi'|psi'>`` or ``tr rho'`` of the
    unnormalized output, so that a quantity of degree ``d`` in the density
    matrix can be compensated by multiplying with ``norm**d``.
    """
    _check_ops(ops, state.n_sites)
    sl2c = any(op.group == SL2C for op in ops)
    if isinstance(state, PureState):
        out = apply_local_array(state.amplitudes, ops, state.n_sites)
        norm = float(np.vdot(out, out).real)
        if sl2c:
            out = out / np.sqrt(norm)
        new = PureState(out)
    else:
        out = apply_local_array(state.matrix, ops, state.n_sites)
        norm = float(np.trace(out).real)
        if sl2c:
            out = out / norm
        new = DensityMatrix(out)
    if return_norm:
        return new, norm
    return new


def pauli_coefficients(M) -> np.ndarray:
    """Real Pauli components ``m_i = tr(sigma_i M) / 2`` of a Hermitian 2x2 matrix."""
    M = np.asarray(M, dtype=np.complex128)
    if M.shape != (2, 2):
        raise DimensionError("expected a 2x2 matrix")
    if np.max(np.abs(M - M.conj().T)) > STRUCT_TOL:
        raise HermiticityError("matrix is not Hermitian")
    return 0.5 * np.einsum("iab,ba->i", PAULI, M).real


def pauli_reconstruct(m) -> np.ndarray:
    return np.einsum("i,iab->ab", np.asarray(m, dtype=np.float64), PAULI)


def _rng(seed: SeedLike) -> np.random.Generator:
    return np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_random_pure(n_sites: int, seed: SeedLike = None) -> PureState:
    if n_sites < 1:
        raise DimensionError("n_sites must be >= 1")
    v = _ginibre(_rng(seed), 2**n_sites)
    return PureState(v / np.linalg.norm(v))


def random_density(n_sites: int, rank: int, seed: SeedLike = None) -> DensityMatrix:
    """Mixture of ``rank`` Haar pure states with flat-Dirichlet weights."""
    dim = 2**n_sites
    if not 1 <= rank <= dim:
        raise RankError(f"rank must lie in [1, {dim}], got {rank}")
    rng = _rng(seed)
    vs = _ginibre(rng, (rank, dim))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    w = rng.dirichlet(np.ones(rank)) if rank > 1 else np.ones(1)
    rho = np.einsum("k,ki,kj->ij", w, vs, vs.conj())
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def random_su2(seed: SeedLike = None, site: int = 0) -> LocalOperation:
    q = _rng(seed).standard_normal(4)
    a, b, c, d = q / np.linalg.norm(q)
    u = np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])
    return LocalOperation(site, u, SU2)


def random_sl2c(seed: SeedLike = None, max_condition: float = 10.0, site: int = 0) -> LocalOperation:
    """Ginibre 2x2 matrix rescaled to unit determinant, rejecting ill-conditioned draws."""
    if max_condition <= 1:
        raise ValueError("max_condition must exceed 1")
    rng = _rng(seed)
    for _ in range(1000):
        g = _ginibre(rng, (2, 2))
        det = np.linalg.det(g)
        if det == 0:
            continue
        g = g / np.sqrt(det)
        s = np.linalg.svd(g, compute_uv=False)
        if s[0] / s[1] <= max_condition:
            return LocalOperation(site, g, SL2C)
    raise SamplingError(f"no SL(2,C) draw with condition <= {max_condition} in 1000 attempts")


def product_state(bits: Sequence[int]) -> PureState:
    a = np.zeros(2 ** len(bits), dtype=np.complex128)
    a[int("".join(str(int(b)) for b in bits), 2)] = 1.0
    return PureState(a)


def ghz_state(n_sites: int = 3) -> PureState:
    a = np.zeros(2**n_sites, dtype=np.complex128)
    a[0] = a[-1] = 1 / np.sqrt(2)
    return PureState(a)


def w_state(n_sites: int = 3) -> PureState:
    a = np.zeros(2**n_sites, dtype=np.complex128)
    a[[2**k for k in range(n_sites)]] = 1 / np.sqrt(n_sites)
    return PureState(a)
