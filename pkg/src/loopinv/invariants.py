"""Named local invariants of qubit states built from loop traces.

Three-qubit sites ``a, b, c`` are indices ``0, 1, 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionError, NegativeRadicand, SiteError
from .linkspace import (
    LoopSpec,
    flip_two_qubit,
    link_array,
    loop_transform,
)
from .qstate import SL2C, SU2, DensityMatrix, PureState, as_density, partial_trace_array

TANGLE_GUARD = 1e-8

_EPS = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class InvariantReport:
    label: str
    value: float
    degree: int
    invariance_class: str

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "value": self.value,
            "degree": self.degree,
            "invariance_class": self.invariance_class,
        }


@dataclass(frozen=True)
class TangleSet:
    tau_ab: float
    tau_bc: float
    tau_ca: float
    tau_abc: float

    def as_dict(self) -> dict:
        return {"tau_ab": self.tau_ab, "tau_bc": self.tau_bc, "tau_ca": self.tau_ca, "tau_abc": self.tau_abc}


def _rho(state) -> DensityMatrix:
    return as_density(state)


def _three_qubit_pure(psi) -> PureState:
    if not isinstance(psi, PureState) or psi.n_sites != 3:
        raise DimensionError("expected a pure three-qubit state")
    return psi


def _pair(rho: DensityMatrix, x: int, y: int) -> np.ndarray:
    if x == y or not (0 <= x < rho.n_sites and 0 <= y < rho.n_sites):
        raise SiteError(f"invalid site pair ({x}, {y}) for {rho.n_sites} sites")
    return partial_trace_array(rho.matrix, [x, y], rho.n_sites)


def loop_invariant(state, loop: LoopSpec) -> InvariantReport:
    """Trace of the loop transform, labelled by its canonical path string."""
    value = float(np.trace(loop_transform(_rho(state), loop)))
    cls = SL2C if loop.all_flipped else SU2
    return InvariantReport(loop.label(), value, 2 * loop.n_links, cls)


def purity_invariants(psi: PureState) -> tuple[float, float, float]:
    """``(tr rho_c^2, tr rho_b^2, tr rho_a^2)``."""
    m = _rho(_three_qubit_pure(psi)).matrix
    out = []
    for site in (2, 1, 0):
        r = partial_trace_array(m, [site], 3)
        out.append(float(np.real(np.vdot(r, r))))
    return tuple(out)


def kempe_index_form(psi: PureState) -> float:
    """Kempe invariant by direct contraction of the three two-site marginals."""
    m = _rho(_three_qubit_pure(psi)).matrix
    r_ab = partial_trace_array(m, [0, 1], 3).reshape(2, 2, 2, 2)
    r_bc = partial_trace_array(m, [1, 2], 3).reshape(2, 2, 2, 2)
    r_ca = partial_trace_array(m, [2, 0], 3).reshape(2, 2, 2, 2)
    # (rho_ab)_{i j', i' j} (rho_bc)_{j k', j' k} (rho_ca)_{k i', k' i}
    return float(np.einsum("iJIj,jKJk,kIKi->", r_ab, r_bc, r_ca).real)


def _trace_power(r: np.ndarray, p: int) -> float:
    return float(np.trace(np.linalg.matrix_power(r, p)).real)


def kempe_alternative(psi: PureState, pair: tuple[int, int]) -> float:
    """``3 tr[(rho_x (x) rho_y) rho_xy] - tr rho_x^3 - tr rho_y^3``."""
    x, y = pair
    rho = _rho(_three_qubit_pure(psi))
    r_xy = _pair(rho, x, y)
    r_x = partial_trace_array(rho.matrix, [x], 3)
    r_y = partial_trace_array(rho.matrix, [y], 3)
    cross = np.trace(np.kron(r_x, r_y) @ r_xy).real
    return float(3 * cross - _trace_power(r_x, 3) - _trace_power(r_y, 3))


def three_tangle_I6(psi: PureState) -> float:
    """Degree-eight invariant ``|eps eps eps eps eps eps a a a a|^2`` (a quarter of tau_abc^2)."""
    a = _three_qubit_pure(psi).tensor()
    e = _EPS
    amp = np.einsum(
        "ab,cd,ef,gh,ik,jl,aei,bfj,cgk,dhl->",
        e, e, e, e, e, e, a, a, a, a,
        optimize=True,
    )
    return float(abs(amp) ** 2)


def flipped_pair_invariant(state, pair: tuple[int, int]) -> float:
    """``I(~x ~y) = tr(rho_xy rho~_xy)``, evaluated as the all-flipped two-loop."""
    x, y = pair
    rho = _rho(state)
    _pair(rho, x, y)
    return loop_invariant(rho, LoopSpec.of([x, y], flipped=True)).value


def det_link_invariant(state, pair: tuple[int, int]) -> float:
    x, y = pair
    rho = _rho(state)
    return float(np.linalg.det(link_array(_pair(rho, x, y))))


def det_report(state, pair: tuple[int, int]) -> InvariantReport:
    x, y = pair
    return InvariantReport(f"det S({x},{y})", det_link_invariant(state, pair), 8, SL2C)


def _clamp(value: float, name: str) -> float:
    if value < -TANGLE_GUARD:
        raise NegativeRadicand(f"{name} = {value!r} is negative beyond rounding")
    return min(max(value, 0.0), 1.0)


def reconstruct_tangles(psi: PureState) -> TangleSet:
    """Pairwise and three-way tangles from flipped-pair and determinant invariants."""
    rho = _rho(_three_qubit_pure(psi))
    flipped = {p: flipped_pair_invariant(rho, p) for p in ((0, 1), (1, 2), (2, 0))}
    radicand = 16 * det_link_invariant(rho, (0, 1)) + flipped[(0, 1)] ** 2
    tau_abc = 2 * np.sqrt(_clamp(radicand, "16 det S + I^2"))
    taus = [float(_clamp(flipped[p] - 0.5 * tau_abc, f"tau{p}")) for p in ((0, 1), (1, 2), (2, 0))]
    return TangleSet(*taus, tau_abc=float(min(tau_abc, 1.0)))


def wootters_tangle_oracle(rho_xy) -> float:
    """Squared concurrence of a two-qubit state.

    The square roots of the eigenvalues of ``rho rho~`` are taken as the
    singular values of ``W^dag (Y x Y) W^*`` with ``rho = W W^dag`` restricted
    to the support of ``rho``; this avoids the ``sqrt(eps)`` error of square
    roots of numerically zero eigenvalues.
    """
    m = rho_xy.matrix if isinstance(rho_xy, DensityMatrix) else np.asarray(rho_xy)
    if m.shape != (4, 4):
        raise DimensionError("concurrence needs a two-qubit state")
    p, v = np.linalg.eigh(m)
    keep = p > 1e-12
    w = v[:, keep] * np.sqrt(p[keep])
    yy = -np.kron([[0.0, -1.0], [1.0, 0.0]], [[0.0, -1.0], [1.0, 0.0]])  # sigma_y x sigma_y, real
    lam = np.linalg.svd(w.conj().T @ yy @ w.conj(), compute_uv=False)
    lam = np.concatenate([lam, np.zeros(4 - lam.size)])
    c = max(0.0, lam[0] - lam[1:].sum())
    return float(c * c)


def wootters_tangle_eigen(rho_xy) -> float:
    """Textbook form via eigenvalues of ``rho rho~``; only accurate to about 1e-8."""
    m = rho_xy.matrix if isinstance(rho_xy, DensityMatrix) else np.asarray(rho_xy)
    ev = np.linalg.eigvals(m @ flip_two_qubit(m))
    lam = np.sort(np.sqrt(np.abs(ev)))[::-1]
    c = max(0.0, lam[0] - lam[1:].sum())
    return float(c * c)


def trace_power_expansion(psi: PureState) -> float:
    """``1 - sum tr rho_x^2 + (2/3) sum tr rho_x^3`` over the three single-qubit marginals."""
    m = _rho(_three_qubit_pure(psi)).matrix
    total = 1.0
    for site in range(3):
        r = partial_trace_array(m, [site], 3)
        total += -_trace_power(r, 2) + (2.0 / 3.0) * _trace_power(r, 3)
    return total


def direct_flipped_expansion(psi: PureState) -> float:
    """Expansion of the flipped triangle in marginals, before eliminating the Kempe term."""
    m = _rho(_three_qubit_pure(psi)).matrix
    singles = [partial_trace_array(m, [s], 3) for s in range(3)]
    total = 1.0 - sum(_trace_power(r, 2) for r in singles)
    for x, y in ((0, 1), (1, 2), (0, 2)):
        r_xy = partial_trace_array(m, [x, y], 3)
        total += np.trace(np.kron(singles[x], singles[y]) @ r_xy).real
    return float(total - kempe_index_form(psi))


def flipped_kempe_identity(psi: PureState) -> tuple[float, float]:
    """``(I(~a~b~c), trace-power expansion)``; both vanish for pure three-qubit states."""
    psi = _three_qubit_pure(psi)
    lhs = loop_invariant(psi, LoopSpec.of([0, 1, 2], flipped=True)).value
    return lhs, trace_power_expansion(psi)


STANDARD_LOOPS = {
    "I(ab)": LoopSpec.of([0, 1]),
    "I(bc)": LoopSpec.of([1, 2]),
    "I(ca)": LoopSpec.of([2, 0]),
    "I(abc)": LoopSpec.of([0, 1, 2]),
    "I(abab)": LoopSpec.of([0, 1, 0, 1]),
}

FLIPPED_LOOPS = {
    "I(~a~b)": LoopSpec.of([0, 1], flipped=True),
    "I(~b~c)": LoopSpec.of([1, 2], flipped=True),
    "I(~c~a)": LoopSpec.of([2, 0], flipped=True),
    "I(~a~b~c)": LoopSpec.of([0, 1, 2], flipped=True),
    "I(~a~b~a~b)": LoopSpec.of([0, 1, 0, 1], flipped=True),
}


def catalogue(psi: PureState) -> dict:
    """Every named invariant of a pure three-qubit state, keyed by name."""
    psi = _three_qubit_pure(psi)
    rho = _rho(psi)
    i2, i3, i4 = purity_invariants(psi)
    out = {"I2": i2, "I3": i3, "I4": i4, "I5": kempe_index_form(psi), "I6": three_tangle_I6(psi)}
    for name, loop in {**STANDARD_LOOPS, **FLIPPED_LOOPS}.items():
        out[name] = loop_invariant(rho, loop).value
    for x, y in combinations(range(3), 2):
        out[f"kempe_alt({x},{y})"] = kempe_alternative(psi, (x, y))
        out[f"det S({x},{y})"] = det_link_invariant(rho, (x, y))
    out.update(reconstruct_tangles(psi).as_dict())
    lhs, rhs = flipped_kempe_identity(psi)
    out["flipped_kempe_check"] = {"loop": lhs, "expansion": rhs}
    return out
