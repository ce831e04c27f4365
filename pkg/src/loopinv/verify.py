"""Numerical certification: invariance sweeps, closed-form identities,
Jacobian rank of the invariant map, and the Monte Carlo fidelity estimator.

Every sweep draws trial ``t`` from its own generator spawned from
``SeedSequence(seed)``, so results are reproducible bit-for-bit and trials
could be farmed out independently.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import invariants as inv
from .errors import ClassError, StepError
from .linkspace import LoopSpec, flip_two_qubit, link_array, loop_product, loop_transform, pair_links
from .qstate import (
    DensityMatrix,
    PureState,
    apply_local_array,
    as_density,
    haar_random_pure,
    partial_trace_array,
    random_density,
    random_sl2c,
    random_su2,
)

SU2_TOL = 1e-9
SL2C_TOL = 1e-8
IDENTITY_TOL = 1e-10
TANGLE_TOL = 1e-8
CONTROL_THRESHOLD = 1e-3

_RawOp = namedtuple("_RawOp", "site matrix")


@dataclass(frozen=True)
class InvarianceResult:
    label: str
    trials: int
    max_residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "trials": self.trials,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class DetLink:
    """Determinant of the link matrix of a site pair; degree four in the state."""

    pair: tuple[int, int]

    def label(self) -> str:
        return f"det S({self.pair[0]},{self.pair[1]})"


def _label(q) -> str:
    return q.label() if isinstance(q, (LoopSpec, DetLink)) else str(q)


def _pairs_for(quantities) -> list[tuple[int, int]]:
    pairs = []
    for q in quantities:
        if isinstance(q, DetLink):
            pairs.append(q.pair)
        else:
            s = q.sites
            pairs += [(s[k], s[(k + 1) % len(s)]) for k in range(len(s))]
    return pairs


def _evaluate(quantities, matrix: np.ndarray, n_sites: int) -> np.ndarray:
    links = pair_links(matrix, n_sites, _pairs_for(quantities))
    out = []
    for q in quantities:
        if isinstance(q, DetLink):
            out.append(np.linalg.det(links[q.pair]))
        else:
            out.append(np.trace(loop_product(links, q)))
    return np.array(out)


def _degree(q) -> int:
    """Homogeneous degree in the density matrix."""
    return 4 if isinstance(q, DetLink) else q.n_links


def _support(q) -> set[int]:
    return set(q.pair) if isinstance(q, DetLink) else set(q.sites)


def trial_rngs(seed, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _sample_state(rng, n_sites: int, rank: int | None) -> DensityMatrix:
    if rank is None:
        return as_density(haar_random_pure(n_sites, rng))
    return random_density(n_sites, rank, rng)


def _residuals(
    quantities,
    n_states: int,
    n_ops: int,
    seed,
    op_sampler: Callable,
    *,
    n_sites: int,
    rank: int | None,
    compensate: bool,
) -> np.ndarray:
    """Residual array of shape ``(len(quantities), n_states * n_ops)``.

    ``op_sampler`` acts on the sites a quantity touches; every other site gets
    a Haar SU(2) rotation.  A non-unitary operation on a traced-out site
    changes the reduced state itself, so no invariance is expected there.
    """
    res = np.empty((len(quantities), n_states * n_ops))
    col = 0
    for rng in trial_rngs(seed, n_states):
        rho = _sample_state(rng, n_sites, rank)
        base = _evaluate(quantities, rho.matrix, n_sites)
        for _ in range(n_ops):
            for row, q in enumerate(quantities):
                support = _support(q)
                ops = [op_sampler(rng, s) if s in support else _su2_sampler(rng, s) for s in range(n_sites)]
                out = apply_local_array(rho.matrix, ops, n_sites)
                if compensate:
                    norm = np.trace(out).real
                    value = _evaluate([q], out / norm, n_sites)[0] * norm ** _degree(q)
                else:
                    value = _evaluate([q], out, n_sites)[0]
                res[row, col] = abs(value - base[row])
            col += 1
    return res


def _su2_sampler(rng, site):
    return random_su2(rng, site=site)


def _identity_sampler(rng, site):
    return _RawOp(site, np.eye(2, dtype=np.complex128))


def check_su2_invariance(
    loops: Sequence[LoopSpec],
    n_states: int = 100,
    n_ops: int = 10,
    seed=0,
    tol: float = SU2_TOL,
    *,
    n_sites: int = 3,
    rank: int | None = None,
    identity: bool = False,
) -> list[InvarianceResult]:
    """Max change of each loop trace under random local SU(2) on every site.

    ``rank=None`` samples Haar pure states; an integer samples mixed states
    of that rank.  ``identity=True`` swaps the random unitaries for identities.
    """
    sampler = _identity_sampler if identity else _su2_sampler
    res = _residuals(loops, n_states, n_ops, seed, sampler, n_sites=n_sites, rank=rank, compensate=False)
    return [InvarianceResult(lp.label(), res.shape[1], float(r.max()), tol) for lp, r in zip(loops, res)]


def _sl2c_sampler(max_condition: float):
    def sample(rng, site):
        return random_sl2c(rng, max_condition=max_condition, site=site)

    return sample


def _gl_sampler(rng, site):
    g = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    return _RawOp(site, g)


def _check_sl2c_quantities(quantities) -> None:
    for q in quantities:
        if isinstance(q, LoopSpec) and not q.all_flipped:
            raise ClassError(f"{q.label()} is not flipped at every site; it is only SU(2) invariant")
        if not isinstance(q, (LoopSpec, DetLink)):
            raise TypeError(f"unsupported quantity {q!r}")


def check_sl2c_invariance(
    quantities: Sequence[LoopSpec | DetLink],
    n_states: int = 100,
    n_ops: int = 10,
    seed=0,
    tol: float = SL2C_TOL,
    *,
    max_condition: float = 10.0,
    n_sites: int = 3,
    rank: int | None = None,
) -> list[InvarianceResult]:
    """Invariance of all-flipped loop traces and link determinants under local SL(2,C).

    Determinant-one operations act on the sites of each quantity (Haar SU(2)
    elsewhere).  States are trace-renormalized after the operation, so each
    quantity is multiplied back by ``norm**degree`` before comparing.
    """
    _check_sl2c_quantities(quantities)
    res = _residuals(
        quantities, n_states, n_ops, seed, _sl2c_sampler(max_condition),
        n_sites=n_sites, rank=rank, compensate=True,
    )
    return [InvarianceResult(_label(q), res.shape[1], float(r.max()), tol) for q, r in zip(quantities, res)]


def negative_control_fractions(
    n_states: int = 100,
    n_ops: int = 10,
    seed=0,
    *,
    threshold: float = CONTROL_THRESHOLD,
    max_condition: float = 10.0,
) -> dict[str, float]:
    """Fraction of trials whose residual exceeds ``threshold`` where invariance must fail.

    * ``"I(01) under SL2C"``: an unflipped loop under determinant-one operations.
    * ``"I(~0~1) under GL2C"``: a flipped loop under operations whose
      determinant is not normalized to one.
    """
    unflipped = LoopSpec.of([0, 1])
    flipped = LoopSpec.of([0, 1], flipped=True)
    a = _residuals([unflipped], n_states, n_ops, seed, _sl2c_sampler(max_condition), n_sites=3, rank=None, compensate=True)
    b = _residuals([flipped], n_states, n_ops, seed, _gl_sampler, n_sites=3, rank=None, compensate=True)
    return {
        f"{unflipped.label()} under SL2C": float(np.mean(a[0] > threshold)),
        f"{flipped.label()} under GL2C": float(np.mean(b[0] > threshold)),
    }


def check_transpose_property(
    n_states: int = 100, seed=0, states: Iterable | None = None, tol: float = 1e-12
) -> InvarianceResult:
    """``S(b,a) = S(a,b)^T`` with each side built from its own ordered marginal."""
    if states is None:
        states = [haar_random_pure(3, rng) for rng in trial_rngs(seed, n_states)]
    worst, count = 0.0, 0
    for st in states:
        rho = as_density(st)
        n = rho.n_sites
        for a in range(n):
            for b in range(a + 1, n):
                s_ba = link_array(partial_trace_array(rho.matrix, [a, b], n))
                s_ab = link_array(partial_trace_array(rho.matrix, [b, a], n))
                worst = max(worst, float(np.max(np.abs(s_ba - s_ab.T))))
        count += 1
    return InvarianceResult("S(b,a)=S(a,b)^T", count, worst, tol)


# Algebraic independence -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IndependenceResult:
    jacobian: np.ndarray
    singular_values: np.ndarray
    rank: int
    threshold: float


INDEPENDENCE_NAMES = ("I1", "I(ab)", "I(bc)", "I(ca)", "I(abc)", "I(abab)")
_INDEPENDENCE_LOOPS = [inv.STANDARD_LOOPS[k] for k in INDEPENDENCE_NAMES[1:]]


def invariant_polynomials(x: np.ndarray) -> np.ndarray:
    """Normalization plus the five loop invariants as polynomials of 16 real parameters.

    ``x[:8]`` and ``x[8:]`` are the real and imaginary parts of the unnormalized
    amplitudes.
    """
    a = x[:8] + 1j * x[8:]
    rho = np.outer(a, a.conj())
    values = _evaluate(_INDEPENDENCE_LOOPS, rho, 3)
    return np.concatenate([[np.vdot(a, a).real], values])


def jacobian_independence(psi: PureState, h: float = 1e-5, threshold: float = 1e-8) -> IndependenceResult:
    if not 1e-8 <= h <= 1e-2:
        raise StepError(f"finite-difference step {h} outside [1e-8, 1e-2]")
    x0 = np.concatenate([psi.amplitudes.real, psi.amplitudes.imag])
    jac = np.empty((len(INDEPENDENCE_NAMES), x0.size))
    for k in range(x0.size):
        dx = np.zeros_like(x0)
        dx[k] = h
        jac[:, k] = (invariant_polynomials(x0 + dx) - invariant_polynomials(x0 - dx)) / (2 * h)
    sv = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(sv > threshold * sv[0]))
    return IndependenceResult(jac, sv, rank, threshold)


# Average fidelity --------------------------------------------------------------

@dataclass(frozen=True)
class FidelityConfig:
    k: float = 1.0
    samples: int = 1_000_000
    seed: int | None = 0

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")
        if self.samples < 1000:
            raise ValueError("samples must be at least 1000")


@dataclass(frozen=True)
class FidelityEstimate:
    estimate: float
    std_error: float
    reference: float

    @property
    def z(self) -> float:
        return abs(self.estimate - self.reference) / self.std_error

    def as_dict(self) -> dict:
        return {"estimate": self.estimate, "std_error": self.std_error, "reference": self.reference}


def sphere_samples(cfg: FidelityConfig) -> np.ndarray:
    """``cfg.samples`` points uniform on the 3-sphere of radius ``cfg.k``."""
    g = np.random.default_rng(cfg.seed).standard_normal((cfg.samples, 4))
    return cfg.k * g / np.linalg.norm(g, axis=1, keepdims=True)


def sphere_second_moment(cfg: FidelityConfig) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean of ``m m^T`` and its entrywise standard error."""
    m = sphere_samples(cfg)
    outer = np.einsum("si,sj->sij", m, m)
    return outer.mean(axis=0), outer.std(axis=0, ddof=1) / np.sqrt(cfg.samples)


def mc_fidelity(state, loop: LoopSpec, cfg: FidelityConfig, mode: str = "hermitian") -> FidelityEstimate:
    """Monte Carlo average of ``tr(M^dag M')`` over observables of fixed size.

    ``mode="hermitian"`` draws real Pauli vectors on the sphere of radius k.
    ``mode="su2"`` draws ``M`` from SU(2) (scaled by k), whose Pauli vector has
    a real identity part and imaginary spatial part; the real part of the
    fidelity is averaged.
    """
    S = loop_transform(as_density(state), loop)
    q = sphere_samples(cfg)
    if mode == "hermitian":
        f = 2.0 * np.einsum("si,si->s", q, q @ S.T)
    elif mode == "su2":
        m = q.astype(np.complex128)
        m[:, 1:] *= 1j
        f = (2.0 * np.einsum("si,si->s", m.conj(), m @ S.T)).real
    else:
        raise ValueError(f"unknown mode {mode!r}")
    reference = 0.5 * cfg.k**2 * float(np.trace(S))
    return FidelityEstimate(float(f.mean()), float(f.std(ddof=1) / np.sqrt(f.size)), reference)


# Identity suite ----------------------------------------------------------------

@dataclass
class IdentityReport:
    n_states: int
    checks: dict[str, InvarianceResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def as_dict(self) -> dict:
        return {
            "n_states": self.n_states,
            "passed": self.passed,
            "checks": {k: v.as_dict() for k, v in self.checks.items()},
        }


def _identity_residuals(psi: PureState) -> dict[str, tuple[float, float]]:
    rho = as_density(psi)
    m = rho.matrix
    def loop(sites, flipped=False):
        return inv.loop_invariant(rho, LoopSpec.of(sites, flipped)).value

    out: dict[str, tuple[float, float]] = {}

    def put(name, value, tol):
        prev = out.get(name, (0.0, tol))[0]
        out[name] = (max(prev, abs(float(value))), tol)

    for x, y, z in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        r_xy = partial_trace_array(m, [x, y], 3)
        r_z = partial_trace_array(m, [z], 3)
        i_xy = loop([x, y])
        put("I(ab)=tr rho_ab^2", i_xy - np.vdot(r_xy, r_xy).real, IDENTITY_TOL)
        put("I(ab)=tr rho_c^2", i_xy - np.vdot(r_z, r_z).real, IDENTITY_TOL)
        put("I(~a~b)=tr rho_ab rho~_ab", loop([x, y], True) - np.trace(r_xy @ flip_two_qubit(r_xy)).real, IDENTITY_TOL)

    i_abc = loop([0, 1, 2])
    put("I(abc)=index form", i_abc - inv.kempe_index_form(psi), IDENTITY_TOL)
    for pair in ((0, 1), (1, 2), (0, 2)):
        put("I(abc)=kempe alternative", i_abc - inv.kempe_alternative(psi, pair), IDENTITY_TOL)
    put("2/9<=I(abc)<=1", max(0.0, 2 / 9 - i_abc, i_abc - 1), SU2_TOL)

    abab = loop([0, 1, 0, 1])
    put("I(abab)=I(bcbc)=I(caca)", max(abs(abab - loop([1, 2, 1, 2])), abs(abab - loop([2, 0, 2, 0]))), IDENTITY_TOL)

    for a, b in ((0, 1), (1, 2), (0, 2)):
        s_ba = link_array(partial_trace_array(m, [a, b], 3))
        s_ab = link_array(partial_trace_array(m, [b, a], 3))
        put("S(b,a)=S(a,b)^T", np.max(np.abs(s_ba - s_ab.T)), IDENTITY_TOL)

    lhs, rhs = inv.flipped_kempe_identity(psi)
    put("I(~a~b~c)=trace-power expansion", lhs - rhs, IDENTITY_TOL)
    put("I(~a~b~c)=direct expansion", lhs - inv.direct_flipped_expansion(psi), IDENTITY_TOL)
    put("I(~a~b~c)=0", lhs, IDENTITY_TOL)

    tangles = inv.reconstruct_tangles(psi)
    pairs = {"tau_ab": (0, 1), "tau_bc": (1, 2), "tau_ca": (2, 0)}
    woot = {k: inv.wootters_tangle_oracle(partial_trace_array(m, list(p), 3)) for k, p in pairs.items()}
    for k in pairs:
        put("tau_xy=Wootters oracle", getattr(tangles, k) - woot[k], TANGLE_TOL)
    put("4*I6=tau_abc^2", 4 * inv.three_tangle_I6(psi) - tangles.tau_abc**2, TANGLE_TOL)
    tau_abc_i6 = 2 * np.sqrt(inv.three_tangle_I6(psi))
    put(
        "det S(a,b)=-tau_ab(tau_ab+tau_abc)/16",
        inv.det_link_invariant(rho, (0, 1)) + woot["tau_ab"] * (woot["tau_ab"] + tau_abc_i6) / 16,
        TANGLE_TOL,
    )
    r_a = partial_trace_array(m, [0], 3)
    put(
        "CKW monogamy",
        tangles.tau_ab + tangles.tau_ca + tangles.tau_abc - 4 * np.linalg.det(r_a).real,
        TANGLE_TOL,
    )
    return out


def identity_suite(seed=0, n_states: int = 1000) -> IdentityReport:
    """Every closed-form cross-check on ``n_states`` Haar random pure three-qubit states."""
    worst: dict[str, tuple[float, float]] = {}
    for rng in trial_rngs(seed, n_states):
        for name, (r, tol) in _identity_residuals(haar_random_pure(3, rng)).items():
            worst[name] = (max(worst.get(name, (0.0, tol))[0], r), tol)
    report = IdentityReport(n_states)
    for name, (r, tol) in worst.items():
        report.checks[name] = InvarianceResult(name, n_states, r, tol)
    return report
