import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loopinv.errors import ClassError, DimensionError, ParseError, SiteError
from loopinv.linkspace import (
    LoopSpec,
    adjoint_representation,
    flip_two_qubit,
    link_matrix,
    loop_transform,
    minkowski_eta,
    parse_loop,
    transport_around,
)
from loopinv.qstate import (
    PAULI,
    SL2C,
    SU2,
    DensityMatrix,
    LocalOperation,
    apply_local,
    as_density,
    haar_random_pure,
    partial_trace,
    pauli_coefficients,
    pauli_reconstruct,
    random_density,
    random_sl2c,
    random_su2,
)

from conftest import link_by_kron


def _outer(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def test_eta():
    eta = minkowski_eta()
    assert np.array_equal(eta @ eta, np.eye(4))
    assert np.trace(eta) == -2
    assert np.allclose(eta @ [1, 0.2, -0.3, 0.5], [1, -0.2, 0.3, -0.5])


def test_link_matrix_examples():
    s = link_matrix(_outer([1, 0, 0, 0])).s
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.max(np.abs(s - expected)) < 1e-15

    s = link_matrix(np.diag([0.5, 0, 0, 0.5])).s
    assert np.max(np.abs(s - np.diag([0.5, 0, 0, 0.5]))) < 1e-15

    s = link_matrix(np.eye(4) / 4).s
    expected = np.zeros((4, 4))
    expected[0, 0] = 0.5
    assert np.max(np.abs(s - expected)) < 1e-15


def test_link_matrix_matches_kron_oracle():
    rho = random_density(2, 3, seed=8)
    assert np.max(np.abs(link_matrix(rho).s - link_by_kron(rho.matrix))) < 1e-14


def test_link_matrix_bounds_and_dimension():
    rho = random_density(2, 4, seed=2)
    s = link_matrix(rho).s
    assert abs(s[0, 0] - 0.5) < 1e-12
    assert np.all(np.abs(s) <= 0.5 + 1e-12)
    with pytest.raises(DimensionError):
        link_matrix(np.eye(8) / 8)


def test_directional_transpose():
    rho = as_density(haar_random_pure(3, 3))
    ab = link_matrix(partial_trace(rho, [0, 2]), 0, 2)
    ba = link_matrix(partial_trace(rho, [2, 0]), 2, 0)
    assert np.max(np.abs(ab.s - ba.s.T)) < 1e-12
    assert (ab.T.from_site, ab.T.to_site) == (2, 0)


def test_adjoint_examples():
    assert np.allclose(adjoint_representation(LocalOperation(0, np.eye(2))), np.eye(4))
    u = adjoint_representation(LocalOperation(0, -1j * PAULI[1]))
    assert np.max(np.abs(u - np.diag([1, 1, -1, -1]))) < 1e-15
    t = 1.7
    boost = LocalOperation(0, np.diag([t, 1 / t]), SL2C)
    u = adjoint_representation(boost)
    assert abs(u[0, 0] - (t**2 + t**-2) / 2) < 1e-14
    eta = minkowski_eta()
    assert np.max(np.abs(u @ eta @ u.T - eta)) < 1e-10


def test_adjoint_class_error():
    boost = np.diag([2.0, 0.5])
    with pytest.raises(ClassError):
        adjoint_representation(boost, SU2)


def test_adjoint_action_on_pauli_vectors():
    # u^dag M u has Pauli vector U^T m
    op = random_sl2c(4)
    m = np.array([0.3, -0.2, 0.9, 0.1])
    conj = op.matrix.conj().T @ pauli_reconstruct(m) @ op.matrix
    assert np.max(np.abs(pauli_coefficients(conj) - adjoint_representation(op).T @ m)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_adjoint_homomorphism_and_group_structure(s1, s2):
    for draw in (random_su2, random_sl2c):
        u, v = draw(s1), draw(s2)
        uv = LocalOperation(0, u.matrix @ v.matrix, u.group)
        lhs = adjoint_representation(uv)
        rhs = adjoint_representation(u) @ adjoint_representation(v)
        assert np.max(np.abs(lhs - rhs)) < 1e-10 * max(1.0, np.abs(rhs).max())
    R = adjoint_representation(random_su2(s1))
    assert np.max(np.abs(R.T @ R - np.eye(4))) < 1e-10
    L = adjoint_representation(random_sl2c(s2))
    eta = minkowski_eta()
    assert np.max(np.abs(L @ eta @ L.T - eta)) < 1e-9
    assert L[0, 0] >= 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_transformation_law(seed):
    rng = np.random.default_rng(seed)
    rho = random_density(2, 2, rng)
    ua = random_sl2c(rng, site=0)
    ub = random_sl2c(rng, site=1)
    _, norm = apply_local(rho, [ua, ub], return_norm=True)
    new = apply_local(rho, [ua, ub])
    lhs = link_matrix(new).s * norm
    rhs = adjoint_representation(ub) @ link_matrix(rho).s @ adjoint_representation(ua).T
    assert np.max(np.abs(lhs - rhs)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_swap_completeness(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    A, B = a + a.conj().T, b + b.conj().T
    lhs = 0.5 * sum(np.trace(PAULI[k] @ A) * np.trace(PAULI[k] @ B) for k in range(4))
    assert abs(lhs - np.trace(A @ B)) < 1e-10


def test_flip_two_qubit_examples():
    assert np.allclose(flip_two_qubit(np.eye(4) / 4), np.eye(4) / 4)
    singlet = _outer(np.array([0, 1, -1, 0]) / np.sqrt(2))
    assert np.max(np.abs(flip_two_qubit(singlet) - singlet)) < 1e-15
    assert np.allclose(flip_two_qubit(_outer([1, 0, 0, 0])), _outer([0, 0, 0, 1]))
    flipped = flip_two_qubit(random_density(2, 3, 1))
    DensityMatrix(flipped)  # Hermitian, PSD, unit trace
    with pytest.raises(DimensionError):
        flip_two_qubit(np.eye(2) / 2)


def test_loop_transform_examples(zero3, ghz):
    assert abs(np.trace(loop_transform(zero3, LoopSpec.of([0, 1]))) - 1) < 1e-14
    assert abs(np.trace(loop_transform(ghz, LoopSpec.of([0, 1]))) - 0.5) < 1e-14
    for seed in range(20):
        psi = haar_random_pure(3, seed)
        assert abs(np.trace(loop_transform(psi, LoopSpec.of([0, 1, 2], flipped=True)))) < 1e-10


def test_flip_placement_partial_loop():
    rho = as_density(haar_random_pure(3, 12))
    S = {(a, b): link_matrix(partial_trace(rho, [a, b])).s for a in range(3) for b in range(3) if a != b}
    eta = minkowski_eta()
    # a ~b c: tr S(a,c) S(c,b) eta S(b,a)
    got = loop_transform(rho, LoopSpec(((0, False), (1, True), (2, False))))
    assert np.allclose(got, S[(2, 0)] @ S[(1, 2)] @ eta @ S[(0, 1)], atol=1e-15)
    got = loop_transform(rho, LoopSpec.of([0, 1, 2], flipped=True))
    assert np.allclose(got, S[(2, 0)] @ eta @ S[(1, 2)] @ eta @ S[(0, 1)] @ eta, atol=1e-15)


@pytest.mark.parametrize("steps", [
    ((0, False), (1, False)),
    ((0, False), (1, False), (2, False)),
    ((0, True), (1, False), (2, True)),
    ((0, False), (1, False), (0, False), (1, False)),
    ((3, True), (0, True), (2, True), (1, True)),
])
def test_loop_matches_sequential_transport(steps):
    rho = random_density(4, 3, seed=len(steps))
    loop = LoopSpec(steps)
    S = loop_transform(rho, loop)
    m = np.array([0.4, -0.1, 0.7, 0.25])
    M_out = transport_around(rho, loop, pauli_reconstruct(m))
    assert np.max(np.abs(pauli_coefficients(M_out) - S @ m)) < 1e-10


def test_loop_site_error():
    with pytest.raises(SiteError):
        loop_transform(haar_random_pure(2, 0), LoopSpec.of([0, 2]))
    with pytest.raises(SiteError):
        LoopSpec.of([0, 0, 1])
    with pytest.raises(SiteError):
        LoopSpec.of([1])


def test_labels_are_rotation_canonical():
    assert LoopSpec.of([1, 2, 0]).label() == "I(012)"
    assert LoopSpec(((1, True), (0, True))).label() == "I(~0~1)"
    assert LoopSpec.of([0, 1, 2]).label(letters=True) == "I(abc)"
    assert LoopSpec.of([2, 0], flipped=True).label(letters=True) == "I(~a~c)"


def test_parse_loop():
    assert parse_loop("0,1,2") == LoopSpec.of([0, 1, 2])
    assert parse_loop("~0,~1") == LoopSpec.of([0, 1], flipped=True)
    assert parse_loop("0,1,0,1").n_links == 4
    with pytest.raises(ParseError) as err:
        parse_loop("0,0,1")
    assert err.value.offset == 2
    with pytest.raises(ParseError):
        parse_loop("0,x")
    with pytest.raises(ParseError):
        parse_loop("0,1,0")
    with pytest.raises(ParseError):
        parse_loop("0,5", n_sites=3)
