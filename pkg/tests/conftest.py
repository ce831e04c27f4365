import numpy as np
import pytest

from loopinv.qstate import ghz_state, product_state, w_state

SIGMA = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def trace_out_qubit(rho, n, k):
    """Trace out qubit k of an n-qubit matrix with explicit basis projectors."""
    t0 = np.kron(np.kron(np.eye(2**k), np.array([[1], [0]])), np.eye(2 ** (n - k - 1)))
    t1 = np.kron(np.kron(np.eye(2**k), np.array([[0], [1]])), np.eye(2 ** (n - k - 1)))
    return t0.T @ rho @ t0 + t1.T @ rho @ t1


def link_by_kron(rho_ab):
    """S[j, i] = 1/2 tr(sigma_i (x) sigma_j rho) with explicit Kronecker products."""
    s = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            s[j, i] = 0.5 * np.trace(np.kron(SIGMA[i], SIGMA[j]) @ rho_ab).real
    return s


def tau_abc_hyperdeterminant(psi):
    """Three-tangle 4|d1 - 2 d2 + 4 d3| from the Cayley hyperdeterminant."""
    a = psi.reshape(2, 2, 2)
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return 4 * abs(d1 - 2 * d2 + 4 * d3)


@pytest.fixture
def ghz():
    return ghz_state()


@pytest.fixture
def w():
    return w_state()


@pytest.fixture
def zero3():
    return product_state([0, 0, 0])
