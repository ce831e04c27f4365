import numpy as np
import pytest

from loopinv.errors import ClassError, StepError
from loopinv.invariants import FLIPPED_LOOPS, STANDARD_LOOPS
from loopinv.linkspace import LoopSpec
from loopinv.qstate import apply_local, ghz_state, haar_random_pure, product_state, random_su2, w_state
from loopinv.verify import (
    DetLink,
    FidelityConfig,
    InvarianceResult,
    check_sl2c_invariance,
    check_su2_invariance,
    check_transpose_property,
    identity_suite,
    jacobian_independence,
    mc_fidelity,
    negative_control_fractions,
    sphere_second_moment,
)


def test_invariance_result_passed_flag():
    assert InvarianceResult("x", 1, 1e-10, 1e-9).passed
    assert not InvarianceResult("x", 1, 2e-9, 1e-9).passed


def test_su2_invariance_kempe():
    (res,) = check_su2_invariance([STANDARD_LOOPS["I(abc)"]], n_states=100, n_ops=10, seed=1)
    assert res.trials == 1000 and res.passed and res.max_residual < 1e-9


def test_su2_identity_ops_give_zero():
    results = check_su2_invariance(list(STANDARD_LOOPS.values()), n_states=10, n_ops=2, seed=0, identity=True)
    assert all(r.max_residual < 1e-14 for r in results)


def test_su2_invariance_mixed_four_qubits():
    (res,) = check_su2_invariance([LoopSpec.of([0, 1, 2, 3])], n_states=20, n_ops=3, seed=2, n_sites=4, rank=3)
    assert res.max_residual < 1e-9


def test_results_are_reproducible():
    loops = [STANDARD_LOOPS["I(abab)"]]
    a = check_su2_invariance(loops, 10, 3, seed=9)
    b = check_su2_invariance(loops, 10, 3, seed=9)
    assert a == b
    q = [FLIPPED_LOOPS["I(~a~b)"], DetLink((0, 1))]
    assert check_sl2c_invariance(q, 10, 3, seed=4) == check_sl2c_invariance(q, 10, 3, seed=4)


def test_sl2c_invariance_flipped_and_det():
    q = [FLIPPED_LOOPS["I(~a~b)"], FLIPPED_LOOPS["I(~a~b~c)"], DetLink((1, 2))]
    for res in check_sl2c_invariance(q, n_states=30, n_ops=5, seed=5):
        assert res.passed, res


def test_sl2c_rejects_unflipped_loop():
    with pytest.raises(ClassError):
        check_sl2c_invariance([STANDARD_LOOPS["I(ab)"]], 2, 2, seed=0)
    with pytest.raises(ClassError):
        check_sl2c_invariance([LoopSpec(((0, True), (1, False)))], 2, 2, seed=0)


def test_negative_controls_fail_as_required():
    fractions = negative_control_fractions(n_states=30, n_ops=5, seed=6)
    assert len(fractions) == 2
    assert all(f >= 0.95 for f in fractions.values())


def test_transpose_property():
    products = [product_state(b) for b in ([0, 0, 0], [1, 0, 1])]
    assert check_transpose_property(states=products).max_residual < 1e-14
    assert check_transpose_property(states=[ghz_state()]).max_residual < 1e-14
    assert check_transpose_property(n_states=50, seed=3).passed


def test_jacobian_rank_generic():
    res = jacobian_independence(haar_random_pure(3, 17))
    assert res.jacobian.shape == (6, 16)
    assert res.rank == 6
    assert np.all(np.diff(res.singular_values) <= 0)
    assert res.rank == int(np.sum(res.singular_values > res.threshold * res.singular_values[0]))


def test_jacobian_step_robust():
    psi = haar_random_pure(3, 23)
    assert jacobian_independence(psi, h=1e-4).rank == jacobian_independence(psi, h=1e-6).rank == 6


def test_jacobian_rank_invariant_under_su2():
    psi = haar_random_pure(3, 31)
    rotated = apply_local(psi, [random_su2(40 + s, site=s) for s in range(3)])
    assert jacobian_independence(rotated).rank == jacobian_independence(psi).rank


def test_jacobian_degenerate_point_is_reported():
    res = jacobian_independence(product_state([0, 0, 0]))
    assert 0 <= res.rank <= 6


def test_jacobian_step_error():
    with pytest.raises(StepError):
        jacobian_independence(haar_random_pure(3, 0), h=0.1)
    with pytest.raises(StepError):
        jacobian_independence(haar_random_pure(3, 0), h=1e-9)


def test_fidelity_config_validation():
    with pytest.raises(ValueError):
        FidelityConfig(k=0)
    with pytest.raises(ValueError):
        FidelityConfig(samples=10)


def test_sphere_second_moment():
    k = 1.5
    mean, se = sphere_second_moment(FidelityConfig(k=k, samples=200_000, seed=2))
    assert np.all(np.abs(mean - k**2 / 4 * np.eye(4)) < 5 * se)


@pytest.mark.parametrize("psi,sites,k,expected", [
    (product_state([0, 0, 0]), [0, 1, 2], 1.0, 0.5),
    (ghz_state(), [0, 1], 2.0, 1.0),
])
def test_mc_fidelity_named(psi, sites, k, expected):
    est = mc_fidelity(psi, LoopSpec.of(sites), FidelityConfig(k=k, samples=1_000_000, seed=1))
    assert abs(est.reference - expected) < 1e-12
    assert abs(est.estimate - expected) < 5 * est.std_error


def test_mc_fidelity_se_scaling():
    loop = LoopSpec.of([0, 1, 2])
    psi = w_state()
    small = mc_fidelity(psi, loop, FidelityConfig(samples=10_000, seed=3))
    large = mc_fidelity(psi, loop, FidelityConfig(samples=1_000_000, seed=3))
    ratio = small.std_error / large.std_error
    assert 10 / 2 <= ratio <= 10 * 2


def test_mc_fidelity_su2_mode():
    psi = haar_random_pure(3, 8)
    est = mc_fidelity(psi, LoopSpec.of([0, 1, 2]), FidelityConfig(k=1, samples=1_000_000, seed=4), mode="su2")
    assert abs(est.estimate - est.reference) < 5 * est.std_error
    with pytest.raises(ValueError):
        mc_fidelity(psi, LoopSpec.of([0, 1]), FidelityConfig(), mode="bogus")


def test_identity_suite_small():
    report = identity_suite(seed=7, n_states=100)
    assert report.passed, {k: v.max_residual for k, v in report.checks.items() if not v.passed}
    assert report.as_dict()["n_states"] == 100
