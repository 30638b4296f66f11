import numpy as np
import pytest

from steerkit import cg, harness
from steerkit import group_core as gc

from conftest import random_euler


def test_cg_so2_examples():
    assert cg.cg_so2(3, 1, 2)[0, 0] == 1
    assert cg.cg_so2(3, 1, 1)[0, 0] == 0
    assert all(cg.cg_so2(0, k, -k)[0, 0] == 1 for k in range(-5, 6))


def test_selection_and_shapes():
    with pytest.raises(ValueError):
        cg.cg_so3(3, 1, 1)
    assert np.array_equal(cg.cg_so3(0, 0, 0), [[1]])
    for l, cols in [(0, 1), (1, 3), (2, 5)]:
        assert cg.cg_so3(l, 1, 1).shape == (9, cols)
    table = cg.cg_table(3, 2)
    assert (1, 1, 1) in table and (2, 0, 1) not in table


@pytest.mark.parametrize("l1,l2", [(a, b) for a in range(4) for b in range(4)])
def test_isometry_completeness_intertwining(rng, l1, l2):
    ls = range(abs(l1 - l2), l1 + l2 + 1)
    blocks = [cg.cg_so3(l, l1, l2) for l in ls]
    full = np.concatenate(blocks, axis=1)
    n = (2 * l1 + 1) * (2 * l2 + 1)
    assert full.shape == (n, n)
    assert np.abs(full.conj().T @ full - np.eye(n)).max() < 1e-12
    for _ in range(10):
        a = random_euler(rng)
        T = np.kron(gc.wigner_d(l1, *a), gc.wigner_d(l2, *a))
        for l, C in zip(ls, blocks):
            assert np.abs(T @ C - C @ gc.wigner_d(l, *a)).max() < 1e-9


def test_phase_convention():
    for l1 in range(3):
        for l2 in range(3):
            for l in range(abs(l1 - l2), l1 + l2 + 1):
                flat = cg.cg_so3(l, l1, l2).ravel()
                first = flat[np.flatnonzero(np.abs(flat) > 1e-12)[0]]
                assert first.real > 0 and first.imag == 0


@pytest.mark.parametrize("l1,l2", [(1, 1), (1, 2), (2, 2)])
def test_group_averaging_oracle(l1, l2):
    """d_l * int conj(D^l_ab) (rho1 (x) rho2) dg = C[:, a] C[:, b]^H."""
    q = gc.so3_quadrature(12, "gauss")
    T = np.einsum("nij,nkl->nikjl", gc.wigner_d(l1, q.alpha, q.beta, q.gamma),
                  gc.wigner_d(l2, q.alpha, q.beta, q.gamma))
    n = (2 * l1 + 1) * (2 * l2 + 1)
    T = T.reshape(-1, n, n)
    for l in range(abs(l1 - l2), l1 + l2 + 1):
        D = gc.wigner_d(l, q.alpha, q.beta, q.gamma)
        C = cg.cg_so3(l, l1, l2)
        P = (2 * l + 1) * np.einsum("n,nab,nij->abij", q.weights, D.conj(), T)
        expected = np.einsum("ia,jb->abij", C, C.conj())
        assert np.abs(P - expected).max() < 1e-10


def test_tilde_slices():
    for key in [(1, 1, 1), (2, 1, 2), (1, 2, 3)]:
        C = cg.cg_so3(*key)
        d1, d2 = 2 * key[1] + 1, 2 * key[2] + 1
        for m in range(C.shape[1]):
            Ct = cg.cg_tilde(C, m, d1, d2)
            assert Ct.shape == (d2, d1)
            assert np.array_equal(Ct.reshape(-1, order="F"), C[:, m].conj())


def test_cg_decompose(rng):
    C = cg.cg_so3(1, 1, 2)
    assert np.allclose(cg.cg_decompose(np.eye(15), C), 5 * np.eye(3))
    # block of a tensor product of irreps is the irrep itself, scaled
    a = random_euler(rng)
    T = np.kron(gc.wigner_d(1, *a), gc.wigner_d(2, *a))
    assert np.abs(cg.cg_decompose(T, C) - 5 * gc.wigner_d(1, *a)).max() < 1e-12
    assert cg.cg_decompose(np.array([[2.5]]), cg.cg_so2(3, 1, 2))[0, 0] == 2.5
    assert cg.cg_decompose(np.array([[2.5]]), cg.cg_so2(4, 1, 2))[0, 0] == 0


def test_diagonal_restriction():
    for seed in range(3):
        assert harness.diagonal_restriction_residual(8, 256, seed) < 1e-10


def test_verify_negative_control():
    def corrupted(l, l1, l2):
        C = cg.cg_so3(l, l1, l2).copy()
        if C.shape[1] > 1:
            C[:, 0] *= 1j
        return C
    res = {r.name: r.passed for r in harness.verify("cg", cg_provider=corrupted)}
    assert res["cg.so3_intertwiner"] is False
    assert all(r.passed for r in harness.verify("cg"))
