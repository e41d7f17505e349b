import numpy as np
import pytest

from pbtk.epf import (
    EpfBasis,
    alpha_law,
    epf_anticommutator,
    epf_dual,
    epf_dual_iterative,
    epf_ladder,
    epf_system,
    epf_verify,
)
from pbtk.numkernel import TolerancePolicy, anticommutator, dag, norm

TAU = 1e-10


def random_basis(M, seed=0, kappa_max=1e3):
    return EpfBasis.random(M, np.random.default_rng(seed), kappa_max)


# epf_ladder


def test_ladder_m1_standard():
    a, b = epf_ladder(EpfBasis.standard(1))
    assert np.array_equal(a, np.array([[0, 1], [0, 0]]))
    assert np.array_equal(b, dag(a))
    assert np.array_equal(anticommutator(a, b), np.eye(2))


def test_ladder_m2_standard():
    a, _ = epf_ladder(EpfBasis.standard(2))
    assert np.allclose(a, np.diag([1.0, np.sqrt(2)], k=1), atol=0)


def test_ladder_m2_random_nilpotent():
    a, b = epf_ladder(random_basis(2, seed=4))
    assert norm(np.linalg.matrix_power(a, 3)) <= 1e-12
    assert norm(np.linalg.matrix_power(b, 3)) <= 1e-12


def test_ladder_actions():
    basis = random_basis(5, seed=1)
    a, b = epf_ladder(basis)
    h = basis.h
    for k in range(6):
        lower = np.sqrt(k) * h[:, k - 1] if k > 0 else 0
        upper = np.sqrt(k + 1) * h[:, k + 1] if k < 5 else 0
        assert norm(a @ h[:, k] - lower) <= TAU * basis.kappa
        assert norm(b @ h[:, k] - upper) <= TAU * basis.kappa


def test_singular_basis_rejected():
    with pytest.raises(np.linalg.LinAlgError):
        epf_dual(EpfBasis(np.array([[1.0, 2.0], [2.0, 4.0]])))


# epf_dual


def test_dual_orthonormal_self_dual():
    Q, _ = np.linalg.qr(np.random.default_rng(2).standard_normal((4, 4)) + 0j)
    assert norm(epf_dual(EpfBasis(Q)) - Q) < 1e-14


def test_dual_hand_example():
    g = epf_dual(EpfBasis(np.array([[1.0, 1.0], [0.0, 1.0]])))
    assert np.allclose(g[:, 0], [1, -1], atol=0) and np.allclose(g[:, 1], [0, 1], atol=0)


def test_dual_methods_agree_m4():
    basis = random_basis(4, seed=7)
    assert np.max(np.abs(epf_dual(basis) - epf_dual_iterative(basis))) <= 1e-10


@pytest.mark.parametrize("M", range(0, 9))
def test_dual_is_involutive(M):
    basis = random_basis(M, seed=M)
    g = epf_dual(basis)
    assert np.max(np.abs(epf_dual(EpfBasis(g)) - basis.h)) <= TAU * basis.kappa


# epf_system


def test_system_m1_orthonormal():
    sys = epf_system(EpfBasis.standard(1))
    assert np.array_equal(sys.Sh, np.eye(2)) and np.array_equal(sys.Sg, np.eye(2))
    assert np.array_equal(anticommutator(sys.a, sys.b), np.eye(2))


def test_system_m3_random():
    sys = epf_system(random_basis(3, seed=3))
    rep = epf_verify(sys, TolerancePolicy(TAU))
    assert rep.ok, [e.to_dict() for e in rep.failed]
    assert max(e.residual for e in rep.entries) <= 1e-10


def test_system_m0():
    h = np.array([[2.0 - 1j]])
    sys = epf_system(EpfBasis(h))
    assert sys.g[0, 0] == pytest.approx(h[0, 0] / abs(h[0, 0]) ** 2)
    assert np.array_equal(sys.a, np.zeros((1, 1))) and np.array_equal(sys.b, np.zeros((1, 1)))
    assert np.allclose(epf_dual_iterative(EpfBasis(h)), sys.g, atol=1e-16)


def test_json_roundtrip():
    basis = random_basis(2, seed=9)
    back = EpfBasis.from_json(basis.to_json())
    assert np.array_equal(back.h, basis.h)
    with pytest.raises(ValueError):
        EpfBasis.from_json({"M": 3, "vectors": basis.to_json()["vectors"]})


def test_conditioning_warning():
    h = np.diag([1.0, 1e-7, 1.0]).astype(complex)
    rep = epf_verify(epf_system(EpfBasis(h)))
    assert rep.warnings and "condition number" in rep.warnings[0]


# epf_anticommutator


@pytest.mark.parametrize("M, expected", [(1, [1, 1]), (2, [1, 3, 2]), (3, [1, 3, 5, 3])])
def test_alpha_table(M, expected):
    for seed in range(5):
        alpha, rep = epf_anticommutator(epf_system(random_basis(M, seed)))
        assert np.max(np.abs(alpha - expected)) <= 1e-10
        assert rep.ok


def test_alpha_law_closed_form():
    assert list(alpha_law(4)) == [1, 3, 5, 7, 4]
    assert list(alpha_law(0)) == [0]


def test_only_m1_gives_identity():
    for M in range(1, 9):
        sys = epf_system(random_basis(M, seed=M))
        is_identity = norm(anticommutator(sys.a, sys.b) - np.eye(M + 1)) <= 1e-10 * sys.basis.kappa
        assert is_identity == (M == 1)


def test_expansion_uses_h_g_pairing():
    # {a,b} = sum alpha_k |h_k><g_k|, while the other ordering fails off the orthonormal case
    sys = epf_system(random_basis(3, seed=12))
    ab = anticommutator(sys.a, sys.b)
    h, g, al = sys.basis.h, sys.g, alpha_law(3)
    assert norm(ab - h @ np.diag(al) @ dag(g)) <= 1e-10 * sys.basis.kappa**2
    assert norm(ab - g @ np.diag(al) @ dag(h)) > 1e-3


@pytest.mark.slow
def test_alpha_law_sweep():
    rng = np.random.default_rng(0)
    for M in range(1, 13):
        for _ in range(100):
            basis = EpfBasis.random(M, rng, 1e3)
            assert basis.kappa <= 1e3
            alpha, rep = epf_anticommutator(epf_system(basis))
            assert np.max(np.abs(alpha - alpha_law(M))) <= 1e-10
            assert rep.ok


def test_number_spectrum_basis_independent():
    rng = np.random.default_rng(8)
    for M in range(1, 9):
        for _ in range(100):
            sys = epf_system(EpfBasis.random(M, rng, 1e3))
            w = np.linalg.eigvals(sys.N)
            w = w[np.argsort(w.real)]
            assert np.max(np.abs(w - np.arange(M + 1))) <= TAU * sys.basis.kappa


def test_metrics_mutual_inverse():
    for M in range(1, 9):
        sys = epf_system(random_basis(M, seed=100 + M))
        assert norm(sys.Sh @ sys.Sg - np.eye(M + 1)) <= TAU * np.linalg.cond(sys.Sh)
