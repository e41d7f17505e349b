import cmath
import dataclasses
import math

import numpy as np
import pytest

from pbtk.numkernel import DefectiveMatrix, TolerancePolicy, dag, norm
from pbtk.pseudofermion import (
    ExceptionalPoint,
    HeffParams,
    PfPair,
    heff_build,
    hermitized,
    model_hamiltonian,
    pf_from_hamiltonian,
    pf_system,
    pf_verify,
)

I2 = np.eye(2)


def system(delta=0.6, omega=1.0, theta=0.0, phase=1.0):
    p = HeffParams(delta, omega, theta)
    pair, H = heff_build(p)
    return pf_system(pair, phase=phase), H, p.Omega


# heff_build


def test_heff_canonical_limit():
    pair, _ = heff_build(HeffParams(0.0, 1.0, 0.0))
    assert norm(pair.a @ pair.a) < 1e-15
    assert norm(dag(pair.a) - pair.b) < 1e-15


@pytest.mark.parametrize("theta", [0.0, math.pi / 3, 2.0])
def test_heff_spectrum_and_number_form(theta):
    p = HeffParams(0.6, 1.0, theta)
    pair, H = heff_build(p)
    assert p.Omega == pytest.approx(0.8, abs=1e-15)
    w = np.sort_complex(np.linalg.eigvals(H))
    assert np.max(np.abs(w - np.array([-0.4, 0.4]))) < 1e-14
    assert norm(H - p.Omega * (pair.b @ pair.a - 0.5 * I2)) < 1e-14


@pytest.mark.parametrize("delta, omega", [(1.0, 1.0), (1.2, 1.0), (0.0, 0.0)])
def test_heff_exceptional_point(delta, omega):
    with pytest.raises(ExceptionalPoint):
        heff_build(HeffParams(delta, omega, 0.0))


# pf_system


def test_hermitian_case_collapses():
    sys, _, _ = system(delta=0.0)
    assert norm(sys.Sphi - sys.Sphi[0, 0] * I2) < 1e-15
    assert norm(sys.Spsi - sys.Spsi[0, 0] * I2) < 1e-15
    for f, g in zip(sys.phi, sys.psi):
        assert norm(f - g) < 1e-15


def test_gauge():
    sys, _, _ = system(theta=0.7)
    assert norm(sys.phi[0]) == pytest.approx(1.0, abs=1e-15)
    assert np.vdot(sys.phi[0], sys.psi[0]) == pytest.approx(1.0, abs=1e-15)
    first = sys.phi[0][np.argmax(np.abs(sys.phi[0]) > 1e-8)]
    assert first.imag == 0 and first.real > 0


@pytest.mark.parametrize("theta", [0.0, math.pi / 3])
def test_metric_shape(theta):
    # S_phi = 2|k|^2 [[1, .], [., 1]] with off-diagonal modulus |delta|/|omega| times the diagonal
    sys, _, _ = system(theta=theta)
    S = sys.Sphi
    assert abs(S[0, 0] - S[1, 1]) < 1e-14
    assert abs(S[0, 1]) / S[0, 0].real == pytest.approx(0.6, abs=1e-14)
    # the gauge here realizes 2|k|^2 = 1
    assert S[0, 0].real == pytest.approx(1.0, abs=1e-14)


def test_norm_bound():
    sys, _, _ = system(theta=1.1)
    assert norm(sys.Sphi) <= norm(sys.phi[0]) ** 2 + norm(sys.phi[1]) ** 2 + 1e-14
    assert norm(sys.Spsi) <= norm(sys.psi[0]) ** 2 + norm(sys.psi[1]) ** 2 + 1e-14


def test_trivial_kernel_rejected():
    with pytest.raises(np.linalg.LinAlgError):
        pf_system(PfPair(I2, I2))


# pf_verify


def test_verify_canonical_model():
    sys, H, Om = system(delta=0.0)
    rep = pf_verify(sys, hamiltonian=H, Omega=Om)
    assert rep.ok
    assert all(e.residual <= 1e-14 for e in rep.entries)


def test_verify_reference_point():
    sys, H, Om = system(theta=math.pi / 3)
    rep = pf_verify(sys, TolerancePolicy(1e-12), hamiltonian=H, Omega=Om)
    assert rep.ok, [e.to_dict() for e in rep.failed]
    names = {e.check.split("-")[0] for e in rep.entries}
    assert {"FB220", "FB224", "FB225", "FB226", "FB227", "FB228", "FB229", "FB230", "FB231"} <= names


def test_verify_flags_perturbed_b():
    sys, _, _ = system(theta=0.4)
    b = sys.pair.b.copy()
    b[0, 1] += 1e-3
    broken = dataclasses.replace(sys, pair=PfPair(sys.pair.a, b))
    rep = pf_verify(broken)
    assert not rep.ok
    assert not rep["FB220-anticommutator"].passed
    assert rep["FB220-anticommutator"].residual == pytest.approx(1e-3, rel=0.5)


def test_hermitized_hamiltonian():
    sys, H, Om = system(theta=math.pi / 3)
    h = hermitized(sys, H)
    assert norm(h - dag(h)) < 1e-14
    assert np.allclose(np.linalg.eigvalsh(0.5 * (h + dag(h))), [-0.4, 0.4], atol=1e-14)
    # T is the positive root of S_phi, so S_phi^{1/2} = T
    assert norm(sys.T @ sys.T - sys.Sphi) < 1e-14


def test_phase_invariance():
    rng = np.random.default_rng(11)
    base, _, _ = system(theta=0.9)
    for _ in range(20):
        ph = cmath.exp(2j * math.pi * rng.random())
        sys, _, _ = system(theta=0.9, phase=ph)
        assert norm(np.outer(sys.phi[0], sys.psi[0].conj()) - np.outer(base.phi[0], base.psi[0].conj())) < 1e-14
        assert norm(sys.N - base.N) < 1e-14
        assert norm(sys.Sphi @ sys.Spsi - base.Sphi @ base.Spsi) < 1e-14
        assert norm(sys.Sphi - base.Sphi) < 1e-14
        assert pf_verify(sys).ok


# model Hamiltonians


def test_model_dg():
    assert np.array_equal(model_hamiltonian("DG", dict(r=1, s=1, t=1, theta=0, phi=0)), np.ones((2, 2)))


def test_model_gmm_symmetric():
    H = model_hamiltonian("GMM", dict(eps1=0, eps2=0, gamma1=0.3, gamma2=0.3, nu0=0.7))
    assert np.array_equal(H, -0.3j * I2 + 0.7 * np.array([[0, 1], [1, 0]]))


def test_model_mo_hermitian():
    H = model_hamiltonian("MO", dict(E=2, theta=0.3, phi=0.7))
    assert norm(H - dag(H)) == 0
    assert np.allclose(np.linalg.eigvalsh(H), [-2, 2], atol=1e-15)


@pytest.mark.parametrize(
    "kind, params, word",
    [
        ("DG", dict(r=0, s=1, t=1), "r"),
        ("DG", dict(r=1, s=1j, t=1), "s"),
        ("GMM", dict(eps1=0, eps2=0, gamma1=0, gamma2=1, nu0=1), "gamma1"),
        ("MO", dict(E=1, theta=3.5, phi=0), "theta"),
        ("MO", dict(E=1, theta=0.2, phi=-0.1), "phi"),
        ("XX", {}, "unknown model"),
    ],
)
def test_model_domain_errors(kind, params, word):
    with pytest.raises(ValueError, match=word):
        model_hamiltonian(kind, params)


# pf_from_hamiltonian


def test_from_heff():
    _, H, _ = system()
    sys, Om, g = pf_from_hamiltonian(H)
    assert Om == pytest.approx(0.8, abs=1e-14) and abs(g) < 1e-14


def test_from_diagonal():
    sys, Om, g = pf_from_hamiltonian(np.diag([1.0, 3.0]))
    assert Om == 2 and g == 2
    assert np.array_equal(sys.pair.a, np.array([[0, 1], [0, 0]]))


def test_from_mo():
    _, Om, g = pf_from_hamiltonian(model_hamiltonian("MO", dict(E=1, theta=math.pi / 4, phi=0)))
    assert abs(Om - 2) < 1e-12 and abs(g) < 1e-12


def test_from_hamiltonian_exceptional_point():
    with pytest.raises(DefectiveMatrix):
        pf_from_hamiltonian([[1.0, 1.0], [0.0, 1.0]])


def test_random_pairs_property():
    rng = np.random.default_rng(1)
    n = 0
    while n < 500:
        H = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        w = np.linalg.eigvals(H)
        if abs(w[0] - w[1]) <= 0.1:
            continue
        n += 1
        sys, Om, g = pf_from_hamiltonian(H)
        assert norm(H - (Om * (sys.pair.b @ sys.pair.a - 0.5 * I2) + g * I2)) <= 1e-10 * norm(H)
        rep = pf_verify(sys, hamiltonian=H, Omega=Om, gamma=g)
        assert rep.ok, [e.to_dict() for e in rep.failed]
