import math

import numpy as np
import pytest

from pbtk.dpb import (
    TruncatedFock,
    bicoherent,
    bicoherent_resolution,
    default_radius,
    dpb_build,
    dpb_theta_conjugacy,
    dpb_verify,
    eigen_residual_formula,
    norm_growth_fit,
    norm_table,
    overlap_formula,
    similarity_from_spec,
    tail_bound,
)
from pbtk.numkernel import TolerancePolicy, dag, norm

TAU = 1e-10

# incomplete-gamma values from mpmath at 30 digits
TAIL_N10_R6 = 3.1929005430636259e-07  # Gamma(11, 36) / 10!
TAIL_N10_R3 = 0.70598832034051182  # Gamma(11, 9) / 10!
RADIUS_N10 = 6.8238274551982443  # Gamma(11, R^2) / 10! = 1e-10


def random_system(N=40, kappa=100.0, seed=0):
    return dpb_build({"kind": "random", "kappa": kappa, "seed": seed}, N)


def test_fock_ccr_defect():
    for N in (1, 5, 40):
        f = TruncatedFock(N)
        c = f.c
        assert np.max(np.abs(c @ dag(c) - dag(c) @ c - np.eye(N + 1) - f.ccr_defect())) <= 1e-13
        assert f.ccr_defect()[-1, -1] == -(N + 1)


# dpb_build


def test_identity_similarity():
    sys = dpb_build({"kind": "identity"}, 5)
    assert np.array_equal(sys.phi, np.eye(6)) and np.array_equal(sys.psi, np.eye(6))
    assert np.array_equal(sys.Theta, np.eye(6))
    assert np.array_equal(sys.a, TruncatedFock(5).c)


def test_diagonal_similarity():
    sys = dpb_build({"kind": "diagonal", "entries": [1, 2, 1, 1]}, 3)
    assert np.array_equal(sys.phi[:, 1], [0, 2, 0, 0])
    assert np.array_equal(sys.psi[:, 1], [0, 0.5, 0, 0])
    assert np.vdot(sys.phi[:, 1], sys.psi[:, 1]) == 1


@pytest.mark.parametrize("seed", range(3))
def test_random_similarity_all_invariants(seed):
    sys = random_system(seed=seed)
    assert sys.kappa <= 100.0 * (1 + 1e-9)
    rep = dpb_verify(sys).extend(dpb_theta_conjugacy(sys, seed=seed))
    assert rep.ok, [e.to_dict() for e in rep.failed]
    assert max(e.residual for e in rep.entries) <= 1e-10


def test_theta_is_s_sdag_inverse():
    # Theta maps phi_n to Psi_n only as (S S^dag)^{-1}; (S^dag S)^{-1} does not
    sys = random_system(N=8, seed=4)
    S = sys.S
    assert norm(sys.Theta - np.linalg.inv(S @ dag(S))) <= TAU * sys.kappa**2
    assert norm(np.linalg.inv(dag(S) @ S) @ sys.phi - sys.psi) > 1e-3


def test_commutator_edge_defect():
    sys = random_system(N=12, seed=2)
    eN = np.zeros(13)
    eN[-1] = 1
    defect = -(13) * np.outer(sys.S @ eN, eN @ np.linalg.inv(sys.S))
    comm = sys.a @ sys.b - sys.b @ sys.a
    assert norm(comm - np.eye(13) - defect) <= TAU * sys.kappa * 13
    assert np.max(np.linalg.norm(comm @ sys.phi[:, :-1] - sys.phi[:, :-1], axis=0)) <= TAU * sys.kappa


def test_rejections():
    with pytest.raises(np.linalg.LinAlgError):
        dpb_build(np.diag([1.0, 0.0, 1.0]), 2)
    with pytest.raises(np.linalg.LinAlgError):
        dpb_build({"kind": "diagonal", "entries": {"geometric": 10.0}}, 6)
    with pytest.raises(ValueError):
        dpb_build(np.eye(3), 5)
    with pytest.raises(ValueError):
        similarity_from_spec({"kind": "weird"}, 3)


def test_explicit_description():
    S = np.array([[1, 0.5j], [0, 2]])
    from pbtk.numkernel import operator_to_json

    assert np.array_equal(similarity_from_spec({"kind": "explicit", "matrix": operator_to_json(S)}, 1), S)
    assert np.array_equal(similarity_from_spec({"kind": "explicit", "matrix": S.tolist()}, 1), S)


# theta conjugacy


def test_conjugacy_identity_exact():
    rep = dpb_theta_conjugacy(dpb_build({"kind": "identity"}, 10))
    assert rep["Theta-conjugacy-a-bdag"].residual == 0
    assert rep["Theta-intertwining-N"].residual == 0
    assert rep.ok


def test_conjugacy_diagonal():
    rep = dpb_theta_conjugacy(dpb_build({"kind": "diagonal", "entries": {"geometric": 1.2}}, 10))
    assert rep["Theta-conjugacy-a-bdag"].residual <= 1e-12
    assert rep["Theta-intertwining-N"].residual <= 1e-12
    assert rep.ok


def test_conjugacy_random():
    sys = random_system()
    rep = dpb_theta_conjugacy(sys)
    assert rep["Theta-conjugacy-a-bdag"].residual <= TAU * sys.kappa**2
    assert rep["Theta-positivity-samples"].residual < 0


# bi-coherent states


def test_bicoherent_z0():
    sys = random_system(N=10)
    bc = bicoherent(sys, 0.0)
    assert np.array_equal(bc.phi_z, sys.phi[:, 0])
    assert norm(sys.a @ bc.phi_z) <= TAU * sys.kappa
    assert eigen_residual_formula(sys, 0.0, 10) == 0


def test_bicoherent_overlap_identity():
    bc = bicoherent(dpb_build({"kind": "identity"}, 40), 1.0, 30)
    assert abs(np.vdot(bc.psi_z, bc.phi_z) - 1.0) <= 1e-12
    assert overlap_formula(1.0, 30) == pytest.approx(1.0, abs=1e-15)


def test_bicoherent_residual_formula_z2():
    sys = random_system()
    bc = bicoherent(sys, 2.0, 40)
    measured = norm(sys.a @ bc.phi_z - 2.0 * bc.phi_z)
    assert abs(measured - eigen_residual_formula(sys, 2.0, 40)) <= 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_bicoherent_residual_grid(seed):
    sys = random_system(seed=seed)
    for r in (0.5, 1.0, 1.5, 2.0, 2.5):
        for K in (10, 17, 25, 32, 40):
            z = r * np.exp(0.7j)
            bc = bicoherent(sys, z, K)
            measured = norm(sys.a @ bc.phi_z - z * bc.phi_z)
            assert abs(measured - eigen_residual_formula(sys, z, K)) <= 1e-12
            assert abs(np.vdot(bc.psi_z, bc.phi_z) - overlap_formula(z, K)) <= TAU * sys.kappa


def test_bicoherent_order_checked():
    with pytest.raises(ValueError):
        bicoherent(random_system(N=5), 1.0, 6)


# resolution of the identity


def test_default_radius():
    assert default_radius(10) == pytest.approx(RADIUS_N10, rel=1e-8)
    assert tail_bound(10, default_radius(10)) < 1e-10


def test_resolution_identity_r6_matches_tail():
    sys = dpb_build({"kind": "identity"}, 10)
    _, dev = bicoherent_resolution(sys, 6.0, 200, 64)
    # the deviation is exactly the radial tail: quadrature adds nothing visible
    assert tail_bound(10, 6.0) == pytest.approx(TAIL_N10_R6, rel=1e-12)
    assert dev == pytest.approx(TAIL_N10_R6, rel=1e-8)


def test_resolution_identity_r3_visible_tail():
    sys = dpb_build({"kind": "identity"}, 10)
    _, dev = bicoherent_resolution(sys, 3.0, 200, 64)
    assert dev == pytest.approx(TAIL_N10_R3, rel=1e-10)


def test_resolution_tail_rule():
    for spec in ({"kind": "identity"}, {"kind": "random", "kappa": 100.0, "seed": 0}, {"kind": "random", "kappa": 10.0, "seed": 3}):
        sys = dpb_build(spec, 10)
        _, dev = bicoherent_resolution(sys)
        assert dev <= 1e-8


def test_resolution_single_mode():
    sys = dpb_build({"kind": "identity"}, 0)
    Q, dev = bicoherent_resolution(sys, 5.0, 100)
    assert dev <= tail_bound(0, 5.0) * (1 + 1e-9)


def test_resolution_monotone():
    sys = dpb_build({"kind": "identity"}, 10)
    devs = [bicoherent_resolution(sys, R, 200)[1] for R in (2.0, 3.0, 4.0, 5.0, 6.0, 7.0)]
    assert all(x > y for x, y in zip(devs, devs[1:]))
    sys = random_system(N=10, kappa=10.0, seed=1)
    R = default_radius(10)
    devs = [bicoherent_resolution(sys, R, n)[1] for n in (4, 8, 16, 32)]
    assert all(x > y for x, y in zip(devs, devs[1:]))


# norm growth


def test_norm_fit_identity():
    fit = norm_growth_fit(dpb_build({"kind": "identity"}, 20))
    assert abs(fit.alpha_phi) < 1e-10 and fit.r_phi == pytest.approx(1.0, abs=1e-10)
    assert fit.bounded


def test_norm_fit_geometric():
    sys = dpb_build({"kind": "diagonal", "entries": {"geometric": 2.0}}, 20, kappa_max=1e7)
    fit = norm_growth_fit(sys)
    assert fit.r_phi == pytest.approx(2.0, rel=1e-10)
    assert abs(fit.alpha_phi) < 1e-10
    assert fit.r_psi == pytest.approx(0.5, rel=1e-10)


def test_norm_fit_random_bounded():
    fit = norm_growth_fit(random_system())
    assert fit.alpha_phi < 0.5 + fit.residual and fit.alpha_psi < 0.5 + fit.residual


def test_norm_fit_range_checked():
    sys = random_system(N=10)
    with pytest.raises(ValueError):
        norm_growth_fit(sys, n_max=10)
    assert len(norm_table(sys)) == 11
