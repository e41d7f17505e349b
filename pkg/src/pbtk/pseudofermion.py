"""Pseudo-fermions on C^2: pairs (a, b) with {a,b} = 1 and a^2 = b^2 = 0.

Built either from the explicit two-level atom Hamiltonian (``heff_build``) or
from any diagonalizable 2x2 Hamiltonian (``pf_from_hamiltonian``). The
similarity to ordinary fermions uses ``T = S_psi^{-1/2}``, so that
``a = T c T^{-1}`` and ``h = T^{-1} H T`` is Hermitian.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .numkernel import (
    DefectiveMatrix,
    TolerancePolicy,
    anticommutator,
    as_operator,
    dag,
    eig_biorthogonal,
    herm_inv_sqrt,
    herm_sqrt,
    norm,
    null_space,
)
from .report import VerificationReport

IDENTITY = np.eye(2, dtype=complex)

# gap threshold for "distinct" eigenvalues, relative to ||H||
DEFAULT_GAP_TOL = TolerancePolicy(1e-8)


class ExceptionalPoint(ValueError):
    """Raised when Omega is not real and strictly positive."""


@dataclass(frozen=True)
class PfPair:
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class PfSystem:
    pair: PfPair
    phi: tuple[np.ndarray, np.ndarray]
    psi: tuple[np.ndarray, np.ndarray]
    N: np.ndarray
    Ndag: np.ndarray
    Sphi: np.ndarray
    Spsi: np.ndarray
    T: np.ndarray
    c: np.ndarray
    e: tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class HeffParams:
    delta: float
    omega_abs: float
    theta: float = 0.0

    @property
    def Omega(self) -> float:
        gap2 = self.omega_abs**2 - self.delta**2
        if not self.omega_abs > 0 or not gap2 > 0:
            raise ExceptionalPoint(
                f"Omega = sqrt(|omega|^2 - delta^2) must be real and positive "
                f"(|omega| = {self.omega_abs}, delta = {self.delta})"
            )
        return math.sqrt(gap2)


def heff_build(p: HeffParams) -> tuple[PfPair, np.ndarray]:
    """Ladder pair and effective Hamiltonian of the damped two-level atom."""
    Om = p.Omega
    d, w = p.delta, p.omega_abs
    e_p, e_m = cmath.exp(1j * p.theta), cmath.exp(-1j * p.theta)
    omega = w * e_p
    H = 0.5 * np.array([[-1j * d, omega.conjugate()], [omega, 1j * d]])
    a = np.array([[-w, -e_m * (Om + 1j * d)], [e_p * (Om - 1j * d), w]]) / (2 * Om)
    b = np.array([[-w, e_m * (Om - 1j * d)], [-e_p * (Om + 1j * d), w]]) / (2 * Om)
    return PfPair(a, b), H


def _fix_phase(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    big = np.flatnonzero(np.abs(v) > 1e-8)
    z = v[big[0]]
    return v * (abs(z) / z)


def pf_system(pair: PfPair, tol: TolerancePolicy = TolerancePolicy(), phase: complex = 1.0) -> PfSystem:
    """Assemble vacua, excited states, metrics and the fermionic similarity.

    Gauge: ``||phi_0|| = 1`` with its first non-negligible component real
    positive, then multiplied by ``phase`` (unit modulus); ``Psi_0`` is scaled
    so that ``<phi_0, Psi_0> = 1``.
    """
    a, b = as_operator(pair.a), as_operator(pair.b)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("pseudo-fermion operators must be 2x2")
    ker_a = null_space(a, tol)
    ker_bd = null_space(dag(b), tol)
    if not ker_a or not ker_bd:
        raise np.linalg.LinAlgError("a or b^dagger has a trivial kernel; not a pseudo-fermion pair")
    phi0 = _fix_phase(ker_a[0]) * (phase / abs(phase))
    v = ker_bd[0]
    psi0 = v / np.vdot(phi0, v)
    phi1 = b @ phi0
    psi1 = dag(a) @ psi0
    N = b @ a
    Sphi = np.outer(phi0, phi0.conj()) + np.outer(phi1, phi1.conj())
    Spsi = np.outer(psi0, psi0.conj()) + np.outer(psi1, psi1.conj())
    root = herm_sqrt(Spsi)
    T = herm_inv_sqrt(Spsi)
    c = root @ a @ T
    return PfSystem(
        pair=PfPair(a, b),
        phi=(phi0, phi1),
        psi=(psi0, psi1),
        N=N,
        Ndag=dag(N),
        Sphi=Sphi,
        Spsi=Spsi,
        T=T,
        c=c,
        e=(root @ phi0, root @ phi1),
    )


def hermitized(sys: PfSystem, H) -> np.ndarray:
    """``T^{-1} H T``; Hermitian when H is a function of the number operator."""
    return np.linalg.solve(sys.T, as_operator(H) @ sys.T)


def pf_verify(
    sys: PfSystem,
    tol: TolerancePolicy = TolerancePolicy(),
    hamiltonian=None,
    Omega: complex | None = None,
    gamma: complex = 0.0,
    **context,
) -> VerificationReport:
    """Residual of every pseudo-fermion identity, one report entry each.

    Residuals are absolute spectral/Euclidean norms, except
    ``FB228-metrics-positive`` whose residual is ``-lambda_min / lambda_max``
    of the worse metric (negative when positive definite). If ``hamiltonian``
    and ``Omega`` are given, the Hermitian similarity ``h = T^{-1} H T`` is
    checked against ``Omega (c^dag c - 1/2) + gamma``.
    """
    a, b = sys.pair.a, sys.pair.b
    phi0, phi1 = sys.phi
    psi0, psi1 = sys.psi
    ad, bd = dag(a), dag(b)
    N, Nd = sys.N, sys.Ndag
    Sphi, Spsi, T, c = sys.Sphi, sys.Spsi, sys.T, sys.c
    kappa = np.linalg.cond(Spsi)
    t = tol.threshold(kappa)
    rep = VerificationReport()
    add = lambda name, r: rep.add(name, r, t, **context)

    add("FB220-anticommutator", norm(anticommutator(a, b) - IDENTITY))
    add("FB220-a-squared", norm(a @ a))
    add("FB220-b-squared", norm(b @ b))
    add("p1-vacuum-a", norm(a @ phi0))
    add("p2-vacuum-bdag", norm(bd @ psi0))
    add("FB224-lowering-phi", norm(a @ phi1 - phi0))
    add("FB224-lowering-psi", norm(bd @ psi1 - psi0))
    add("FB225-number-phi", max(norm(N @ phi0), norm(N @ phi1 - phi1)))
    add("FB225-number-psi", max(norm(Nd @ psi0), norm(Nd @ psi1 - psi1)))
    gram = np.array([[np.vdot(p, q) for q in (psi0, psi1)] for p in (phi0, phi1)])
    add("FB226-biorthonormality", float(np.max(np.abs(gram - IDENTITY))))
    add("FB227-norm-bound-Sphi", max(0.0, norm(Sphi) - (norm(phi0) ** 2 + norm(phi1) ** 2)))
    add("FB227-norm-bound-Spsi", max(0.0, norm(Spsi) - (norm(psi0) ** 2 + norm(psi1) ** 2)))
    add("FB228-Sphi-maps-psi", max(norm(Sphi @ psi0 - phi0), norm(Sphi @ psi1 - phi1)))
    add("FB228-Spsi-maps-phi", max(norm(Spsi @ phi0 - psi0), norm(Spsi @ phi1 - psi1)))
    add("FB228-Sphi-Spsi-inverse", norm(Sphi @ Spsi - IDENTITY))
    add("FB228-metrics-hermitian", max(norm(Sphi - dag(Sphi)), norm(Spsi - dag(Spsi))))
    worst = max(
        -np.linalg.eigvalsh(S)[0] / np.linalg.eigvalsh(S)[-1] for S in (Sphi, Spsi)
    )
    rep.add("FB228-metrics-positive", worst, -t, **context)
    add("FB229-intertwining-Spsi", norm(Spsi @ N - Nd @ Spsi))
    add("FB229-intertwining-Sphi", norm(Sphi @ Nd - N @ Sphi))
    Tinv = np.linalg.inv(T)
    add("FB230-a-similarity", norm(a - T @ c @ Tinv))
    add("FB230-b-similarity", norm(b - T @ dag(c) @ Tinv))
    add("FB230-c-CAR", norm(anticommutator(c, dag(c)) - IDENTITY))
    add("FB230-c-nilpotent", norm(c @ c))
    add("FB230-T-hermitian", norm(T - dag(T)))
    N0 = dag(c) @ c
    add("FB231-number-similarity", norm(N - T @ N0 @ Tinv))
    e0, e1 = sys.e
    add("FB231-e-orthonormal", float(np.max(np.abs(np.array([[np.vdot(x, y) for y in (e0, e1)] for x in (e0, e1)]) - IDENTITY))))
    if hamiltonian is not None and Omega is not None:
        h = hermitized(sys, hamiltonian)
        add("FB230-hermitian-similarity", norm(h - (Omega * (N0 - 0.5 * IDENTITY) + gamma * IDENTITY)))
        if abs(complex(Omega).imag) + abs(complex(gamma).imag) == 0:
            add("FB230-h-hermitian", norm(h - dag(h)))
    return rep


def h_dg(r: float, s: float, t: float, theta: float = 0.0, phi: float = 0.0) -> np.ndarray:
    for name, v in (("r", r), ("s", s), ("t", t)):
        if not np.isreal(v) or v == 0:
            raise ValueError(f"H_DG requires real non-zero {name}, got {v!r}")
    for name, v in (("theta", theta), ("phi", phi)):
        if not np.isreal(v):
            raise ValueError(f"H_DG requires real {name}, got {v!r}")
    return np.array(
        [[r * cmath.exp(1j * theta), s * cmath.exp(1j * phi)],
         [t * cmath.exp(-1j * phi), r * cmath.exp(-1j * theta)]]
    )


def h_gmm(eps1: float, eps2: float, gamma1: float, gamma2: float, nu0: complex) -> np.ndarray:
    for name, v in (("gamma1", gamma1), ("gamma2", gamma2)):
        if not (np.isreal(v) and v > 0):
            raise ValueError(f"H_GMM requires {name} > 0, got {v!r}")
    for name, v in (("eps1", eps1), ("eps2", eps2)):
        if not np.isreal(v):
            raise ValueError(f"H_GMM requires real {name}, got {v!r}")
    return np.array([[eps1 - 1j * gamma1, nu0], [nu0, eps2 - 1j * gamma2]], dtype=complex)


def h_mo(E: float, theta: complex, phi: complex) -> np.ndarray:
    if not np.isreal(E):
        raise ValueError(f"H_MO requires real E, got {E!r}")
    for name, v in (("theta", theta), ("phi", phi)):
        if not 0 <= complex(v).real < math.pi:
            raise ValueError(f"H_MO requires Re({name}) in [0, pi), got {v!r}")
    theta, phi = complex(theta), complex(phi)
    return E * np.array(
        [[cmath.cos(theta), cmath.exp(-1j * phi) * cmath.sin(theta)],
         [cmath.exp(1j * phi) * cmath.sin(theta), -cmath.cos(theta)]]
    )


MODELS = {"DG": h_dg, "GMM": h_gmm, "MO": h_mo}


def model_hamiltonian(kind: str, params: dict) -> np.ndarray:
    """Build one of the 2x2 model Hamiltonians ``DG``, ``GMM`` or ``MO``."""
    try:
        builder = MODELS[kind.upper()]
    except KeyError:
        raise ValueError(f"unknown model {kind!r}; expected one of {sorted(MODELS)}") from None
    return builder(**params)


def pf_from_hamiltonian(H, tol: TolerancePolicy = DEFAULT_GAP_TOL):
    """Pseudo-fermion pair diagonalizing a 2x2 Hamiltonian.

    ``H = Omega (b a - 1/2) + gamma`` with ``Omega = lambda_1 - lambda_0`` and
    ``gamma`` the mean eigenvalue; ``a = |r_0><l_1|``, ``b = |r_1><l_0|``.
    Returns ``(PfSystem, Omega, gamma)``.
    """
    H = as_operator(H)
    if H.shape != (2, 2):
        raise ValueError("pf_from_hamiltonian needs a 2x2 matrix")
    w, right, left = eig_biorthogonal(H, tol)
    a = np.outer(right[0], left[1].conj())
    b = np.outer(right[1], left[0].conj())
    Omega = complex(w[1] - w[0])
    gamma = complex(0.5 * (w[0] + w[1]))
    return pf_system(PfPair(a, b)), Omega, gamma


__all__ = [
    "DefectiveMatrix",
    "ExceptionalPoint",
    "HeffParams",
    "PfPair",
    "PfSystem",
    "h_dg",
    "h_gmm",
    "h_mo",
    "heff_build",
    "hermitized",
    "model_hamiltonian",
    "pf_from_hamiltonian",
    "pf_system",
    "pf_verify",
]
