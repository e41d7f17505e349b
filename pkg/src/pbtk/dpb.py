"""Regular pseudo-bosons on a truncated Fock space, and their bi-coherent states.

A bounded similarity ``S`` maps the truncated boson pair ``(c, c^dag)`` to
``a = S c S^{-1}``, ``b = S c^dag S^{-1}``. The biorthogonal families are
``phi_n = S e_n`` and ``Psi_n = (S^{-1})^dag e_n`` and the metric is
``Theta = (S S^dag)^{-1}``, the operator that actually maps ``phi_n`` to
``Psi_n``. Identities that involve raising are only asserted below the
truncation edge ``n < N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .numkernel import TolerancePolicy, as_operator, commutator, dag, norm, random_conditioned
from .report import VerificationReport

KAPPA_MAX = 1e4


@dataclass(frozen=True)
class TruncatedFock:
    cutoff: int

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def c(self) -> np.ndarray:
        return np.diag(np.sqrt(np.arange(1, self.dim, dtype=float)), k=1).astype(complex)

    def ccr_defect(self) -> np.ndarray:
        """``[c, c^dag] - 1``, which is ``-(N+1) |e_N><e_N|`` exactly."""
        d = np.zeros((self.dim, self.dim), dtype=complex)
        d[-1, -1] = -self.dim
        return d


@dataclass(frozen=True)
class DpbSystem:
    fock: TruncatedFock
    S: np.ndarray
    a: np.ndarray
    b: np.ndarray
    phi: np.ndarray  # columns phi_0 .. phi_N
    psi: np.ndarray  # columns Psi_0 .. Psi_N
    Theta: np.ndarray
    N_op: np.ndarray
    kappa: float

    @property
    def cutoff(self) -> int:
        return self.fock.cutoff


def similarity_from_spec(spec: dict, cutoff: int) -> np.ndarray:
    """Build ``S`` from a config description.

    Supported kinds: ``identity``; ``diagonal`` with ``entries`` (list of
    reals/complex, or ``{"geometric": q}`` for ``q**n``); ``random`` with
    ``seed`` and ``kappa`` (exact condition number); ``explicit`` with an
    operator JSON ``matrix`` or nested list.
    """
    n = cutoff + 1
    kind = spec.get("kind", "identity")
    if kind == "identity":
        return np.eye(n, dtype=complex)
    if kind == "diagonal":
        entries = spec["entries"]
        if isinstance(entries, dict):
            entries = [entries["geometric"] ** k for k in range(n)]
        if len(entries) != n:
            raise ValueError(f"diagonal S needs {n} entries, got {len(entries)}")
        return np.diag(np.asarray(entries, dtype=complex))
    if kind == "random":
        rng = np.random.default_rng(spec.get("seed", 0))
        return random_conditioned(n, rng, float(spec.get("kappa", 10.0)))
    if kind == "explicit":
        from .numkernel import operator_from_json

        m = spec["matrix"]
        S = operator_from_json(m) if isinstance(m, dict) else as_operator(m)
        if S.shape != (n, n):
            raise ValueError(f"explicit S must be {n}x{n}, got {S.shape}")
        return S
    raise ValueError(f"unknown S kind {kind!r}")


def dpb_build(S, cutoff: int, kappa_max: float = KAPPA_MAX) -> DpbSystem:
    """Pseudo-bosonic system for an explicit matrix or a description dict ``S``."""
    if isinstance(S, dict):
        S = similarity_from_spec(S, cutoff)
    S = as_operator(S)
    fock = TruncatedFock(cutoff)
    if S.shape != (fock.dim, fock.dim):
        raise ValueError(f"S must be {fock.dim}x{fock.dim} for cutoff {cutoff}, got {S.shape}")
    kappa = float(np.linalg.cond(S))
    if not np.isfinite(kappa) or kappa > kappa_max:
        raise np.linalg.LinAlgError(f"S is singular or too ill-conditioned (kappa = {kappa:.3e} > {kappa_max:.1e})")
    Sinv = np.linalg.inv(S)
    c = fock.c
    a = S @ c @ Sinv
    b = S @ dag(c) @ Sinv
    psi = dag(Sinv)
    Theta = psi @ dag(psi)
    Theta = 0.5 * (Theta + dag(Theta))
    return DpbSystem(fock, S, a, b, S.copy(), psi, Theta, b @ a, kappa)


def _colnorms(X):
    return np.linalg.norm(X, axis=0)


def dpb_verify(sys: DpbSystem, tol: TolerancePolicy = TolerancePolicy(), **context) -> VerificationReport:
    """Biorthogonality, ladder table, metric and commutator identities.

    Residuals are relative (per-vector or per-operator scale); tolerances are
    ``tau * kappa`` for single-similarity identities and ``tau * kappa^2``
    where the metric enters.
    """
    N = sys.cutoff
    n = N + 1
    phi, psi, a, b, Theta = sys.phi, sys.psi, sys.a, sys.b, sys.Theta
    I = np.eye(n)
    k = sys.kappa
    t1, t2 = tol.threshold() * k, tol.threshold() * k**2
    ctx = dict(cutoff=N, kappa=round(k, 6), **context)
    rep = VerificationReport()
    rep.add("A4-biorthogonality", float(np.max(np.abs(dag(phi) @ psi - I))), t1, **ctx)
    sq = np.sqrt(np.arange(n, dtype=float))
    pn = _colnorms(phi)
    low = a @ phi[:, 1:] - phi[:, :-1] * sq[1:]
    up = b @ phi[:, :-1] - phi[:, 1:] * sq[1:]
    rep.add("A3-lowering-phi", float(np.max(_colnorms(low) / pn[1:], initial=0.0)), t1, **ctx)
    rep.add("A3-vacuum-phi", norm(a @ phi[:, 0]) / pn[0], t1, **ctx)
    rep.add("A3-raising-phi", float(np.max(_colnorms(up) / pn[1:], initial=0.0)), t1, **ctx)
    qn = _colnorms(psi)
    ad, bd = dag(a), dag(b)
    rep.add("A3-raising-psi", float(np.max(_colnorms(ad @ psi[:, :-1] - psi[:, 1:] * sq[1:]) / qn[1:], initial=0.0)), t1, **ctx)
    rep.add("A3-lowering-psi", float(np.max(_colnorms(bd @ psi[:, 1:] - psi[:, :-1] * sq[1:]) / qn[1:], initial=0.0)), t1, **ctx)
    rep.add("A3-vacuum-psi", norm(bd @ psi[:, 0]) / qn[0], t1, **ctx)
    ks = np.arange(n, dtype=float)
    rep.add("A3-number-phi", float(np.max(_colnorms(sys.N_op @ phi - phi * ks) / pn)), t1, **ctx)
    rep.add("A3-number-psi", float(np.max(_colnorms(dag(sys.N_op) @ psi - psi * ks) / qn)), t1, **ctx)
    Sinv = np.linalg.inv(sys.S)
    c = sys.fock.c
    rep.add("a5a-lowering-similarity", norm(Sinv @ a @ sys.S - c) / math.sqrt(max(N, 1)), t1, **ctx)
    rep.add("a5a-raising-similarity", norm(Sinv @ b @ sys.S - dag(c)) / math.sqrt(max(N, 1)), t1, **ctx)
    if N > 0:
        comm = commutator(a, b)
        guarded = comm @ phi[:, :-1] - phi[:, :-1]
        rep.add("A1-commutator-guarded", float(np.max(_colnorms(guarded) / pn[:-1])), t1, **ctx)
    edge = commutator(a, b) - I - sys.S @ sys.fock.ccr_defect() @ Sinv
    rep.add("A1-commutator-edge-defect", norm(edge) / n, t1, **ctx)
    tn = norm(Theta)
    rep.add("Theta-maps-phi-to-psi", float(np.max(_colnorms(Theta @ phi - psi) / qn)), t2, **ctx)
    rep.add("add3-Theta-sum", norm(Theta - psi @ dag(psi)) / tn, t2, **ctx)
    Tinv_sum = phi @ dag(phi)
    rep.add("add3-Theta-inverse-sum", norm(Theta @ Tinv_sum - I), t2, **ctx)
    w = np.linalg.eigvalsh(Theta)
    rep.add("Theta-hermitian", norm(Theta - dag(Theta)) / tn, t2, **ctx)
    rep.add("Theta-positive", -w[0] / w[-1], -tol.machine_eps, **ctx)
    return rep


def dpb_theta_conjugacy(sys: DpbSystem, tol: TolerancePolicy = TolerancePolicy(), n_samples: int = 100, seed: int = 0, **context) -> VerificationReport:
    """``a = Theta^{-1} b^dag Theta``, ``N = Theta^{-1} N^dag Theta`` and ``<f, Theta f> > 0``."""
    Theta = sys.Theta
    Tinv = np.linalg.inv(Theta)
    k = sys.kappa
    t2 = tol.threshold() * k**2
    ctx = dict(cutoff=sys.cutoff, kappa=round(k, 6), **context)
    rep = VerificationReport()
    rep.add("Theta-conjugacy-a-bdag", norm(sys.a - Tinv @ dag(sys.b) @ Theta) / max(1.0, norm(sys.a)), t2, **ctx)
    Nd = dag(sys.N_op)
    rep.add("Theta-intertwining-N", norm(sys.N_op - Tinv @ Nd @ Theta) / max(1.0, norm(sys.N_op)), t2, **ctx)
    rng = np.random.default_rng(seed)
    n = sys.fock.dim
    F = rng.standard_normal((n, n_samples)) + 1j * rng.standard_normal((n, n_samples))
    quad = np.einsum("ij,ij->j", F.conj(), Theta @ F)
    ratio = quad.real / _colnorms(F) ** 2
    # residual is -min <f, Theta f>/|f|^2: negative means every sample is positive
    rep.add("Theta-positivity-samples", float(-np.min(ratio)), 0.0, **ctx)
    rep.add("Theta-quadratic-form-real", float(np.max(np.abs(quad.imag) / np.abs(quad))), t2, **ctx)
    return rep


@dataclass(frozen=True)
class BiCoherent:
    z: complex
    K: int
    phi_z: np.ndarray
    psi_z: np.ndarray


def _series_weights(z: complex, K: int) -> np.ndarray:
    """``e^{-|z|^2/2} z^k / sqrt(k!)`` for ``k <= K``, evaluated in log space."""
    if z == 0:
        w = np.zeros(K + 1, dtype=complex)
        w[0] = 1.0
        return w
    k = np.arange(K + 1)
    logs = k * np.log(abs(z)) - 0.5 * special.gammaln(k + 1) - 0.5 * abs(z) ** 2
    return np.exp(logs) * np.exp(1j * k * np.angle(z))


def bicoherent(sys: DpbSystem, z: complex, K: int | None = None) -> BiCoherent:
    """Truncated bi-coherent pair ``e^{-|z|^2/2} sum_{k<=K} z^k/sqrt(k!) (phi_k, Psi_k)``."""
    N = sys.cutoff
    K = N if K is None else K
    if not 0 <= K <= N:
        raise ValueError(f"series order K={K} must lie in [0, cutoff={N}]")
    w = _series_weights(complex(z), K)
    return BiCoherent(complex(z), K, sys.phi[:, : K + 1] @ w, sys.psi[:, : K + 1] @ w)


def eigen_residual_formula(sys: DpbSystem, z: complex, K: int) -> float:
    """Closed form of ``||a phi(z) - z phi(z)||`` for the order-K series."""
    r = abs(z)
    if r == 0:
        return 0.0
    logv = -0.5 * r * r + (K + 1) * math.log(r) - 0.5 * special.gammaln(K + 1)
    return math.exp(logv) * float(np.linalg.norm(sys.phi[:, K]))


def overlap_formula(z: complex, K: int) -> float:
    """``<Psi(z), phi(z)> = e^{-|z|^2} sum_{k<=K} |z|^{2k}/k! = Q(K+1, |z|^2)``."""
    return float(special.gammaincc(K + 1, abs(z) ** 2))


def tail_bound(cutoff: int, R: float) -> float:
    """``max_k Gamma(k+1, R^2)/k!`` over ``k <= cutoff`` (attained at ``k = cutoff``)."""
    return float(special.gammaincc(cutoff + 1, R * R))


def default_radius(cutoff: int, target: float = 1e-10) -> float:
    """Smallest R with ``Gamma(N+1, R^2)/N! < target``."""
    f = lambda R: special.gammaincc(cutoff + 1, R * R) - target
    hi = math.sqrt(cutoff + 1) + 2.0
    while f(hi) > 0:
        hi *= 1.5
    return float(optimize.brentq(f, 0.0, hi, xtol=1e-12)) * (1 + 1e-9)


def bicoherent_resolution(sys: DpbSystem, R: float | None = None, n_r: int = 200, n_theta: int | None = None):
    """``(1/pi) int |phi(z)><Psi(z)| d^2z`` over the disc ``|z| <= R``.

    Gauss-Legendre in the radius (Jacobian ``r dr`` folded into the weights)
    and the uniform trapezoid rule in the angle. Returns ``(Q, deviation)``
    with ``deviation = ||Q - 1||`` (spectral norm).
    """
    N = sys.cutoff
    R = default_radius(N) if R is None else float(R)
    n_theta = 4 * N + 4 if n_theta is None else int(n_theta)
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * R * (x + 1.0)
    wr = 0.5 * R * wx * r
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    wt = 2 * np.pi / n_theta
    k = np.arange(N + 1)
    logfact = 0.5 * special.gammaln(k + 1)
    # radial part of the coefficient of |phi_j><Psi_k| is separable from the angle
    logr = np.log(r)  # Gauss-Legendre nodes are interior, r > 0
    radial = np.exp(np.outer(logr, k) - logfact - 0.5 * (r**2)[:, None])  # (n_r, N+1)
    angular = np.exp(1j * np.outer(theta, k))  # (n_theta, N+1)
    # C[j, l] = sum over nodes of w * coef_j(z) * conj(coef_l(z))
    Rr = np.einsum("r,rj,rl->jl", wr, radial, radial)
    At = wt * (angular.T @ angular.conj())
    C = Rr * At / np.pi
    Q = sys.phi @ C @ dag(sys.psi)
    dev = norm(Q - np.eye(N + 1))
    return Q, dev


@dataclass(frozen=True)
class NormGrowthFit:
    r_phi: float
    alpha_phi: float
    r_psi: float
    alpha_psi: float
    residual: float
    n_min: int
    n_max: int

    @property
    def bounded(self) -> bool:
        """Whether both fitted exponents are below one half."""
        return self.alpha_phi < 0.5 and self.alpha_psi < 0.5


def norm_table(sys: DpbSystem) -> list[tuple[int, float, float]]:
    return [(n, float(p), float(q)) for n, p, q in zip(range(sys.cutoff + 1), _colnorms(sys.phi), _colnorms(sys.psi))]


def norm_growth_fit(sys: DpbSystem, n_min: int = 1, n_max: int | None = None, guard: int = 1) -> NormGrowthFit:
    """Least-squares fit of ``log ||phi_n|| = n log r + alpha log n!`` (and for Psi)."""
    N = sys.cutoff
    n_max = N - guard if n_max is None else n_max
    if n_max > N - guard:
        raise ValueError(f"n_max={n_max} exceeds cutoff - guard = {N - guard}")
    if n_max - n_min < 1:
        raise ValueError("fit range needs at least two points")
    n = np.arange(n_min, n_max + 1)
    X = np.column_stack([n, special.gammaln(n + 1)])
    out = []
    res = 0.0
    for F in (sys.phi, sys.psi):
        y = np.log(_colnorms(F)[n])
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        res = max(res, float(np.sqrt(np.mean((X @ coef - y) ** 2))))
        out.append((math.exp(coef[0]), float(coef[1])))
    return NormGrowthFit(out[0][0], out[0][1], out[1][0], out[1][1], res, int(n_min), int(n_max))


__all__ = [
    "BiCoherent",
    "DpbSystem",
    "NormGrowthFit",
    "TruncatedFock",
    "bicoherent",
    "bicoherent_resolution",
    "default_radius",
    "dpb_build",
    "dpb_theta_conjugacy",
    "dpb_verify",
    "eigen_residual_formula",
    "norm_growth_fit",
    "norm_table",
    "overlap_formula",
    "similarity_from_spec",
    "tail_bound",
]
