"""Extended pseudo-fermions on an (M+1)-dimensional space.

Starting from any linearly independent family ``h_0, ..., h_M`` (the columns
of ``EpfBasis.h``), the lowering/raising operators act as a truncated boson
pair on that family::

    a h_k = sqrt(k) h_{k-1},    b h_k = sqrt(k+1) h_{k+1},    b h_M = 0.

The anticommutator is then ``{a, b} = sum_k alpha_k |h_k><g_k|`` with
``alpha = (1, 3, 5, ..., 2M-1, M)``; only ``M = 1`` gives the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkernel import (
    TolerancePolicy,
    anticommutator,
    as_operator,
    dag,
    herm_sqrt,
    norm,
    null_space,
    random_conditioned,
)
from .report import VerificationReport

# metric identities degrade like kappa^2 beyond this basis condition number
CONDITION_WARN = 1e6


@dataclass(frozen=True)
class EpfBasis:
    h: np.ndarray  # columns h_0 .. h_M

    def __post_init__(self):
        h = as_operator(self.h)
        object.__setattr__(self, "h", h)

    @property
    def M(self) -> int:
        return self.h.shape[0] - 1

    @property
    def kappa(self) -> float:
        return float(np.linalg.cond(self.h))

    def vectors(self) -> list[np.ndarray]:
        return [self.h[:, k] for k in range(self.M + 1)]

    @classmethod
    def standard(cls, M: int) -> "EpfBasis":
        return cls(np.eye(M + 1, dtype=complex))

    @classmethod
    def random(cls, M: int, rng: np.random.Generator, kappa_max: float = 1e3) -> "EpfBasis":
        """Complex Gaussian basis, redrawn until ``cond <= kappa_max``.

        After 100 rejected draws the singular values are clipped instead.
        """
        n = M + 1
        for _ in range(100):
            h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            if np.linalg.cond(h) <= kappa_max:
                return cls(h)
        return cls(random_conditioned(n, rng, kappa_max))

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "vectors": [[[float(z.real), float(z.imag)] for z in v] for v in self.vectors()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EpfBasis":
        M = int(obj["M"])
        vecs = np.asarray(obj["vectors"], dtype=float)
        if vecs.shape != (M + 1, M + 1, 2):
            raise ValueError(f"EpfBasis with M={M} needs {M + 1} vectors of length {M + 1}")
        return cls((vecs[..., 0] + 1j * vecs[..., 1]).T)


@dataclass(frozen=True)
class EpfSystem:
    basis: EpfBasis
    g: np.ndarray  # columns g_0 .. g_M
    a: np.ndarray
    b: np.ndarray
    N: np.ndarray
    Sh: np.ndarray
    Sg: np.ndarray
    n_sa: np.ndarray
    c: np.ndarray  # columns c_0 .. c_M, orthonormal
    alpha: np.ndarray

    @property
    def M(self) -> int:
        return self.basis.M


def _check_basis(basis: EpfBasis, tol: TolerancePolicy):
    s = np.linalg.svd(basis.h, compute_uv=False)
    if not s[-1] > tol.threshold() * s[0]:
        raise np.linalg.LinAlgError(
            f"basis vectors are not linearly independent (singular values {s[0]:.3e} .. {s[-1]:.3e})"
        )


def _ladder_matrices(M: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowering/raising matrices in the coordinates of the basis itself."""
    a0 = np.diag(np.sqrt(np.arange(1, M + 1, dtype=float)), k=1).astype(complex)
    return a0, a0.T.copy()


def epf_dual(basis: EpfBasis, tol: TolerancePolicy = TolerancePolicy()) -> np.ndarray:
    """Biorthogonal family ``g`` (columns), ``<g_j, h_k> = delta_jk``."""
    _check_basis(basis, tol)
    return dag(np.linalg.inv(basis.h))


def epf_dual_iterative(basis: EpfBasis, tol: TolerancePolicy = TolerancePolicy()) -> np.ndarray:
    """Dual family by the ladder iteration.

    ``g_0`` spans the orthogonal complement of ``h_1 .. h_M`` and is scaled so
    that ``<g_0, h_0> = 1``; then ``g_k = a^dag g_{k-1} / sqrt(k)``.
    """
    _check_basis(basis, tol)
    h = basis.h
    M = basis.M
    if M == 0:
        return h / np.vdot(h[:, 0], h[:, 0])
    # vectors orthogonal to h_1..h_M are the kernel of the matrix with rows h_k^H
    ker = null_space(np.vstack([dag(h[:, 1:]), np.zeros((1, M + 1))]), tol)
    g0 = ker[0]
    g0 = g0 / np.conj(np.vdot(g0, h[:, 0]))
    a, _ = epf_ladder(basis, tol)
    ad = dag(a)
    g = [g0]
    for k in range(1, M + 1):
        g.append(ad @ g[-1] / math.sqrt(k))
    return np.column_stack(g)


def epf_ladder(basis: EpfBasis, tol: TolerancePolicy = TolerancePolicy()) -> tuple[np.ndarray, np.ndarray]:
    """``a = sum_k sqrt(k) |h_{k-1}><g_k|`` and ``b = sum_k sqrt(k+1) |h_{k+1}><g_k|``."""
    g = epf_dual(basis, tol)
    h = basis.h
    a0, b0 = _ladder_matrices(basis.M)
    return h @ a0 @ dag(g), h @ b0 @ dag(g)


def epf_system(basis: EpfBasis, tol: TolerancePolicy = TolerancePolicy()) -> EpfSystem:
    g = epf_dual(basis, tol)
    h = basis.h
    a, b = epf_ladder(basis, tol)
    N = b @ a
    Sh = h @ dag(h)
    Sg = g @ dag(g)
    exact = TolerancePolicy(1e-15)
    root_g = herm_sqrt(_hermitian_part(Sg), exact)
    n_sa = root_g @ N @ herm_sqrt(_hermitian_part(Sh), exact)
    c = root_g @ h
    sys = EpfSystem(basis, g, a, b, N, Sh, Sg, n_sa, c, np.zeros(basis.M + 1))
    return EpfSystem(basis, g, a, b, N, Sh, Sg, n_sa, c, _extract_alpha(sys))


def _hermitian_part(A):
    return 0.5 * (A + dag(A))


def _extract_alpha(sys: EpfSystem) -> np.ndarray:
    h = sys.basis.h
    ab_h = sys.a @ (sys.b @ h) + sys.b @ (sys.a @ h)
    return np.einsum("ik,ik->k", sys.g.conj(), ab_h).real


def alpha_law(M: int) -> np.ndarray:
    """Closed form ``(1, 3, ..., 2M-1, M)``; ``(0,)`` for ``M = 0``."""
    if M == 0:
        return np.zeros(1)
    return np.array([2 * k + 1 for k in range(M)] + [M], dtype=float)


def epf_anticommutator(sys: EpfSystem, tol: TolerancePolicy = TolerancePolicy(), **context):
    """Coefficients ``alpha_k = <g_k, {a,b} h_k>`` plus their checks.

    Returns ``(alpha, report)``. The report checks the vanishing of the
    off-diagonal pairings ``<g_j, {a,b} h_k>``, the operator expansion
    ``{a,b} = sum_k alpha_k |h_k><g_k|`` and the closed law for ``alpha``.
    """
    M = sys.M
    h, g = sys.basis.h, sys.g
    ab = anticommutator(sys.a, sys.b)
    # act on the basis vectors before pairing; forming {a,b} first costs a
    # factor kappa in accuracy
    pairing = dag(g) @ (sys.a @ (sys.b @ h) + sys.b @ (sys.a @ h))
    alpha = np.real(np.diag(pairing)).copy()
    kappa = sys.basis.kappa
    t = tol.threshold() * kappa
    rep = VerificationReport()
    off = pairing - np.diag(np.diag(pairing))
    rep.add("EPF-anticommutator-offdiagonal", float(np.max(np.abs(off), initial=0.0)), t, M=M, **context)
    expansion = h @ np.diag(alpha) @ dag(g)
    rep.add("EPF-anticommutator-expansion", norm(ab - expansion) / max(1.0, norm(ab)), t * kappa, M=M, **context)
    rep.add("EPF-alpha-law", float(np.max(np.abs(np.diag(pairing) - alpha_law(M)))), tol.threshold(), M=M, **context)
    return alpha, rep


def epf_verify(sys: EpfSystem, tol: TolerancePolicy = TolerancePolicy(), **context) -> VerificationReport:
    """All EPF identities, tolerances scaled by the basis condition number.

    Biorthogonality, ladder actions and eigen-equations use ``tau * kappa``;
    metric identities use ``tau * kappa^2`` (the metrics square the
    conditioning). Residuals are relative to the size of the operators
    involved.
    """
    M = sys.M
    h, g = sys.basis.h, sys.g
    a, b, N = sys.a, sys.b, sys.N
    I = np.eye(M + 1)
    kappa = sys.basis.kappa
    t1 = tol.threshold() * kappa
    t2 = tol.threshold() * kappa**2
    ctx = dict(M=M, **context)
    rep = VerificationReport()
    if kappa > CONDITION_WARN:
        rep.warnings.append(f"EPF basis condition number {kappa:.3e} exceeds {CONDITION_WARN:.0e}")
    hn = np.linalg.norm(h, axis=0)
    gn = np.linalg.norm(g, axis=0)
    rep.add("EPF-biorthogonality", float(np.max(np.abs(dag(g) @ h - I))), t1, **ctx)
    ks = np.arange(M + 1)
    sq = np.sqrt(ks)
    lowered = np.column_stack([np.zeros(M + 1)] + [sq[k] * h[:, k - 1] for k in range(1, M + 1)])
    raised = np.column_stack([sq[k + 1] * h[:, k + 1] for k in range(M)] + [np.zeros(M + 1)])
    rep.add("EPF-31-lowering", float(np.max(np.linalg.norm(a @ h - lowered, axis=0) / hn)), t1, **ctx)
    rep.add("EPF-31-raising", float(np.max(np.linalg.norm(b @ h - raised, axis=0) / hn)), t1, **ctx)
    scale_a = max(1.0, norm(a)) ** (M + 1)
    rep.add("EPF-a-nilpotent", norm(np.linalg.matrix_power(a, M + 1)) / scale_a, t1, **ctx)
    rep.add("EPF-b-nilpotent", norm(np.linalg.matrix_power(b, M + 1)) / scale_a, t1, **ctx)
    rep.add("EPF-number-h", float(np.max(np.linalg.norm(N @ h - h * ks, axis=0) / hn)), t1, **ctx)
    rep.add("EPF-number-g", float(np.max(np.linalg.norm(dag(N) @ g - g * ks, axis=0) / gn)), t1, **ctx)
    rep.add("EPF-resolution-gh", norm(g @ dag(h) - I), t1, **ctx)
    rep.add("EPF-resolution-hg", norm(h @ dag(g) - I), t1, **ctx)
    Sh, Sg = sys.Sh, sys.Sg
    rep.add("EPF-Sh-Sg-inverse", norm(Sh @ Sg - I), t2, **ctx)
    rep.add("EPF-Sh-maps-g", float(np.max(np.linalg.norm(Sh @ g - h, axis=0) / hn)), t2, **ctx)
    rep.add("EPF-Sg-maps-h", float(np.max(np.linalg.norm(Sg @ h - g, axis=0) / gn)), t2, **ctx)
    nN = max(1.0, norm(N))
    rep.add("EPF-intertwining-Sg", norm(Sg @ N - dag(N) @ Sg) / (nN * norm(Sg)), t2, **ctx)
    rep.add("EPF-intertwining-Sh", norm(N @ Sh - Sh @ dag(N)) / (nN * norm(Sh)), t2, **ctx)
    rep.add("EPF-n-hermitian", norm(sys.n_sa - dag(sys.n_sa)) / nN, t2, **ctx)
    c = sys.c
    rep.add("EPF-c-orthonormal", float(np.max(np.abs(dag(c) @ c - I))), t2, **ctx)
    rep.add("EPF-n-eigen", float(np.max(np.linalg.norm(sys.n_sa @ c - c * ks, axis=0))), t2, **ctx)
    g_iter = epf_dual_iterative(sys.basis, tol)
    rep.add("EPF-dual-methods-agree", float(np.max(np.abs(g_iter - g)) / np.max(np.abs(g))), t1, **ctx)
    _, anti = epf_anticommutator(sys, tol, **context)
    rep.extend(anti)
    return rep


__all__ = [
    "EpfBasis",
    "EpfSystem",
    "alpha_law",
    "epf_anticommutator",
    "epf_dual",
    "epf_dual_iterative",
    "epf_ladder",
    "epf_system",
    "epf_verify",
]
