"""Dense complex linear algebra used by every operator system in the package.

Operators and kets are plain numpy arrays (``complex128``); ``as_operator`` and
``as_ket`` validate shape and finiteness, and the JSON helpers implement the
``{"dim": d, "data": [[re, im], ...]}`` exchange format.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "DefectiveMatrix",
    "NotPositiveDefinite",
    "TolerancePolicy",
    "anticommutator",
    "as_ket",
    "as_operator",
    "commutator",
    "dag",
    "eig_biorthogonal",
    "herm_inv_sqrt",
    "herm_sqrt",
    "ket_from_json",
    "ket_to_json",
    "norm",
    "null_space",
    "operator_from_json",
    "operator_to_json",
    "random_conditioned",
]


class DefectiveMatrix(np.linalg.LinAlgError):
    """Raised when eigenvalues are too close for a biorthogonal eigenbasis."""


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Raised by ``herm_sqrt`` on non-Hermitian or non-positive input."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Relative tolerance, optionally scaled by a condition estimate.

    The effective threshold is ``base_rtol * max(1, kappa)`` when
    ``condition_scale`` is on, ``base_rtol`` otherwise.
    """

    base_rtol: float = 1e-10
    condition_scale: bool = False
    machine_eps: float = float(np.finfo(float).eps)

    def __post_init__(self):
        if not self.base_rtol > 0:
            raise ValueError(f"base_rtol must be positive, got {self.base_rtol}")

    def threshold(self, kappa: float = 1.0) -> float:
        if self.condition_scale:
            return self.base_rtol * max(1.0, float(kappa))
        return self.base_rtol


DEFAULT_TOL = TolerancePolicy()


def as_operator(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"operator must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    return A


def as_ket(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.shape[0] == 0:
        raise ValueError(f"ket must be a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("ket has non-finite entries")
    return v


def dag(A: np.ndarray) -> np.ndarray:
    return np.conj(A).T


def commutator(A, B):
    return A @ B - B @ A


def anticommutator(A, B):
    return A @ B + B @ A


def norm(A) -> float:
    """Spectral norm for matrices, Euclidean norm for vectors."""
    A = np.asarray(A)
    if A.ndim == 1:
        return float(np.linalg.norm(A))
    return float(np.linalg.norm(A, 2))


def null_space(A, tol: TolerancePolicy = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthonormal basis of the numerical null space of ``A``.

    Singular values below ``tol.threshold() * sigma_max`` count as zero. An
    all-zero matrix returns the full standard basis.
    """
    A = as_operator(A)
    n = A.shape[0]
    _, s, vh = np.linalg.svd(A)
    smax = s[0]
    if smax == 0.0:
        return [np.eye(n, dtype=complex)[:, k] for k in range(n)]
    cutoff = tol.threshold() * smax
    rank = int(np.sum(s > cutoff))
    return [np.conj(vh[k]) for k in range(rank, n)]


def _check_hermitian_pd(P, tol: TolerancePolicy):
    P = as_operator(P)
    scale = norm(P)
    asym = norm(P - dag(P))
    if asym > tol.threshold() * max(scale, tol.machine_eps):
        raise NotPositiveDefinite(f"matrix is not Hermitian: |P - P^H| = {asym:.3e}")
    w, V = np.linalg.eigh(0.5 * (P + dag(P)))
    if w[-1] <= 0 or w[0] <= tol.threshold() * w[-1]:
        raise NotPositiveDefinite(
            f"matrix is not positive definite: eigenvalue {w[0]:.6e} (largest {w[-1]:.6e})"
        )
    return w, V


def herm_sqrt(P, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a Hermitian positive definite matrix."""
    w, V = _check_hermitian_pd(P, tol)
    return (V * np.sqrt(w)) @ dag(V)


def herm_inv_sqrt(P, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    w, V = _check_hermitian_pd(P, tol)
    return (V / np.sqrt(w)) @ dag(V)


def eig_biorthogonal(A, tol: TolerancePolicy = DEFAULT_TOL):
    """Biorthonormal eigensystem of a diagonalizable matrix.

    Returns ``(eigenvalues, right, left)`` where ``right[k]`` has unit norm,
    ``A^H left[k] = conj(lambda_k) left[k]`` and ``<left[j], right[k]> = delta_jk``.
    Eigenvalues are sorted by real part, then imaginary part.

    Raises
    ------
    DefectiveMatrix
        If two eigenvalues are closer than ``tol.threshold() * ||A||``.
    """
    A = as_operator(A)
    scale = norm(A)
    w, R = scipy.linalg.eig(A)
    order = np.lexsort((w.imag, w.real))
    w, R = w[order], R[:, order]
    n = len(w)
    gap_tol = tol.threshold() * max(scale, tol.machine_eps)
    for j in range(n):
        for k in range(j + 1, n):
            if abs(w[j] - w[k]) <= gap_tol:
                raise DefectiveMatrix(
                    f"eigenvalues {w[j]:.6g} and {w[k]:.6g} are not separated "
                    f"(gap {abs(w[j] - w[k]):.3e} <= {gap_tol:.3e})"
                )
    R = R / np.linalg.norm(R, axis=0)
    # rows of R^{-1} are the dual functionals, i.e. the conjugated left vectors
    L = dag(np.linalg.inv(R))
    return w, [R[:, k] for k in range(n)], [L[:, k] for k in range(n)]


def random_conditioned(n: int, rng: np.random.Generator, kappa: float) -> np.ndarray:
    """Random complex ``n x n`` matrix with unit norm and condition number ``kappa``.

    Singular vectors come from a complex Gaussian draw; singular values are
    log-uniform in ``[1/kappa, 1]`` with both endpoints pinned.
    """
    if kappa < 1:
        raise ValueError(f"kappa must be >= 1, got {kappa}")
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    U, _, Vh = np.linalg.svd(G)
    if n == 1:
        s = np.array([1.0])
    else:
        inner = np.sort(rng.uniform(0.0, np.log(kappa), size=n - 2))[::-1]
        s = np.exp(np.concatenate([[np.log(kappa)], inner, [0.0]]) - np.log(kappa))
    return (U * s) @ Vh


def _pairs(values) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.ravel(values)]


def _from_pairs(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("data must be a list of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def operator_to_json(A) -> dict:
    A = as_operator(A)
    return {"dim": int(A.shape[0]), "data": _pairs(A)}


def operator_from_json(obj: dict) -> np.ndarray:
    d = int(obj["dim"])
    flat = _from_pairs(obj["data"])
    if d <= 0 or flat.size != d * d:
        raise ValueError(f"operator data has {flat.size} entries, expected dim^2 = {d * d}")
    return as_operator(flat.reshape(d, d))


def ket_to_json(v) -> dict:
    v = as_ket(v)
    return {"dim": int(v.shape[0]), "data": _pairs(v)}


def ket_from_json(obj: dict) -> np.ndarray:
    d = int(obj["dim"])
    v = _from_pairs(obj["data"])
    if v.size != d:
        raise ValueError(f"ket data has {v.size} entries, expected dim = {d}")
    return as_ket(v)
