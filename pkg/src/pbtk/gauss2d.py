"""Polynomial-times-Gaussian calculus for the two-dimensional non-Hermitian oscillator

    H = (p1^2 + x1^2) + (p2^2 + x2^2 + 2i x2) + 2 eps x1 x2,    p_j = -i d/dx_j.

States are ``P(x) exp(-1/2 x^T Q x - L^T x)`` with a bivariate coefficient
table ``P[m1, m2]``. Differential operators with polynomial coefficients act
exactly on the table, and inner products are closed-form Gaussian moments.

Coefficients can be complex floats (the default) or exact sympy numbers
(``ModelParams(..., exact=True)``); the exact mode exists so that identities
such as vacuum annihilation can be verified with no rounding at all.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import sympy
from scipy import integrate, signal

DEGREE_CAP = 16

# sign convention of the Theta = T^2 translation x -> x + (2i eps beta, -2i beta),
# calibrated once against Theta phi_00 ~ Psi_00 (see tests/test_gauss2d.py)
THETA_SIGNS = (1, 1)


class DegreeCapExceeded(ValueError):
    def __init__(self, needed: int, cap: int):
        super().__init__(f"polynomial degree {needed} exceeds the cap {cap}; raise the cap to at least {needed}")
        self.needed = needed
        self.cap = cap


def _conj(c):
    return c.conjugate() if hasattr(c, "conjugate") else c


def _is_zero(c, exact: bool) -> bool:
    if exact:
        return sympy.simplify(c) == 0
    return c == 0


# ---------------------------------------------------------------------------
# bivariate coefficient tables


def _zeros(shape, like):
    return np.zeros(shape, dtype=like.dtype)


def _pad(P, shape):
    out = _zeros(shape, P)
    out[: P.shape[0], : P.shape[1]] = P
    return out


def _add(P, R):
    shape = (max(P.shape[0], R.shape[0]), max(P.shape[1], R.shape[1]))
    return _pad(P, shape) + _pad(R, shape)


def _mul_x(P, j):
    if j == 0:
        out = _zeros((P.shape[0] + 1, P.shape[1]), P)
        out[1:, :] = P
    else:
        out = _zeros((P.shape[0], P.shape[1] + 1), P)
        out[:, 1:] = P
    return out


def _deriv(P, j):
    if j == 0:
        if P.shape[0] == 1:
            return _zeros(P.shape, P)
        return P[1:, :] * np.arange(1, P.shape[0])[:, None]
    if P.shape[1] == 1:
        return _zeros(P.shape, P)
    return P[:, 1:] * np.arange(1, P.shape[1])[None, :]


def _trim(P):
    nz = np.array([[c != 0 for c in row] for row in P], dtype=bool)
    if not nz.any():
        return P[:1, :1] * 0
    rows = np.flatnonzero(nz.any(axis=1))[-1] + 1
    cols = np.flatnonzero(nz.any(axis=0))[-1] + 1
    return P[:rows, :cols]


def total_degree(P) -> int:
    deg = 0
    for (i, j), c in np.ndenumerate(P):
        if c != 0:
            deg = max(deg, i + j)
    return deg


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class GaussPoly:
    """``P(x) exp(-1/2 x^T Q x - L^T x)``."""

    Q: np.ndarray
    L: np.ndarray
    P: np.ndarray

    @property
    def exact(self) -> bool:
        return self.P.dtype == object

    @property
    def degree(self) -> int:
        return total_degree(self.P)

    def scaled(self, c) -> "GaussPoly":
        return GaussPoly(self.Q, self.L, self.P * c)

    def same_gaussian(self, other: "GaussPoly", rtol: float = 1e-12) -> bool:
        if self.exact or other.exact:
            return all(_is_zero(a - b, True) for a, b in zip(np.ravel(self.Q), np.ravel(other.Q))) and all(
                _is_zero(a - b, True) for a, b in zip(self.L, other.L)
            )
        scale = max(1.0, float(np.max(np.abs(self.Q))), float(np.max(np.abs(self.L))))
        return bool(np.max(np.abs(self.Q - other.Q)) <= rtol * scale and np.max(np.abs(self.L - other.L)) <= rtol * scale)

    def is_zero(self) -> bool:
        return all(_is_zero(c, self.exact) for c in np.ravel(self.P))

    def numeric(self) -> "GaussPoly":
        if not self.exact:
            return self
        conv = lambda A: np.array([complex(sympy.N(c, 30)) for c in np.ravel(A)]).reshape(A.shape)
        return GaussPoly(conv(self.Q), conv(self.L), conv(self.P))

    def __call__(self, x1, x2):
        s = self.numeric()
        x1, x2 = np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
        Q, L = s.Q, s.L
        expo = -0.5 * (Q[0, 0] * x1 * x1 + 2 * Q[0, 1] * x1 * x2 + Q[1, 1] * x2 * x2) - L[0] * x1 - L[1] * x2
        return np.polynomial.polynomial.polyval2d(x1, x2, s.P) * np.exp(expo)

    def to_json(self) -> dict:
        s = self.numeric()
        pair = lambda z: [float(z.real), float(z.imag)]
        return {
            "Q": [[pair(z) for z in row] for row in s.Q],
            "L": [pair(z) for z in s.L],
            "P": [[pair(z) for z in row] for row in _trim(s.P)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GaussPoly":
        cplx = lambda a: np.asarray(a, dtype=float)[..., 0] + 1j * np.asarray(a, dtype=float)[..., 1]
        Q, L, P = cplx(obj["Q"]), cplx(obj["L"]), cplx(obj["P"])
        if Q.shape != (2, 2) or L.shape != (2,) or P.ndim != 2:
            raise ValueError("GaussPoly JSON needs a 2x2 Q, a length-2 L and a 2-D P table")
        return cls(Q, L, P)


def gauss(Q, L=(0, 0), P=((1,),)) -> GaussPoly:
    """Numeric state constructor with the Re(Q) > 0 integrability check."""
    Q = np.asarray(Q, dtype=complex)
    if np.linalg.eigvalsh(0.5 * (Q.real + Q.real.T))[0] <= 0:
        raise ValueError("Re(Q) must be positive definite for a square-integrable state")
    return GaussPoly(Q, np.asarray(L, dtype=complex), np.atleast_2d(np.asarray(P, dtype=complex)))


# ---------------------------------------------------------------------------
# differential operators, normal ordered: coefficient * x1^m1 x2^m2 d1^d1 d2^d2


def _falling(m, k):
    return math.perm(m, k)


@dataclass(frozen=True)
class DiffOp:
    terms: dict = field(default_factory=dict)  # (m1, m2, d1, d2) -> coefficient

    @property
    def order(self) -> int:
        return max((sum(k) for k, c in self.terms.items() if c != 0), default=0)

    @classmethod
    def scalar(cls, c) -> "DiffOp":
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def x(cls, j: int, c=1) -> "DiffOp":
        return cls({(1, 0, 0, 0) if j == 0 else (0, 1, 0, 0): c})

    @classmethod
    def d(cls, j: int, c=1) -> "DiffOp":
        return cls({(0, 0, 1, 0) if j == 0 else (0, 0, 0, 1): c})

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.scalar(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return DiffOp({k: c for k, c in out.items() if not (c == 0)})

    __radd__ = __add__

    def __neg__(self):
        return DiffOp({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, DiffOp) else -other)

    def __rmul__(self, c):
        return DiffOp({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        """Composition ``self . other`` (or scalar multiplication)."""
        if not isinstance(other, DiffOp):
            return other * self
        out: dict = {}
        for (m1, m2, d1, d2), c in self.terms.items():
            for (n1, n2, e1, e2), e in other.terms.items():
                # d^d x^n = sum_k C(d,k) n!/(n-k)! x^(n-k) d^(d-k), per coordinate
                for k1 in range(min(d1, n1) + 1):
                    f1 = math.comb(d1, k1) * _falling(n1, k1)
                    for k2 in range(min(d2, n2) + 1):
                        f2 = math.comb(d2, k2) * _falling(n2, k2)
                        key = (m1 + n1 - k1, m2 + n2 - k2, d1 - k1 + e1, d2 - k2 + e2)
                        v = (f1 * f2) * c * e
                        out[key] = out[key] + v if key in out else v
        return DiffOp(out)

    def adjoint(self) -> "DiffOp":
        """Formal adjoint: ``x_j^dag = x_j``, ``d_j^dag = -d_j``, conjugated coefficients."""
        out = DiffOp()
        for (m1, m2, d1, d2), c in self.terms.items():
            ds = DiffOp({(0, 0, d1, d2): (-1) ** (d1 + d2) * _conj(c)})
            out = out + ds * DiffOp({(m1, m2, 0, 0): 1})
        return out

    def is_zero(self, exact: bool = False, atol: float = 0.0) -> bool:
        if exact:
            return all(_is_zero(c, True) for c in self.terms.values())
        return all(abs(complex(c)) <= atol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(complex(sympy.N(c)) if isinstance(c, sympy.Basic) else complex(c)) for c in self.terms.values()), default=0.0)


def commutator(A: DiffOp, B: DiffOp) -> DiffOp:
    return A * B - B * A


def _apply_d(s: GaussPoly, j: int) -> GaussPoly:
    P = s.P
    grad = _add(_add(s.Q[j, 0] * _mul_x(P, 0), s.Q[j, 1] * _mul_x(P, 1)), s.L[j] * P)
    return GaussPoly(s.Q, s.L, _add(_deriv(P, j), -grad))


def apply_op(op: DiffOp, s: GaussPoly, cap: int = DEGREE_CAP) -> GaussPoly:
    """Exact action of a differential operator on a polynomial-Gaussian state."""
    cache = {(0, 0): s}

    def deriv(d1, d2):
        if (d1, d2) not in cache:
            prev = deriv(d1 - 1, d2) if d1 > 0 else deriv(d1, d2 - 1)
            cache[(d1, d2)] = _apply_d(prev, 0 if d1 > 0 else 1)
        return cache[(d1, d2)]

    out = _zeros((1, 1), s.P)
    for (m1, m2, d1, d2), c in op.terms.items():
        R = deriv(d1, d2).P
        for _ in range(m1):
            R = _mul_x(R, 0)
        for _ in range(m2):
            R = _mul_x(R, 1)
        out = _add(out, c * R)
    out = _trim(out)
    deg = total_degree(out)
    if deg > cap:
        raise DegreeCapExceeded(deg, cap)
    return GaussPoly(s.Q, s.L, out)


# ---------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class ModelParams:
    epsilon: float
    xi: int = 1
    exact: bool = False

    def __post_init__(self):
        if self.xi not in (1, -1):
            raise ValueError(f"xi must be +1 or -1, got {self.xi}")
        if not abs(self.epsilon) < 1:
            raise ValueError(f"|epsilon| must be < 1, got {self.epsilon}")

    # exact mode turns decimal parameters into rationals, 0.4 -> 2/5
    @property
    def eps(self):
        return sympy.Rational(str(self.epsilon)) if self.exact else float(self.epsilon)

    def _sqrt(self, v):
        return sympy.sqrt(v) if self.exact else math.sqrt(v)

    @property
    def s_plus(self):
        return self._sqrt(1 + self.eps * self.xi)

    @property
    def s_minus(self):
        return self._sqrt(1 - self.eps * self.xi)

    @property
    def alpha_plus(self):
        return (self.s_plus + self.s_minus) / 2

    @property
    def alpha_minus(self):
        return (self.s_plus - self.s_minus) / 2

    @property
    def root(self):
        return self._sqrt(1 - self.eps**2)

    @property
    def I(self):
        return sympy.I if self.exact else 1j

    @property
    def k_minus(self):
        return -self.I * self.xi * self.alpha_minus / self.root

    @property
    def k_plus(self):
        return self.I * self.alpha_plus / self.root

    @property
    def beta(self):
        return 1 / (1 - self.eps**2)

    def energy(self, n1: int, n2: int):
        return self.s_plus * (2 * n1 + 1) + self.s_minus * (2 * n2 + 1) + self.beta


def model_ops(p: ModelParams) -> dict[str, DiffOp]:
    """Ladder operators ``a1, a2, b1, b2``, their adjoints and ``H``."""
    xi, I = p.xi, p.I
    quarter = (lambda v: v ** sympy.Rational(1, 4)) if p.exact else (lambda v: v**0.25)
    x1, x2 = DiffOp.x(0), DiffOp.x(1)
    d1, d2 = DiffOp.d(0), DiffOp.d(1)
    sp, sm = p.s_plus, p.s_minus
    c1 = 1 / (2 * quarter(1 + p.eps * xi))
    c2 = 1 / (2 * quarter(1 - p.eps * xi))
    # i p_j = d_j
    a1 = c1 * ((d1 + sp * x1) + xi * (d2 + sp * x2) + I * xi / sp)
    a2 = c2 * ((d1 + sm * x1) - xi * (d2 + sm * x2) - I * xi / sm)
    b1 = c1 * ((-1 * d1 + sp * x1) + xi * (-1 * d2 + sp * x2) + I * xi / sp)
    b2 = c2 * ((-1 * d1 + sm * x1) - xi * (-1 * d2 + sm * x2) - I * xi / sm)
    H = -1 * (d1 * d1) - d2 * d2 + x1 * x1 + x2 * x2 + (2 * I) * x2 + (2 * p.eps) * (x1 * x2)
    ops = {"a1": a1, "a2": a2, "b1": b1, "b2": b2, "H": H}
    for name in ("a1", "a2", "b1", "b2"):
        ops[name + "dag"] = ops[name].adjoint()
    return ops


def ladder_commutators(ops: dict[str, DiffOp]) -> dict[str, DiffOp]:
    """``[a_j, b_k] - delta_jk`` and the commutators that must vanish."""
    one = DiffOp.scalar(1)
    out = {}
    for j, k in product((1, 2), repeat=2):
        c = commutator(ops[f"a{j}"], ops[f"b{k}"])
        out[f"[a{j},b{k}]"] = c - one if j == k else c
    out["[a1,a2]"] = commutator(ops["a1"], ops["a2"])
    out["[b1,b2]"] = commutator(ops["b1"], ops["b2"])
    return out


def _unit_vacua(p: ModelParams) -> tuple[GaussPoly, GaussPoly]:
    xi = p.xi
    dtype = object if p.exact else complex
    Q = np.array([[p.alpha_plus, xi * p.alpha_minus], [xi * p.alpha_minus, p.alpha_plus]], dtype=dtype)
    L = np.array([p.k_minus, p.k_plus], dtype=dtype)
    one = np.array([[sympy.Integer(1) if p.exact else 1.0]], dtype=dtype)
    return GaussPoly(Q, L, one), GaussPoly(Q.copy(), -L, one.copy())


def build_vacua(p: ModelParams) -> tuple[GaussPoly, GaussPoly]:
    """``phi_00`` and ``Psi_00``.

    Gauge: ``phi_00`` has a real positive constant with unit norm, and the
    constant of ``Psi_00`` is fixed by ``<phi_00, Psi_00> = 1``. Exact mode
    returns the unnormalized vacua (constants 1).
    """
    phi, psi = _unit_vacua(p)
    if p.exact:
        return phi, psi
    nphi = 1.0 / math.sqrt(inner(phi, phi).real)
    phi = phi.scaled(nphi)
    return phi, psi.scaled(1.0 / inner(phi, psi))


def excite(p: ModelParams, n1: int, n2: int, vacua=None, ops=None, cap: int = DEGREE_CAP):
    """``phi_{n1,n2}`` and ``Psi_{n1,n2}`` by repeated ladder application."""
    if n1 < 0 or n2 < 0:
        raise ValueError("occupation numbers must be non-negative")
    if n1 + n2 > cap:
        raise DegreeCapExceeded(n1 + n2, cap)
    phi, psi = vacua if vacua is not None else build_vacua(p)
    ops = ops if ops is not None else model_ops(p)
    for _ in range(n2):
        phi = apply_op(ops["b2"], phi, cap)
        psi = apply_op(ops["a2dag"], psi, cap)
    for _ in range(n1):
        phi = apply_op(ops["b1"], phi, cap)
        psi = apply_op(ops["a1dag"], psi, cap)
    norm = math.sqrt(math.factorial(n1) * math.factorial(n2))
    if p.exact:
        norm = sympy.sqrt(math.factorial(n1) * math.factorial(n2))
    return phi.scaled(1 / norm), psi.scaled(1 / norm)


class StateFamily:
    """Cache of ``phi_{n1,n2}``, ``Psi_{n1,n2}`` for one parameter set."""

    def __init__(self, p: ModelParams, cap: int = DEGREE_CAP):
        self.p = p
        self.cap = cap
        self.ops = model_ops(p)
        self.vacua = build_vacua(p)
        self._phi = {(0, 0): self.vacua[0]}
        self._psi = {(0, 0): self.vacua[1]}

    def _build(self, n1, n2):
        if (n1, n2) in self._phi:
            return
        if n1 > 0:
            self._build(n1 - 1, n2)
            prev_phi, prev_psi = self._phi[(n1 - 1, n2)], self._psi[(n1 - 1, n2)]
            op_phi, op_psi, n = self.ops["b1"], self.ops["a1dag"], n1
        else:
            self._build(n1, n2 - 1)
            prev_phi, prev_psi = self._phi[(n1, n2 - 1)], self._psi[(n1, n2 - 1)]
            op_phi, op_psi, n = self.ops["b2"], self.ops["a2dag"], n2
        f = 1 / math.sqrt(n)
        self._phi[(n1, n2)] = apply_op(op_phi, prev_phi, self.cap).scaled(f)
        self._psi[(n1, n2)] = apply_op(op_psi, prev_psi, self.cap).scaled(f)

    def phi(self, n1, n2) -> GaussPoly:
        self._build(n1, n2)
        return self._phi[(n1, n2)]

    def psi(self, n1, n2) -> GaussPoly:
        self._build(n1, n2)
        return self._psi[(n1, n2)]


# ---------------------------------------------------------------------------
# inner products


def _sqrt_det(A) -> complex:
    # eigenvalues of A lie in the right half-plane, so the principal roots are
    # the analytic continuation of the real positive-definite case
    return complex(np.prod(np.sqrt(np.linalg.eigvals(A).astype(complex))))


def gaussian_moments(A, B, deg1: int, deg2: int) -> np.ndarray:
    """``M[i, j] = int x1^i x2^j exp(-1/2 x^T A x - B^T x) d^2x``.

    Completing the square gives mean ``mu = -A^{-1} B`` and covariance
    ``C = A^{-1}``; higher moments follow the Gaussian recursion
    ``E[x_k x^m] = mu_k E[x^m] + sum_l C_kl m_l E[x^(m - e_l)]``.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if np.linalg.eigvalsh(0.5 * (A.real + A.real.T))[0] <= 0:
        raise ValueError("non-integrable combination: Re(A) is not positive definite")
    C = np.linalg.inv(A)
    mu = -C @ B
    Z = 2 * np.pi / _sqrt_det(A) * cmath.exp(0.5 * B @ C @ B)
    E = np.zeros((deg1 + 1, deg2 + 1), dtype=complex)
    E[0, 0] = 1.0
    for i in range(deg1 + 1):
        for j in range(deg2 + 1):
            if i == 0 and j == 0:
                continue
            if i > 0:
                v = mu[0] * E[i - 1, j]
                if i > 1:
                    v += C[0, 0] * (i - 1) * E[i - 2, j]
                if j > 0:
                    v += C[0, 1] * j * E[i - 1, j - 1]
            else:
                v = mu[1] * E[i, j - 1]
                if j > 1:
                    v += C[1, 1] * (j - 1) * E[i, j - 2]
            E[i, j] = v
    return Z * E


def inner(f: GaussPoly, g: GaussPoly) -> complex:
    """``int conj(f) g d^2x`` by Gaussian moments."""
    f, g = f.numeric(), g.numeric()
    A = np.conj(f.Q) + g.Q
    B = np.conj(f.L) + g.L
    R = signal.convolve2d(np.conj(f.P), g.P)
    M = gaussian_moments(A, B, R.shape[0] - 1, R.shape[1] - 1)
    return complex(np.sum(R * M))


def gram_quadrature(fs, gs, half_width: float = 12.0, n: int = 240) -> np.ndarray:
    """``<f_i, g_j>`` on a tensor Gauss-Legendre grid over ``[-w, w]^2``.

    Independent of the moment recursion; used as its oracle.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = half_width * x, half_width * w
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w).ravel()
    F = np.array([f(X1, X2).ravel() for f in fs])
    G = np.array([g(X1, X2).ravel() for g in gs])
    return (np.conj(F) * W) @ G.T


def inner_adaptive(f: GaussPoly, g: GaussPoly, half_width: float = 12.0, epsabs: float = 1e-13) -> complex:
    """``<f, g>`` by adaptive 2-D quadrature (slow; used for spot checks)."""
    integrand = lambda y, x: np.conj(f(x, y)) * g(x, y)
    opts = dict(epsabs=epsabs, epsrel=1e-12)
    re = integrate.dblquad(lambda y, x: integrand(y, x).real, -half_width, half_width, -half_width, half_width, **opts)[0]
    im = integrate.dblquad(lambda y, x: integrand(y, x).imag, -half_width, half_width, -half_width, half_width, **opts)[0]
    return complex(re, im)


# ---------------------------------------------------------------------------
# energies and the metric Theta


def energy_check(p: ModelParams, n1: int, n2: int, family: StateFamily | None = None):
    """Apply ``H`` to ``phi_{n1,n2}``; returns ``(computed, expected, residual)``.

    ``computed`` is the Rayleigh-type ratio of coefficient tables and the
    residual is ``||P_{H phi} - E P_phi|| / ||P_phi||`` (Frobenius norms).
    """
    family = family or StateFamily(p)
    phi = family.phi(n1, n2)
    Hphi = apply_op(family.ops["H"], phi, family.cap + 2)
    if not Hphi.same_gaussian(phi):
        raise AssertionError("H changed the Gaussian factor")
    E = float(p.energy(n1, n2))
    shape = (max(Hphi.P.shape[0], phi.P.shape[0]), max(Hphi.P.shape[1], phi.P.shape[1]))
    hp, pp = _pad(Hphi.P, shape), _pad(phi.P, shape)
    computed = complex(np.vdot(pp, hp) / np.vdot(pp, pp))
    residual = float(np.linalg.norm(hp - E * pp) / np.linalg.norm(pp))
    return computed, E, residual


def _shift_matrix(c, n, exact):
    # B[i, k] = C(i, k) c^(i-k): coefficients of (x + c)^i in powers x^k
    B = np.zeros((n, n), dtype=object if exact else complex)
    for i in range(n):
        for k in range(i + 1):
            B[i, k] = math.comb(i, k) * c ** (i - k)
    return B


def translate(s: GaussPoly, c) -> GaussPoly:
    """The state ``x -> s(x + c)`` for a complex shift vector ``c``."""
    exact = s.exact
    Q, L = s.Q, s.L
    c = np.asarray(c, dtype=object if exact else complex)
    Qc = Q @ c
    expf = sympy.exp if exact else cmath.exp
    factor = expf(-(c @ Qc) / 2 - L @ c)
    B1 = _shift_matrix(c[0], s.P.shape[0], exact)
    B2 = _shift_matrix(c[1], s.P.shape[1], exact)
    P = B1.T @ s.P @ B2
    return GaussPoly(Q, L + Qc, P * factor)


def theta_shift_vector(p: ModelParams, power: int = 1):
    """Complex translation implementing ``Theta^power``, ``Theta = T^2``."""
    s1, s2 = THETA_SIGNS
    return (power * s1 * 2 * p.I * p.eps * p.beta, -power * s2 * 2 * p.I * p.beta)


def theta_shift(p: ModelParams, s: GaussPoly, power: int = 1) -> GaussPoly:
    """Apply ``Theta = exp(2 beta (p2 - eps p1))`` (``power=-1`` for the inverse)."""
    return translate(s, theta_shift_vector(p, power))


def proportionality(f: GaussPoly, g: GaussPoly) -> tuple[complex, float]:
    """Least-squares ``lam`` with ``f ~ lam g`` and the relative misfit.

    The Gaussian factors must agree; otherwise the misfit is infinite.
    """
    if not f.same_gaussian(g, rtol=1e-10):
        return complex("nan"), math.inf
    shape = (max(f.P.shape[0], g.P.shape[0]), max(f.P.shape[1], g.P.shape[1]))
    fp, gp = _pad(f.numeric().P, shape), _pad(g.numeric().P, shape)
    lam = complex(np.vdot(gp, fp) / np.vdot(gp, gp))
    return lam, float(np.linalg.norm(fp - lam * gp) / np.linalg.norm(fp))


__all__ = [
    "DEGREE_CAP",
    "DegreeCapExceeded",
    "DiffOp",
    "GaussPoly",
    "ModelParams",
    "StateFamily",
    "apply_op",
    "build_vacua",
    "commutator",
    "energy_check",
    "excite",
    "gauss",
    "gaussian_moments",
    "gram_quadrature",
    "inner",
    "inner_adaptive",
    "ladder_commutators",
    "model_ops",
    "proportionality",
    "theta_shift",
    "theta_shift_vector",
    "total_degree",
    "translate",
]
