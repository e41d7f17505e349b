"""Verification suites, one per domain module, and the consolidated run.

Each suite takes a plain parameter dict (already validated against
``DEFAULTS``), a tolerance policy and a seed, and returns a
``VerificationReport`` plus CSV series ``{name: (header, rows)}``.
"""

from __future__ import annotations

import math

import numpy as np

from . import dpb, epf, gauss2d, pseudofermion
from .numkernel import TolerancePolicy, norm
from .report import VerificationReport

# model instances for pf_from_hamiltonian, all with eigenvalue gap > 0.1
MODEL_INSTANCES = {
    "DG": [
        dict(r=1.0, s=1.0, t=0.5, theta=0.3, phi=0.2),
        dict(r=0.5, s=2.0, t=1.0, theta=0.0, phi=0.0),
        dict(r=1.5, s=0.8, t=1.2, theta=0.4, phi=-0.7),
    ],
    "GMM": [
        dict(eps1=0.0, eps2=1.0, gamma1=0.5, gamma2=0.2, nu0=0.8),
        dict(eps1=0.3, eps2=-0.3, gamma1=0.1, gamma2=0.1, nu0=1.0),
        dict(eps1=1.0, eps2=0.0, gamma1=0.4, gamma2=0.6, nu0=0.5 + 0.2j),
    ],
    "MO": [
        dict(E=1.0, theta=math.pi / 4, phi=0.0),
        dict(E=2.0, theta=0.5 + 0.3j, phi=0.2),
        dict(E=0.7, theta=1.0, phi=0.4 - 0.1j),
    ],
}

EPS_GRID = [-0.8, -0.4, 0.0, 0.4, 0.8]

DEFAULTS = {
    "pf": {"delta": 0.6, "omega": 1.0, "theta": 0.0, "models": True},
    "epf": {"M": 3, "basis": "random", "n_bases": 1, "kappa_max": 1e3},
    "dpb": {
        "cutoff": 40,
        "similarity": "random",
        "kappa": 100.0,
        "kappa_max": dpb.KAPPA_MAX,
        "resolution_cutoff": 10,
        "radius": None,
        "n_r": 200,
        "n_theta": None,
        "z_abs": [0.5, 1.0, 1.5, 2.0, 2.5],
        "z_arg": 0.3,
        "K": None,
        "bicoherent_tol": 1e-12,
        "resolution_tol": 1e-8,
    },
    "gauss2d": {
        "epsilon": list(EPS_GRID),
        "xi": [1, -1],
        "n_max": 4,
        "biorth_degree": 5,
        "theta_degree": 4,
        "norm_n": 5,
        "exact": True,
        "energy_tol": 1e-10,
        "biorth_tol": 1e-8,
        "theta_tol": 1e-8,
    },
}

# verify-all runs the full sweeps
VERIFY_ALL_OVERRIDES = {
    "epf": {"M": list(range(1, 13)), "n_bases": 5},
}

# every anchored operation must leave at least one entry behind
REQUIRED_CHECKS = [
    "PF-Heff-spectrum",
    "FB220-anticommutator",
    "FB224-lowering-phi",
    "FB225-number-phi",
    "FB226-biorthonormality",
    "FB227-norm-bound-Sphi",
    "FB228-Sphi-Spsi-inverse",
    "FB229-intertwining-Spsi",
    "FB230-hermitian-similarity",
    "FB231-number-similarity",
    "PF-model-DG",
    "PF-model-GMM",
    "PF-model-MO",
    "EPF-biorthogonality",
    "EPF-dual-methods-agree",
    "EPF-anticommutator-expansion",
    "EPF-alpha-law",
    "EPF-Sh-Sg-inverse",
    "A4-biorthogonality",
    "A3-lowering-phi",
    "A1-commutator-guarded",
    "add3-Theta-sum",
    "Theta-conjugacy-a-bdag",
    "Theta-intertwining-N",
    "add1-bicoherent-eigen-residual",
    "add1-bicoherent-overlap",
    "add2-resolution",
    "Prop31-norm-growth",
    "FBML46-vacuum-a1",
    "FBML46-vacuum-b1dag",
    "G2-ladder-commutators",
    "FBML45-energy",
    "G2-biorthogonality-moments",
    "G2-biorthogonality-quadrature",
    "FBML47-theta-proportionality",
    "FBML47-theta-roundtrip",
    "G2-norm-divergence",
]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# ---------------------------------------------------------------------------


def pf_suite(params: dict, tol: TolerancePolicy, seed: int = 0):
    rep = VerificationReport()
    hp = pseudofermion.HeffParams(params["delta"], params["omega"], params["theta"])
    pair, H = pseudofermion.heff_build(hp)
    sys = pseudofermion.pf_system(pair)
    Om = hp.Omega
    ctx = dict(model="Heff", delta=hp.delta, omega=hp.omega_abs, theta=hp.theta)
    w = np.sort_complex(np.linalg.eigvals(H))
    rep.add("PF-Heff-spectrum", float(np.max(np.abs(w - np.array([-Om / 2, Om / 2])))), tol.threshold(), **ctx)
    rep.extend(pseudofermion.pf_verify(sys, tol, hamiltonian=H, Omega=Om, **ctx))
    if params["models"]:
        for kind, instances in MODEL_INSTANCES.items():
            for i, kw in enumerate(instances):
                Hm = pseudofermion.model_hamiltonian(kind, kw)
                msys, Omega, gamma = pseudofermion.pf_from_hamiltonian(Hm)
                sub = pseudofermion.pf_verify(msys, tol, hamiltonian=Hm, Omega=Omega, gamma=gamma, model=kind, instance=i)
                worst = max(e.residual / e.tolerance for e in sub.entries if e.tolerance > 0)
                rep.extend(sub)
                rep.add(f"PF-model-{kind}", worst, 1.0, model=kind, instance=i, measure="max residual/tolerance")
    return rep, {}


def epf_suite(params: dict, tol: TolerancePolicy, seed: int = 0):
    rep = VerificationReport()
    rng = np.random.default_rng(seed)
    Ms = params["M"] if isinstance(params["M"], list) else [params["M"]]
    rows = []
    for M in Ms:
        for i in range(params["n_bases"]):
            if params["basis"] == "standard":
                basis = epf.EpfBasis.standard(M)
            elif params["basis"] == "random":
                basis = epf.EpfBasis.random(M, rng, params["kappa_max"])
            else:
                raise ValueError(f"unknown basis kind {params['basis']!r}; expected 'standard' or 'random'")
            sys = epf.epf_system(basis)
            rep.extend(epf.epf_verify(sys, tol, basis_index=i))
            if i == 0:
                alpha, _ = epf.epf_anticommutator(sys, tol)
                rows.extend([M, k, _fmt(a)] for k, a in enumerate(alpha))
    return rep, {"alpha": (["M", "k", "alpha"], rows)}


def _similarity(params: dict, seed: int) -> dict:
    kind = params["similarity"]
    if kind == "random":
        return {"kind": "random", "kappa": params["kappa"], "seed": seed}
    if kind == "identity":
        return {"kind": "identity"}
    raise ValueError(f"unknown similarity kind {kind!r}; expected 'random' or 'identity'")


def dpb_suite(params: dict, tol: TolerancePolicy, seed: int = 0):
    rep = VerificationReport()
    N = params["cutoff"]
    spec = _similarity(params, seed)
    sys = dpb.dpb_build(spec, N, params["kappa_max"])
    ctx = dict(similarity=spec["kind"])
    rep.extend(dpb.dpb_verify(sys, tol, **ctx))
    rep.extend(dpb.dpb_theta_conjugacy(sys, tol, seed=seed, **ctx))

    # bi-coherent states: measured eigen-residual against the closed form
    phase = complex(math.cos(params["z_arg"]), math.sin(params["z_arg"]))
    worst_ev = worst_ov = 0.0
    # default series orders: five values from N/4 up to N
    Ks = params["K"] if params["K"] is not None else sorted({int(round(v)) for v in np.linspace(N / 4, N, 5)})
    Ks = Ks if isinstance(Ks, list) else [Ks]
    for r in params["z_abs"]:
        for K in Ks:
            z = r * phase
            bc = dpb.bicoherent(sys, z, K)
            measured = norm(sys.a @ bc.phi_z - z * bc.phi_z)
            worst_ev = max(worst_ev, abs(measured - dpb.eigen_residual_formula(sys, z, K)))
            worst_ov = max(worst_ov, abs(np.vdot(bc.psi_z, bc.phi_z) - dpb.overlap_formula(z, K)))
    rep.add("add1-bicoherent-eigen-residual", worst_ev, params["bicoherent_tol"], grid=f"{len(params['z_abs'])}x{len(Ks)}", **ctx)
    rep.add("add1-bicoherent-overlap", worst_ov, tol.threshold() * sys.kappa, **ctx)

    fit = dpb.norm_growth_fit(sys)
    rep.add("Prop31-norm-growth", max(fit.alpha_phi, fit.alpha_psi), 0.5, r_phi=fit.r_phi, r_psi=fit.r_psi, fit_rms=fit.residual, **ctx)
    norms = [[n, _fmt(p), _fmt(q)] for n, p, q in dpb.norm_table(sys)]

    # resolution of the identity on a small cutoff, radius from the tail rule
    Nr = params["resolution_cutoff"]
    small = dpb.dpb_build(_similarity(params, seed), Nr, params["kappa_max"])
    R = dpb.default_radius(Nr) if params["radius"] is None else float(params["radius"])
    _, dev = dpb.bicoherent_resolution(small, R, params["n_r"], params["n_theta"])
    rep.add("add2-resolution", dev, params["resolution_tol"], cutoff=Nr, R=R, n_r=params["n_r"], tail=dpb.tail_bound(Nr, R))
    quad = []
    for n_r in sorted({25, 50, 100, params["n_r"]}):
        _, d = dpb.bicoherent_resolution(small, R, n_r, params["n_theta"])
        quad.append([_fmt(R), n_r, _fmt(d)])
    return rep, {"norms": (["n", "norm_phi", "norm_psi"], norms), "quadrature": (["R", "n_r", "deviation"], quad)}


def _exact_residual(state: gauss2d.GaussPoly) -> float:
    # zero when every coefficient simplifies to zero, else the numeric size
    return 0.0 if state.is_zero() else float(np.max(np.abs(state.numeric().P)))


def gauss2d_suite(params: dict, tol: TolerancePolicy, seed: int = 0):
    rep = VerificationReport()
    sweep = []

    def record(check, residual, tolerance, eps, xi, n1="", n2="", **extra):
        rep.add(check, residual, tolerance, epsilon=eps, xi=xi, **({"n1": n1, "n2": n2} if n1 != "" else {}), **extra)
        sweep.append([_fmt(eps), xi, n1, n2, check, _fmt(residual)])

    eps_list = params["epsilon"] if isinstance(params["epsilon"], list) else [params["epsilon"]]
    xi_list = params["xi"] if isinstance(params["xi"], list) else [params["xi"]]
    for eps in eps_list:
        for xi in xi_list:
            if params["exact"]:
                pe = gauss2d.ModelParams(eps, xi, exact=True)
                ops = gauss2d.model_ops(pe)
                phi0, psi0 = gauss2d.build_vacua(pe)
                for name, state in (("a1", phi0), ("a2", phi0), ("b1dag", psi0), ("b2dag", psi0)):
                    record(f"FBML46-vacuum-{name}", _exact_residual(gauss2d.apply_op(ops[name], state)), 0.0, eps, xi, mode="exact")
                comms = gauss2d.ladder_commutators(ops)
                bad = max((0.0 if c.is_zero(exact=True) else c.max_abs()) for c in comms.values())
                record("G2-ladder-commutators", bad, 0.0, eps, xi, mode="exact")
            else:
                p = gauss2d.ModelParams(eps, xi)
                ops = gauss2d.model_ops(p)
                phi0, psi0 = gauss2d.build_vacua(p)
                for name, state in (("a1", phi0), ("a2", phi0), ("b1dag", psi0), ("b2dag", psi0)):
                    record(f"FBML46-vacuum-{name}", float(np.max(np.abs(gauss2d.apply_op(ops[name], state).P))), tol.threshold(), eps, xi)
                bad = max(c.max_abs() for c in gauss2d.ladder_commutators(ops).values())
                record("G2-ladder-commutators", bad, tol.threshold(), eps, xi)

            p = gauss2d.ModelParams(eps, xi)
            fam = gauss2d.StateFamily(p)
            for n1 in range(params["n_max"] + 1):
                for n2 in range(params["n_max"] + 1):
                    _, _, res = gauss2d.energy_check(p, n1, n2, fam)
                    record("FBML45-energy", res, params["energy_tol"], eps, xi, n1, n2)

            idx = [(i, j) for i in range(params["biorth_degree"] + 1) for j in range(params["biorth_degree"] + 1 - i)]
            psis = [fam.psi(*k) for k in idx]
            phis = [fam.phi(*k) for k in idx]
            I = np.eye(len(idx))
            G = np.array([[gauss2d.inner(f, g) for g in psis] for f in phis])
            Gq = gauss2d.gram_quadrature(phis, psis)
            record("G2-biorthogonality-moments", float(np.max(np.abs(G - I))), params["biorth_tol"], eps, xi, degree=params["biorth_degree"])
            record("G2-biorthogonality-quadrature", float(np.max(np.abs(Gq - I))), params["biorth_tol"], eps, xi, degree=params["biorth_degree"])

            lam0, _ = gauss2d.proportionality(gauss2d.theta_shift(p, fam.phi(0, 0)), fam.psi(0, 0))
            worst = 0.0
            for n1 in range(params["theta_degree"] + 1):
                for n2 in range(params["theta_degree"] + 1 - n1):
                    lam, misfit = gauss2d.proportionality(gauss2d.theta_shift(p, fam.phi(n1, n2)), fam.psi(n1, n2))
                    worst = max(worst, misfit, abs(lam - lam0) / abs(lam0))
            record("FBML47-theta-proportionality", worst, params["theta_tol"], eps, xi, constant=float(lam0.real), constant_imag=float(lam0.imag))
            back = gauss2d.theta_shift(p, gauss2d.theta_shift(p, fam.phi(2, 1)), -1)
            lam, misfit = gauss2d.proportionality(back, fam.phi(2, 1))
            record("FBML47-theta-roundtrip", max(misfit, abs(lam - 1)), params["theta_tol"], eps, xi)

            sq = [gauss2d.inner(fam.psi(n, n), fam.psi(n, n)).real for n in range(1, params["norm_n"] + 1)]
            ratios = [sq[k + 1] / sq[k] for k in range(len(sq) - 1)]
            # strict growth of ||Psi_{n,n}||^2; the ratios shrink toward 1, as the
            # exp(c sqrt(n)) / sqrt(n) asymptotics predict
            record("G2-norm-divergence", max(1.0 - r for r in ratios), 0.0, eps, xi, ratios=[round(r, 9) for r in ratios])
            record("G2-norm-ratio-subexponential", max(ratios[k + 1] - ratios[k] for k in range(len(ratios) - 1)), 0.0, eps, xi)
    header = ["epsilon", "xi", "n1", "n2", "check", "residual"]
    return rep, {"gauss2d_sweep": (header, sweep)}


SUITES = {"pf": pf_suite, "epf": epf_suite, "dpb": dpb_suite, "gauss2d": gauss2d_suite}


def coverage_missing(rep: VerificationReport) -> list[str]:
    return [name for name in REQUIRED_CHECKS if name not in rep]


def verify_all(params: dict[str, dict], tol: TolerancePolicy, seed: int = 0):
    """Every suite in a fixed order, then the coverage check."""
    rep = VerificationReport()
    csvs: dict = {}
    for name in ("pf", "epf", "dpb", "gauss2d"):
        sub, series = SUITES[name](params[name], tol, seed)
        for e in sub.entries:
            e.context = {"suite": name, **e.context}
        rep.extend(sub)
        csvs.update(series)
    missing = coverage_missing(rep)
    rep.add("verify-all-coverage", len(missing), 0, missing=missing, required=len(REQUIRED_CHECKS))
    return rep, csvs
