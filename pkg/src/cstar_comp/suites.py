"""Verification suites: each runs one module's checks and collects JSON-ready records."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import SCHEMA_VERSION, RunConfig, output_dir

SUITES = ("identities", "shift", "intertwiner", "lott", "emerson", "crossed")


def _clean(x):
    """Plain JSON types; non-finite floats become strings so the output stays valid JSON."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(x.real), _clean(x.imag)]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    return x


@dataclass
class Record:
    name: str
    passed: bool
    data: dict
    mandatory: bool = True
    residuals: list = field(default_factory=list)

    def to_json(self) -> dict:
        return _clean({"name": self.name, "passed": self.passed, "mandatory": self.mandatory, **self.data})


@dataclass
class SuiteReport:
    suite: str
    records: list
    config: RunConfig

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records if r.mandatory)

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "suite": self.suite, "passed": self.passed,
                "version": __version__, "config_hash": self.config.hash(),
                "checks": [r.to_json() for r in sorted(self.records, key=lambda r: r.name)]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    def residual_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "x", "residual"])
        for r in sorted(self.records, key=lambda r: r.name):
            for x, v in r.residuals:
                w.writerow([r.name, repr(_clean(x)), repr(float(v))])
        return buf.getvalue()

    def write(self, directory: str | None = None) -> list:
        d = directory or output_dir(self.config)
        os.makedirs(d, exist_ok=True)
        paths = [os.path.join(d, f"{self.suite}.json"), os.path.join(d, f"{self.suite}_residuals.csv")]
        with open(paths[0], "w") as fh:
            fh.write(self.dumps())
        with open(paths[1], "w") as fh:
            fh.write(self.residual_csv())
        return paths


def from_check(chk, prefix: str = "", mandatory: bool = True) -> Record:
    """Record from an IdentityCheck."""
    data = chk.to_json()
    data.pop("name", None)
    data.pop("passed", None)
    return Record(prefix + chk.name, bool(chk.passed), data, mandatory, list(chk.residuals))


def from_probe(name: str, rep, mandatory: bool = True, **extra) -> Record:
    return Record(name, rep.decaying, {**rep.to_json(), **extra}, mandatory, list(rep.tail_norms))


# identities ----------------------------------------------------------------------

def kernel_pairs(rng: np.random.Generator, count: int, rmax: float = 0.7) -> list:
    def pt():
        return rmax * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    return [(pt(), pt()) for _ in range(count)]


def identities_suite(cfg: RunConfig, max_len: int = 3) -> list:
    from . import identities as I
    from .fuchsian import enumerate_words
    from .mobius import inverse

    G = cfg.fuchsian_group()
    g1, g2 = G.generators[0], G.generators[-1]
    words = enumerate_words(G, max_len)
    tol = cfg.tol("exact")
    rng = np.random.default_rng(cfg.seed)
    out = []
    for space in cfg.space_specs():
        if space.kind != "disk":
            continue
        lab = space.label()
        for kind, fn in (("factor", I.check_factor), ("commute", I.check_commute)):
            worst, fails = 0.0, []
            for w, g in words:
                r = fn(space, g, 256, 64).residuals[0][1]
                worst = max(worst, r)
                if r > tol:
                    fails.append(w)
            out.append(Record(f"exact/{kind}/{lab}", not fails,
                              {"words": len(words), "max_len": max_len, "N": 256, "window": 64,
                               "worst_residual": worst, "failing_words": fails}, residuals=[(256, worst)]))
        for lam in (1j, np.exp(1j * math.pi / 5)):
            chk = I.check_f_lambda_expansion(space, lam, 128)
            out.append(from_check(chk, f"exact/{lab}/lam={np.angle(lam):.4f}/"))
        chk = I.check_kernel_gram(space, g1, kernel_pairs(rng, 20))
        out.append(from_check(chk, f"kernel/{lab}/"))
        adj = []
        for i, (w, _) in enumerate(kernel_pairs(rng, 10)):
            g = words[i % len(words)][1]
            adj.append(I.kernel_adjoint_residual(space, g, w, 256))
        out.append(Record(f"kernel/{lab}/adjoint", max(adj) <= cfg.tol("kernel"),
                          {"pairs": 10, "N": 256, "worst_residual": max(adj)}, residuals=[(256, max(adj))]))

    Ns, K = cfg.trunc_sweep, cfg.window
    fin = cfg.tol("final_window")
    h2, a22, a23 = (s for s in _spaces("h2", "a2:2", "a2:3"))

    def mc(chk, name, mandatory=True):
        vals = [v for _, v in chk.residuals]
        chk.passed = bool(chk.passed) and vals[-1] <= fin
        return from_check(chk, name, mandatory)

    out.append(mc(I.check_covariance(h2, g1, {1: 1.0}, Ns, K), "modk/h2/g1/z/"))
    out.append(mc(I.check_covariance(h2, g1, {0: 1.0}, Ns, K), "modk/h2/g1/one/"))
    out.append(mc(I.check_covariance(a22, g2, {1: 0.5, -1: 0.5}, Ns, K), "modk/a2:2/g2/cos/"))
    out.append(mc(I.check_group_law(h2, g1, g2, Ns, K), "modk/h2/g1,g2/"))
    out.append(mc(I.check_group_law(a22, g1, g1, Ns, K), "modk/a2:2/g1,g1/"))
    out.append(mc(I.check_group_law(h2, g1, inverse(g1), Ns, K), "modk/h2/g1,g1inv/"))
    out.append(mc(I.check_polar_formula(h2, g1, Ns, K), "modk/h2/g1/"))
    out.append(mc(I.check_polar_formula(h2, G.word_map("ab"), Ns, K), "modk/h2/ab/"))
    # the weighted-space polar formula converges like 1/N: reported, not gating
    out.append(mc(I.check_polar_formula(a22, g1, Ns, K), "supplementary/a2:2/g1/", mandatory=False))
    return out


def _spaces(*labels):
    from .rkhs import SpaceSpec
    return [SpaceSpec.parse(s) for s in labels]


# shift recovery ------------------------------------------------------------------

def shift_suite(cfg: RunConfig) -> list:
    from . import shift_recovery as SR
    from .rkhs import weighted

    G = cfg.fuchsian_group()
    out = []
    sweep = SR.shift_radius_sweep(G, SR.RADII, 256, cfg.window)
    res = [(r, s.residual) for r, s in sweep]
    at_floor = dict(res).get(0.99, math.inf)
    dec = all(b < a for (_, a), (_, b) in zip(res, res[1:]))
    out.append(Record("hardy/shift_sweep", dec and at_floor <= cfg.tol("shift"),
                      {"residuals": res, "systems": {str(r): s.to_json() for r, s in sweep}},
                      residuals=res))
    rng = np.random.default_rng(cfg.seed)
    gaps = []
    for _ in range(20):
        lams = np.exp(2j * np.pi * rng.uniform(size=3))
        gaps.append(SR.det_identity_gap(*SR.mu_values(lams)))
    out.append(Record("hardy/det_identity", max(gaps) <= 1e-12, {"trials": 20, "worst_gap": max(gaps)}))

    pts5 = np.exp(2j * np.pi * np.array([0.0, 0.19, 0.41, 0.58, 0.83]))
    _, syn = SR.recover_Tn_synthetic(2, pts5, 128)
    out.append(Record("a2:2/tn_synthetic", syn.residual <= cfg.tol("exact"), syn.to_json(),
                      residuals=[(128, syn.residual)]))
    tn = []
    for r in SR.RADII:
        _, s = SR.recover_Tn(weighted(2, 256), G, r, cfg.window)
        tn.append((r, s))
    tres = [(r, s.residual) for r, s in tn]
    dets = [s.info["normalized_det"] for _, s in tn]
    out.append(Record("a2:2/tn_sweep", all(b < a for (_, a), (_, b) in zip(tres, tres[1:])),
                      {"residuals": tres, "systems": {str(r): s.to_json() for r, s in tn}}, residuals=tres))
    out.append(Record("a2:2/l_nonsingular", min(dets) > SR.DET_FLOOR, {"normalized_dets": dets}))
    rep = SR.positive_root_probe()
    out.append(from_probe("a2:2/positive_root_probe", rep))
    syn_root = SR.recover_T_from_Tn(weighted(2), synthetic=True, Ns=cfg.trunc_sweep)
    out.append(from_check(syn_root, "a2:2/synthetic/", mandatory=False))
    out.append(from_check(SR.t_from_tn_radius_sweep(weighted(2), G), "a2:2/"))
    for k in (0, 1):
        v = SR.irreducibility_witness(128, k)
        out.append(Record(f"a2:2/irreducibility_k{k}", v > 0.1, {"norm": v, "N": 128}))
    return out


# intertwiner ---------------------------------------------------------------------

def intertwiner_suite(cfg: RunConfig) -> list:
    from . import intertwiner as V

    G = cfg.fuchsian_group()
    out = []
    gap = max(abs(V.alpha(k) - V.alpha_quadrature(k)) for k in range(201))
    out.append(Record("alpha/recurrence_vs_quadrature", gap <= 1e-10, {"k_max": 200, "gap": gap}))
    n, N = cfg.intertwiner_n, cfg.fourier_trunc
    out.append(from_probe("v/essential_unitarity", V.essential_unitarity_probe(n, N, _probe_ks(N))))
    out.append(from_check(V.check_V_intertwines_shift(n, N, _probe_ks(N)), "v/"))
    for lab, g in zip(G.labels, G.generators):
        for chk in V.check_ext_equivalence(n, g):
            out.append(from_check(chk, f"ext/n{n}/{lab}/"))
    pts = 0.9 * np.exp(2j * np.pi * np.arange(20) / 20) * np.linspace(0.1, 1, 20)
    pg = max(V.psi_fourth_gap(g, pts) for g in G.generators)
    out.append(Record("psi/fourth_power", pg <= 1e-12, {"gap": pg, "points": 20}))
    steps = V.two_step_difference(G.generators[0], 256)
    out.append(Record("v/two_step", steps[2] <= 2 * max(steps[:2]),
                      {"step1": steps[0], "step2": steps[1], "composite": steps[2], "N": 256}, mandatory=False))
    return out


def _probe_ks(N: int) -> tuple:
    return tuple(k for k in (16, 32, 64, 128, 256, 512, 1024) if k <= N // 2)


# extensions ----------------------------------------------------------------------

def winding_pairs():
    return [
        (lambda t: t, lambda t: t ** 2),
        (lambda t: t ** 3, lambda t: 1 / t),
        (lambda t: (2 + t) * t, lambda t: t ** -2),
        (lambda t: (t - 0.5) / (1 - 0.5 * t), lambda t: t * (t + 0.3j) / (1 - 0.3j * t)),
        (lambda t: t ** 2 + 0.25, lambda t: 3 + t),
    ]


def attracting_point(g, steps: int = 200) -> complex:
    """Limit of ``g^k(0)``, normalized to the circle."""
    z = 0j
    for _ in range(steps):
        z = complex(g(z))
    return z / abs(z)


def emerson_suite(cfg: RunConfig) -> list:
    from . import extensions as E

    G = cfg.fuchsian_group()
    out = []
    contrast = E.index_contrast(cfg.ball_radius)
    out.append(Record("index_contrast", contrast["hardy"] == -1 and contrast["emerson"] == 0 and contrast["differ"],
                      {"index_pair": [contrast["hardy"], contrast["emerson"]]}))
    D, _ = E.emerson_lift(G, cfg.ball_radius)
    gap = float(np.abs(D.conj().T @ D - np.eye(len(D))).max())
    out.append(Record("emerson/unitarity", gap <= 1e-15, {"ball_radius": cfg.ball_radius, "dim": len(D), "gap": gap}))
    ext = E.emerson_extension(G, 6)
    fp = attracting_point(G.generators[0])
    conv = [abs(ext.values[G.labels[0] * k] - fp) for k in range(1, 7)]
    out.append(Record("emerson/boundary_consistency", conv[-1] <= 1e-3, {"distances": conv, "fixed_point": fp}))
    add = []
    for f, h in winding_pairs():
        fh = (lambda t, f=f, h=h: f(t) * h(t))
        add.append(E.winding_number(fh) - E.winding_number(f) - E.winding_number(h))
    out.append(Record("hardy/winding_additivity", all(a == 0 for a in add), {"pairs": len(add), "defects": add}))
    out.append(Record("hardy/z2_cokernel", E.index_of_symbol_lift_hardy(lambda t: t ** 2) == -2
                      and E.toeplitz_cokernel_dim(2) == 2, {"index": -2}))
    return out


def lott_suite(cfg: RunConfig) -> list:
    from . import extensions as E

    G = cfg.fuchsian_group()
    g1 = G.generators[0]
    M = cfg.fourier_trunc
    out = []
    r = E.riesz_commutator_rank(g1, M)
    s = r["singular_values"]
    ok = s[1] / s[0] <= 1e-8 and abs(s[0] - 1) <= 1e-6 and r["range_gap"] <= 1e-8
    out.append(Record("riesz/rank_one", ok, {"sigma": s[:3], "sigma1_formula": r["sigma1_formula"],
                                              "range_gap": r["range_gap"], "formula_gap": r["formula_gap"],
                                              "fourier_trunc": M}))
    P = E.RieszSetup(M).projection
    out.append(Record("riesz/projection", bool(np.array_equal(P @ P, P) and np.array_equal(P, P.conj().T)), {}))
    for chk in E.covariant_rep_check(g1):
        out.append(from_check(chk, "l2/", mandatory=chk.name == "l2_unitarity"))
    U = E.covariant_unitary(g1, M)
    c = E.center(M, 32)
    ug = float(np.linalg.norm((U.conj().T @ U - np.eye(2 * M + 1))[c, c], 2))
    out.append(Record("l2/unitarity_window64", ug <= 1e-6, {"fourier_trunc": M, "gap": ug}))
    for lab, g in zip(G.labels, G.generators):
        for chk in E.dirichlet_u_gamma_check(g):
            out.append(from_check(chk, f"dirichlet/{lab}/"))
    kk = E.kk_cycle_check(M=M)
    out.append(Record("kk/F", kk["F2_minus_I"] == 0 and kk["F_minus_Fstar"] == 0,
                      {"F2_minus_I": kk["F2_minus_I"], "F_minus_Fstar": kk["F_minus_Fstar"]}))
    for i, rep in enumerate(kk["unitary"]):
        out.append(from_probe(f"kk/unitary_commutator/{G.labels[i]}", rep))
    for i, rep in enumerate(kk["multiplier"]):
        out.append(from_probe(f"kk/multiplier_commutator/{('z', 'cos')[i]}", rep))
    return out


# crossed product -----------------------------------------------------------------

def crossed_suite(cfg: RunConfig, triples: int = 10) -> list:
    from . import crossed as X

    G = cfg.fuchsian_group()
    rng = np.random.default_rng(cfg.seed)
    worst = {}
    for _ in range(triples):
        x, y, z = (X.random_element(rng, G) for _ in range(3))
        for k, v in X.algebra_axiom_gaps(x, y, z).items():
            worst[k] = max(worst.get(k, 0.0), v)
    out = [Record("algebra/axioms", max(worst.values()) <= cfg.tol("crossed"), {"triples": triples, **worst})]
    z1 = X.TrigPoly([1.0], 1)
    x = X.CrossedElement({G.labels[0]: z1}, G)
    y = X.CrossedElement({G.labels[-1]: z1.conj()}, G)
    rc = X.representation_checks(x, y, R=2, M=128)
    out.append(Record("sigma/homomorphism", rc["homomorphism"] <= cfg.tol("homomorphism"), rc))
    out.append(Record("sigma/involution", rc["involution"] <= 1e-12, rc))
    iso = X.translation_isometry_gap(G.labels[0], 2, 8)
    out.append(Record("sigma/translation_isometry", iso <= 1e-12, {"gap": iso}))
    lb = X.norm_lower_bounds(x, (1, 2, 3), 16)
    out.append(Record("sigma/norm_lower_bounds", True, {"bounds": lb}, mandatory=False))
    for lab, g, q in (("g1/z", G.generators[0], {1: 1.0}), ("g2/z+zbar", G.generators[-1], {1: 1.0, -1: 1.0}),
                      ("g1/const", G.generators[0], {0: 2.0})):
        out.append(from_check(X.covariance_in_quotient(g, q, cfg.trunc_sweep, cfg.window), f"quotient/{lab}/"))
    return out


RUNNERS = {"identities": identities_suite, "shift": shift_suite, "intertwiner": intertwiner_suite,
           "lott": lott_suite, "emerson": emerson_suite, "crossed": crossed_suite}


def run_suite(name: str, cfg: RunConfig) -> list:
    """One SuiteReport per suite (``all`` expands to every suite)."""
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in RUNNERS:
            raise ValueError(f"unknown suite {n!r}")
    return [SuiteReport(n, RUNNERS[n](cfg), cfg) for n in names]
