"""Randomized verification suites with machine-readable reports.

Each suite turns one block of library guarantees into seeded random trials
and records the worst violation seen against a fixed tolerance.  Reports are
deterministic for a fixed seed (trial generators are split from the master
seed by check index), so two runs produce byte-identical JSON apart from the
wall-time field.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from . import invariants, majorize, oracle, varcalc
from . import systems as sy
from .errors import InvalidParam

SCHEMA_VERSION = 1


@dataclass
class CheckRecord:
    check: str
    system: str
    trials: int
    max_violation: float
    tolerance: float
    passed: bool
    note: str = ""


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _systems_for_axioms(rng, size_cap=8):
    n = int(rng.integers(2, size_cap + 1))
    m = int(rng.integers(1, size_cap + 1))
    n2 = int(rng.integers(1, size_cap + 1))
    return [
        sy.trivial_norm(max(n, 2)),
        sy.eig_sym(max(n, 2)),
        sy.svd_system(m, n2),
        sy.signed_svd(max(n, 2)),
        sy.product_lift(sy.eig_sym(max(n, 2))),
    ]


AXIOM_SYSTEM_NAMES = ("trivial", "eigsym", "svd", "signed-svd", "product:eigsym")


def suite_axioms(trials: int = 2000, seed: int = 0) -> List[CheckRecord]:
    """Definition-level guarantees of every concrete system."""
    records = []
    for si, label in enumerate(AXIOM_SYSTEM_NAMES):
        rng = _rng(seed, 100 + si)
        worst = {
            "trace-inequality": 0.0,
            "spectrum-nonexpansive": 0.0,
            "reconstruction": 0.0,
            "ordering-consistency": 0.0,
            "orbit-representative": 0.0,
            "group-action-isometry": 0.0,
            "norm-transfer": 0.0,
        }
        for _ in range(trials):
            kind = _systems_for_axioms(rng)[si]
            X = kind.validate(kind.random_ambient(rng))
            Y = kind.validate(kind.random_ambient(rng))
            gx, gy = kind.spectrum(X), kind.spectrum(Y)
            nx, ny = sy.anorm(X), sy.anorm(Y)
            worst["trace-inequality"] = max(
                worst["trace-inequality"],
                (sy.ainner(X, Y) - float(np.dot(gx, gy))) / (1.0 + nx * ny))
            worst["spectrum-nonexpansive"] = max(
                worst["spectrum-nonexpansive"],
                float(np.linalg.norm(gx - gy)) - sy.anorm(sy.asub(X, Y)))
            d = kind.decompose(X)
            worst["reconstruction"] = max(
                worst["reconstruction"],
                sy.anorm(sy.asub(d.apply(d.spectrum), X)) / (1.0 + nx))
            x = rng.standard_normal(kind.spectrum_dim)
            worst["ordering-consistency"] = max(
                worst["ordering-consistency"],
                float(np.max(np.abs(kind.spectrum(d.apply(x)) - kind.order(x)))))
            s = kind.group.random(rng)
            worst["orbit-representative"] = max(
                worst["orbit-representative"],
                float(np.max(np.abs(kind.order(s.apply(x)) - kind.order(x)))))
            worst["group-action-isometry"] = max(
                worst["group-action-isometry"],
                abs(float(np.linalg.norm(s.apply(x))) - float(np.linalg.norm(x)))
                / (1.0 + float(np.linalg.norm(x))))
            worst["norm-transfer"] = max(
                worst["norm-transfer"], abs(float(np.linalg.norm(gx)) - nx))
        tols = {
            "trace-inequality": 1e-9,
            "spectrum-nonexpansive": 1e-9,
            "reconstruction": 1e-8,
            "ordering-consistency": 1e-10,
            "orbit-representative": 1e-12,
            "group-action-isometry": 1e-12,
            "norm-transfer": 1e-10,
        }
        for check, v in worst.items():
            records.append(CheckRecord(check, label, trials, v, tols[check], v <= tols[check]))

    # declared oracle invariances
    rng = _rng(seed, 190)
    pairs = [
        ("sum", {}, sy.eig_sym(4)),
        ("coordprod", {}, sy.eig_sym(3)),
        ("max", {}, sy.eig_sym(4)),
        ("abspowsum", {"p": 0.5}, sy.svd_system(4, 3)),
        ("l1", {}, sy.signed_svd(4)),
        ("sup_norm", {}, sy.svd_system(3, 3)),
    ]
    inv_trials = max(10, trials // 10)
    worst_inv = 0.0
    for name, params, kind in pairs:
        f = invariants.builtin_function(name, for_kind=kind, **params)
        rep = invariants.check_invariance(f, kind, inv_trials, rng)
        worst_inv = max(worst_inv, rep.max_violation)
    records.append(CheckRecord("oracle-invariance", "builtin-corpus",
                               inv_trials * len(pairs), worst_inv, 1e-10,
                               worst_inv <= 1e-10))
    return records


# the orthant is permutation-invariant only, so its slot under the signed
# rectangular system goes to the ball
_PROJECTION_PAIRINGS = [
    ("eigsym", "orthant", {}),
    ("eigsym", "box", {"r": 1.0}),
    ("eigsym", "sphere", {"r": 1.5}),
    ("eigsym", "sparse", {"k": 1}),
    ("svd", "ball", {"r": 1.5}),
    ("svd", "box", {"r": 1.0}),
    ("svd", "sphere", {"r": 1.5}),
    ("svd", "sparse", {"k": 1}),
]


def suite_projections(trials: int = 12, seed: int = 0) -> List[CheckRecord]:
    """Projection and distance transfer onto lifted sets, against brute force."""
    records = []
    idx = 0
    for sys_name, set_name, params in _PROJECTION_PAIRINGS:
        idx += 1
        rng = _rng(seed, 200 + idx)
        worst = dict.fromkeys(
            ["projection-distance-brute", "projection-residual",
             "projection-spectrum-match", "projection-shared-decomposition",
             "cone-identity", "distance-invariance"], 0.0)
        for _ in range(trials):
            n = int(rng.integers(2, 5))
            kind = sy.eig_sym(n) if sys_name == "eigsym" else sy.svd_system(n, int(rng.integers(2, 5)))
            D = invariants.builtin_set(set_name, for_kind=kind, **params)
            X = kind.validate(kind.random_ambient(rng, scale=1.5))
            g = kind.spectrum(X)
            dist = varcalc.spectral_distance(D, kind, X)
            pts = varcalc.spectral_project(D, kind, X, count=2, rng=rng)
            brute = oracle.brute_project(
                D.contains, g, box_radius=float(2.0 + 2.0 * np.max(np.abs(g))))
            bd = min(float(np.linalg.norm(g - p)) for p in brute)
            worst["projection-distance-brute"] = max(
                worst["projection-distance-brute"], abs(dist - bd))
            zs = D.project(g).points
            for P in pts:
                worst["projection-residual"] = max(
                    worst["projection-residual"],
                    abs(sy.anorm(sy.asub(X, P)) - dist))
                gp = kind.spectrum(P)
                worst["projection-spectrum-match"] = max(
                    worst["projection-spectrum-match"],
                    min(float(np.linalg.norm(gp - kind.order(z))) for z in zs))
            # shared decomposition and the cone identity on a matched pair
            d = kind.sample_decompositions(X, 1, rng)[0]
            for z in zs:
                P = d.apply(np.asarray(z, dtype=float))
                shared = (sy.anorm(sy.asub(d.apply(kind.spectrum(X)), X))
                          + sy.anorm(sy.asub(d.apply(kind.spectrum(P)), P)))
                worst["projection-shared-decomposition"] = max(
                    worst["projection-shared-decomposition"], shared)
                cone = sy.anorm(sy.asub(sy.asub(X, P), d.apply(g - z)))
                worst["cone-identity"] = max(worst["cone-identity"], cone)
            x = rng.standard_normal(kind.spectrum_dim)
            worst["distance-invariance"] = max(
                worst["distance-invariance"],
                abs(D.distance(kind.order(x)) - D.distance(x)))
        tols = {
            "projection-distance-brute": 1e-6,
            "projection-residual": 1e-8,
            "projection-spectrum-match": 1e-8,
            "projection-shared-decomposition": 1e-7,
            "cone-identity": 1e-8,
            "distance-invariance": 1e-9,
        }
        label = "%s/%s" % (sys_name, set_name)
        for check, v in worst.items():
            records.append(CheckRecord(check, label, trials, v, tols[check], v <= tols[check]))
    return records

def _normal_cases(rng):
    """Base points on lifted sets, each with a planted non-normal direction."""
    cases = []
    # positive semidefinite cone = orthant under the symmetric eigensystem;
    # a positive sign on an active coordinate points into the cone
    n = int(rng.integers(2, 5))
    kind = sy.eig_sym(n)
    D = invariants.builtin_set("orthant")
    x0 = np.abs(rng.standard_normal(n))
    x0[rng.integers(n)] = 0.0
    x0 = kind.order(x0)
    bad = np.zeros(n)
    bad[int(np.argmin(np.abs(x0)))] = 1.0
    cases.append((kind, D, x0, bad))
    # sphere of the point's own radius; a tangent direction is not normal
    kind = sy.eig_sym(int(rng.integers(2, 5)))
    x0 = rng.standard_normal(kind.spectrum_dim)
    r = float(np.linalg.norm(x0))
    x0 = kind.order(x0)
    t = rng.standard_normal(x0.size)
    t -= (np.dot(t, x0) / np.dot(x0, x0)) * x0
    cases.append((kind, invariants.builtin_set("sphere", r=r), x0, t))
    # bounded-rank set = sparsity under the rectangular system; a direction
    # supported on the active slot stays inside the set
    m = int(rng.integers(2, 5))
    kind = sy.svd_system(m, int(rng.integers(2, 5)))
    x0 = np.zeros(kind.spectrum_dim)
    x0[0] = 1.0 + abs(rng.standard_normal())
    bad = np.zeros(kind.spectrum_dim)
    bad[0] = 1.0
    cases.append((kind, invariants.builtin_set("sparse", k=1), kind.order(x0), bad))
    return cases


def suite_normals(trials: int = 40, seed: int = 0) -> List[CheckRecord]:
    """Normal-cone transfer via the directional-distance limit test."""
    rng = _rng(seed, 300)
    worst_pass = 0.0
    rejects_ok = True
    npass = 0
    nrej = 0
    per_case = max(1, trials // 3)
    for _ in range(per_case):
        for kind, D, x0, bad in _normal_cases(rng):
            carrier = kind.decompose(kind.validate(kind.random_ambient(rng)))
            X = carrier.apply(x0)
            ws = varcalc.spectral_normal_cone_elements(D, kind, X, count=2, rng=rng,
                                                       verify=False)
            for w in ws:
                if sy.anorm(w.vector) == 0.0:
                    continue
                v = varcalc.ambient_normal_membership(D, kind, X, w.vector)
                worst_pass = max(worst_pass, abs(v.estimate - sy.anorm(w.vector)))
                npass += 1
            if np.linalg.norm(bad) > 1e-12:
                W = carrier.apply(np.asarray(bad, dtype=float))
                v = varcalc.ambient_normal_membership(D, kind, X, W)
                rejects_ok = rejects_ok and (not v.passed)
                nrej += 1
    records = [
        CheckRecord("normal-limit-pass", "psd/sphere/rank", npass, worst_pass,
                    1e-4, worst_pass <= 1e-4),
        CheckRecord("normal-limit-reject", "planted", nrej,
                    0.0 if rejects_ok else 1.0, 0.5, rejects_ok),
    ]

    # epigraph route in the product system: (grad, -1) is normal to epi
    rng = _rng(seed, 310)
    worst_epi = 0.0
    epi_rejects = True
    n_epi = max(4, trials // 8)
    f = invariants.builtin_function("abspowsum", p=2)
    for _ in range(n_epi):
        inner = sy.eig_sym(int(rng.integers(2, 4)))
        pk = sy.product_lift(inner)
        D = invariants.epigraph_set(f)
        X = inner.validate(inner.random_ambient(rng))
        xi = varcalc.eval_spectral(f, inner, X)
        G = varcalc.spectral_gradient(f, inner, X)
        W = (G, -1.0)
        v = varcalc.ambient_normal_membership(D, pk, (X, xi), W)
        worst_epi = max(worst_epi, abs(v.estimate - sy.anorm(W)))
        v2 = varcalc.ambient_normal_membership(D, pk, (X, xi), (G, 1.0))
        epi_rejects = epi_rejects and (not v2.passed)
    records.append(CheckRecord("epigraph-normal", "product:eigsym", n_epi,
                               worst_epi, 1e-4, worst_epi <= 1e-4))
    records.append(CheckRecord("epigraph-normal-reject", "product:eigsym", n_epi,
                               0.0 if epi_rejects else 1.0, 0.5, epi_rejects))
    return records


_SMOOTH_FUNS = [
    ("sum", {}, "permutation"),
    ("coordprod", {}, "permutation"),
    ("abspowsum", {"p": 2}, "signed"),
    ("abspowsum", {"p": 3}, "signed"),
]

_CONVEX_SUBDIFF_FUNS = [
    ("max", {}, "permutation"),
    ("negmin", {}, "permutation"),
    ("topk", {"k": 2}, "permutation"),
    ("l1", {}, "signed"),
    ("sup_norm", {}, "signed"),
]


def _kind_for_level(level, rng):
    if level == "permutation":
        return sy.eig_sym(int(rng.integers(2, 5)))
    choice = int(rng.integers(0, 3))
    if choice == 0:
        return sy.svd_system(int(rng.integers(2, 5)), int(rng.integers(2, 5)))
    if choice == 1:
        return sy.signed_svd(int(rng.integers(2, 4)))
    return sy.eig_sym(int(rng.integers(2, 5)))


def suite_subgradients(trials: int = 50, seed: int = 0) -> List[CheckRecord]:
    """Gradient and Fréchet-subgradient transfer, both directions."""
    records = []

    # regression: the lifted gradient is not the naive reordering
    kind = sy.eig_sym(2)
    f = invariants.builtin_function("coordprod")
    X = np.diag([1.0, 2.0])
    G = varcalc.spectral_gradient(f, kind, X)
    reg = float(np.max(np.abs(G - np.diag([2.0, 1.0]))))
    fd = varcalc.ambient_fd_gradient(f, kind, X)
    fd_gap = sy.anorm(sy.asub(G, fd))
    naive_distinct = float(np.max(np.abs(
        kind.spectrum(np.diag([2.0, 1.0])) - f.grad(np.array([2.0, 1.0])))))
    ok = reg <= 1e-10 and fd_gap <= 1e-5 and naive_distinct > 0.5
    records.append(CheckRecord("ordering-caveat-regression", "eigsym", 1,
                               reg, 1e-10, ok, note="fd gap %.2e" % fd_gap))

    rng = _rng(seed, 400)
    worst_fd = 0.0
    for _ in range(trials):
        name, params, level = _SMOOTH_FUNS[int(rng.integers(len(_SMOOTH_FUNS)))]
        kind = _kind_for_level(level, rng)
        f = invariants.builtin_function(name, for_kind=kind, **params)
        X = kind.validate(kind.random_ambient(rng))
        if not oracle.is_smooth_point(f.eval, kind.spectrum(X), tol=1e-5):
            continue
        G = varcalc.spectral_gradient(f, kind, X)
        fd = varcalc.ambient_fd_gradient(f, kind, X)
        worst_fd = max(worst_fd, sy.anorm(sy.asub(G, fd)) / (1.0 + sy.anorm(G)))
    records.append(CheckRecord("gradient-fd-match", "smooth-corpus", trials,
                               worst_fd, 1e-5, worst_fd <= 1e-5))

    # decomposition independence under ties
    rng = _rng(seed, 410)
    worst_ind = 0.0
    for _ in range(max(4, trials // 5)):
        kind = sy.eig_sym(3)
        a, b = rng.standard_normal(2)
        base = kind.decompose(kind.validate(kind.random_ambient(rng)))
        X = base.apply(kind.order(np.array([a, a, b])))
        f = invariants.builtin_function("abspowsum", p=2)
        grads = []
        for d in kind.sample_decompositions(X, 10, rng):
            grads.append(d.apply(f.grad(d.spectrum)))
        for i in range(len(grads)):
            for j in range(i + 1, len(grads)):
                worst_ind = max(worst_ind, sy.anorm(sy.asub(grads[i], grads[j])))
    records.append(CheckRecord("gradient-decomposition-independence", "eigsym-ties",
                               max(4, trials // 5), worst_ind, 1e-8, worst_ind <= 1e-8))

    # transfer of declared subgradients and rejection of planted ones
    rng = _rng(seed, 420)
    worst_pass = -math.inf
    rejects_ok = True
    npairs = 0
    for _ in range(trials):
        name, params, level = _CONVEX_SUBDIFF_FUNS[int(rng.integers(len(_CONVEX_SUBDIFF_FUNS)))]
        kind = _kind_for_level(level, rng)
        f = invariants.builtin_function(name, for_kind=kind, **params)
        x = rng.standard_normal(kind.spectrum_dim)
        if rng.random() < 0.4:
            x[rng.integers(kind.spectrum_dim)] = 0.0  # exercise multi-vertex faces
        sub = f.frechet_subdiff(x)
        if sub is None or not sub.vertices:
            continue
        carrier = kind.decompose(kind.validate(kind.random_ambient(rng)))
        y = sub.vertices[int(rng.integers(len(sub.vertices)))]
        w = varcalc.transfer_frechet_subgradient(y, carrier, x=x)
        v = varcalc.ambient_frechet_test(f, kind, w.base_point, w.vector, rng=rng)
        worst_pass = max(worst_pass, -v.estimate)
        npairs += 1
        y_bad = np.asarray(y, dtype=float) * 1.5 + 0.2
        red = oracle.frechet_subgradient_test(f.eval, x, y_bad, rng=rng)
        if not red.passed:
            amb = varcalc.ambient_frechet_test(f, kind, w.base_point,
                                               carrier.apply(y_bad), rng=rng)
            rejects_ok = rejects_ok and (not amb.passed)
    records.append(CheckRecord("frechet-transfer-pass", "convex-corpus", npairs,
                               max(worst_pass, 0.0), oracle.FRECHET_SLACK,
                               worst_pass <= oracle.FRECHET_SLACK))
    records.append(CheckRecord("frechet-transfer-reject", "planted", npairs,
                               0.0 if rejects_ok else 1.0, 0.5, rejects_ok))
    return records


def suite_clarke(trials: int = 256, seed: int = 0) -> List[CheckRecord]:
    """Clarke estimates: cross containment of the two samplers and bounds."""
    records = []
    rng = _rng(seed, 500)
    f = invariants.builtin_function("max")
    kind = sy.eig_sym(2)
    est = varcalc.clarke_subdifferential(f, kind, np.eye(2),
                                         samples_per_radius=trials, rng=rng)
    gap = varcalc.support_gap(est.formula, est.definition, kind, rng=rng)
    records.append(CheckRecord("clarke-cross-containment", "eigsym:2", trials,
                               gap, 5e-3, gap <= 5e-3))
    pts = est.formula.points + est.definition.points
    tr_err = max(abs(float(np.trace(P)) - 1.0) for P in pts)
    eig_err = max(max(0.0, -float(np.linalg.eigvalsh(P)[0])) for P in pts)
    bound = max(tr_err, eig_err)
    records.append(CheckRecord("clarke-hull-bounds", "eigsym:2", len(pts),
                               bound, 1e-6, bound <= 1e-6))

    rng = _rng(seed, 510)
    f2 = invariants.builtin_function("abspowsum", p=2)
    est = varcalc.clarke_subdifferential(f2, sy.eig_sym(2), np.diag([1.0, 3.0]),
                                         radii=(5e-7, 2e-7, 1e-7),
                                         samples_per_radius=32, rng=rng)
    diam = varcalc.hull_diameter(
        varcalc.HullApprox(est.formula.points + est.definition.points), sy.eig_sym(2))
    records.append(CheckRecord("clarke-smooth-collapse", "eigsym:2", 32, diam,
                               1e-5, diam <= 1e-5))

    fl1 = invariants.builtin_function("l1")
    sv = sy.svd_system(2, 2)
    est = varcalc.clarke_subdifferential(fl1, sv, np.diag([3.0, 1.0]),
                                         radii=(5e-7, 2e-7, 1e-7),
                                         samples_per_radius=32, rng=rng)
    diam = varcalc.hull_diameter(
        varcalc.HullApprox(est.formula.points + est.definition.points), sv)
    records.append(CheckRecord("clarke-smooth-collapse", "svd:2x2", 32, diam,
                               1e-5, diam <= 1e-5))

    # stationarity certificate at the closed-form minimizer of |Z|^2 + <Z,B>
    rng = _rng(seed, 520)
    B = sy.eig_sym(3).validate(sy.eig_sym(3).random_ambient(rng))
    psi = varcalc.AmbientFunction(eval=lambda Z: sy.ainner(Z, B),
                                  grad=lambda Z: B)
    rep = varcalc.commutation_check(f2, sy.eig_sym(3), psi, sy.ascale(B, -0.5),
                                    rng=rng)
    records.append(CheckRecord("stationarity-witness", "eigsym:3", 1,
                               rep.residual, 1e-6, rep.found))
    records.append(CheckRecord("stationarity-commutator", "eigsym:3", 1,
                               rep.commutator or 0.0, 1e-8,
                               (rep.commutator or 0.0) <= 1e-8))
    return records


def _lidskii_systems(rng, size_cap=6):
    n = int(rng.integers(2, size_cap + 1))
    return [
        sy.trivial_norm(max(n, 2)),
        sy.eig_sym(max(n, 2)),
        sy.svd_system(n, int(rng.integers(1, size_cap + 1))),
        sy.signed_svd(max(n, 2)),
        sy.product_lift(sy.eig_sym(max(n, 2))),
    ]


def suite_lidskii(trials: int = 200, seed: int = 0) -> List[CheckRecord]:
    """Spectrum shift of additive perturbations against the orbit hull."""
    records = []
    for si, label in enumerate(AXIOM_SYSTEM_NAMES):
        rng = _rng(seed, 600 + si)
        worst_d = 0.0
        worst_scalar = 0.0
        agree = True
        brute_worst = 0.0
        nbrute = 0
        for t in range(trials):
            kind = _lidskii_systems(rng)[si]
            X = kind.validate(kind.random_ambient(rng))
            Y = kind.validate(kind.random_ambient(rng))
            rep = majorize.lidskii_check(kind, X, Y)
            worst_d = max(worst_d, rep.distance)
            if rep.agree is not None:
                agree = agree and rep.agree
            z = rng.standard_normal(kind.spectrum_dim)
            lhs = float(np.dot(kind.spectrum(sy.aadd(X, Y)) - kind.spectrum(X), z))
            rhs = float(np.dot(kind.spectrum(Y), kind.order(z)))
            worst_scalar = max(worst_scalar, lhs - rhs)
            if t < max(5, trials // 5) and kind.spectrum_dim <= 4:
                gy = kind.spectrum(Y)
                v = kind.spectrum(sy.aadd(X, Y)) - kind.spectrum(X)
                bv = oracle.brute_hull_membership(kind, gy, v)
                brute_worst = max(brute_worst, bv.estimate)
                nbrute += 1
        records.append(CheckRecord("orbit-hull-distance", label, trials, worst_d,
                                   1e-7, worst_d <= 1e-7))
        records.append(CheckRecord("scalar-rearrangement-bound", label, trials,
                                   worst_scalar, 1e-9, worst_scalar <= 1e-9))
        if nbrute:
            records.append(CheckRecord("brute-hull-agreement", label, nbrute,
                                       brute_worst, 1e-9, brute_worst <= 1e-9))
        records.append(CheckRecord("majorization-agreement", label, trials,
                                   0.0 if agree else 1.0, 0.5, agree))
    return records


SUITES: Dict[str, Callable[..., List[CheckRecord]]] = {
    "axioms": suite_axioms,
    "projections": suite_projections,
    "normals": suite_normals,
    "subgradients": suite_subgradients,
    "clarke": suite_clarke,
    "lidskii": suite_lidskii,
}


def run_suite(name: str, trials: Optional[int] = None, seed: int = 0) -> dict:
    """Run one suite (or 'all') and assemble the JSON-ready report."""
    from . import __version__

    if name != "all" and name not in SUITES:
        raise InvalidParam("unknown suite %r (choose from %s or 'all')"
                           % (name, ", ".join(sorted(SUITES))))
    t0 = time.time()
    records: List[CheckRecord] = []
    names = list(SUITES) if name == "all" else [name]
    for suite_name in names:
        fn = SUITES[suite_name]
        records.extend(fn(trials, seed) if trials is not None else fn(seed=seed))
    return {
        "schema": SCHEMA_VERSION,
        "artifact_version": __version__,
        "suite": name,
        "seed": seed,
        "trials": trials,
        "checks": [asdict(r) for r in records],
        "pass": all(r.passed for r in records),
        "wall_time_s": time.time() - t0,
    }
