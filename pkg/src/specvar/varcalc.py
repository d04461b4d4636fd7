"""Transfer formulas between reduced-space and ambient-space objects.

Everything a lifted function Phi = f o spectrum or a lifted set inherits from
its reduced counterpart is computed here: values, gradients, Fréchet and
limiting subgradients, projections and distances, normal-cone elements,
Clarke estimates by gradient sampling, and the first-order stationarity
(commutation) check.  Set-valued answers are inner approximations obtained by
sampling reconstruction isometries; every produced witness can be re-verified
by the definition-based tests in the oracle module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from . import oracle
from .errors import (
    InvalidParam,
    NotDifferentiable,
    NotInSet,
    NotLipschitz,
    OracleInconsistency,
    Unsupported,
)
from .invariants import FunctionOracle, SetOracle
from .systems import Ambient, Decomposition, System, aadd, ainner, anorm, ascale, asub

DEFAULT_CLARKE_RADII = (1e-2, 1e-3, 1e-4)


@dataclass
class SubgradientWitness:
    """A candidate ambient (sub)gradient with its construction provenance."""

    base_point: Ambient
    vector: Ambient
    flavor: str  # frechet | limiting | clarke | gradient | normal
    invariant_vector: Optional[np.ndarray] = None
    decomposition: Optional[Decomposition] = None


@dataclass
class HullApprox:
    points: List[Ambient]
    hull: bool = True


@dataclass
class ClarkeEstimate:
    formula: HullApprox
    definition: HullApprox


@dataclass
class AmbientFunction:
    """Smooth ambient function with an explicit gradient (the Psi term)."""

    eval: Callable[[Ambient], float]
    grad: Callable[[Ambient], Ambient]


@dataclass
class Schedule:
    alpha0: float = 1e-2
    ratio: float = 0.5
    steps: int = 20


@dataclass
class CommutationReport:
    found: bool
    residual: float
    commutator: Optional[float]
    witness: Optional[SubgradientWitness] = None


# ---------------------------------------------------------------------------
# coordinates: every ambient-level numeric test runs through an orthonormal
# chart, so the oracle module only ever sees plain R^n functions


def lifted_eval(f: FunctionOracle, kind: System) -> Callable[[np.ndarray], np.ndarray]:
    """The composite value map in ambient coordinates (batch friendly)."""

    def phi(v):
        v = np.asarray(v, dtype=float)
        X = kind.from_coords(v)
        return f.eval(kind.spectrum(X))

    return phi


def eval_spectral(f: FunctionOracle, kind: System, X) -> float:
    f.require_compatible(kind)
    return float(f.eval(kind.spectrum(kind.validate(X))))


def spectral_gradient(f: FunctionOracle, kind: System, X,
                      tie_tol: Optional[float] = None,
                      smooth_check: bool = True) -> Ambient:
    """Gradient of the lifted function via the reconstruction isometry.

    The result does not depend on which reconstruction is used, which is the
    content of the differentiability transfer; `smooth_check` probes the
    reduced function with one-sided quotients before trusting its gradient.
    """
    f.require_compatible(kind)
    X = kind.validate(X)
    g = kind.spectrum(X)
    if f.grad is None:
        raise NotDifferentiable("%s exposes no gradient" % f.name)
    if smooth_check and not oracle.is_smooth_point(f.eval, g, tol=1e-5):
        raise NotDifferentiable("%s is not smooth at the spectrum" % f.name)
    d = kind.decompose(X, tie_tol=tie_tol)
    return d.apply(f.grad(g))


def transfer_frechet_subgradient(y, d: Decomposition, x=None) -> SubgradientWitness:
    """Push a reduced subgradient through a reconstruction isometry.

    The caller asserts y is a Fréchet subgradient of the invariant function
    at x (default: the spectrum recorded in d); the transfer is exact in both
    directions, so a wrong y stays wrong and is caught by the numeric test.
    """
    if x is None:
        if d.spectrum is None:
            raise InvalidParam("decomposition carries no spectrum; pass x explicitly")
        x = d.spectrum
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return SubgradientWitness(
        base_point=d.apply(x),
        vector=d.apply(y),
        flavor="frechet",
        invariant_vector=y,
        decomposition=d,
    )


def _subdifferential(f: FunctionOracle, kind: System, X, flavor: str,
                     samples: int, rng: np.random.Generator,
                     tie_tol: Optional[float]) -> List[SubgradientWitness]:
    f.require_compatible(kind)
    X = kind.validate(X)
    g = kind.spectrum(X)
    source = f.frechet_subdiff if flavor == "frechet" else f.limiting_subdiff
    if source is None:
        raise Unsupported("%s has no %s subdifferential oracle" % (f.name, flavor))
    sub = source(g)
    if sub is None:
        raise Unsupported("%s subdifferential unavailable at this spectrum" % flavor)
    decs = kind.sample_decompositions(X, samples, rng, tie_tol=tie_tol)
    out = []
    for d in decs:
        for y in sub.vertices:
            out.append(SubgradientWitness(
                base_point=X, vector=d.apply(y), flavor=flavor,
                invariant_vector=np.asarray(y, dtype=float), decomposition=d))
    return out


def frechet_subdifferential(f: FunctionOracle, kind: System, X,
                            tie_tol: Optional[float] = None, samples: int = 8,
                            rng: Optional[np.random.Generator] = None) -> List[SubgradientWitness]:
    """Sampled inner approximation of the Fréchet subdifferential of f o spectrum."""
    rng = rng if rng is not None else np.random.default_rng(0)
    return _subdifferential(f, kind, X, "frechet", samples, rng, tie_tol)


def limiting_subdifferential(f: FunctionOracle, kind: System, X,
                             tie_tol: Optional[float] = None, samples: int = 8,
                             rng: Optional[np.random.Generator] = None) -> List[SubgradientWitness]:
    rng = rng if rng is not None else np.random.default_rng(0)
    return _subdifferential(f, kind, X, "limiting", samples, rng, tie_tol)


# ---------------------------------------------------------------------------
# projections and distances


def spectral_project(D: SetOracle, kind: System, X, count: int = 4,
                     rng: Optional[np.random.Generator] = None,
                     tie_tol: Optional[float] = None) -> List[Ambient]:
    """Projections onto the lifted set: project the spectrum, rebuild with
    sampled isometries of X."""
    D.require_compatible(kind)
    X = kind.validate(X)
    rng = rng if rng is not None else np.random.default_rng(0)
    g = kind.spectrum(X)
    res = D.project(g)
    if not res.points:
        raise OracleInconsistency("%s returned an empty projection" % D.name)
    decs = kind.sample_decompositions(X, count, rng, tie_tol=tie_tol)
    return [d.apply(np.asarray(z, dtype=float)) for d in decs for z in res.points]


def spectral_distance(D: SetOracle, kind: System, X) -> float:
    D.require_compatible(kind)
    return D.distance(kind.spectrum(kind.validate(X)))


# ---------------------------------------------------------------------------
# normal cones via the directional distance limit


def directional_distance_limit(dist: Callable[[np.ndarray], float], x: np.ndarray,
                               y: np.ndarray, schedule: Schedule = Schedule()) -> float:
    """Estimate lim_{a -> 0} dist(x + a y) / a by tail extrapolation.

    The quotient of a Lipschitz distance behaves like L - c a near zero, so
    the two-term Richardson update 2 q_k - q_{k-1} removes the linear error;
    the median over the tail guards against irregular steps.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    quots = []
    alpha = schedule.alpha0
    for _ in range(schedule.steps):
        quots.append(dist(x + alpha * y) / alpha)
        alpha *= schedule.ratio
    tail = [2.0 * quots[k] - quots[k - 1] for k in range(len(quots) - 5, len(quots))]
    return float(np.median(tail))


def frechet_normal_membership(D: SetOracle, x, y,
                              schedule: Schedule = Schedule(),
                              tol: float = 1e-4) -> oracle.Verdict:
    """Directional-distance test of y against the normal cone of D at x.

    Passes when the limit of dist(x + a y)/a matches the length of y; an
    inward or tangential y drives the limit strictly below it.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not bool(D.contains(x, 1e-9 * (1.0 + float(np.linalg.norm(x))))):
        raise NotInSet("base point is not in %s" % D.name)
    est = directional_distance_limit(D.distance, x, y, schedule)
    ny = float(np.linalg.norm(y))
    return oracle.Verdict(abs(est - ny) <= tol * (1.0 + ny), est, {"norm": ny})


def ambient_normal_membership(D: SetOracle, kind: System, X, W,
                              schedule: Schedule = Schedule(),
                              tol: float = 1e-4) -> oracle.Verdict:
    """Same test run at the ambient level with the lifted distance."""
    D.require_compatible(kind)
    X = kind.validate(X)
    gtol = 1e-8 * (1.0 + anorm(X))
    if not bool(D.contains(kind.spectrum(X), gtol)):
        raise NotInSet("spectrum of the base point is not in %s" % D.name)

    def dist(v):
        return D.distance(kind.spectrum(kind.from_coords(v)))

    est = directional_distance_limit(dist, kind.to_coords(X), kind.to_coords(W), schedule)
    nw = anorm(W)
    return oracle.Verdict(abs(est - nw) <= tol * (1.0 + nw), est, {"norm": nw})


def spectral_normal_cone_elements(D: SetOracle, kind: System, X, count: int = 4,
                                  rng: Optional[np.random.Generator] = None,
                                  flavor: str = "frechet",
                                  verify: bool = True,
                                  tie_tol: Optional[float] = None) -> List[SubgradientWitness]:
    """Normal-cone elements of the lifted set at X from reduced generators."""
    D.require_compatible(kind)
    X = kind.validate(X)
    rng = rng if rng is not None else np.random.default_rng(0)
    gens_fn = D.frechet_normal_gens if flavor == "frechet" else D.limiting_normal_gens
    if gens_fn is None:
        raise Unsupported("%s exposes no %s normal generators" % (D.name, flavor))
    g = kind.spectrum(X)
    gens = gens_fn(g)
    decs = kind.sample_decompositions(X, count, rng, tie_tol=tie_tol)
    out = []
    for d in decs:
        for y in gens:
            y = np.asarray(y, dtype=float)
            w = SubgradientWitness(base_point=X, vector=d.apply(y), flavor=flavor,
                                   invariant_vector=y, decomposition=d)
            if verify and np.linalg.norm(y) > 0:
                v = ambient_normal_membership(D, kind, X, w.vector)
                if not v.passed:
                    raise OracleInconsistency(
                        "emitted normal fails the ambient limit test "
                        "(estimate %.3e vs %.3e)" % (v.estimate, anorm(w.vector)))
            out.append(w)
    return out


# ---------------------------------------------------------------------------
# Clarke subdifferential by two-sided gradient sampling


def _lipschitz_probe(phi, v0: np.ndarray, radii, rng) -> None:
    ref = float(phi(v0))
    quots = []
    for r in radii:
        u = rng.standard_normal(v0.size)
        u /= np.linalg.norm(u)
        val = float(phi(v0 + r * u))
        if not math.isfinite(val):
            raise NotLipschitz("non-finite value near the base point")
        quots.append(abs(val - ref) / r)
    if max(quots) > 1e8 * (1.0 + abs(ref)):
        raise NotLipschitz("difference quotients diverge near the base point")


def clarke_subdifferential(f: FunctionOracle, kind: System, X,
                           radii: Sequence[float] = DEFAULT_CLARKE_RADII,
                           samples_per_radius: int = 64,
                           rng: Optional[np.random.Generator] = None,
                           tie_tol: Optional[float] = None) -> ClarkeEstimate:
    """Two independent sampled estimates of the Clarke set of f o spectrum.

    Formula side: gradients of the reduced function at smooth points in
    shrinking balls around the spectrum, pushed through freshly sampled
    reconstruction isometries.  Definition side: ambient finite-difference
    gradients of the composite at smooth perturbations of X.  Their hulls
    should agree up to sampling error.
    """
    f.require_compatible(kind)
    X = kind.validate(X)
    rng = rng if rng is not None else np.random.default_rng(0)
    g = kind.spectrum(X)
    scale = 1.0 + float(np.linalg.norm(g))
    m = g.size

    phi = lifted_eval(f, kind)
    v0 = kind.to_coords(X)
    _lipschitz_probe(phi, v0, [r * scale for r in radii], rng)

    # formula side
    reduced_grads = []
    for r in radii:
        for _ in range(samples_per_radius):
            u = rng.standard_normal(m)
            u /= np.linalg.norm(u)
            z = g + (r * scale) * u
            if not oracle.is_smooth_point(f.eval, z, tol=1e-5):
                continue
            gr = f.grad(z) if f.grad is not None else oracle.finite_difference_gradient(
                f.eval, z, 1e-7 * scale)
            reduced_grads.append(np.asarray(gr, dtype=float))
    formula_pts = []
    for gr in reduced_grads:
        d = kind.sample_decompositions(X, 1, rng, tie_tol=tie_tol)[0]
        formula_pts.append(d.apply(gr))

    # definition side
    dim = kind.ambient_dim()
    definition_pts = []
    for r in radii:
        for _ in range(samples_per_radius):
            u = rng.standard_normal(dim)
            u /= np.linalg.norm(u)
            v = v0 + (r * scale) * u
            if not oracle.is_smooth_point(phi, v, tol=1e-5):
                continue
            gr = oracle.finite_difference_gradient(phi, v, 1e-7 * scale)
            definition_pts.append(kind.from_coords(gr))

    return ClarkeEstimate(
        formula=HullApprox(formula_pts, hull=True),
        definition=HullApprox(definition_pts, hull=True),
    )


def support_gap(a: HullApprox, b: HullApprox, kind: System, directions: int = 128,
                rng: Optional[np.random.Generator] = None) -> float:
    """Largest one-sided support-function gap between two sampled hulls."""
    rng = rng if rng is not None else np.random.default_rng(0)
    A = np.array([kind.to_coords(p) for p in a.points])
    B = np.array([kind.to_coords(p) for p in b.points])
    dirs = rng.standard_normal((directions, A.shape[1]))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    ha = np.max(A @ dirs.T, axis=0)
    hb = np.max(B @ dirs.T, axis=0)
    return float(max(np.max(ha - hb), np.max(hb - ha)))


def hull_diameter(a: HullApprox, kind: System) -> float:
    A = np.array([kind.to_coords(p) for p in a.points])
    if A.shape[0] < 2:
        return 0.0
    center = A.mean(axis=0)
    return 2.0 * float(np.max(np.linalg.norm(A - center, axis=1)))


# ---------------------------------------------------------------------------
# commutation / stationarity check


def commutation_check(f: FunctionOracle, kind: System, psi: AmbientFunction, X,
                      tol: float = 1e-6, subgradient_samples: int = 16,
                      decomposition_samples: int = 8,
                      rng: Optional[np.random.Generator] = None,
                      tie_tol: Optional[float] = None) -> CommutationReport:
    """First-order certificate at a (presumed) local minimizer of the sum.

    Searches sampled reduced subgradients and reconstruction isometries for a
    witness with grad Psi(X) + transfer(y) close to zero; for the symmetric
    eigensystem the commutator of X with grad Psi(X) is reported as well.
    """
    f.require_compatible(kind)
    X = kind.validate(X)
    rng = rng if rng is not None else np.random.default_rng(0)
    G = psi.grad(X)
    g = kind.spectrum(X)
    if f.frechet_subdiff is None:
        raise Unsupported("%s has no Fréchet subdifferential oracle" % f.name)
    sub = f.frechet_subdiff(g)
    if sub is None or not sub.vertices:
        raise Unsupported("empty subdifferential at the spectrum")
    vertices = np.array([np.asarray(v, dtype=float) for v in sub.vertices])
    decs = kind.sample_decompositions(X, decomposition_samples, rng, tie_tol=tie_tol)
    # the existence statement picks an isometry aligned with the gradient of
    # Psi; random tie sampling alone cannot land on it
    decs.insert(0, kind.adapted_decomposition(X, ascale(G, -1.0), tie_tol=tie_tol))
    best = math.inf
    best_w = None
    norm_g2 = ainner(G, G)
    for d in decs:
        # with an isometric transfer, | G + apply(y) |^2 factorizes, so the
        # best y over the hull is the minimum-norm point against -adjoint(G)
        gr = d.adjoint(G)
        candidates = [np.asarray(v, dtype=float) for v in vertices]
        if sub.hull and len(vertices) > 1:
            w_opt, _, _, _ = oracle.min_norm_point(vertices, -gr)
            candidates.append(w_opt)
        for y in candidates:
            resid2 = norm_g2 - float(np.dot(gr, gr)) + float(np.dot(gr + y, gr + y))
            resid = math.sqrt(max(resid2, 0.0))
            if resid < best:
                best = resid
                best_w = SubgradientWitness(base_point=X, vector=d.apply(y),
                                            flavor="frechet", invariant_vector=y,
                                            decomposition=d)
    commutator = None
    if type(kind).__name__ == "EigSymSystem":
        commutator = float(np.linalg.norm(X @ G - G @ X))
    return CommutationReport(found=best <= tol, residual=best,
                             commutator=commutator, witness=best_w)


# ---------------------------------------------------------------------------
# proximal machinery (produces stationary points for the commutation check)


def spectral_prox(f: FunctionOracle, kind: System, X, t: float,
                  tie_tol: Optional[float] = None) -> Ambient:
    """Proximal map of t * (f o spectrum) through the reconstruction isometry."""
    f.require_compatible(kind)
    if f.prox is None:
        raise Unsupported("%s has no proximal map" % f.name)
    X = kind.validate(X)
    d = kind.decompose(X, tie_tol=tie_tol)
    return d.apply(f.prox(d.spectrum, t))


def estimate_curvature(psi: AmbientFunction, kind: System, X, iters: int = 30,
                       rng: Optional[np.random.Generator] = None) -> float:
    """Largest curvature of Psi near X by power iteration on finite-difference
    Hessian-vector products."""
    rng = rng if rng is not None else np.random.default_rng(0)
    X = kind.validate(X)
    v = kind.random_direction(rng)
    eps = 1e-6 * (1.0 + anorm(X))
    lam = 1.0
    g0 = psi.grad(X)
    for _ in range(iters):
        hv = ascale(asub(psi.grad(aadd(X, ascale(v, eps))), g0), 1.0 / eps)
        lam = anorm(hv)
        if lam <= 1e-14:
            return 1e-14
        v = ascale(hv, 1.0 / lam)
    return float(lam)


def proximal_gradient(f: FunctionOracle, kind: System, psi: AmbientFunction, X0,
                      step: Optional[float] = None, max_iter: int = 5000,
                      tol: float = 1e-8) -> Ambient:
    """Proximal-gradient descent on (f o spectrum) + Psi with a fixed step."""
    X = kind.validate(X0)
    if step is None:
        L = estimate_curvature(psi, kind, X)
        step = 1.0 / max(L, 1e-12)
    for _ in range(max_iter):
        Xn = spectral_prox(f, kind, asub(X, ascale(psi.grad(X), step)), step)
        move = anorm(asub(Xn, X)) / step
        X = Xn
        if move <= tol * (1.0 + anorm(X)):
            break
    return X


# ---------------------------------------------------------------------------
# definition-based checks of transferred objects (coordinate wrappers)


def ambient_frechet_test(f: FunctionOracle, kind: System, X, W,
                         trials: int = 24, rng: Optional[np.random.Generator] = None,
                         radii: Sequence[float] = oracle.DEFAULT_RADII,
                         slack: float = oracle.FRECHET_SLACK) -> oracle.Verdict:
    """Definition-based Fréchet subgradient test of W for f o spectrum at X."""
    kindX = kind.validate(X)
    phi = lifted_eval(f, kind)
    return oracle.frechet_subgradient_test(
        phi, kind.to_coords(kindX), kind.to_coords(W), trials=trials, rng=rng,
        radii=radii, slack=slack)


def ambient_limiting_test(f: FunctionOracle, kind: System, X, W,
                          directions: Optional[Sequence[Ambient]] = None,
                          rng: Optional[np.random.Generator] = None) -> oracle.Verdict:
    """Definition-based limiting subgradient test at the ambient level."""
    kindX = kind.validate(X)
    phi = lifted_eval(f, kind)
    dirs = None
    if directions is not None:
        dirs = [kind.to_coords(d) for d in directions]
    return oracle.limiting_subgradient_test(
        phi, kind.to_coords(kindX), kind.to_coords(W), directions=dirs, rng=rng)


def ambient_fd_gradient(f: FunctionOracle, kind: System, X,
                        h: Optional[float] = None) -> Ambient:
    """Finite-difference gradient of f o spectrum in ambient coordinates."""
    kindX = kind.validate(X)
    phi = lifted_eval(f, kind)
    return kind.from_coords(oracle.finite_difference_gradient(phi, kind.to_coords(kindX), h))
