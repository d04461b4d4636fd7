"""Orbit-hull geometry: support oracle, hull distance, majorization checks.

The central object is the convex hull of a group orbit conv{s.y : s in S}.
Membership and distance queries run a Wolfe-style minimum-norm-point scheme
whose only access to the hull is the closed-form support oracle
max_s <c, s.y> = <tau(c), tau(y)>, so the cost stays polynomial even though
the group grows factorially.  Classical majorization partial-sum tests give
an independent closed form for the permutation and signed-permutation groups,
and the additive-perturbation check compares the spectrum shift of X + Y
against the orbit hull of the spectrum of Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidParam, Unconverged, Unsupported
from .systems import GroupElement, System


@dataclass
class HullCertificate:
    """Outcome of a hull-distance computation.

    `convex_coefficients` reconstruct the nearest point as a convex
    combination of orbit points; `separating_direction` is only set when the
    query point lies outside by more than the tolerance.
    """

    distance: float
    nearest: np.ndarray
    convex_coefficients: List[Tuple[GroupElement, float]]
    separating_direction: Optional[np.ndarray] = None
    gap: float = 0.0
    iterations: int = 0

    def reconstruct(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(y, dtype=float))
        for s, w in self.convex_coefficients:
            out += w * s.apply(y)
        return out


@dataclass
class MajorizationVerdict:
    passed: bool
    worst_margin: float
    detail: dict = field(default_factory=dict)


@dataclass
class PerturbationReport:
    passed: bool
    distance: float
    certificate: HullCertificate
    majorization: Optional[MajorizationVerdict] = None
    agree: Optional[bool] = None


def support_oracle(kind: System, c, y) -> Tuple[float, GroupElement]:
    """Maximum of <c, s.y> over the group, with a maximizer.

    Equals <tau(c), tau(y)> by the rearrangement inequality; the maximizer
    aligns the sorted entries (and sign patterns, for signed groups, with a
    parity repair on the cheapest slot for the even-signed group).
    """
    c = np.asarray(c, dtype=float)
    y = np.asarray(y, dtype=float)
    if c.shape != (kind.spectrum_dim,) or y.shape != (kind.spectrum_dim,):
        raise InvalidParam("support oracle arguments must live in the reduced space")
    s = kind.group.align(c, y)
    return float(np.dot(c, s.apply(y))), s


def orbit_hull_distance(kind: System, y, x, tol: float = 1e-7,
                        max_iter: int = 10000) -> HullCertificate:
    """Distance from x to conv(S.y) with a convex-combination certificate.

    Wolfe minimum-norm-point scheme over the implicitly defined hull: the
    linear subproblem is the support oracle, the corral is re-solved by an
    equality-constrained least squares, and the duality gap certifies the
    result.  Terminates once the gap guarantees the distance estimate is
    within `tol`, emitting a separating direction for outside points.
    """
    if tol <= 0:
        raise InvalidParam("tol must be > 0")
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    scale = max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(y)))
    # the gap bottoms out at the cancellation noise of <x - w, v - w>
    noise = 64.0 * np.finfo(float).eps * scale * scale * max(1, x.size)
    gap_tol = max(0.5 * tol * tol, noise)

    _, s0 = support_oracle(kind, x, y)
    elements = [s0]
    points = [s0.apply(y)]
    lam = np.array([1.0])
    w = points[0].copy()
    gap = math.inf
    best_gap = math.inf
    stalled = 0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        cdir = x - w
        val, s_new = support_oracle(kind, cdir, y)
        gap = val - float(np.dot(w, cdir))
        if gap <= gap_tol:
            break
        if gap < best_gap - noise:
            best_gap = gap
            stalled = 0
        else:
            stalled += 1
            if stalled >= 50:
                # no measurable progress: the iterate sits at the numerical
                # floor of this corral
                break
        v_new = s_new.apply(y)
        if any(np.allclose(v_new, p, atol=1e-13 * scale) for p in points):
            # support oracle has no new vertex: numerically converged
            break
        elements.append(s_new)
        points.append(v_new)
        lam = np.append(lam, 0.0)
        for _ in range(200):
            V = np.array(points)
            alpha = _affine_minimizer(V, x)
            if np.min(alpha) >= -1e-12:
                lam = np.clip(alpha, 0.0, None)
                tot = lam.sum()
                lam = lam / tot if tot > 0 else np.full(len(points), 1.0 / len(points))
                w = lam @ V
                break
            shrink = alpha < lam
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(shrink & (alpha < 0), lam / (lam - alpha), np.inf)
            theta = float(np.min(ratios))
            lam = (1.0 - theta) * lam + theta * alpha
            lam[lam < 1e-12] = 0.0
            keepers = [i for i, l in enumerate(lam) if l > 0.0]
            if not keepers:
                keepers = [int(np.argmax(lam))]
                lam[keepers[0]] = 1.0
            elements = [elements[i] for i in keepers]
            points = [points[i] for i in keepers]
            lam = lam[keepers]
            lam = lam / lam.sum()
            w = lam @ np.array(points)
    else:
        raise Unconverged(
            "hull distance did not converge in %d iterations" % max_iter,
            partial=HullCertificate(
                distance=float(np.linalg.norm(x - w)),
                nearest=w,
                convex_coefficients=list(zip(elements, lam.tolist())),
                gap=gap,
                iterations=iterations,
            ),
        )

    dist = float(np.linalg.norm(x - w))
    sep = None
    if dist > tol:
        sep = (x - w) / dist
    return HullCertificate(
        distance=dist,
        nearest=w,
        convex_coefficients=list(zip(elements, lam.tolist())),
        separating_direction=sep,
        gap=gap,
        iterations=iterations,
    )


def _affine_minimizer(V: np.ndarray, x: np.ndarray) -> np.ndarray:
    k = V.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * (V @ V.T)
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[:k] = 2.0 * (V @ x)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[:k]


def majorization_inequalities(group_kind: str, x, y, tol: float = 1e-9) -> MajorizationVerdict:
    """Closed-form hull membership for the permutation and signed groups.

    Permutations: the sums agree and every partial sum of the decreasing
    rearrangement of x is dominated by that of y.  Signed permutations: the
    partial sums of the decreasing absolute rearrangements are dominated.
    The even-signed group has no such closed form here and is refused.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if group_kind == "permutation":
        xs = -np.sort(-x)
        ys = -np.sort(-y)
        margins = np.cumsum(ys) - np.cumsum(xs)
        sum_gap = abs(float(np.sum(x) - np.sum(y)))
        worst = min(float(np.min(margins[:-1])) if x.size > 1 else 0.0, tol - sum_gap)
        passed = sum_gap <= tol and bool(np.all(margins[:-1] >= -tol))
        return MajorizationVerdict(passed, worst, {"sum_gap": sum_gap})
    if group_kind == "signed":
        xs = np.sort(np.abs(x))[::-1]
        ys = np.sort(np.abs(y))[::-1]
        margins = np.cumsum(ys) - np.cumsum(xs)
        worst = float(np.min(margins))
        return MajorizationVerdict(bool(np.all(margins >= -tol)), worst, {})
    if group_kind == "even_signed":
        raise Unsupported("even-signed hulls have no partial-sum form here; "
                          "use orbit_hull_distance")
    raise InvalidParam("unknown group kind %r" % group_kind)


_CLOSED_FORM_GROUPS = {
    "PermutationGroup": "permutation",
    "SignedPermutationGroup": "signed",
}


def lidskii_check(kind: System, X, Y, tol: float = 1e-7) -> PerturbationReport:
    """Spectrum shift of an additive perturbation against the orbit hull.

    Computes v = spectrum(X + Y) - spectrum(X) and certifies that v lies in
    conv(S . spectrum(Y)) within `tol`; when the group has a classical
    partial-sum characterization the two verdicts are cross-checked.
    """
    X = kind.validate(X)
    Y = kind.validate(Y)
    from .systems import aadd  # local import to avoid cycles in doc tooling

    gx = kind.spectrum(X)
    gy = kind.spectrum(Y)
    gxy = kind.spectrum(aadd(X, Y))
    v = gxy - gx
    cert = orbit_hull_distance(kind, gy, v, tol=tol)
    passed = cert.distance <= tol
    group_name = type(kind.group).__name__
    maj = None
    agree = None
    if group_name in _CLOSED_FORM_GROUPS:
        maj = majorization_inequalities(_CLOSED_FORM_GROUPS[group_name], v, gy)
        agree = maj.passed == passed
    return PerturbationReport(passed=passed, distance=cert.distance,
                              certificate=cert, majorization=maj, agree=agree)
