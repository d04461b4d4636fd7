"""Library of group-invariant functions and sets with evaluation oracles.

Functions carry their value map plus optional gradient, Fréchet / limiting
subdifferential vertex lists, and proximal map; sets carry tolerant
membership, exact multi-valued projection, and normal-cone generators.  Every
oracle declares the largest (signed-)permutation class it is invariant under,
so callers can refuse incompatible system/oracle pairings up front.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .errors import GroupMismatch, InvalidParam, UnknownOracle
from .systems import GROUP_LEVELS, System

_TIE_EPS = 1e-9
_VERTEX_CAP = 64


@dataclass
class SubdiffSet:
    """Finite vertex list; `hull` means the set is the convex hull of them."""

    vertices: List[np.ndarray]
    hull: bool = True
    exact: bool = True


@dataclass(frozen=True)
class FunctionOracle:
    name: str
    eval: Callable[[np.ndarray], float]
    invariance: str
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    frechet_subdiff: Optional[Callable[[np.ndarray], Optional[SubdiffSet]]] = None
    limiting_subdiff: Optional[Callable[[np.ndarray], Optional[SubdiffSet]]] = None
    prox: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    lipschitz_radius: Optional[float] = None
    params: dict = field(default_factory=dict)

    def compatible_with(self, kind: System) -> bool:
        return GROUP_LEVELS[self.invariance] >= GROUP_LEVELS[kind.group.level]

    def require_compatible(self, kind: System) -> None:
        if not self.compatible_with(kind):
            raise GroupMismatch(
                "%s is %s-invariant only; system %s needs %s invariance"
                % (self.name, self.invariance, kind.name, kind.group.level)
            )


@dataclass
class ProjectionResult:
    points: List[np.ndarray]
    multivalued: bool = False


@dataclass(frozen=True)
class SetOracle:
    name: str
    contains: Callable[[np.ndarray, float], np.ndarray]
    project: Callable[[np.ndarray], ProjectionResult]
    invariance: str
    closed: bool = True
    frechet_normal_gens: Optional[Callable[[np.ndarray], List[np.ndarray]]] = None
    frechet_normal_member: Optional[Callable[[np.ndarray, np.ndarray, float], bool]] = None
    limiting_normal_gens: Optional[Callable[[np.ndarray], List[np.ndarray]]] = None
    limiting_normal_member: Optional[Callable[[np.ndarray, np.ndarray, float], bool]] = None
    params: dict = field(default_factory=dict)

    def distance(self, x: np.ndarray) -> float:
        pts = self.project(np.asarray(x, dtype=float)).points
        return min(float(np.linalg.norm(x - p)) for p in pts)

    def compatible_with(self, kind: System) -> bool:
        return GROUP_LEVELS[self.invariance] >= GROUP_LEVELS[kind.group.level]

    def require_compatible(self, kind: System) -> None:
        if not self.compatible_with(kind):
            raise GroupMismatch(
                "%s is %s-invariant only; system %s needs %s invariance"
                % (self.name, self.invariance, kind.name, kind.group.level)
            )


# ---------------------------------------------------------------------------
# builtin functions


def _sign(x):
    s = np.sign(x)
    return np.where(s == 0, 1.0, s)


def _tie_tol(x):
    return _TIE_EPS * (1.0 + float(np.max(np.abs(x), initial=0.0)))


def _singleton(v):
    return SubdiffSet([np.asarray(v, dtype=float)])


def _f_sum():
    def ev(x):
        return np.sum(x, axis=-1)

    def gr(x):
        return np.ones_like(np.asarray(x, dtype=float))

    return FunctionOracle(
        "sum", ev, "permutation", grad=gr,
        frechet_subdiff=lambda x: _singleton(np.ones(len(x))),
        limiting_subdiff=lambda x: _singleton(np.ones(len(x))),
        prox=lambda x, t: np.asarray(x, dtype=float) - t,
        lipschitz_radius=math.inf,
    )


def _f_powsum(p):
    if p <= 0:
        raise InvalidParam("powsum exponent must be > 0")

    def ev(x):
        x = np.asarray(x, dtype=float)
        bad = np.any(x < 0, axis=-1)
        with np.errstate(invalid="ignore"):
            val = np.sum(np.where(x < 0, 0.0, x) ** p, axis=-1)
        return np.where(bad, np.inf, val)

    def gr(x):
        x = np.asarray(x, dtype=float)
        return p * np.maximum(x, 0.0) ** (p - 1.0)

    return FunctionOracle("powsum(p=%g)" % p, ev, "permutation", grad=gr, params={"p": p})


def _f_abspowsum(p):
    if p <= 0:
        raise InvalidParam("abspowsum exponent must be > 0")

    def ev(x):
        return np.sum(np.abs(x) ** p, axis=-1)

    def gr(x):
        x = np.asarray(x, dtype=float)
        return p * np.abs(x) ** (p - 1.0) * _sign(x)

    prox = None
    fsub = None
    lsub = None
    if p == 2.0:
        def prox(x, t):
            return np.asarray(x, dtype=float) / (1.0 + 2.0 * t)

        def fsub(x):
            return _singleton(2.0 * np.asarray(x, dtype=float))

        lsub = fsub
    return FunctionOracle(
        "abspowsum(p=%g)" % p, ev, "signed", grad=gr,
        frechet_subdiff=fsub, limiting_subdiff=lsub, prox=prox, params={"p": p},
        lipschitz_radius=math.inf if p >= 1 else None,
    )


def _combo_vertices(base, free_idx, choices, cap=_VERTEX_CAP):
    """Vertices obtained by filling `free_idx` slots with each choice tuple."""
    verts = []
    exact = True
    for combo in choices:
        v = base.copy()
        for i, c in zip(free_idx, combo):
            v[i] = c
        verts.append(v)
        if len(verts) >= cap:
            exact = False
            break
    return verts, exact


def _f_max():
    def ev(x):
        return np.max(x, axis=-1)

    def gr(x):
        x = np.asarray(x, dtype=float)
        g = np.zeros_like(x)
        g[int(np.argmax(x))] = 1.0
        return g

    def sub(x):
        x = np.asarray(x, dtype=float)
        tol = _tie_tol(x)
        top = np.flatnonzero(x >= np.max(x) - tol)
        verts = []
        for i in top:
            v = np.zeros_like(x)
            v[i] = 1.0
            verts.append(v)
        return SubdiffSet(verts)

    return FunctionOracle("max", ev, "permutation", grad=gr,
                          frechet_subdiff=sub, limiting_subdiff=sub,
                          lipschitz_radius=math.inf)


def _f_negmin():
    def ev(x):
        return -np.min(x, axis=-1)

    def gr(x):
        x = np.asarray(x, dtype=float)
        g = np.zeros_like(x)
        g[int(np.argmin(x))] = -1.0
        return g

    def sub(x):
        x = np.asarray(x, dtype=float)
        tol = _tie_tol(x)
        bot = np.flatnonzero(x <= np.min(x) + tol)
        verts = []
        for i in bot:
            v = np.zeros_like(x)
            v[i] = -1.0
            verts.append(v)
        return SubdiffSet(verts)

    return FunctionOracle("negmin", ev, "permutation", grad=gr,
                          frechet_subdiff=sub, limiting_subdiff=sub,
                          lipschitz_radius=math.inf)


def _f_topk(k):
    if k < 1:
        raise InvalidParam("topk needs k >= 1")

    def ev(x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] < k:
            raise InvalidParam("topk(k=%d) applied to dimension %d" % (k, x.shape[-1]))
        return np.sum(np.sort(x, axis=-1)[..., -k:], axis=-1)

    def gr(x):
        x = np.asarray(x, dtype=float)
        g = np.zeros_like(x)
        g[np.argsort(-x, kind="stable")[:k]] = 1.0
        return g

    def sub(x):
        x = np.asarray(x, dtype=float)
        tol = _tie_tol(x)
        ordr = np.argsort(-x, kind="stable")
        thr = x[ordr[k - 1]]
        must = np.flatnonzero(x > thr + tol)
        ties = [int(i) for i in np.flatnonzero(np.abs(x - thr) <= tol)]
        base = np.zeros_like(x)
        base[must] = 1.0
        r = k - must.size
        choices = ([1.0 if i in set(combo) else 0.0 for i in ties]
                   for combo in itertools.combinations(ties, r))
        verts, exact = _combo_vertices(base, ties, choices)
        return SubdiffSet(verts, exact=exact)

    return FunctionOracle("topk(k=%d)" % k, ev, "permutation", grad=gr,
                          frechet_subdiff=sub, limiting_subdiff=sub,
                          lipschitz_radius=math.inf, params={"k": k})


def _soft_threshold(x, t):
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _f_l1():
    def ev(x):
        return np.sum(np.abs(x), axis=-1)

    def gr(x):
        return _sign(np.asarray(x, dtype=float))

    def sub(x):
        x = np.asarray(x, dtype=float)
        tol = _tie_tol(x)
        zeros = np.flatnonzero(np.abs(x) <= tol)
        base = np.sign(x)
        base[zeros] = 0.0
        verts, exact = _combo_vertices(
            base, list(zeros), itertools.product((1.0, -1.0), repeat=zeros.size)
        )
        return SubdiffSet(verts, exact=exact)

    return FunctionOracle("l1", ev, "signed", grad=gr,
                          frechet_subdiff=sub, limiting_subdiff=sub,
                          prox=_soft_threshold, lipschitz_radius=math.inf)


def _f_sup_norm():
    def ev(x):
        return np.max(np.abs(x), axis=-1)

    def gr(x):
        x = np.asarray(x, dtype=float)
        g = np.zeros_like(x)
        i = int(np.argmax(np.abs(x)))
        g[i] = _sign(x[i])
        return g

    def sub(x):
        x = np.asarray(x, dtype=float)
        tol = _tie_tol(x)
        m = np.max(np.abs(x))
        verts = []
        if m <= tol:
            for i in range(x.size):
                for s in (1.0, -1.0):
                    v = np.zeros_like(x)
                    v[i] = s
                    verts.append(v)
        else:
            for i in np.flatnonzero(np.abs(x) >= m - tol):
                v = np.zeros_like(x)
                v[i] = _sign(x[i])
                verts.append(v)
        return SubdiffSet(verts)

    return FunctionOracle("sup_norm", ev, "signed", grad=gr,
                          frechet_subdiff=sub, limiting_subdiff=sub,
                          lipschitz_radius=math.inf)


def _f_coordprod():
    def ev(x):
        return np.prod(x, axis=-1)

    def gr(x):
        x = np.asarray(x, dtype=float)
        g = np.empty_like(x)
        for i in range(x.size):
            g[i] = np.prod(np.delete(x, i))
        return g

    return FunctionOracle("coordprod", ev, "permutation", grad=gr,
                          frechet_subdiff=lambda x: _singleton(_f_coordprod_grad(x)),
                          limiting_subdiff=lambda x: _singleton(_f_coordprod_grad(x)))


def _f_coordprod_grad(x):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        g[i] = np.prod(np.delete(x, i))
    return g


def _f_neg_l1():
    """Concave -||.||_1: empty Fréchet subdifferential at any zero coordinate,
    limiting subdifferential equal to the product of one-sided gradient limits."""

    def ev(x):
        return -np.sum(np.abs(x), axis=-1)

    def gr(x):
        return -_sign(np.asarray(x, dtype=float))

    def fsub(x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) <= _tie_tol(x)):
            return SubdiffSet([], hull=False)  # empty: no Fréchet subgradients
        return _singleton(-np.sign(x))

    def lsub(x):
        x = np.asarray(x, dtype=float)
        tol = _tie_tol(x)
        zeros = np.flatnonzero(np.abs(x) <= tol)
        base = -np.sign(x)
        base[zeros] = 0.0
        verts, exact = _combo_vertices(
            base, list(zeros), itertools.product((-1.0, 1.0), repeat=zeros.size)
        )
        return SubdiffSet(verts, hull=False, exact=exact)

    return FunctionOracle("neg_l1", ev, "signed", grad=gr,
                          frechet_subdiff=fsub, limiting_subdiff=lsub,
                          lipschitz_radius=math.inf)


def _f_zero():
    def ev(x):
        return np.zeros(np.asarray(x).shape[:-1])

    z = lambda x: _singleton(np.zeros(len(x)))
    return FunctionOracle("zero", ev, "signed",
                          grad=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                          frechet_subdiff=z, limiting_subdiff=z,
                          prox=lambda x, t: np.asarray(x, dtype=float).copy(),
                          lipschitz_radius=math.inf)


_FUNCTION_BUILDERS: Dict[str, Callable[..., FunctionOracle]] = {
    "sum": _f_sum,
    "powsum": _f_powsum,
    "abspowsum": _f_abspowsum,
    "max": _f_max,
    "negmin": _f_negmin,
    "topk": _f_topk,
    "l1": _f_l1,
    "sup_norm": _f_sup_norm,
    "coordprod": _f_coordprod,
    "neg_l1": _f_neg_l1,
    "zero": _f_zero,
}


def builtin_function(name: str, for_kind: Optional[System] = None, **params) -> FunctionOracle:
    try:
        builder = _FUNCTION_BUILDERS[name]
    except KeyError as exc:
        raise UnknownOracle("no builtin function named %r" % name) from exc
    try:
        f = builder(**params)
    except TypeError as exc:
        raise InvalidParam("bad parameters for %s: %s" % (name, exc)) from exc
    if for_kind is not None:
        f.require_compatible(for_kind)
    return f


# ---------------------------------------------------------------------------
# builtin sets


def _tolcol(tol):
    # scalar or per-row tolerance broadcast against the coordinate axis
    t = np.asarray(tol, dtype=float)
    return t[..., None]


def _s_orthant():
    def contains(z, tol=0.0):
        z = np.asarray(z, dtype=float)
        return np.all(z >= -_tolcol(tol), axis=-1)

    def project(x):
        return ProjectionResult([np.maximum(np.asarray(x, dtype=float), 0.0)])

    def gens(x):
        x = np.asarray(x, dtype=float)
        active = np.flatnonzero(x <= _tie_tol(x))
        out = [np.zeros_like(x)]
        for i in active:
            e = np.zeros_like(x)
            e[i] = -1.0
            out.append(e)
        if active.size > 1:
            s = np.zeros_like(x)
            s[active] = -1.0
            out.append(s)
        return out

    def member(x, y, tol=1e-9):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        active = x <= _tie_tol(x)
        return bool(np.all(y[active] <= tol) and np.all(np.abs(y[~active]) <= tol))

    return SetOracle("orthant", contains, project, "permutation",
                     frechet_normal_gens=gens, frechet_normal_member=member,
                     limiting_normal_gens=gens, limiting_normal_member=member)


def _s_box(r):
    if r <= 0:
        raise InvalidParam("box radius must be > 0")

    def contains(z, tol=0.0):
        z = np.asarray(z, dtype=float)
        return np.all(np.abs(z) <= r + _tolcol(tol), axis=-1)

    def project(x):
        return ProjectionResult([np.clip(np.asarray(x, dtype=float), -r, r)])

    def gens(x):
        x = np.asarray(x, dtype=float)
        tol = _tie_tol(x)
        out = [np.zeros_like(x)]
        hit = np.flatnonzero(np.abs(x) >= r - tol)
        for i in hit:
            e = np.zeros_like(x)
            e[i] = _sign(x[i])
            out.append(e)
        if hit.size > 1:
            s = np.zeros_like(x)
            s[hit] = _sign(x[hit])
            out.append(s)
        return out

    def member(x, y, tol=1e-9):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        btol = _tie_tol(x)
        ok = True
        for i in range(x.size):
            if x[i] >= r - btol:
                ok = ok and y[i] >= -tol
            elif x[i] <= -r + btol:
                ok = ok and y[i] <= tol
            else:
                ok = ok and abs(y[i]) <= tol
        return bool(ok)

    return SetOracle("box(r=%g)" % r, contains, project, "signed",
                     frechet_normal_gens=gens, frechet_normal_member=member,
                     limiting_normal_gens=gens, limiting_normal_member=member,
                     params={"r": r})


def _s_sphere(r):
    if r <= 0:
        raise InvalidParam("sphere radius must be > 0")

    def contains(z, tol=0.0):
        z = np.asarray(z, dtype=float)
        return np.abs(np.linalg.norm(z, axis=-1) - r) <= tol

    def project(x):
        x = np.asarray(x, dtype=float)
        n = np.linalg.norm(x)
        if n == 0.0:
            p = np.zeros_like(x)
            p[0] = r
            return ProjectionResult([p], multivalued=True)
        return ProjectionResult([(r / n) * x])

    def gens(x):
        x = np.asarray(x, dtype=float)
        return [x.copy(), -x]

    def member(x, y, tol=1e-9):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        nx2 = float(np.dot(x, x))
        if nx2 == 0.0:
            return True
        resid = y - (float(np.dot(x, y)) / nx2) * x
        return bool(np.linalg.norm(resid) <= tol * (1.0 + np.linalg.norm(y)))

    return SetOracle("sphere(r=%g)" % r, contains, project, "signed",
                     frechet_normal_gens=gens, frechet_normal_member=member,
                     limiting_normal_gens=gens, limiting_normal_member=member,
                     params={"r": r})


def _s_ball(r):
    if r <= 0:
        raise InvalidParam("ball radius must be > 0")

    def contains(z, tol=0.0):
        z = np.asarray(z, dtype=float)
        return np.linalg.norm(z, axis=-1) <= r + tol

    def project(x):
        x = np.asarray(x, dtype=float)
        n = np.linalg.norm(x)
        if n <= r:
            return ProjectionResult([x.copy()])
        return ProjectionResult([(r / n) * x])

    def gens(x):
        x = np.asarray(x, dtype=float)
        if np.linalg.norm(x) < r - _tie_tol(x):
            return [np.zeros_like(x)]
        return [np.zeros_like(x), x.copy()]

    def member(x, y, tol=1e-9):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if np.linalg.norm(x) < r - _tie_tol(x):
            return bool(np.linalg.norm(y) <= tol)
        t = float(np.dot(x, y)) / max(float(np.dot(x, x)), 1e-300)
        return bool(t >= -tol and np.linalg.norm(y - t * x) <= tol * (1.0 + np.linalg.norm(y)))

    return SetOracle("ball(r=%g)" % r, contains, project, "signed",
                     frechet_normal_gens=gens, frechet_normal_member=member,
                     limiting_normal_gens=gens, limiting_normal_member=member,
                     params={"r": r})


def _s_sparse(k):
    if k < 1:
        raise InvalidParam("sparse needs k >= 1")

    def contains(z, tol=0.0):
        z = np.asarray(z, dtype=float)
        if z.shape[-1] <= k:
            return np.ones(z.shape[:-1], dtype=bool)
        small = np.sort(np.abs(z), axis=-1)[..., : z.shape[-1] - k]
        return np.all(small <= _tolcol(tol), axis=-1)

    def project(x):
        x = np.asarray(x, dtype=float)
        n = x.size
        if n <= k:
            return ProjectionResult([x.copy()])
        tol = _tie_tol(x)
        mags = np.abs(x)
        ordr = np.argsort(-mags, kind="stable")
        thr = mags[ordr[k - 1]]
        must = np.flatnonzero(mags > thr + tol)
        ties = [i for i in np.flatnonzero(np.abs(mags - thr) <= tol) if i not in set(must)]
        r = k - must.size
        pts = []
        multi = False
        for combo in itertools.combinations(ties, r):
            p = np.zeros_like(x)
            keep = list(must) + list(combo)
            p[keep] = x[keep]
            pts.append(p)
            if len(pts) >= 32:
                multi = True
                break
        if len(pts) > 1:
            multi = True
        return ProjectionResult(pts, multivalued=multi)

    def fgens(x):
        x = np.asarray(x, dtype=float)
        supp = np.flatnonzero(np.abs(x) > _tie_tol(x))
        out = [np.zeros_like(x)]
        if supp.size == k:
            for i in range(x.size):
                if i in set(supp):
                    continue
                for s in (1.0, -1.0):
                    e = np.zeros_like(x)
                    e[i] = s
                    out.append(e)
        return out

    def fmember(x, y, tol=1e-9):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        supp = np.abs(x) > _tie_tol(x)
        if int(np.sum(supp)) < k:
            return bool(np.linalg.norm(y) <= tol)
        return bool(np.all(np.abs(y[supp]) <= tol))

    def lgens(x):
        x = np.asarray(x, dtype=float)
        out = [np.zeros_like(x)]
        supp = set(np.flatnonzero(np.abs(x) > _tie_tol(x)))
        for i in range(x.size):
            if i in supp:
                continue
            for s in (1.0, -1.0):
                e = np.zeros_like(x)
                e[i] = s
                out.append(e)
        return out

    def lmember(x, y, tol=1e-9):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        supp = np.abs(x) > _tie_tol(x)
        return bool(np.all(np.abs(y[supp]) <= tol))

    return SetOracle("sparse(k=%d)" % k, contains, project, "signed",
                     frechet_normal_gens=fgens, frechet_normal_member=fmember,
                     limiting_normal_gens=lgens, limiting_normal_member=lmember,
                     params={"k": k})


_SET_BUILDERS: Dict[str, Callable[..., SetOracle]] = {
    "orthant": _s_orthant,
    "box": _s_box,
    "sphere": _s_sphere,
    "ball": _s_ball,
    "sparse": _s_sparse,
}


def builtin_set(name: str, for_kind: Optional[System] = None, **params) -> SetOracle:
    try:
        builder = _SET_BUILDERS[name]
    except KeyError as exc:
        raise UnknownOracle("no builtin set named %r" % name) from exc
    try:
        d = builder(**params)
    except TypeError as exc:
        raise InvalidParam("bad parameters for %s: %s" % (name, exc)) from exc
    if for_kind is not None:
        d.require_compatible(for_kind)
    return d


def epigraph_set(f: FunctionOracle, mu_hi: float = 1e8) -> SetOracle:
    """Epigraph of a convex function with a proximal map, as a set oracle.

    The projection of an outside point (x, xi) is (prox_{mu f}(x), xi + mu)
    where the scalar mu > 0 is pinned by bisection on
    f(prox_{mu f}(x)) - xi - mu, which decreases monotonically for convex f.
    """
    if f.prox is None:
        raise InvalidParam("epigraph projection needs a prox for %s" % f.name)

    def contains(z, tol=0.0):
        z = np.asarray(z, dtype=float)
        return f.eval(z[..., :-1]) <= z[..., -1] + tol

    def project(z):
        z = np.asarray(z, dtype=float)
        x, xi = z[:-1], float(z[-1])
        if float(f.eval(x)) <= xi:
            return ProjectionResult([z.copy()])
        lo, hi = 0.0, 1.0
        while float(f.eval(f.prox(x, hi))) - xi - hi > 0.0:
            hi *= 2.0
            if hi > mu_hi:
                break
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if float(f.eval(f.prox(x, mid))) - xi - mid > 0.0:
                lo = mid
            else:
                hi = mid
        mu = 0.5 * (lo + hi)
        p = f.prox(x, mu)
        return ProjectionResult([np.append(p, xi + mu)])

    return SetOracle("epi(%s)" % f.name, contains, project, f.invariance)


def parse_oracle_spec(spec: str) -> Tuple[str, dict]:
    """Parse `"sparse:k=1"` / `"abspowsum:p=0.5"` into a name and params."""
    name, _, rest = spec.strip().partition(":")
    params: dict = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise InvalidParam("bad oracle parameter %r" % item)
            try:
                params[key.strip()] = int(val)
            except ValueError:
                try:
                    params[key.strip()] = float(val)
                except ValueError as exc:
                    raise InvalidParam("bad oracle parameter %r" % item) from exc
    return name, params


# ---------------------------------------------------------------------------
# invariance checking


@dataclass
class InvarianceReport:
    max_violation: float
    trials: int
    worst: dict = field(default_factory=dict)


def _eval_gap(a: float, b: float) -> float:
    if math.isinf(a) and math.isinf(b) and (a > 0) == (b > 0):
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return abs(a - b)


def check_invariance(oracle, kind: System, trials: int, rng: np.random.Generator) -> InvarianceReport:
    """Probe eval(s.x) = eval(x) over the group and eval(spectrum(apply(x))) =
    eval(x) over sampled decompositions; returns the worst violation seen."""
    is_set = isinstance(oracle, SetOracle)
    m = kind.spectrum_dim
    worst = 0.0
    info: dict = {}
    try:
        elements = kind.group.enumerate(cap=5000)
    except Exception:
        elements = None
    for t in range(trials):
        x = rng.standard_normal(m)
        if is_set:
            fx = 1.0 if bool(oracle.contains(x, 1e-12)) else 0.0
        else:
            fx = float(oracle.eval(x))
        s = elements[t % len(elements)] if elements else kind.group.random(rng)
        sx = s.apply(x)
        fsx = (1.0 if bool(oracle.contains(sx, 1e-12)) else 0.0) if is_set else float(oracle.eval(sx))
        gap = _eval_gap(fx, fsx)
        if gap > worst:
            worst, info = gap, {"x": x.copy(), "element": s, "route": "group"}
        # decomposition route: x -> apply -> spectrum should leave eval unchanged
        Z = kind.random_ambient(rng)
        d = kind.decompose(Z)
        fx2 = kind.spectrum(d.apply(x))
        flift = (1.0 if bool(oracle.contains(fx2, 1e-12)) else 0.0) if is_set else float(oracle.eval(fx2))
        gap = _eval_gap(fx, flift)
        if gap > worst:
            worst, info = gap, {"x": x.copy(), "route": "decomposition"}
    return InvarianceReport(max_violation=worst, trials=trials, worst=info)
