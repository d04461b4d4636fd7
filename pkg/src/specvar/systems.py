"""Spectral decomposition systems over dense real matrices.

A system bundles a Euclidean ambient space, a reduced coordinate space, the
ordered spectrum map ``spectrum`` (eigenvalues, singular values, or signed
singular values), the orbit-canonical reordering ``order``, a finite group of
(signed) permutations acting on the reduced space, and constructive access to
the linear isometries that rebuild an ambient point from its spectrum.

Five concrete systems are provided:

* ``trivial_norm(n)``   -- the Euclidean norm on R^n, reduced space R;
* ``eig_sym(n)``        -- real symmetric matrices under eigendecomposition;
* ``svd_system(m, n)``  -- rectangular matrices under full SVD;
* ``signed_svd(n)``     -- square matrices under the SO(n) x SO(n) SVD whose
                           last singular value carries the determinant sign;
* ``product_lift(sys)`` -- the direct sum of any of the above with R (used to
                           reach epigraphs of lifted functions).

All operations are pure; randomized ones take an explicit ``numpy`` Generator.
"""

from __future__ import annotations

import itertools
import math
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import (
    InvalidData,
    InvalidParam,
    InvalidShape,
    NumericalFailure,
    TooLarge,
    Unsupported,
)

Ambient = Union[np.ndarray, Tuple[np.ndarray, float]]

DEFAULT_GROUP_CAP = 10**6

# Invariance classes form a chain: permutations < even-signed < signed.
GROUP_LEVELS = {"permutation": 0, "even_signed": 1, "signed": 2}


# ---------------------------------------------------------------------------
# ambient arithmetic, tuple-aware (product ambients carry a trailing scalar)


def aadd(a: Ambient, b: Ambient) -> Ambient:
    if isinstance(a, tuple):
        return (aadd(a[0], b[0]), a[1] + b[1])
    return a + b


def asub(a: Ambient, b: Ambient) -> Ambient:
    if isinstance(a, tuple):
        return (asub(a[0], b[0]), a[1] - b[1])
    return a - b


def ascale(a: Ambient, t: float) -> Ambient:
    if isinstance(a, tuple):
        return (ascale(a[0], t), t * a[1])
    return t * a


def ainner(a: Ambient, b: Ambient) -> float:
    """Frobenius inner product, extended additively to (matrix, scalar) pairs."""
    if isinstance(a, tuple):
        return ainner(a[0], b[0]) + a[1] * b[1]
    return float(np.vdot(a, b))


def anorm(a: Ambient) -> float:
    return math.sqrt(max(ainner(a, a), 0.0))


def _finite_array(x, shape_hint="") -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidData("non-finite entries%s" % (" in " + shape_hint if shape_hint else ""))
    return a


def haar_orthogonal(rng: np.random.Generator, k: int) -> np.ndarray:
    """Haar-distributed element of O(k) via sign-fixed QR."""
    g = rng.standard_normal((k, k))
    q, r = np.linalg.qr(g)
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


def haar_special_orthogonal(rng: np.random.Generator, k: int) -> np.ndarray:
    q = haar_orthogonal(rng, k)
    if np.linalg.det(q) < 0:
        q = q.copy()
        q[:, 0] = -q[:, 0]
    return q


# ---------------------------------------------------------------------------
# group elements and groups


class GroupElement:
    """Signed permutation acting on the reduced space.

    The action is ``(s.x)[i] = signs[i] * x[perm[i]]``, i.e. the matrix with
    ``M[i, perm[i]] = signs[i]`` applied to ``x``.
    """

    __slots__ = ("perm", "signs")

    def __init__(self, perm, signs):
        self.perm = np.asarray(perm, dtype=np.intp)
        self.signs = np.asarray(signs, dtype=float)
        if self.perm.shape != self.signs.shape:
            raise InvalidParam("perm and signs must have equal length")

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.signs * x[..., self.perm]

    def compose(self, other: "GroupElement") -> "GroupElement":
        # (self o other) . x = self . (other . x)
        perm = other.perm[self.perm]
        signs = self.signs * other.signs[self.perm]
        return GroupElement(perm, signs)

    def inverse(self) -> "GroupElement":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return GroupElement(inv, self.signs[inv])

    def matrix(self) -> np.ndarray:
        m = self.perm.size
        out = np.zeros((m, m))
        out[np.arange(m), self.perm] = self.signs
        return out

    def key(self):
        return (tuple(int(p) for p in self.perm), tuple(int(s) for s in self.signs))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "GroupElement(perm=%s, signs=%s)" % (list(self.perm), list(self.signs.astype(int)))


def identity_element(m: int) -> GroupElement:
    return GroupElement(np.arange(m), np.ones(m))


class PermutationGroup:
    """Full symmetric group on m coordinates."""

    level = "permutation"

    def __init__(self, m: int):
        self.m = m

    def size(self) -> int:
        return math.factorial(self.m)

    def tau(self, x: np.ndarray) -> np.ndarray:
        """Canonical orbit representative: entries sorted in decreasing order."""
        return -np.sort(-np.asarray(x, dtype=float), axis=-1)

    def random(self, rng: np.random.Generator) -> GroupElement:
        return GroupElement(rng.permutation(self.m), np.ones(self.m))

    def enumerate(self, cap: int = DEFAULT_GROUP_CAP) -> List[GroupElement]:
        if self.size() > cap:
            raise TooLarge("group of size %d exceeds cap %d" % (self.size(), cap))
        ones = np.ones(self.m)
        return [GroupElement(np.array(p), ones) for p in itertools.permutations(range(self.m))]

    def align(self, c: np.ndarray, y: np.ndarray) -> GroupElement:
        """Element s maximizing <c, s.y>: pair the sorted entries."""
        c = np.asarray(c, dtype=float)
        y = np.asarray(y, dtype=float)
        ac = np.argsort(-c, kind="stable")
        ay = np.argsort(-y, kind="stable")
        perm = np.empty(self.m, dtype=np.intp)
        perm[ac] = ay
        return GroupElement(perm, np.ones(self.m))


class SignedPermutationGroup:
    """Signed permutations: arbitrary sign flips composed with permutations."""

    level = "signed"

    def __init__(self, m: int):
        self.m = m

    def size(self) -> int:
        return (2**self.m) * math.factorial(self.m)

    def tau(self, x: np.ndarray) -> np.ndarray:
        """Absolute values sorted decreasingly."""
        return np.sort(np.abs(np.asarray(x, dtype=float)), axis=-1)[..., ::-1]

    def random(self, rng: np.random.Generator) -> GroupElement:
        signs = rng.integers(0, 2, self.m) * 2.0 - 1.0
        return GroupElement(rng.permutation(self.m), signs)

    def enumerate(self, cap: int = DEFAULT_GROUP_CAP) -> List[GroupElement]:
        if self.size() > cap:
            raise TooLarge("group of size %d exceeds cap %d" % (self.size(), cap))
        out = []
        for p in itertools.permutations(range(self.m)):
            for s in itertools.product((1.0, -1.0), repeat=self.m):
                out.append(GroupElement(np.array(p), np.array(s)))
        return out

    def _signed_align(self, c, y):
        c = np.asarray(c, dtype=float)
        y = np.asarray(y, dtype=float)
        ac = np.argsort(-np.abs(c), kind="stable")
        ay = np.argsort(-np.abs(y), kind="stable")
        perm = np.empty(self.m, dtype=np.intp)
        perm[ac] = ay
        sc = np.where(c[ac] < 0, -1.0, 1.0)
        sy = np.where(y[ay] < 0, -1.0, 1.0)
        signs = np.empty(self.m)
        signs[ac] = sc * sy
        return perm, signs, ac

    def align(self, c: np.ndarray, y: np.ndarray) -> GroupElement:
        perm, signs, _ = self._signed_align(c, y)
        return GroupElement(perm, signs)


class EvenSignedPermutationGroup(SignedPermutationGroup):
    """Signed permutations with an even number of -1 entries."""

    level = "even_signed"

    def size(self) -> int:
        return (2 ** (self.m - 1)) * math.factorial(self.m)

    def tau(self, x: np.ndarray) -> np.ndarray:
        """Sorted absolute values; the last entry keeps the sign parity of x."""
        x = np.asarray(x, dtype=float)
        mag = np.sort(np.abs(x), axis=-1)[..., ::-1].copy()
        odd = np.sum(x < 0, axis=-1) % 2 == 1
        mag[..., -1] = np.where(odd, -mag[..., -1], mag[..., -1])
        return mag

    def random(self, rng: np.random.Generator) -> GroupElement:
        signs = rng.integers(0, 2, self.m) * 2.0 - 1.0
        if np.prod(signs) < 0:
            signs[rng.integers(self.m)] *= -1.0
        return GroupElement(rng.permutation(self.m), signs)

    def enumerate(self, cap: int = DEFAULT_GROUP_CAP) -> List[GroupElement]:
        if self.size() > cap:
            raise TooLarge("group of size %d exceeds cap %d" % (self.size(), cap))
        out = []
        for p in itertools.permutations(range(self.m)):
            for s in itertools.product((1.0, -1.0), repeat=self.m):
                if (s.count(-1.0) % 2) == 0:
                    out.append(GroupElement(np.array(p), np.array(s)))
        return out

    def align(self, c: np.ndarray, y: np.ndarray) -> GroupElement:
        # Signed alignment, then parity repair on the cheapest coordinate:
        # both sorted magnitude sequences decrease, so the final pair loses
        # the least inner-product value when flipped.
        perm, signs, ac = self._signed_align(c, y)
        if np.prod(signs) < 0:
            signs = signs.copy()
            signs[ac[-1]] *= -1.0
        return GroupElement(perm, signs)


class ProductGroup:
    """Inner group acting on the leading coordinates, last coordinate fixed."""

    def __init__(self, inner):
        self.inner = inner
        self.m = inner.m + 1
        self.level = inner.level

    def size(self) -> int:
        return self.inner.size()

    def tau(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.concatenate([self.inner.tau(x[..., :-1]), x[..., -1:]], axis=-1)

    def _extend(self, s: GroupElement) -> GroupElement:
        perm = np.concatenate([s.perm, [self.m - 1]])
        signs = np.concatenate([s.signs, [1.0]])
        return GroupElement(perm, signs)

    def random(self, rng: np.random.Generator) -> GroupElement:
        return self._extend(self.inner.random(rng))

    def enumerate(self, cap: int = DEFAULT_GROUP_CAP) -> List[GroupElement]:
        return [self._extend(s) for s in self.inner.enumerate(cap)]

    def align(self, c: np.ndarray, y: np.ndarray) -> GroupElement:
        return self._extend(self.inner.align(np.asarray(c)[:-1], np.asarray(y)[:-1]))


# ---------------------------------------------------------------------------
# decompositions


class Decomposition:
    """One linear isometry from the reduced space into the ambient space.

    Carries the spectrum of the point it was computed from, so it can act both
    as the isometry (``apply``/``adjoint``) and as a spectral factorization
    handle (``base_point`` reconstructs the original input).
    """

    def __init__(self, system: "System", factors, spectrum: Optional[np.ndarray] = None):
        self.system = system
        self.factors = factors
        self.spectrum = None if spectrum is None else np.asarray(spectrum, dtype=float)

    def apply(self, x) -> Ambient:
        return self.system._apply(self.factors, np.asarray(x, dtype=float))

    def adjoint(self, X: Ambient) -> np.ndarray:
        return self.system._adjoint(self.factors, X)

    def base_point(self) -> Ambient:
        if self.spectrum is None:
            raise InvalidParam("decomposition has no recorded spectrum")
        return self.apply(self.spectrum)

    def __repr__(self):
        return "Decomposition(%s)" % self.system.name


# ---------------------------------------------------------------------------
# systems


def _split_clusters(values: np.ndarray, tol: float) -> List[np.ndarray]:
    """Maximal runs of a decreasing sequence with consecutive gaps <= tol."""
    n = values.size
    if n == 0:
        return []
    edges = [0]
    for i in range(1, n):
        if values[i - 1] - values[i] > tol:
            edges.append(i)
    edges.append(n)
    return [np.arange(edges[j], edges[j + 1]) for j in range(len(edges) - 1)]


class System:
    """Common interface; concrete systems fill in the shape-specific parts."""

    name: str = ""
    spectrum_dim: int = 0
    group = None

    # -- validation and basic maps

    def validate(self, X) -> Ambient:
        raise NotImplementedError

    def spectrum(self, X) -> np.ndarray:
        """Ordered spectrum of a validated ambient point (batch-friendly)."""
        raise NotImplementedError

    def order(self, x) -> np.ndarray:
        """Canonical representative of the group orbit of x."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.spectrum_dim:
            raise InvalidShape("expected reduced vectors of length %d" % self.spectrum_dim)
        return self.group.tau(x)

    def decompose(self, X, tie_tol: Optional[float] = None) -> Decomposition:
        raise NotImplementedError

    def sample_decompositions(self, X, count: int, rng: np.random.Generator,
                              tie_tol: Optional[float] = None) -> List[Decomposition]:
        if count < 1:
            raise InvalidParam("count must be >= 1")
        X = self.validate(X)
        if tie_tol is None:
            tie_tol = 1e-8 * (1.0 + anorm(X))
        if tie_tol < 0:
            raise InvalidParam("tie_tol must be >= 0")
        return [self._sample_one(X, tie_tol, rng) for _ in range(count)]

    def _sample_one(self, X, tie_tol, rng) -> Decomposition:
        raise NotImplementedError

    def adapted_decomposition(self, X, G, tie_tol: Optional[float] = None) -> Decomposition:
        """A reconstruction of X whose tie freedom is aligned with G.

        Within spectral clusters the choice of basis is free; aligning it
        with the target direction G maximizes the part of G that the
        isometry's adjoint can see, which is what existence arguments for
        first-order conditions implicitly select.  The default does no
        adaptation.
        """
        return self.decompose(X, tie_tol=tie_tol)

    # -- isometry internals

    def _apply(self, factors, x: np.ndarray) -> Ambient:
        raise NotImplementedError

    def _adjoint(self, factors, X: Ambient) -> np.ndarray:
        raise NotImplementedError

    # -- ambient coordinates (orthonormal basis of the ambient space)

    def ambient_dim(self) -> int:
        raise NotImplementedError

    def to_coords(self, X: Ambient) -> np.ndarray:
        raise NotImplementedError

    def from_coords(self, v: np.ndarray) -> Ambient:
        raise NotImplementedError

    # -- randomness

    def random_ambient(self, rng: np.random.Generator, scale: float = 1.0) -> Ambient:
        raise NotImplementedError

    def random_direction(self, rng: np.random.Generator) -> Ambient:
        v = rng.standard_normal(self.ambient_dim())
        n = np.linalg.norm(v)
        if n == 0:
            v[0] = 1.0
            n = 1.0
        return self.from_coords(v / n)

    # -- misc

    def default_tie_tol(self, X) -> float:
        return 1e-8 * (1.0 + anorm(X))

    def __repr__(self):
        return "<system %s>" % self.name


class TrivialNormSystem(System):
    """Euclidean norm on R^n: reduced space R, group {-1, +1}.

    The isometries send a scalar to a multiple of a unit vector; the unit
    vector is the first column of an orthogonal factor built by a Householder
    reflection.
    """

    def __init__(self, n: int):
        if n < 2:
            raise InvalidParam("trivial norm system needs n >= 2")
        self.n = n
        self.spectrum_dim = 1
        self.group = SignedPermutationGroup(1)
        self.name = "trivial:%d" % n

    def validate(self, X):
        X = _finite_array(X, self.name)
        if X.shape != (self.n,):
            raise InvalidShape("expected vector of length %d, got %s" % (self.n, X.shape))
        return X

    def spectrum(self, X):
        X = np.asarray(X, dtype=float)
        return np.linalg.norm(X, axis=-1)[..., None]

    def _householder_to(self, u: np.ndarray) -> np.ndarray:
        e1 = np.zeros(self.n)
        e1[0] = 1.0
        v = u - e1
        nv = np.linalg.norm(v)
        if nv < 1e-14:
            return np.eye(self.n)
        v = v / nv
        return np.eye(self.n) - 2.0 * np.outer(v, v)

    def decompose(self, X, tie_tol=None):
        X = self.validate(X)
        r = float(np.linalg.norm(X))
        if r <= 0.0:
            U = np.eye(self.n)
        else:
            U = self._householder_to(X / r)
        return Decomposition(self, U, spectrum=np.array([r]))

    def _sample_one(self, X, tie_tol, rng):
        r = float(np.linalg.norm(X))
        if r <= tie_tol:
            u = rng.standard_normal(self.n)
            u /= np.linalg.norm(u)
            return Decomposition(self, self._householder_to(u), spectrum=np.array([r]))
        return self.decompose(X)

    def adapted_decomposition(self, X, G, tie_tol=None):
        X = self.validate(X)
        G = self.validate(G)
        if tie_tol is None:
            tie_tol = self.default_tie_tol(X)
        r = float(np.linalg.norm(X))
        ng = float(np.linalg.norm(G))
        if r <= tie_tol and ng > 0:
            return Decomposition(self, self._householder_to(G / ng), spectrum=np.array([r]))
        return self.decompose(X)

    def _apply(self, U, x):
        return float(x[0]) * U[:, 0]

    def _adjoint(self, U, X):
        return np.array([float(np.dot(U[:, 0], np.asarray(X, dtype=float)))])

    def ambient_dim(self):
        return self.n

    def to_coords(self, X):
        return np.asarray(X, dtype=float).copy()

    def from_coords(self, v):
        return np.asarray(v, dtype=float).copy()

    def random_ambient(self, rng, scale=1.0):
        return scale * rng.standard_normal(self.n)


class EigSymSystem(System):
    """Real symmetric n x n matrices under eigendecomposition."""

    def __init__(self, n: int, symtol: float = 1e-8):
        if n < 2:
            raise InvalidParam("symmetric eigensystem needs n >= 2")
        self.n = n
        self.symtol = symtol
        self.spectrum_dim = n
        self.group = PermutationGroup(n)
        self.name = "eigsym:%d" % n

    def validate(self, X):
        X = _finite_array(X, self.name)
        if X.shape != (self.n, self.n):
            raise InvalidShape("expected %dx%d matrix, got %s" % (self.n, self.n, X.shape))
        asym = np.linalg.norm(X - X.T)
        if asym > self.symtol * (1.0 + np.linalg.norm(X)):
            raise InvalidData("matrix is not symmetric (asymmetry %.3e)" % asym)
        return 0.5 * (X + X.T)

    def spectrum(self, X):
        X = np.asarray(X, dtype=float)
        try:
            w = np.linalg.eigvalsh(X)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise NumericalFailure(str(exc)) from exc
        return w[..., ::-1]

    def decompose(self, X, tie_tol=None):
        X = self.validate(X)
        try:
            w, U = np.linalg.eigh(X)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(str(exc)) from exc
        return Decomposition(self, U[:, ::-1].copy(), spectrum=w[::-1].copy())

    def _sample_one(self, X, tie_tol, rng):
        base = self.decompose(X)
        U = base.factors.copy()
        for idx in _split_clusters(base.spectrum, tie_tol):
            if idx.size > 1:
                U[:, idx] = U[:, idx] @ haar_orthogonal(rng, idx.size)
        return Decomposition(self, U, spectrum=base.spectrum)

    def adapted_decomposition(self, X, G, tie_tol=None):
        X = self.validate(X)
        G = self.validate(G)
        if tie_tol is None:
            tie_tol = self.default_tie_tol(X)
        base = self.decompose(X)
        U = base.factors.copy()
        for idx in _split_clusters(base.spectrum, tie_tol):
            if idx.size > 1:
                block = U[:, idx].T @ G @ U[:, idx]
                _, Q = np.linalg.eigh(0.5 * (block + block.T))
                U[:, idx] = U[:, idx] @ Q
        return Decomposition(self, U, spectrum=base.spectrum)

    def _apply(self, U, x):
        return (U * x) @ U.T

    def _adjoint(self, U, X):
        return np.einsum("ji,jk,ki->i", U, np.asarray(X, dtype=float), U)

    def ambient_dim(self):
        return self.n * (self.n + 1) // 2

    def _tri_indices(self):
        return np.triu_indices(self.n, k=1)

    def to_coords(self, X):
        X = np.asarray(X, dtype=float)
        iu, ju = self._tri_indices()
        diag = X[..., np.arange(self.n), np.arange(self.n)]
        off = X[..., iu, ju] * math.sqrt(2.0)
        return np.concatenate([diag, off], axis=-1)

    def from_coords(self, v):
        v = np.asarray(v, dtype=float)
        iu, ju = self._tri_indices()
        out = np.zeros(v.shape[:-1] + (self.n, self.n))
        out[..., np.arange(self.n), np.arange(self.n)] = v[..., : self.n]
        off = v[..., self.n :] / math.sqrt(2.0)
        out[..., iu, ju] = off
        out[..., ju, iu] = off
        return out

    def random_ambient(self, rng, scale=1.0):
        g = rng.standard_normal((self.n, self.n))
        return scale * 0.5 * (g + g.T)


class SvdSystem(System):
    """Rectangular m x n matrices under the full singular value decomposition."""

    def __init__(self, rows: int, cols: int):
        if rows < 1 or cols < 1:
            raise InvalidParam("svd system needs rows, cols >= 1")
        self.rows = rows
        self.cols = cols
        self.spectrum_dim = min(rows, cols)
        self.group = SignedPermutationGroup(self.spectrum_dim)
        self.name = "svd:%dx%d" % (rows, cols)

    def validate(self, X):
        X = _finite_array(X, self.name)
        if X.shape != (self.rows, self.cols):
            raise InvalidShape("expected %dx%d matrix, got %s" % (self.rows, self.cols, X.shape))
        return X

    def spectrum(self, X):
        X = np.asarray(X, dtype=float)
        try:
            return np.linalg.svd(X, compute_uv=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(str(exc)) from exc

    def decompose(self, X, tie_tol=None):
        X = self.validate(X)
        try:
            U, s, Vh = np.linalg.svd(X, full_matrices=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(str(exc)) from exc
        return Decomposition(self, (U, Vh.T.copy()), spectrum=s)

    def _sample_one(self, X, tie_tol, rng):
        base = self.decompose(X)
        U, V = (f.copy() for f in base.factors)
        m = self.spectrum_dim
        zero_cols_u = []
        zero_cols_v = []
        for idx in _split_clusters(base.spectrum, tie_tol):
            if base.spectrum[idx].max() <= tie_tol:
                zero_cols_u.extend(idx.tolist())
                zero_cols_v.extend(idx.tolist())
            elif idx.size > 1:
                q = haar_orthogonal(rng, idx.size)
                U[:, idx] = U[:, idx] @ q
                V[:, idx] = V[:, idx] @ q
        # Null-space columns (zero singular values plus the rectangular excess)
        # rotate independently on each side.
        nu = zero_cols_u + list(range(m, self.rows))
        nv = zero_cols_v + list(range(m, self.cols))
        if len(nu) > 1:
            U[:, nu] = U[:, nu] @ haar_orthogonal(rng, len(nu))
        if len(nv) > 1:
            V[:, nv] = V[:, nv] @ haar_orthogonal(rng, len(nv))
        return Decomposition(self, (U, V), spectrum=base.spectrum)

    def adapted_decomposition(self, X, G, tie_tol=None):
        # align the null-space factor columns with G; positive tied
        # clusters keep the canonical shared basis
        X = self.validate(X)
        G = self.validate(G)
        if tie_tol is None:
            tie_tol = self.default_tie_tol(X)
        base = self.decompose(X)
        U, V = (f.copy() for f in base.factors)
        m = self.spectrum_dim
        zero = [int(i) for i in np.flatnonzero(base.spectrum <= tie_tol)]
        nu = zero + list(range(m, self.rows))
        nv = zero + list(range(m, self.cols))
        if nu and nv:
            block = U[:, nu].T @ G @ V[:, nv]
            P, _, Qh = np.linalg.svd(block)
            U[:, nu] = U[:, nu] @ P
            V[:, nv] = V[:, nv] @ Qh.T
        return Decomposition(self, (U, V), spectrum=base.spectrum)

    def _apply(self, factors, x):
        U, V = factors
        m = self.spectrum_dim
        return (U[:, :m] * x) @ V[:, :m].T

    def _adjoint(self, factors, X):
        U, V = factors
        m = self.spectrum_dim
        return np.einsum("ji,jk,ki->i", U[:, :m], np.asarray(X, dtype=float), V[:, :m])

    def ambient_dim(self):
        return self.rows * self.cols

    def to_coords(self, X):
        X = np.asarray(X, dtype=float)
        return X.reshape(X.shape[:-2] + (self.rows * self.cols,)).copy()

    def from_coords(self, v):
        v = np.asarray(v, dtype=float)
        return v.reshape(v.shape[:-1] + (self.rows, self.cols)).copy()

    def random_ambient(self, rng, scale=1.0):
        return scale * rng.standard_normal((self.rows, self.cols))


class SignedSvdSystem(System):
    """Square matrices under SVD restricted to SO(n) x SO(n) factors.

    The spectrum keeps the usual singular values except that the smallest one
    carries the sign of the determinant (with sign(0) taken as +1), and the
    group is the even-signed permutation group.
    """

    def __init__(self, n: int):
        if n < 2:
            raise InvalidParam("signed svd system needs n >= 2")
        self.n = n
        self.spectrum_dim = n
        self.group = EvenSignedPermutationGroup(n)
        self.name = "signed-svd:%d" % n

    def validate(self, X):
        X = _finite_array(X, self.name)
        if X.shape != (self.n, self.n):
            raise InvalidShape("expected %dx%d matrix, got %s" % (self.n, self.n, X.shape))
        return X

    def spectrum(self, X):
        X = np.asarray(X, dtype=float)
        try:
            s = np.linalg.svd(X, compute_uv=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(str(exc)) from exc
        sgn = np.linalg.slogdet(X)[0]
        sgn = np.where(sgn < 0, -1.0, 1.0)
        out = np.array(s, copy=True)
        out[..., -1] = s[..., -1] * sgn
        return out

    def decompose(self, X, tie_tol=None):
        X = self.validate(X)
        try:
            U, s, Vh = np.linalg.svd(X, full_matrices=True)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(str(exc)) from exc
        U = U.copy()
        V = Vh.T.copy()
        du = 1.0 if np.linalg.det(U) > 0 else -1.0
        dv = 1.0 if np.linalg.det(V) > 0 else -1.0
        g = s.copy()
        g[-1] = s[-1] * du * dv
        # Flipping the last column of an improper factor restores det = +1
        # while the sign moved into the spectrum keeps the product unchanged.
        if du < 0:
            U[:, -1] = -U[:, -1]
        if dv < 0:
            V[:, -1] = -V[:, -1]
        return Decomposition(self, (U, V), spectrum=g)

    def _sample_one(self, X, tie_tol, rng):
        base = self.decompose(X)
        U, V = (f.copy() for f in base.factors)
        g = base.spectrum
        mags = np.abs(g)
        for idx in _split_clusters(mags, tie_tol):
            if idx.size <= 1:
                continue
            if mags[idx].max() <= tie_tol:
                U[:, idx] = U[:, idx] @ haar_special_orthogonal(rng, idx.size)
                V[:, idx] = V[:, idx] @ haar_special_orthogonal(rng, idx.size)
            else:
                q = haar_special_orthogonal(rng, idx.size)
                d = np.where(g[idx] < 0, -1.0, 1.0)
                U[:, idx] = U[:, idx] @ q
                V[:, idx] = V[:, idx] @ (d[:, None] * q * d[None, :])
        return Decomposition(self, (U, V), spectrum=g)

    def adapted_decomposition(self, X, G, tie_tol=None):
        X = self.validate(X)
        G = self.validate(G)
        if tie_tol is None:
            tie_tol = self.default_tie_tol(X)
        base = self.decompose(X)
        U, V = (f.copy() for f in base.factors)
        zero = [int(i) for i in np.flatnonzero(np.abs(base.spectrum) <= tie_tol)]
        if len(zero) > 1:
            block = U[:, zero].T @ G @ V[:, zero]
            P, _, Qh = np.linalg.svd(block)
            Q = Qh.T
            # keep the factors special orthogonal: a paired sign flip leaves
            # the reconstruction unchanged on zero slots
            if np.linalg.det(P) < 0:
                P = P.copy()
                P[:, -1] = -P[:, -1]
            if np.linalg.det(Q) < 0:
                Q = Q.copy()
                Q[:, -1] = -Q[:, -1]
            U[:, zero] = U[:, zero] @ P
            V[:, zero] = V[:, zero] @ Q
        return Decomposition(self, (U, V), spectrum=base.spectrum)

    def _apply(self, factors, x):
        U, V = factors
        return (U * x) @ V.T

    def _adjoint(self, factors, X):
        U, V = factors
        return np.einsum("ji,jk,ki->i", U, np.asarray(X, dtype=float), V)

    def ambient_dim(self):
        return self.n * self.n

    def to_coords(self, X):
        X = np.asarray(X, dtype=float)
        return X.reshape(X.shape[:-2] + (self.n * self.n,)).copy()

    def from_coords(self, v):
        v = np.asarray(v, dtype=float)
        return v.reshape(v.shape[:-1] + (self.n, self.n)).copy()

    def random_ambient(self, rng, scale=1.0):
        return scale * rng.standard_normal((self.n, self.n))


class ProductSystem(System):
    """Direct sum of an inner system with R; the group fixes the extra slot."""

    def __init__(self, inner: System):
        if isinstance(inner, ProductSystem):
            raise Unsupported("nested product systems are not supported")
        self.inner = inner
        self.spectrum_dim = inner.spectrum_dim + 1
        self.group = ProductGroup(inner.group)
        self.name = "product:%s" % inner.name

    def validate(self, X):
        if not (isinstance(X, tuple) and len(X) == 2):
            raise InvalidShape("product ambient must be a (matrix, scalar) pair")
        inner = self.inner.validate(X[0])
        xi = float(X[1])
        if not math.isfinite(xi):
            raise InvalidData("non-finite scalar slot")
        return (inner, xi)

    def spectrum(self, X):
        inner, xi = X[0], X[1]
        g = self.inner.spectrum(inner)
        xi = np.asarray(xi, dtype=float)
        return np.concatenate([g, xi[..., None]], axis=-1)

    def decompose(self, X, tie_tol=None):
        X = self.validate(X)
        d = self.inner.decompose(X[0], tie_tol=tie_tol)
        return Decomposition(self, d, spectrum=np.append(d.spectrum, X[1]))

    def _sample_one(self, X, tie_tol, rng):
        d = self.inner._sample_one(X[0], tie_tol, rng)
        return Decomposition(self, d, spectrum=np.append(d.spectrum, X[1]))

    def adapted_decomposition(self, X, G, tie_tol=None):
        X = self.validate(X)
        d = self.inner.adapted_decomposition(X[0], G[0], tie_tol=tie_tol)
        return Decomposition(self, d, spectrum=np.append(d.spectrum, X[1]))

    def _apply(self, inner_dec, x):
        return (inner_dec.apply(x[:-1]), float(x[-1]))

    def _adjoint(self, inner_dec, X):
        return np.append(inner_dec.adjoint(X[0]), float(X[1]))

    def ambient_dim(self):
        return self.inner.ambient_dim() + 1

    def to_coords(self, X):
        head = self.inner.to_coords(X[0])
        xi = np.asarray(X[1], dtype=float)
        return np.concatenate([head, xi[..., None]], axis=-1)

    def from_coords(self, v):
        v = np.asarray(v, dtype=float)
        head = self.inner.from_coords(v[..., :-1])
        xi = v[..., -1]
        return (head, float(xi)) if xi.ndim == 0 else (head, xi)

    def random_ambient(self, rng, scale=1.0):
        return (self.inner.random_ambient(rng, scale), float(scale * rng.standard_normal()))


# ---------------------------------------------------------------------------
# functional interface


def spectrum(kind: System, X) -> np.ndarray:
    return kind.spectrum(kind.validate(X))


def order(kind: System, x) -> np.ndarray:
    return kind.order(x)


def decompose(kind: System, X, tie_tol: Optional[float] = None) -> Decomposition:
    if tie_tol is not None and tie_tol < 0:
        raise InvalidParam("tie_tol must be >= 0")
    return kind.decompose(X, tie_tol=tie_tol)


def apply_isometry(d: Decomposition, x) -> Ambient:
    return d.apply(x)


def adjoint_apply(d: Decomposition, X) -> np.ndarray:
    return d.adjoint(X)


def sample_decompositions(kind: System, X, count: int, rng: np.random.Generator,
                          tie_tol: Optional[float] = None) -> List[Decomposition]:
    return kind.sample_decompositions(X, count, rng, tie_tol=tie_tol)


def group_enumerate(kind: System, cap: int = DEFAULT_GROUP_CAP) -> List[GroupElement]:
    return kind.group.enumerate(cap)


def product_lift(kind: System) -> ProductSystem:
    return ProductSystem(kind)


def trivial_norm(n: int) -> TrivialNormSystem:
    return TrivialNormSystem(n)


def eig_sym(n: int) -> EigSymSystem:
    return EigSymSystem(n)


def svd_system(rows: int, cols: int) -> SvdSystem:
    return SvdSystem(rows, cols)


def signed_svd(n: int) -> SignedSvdSystem:
    return SignedSvdSystem(n)


def parse_system(spec: str, shape: Optional[Tuple[int, ...]] = None) -> System:
    """Build a system from a name like ``eigsym:3``, ``svd:3x2``, ``product:eigsym:2``.

    When the size suffix is omitted, `shape` (of the payload about to be
    processed) supplies it.
    """
    spec = spec.strip().lower()
    if spec.startswith("product:"):
        return ProductSystem(parse_system(spec[len("product:"):], shape))
    if ":" in spec:
        base, _, dims = spec.partition(":")
        if base == "svd":
            try:
                r, c = dims.split("x")
                return SvdSystem(int(r), int(c))
            except ValueError as exc:
                raise InvalidParam("bad svd size %r (want RxC)" % dims) from exc
        try:
            n = int(dims)
        except ValueError as exc:
            raise InvalidParam("bad system size %r" % dims) from exc
        if base == "eigsym":
            return EigSymSystem(n)
        if base in ("signed-svd", "signedsvd"):
            return SignedSvdSystem(n)
        if base in ("trivial", "trivial-norm"):
            return TrivialNormSystem(n)
        raise InvalidParam("unknown system %r" % base)
    # size-less form: infer from shape
    if shape is None:
        raise InvalidParam("system %r needs an explicit size or an input shape" % spec)
    if spec == "eigsym":
        return EigSymSystem(shape[-1])
    if spec == "svd":
        return SvdSystem(shape[-2], shape[-1])
    if spec in ("signed-svd", "signedsvd"):
        return SignedSvdSystem(shape[-1])
    if spec in ("trivial", "trivial-norm"):
        return TrivialNormSystem(shape[-1])
    raise InvalidParam("unknown system %r" % spec)
