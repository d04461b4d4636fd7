import numpy as np
import pytest

from specvar import systems as sy
from specvar.errors import InvalidData, InvalidParam, InvalidShape, TooLarge, Unsupported


def test_spectrum_examples():
    np.testing.assert_allclose(sy.spectrum(sy.eig_sym(3), np.diag([3.0, 1.0, 2.0])),
                               [3.0, 2.0, 1.0])
    np.testing.assert_allclose(sy.spectrum(sy.signed_svd(2), np.diag([1.0, -2.0])),
                               [2.0, -1.0])
    np.testing.assert_allclose(
        sy.spectrum(sy.svd_system(3, 2), np.array([[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]])),
        [4.0, 3.0])


def test_order_examples():
    np.testing.assert_allclose(sy.order(sy.eig_sym(3), [1.0, 3.0, 2.0]), [3.0, 2.0, 1.0])
    np.testing.assert_allclose(sy.order(sy.svd_system(2, 2), [-5.0, 2.0]), [5.0, 2.0])


def test_order_even_signed_against_enumeration():
    # representative of the orbit of (-3,-2,-1): maximize over the 24
    # even-signed permutations and pick the orbit point in the ordered cone
    kind = sy.signed_svd(3)
    elements = sy.group_enumerate(kind)
    assert len(elements) == 24
    x = np.array([-3.0, -2.0, -1.0])
    orbit = [s.apply(x) for s in elements]
    in_cone = [p for p in orbit
               if p[0] >= p[1] >= abs(p[2]) and p[0] >= 0 and p[1] >= 0]
    expected = in_cone[0]
    for p in in_cone:
        np.testing.assert_allclose(p, expected)
    np.testing.assert_allclose(sy.order(kind, x), expected)
    np.testing.assert_allclose(expected, [3.0, 2.0, -1.0])


def test_decompose_eigsym_alignment():
    kind = sy.eig_sym(2)
    d = sy.decompose(kind, np.diag([1.0, 2.0]))
    np.testing.assert_allclose(d.spectrum, [2.0, 1.0])
    np.testing.assert_allclose(d.apply(np.array([2.0, 1.0])), np.diag([1.0, 2.0]),
                               atol=1e-12)


def test_decompose_signed_svd_special_orthogonal():
    kind = sy.signed_svd(2)
    X = np.diag([1.0, -2.0])
    d = sy.decompose(kind, X)
    U, V = d.factors
    assert np.linalg.det(U) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.det(V) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(d.apply(d.spectrum) - X) <= 1e-10


def test_decompose_trivial_householder():
    kind = sy.trivial_norm(3)
    d = sy.decompose(kind, np.array([0.0, 2.0, 0.0]))
    np.testing.assert_allclose(d.factors[:, 0], [0.0, 1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(d.apply(np.array([1.0])), [0.0, 1.0, 0.0], atol=1e-14)
    d0 = sy.decompose(kind, np.zeros(3))
    np.testing.assert_allclose(d0.factors, np.eye(3))


def test_apply_and_adjoint_examples():
    kind = sy.eig_sym(2)
    d = sy.Decomposition(kind, np.eye(2))
    np.testing.assert_allclose(sy.apply_isometry(d, [2.0, 1.0]), np.diag([2.0, 1.0]))
    sv = sy.svd_system(2, 2)
    dv = sy.Decomposition(sv, (np.eye(2), np.eye(2)))
    np.testing.assert_allclose(dv.apply([3.0, 1.0]), np.diag([3.0, 1.0]))
    np.testing.assert_allclose(sy.adjoint_apply(dv, np.diag([3.0, 1.0])), [3.0, 1.0])


def test_product_examples():
    pk = sy.product_lift(sy.eig_sym(2))
    np.testing.assert_allclose(sy.spectrum(pk, (np.diag([1.0, 2.0]), 7.0)), [2.0, 1.0, 7.0])
    d = sy.Decomposition(sy.product_lift(sy.svd_system(2, 2)),
                         sy.Decomposition(sy.svd_system(2, 2), (np.eye(2), np.eye(2))))
    X = d.apply(np.array([3.0, 1.0, -1.0]))
    np.testing.assert_allclose(X[0], np.diag([3.0, 1.0]))
    assert X[1] == pytest.approx(-1.0)
    tk = sy.product_lift(sy.trivial_norm(2))
    np.testing.assert_allclose(sy.spectrum(tk, (np.array([0.0, -2.0]), 0.0)), [2.0, 0.0])
    with pytest.raises(Unsupported):
        sy.product_lift(pk)


def test_sample_decompositions_ties():
    rng = np.random.default_rng(0)
    kind = sy.eig_sym(2)
    for d in sy.sample_decompositions(kind, np.eye(2), 3, rng):
        U = d.factors
        np.testing.assert_allclose(U @ U.T, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(d.apply(d.spectrum), np.eye(2), atol=1e-10)
    samples = sy.sample_decompositions(kind, np.diag([2.0, 1.0]), 3, rng)
    for d in samples:
        assert np.linalg.norm(d.apply(d.spectrum) - np.diag([2.0, 1.0])) <= 1e-10
    sv = sy.svd_system(2, 2)
    for d in sy.sample_decompositions(sv, np.zeros((2, 2)), 2, rng):
        np.testing.assert_allclose(d.apply(d.spectrum), np.zeros((2, 2)), atol=1e-12)


def test_sample_decompositions_distinct_spectrum_coincide():
    rng = np.random.default_rng(1)
    kind = sy.eig_sym(3)
    X = np.diag([3.0, 2.0, 1.0])
    ds = sy.sample_decompositions(kind, X, 4, rng)
    for d in ds[1:]:
        np.testing.assert_allclose(np.abs(d.factors), np.abs(ds[0].factors), atol=1e-12)


def test_group_enumerate_counts():
    assert len(sy.group_enumerate(sy.eig_sym(3))) == 6
    assert len(sy.group_enumerate(sy.svd_system(2, 2))) == 8
    evens = sy.group_enumerate(sy.signed_svd(2))
    assert len(evens) == 4
    mats = sorted(tuple(np.asarray(s.matrix()).ravel().astype(int)) for s in evens)
    assert (1, 0, 0, 1) in mats and (-1, 0, 0, -1) in mats
    assert (0, 1, 1, 0) in mats and (0, -1, -1, 0) in mats
    with pytest.raises(TooLarge):
        sy.group_enumerate(sy.eig_sym(8), cap=100)


def test_group_element_algebra():
    rng = np.random.default_rng(2)
    g = sy.SignedPermutationGroup(4)
    for _ in range(50):
        s = g.random(rng)
        t = g.random(rng)
        x = rng.standard_normal(4)
        np.testing.assert_allclose(s.compose(t).apply(x), s.apply(t.apply(x)))
        np.testing.assert_allclose(s.inverse().apply(s.apply(x)), x)
        np.testing.assert_allclose(s.matrix() @ x, s.apply(x))


@pytest.mark.parametrize("kind", [
    sy.trivial_norm(4), sy.eig_sym(4), sy.svd_system(4, 3), sy.signed_svd(3),
    sy.product_lift(sy.eig_sym(3)),
], ids=lambda k: k.name)
def test_system_axioms_random(kind):
    rng = np.random.default_rng(3)
    for _ in range(200):
        X = kind.validate(kind.random_ambient(rng))
        Y = kind.validate(kind.random_ambient(rng))
        gx, gy = kind.spectrum(X), kind.spectrum(Y)
        # trace inequality
        assert sy.ainner(X, Y) <= float(np.dot(gx, gy)) + 1e-9 * (1 + sy.anorm(X) * sy.anorm(Y))
        # nonexpansiveness and norm transfer
        assert np.linalg.norm(gx - gy) <= sy.anorm(sy.asub(X, Y)) + 1e-9
        assert abs(np.linalg.norm(gx) - sy.anorm(X)) <= 1e-10
        # reconstruction, ordering, adjoint identity, isometry
        d = kind.decompose(X)
        assert sy.anorm(sy.asub(d.apply(d.spectrum), X)) <= 1e-8 * (1 + sy.anorm(X))
        x = rng.standard_normal(kind.spectrum_dim)
        np.testing.assert_allclose(kind.spectrum(d.apply(x)), kind.order(x), atol=1e-10)
        np.testing.assert_allclose(d.adjoint(d.apply(x)), x, atol=1e-12)
        assert abs(sy.anorm(d.apply(x)) - np.linalg.norm(x)) <= 1e-12 * (1 + np.linalg.norm(x))
        s = kind.group.random(rng)
        np.testing.assert_allclose(kind.order(s.apply(x)), kind.order(x), atol=1e-12)


def test_validation_errors():
    kind = sy.eig_sym(2)
    with pytest.raises(InvalidShape):
        kind.validate(np.zeros((3, 3)))
    with pytest.raises(InvalidData):
        kind.validate(np.array([[0.0, 1.0], [np.nan, 0.0]]))
    with pytest.raises(InvalidData):
        kind.validate(np.array([[0.0, 1.0], [0.5, 0.0]]))  # grossly asymmetric
    with pytest.raises(InvalidParam):
        sy.decompose(kind, np.eye(2), tie_tol=-1.0)
    with pytest.raises(InvalidParam):
        kind.sample_decompositions(np.eye(2), 0, np.random.default_rng(0))


def test_adapted_decomposition_is_valid_reconstruction():
    rng = np.random.default_rng(4)
    for kind in [sy.eig_sym(3), sy.svd_system(3, 2), sy.signed_svd(3), sy.trivial_norm(3)]:
        G = kind.validate(kind.random_ambient(rng))
        for X in [kind.validate(kind.random_ambient(rng)), sy.ascale(G, 0.0)]:
            d = kind.adapted_decomposition(X, G)
            assert sy.anorm(sy.asub(d.apply(d.spectrum), X)) <= 1e-8 * (1 + sy.anorm(X))


def test_parse_system():
    assert sy.parse_system("eigsym:3").name == "eigsym:3"
    assert sy.parse_system("svd:3x2").name == "svd:3x2"
    assert sy.parse_system("signed-svd:4").name == "signed-svd:4"
    assert sy.parse_system("product:eigsym:2").name == "product:eigsym:2"
    assert sy.parse_system("eigsym", shape=(4, 4)).name == "eigsym:4"
    with pytest.raises(InvalidParam):
        sy.parse_system("wat:3")
