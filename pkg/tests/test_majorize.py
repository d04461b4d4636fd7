import numpy as np
import pytest

from specvar import majorize as mj
from specvar import oracle as orc
from specvar import systems as sy
from specvar.errors import InvalidParam, Unsupported


def test_support_oracle_examples():
    val, s = mj.support_oracle(sy.eig_sym(2), np.array([1.0, 0.0]), np.array([2.0, 5.0]))
    assert val == pytest.approx(5.0)
    assert float(np.dot(np.array([1.0, 0.0]), s.apply(np.array([2.0, 5.0])))) == pytest.approx(5.0)

    val, _ = mj.support_oracle(sy.svd_system(2, 2), np.array([-1.0, 2.0]), np.array([3.0, 1.0]))
    assert val == pytest.approx(7.0)

    val, _ = mj.support_oracle(sy.signed_svd(2), np.array([1.0, -1.0]), np.array([2.0, 1.0]))
    assert val == pytest.approx(1.0)


@pytest.mark.parametrize("kind", [
    sy.eig_sym(4), sy.svd_system(3, 3), sy.signed_svd(4), sy.trivial_norm(4),
    sy.product_lift(sy.eig_sym(3)),
], ids=lambda k: k.name)
def test_support_oracle_exact_vs_enumeration(kind):
    rng = np.random.default_rng(0)
    elements = kind.group.enumerate()
    for _ in range(100):
        c = rng.standard_normal(kind.spectrum_dim)
        y = rng.standard_normal(kind.spectrum_dim)
        val, s = mj.support_oracle(kind, c, y)
        brute = max(float(np.dot(c, e.apply(y))) for e in elements)
        assert abs(val - brute) <= 1e-12 * (1 + abs(brute))
        assert abs(val - float(np.dot(kind.order(c), kind.order(y)))) <= 1e-12 * (1 + abs(val))
        assert float(np.dot(c, s.apply(y))) == pytest.approx(val)


def test_orbit_hull_distance_examples():
    kind = sy.eig_sym(2)
    y = np.array([1.0, 0.0])
    cert = mj.orbit_hull_distance(kind, y, y)
    assert cert.distance <= 1e-12
    assert len(cert.convex_coefficients) >= 1

    cert = mj.orbit_hull_distance(kind, y, np.array([0.5, 0.5]))
    assert cert.distance <= 1e-10
    np.testing.assert_allclose(cert.reconstruct(y), cert.nearest, atol=1e-9)

    x = np.array([1.0, 0.5])
    cert = mj.orbit_hull_distance(kind, y, x)
    assert cert.distance == pytest.approx(0.5 / np.sqrt(2), abs=1e-9)
    assert cert.separating_direction is not None
    c = cert.separating_direction
    lhs = float(np.dot(c, x))
    rhs = float(np.dot(kind.order(c), kind.order(y)))
    assert lhs > rhs + 1e-7 / 2


def test_certificate_weights():
    rng = np.random.default_rng(1)
    kind = sy.signed_svd(3)
    y = rng.standard_normal(3)
    els = [kind.group.random(rng) for _ in range(3)]
    wts = rng.dirichlet(np.ones(3))
    x = sum(w * e.apply(y) for w, e in zip(wts, els))
    cert = mj.orbit_hull_distance(kind, y, x)
    assert cert.distance <= 1e-9
    ws = np.array([w for _, w in cert.convex_coefficients])
    assert ws.min() >= 0 and ws.sum() == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(cert.reconstruct(y), cert.nearest, atol=1e-9)


def test_majorization_examples():
    assert mj.majorization_inequalities("permutation", [0.5, 0.5], [1.0, 0.0]).passed
    assert not mj.majorization_inequalities("permutation", [1.1, -0.1], [1.0, 0.0]).passed
    assert mj.majorization_inequalities("signed", [0.0, 1.0], [1.0, 0.0]).passed
    with pytest.raises(Unsupported):
        mj.majorization_inequalities("even_signed", [0.0], [0.0])
    with pytest.raises(InvalidParam):
        mj.majorization_inequalities("wat", [0.0], [0.0])


def test_hull_majorization_equivalence():
    rng = np.random.default_rng(5)
    for kind, gname in [(sy.eig_sym(4), "permutation"), (sy.svd_system(4, 4), "signed")]:
        for _ in range(100):
            y = rng.standard_normal(kind.spectrum_dim)
            els = [kind.group.random(rng) for _ in range(4)]
            wts = rng.dirichlet(np.ones(4))
            x_in = sum(w * e.apply(y) for w, e in zip(wts, els))
            assert mj.orbit_hull_distance(kind, y, x_in).distance <= 1e-7
            assert mj.majorization_inequalities(gname, x_in, y).passed
            x_out = x_in + 1e-3 * (np.abs(rng.standard_normal(kind.spectrum_dim)) + 1.0)
            dist_out = mj.orbit_hull_distance(kind, y, x_out).distance
            verdict_out = mj.majorization_inequalities(gname, x_out, y).passed
            assert (dist_out <= 1e-7) == verdict_out


def test_lidskii_examples():
    rep = mj.lidskii_check(sy.eig_sym(2), np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert rep.passed and rep.distance <= 1e-10 and rep.agree

    rng = np.random.default_rng(2)
    kind = sy.svd_system(3, 2)
    for _ in range(30):
        rep = mj.lidskii_check(kind, kind.random_ambient(rng), kind.random_ambient(rng))
        assert rep.passed and rep.agree

    kind = sy.signed_svd(3)
    for _ in range(30):
        X, Y = kind.random_ambient(rng), kind.random_ambient(rng)
        rep = mj.lidskii_check(kind, X, Y)
        assert rep.passed
        # exact cross-check against the explicitly enumerated orbit
        v = kind.spectrum(X + Y) - kind.spectrum(X)
        assert orc.brute_hull_membership(kind, kind.spectrum(Y), v).passed


def test_scalar_inequality_form():
    rng = np.random.default_rng(3)
    for kind in [sy.eig_sym(5), sy.svd_system(4, 3), sy.signed_svd(4),
                 sy.trivial_norm(4), sy.product_lift(sy.eig_sym(4))]:
        for _ in range(100):
            X = kind.validate(kind.random_ambient(rng))
            Y = kind.validate(kind.random_ambient(rng))
            z = rng.standard_normal(kind.spectrum_dim)
            lhs = float(np.dot(kind.spectrum(sy.aadd(X, Y)) - kind.spectrum(X), z))
            rhs = float(np.dot(kind.spectrum(Y), kind.order(z)))
            assert lhs <= rhs + 1e-9
