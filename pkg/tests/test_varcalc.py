import numpy as np
import pytest

from specvar import invariants as inv
from specvar import oracle as orc
from specvar import systems as sy
from specvar import varcalc as vc
from specvar.errors import GroupMismatch, NotDifferentiable, Unsupported


def test_eval_spectral_examples():
    es = sy.eig_sym(3)
    X = es.random_ambient(np.random.default_rng(0))
    X = es.validate(X)
    assert vc.eval_spectral(inv.builtin_function("sum"), es, X) == pytest.approx(
        float(np.trace(X)), abs=1e-10)
    sv = sy.svd_system(2, 2)
    assert vc.eval_spectral(inv.builtin_function("l1"), sv, np.diag([3.0, 1.0])) == pytest.approx(4.0)
    assert vc.eval_spectral(inv.builtin_function("coordprod"), sy.eig_sym(2),
                            np.diag([1.0, 2.0])) == pytest.approx(2.0)


def test_spectral_gradient_ordering_caveat():
    # the lifted gradient reorders through the isometry, not naively
    es = sy.eig_sym(2)
    f = inv.builtin_function("coordprod")
    G = vc.spectral_gradient(f, es, np.diag([1.0, 2.0]))
    np.testing.assert_allclose(G, np.diag([2.0, 1.0]), atol=1e-10)
    fd = vc.ambient_fd_gradient(f, es, np.diag([1.0, 2.0]))
    assert sy.anorm(sy.asub(G, fd)) <= 1e-5
    naive = es.spectrum(np.diag([2.0, 1.0]))
    assert not np.allclose(naive, f.grad(np.array([2.0, 1.0])))


def test_spectral_gradient_more_examples():
    es = sy.eig_sym(3)
    G = vc.spectral_gradient(inv.builtin_function("sum"), es,
                             es.validate(es.random_ambient(np.random.default_rng(1))))
    np.testing.assert_allclose(G, np.eye(3), atol=1e-12)
    sv = sy.svd_system(2, 2)
    f3 = inv.builtin_function("abspowsum", p=3)
    G = vc.spectral_gradient(f3, sv, np.diag([2.0, 1.0]))
    np.testing.assert_allclose(G, np.diag([12.0, 3.0]), atol=1e-10)
    assert sy.anorm(sy.asub(G, vc.ambient_fd_gradient(f3, sv, np.diag([2.0, 1.0])))) <= 1e-5
    with pytest.raises(NotDifferentiable):
        vc.spectral_gradient(inv.builtin_function("max"), sy.eig_sym(2), np.eye(2))
    with pytest.raises(GroupMismatch):
        vc.spectral_gradient(inv.builtin_function("coordprod"), sv, np.diag([2.0, 1.0]))


def test_gradient_decomposition_independence_under_ties():
    rng = np.random.default_rng(2)
    es = sy.eig_sym(3)
    base = es.decompose(es.validate(es.random_ambient(rng)))
    X = base.apply(np.array([2.0, 2.0, -1.0]))  # tied leading pair
    f = inv.builtin_function("abspowsum", p=2)
    grads = [d.apply(f.grad(d.spectrum)) for d in es.sample_decompositions(X, 10, rng)]
    for g in grads[1:]:
        assert sy.anorm(sy.asub(g, grads[0])) <= 1e-8
    fd = vc.ambient_fd_gradient(f, es, X)
    assert sy.anorm(sy.asub(grads[0], fd)) <= 1e-5 * (1 + sy.anorm(grads[0]))


def test_transfer_frechet_subgradient():
    rng = np.random.default_rng(3)
    es = sy.eig_sym(3)
    f = inv.builtin_function("max")
    # base with a tied top pair
    carrier = es.decompose(es.validate(es.random_ambient(rng)))
    x = np.array([3.0, 3.0, 1.0])
    w = vc.transfer_frechet_subgradient(np.array([1.0, 0.0, 0.0]), carrier, x=x)
    v = vc.ambient_frechet_test(f, es, w.base_point, w.vector, rng=rng)
    assert v.passed
    # smooth case agrees with the gradient route
    f2 = inv.builtin_function("abspowsum", p=2)
    X = es.validate(es.random_ambient(rng))
    d = es.decompose(X)
    w = vc.transfer_frechet_subgradient(f2.grad(d.spectrum), d)
    np.testing.assert_allclose(
        sy.anorm(sy.asub(w.vector, vc.spectral_gradient(f2, es, X))), 0.0, atol=1e-10)


def test_nuclear_norm_subgradient_inequality():
    # witness at X = U diag(0,2) V^T passes the global convex inequality
    rng = np.random.default_rng(4)
    sv = sy.svd_system(2, 2)
    f = inv.builtin_function("l1")
    carrier = sv.decompose(sv.validate(sv.random_ambient(rng)))
    x = np.array([0.0, 2.0])
    X = carrier.apply(x)
    w = vc.transfer_frechet_subgradient(np.array([1.0, 1.0]), carrier, x=x)
    phiX = vc.eval_spectral(f, sv, X)
    for _ in range(1000):
        Z = sv.validate(sv.random_ambient(rng, scale=2.0))
        lhs = vc.eval_spectral(f, sv, Z) - phiX - sy.ainner(sy.asub(Z, X), w.vector)
        assert lhs >= -1e-9


def test_frechet_subdifferential_sampling():
    rng = np.random.default_rng(5)
    es = sy.eig_sym(2)
    f = inv.builtin_function("max")
    ws = vc.frechet_subdifferential(f, es, np.eye(2), samples=6, rng=rng)
    for w in ws:
        P = w.vector
        assert abs(np.trace(P) - 1.0) <= 1e-9
        assert np.linalg.eigvalsh(P)[0] >= -1e-9
    # dual-norm bound for the nuclear-norm subdifferential at zero
    sv = sy.svd_system(2, 2)
    fl1 = inv.builtin_function("l1")
    ws = vc.limiting_subdifferential(fl1, sv, np.zeros((2, 2)), samples=6, rng=rng)
    for w in ws:
        assert np.linalg.svd(w.vector, compute_uv=False)[0] <= 1.0 + 1e-9
    with pytest.raises(Unsupported):
        vc.frechet_subdifferential(inv.builtin_function("powsum", p=2), es, np.eye(2))


def test_limiting_subdifferential_trivial_norm():
    rng = np.random.default_rng(6)
    tn = sy.trivial_norm(2)
    f = inv.builtin_function("neg_l1")
    ws = vc.limiting_subdifferential(f, tn, np.zeros(2), samples=4, rng=rng)
    assert len(ws) >= 2
    for w in ws[:4]:
        assert np.linalg.norm(w.vector) == pytest.approx(1.0, abs=1e-12)
        v = vc.ambient_limiting_test(f, tn, np.zeros(2), w.vector,
                                     directions=[sy.ascale(w.vector, -1.0)], rng=rng)
        assert v.passed


def test_spectral_projection_examples():
    rng = np.random.default_rng(7)
    es = sy.eig_sym(2)
    P = vc.spectral_project(inv.builtin_set("orthant"), es, np.diag([1.0, -2.0]),
                            count=1, rng=rng)[0]
    np.testing.assert_allclose(P, np.diag([1.0, 0.0]), atol=1e-10)
    assert vc.spectral_distance(inv.builtin_set("orthant"), es, np.diag([1.0, -2.0])) == pytest.approx(2.0)

    sv = sy.svd_system(2, 2)
    P = vc.spectral_project(inv.builtin_set("sparse", k=1), sv, np.diag([3.0, 1.0]),
                            count=1, rng=rng)[0]
    np.testing.assert_allclose(P, np.diag([3.0, 0.0]), atol=1e-10)
    assert vc.spectral_distance(inv.builtin_set("sparse", k=1), sv, np.diag([3.0, 1.0])) == pytest.approx(1.0)

    P = vc.spectral_project(inv.builtin_set("box", r=1.0), es, np.diag([2.0, -2.0]),
                            count=1, rng=rng)[0]
    np.testing.assert_allclose(P, np.diag([1.0, -1.0]), atol=1e-10)

    X = es.validate(es.random_ambient(rng, scale=3.0))
    r = 1.0
    assert vc.spectral_distance(inv.builtin_set("sphere", r=r), es, X) == pytest.approx(
        abs(sy.anorm(X) - r), abs=1e-10)


def test_projection_transfer_properties():
    rng = np.random.default_rng(8)
    for kind in [sy.eig_sym(3), sy.svd_system(3, 2)]:
        for name, params in [("box", {"r": 1.0}), ("sphere", {"r": 1.0}),
                             ("sparse", {"k": 1})]:
            D = inv.builtin_set(name, **params)
            for _ in range(10):
                X = kind.validate(kind.random_ambient(rng))
                g = kind.spectrum(X)
                dist = vc.spectral_distance(D, kind, X)
                d = kind.sample_decompositions(X, 1, rng)[0]
                for z in D.project(g).points:
                    P = d.apply(np.asarray(z, dtype=float))
                    assert abs(sy.anorm(sy.asub(X, P)) - dist) <= 1e-8
                    # spectrum membership and the shared decomposition
                    gp = kind.spectrum(P)
                    assert min(np.linalg.norm(gp - kind.order(zz))
                               for zz in D.project(g).points) <= 1e-8
                    shared = (sy.anorm(sy.asub(d.apply(g), X))
                              + sy.anorm(sy.asub(d.apply(gp), P)))
                    assert shared <= 1e-7
                    # difference identity through the same isometry
                    assert sy.anorm(sy.asub(sy.asub(X, P), d.apply(g - z))) <= 1e-8


def test_normal_membership_examples():
    orth = inv.builtin_set("orthant")
    assert vc.frechet_normal_membership(orth, [1.0, 0.0], [0.0, -1.0]).passed
    assert not vc.frechet_normal_membership(orth, [1.0, 0.0], [0.0, 1.0]).passed
    sph = inv.builtin_set("sphere", r=1.0)
    v = vc.frechet_normal_membership(sph, [1.0, 0.0], [2.0, 0.0])
    assert v.passed and v.estimate == pytest.approx(2.0, abs=1e-4)


def test_spectral_normal_cone_elements():
    rng = np.random.default_rng(9)
    es = sy.eig_sym(2)
    orth = inv.builtin_set("orthant")
    X = np.diag([1.0, 0.0])
    ws = vc.spectral_normal_cone_elements(orth, es, X, count=3, rng=rng)
    assert any(sy.anorm(w.vector) > 0 for w in ws)
    v = vc.ambient_normal_membership(orth, es, X, np.diag([0.0, -1.0]))
    assert v.passed and v.estimate == pytest.approx(1.0, abs=1e-4)
    # scaled point is normal to its own sphere
    sph = inv.builtin_set("sphere", r=float(np.sqrt(2.0)))
    X = np.diag([1.0, -1.0])
    v = vc.ambient_normal_membership(sph, es, X, 0.5 * X)
    assert v.passed
    # interior point of the cone only admits the zero normal
    gens = orth.frechet_normal_gens(np.array([2.0, 1.0]))
    assert all(np.linalg.norm(y) == 0 for y in gens)


def test_limiting_normal_transfer():
    # sphere and rank sets expose limiting-normal generators; every
    # transferred element passes the ambient limit test at points where the
    # limiting and Fréchet cones coincide
    rng = np.random.default_rng(14)
    es = sy.eig_sym(3)
    x0 = es.order(rng.standard_normal(3))
    sph = inv.builtin_set("sphere", r=float(np.linalg.norm(x0)))
    carrier = es.decompose(es.validate(es.random_ambient(rng)))
    X = carrier.apply(x0)
    ws = vc.spectral_normal_cone_elements(sph, es, X, count=2, rng=rng,
                                          flavor="limiting", verify=False)
    assert ws
    for w in ws:
        if sy.anorm(w.vector) == 0:
            continue
        assert vc.ambient_normal_membership(sph, es, X, w.vector).passed

    sv = sy.svd_system(2, 3)
    sp = inv.builtin_set("sparse", k=1)
    x0 = np.array([2.0, 0.0])
    carrier = sv.decompose(sv.validate(sv.random_ambient(rng)))
    X = carrier.apply(x0)
    ws = vc.spectral_normal_cone_elements(sp, sv, X, count=2, rng=rng,
                                          flavor="limiting", verify=False)
    assert any(sy.anorm(w.vector) > 0 for w in ws)
    for w in ws:
        if sy.anorm(w.vector) == 0:
            continue
        assert vc.ambient_normal_membership(sp, sv, X, w.vector).passed


def test_clarke_estimates():
    rng = np.random.default_rng(10)
    es = sy.eig_sym(2)
    f = inv.builtin_function("max")
    est = vc.clarke_subdifferential(f, es, np.eye(2), samples_per_radius=128, rng=rng)
    gap = vc.support_gap(est.formula, est.definition, es, rng=rng)
    assert gap <= 5e-3
    for P in est.formula.points + est.definition.points:
        assert abs(np.trace(P) - 1.0) <= 1e-6
        assert np.linalg.eigvalsh(P)[0] >= -1e-6

    f2 = inv.builtin_function("abspowsum", p=2)
    est = vc.clarke_subdifferential(f2, es, np.diag([1.0, 3.0]),
                                    radii=(5e-7, 2e-7, 1e-7), samples_per_radius=24,
                                    rng=rng)
    combined = vc.HullApprox(est.formula.points + est.definition.points)
    assert vc.hull_diameter(combined, es) <= 1e-5

    sv = sy.svd_system(2, 2)
    est = vc.clarke_subdifferential(inv.builtin_function("l1"), sv, np.diag([3.0, 1.0]),
                                    radii=(5e-7, 2e-7, 1e-7), samples_per_radius=24,
                                    rng=rng)
    combined = vc.HullApprox(est.formula.points + est.definition.points)
    assert vc.hull_diameter(combined, sv) <= 1e-5


def test_commutation_check_closed_form():
    rng = np.random.default_rng(11)
    es = sy.eig_sym(3)
    B = es.validate(es.random_ambient(rng))
    psi = vc.AmbientFunction(eval=lambda Z: sy.ainner(Z, B), grad=lambda Z: B)
    f2 = inv.builtin_function("abspowsum", p=2)
    rep = vc.commutation_check(f2, es, psi, sy.ascale(B, -0.5), rng=rng)
    assert rep.found and rep.residual <= 1e-6
    assert rep.commutator <= 1e-8

    psi0 = vc.AmbientFunction(eval=lambda Z: 0.5 * sy.ainner(Z, Z), grad=lambda Z: Z)
    rep = vc.commutation_check(inv.builtin_function("zero"), sy.eig_sym(2), psi0,
                               np.zeros((2, 2)), rng=rng)
    assert rep.found and rep.residual <= 1e-12


def test_proximal_descent_then_stationarity():
    rng = np.random.default_rng(12)
    es = sy.eig_sym(2)
    f = inv.builtin_function("l1")
    for _ in range(5):
        C = es.validate(es.random_ambient(rng))
        psi = vc.AmbientFunction(
            eval=lambda Z, C=C: 0.5 * sy.ainner(sy.asub(Z, C), sy.asub(Z, C)),
            grad=lambda Z, C=C: sy.asub(Z, C))
        X = vc.proximal_gradient(f, es, psi, np.zeros((2, 2)))
        rep = vc.commutation_check(f, es, psi, X, tol=1e-4, rng=rng)
        assert rep.found, rep.residual


def test_epigraph_route_normal():
    rng = np.random.default_rng(13)
    inner = sy.eig_sym(2)
    pk = sy.product_lift(inner)
    f = inv.builtin_function("abspowsum", p=2)
    D = inv.epigraph_set(f)
    X = inner.validate(inner.random_ambient(rng))
    xi = vc.eval_spectral(f, inner, X)
    G = vc.spectral_gradient(f, inner, X)
    v = vc.ambient_normal_membership(D, pk, (X, xi), (G, -1.0))
    assert v.passed
    v = vc.ambient_normal_membership(D, pk, (X, xi), (G, 1.0))
    assert not v.passed
