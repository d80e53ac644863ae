import math

import mpmath
import numpy as np
import pytest

from ofbf import groups as grp, measures as ms, spectral as sp
from ofbf.errors import DegenerateSpec, InvalidInput, QuadratureFailure, SingularPoint, UnsupportedSpec

J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def mellin_oracle(a, b, alpha):
    """Γ(-α)[(-i(a-b))^α - (-ia)^α - (ib)^α] with mpmath, nudging α off the removable pole at 1."""
    with mpmath.workdps(60):
        al = mpmath.mpc(alpha) + (mpmath.mpf("1e-30") if alpha == 1 else 0)
        p = lambda z: mpmath.power(z, al) if z != 0 else 0
        return complex(mpmath.gamma(-al) * (p(-1j * (a - b)) - p(-1j * a) - p(1j * b)))


@pytest.mark.parametrize("a, b", [(1.0, 1.0), (1.0, -2.0), (0.3, 2.5), (-1.5, 0.0), (2.0, 2.0)])
@pytest.mark.parametrize("alpha", [0.3, 0.8, 1.4, 1.9, 0.9 + 0.2j])
def test_radial_mellin_against_gamma_formula(a, b, alpha):
    got = sp.radial_mellin(np.array([a]), np.array([b]), np.array([alpha]))[0, 0]
    want = mellin_oracle(a, b, alpha)
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


def test_radial_mellin_is_smooth_through_alpha_one():
    left = sp.radial_mellin([1.3], [-0.4], [1 - 1e-7])[0, 0]
    mid = sp.radial_mellin([1.3], [-0.4], [1.0])[0, 0]
    right = sp.radial_mellin([1.3], [-0.4], [1 + 1e-7])[0, 0]
    assert abs(mid - 0.5 * (left + right)) < 1e-10


def test_radial_mellin_direct_integral():
    # Independent check by oscillatory quadrature of the defining integral.
    a, b, alpha = 1.0, 0.5, 0.8
    with mpmath.workdps(25):
        f = lambda s: (mpmath.expj(a * s) - 1) * (mpmath.expj(-b * s) - 1) * s ** (-alpha - 1)
        total = mpmath.quad(f, [0, 0.25, 0.5, 1]) + 1 / mpmath.mpf(alpha)
        # beyond s = 1 the kernel splits into 1 and three pure exponentials
        for c, sign in ((a - b, 1), (a, -1), (-b, -1)):
            g = lambda s, c=c: mpmath.expj(c * s) * s ** (-alpha - 1)
            total += sign * mpmath.quadosc(g, [1, mpmath.inf], omega=abs(c))
        want = complex(total)
    got = sp.radial_mellin([a], [b], [alpha])[0, 0]
    assert abs(got - want) <= 1e-8 * abs(want)


@pytest.mark.parametrize("a, b, alpha", [(1.0, 1.0, 0.5), (2.0, -0.7, 1.0), (0.4, 3.0, 1.6)])
def test_radial_quadrature_agrees_with_closed_form(a, b, alpha):
    q = sp.radial_quadrature(a, b, alpha)
    c = sp.radial_mellin([a], [b], [alpha])[0, 0]
    assert abs(q - c) <= 1e-9 * abs(c)


@pytest.mark.parametrize("h, sigma2", [(0.25, 10.026513098523985), (0.5, 2 * math.pi), (0.75, 6.6843420656826575)])
def test_fbm_variance_constant(h, sigma2):
    want = 2 * mellin_oracle(1.0, 1.0, 2 * h).real
    assert sp.covariance(sp.fbm_spec(h), [1.0], [1.0])[0, 0] == pytest.approx(want, rel=1e-12)
    assert want == pytest.approx(sigma2, rel=1e-12)


def test_zero_point_gives_zero_row():
    spec = sp.make_spec(np.eye(2), 0.4 * np.eye(2), ms.constant(np.eye(2)))
    assert np.array_equal(sp.covariance(spec, [0, 0], [1, 2]), np.zeros((2, 2)))


@pytest.fixture(scope="module")
def slices_spec():
    S = np.eye(2) + 0.5j * J
    return sp.make_spec(np.eye(2), np.array([[0.4, 0.0], [0.2, 0.6]]), ms.dihedral_slices(3, S, S.conj()))


def test_covariance_reflection_transpose(slices_spec):
    s, t = np.array([0.3, -1.1]), np.array([1.4, 0.2])
    assert np.allclose(sp.covariance(slices_spec, -s, -t), sp.covariance(slices_spec, s, t).T, rtol=1e-10)
    assert np.allclose(sp.covariance(slices_spec, t, s), sp.covariance(slices_spec, s, t).T, rtol=1e-10)


def test_analytic_and_quadrature_radial_routes_agree(slices_spec):
    s, t = np.array([0.3, -1.1]), np.array([1.4, 0.2])
    a = sp.covariance(slices_spec, s, t)
    q = sp.covariance(slices_spec, s, t, sp.QuadratureConfig(radial="quadrature", angular_nodes=16, max_doublings=3))
    assert np.allclose(a, q, rtol=1e-6)


def test_error_estimate_and_failure(slices_spec):
    res = sp.covariance_detail(slices_spec, [1.0, 0.5], [0.2, 1.0])
    assert res.error_estimate <= 1e-6 * np.max(np.abs(res.value))
    with pytest.raises(QuadratureFailure):
        sp.covariance(slices_spec, [1.0, 0.5], [0.2, 1.0], sp.QuadratureConfig(angular_nodes=8, rel_tol=1e-15, max_doublings=1))


def test_self_similarity_with_scalar_eta():
    S = np.eye(2) + 0.3j * J
    spec = sp.make_spec(1.5 * np.eye(2), 0.6 * np.eye(2) + 0.1 * J.T, ms.cyclic_slices(3, S, 2 * S, S.conj(), 2 * S.conj()))
    pairs = [(np.array([0.4, 1.0]), np.array([-0.8, 0.3])), (np.array([1.2, 0.0]), np.array([0.1, 0.9]))]
    assert sp.oss_check(spec, 3.0, pairs) <= 1e-8


def test_spectral_homogeneity(slices_spec):
    assert sp.homogeneity_check(slices_spec, 2.0) <= 1e-10


def test_non_scalar_domain_exponent_is_rejected():
    spec = sp.make_spec(np.diag([1.0, 1.3]), 0.4 * np.eye(2), ms.constant(np.eye(2)))
    with pytest.raises(UnsupportedSpec):
        sp.covariance(spec, [1.0, 0.0], [0.0, 1.0])


def test_spec_validation():
    with pytest.raises(InvalidInput):
        sp.make_spec(np.eye(2), 0.4 * np.eye(2), ms.constant([[1.0]]))
    with pytest.raises(DegenerateSpec):
        sp.make_spec(np.eye(2), 0.4 * np.eye(2), ms.atomic([(0.0, np.eye(2)), (0.5, np.eye(2))]))
    with pytest.raises(InvalidInput):
        sp.fbm_spec(1.2)


def test_ofbm_density_and_tail():
    H = np.array([[0.3, 0.1], [0.0, 0.6]])
    A = np.array([[1.0, 0.5j], [0.2, 1.0]])
    with pytest.raises(SingularPoint):
        sp.ofbm_density(H, A, 0.0)
    assert np.allclose(sp.ofbm_density(H, A, -2.0), sp.ofbm_density(H, A, 2.0).conj())
    F = sp.ofbm_tail(H, A, 1.0)
    AA = A @ A.conj().T
    assert np.allclose(H @ F + F @ H.T, AA, rtol=1e-8)
