import numpy as np
import pytest

from blockenc import encodings as enc
from blockenc import polyapprox as pa
from blockenc import transform as tf
from blockenc.fixtures import floored_spectrum_state, ginibre_state, maximally_mixed
from blockenc.numerics import ValidationError, matrix_function, spectral_norm


def oracle_for(m, label="rho"):
    return enc.purification_of(enc.SubnormalizedDensityOperator.from_matrix(m), label=label)


def identity_poly():
    # P(x) = x in the Chebyshev basis: T_1
    return pa.CertifiedPolynomial(
        coefficients=np.array([0.0, 1.0]), parity="odd", target=lambda x: x,
        certified_interval=(-1.0, 1.0), certified_error=0.0, global_bound=1.0,
        bound_limit=1.0, family="identity")


def constant_one_poly():
    return pa.CertifiedPolynomial(
        coefficients=np.array([1.0]), parity="even", target=lambda x: np.ones_like(x),
        certified_interval=(-1.0, 1.0), certified_error=0.0, global_bound=1.0,
        bound_limit=1.0, family="one")


# -- qsvt_unitary -------------------------------------------------------------

def test_qsvt_unitary_identity_polynomial():
    rng = np.random.default_rng(3)
    rho = ginibre_state(4, 3, rng)
    u = enc.dilate(rho, cost=tf.QueryCost.of("rho"))
    out = tf.qsvt_unitary(u, identity_poly())
    assert spectral_norm(out.encoding.block() - rho) < 1e-9


def test_qsvt_unitary_support_indicator_separates_spectrum():
    r = pa.approx_support_indicator(0.1, 0.01)
    a = np.diag([0.5, 0.05]).astype(complex)
    out = tf.qsvt_unitary(enc.dilate(a), r)
    assert spectral_norm(out.encoding.block() - np.diag([1.0, 0.0])) < 0.02


def test_qsvt_unitary_cost_charges_degree_queries():
    r = pa.approx_support_indicator(0.1, 0.01)
    u = enc.dilate(maximally_mixed(2), cost=tf.QueryCost.of("rho"))
    out = tf.qsvt_unitary(u, r)
    assert out.cost.query_count("rho") == 2 * r.degree
    assert dict(out.cost.controlled)["rho"] == 1


def test_qsvt_unitary_rejects_unbounded_polynomial():
    bad = pa.CertifiedPolynomial(
        coefficients=np.array([0.0, 2.0]), parity="odd", target=None,
        certified_interval=(-1, 1), certified_error=0.0, global_bound=2.0,
        bound_limit=1.0, family="bad")
    with pytest.raises(ValidationError):
        tf.qsvt_unitary(enc.identity_encoding(1), bad)


def test_qsvt_unitary_rejects_non_hermitian_block():
    m = np.array([[0.0, 0.5], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValidationError):
        tf.qsvt_unitary(enc.dilate(m), identity_poly())


# -- qsvt_density -------------------------------------------------------------

def test_qsvt_density_constant_polynomial_returns_state():
    rng = np.random.default_rng(5)
    rho = ginibre_state(4, 2, rng)
    out = tf.qsvt_density(oracle_for(rho), constant_one_poly())
    assert spectral_norm(out.oracle.encoded.matrix - rho) < 1e-10


def test_qsvt_density_identity_polynomial_cubes_diagonal():
    out = tf.qsvt_density(oracle_for(maximally_mixed(2)), identity_poly())
    assert np.allclose(out.oracle.encoded.matrix, np.diag([0.125, 0.125]), atol=1e-10)


def test_qsvt_density_diagonal_is_exact():
    rho = np.diag([0.6, 0.3, 0.1, 0.0]).astype(complex)
    p = pa.approx_positive_power(0.5, 0.05, 0.01)
    out = tf.qsvt_density(oracle_for(rho), p)
    want = np.diag([lam * p(lam) ** 2 for lam in [0.6, 0.3, 0.1, 0.0]])
    assert spectral_norm(out.oracle.encoded.matrix - want) < 1e-10


def test_qsvt_density_matches_spectral_oracle():
    rng = np.random.default_rng(7)
    rho = ginibre_state(8, 3, rng)
    p = pa.approx_positive_power(0.5, 0.05, 0.01)
    out = tf.qsvt_density(oracle_for(rho), p)
    want = matrix_function(rho, lambda w: w * p(w) ** 2, clamp=True)
    assert spectral_norm(out.oracle.encoded.matrix - want) < 1e-8


# -- transform_with_target ----------------------------------------------------

def test_transform_with_target_positive_power_route():
    # f(x) = (delta^c / 2) x^(-c) gives x f(x)^2 = (delta^(2c) / 4) x^(1-2c)
    rng = np.random.default_rng(11)
    rho = floored_spectrum_state(4, 4, rng, floor=0.1)
    c, delta, eps = 0.25, 0.02, 1e-3
    poly = pa.approx_negative_power(c, delta, eps)
    f = lambda x: (delta ** c / 2.0) * np.asarray(x, dtype=float) ** (-c)
    out = tf.transform_with_target(oracle_for(rho), f, poly, delta)
    want = matrix_function(rho, lambda w: (delta ** (2 * c) / 4.0) * w ** (1 - 2 * c),
                           clamp=True)
    assert spectral_norm(out.oracle.encoded.matrix - want) <= out.declared_error


def test_transform_with_target_interval_mismatch():
    poly = pa.approx_negative_power(0.25, 0.05, 1e-2)
    with pytest.raises(ValidationError):
        tf.transform_with_target(oracle_for(maximally_mixed(2)),
                                 lambda x: x, poly, 0.01)


# -- positive_power_density ---------------------------------------------------

def test_positive_power_density_projector_spectrum():
    rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    out = tf.positive_power_density(oracle_for(rho), 0.5, 0.02, 1e-3)
    got = out.scale * out.oracle.encoded.matrix
    want = np.diag([np.sqrt(0.5), np.sqrt(0.5), 0.0, 0.0])
    assert spectral_norm(got - want) <= out.declared_error
    assert spectral_norm(got - want) < 0.05


def test_positive_power_density_zero_state():
    zero = enc.SubnormalizedDensityOperator(np.zeros((2, 2), dtype=complex), 1)
    out = tf.positive_power_density(enc.purification_of(zero), 0.5, 0.05, 1e-2)
    assert spectral_norm(out.oracle.encoded.matrix) < 1e-9


def test_positive_power_density_trace_of_sqrt():
    rng = np.random.default_rng(13)
    rho = floored_spectrum_state(8, 2, rng, floor=0.2)
    out = tf.positive_power_density(oracle_for(rho), 0.5, 0.02, 1e-3)
    got = out.scale * out.oracle.encoded.trace
    want = matrix_function(rho, lambda w: np.sqrt(np.maximum(w, 0)), clamp=True).trace().real
    assert abs(got - want) <= out.declared_error
    assert abs(got - want) < 0.05


# -- positive_power_unitary ---------------------------------------------------

def test_positive_power_unitary_sign_symmetry():
    a = np.diag([1.0, -1.0]).astype(complex)
    out = tf.positive_power_unitary(enc.dilate(a), 0.5, 0.05, 0.01)
    got = 2.0 * out.encoding.block()
    assert spectral_norm(got - np.eye(2)) <= out.declared_error


def test_positive_power_unitary_suppresses_small_eigenvalue():
    a = np.diag([0.5, 0.0]).astype(complex)
    out = tf.positive_power_unitary(enc.dilate(a), 0.5, 0.05, 0.01)
    got = 2.0 * out.encoding.block()
    assert abs(got[1, 1]) <= out.declared_error
    assert abs(got[0, 0] - np.sqrt(0.5)) <= out.declared_error


def test_positive_power_unitary_random_hermitian():
    rng = np.random.default_rng(17)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    a = (g + g.conj().T) / 2
    a /= np.linalg.norm(a, 2) * 1.1
    out = tf.positive_power_unitary(enc.dilate(a), 0.5, 0.05, 0.01)
    want = matrix_function(a, lambda w: np.abs(w) ** 0.5)
    assert spectral_norm(2.0 * out.encoding.block() - want) <= out.declared_error
    out.encoding.check()


def test_positive_power_unitary_cost_is_sum_of_degrees():
    p = pa.cached_positive_power(0.5, 0.05, 0.01)
    r = pa.cached_support_indicator(0.05, 0.01)
    u = enc.dilate(maximally_mixed(2), cost=tf.QueryCost.of("rho"))
    out = tf.positive_power_unitary(u, 0.5, 0.05, 0.01)
    assert out.cost.query_count("rho") == 2 * (p.degree + r.degree)
    assert dict(out.cost.controlled)["rho"] == 1


# -- eigenvalue threshold projector -------------------------------------------

def test_threshold_projector_maximally_mixed_scalar_value():
    delta, eps = 0.05, 0.01
    out = tf.eigenvalue_threshold_projector(oracle_for(maximally_mixed(2)), delta, eps)
    lo, hi = tf.sandwich_coefficients(delta, eps)
    got = out.oracle.encoded.matrix
    assert tf.psd_order_holds(lo * np.eye(2), got)
    assert tf.psd_order_holds(got, hi * np.eye(2))
    # scalar check: x (Q(x))^2 at x = 1/2 is close to delta/4
    assert abs(got[0, 0].real - delta / 4.0) < 0.2 * delta


def test_threshold_projector_annihilates_kernel():
    rho = np.diag([1.0, 0.0]).astype(complex)
    delta, eps = 0.05, 0.01
    out = tf.eigenvalue_threshold_projector(oracle_for(rho), delta, eps)
    got = out.oracle.encoded.matrix
    assert abs(got[1, 1]) <= delta * eps ** 2 + 1e-12


def test_threshold_projector_sandwich_on_random_states():
    rng = np.random.default_rng(19)
    delta, eps = 0.05, 0.01
    for _ in range(5):
        rho = ginibre_state(8, 3, rng)
        out = tf.eigenvalue_threshold_projector(oracle_for(rho), delta, eps)
        got = out.oracle.encoded.matrix
        w, v = np.linalg.eigh(rho)
        supp = (v[:, w > 1e-10] @ v[:, w > 1e-10].conj().T)
        supp2d = (v[:, w > 2 * delta] @ v[:, w > 2 * delta].conj().T)
        lo, hi = tf.sandwich_coefficients(delta, eps)
        assert tf.psd_order_holds(lo * supp2d, got)
        assert tf.psd_order_holds(got, hi * supp)


def test_threshold_projector_precondition():
    with pytest.raises(ValidationError):
        tf.eigenvalue_threshold_projector(oracle_for(maximally_mixed(2)), 0.01, 0.1)


def test_declared_bounds_are_consistent_with_measured_deviation():
    rng = np.random.default_rng(23)
    rho = floored_spectrum_state(8, 3, rng, floor=0.1)
    out = tf.positive_power_density(oracle_for(rho), 0.5, 0.02, 1e-3)
    target = matrix_function(rho, lambda w: np.where(w > 0, w, 0.0) ** 0.5, clamp=True)
    measured = spectral_norm(out.scale * out.oracle.encoded.matrix - target)
    assert measured <= out.declared_error


def test_positive_power_density_c_near_one_sanity():
    # scaled output trace within 5% of tr(A) when all eigenvalues exceed 2 delta
    rng = np.random.default_rng(29)
    rho = floored_spectrum_state(8, 3, rng, floor=0.1)
    out = tf.positive_power_density(oracle_for(rho), 0.99, 0.02, 1e-2)
    got = out.scale * out.oracle.encoded.trace
    assert abs(got - 1.0) <= 0.05
