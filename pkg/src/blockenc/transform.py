"""Eigenvalue transformations of block-encodings and density-operator oracles.

Polynomial transforms are realized semantically: the transformed block is
computed exactly by spectral matrix functions and re-dilated (or re-purified),
while query costs are charged per the originating analysis.  No phase-factor
sequences are synthesized; the circuit-precision parameter becomes
the declared ``QSVT_PRECISION``.  Every declared error bound is the proof's
final inequality chain evaluated with the actual certified polynomial errors,
with explicit constants instead of Theta(.)s.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encodings import (PurifiedAccessOracle, SubnormalizedDensityOperator,
                        UnitaryBlockEncoding, dilate, purification_of)
from .numerics import ValidationError, clamp_psd_eigenvalues, spectral_norm
from .polyapprox import CertifiedPolynomial, multiply
from .resources import QueryCost

#: Declared precision of the (not synthesized) phase-factor computation.
QSVT_PRECISION = 1e-12


@dataclass(frozen=True)
class Provenance:
    name: str
    params: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TransformResult:
    """Transform output with its tracked error bound and cost.

    ``scale * <output block or trace>`` approximates the named target within
    ``declared_error``.
    """

    result: object                    # UnitaryBlockEncoding | PurifiedAccessOracle
    declared_error: float
    scale: float
    cost: QueryCost
    provenance: Provenance

    @property
    def oracle(self) -> PurifiedAccessOracle:
        if not isinstance(self.result, PurifiedAccessOracle):
            raise ValidationError("transform result is not an oracle")
        return self.result

    @property
    def encoding(self) -> UnitaryBlockEncoding:
        if not isinstance(self.result, UnitaryBlockEncoding):
            raise ValidationError("transform result is not a block-encoding")
        return self.result


def _require_admissible(p: CertifiedPolynomial):
    limit = 1.0 if p.parity in ("even", "odd") else 0.5
    if p.global_bound > limit + 1e-9:
        raise ValidationError(
            f"polynomial bound {p.global_bound:.6f} violates the QSVT limit {limit}")


def _hermitian_block(u: UnitaryBlockEncoding) -> np.ndarray:
    b = u.block()
    if spectral_norm(b - b.conj().T) > 1e-8 * (1.0 + spectral_norm(b)):
        raise ValidationError("block-encoded operator is not Hermitian")
    return (b + b.conj().T) / 2.0


def _clipped_eigh(m: np.ndarray, lo: float, hi: float):
    w, v = np.linalg.eigh(m)
    return np.clip(w, lo, hi), v


def qsvt_unitary(u: UnitaryBlockEncoding, p: CertifiedPolynomial) -> TransformResult:
    """(1, a+2, precision)-block-encoding of P(A) from a scale-1 encoding of A.

    Charges d queries to U and U^dag and one controlled query.
    """
    if abs(u.scale - 1.0) > 1e-12:
        raise ValidationError("QSVT needs a scale-1 block-encoding")
    _require_admissible(p)
    a = _hermitian_block(u)
    w, v = _clipped_eigh(a, -1.0, 1.0)
    pa = (v * p(w)) @ v.conj().T
    pa = (pa + pa.conj().T) / 2.0
    d = p.degree
    cost = u.cost.scaled(2 * d) + QueryCost(controlled=u.cost.queries,
                                            gates=(u.realized_ancillas + 1) * d)
    out = dilate(pa, target=pa, cost=cost, declared_ancillas=u.ancillas + 2,
                 declared_error=QSVT_PRECISION)
    return TransformResult(
        result=out, declared_error=QSVT_PRECISION, scale=1.0, cost=cost,
        provenance=Provenance("polynomial-eigenvalue-transform-unitary",
                              {"degree": d, "family": p.family}))


def qsvt_density(oracle: PurifiedAccessOracle, p: CertifiedPolynomial,
                 precision: float = QSVT_PRECISION) -> TransformResult:
    """Oracle preparing A (P(A))^2 from an oracle preparing A.

    The composition constant from the proof is 5/2, so the declared error of
    the prepared operator is 2.5 * precision.  Charges O(d): 2d queries plus
    two controlled queries.
    """
    _require_admissible(p)
    w, v = _clipped_eigh(oracle.encoded.matrix, 0.0, 1.0)
    w = clamp_psd_eigenvalues(w)
    out = (v * (w * p(w) ** 2)) @ v.conj().T
    d = p.degree
    cost = oracle.cost.scaled(2 * d) + QueryCost(
        controlled=oracle.cost.queries,
        gates=(oracle.total_qubits + 1) * d)
    new_oracle = purification_of(
        SubnormalizedDensityOperator(out, oracle.system_qubits),
        label=oracle.label, cost=cost)
    return TransformResult(
        result=new_oracle, declared_error=2.5 * precision, scale=1.0, cost=cost,
        provenance=Provenance("polynomial-eigenvalue-transform-density",
                              {"degree": d, "family": p.family},
                              {"composition_constant": 2.5}))


def transform_with_target(oracle: PurifiedAccessOracle, f, p: CertifiedPolynomial,
                          delta: float,
                          precision: float = QSVT_PRECISION) -> TransformResult:
    """Oracle approximating A (f(A))^2 through a polynomial certified on [delta, 1].

    Declared error: 2 eps + delta + sup_{[0, delta]} |x f(x)^2| + 2.5 precision,
    with eps the polynomial's actual certified error.
    """
    lo, hi = p.certified_interval
    if lo > delta + 1e-12 or hi < 1.0 - 1e-9:
        raise ValidationError(
            f"certification interval [{lo}, {hi}] does not cover [{delta}, 1]")
    inner = qsvt_density(oracle, p, precision)
    grid = np.linspace(0.0, delta, 2001)
    with np.errstate(invalid="ignore", divide="ignore"):
        tail_vals = grid * np.asarray(f(grid), dtype=float) ** 2
    tail = float(np.nanmax(np.abs(tail_vals)))
    err = 2.0 * p.certified_error + delta + tail + 2.5 * precision
    return TransformResult(
        result=inner.result, declared_error=err, scale=1.0, cost=inner.cost,
        provenance=Provenance("eigenvalue-transform-density",
                              {"delta": delta, "epsilon": p.certified_error},
                              {"tail_sup": tail}))


def positive_power_density(oracle: PurifiedAccessOracle, c: float, delta: float,
                           epsilon: float, poly: CertifiedPolynomial | None = None
                           ) -> TransformResult:
    """Oracle for B with 4 delta^(c-1) B ~ A^c, for c in (0, 1).

    Uses the negative-power approximant at exponent (1-c)/2: with
    f(x) = (delta^cn / 2) x^(-cn), the transform prepares
    A f(A)^2 = (delta^(1-c) / 4) A^c.
    """
    if not 0 < c < 1:
        raise ValidationError("positive power exponent must be in (0, 1)")
    if not (0 < delta <= 0.5 and 0 < epsilon <= 0.5):
        raise ValidationError("delta, epsilon must lie in (0, 1/2]")
    c_neg = (1.0 - c) / 2.0
    if poly is None:
        from .polyapprox import cached_negative_power
        poly = cached_negative_power(c_neg, delta, epsilon)

    def f(x):
        return (delta ** c_neg / 2.0) * np.asarray(x, dtype=float) ** (-c_neg)

    inner = transform_with_target(oracle, f, poly, delta)
    scale = 4.0 * delta ** (c - 1.0)
    return TransformResult(
        result=inner.result, declared_error=scale * inner.declared_error,
        scale=scale, cost=inner.cost,
        provenance=Provenance("positive-power-density",
                              {"c": c, "delta": delta, "epsilon": epsilon,
                               "degree": poly.degree},
                              {"scale": scale,
                               "inner_error": inner.declared_error}))


def positive_power_unitary(u: UnitaryBlockEncoding, c: float, delta: float,
                           epsilon: float) -> TransformResult:
    """(2, 2a+4, err)-block-encoding of |A|^c from a scale-1 encoding of A.

    Composes the positive-power approximant with the support indicator via a
    product of two transforms; err evaluates the proof's three regions at the
    actual certified errors: max(eP + eR/2, eR + delta^c/2, eP + (2 delta)^c/2),
    doubled by the scale.  Charges deg(P) + deg(R) queries plus two controlled.
    """
    if not 0 < c < 1:
        raise ValidationError("positive power exponent must be in (0, 1)")
    if not (0 < delta <= 0.25 and 0 < epsilon <= 0.25):
        raise ValidationError("delta, epsilon must lie in (0, 1/4]")
    if abs(u.scale - 1.0) > 1e-12:
        raise ValidationError("positive_power_unitary needs a scale-1 encoding")
    from .polyapprox import cached_positive_power, cached_support_indicator
    p = cached_positive_power(c, delta, epsilon)
    r = cached_support_indicator(delta, epsilon)
    a = _hermitian_block(u)
    w, v = _clipped_eigh(a, -1.0, 1.0)
    bc = (v * (p(w) * r(w))) @ v.conj().T
    bc = (bc + bc.conj().T) / 2.0
    target = (v * np.abs(w) ** c) @ v.conj().T
    target = (target + target.conj().T) / 2.0
    e_p, e_r = p.certified_error, r.certified_error
    err_block = max(e_p + 0.5 * e_r,
                    e_r + 0.5 * delta ** c,
                    e_p + 0.5 * (2.0 * delta) ** c) + 2.0 * QSVT_PRECISION
    d_total = p.degree + r.degree
    cost = u.cost.scaled(2 * d_total) + QueryCost(
        controlled=u.cost.queries, gates=(u.realized_ancillas + 1) * d_total)
    out = dilate(bc, target=target, cost=cost, declared_ancillas=2 * u.ancillas + 4,
                 scale=2.0, declared_error=2.0 * err_block)
    return TransformResult(
        result=out, declared_error=2.0 * err_block, scale=2.0, cost=cost,
        provenance=Provenance("positive-power-unitary",
                              {"c": c, "delta": delta, "epsilon": epsilon,
                               "degree_p": p.degree, "degree_r": r.degree},
                              {"block_error": err_block}))


def sandwich_coefficients(delta: float, epsilon: float) -> tuple[float, float]:
    """Scaled-projector sandwich: lower and upper multipliers of the support
    projectors bounding the threshold-projector output."""
    lo = delta / 4.0 * (1.0 - 2.0 * epsilon) - np.sqrt(delta) * epsilon
    hi = delta / 4.0 + epsilon ** 2 + np.sqrt(delta) * epsilon
    return float(lo), float(hi)


from functools import lru_cache


@lru_cache(maxsize=64)
def _threshold_product_poly(delta: float, epsilon: float) -> CertifiedPolynomial:
    from .polyapprox import cached_negative_power, cached_support_indicator
    return multiply(cached_negative_power(0.5, delta, epsilon),
                    cached_support_indicator(delta, epsilon))


def eigenvalue_threshold_projector(oracle: PurifiedAccessOracle, delta: float,
                                   epsilon: float,
                                   precision: float = QSVT_PRECISION) -> TransformResult:
    """Oracle for B with lo(d,e) P_supp_2d(A) <= B <= hi(d,e) P_supp(A).

    Requires delta, epsilon in (0, 1/10] and 32 epsilon^2 <= delta; B is
    A (Q(A))^2 with Q the product of the negative-power and support-indicator
    approximants at (delta, epsilon).
    """
    if not (0 < delta <= 0.1 and 0 < epsilon <= 0.1):
        raise ValidationError("delta, epsilon must lie in (0, 1/10]")
    if 32.0 * epsilon ** 2 > delta:
        raise ValidationError(f"precondition violated: 32 eps^2 = "
                              f"{32 * epsilon ** 2:.4g} > delta = {delta}")
    q = _threshold_product_poly(delta, epsilon)
    inner = qsvt_density(oracle, q, precision)
    lo, hi = sandwich_coefficients(delta, epsilon)
    return TransformResult(
        result=inner.result, declared_error=2.0 * precision, scale=1.0,
        cost=inner.cost,
        provenance=Provenance("eigenvalue-threshold-projector",
                              {"delta": delta, "epsilon": epsilon,
                               "degree": q.degree},
                              {"sandwich_lower": lo, "sandwich_upper": hi}))


def psd_order_holds(lower: np.ndarray, upper: np.ndarray, tol: float = 1e-8) -> bool:
    """A <= B as a PSD ordering: min eig(B - A) >= -tol * max(1, ||B||)."""
    diff = np.asarray(upper) - np.asarray(lower)
    diff = (diff + diff.conj().T) / 2.0
    w = np.linalg.eigvalsh(diff)
    return bool(w.min() >= -tol * max(1.0, spectral_norm(np.asarray(upper))))
