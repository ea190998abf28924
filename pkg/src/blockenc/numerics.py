"""Dense complex linear algebra kernel and exact spectral reference values.

Everything downstream (encodings, transforms, estimators) is checked against
the closed-form quantities computed here by direct eigendecomposition.  All
matrices are plain ``numpy.ndarray`` of complex128; wrappers stay thin.
"""

from __future__ import annotations

import os
from typing import Callable, Sequence

import numpy as np

#: Largest total Hilbert-space dimension the simulator will materialize.
#: Dense eigendecompositions stay sub-second below this.  Override with the
#: BLOCKENC_DIM_CAP environment variable.
DEFAULT_DIMENSION_CAP = 4096

#: Relative tolerance for Hermiticity checks.
HERMITICITY_TOL = 1e-9

#: Eigenvalues in [-EIG_CLAMP, 0) of nominally PSD matrices are clamped to 0
#: before logs and fractional powers.
EIG_CLAMP = 1e-12


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


def dimension_cap() -> int:
    cap = os.environ.get("BLOCKENC_DIM_CAP")
    return int(cap) if cap else DEFAULT_DIMENSION_CAP


def as_matrix(m: np.ndarray | Sequence) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValidationError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    return a


def require_square(m: np.ndarray) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Relative defect ||M - M^dag|| / (1 + ||M||) in spectral norm."""
    a = require_square(m)
    return spectral_norm(a - a.conj().T) / (1.0 + spectral_norm(a))


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = require_square(m)
    defect = spectral_norm(a - a.conj().T)
    if defect > tol * (1.0 + spectral_norm(a)):
        raise ValidationError(f"matrix is not Hermitian within tolerance (defect {defect:.3e})")
    return (a + a.conj().T) / 2.0


def spectral_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m, dtype=complex), 2))


def spectral_decompose(m: np.ndarray, tol: float = HERMITICITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending, real) and orthonormal eigenvector columns.

    Validates Hermiticity, and checks the reconstruction V diag(w) V^dag
    against the input to 1e-8 relative.
    """
    h = require_hermitian(m, tol)
    w, v = np.linalg.eigh(h)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    recon = (v * w) @ v.conj().T
    if spectral_norm(recon - h) > 1e-8 * (1.0 + spectral_norm(h)):
        raise ValidationError("eigendecomposition failed reconstruction check")
    return w.real, v


def clamp_psd_eigenvalues(w: np.ndarray, clamp: float = EIG_CLAMP) -> np.ndarray:
    """Zero out tiny negative eigenvalues of a numerically PSD spectrum."""
    w = np.asarray(w, dtype=float).copy()
    w[(w < 0) & (w >= -clamp * max(1.0, float(np.max(np.abs(w), initial=0.0))))] = 0.0
    return w


def matrix_function(m: np.ndarray, f: Callable[[np.ndarray], np.ndarray],
                    *, clamp: bool = False, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """V f(w) V^dag for Hermitian m; f acts elementwise on the spectrum.

    With clamp=True, tiny negative eigenvalues are zeroed first (for logs
    and fractional powers of numerically PSD inputs).
    """
    w, v = spectral_decompose(m, tol)
    if clamp:
        w = clamp_psd_eigenvalues(w)
    with np.errstate(invalid="ignore", divide="ignore"):
        fw = np.asarray(f(w), dtype=complex)
    if not np.all(np.isfinite(fw)):
        raise ValidationError("eigenvalue outside the domain of the scalar function")
    out = (v * fw) @ v.conj().T
    return (out + out.conj().T) / 2.0


def is_psd(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    h = require_hermitian(m)
    w = np.linalg.eigvalsh(h)
    return bool(w.min() >= -tol * max(1.0, float(np.abs(w).max())))


def partial_trace(state: np.ndarray, keep_dims: int, trace_dims: int) -> np.ndarray:
    """Trace out the trailing factor of a density operator on C^keep x C^trace."""
    rho = require_square(state)
    d = rho.shape[0]
    if keep_dims * trace_dims != d:
        raise ValidationError(f"dimension mismatch: {keep_dims} * {trace_dims} != {d}")
    r = rho.reshape(keep_dims, trace_dims, keep_dims, trace_dims)
    return np.einsum("ikjk->ij", r)


def purify(rho: np.ndarray, min_aux_dim: int = 1) -> np.ndarray:
    """A purification |psi> of a normalized density operator.

    The auxiliary register has dimension max(min_aux_dim, #nonzero eigenvalues)
    rounded up to a power of two; the state lives on C^d (x) C^aux with the
    system factor first.
    """
    w, v = spectral_decompose(rho)
    w = clamp_psd_eigenvalues(w)
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValidationError("purify expects a normalized density operator")
    support = max(1, int(np.count_nonzero(w > 0)))
    aux = 1
    while aux < max(min_aux_dim, support):
        aux *= 2
    psi = np.zeros(rho.shape[0] * aux, dtype=complex)
    for k in range(min(support, len(w))):
        if w[k] <= 0:
            continue
        basis = np.zeros(aux, dtype=complex)
        basis[k] = 1.0
        psi += np.sqrt(w[k]) * np.kron(v[:, k], basis)
    return psi


# ---------------------------------------------------------------------------
# Exact quantities (the trusted oracle for all estimator tests)
# ---------------------------------------------------------------------------

def _spectrum(rho: np.ndarray) -> np.ndarray:
    w, _ = spectral_decompose(rho)
    return clamp_psd_eigenvalues(w)


def von_neumann_entropy(rho: np.ndarray) -> float:
    w = _spectrum(rho)
    w = w[w > 0]
    return float(-(w * np.log(w)).sum())


def trace_power(rho: np.ndarray, alpha: float) -> float:
    if alpha <= 0:
        raise ValidationError("trace_power requires alpha > 0")
    w = _spectrum(rho)
    w = w[w > 0]
    return float((w ** alpha).sum())


def renyi_entropy(rho: np.ndarray, alpha: float) -> float:
    if alpha == 1:
        raise ValidationError("Renyi entropy is undefined at alpha = 1 (use von Neumann)")
    return float(np.log(trace_power(rho, alpha)) / (1.0 - alpha))


def tsallis_entropy(rho: np.ndarray, alpha: float) -> float:
    if alpha == 1:
        raise ValidationError("Tsallis entropy is undefined at alpha = 1 (use von Neumann)")
    return float((trace_power(rho, alpha) - 1.0) / (1.0 - alpha))


def rank_delta(rho: np.ndarray, delta: float) -> int:
    """Number of eigenvalues exceeding delta in magnitude (delta-rank)."""
    w, _ = spectral_decompose(rho)
    return int(np.count_nonzero(np.abs(w) > delta))


def operator_rank(rho: np.ndarray, tol: float = 1e-10) -> int:
    return rank_delta(rho, tol)


def max_entropy(rho: np.ndarray, tol: float = 1e-10) -> float:
    return float(np.log(operator_rank(rho, tol)))


def trace_distance(rho: np.ndarray, sigma: np.ndarray, alpha: float = 1.0) -> float:
    """T_alpha = tr |(rho - sigma)/2|^alpha."""
    if alpha <= 0:
        raise ValidationError("alpha-trace-distance requires alpha > 0")
    nu = (require_hermitian(rho) - require_hermitian(sigma)) / 2.0
    w = np.linalg.eigvalsh(nu)
    aw = np.abs(w)
    aw = aw[aw > EIG_CLAMP]
    return float((aw ** alpha).sum())


def alpha_fidelity(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """F_alpha = tr((sigma^beta rho sigma^beta)^alpha), beta = (1-alpha)/(2 alpha).

    Computed from the singular values of sigma^beta rho^(1/2): their squares
    are the nonzero eigenvalues of the sandwiched product, and the singular
    route stays accurate on rank-deficient states where a direct eigh + sqrt
    would amplify noise near zero.
    """
    if not 0 < alpha < 1:
        raise ValidationError("alpha-fidelity requires alpha in (0, 1)")
    beta = (1.0 - alpha) / (2.0 * alpha)
    sig_b = matrix_function(sigma, lambda w: np.where(w > 0, w, 0.0) ** beta, clamp=True)
    rho_half = matrix_function(rho, lambda w: np.sqrt(np.where(w > 0, w, 0.0)), clamp=True)
    s = np.linalg.svd(sig_b @ rho_half, compute_uv=False)
    s = s[s > 1e-12 * max(1.0, float(s.max(initial=0.0)))]
    return float((s ** (2.0 * alpha)).sum())


_TWO_STATE = {"trace-distance", "fidelity"}
_ALPHA_REQUIRED = {"renyi", "tsallis", "trace-power", "trace-distance", "fidelity"}


def exact_quantity(kind: str, rho: np.ndarray, sigma: np.ndarray | None = None,
                   alpha: float | None = None) -> float:
    """Dispatch on the quantity selector; the trusted oracle for acceptance."""
    kind = kind.lower()
    if kind in _TWO_STATE and sigma is None:
        raise ValidationError(f"{kind} needs a second state")
    if kind in _ALPHA_REQUIRED and alpha is None:
        if kind == "trace-distance":
            alpha = 1.0
        else:
            raise ValidationError(f"{kind} needs alpha")
    if kind == "von-neumann":
        return von_neumann_entropy(rho)
    if kind == "renyi":
        return renyi_entropy(rho, alpha)
    if kind == "tsallis":
        return tsallis_entropy(rho, alpha)
    if kind == "trace-power":
        return trace_power(rho, alpha)
    if kind == "max-entropy":
        return max_entropy(rho)
    if kind == "rank":
        return float(operator_rank(rho))
    if kind == "trace-distance":
        return trace_distance(rho, sigma, alpha)
    if kind == "fidelity":
        return alpha_fidelity(rho, sigma, alpha)
    raise ValidationError(f"unknown quantity {kind!r}")
