"""Purified access oracles, block-encodings, and their composition calculus.

Register convention: system qubits first, block ancillas second, purifying
ancillas last; every block projection applies the <0| pattern to the block
ancilla register.  Composition rules (evolution, products, linear
combinations, LCU) realize the composed operator exactly; transformed
oracles are re-materialized as minimal purifications of the exact output,
while each rule's query cost composes per its stated accounting.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .numerics import (ValidationError, as_matrix, dimension_cap, partial_trace,
                       require_hermitian, require_square, spectral_decompose,
                       clamp_psd_eigenvalues, spectral_norm)
from .resources import QueryCost

PSD_TOL = 1e-9
TRACE_TOL = 1e-9
UNITARITY_TOL = 1e-9

#: Largest total dimension at which composition rules materialize their
#: literal select/swap circuits; above it they fall back to a minimal
#: realization (dilation or re-purification) carrying the same contract,
#: encoded operator, and cost.
LITERAL_DIM_LIMIT = 512


def _qubits(dim: int, what: str) -> int:
    n = int(dim).bit_length() - 1
    if 2 ** n != dim:
        raise ValidationError(f"{what} dimension {dim} is not a power of two")
    return n


def _check_cap(dim: int):
    if dim > dimension_cap():
        raise ValidationError(f"total dimension {dim} exceeds the cap {dimension_cap()}")


def permute_subsystems(u: np.ndarray, dims: tuple[int, ...], perm: tuple[int, ...]) -> np.ndarray:
    """Relabel the tensor factors of an operator on (x)_i C^{dims[i]}."""
    k = len(dims)
    total = int(np.prod(dims))
    m = as_matrix(u).reshape(dims + dims)
    axes = tuple(perm) + tuple(p + k for p in perm)
    return m.transpose(axes).reshape(total, total)


def permutation_gate(dims: tuple[int, ...], perm: tuple[int, ...]) -> np.ndarray:
    """Unitary mapping |i_0 .. i_{k-1}> to the factor order given by perm."""
    k = len(dims)
    total = int(np.prod(dims))
    m = np.eye(total).reshape(dims + dims)
    axes = tuple(perm) + tuple(range(k, 2 * k))
    return m.transpose(axes).reshape(total, total)


def unitarity_defect(u: np.ndarray) -> float:
    """Frobenius norm of U^dag U - I (an upper bound on the spectral defect)."""
    u = require_square(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])))


def unitary_from_first_column(psi: np.ndarray) -> np.ndarray:
    """Any unitary whose first column is the given unit vector."""
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-9:
        raise ValidationError("state vector is not normalized")
    d = psi.size
    m = np.eye(d, dtype=complex)
    m[:, 0] = psi / nrm
    q, _ = np.linalg.qr(m)
    phase = np.vdot(q[:, 0], psi / nrm)
    q = q * phase  # rotate so column 0 equals psi exactly up to 1e-15
    q[:, 0] = psi / nrm
    return q


@dataclass(frozen=True)
class SubnormalizedDensityOperator:
    """PSD operator with trace at most one on a system of n qubits."""

    matrix: np.ndarray
    system_qubits: int

    def __post_init__(self):
        m = require_hermitian(self.matrix)
        if m.shape[0] != 2 ** self.system_qubits:
            raise ValidationError("matrix dimension does not match the qubit count")
        w = np.linalg.eigvalsh(m)
        if w.min() < -PSD_TOL * max(1.0, float(np.abs(w).max())):
            raise ValidationError(f"matrix is not PSD within tolerance (min eig {w.min():.3e})")
        if w.sum() > 1.0 + TRACE_TOL:
            raise ValidationError(f"trace {w.sum():.12f} exceeds one")
        object.__setattr__(self, "matrix", m)

    @staticmethod
    def from_matrix(m: np.ndarray) -> "SubnormalizedDensityOperator":
        m = require_square(m)
        return SubnormalizedDensityOperator(m, _qubits(m.shape[0], "state"))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def rank(self, tol: float = 1e-10) -> int:
        w = np.linalg.eigvalsh(self.matrix)
        return int(np.count_nonzero(w > tol))


@dataclass(frozen=True)
class PurifiedAccessOracle:
    """Unitary preparing a purification whose block projection is ``encoded``."""

    unitary: np.ndarray
    system_qubits: int
    block_ancillas: int
    purifying_ancillas: int
    encoded: SubnormalizedDensityOperator
    cost: QueryCost = field(default_factory=QueryCost)
    label: str = "oracle"

    def __post_init__(self):
        dim = 2 ** (self.system_qubits + self.block_ancillas + self.purifying_ancillas)
        u = as_matrix(self.unitary)
        if u.shape != (dim, dim):
            raise ValidationError("oracle unitary does not match declared registers")

    @property
    def total_qubits(self) -> int:
        return self.system_qubits + self.block_ancillas + self.purifying_ancillas

    def validate(self, tol: float = 1e-9) -> "PurifiedAccessOracle":
        """Unitarity plus extract-vs-declared check (contracts are lazy)."""
        if unitarity_defect(self.unitary) > UNITARITY_TOL:
            raise ValidationError("oracle matrix is not unitary within tolerance")
        self.check(tol)
        return self

    def prepared_state(self) -> np.ndarray:
        return self.unitary[:, 0]

    def extract(self) -> np.ndarray:
        """Recompute the encoded operator from the unitary: trace out the
        purifying register, then project the block ancillas onto <0|...|0>."""
        psi = self.prepared_state()
        keep = 2 ** (self.system_qubits + self.block_ancillas)
        rho = partial_trace(np.outer(psi, psi.conj()), keep, 2 ** self.purifying_ancillas)
        a = 2 ** self.block_ancillas
        return rho.reshape(2 ** self.system_qubits, a, 2 ** self.system_qubits, a)[:, 0, :, 0]

    def check(self, tol: float = 1e-9) -> float:
        defect = spectral_norm(self.extract() - self.encoded.matrix)
        if defect > tol:
            raise ValidationError(f"oracle block deviates from declared operator by {defect:.3e}")
        return defect


@dataclass(frozen=True)
class UnitaryBlockEncoding:
    """(scale, ancillas, error) contract on the top-left block of a unitary.

    ``ancillas`` is the declared contract used by the ledger; the realized
    matrix may use fewer (minimal dilations), and block() always projects on
    the realized ancilla register.
    """

    unitary: np.ndarray
    system_qubits: int
    ancillas: int
    scale: float
    declared_error: float
    target: np.ndarray | None = None
    cost: QueryCost = field(default_factory=QueryCost)

    def __post_init__(self):
        u = as_matrix(self.unitary)
        if u.shape[0] < 2 ** self.system_qubits:
            raise ValidationError("unitary smaller than the system register")
        _qubits(u.shape[0], "encoding")
        if self.scale < 0 or self.declared_error < 0:
            raise ValidationError("scale and declared error must be nonnegative")

    def validate(self, slack: float = 1e-8) -> "UnitaryBlockEncoding":
        """Unitarity plus the (lazy) contract check."""
        if unitarity_defect(self.unitary) > UNITARITY_TOL:
            raise ValidationError("block-encoding matrix is not unitary within tolerance")
        self.check(slack)
        return self

    @property
    def realized_ancillas(self) -> int:
        return _qubits(self.unitary.shape[0], "encoding") - self.system_qubits

    def block(self) -> np.ndarray:
        a = 2 ** self.realized_ancillas
        n = 2 ** self.system_qubits
        return self.unitary.reshape(n, a, n, a)[:, 0, :, 0]

    def actual(self) -> np.ndarray:
        return self.scale * self.block()

    def check(self, slack: float = 1e-8) -> float:
        """Contract invariant: ||scale * block - target|| <= declared_error + slack."""
        if self.target is None:
            return 0.0
        defect = spectral_norm(self.actual() - self.target)
        if defect > self.declared_error + slack:
            raise ValidationError(
                f"encoding misses its target by {defect:.3e} > "
                f"{self.declared_error:.3e} + {slack:.1e}")
        return defect

    def as_scale_one(self) -> "UnitaryBlockEncoding":
        """Reinterpret as a scale-1 encoding of (target / scale)."""
        if self.scale == 1.0:
            return self
        target = None if self.target is None else self.target / self.scale
        return replace(self, scale=1.0, declared_error=self.declared_error / self.scale,
                       target=target)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def purification_of(a, label: str = "oracle",
                    cost: QueryCost | None = None) -> PurifiedAccessOracle:
    """Minimal purified-access oracle for a subnormalized density operator.

    Normalized inputs need no block ancilla; a trace deficit is stored in the
    |1> sector of one block ancilla so the <0| projection returns the input.
    The purifying register has ceil(log2 rank) qubits, at least one.
    """
    if not isinstance(a, SubnormalizedDensityOperator):
        a = SubnormalizedDensityOperator.from_matrix(a)
    deficit = 1.0 - a.trace
    if deficit < -TRACE_TOL:
        raise ValidationError("trace exceeds one")
    if deficit > TRACE_TOL:
        block = 1
        dim = 2 * a.dim
        full = np.zeros((dim, dim), dtype=complex)
        full[::2, ::2] = a.matrix          # (i,0),(j,0) entries: the <0|_a block
        full[1, 1] += deficit              # junk weight at |0>_n |1>_a
    else:
        block = 0
        full = a.matrix / a.trace if a.trace > 1.0 else a.matrix
    w, v = spectral_decompose(full)
    w = clamp_psd_eigenvalues(w)
    support = max(1, int(np.count_nonzero(w > 1e-14)))
    pur = max(1, (support - 1).bit_length())
    _check_cap(full.shape[0] * 2 ** pur)
    psi = np.zeros(full.shape[0] * 2 ** pur, dtype=complex)
    for k in range(support):
        if w[k] <= 0:
            continue
        e = np.zeros(2 ** pur, dtype=complex)
        e[k] = 1.0
        psi += np.sqrt(w[k]) * np.kron(v[:, k], e)
    psi /= np.linalg.norm(psi)
    unitary = unitary_from_first_column(psi)
    return PurifiedAccessOracle(
        unitary=unitary, system_qubits=a.system_qubits, block_ancillas=block,
        purifying_ancillas=pur, encoded=a,
        cost=cost if cost is not None else QueryCost.of(label), label=label)


def dilate(m: np.ndarray, target: np.ndarray | None = None,
           cost: QueryCost | None = None, declared_ancillas: int | None = None,
           scale: float = 1.0, declared_error: float = 0.0) -> UnitaryBlockEncoding:
    """Exact two-block unitary dilation of a contraction (one extra qubit).

    Built from the SVD so the result is unitary to machine precision;
    singular values within tolerance above one are clamped.
    """
    m = require_square(m)
    n = _qubits(m.shape[0], "contraction")
    _check_cap(2 * m.shape[0])
    wl, s, vr = np.linalg.svd(m)
    if s.max(initial=0.0) > 1.0 + PSD_TOL:
        raise ValidationError(f"operator norm {s.max():.6f} exceeds one")
    s = np.minimum(s, 1.0)
    comp = np.sqrt(1.0 - s ** 2)
    top_right = (wl * comp) @ wl.conj().T
    bottom_left = (vr.conj().T * comp) @ vr
    m_eff = (wl * s) @ vr
    blockform = np.block([[m_eff, top_right], [bottom_left, -m_eff.conj().T]])
    # blockform is ancilla-major; reorder to the system-first convention
    u = permute_subsystems(blockform, (2, m.shape[0]), (1, 0))
    return UnitaryBlockEncoding(
        unitary=u, system_qubits=n,
        ancillas=1 if declared_ancillas is None else declared_ancillas,
        scale=scale, declared_error=declared_error,
        target=m if target is None else target,
        cost=cost if cost is not None else QueryCost())


def identity_encoding(n: int) -> UnitaryBlockEncoding:
    return UnitaryBlockEncoding(
        unitary=np.eye(2 ** n, dtype=complex), system_qubits=n, ancillas=0,
        scale=1.0, declared_error=0.0, target=np.eye(2 ** n, dtype=complex))


def block_encode_density(oracle: PurifiedAccessOracle) -> UnitaryBlockEncoding:
    """(1, n+a, 0)-block-encoding of the oracle's operator.

    Swaps a fresh system register into the prepared purification, controlled
    on the block ancillas being |0>; branches with nonzero block ancillas flag
    an extra qubit so the block projection removes them.  Costs one query to
    U and U^dag plus O(a) gates.  Above LITERAL_DIM_LIMIT the realization is
    a minimal dilation with the same contract and cost.
    """
    n = oracle.system_qubits
    dim_n = 2 ** n
    dim_blk = 2 ** oracle.block_ancillas
    dim_pur = 2 ** oracle.purifying_ancillas
    cost = (oracle.cost + oracle.cost).plus_gates(
        oracle.block_ancillas + oracle.purifying_ancillas)
    if dim_n * dim_blk * dim_pur * dim_n * 2 > LITERAL_DIM_LIMIT:
        return dilate(oracle.encoded.matrix, target=oracle.encoded.matrix,
                      cost=cost, declared_ancillas=n + oracle.block_ancillas
                      + oracle.purifying_ancillas)
    if oracle.block_ancillas == 0:
        _check_cap(dim_n * dim_pur * dim_n)
        ext = np.kron(oracle.unitary, np.eye(dim_n))
        swap = permutation_gate((dim_n, dim_pur, dim_n), (2, 1, 0))
        tilde = ext.conj().T @ swap @ ext
        dims = (dim_n, dim_pur, dim_n)
        tilde = permute_subsystems(tilde, dims, (2, 0, 1))
    else:
        _check_cap(dim_n * dim_blk * dim_pur * dim_n * 2)
        sub = (dim_n, dim_pur, dim_n, 2)          # [old sys][pur][new][flag]
        swap_branch = np.kron(permutation_gate(sub[:3], (2, 1, 0)), np.eye(2))
        x_branch = np.kron(np.eye(dim_n * dim_pur * dim_n),
                           np.array([[0, 1], [1, 0]], dtype=complex))
        gate = np.zeros((dim_blk * dim_n * dim_pur * dim_n * 2,) * 2, dtype=complex)
        step = dim_n * dim_pur * dim_n * 2
        for b in range(dim_blk):
            branch = swap_branch if b == 0 else x_branch
            gate[b * step:(b + 1) * step, b * step:(b + 1) * step] = branch
        # gate layout [blk][old sys][pur][new][flag] -> [old sys][blk][pur][new][flag]
        dims = (dim_blk, dim_n, dim_pur, dim_n, 2)
        gate = permute_subsystems(gate, dims, (1, 0, 2, 3, 4))
        ext = np.kron(oracle.unitary, np.eye(dim_n * 2))
        tilde = ext.conj().T @ gate @ ext
        dims = (dim_n, dim_blk, dim_pur, dim_n, 2)
        tilde = permute_subsystems(tilde, dims, (3, 0, 1, 2, 4))
    return UnitaryBlockEncoding(
        unitary=tilde, system_qubits=n,
        ancillas=n + oracle.block_ancillas + oracle.purifying_ancillas,
        scale=1.0, declared_error=0.0, target=oracle.encoded.matrix, cost=cost)


def evolve(oracle: PurifiedAccessOracle, v: UnitaryBlockEncoding,
           label: str | None = None) -> PurifiedAccessOracle:
    """Prepare B A B^dag from an oracle for A and a scale-1 encoding of B.

    The output operator is computed exactly and re-materialized as a minimal
    purification; the cost charges one query to each input.
    """
    if v.system_qubits != oracle.system_qubits:
        raise ValidationError("system dimension mismatch between oracle and encoding")
    if abs(v.scale - 1.0) > 1e-12:
        raise ValidationError("evolution requires a scale-1 block-encoding "
                              "(use as_scale_one())")
    b = v.block()
    out = b @ oracle.encoded.matrix @ b.conj().T
    out = (out + out.conj().T) / 2.0
    return purification_of(
        SubnormalizedDensityOperator(out, oracle.system_qubits),
        label=label or oracle.label, cost=oracle.cost + v.cost)


def embed(oracle: PurifiedAccessOracle, extra_qubits: int) -> PurifiedAccessOracle:
    """Extend the system by b fresh |0> qubits: encodes rho (x) |0><0|."""
    if extra_qubits < 0:
        raise ValidationError("extra_qubits must be nonnegative")
    if extra_qubits == 0:
        return oracle
    dim_b = 2 ** extra_qubits
    dims = (2 ** oracle.system_qubits, 2 ** (oracle.block_ancillas + oracle.purifying_ancillas),
            dim_b)
    _check_cap(int(np.prod(dims)))
    u = permute_subsystems(np.kron(oracle.unitary, np.eye(dim_b)), dims, (0, 2, 1))
    zero = np.zeros((dim_b, dim_b), dtype=complex)
    zero[0, 0] = 1.0
    enc = SubnormalizedDensityOperator(np.kron(oracle.encoded.matrix, zero),
                                       oracle.system_qubits + extra_qubits)
    return PurifiedAccessOracle(
        unitary=u, system_qubits=oracle.system_qubits + extra_qubits,
        block_ancillas=oracle.block_ancillas,
        purifying_ancillas=oracle.purifying_ancillas,
        encoded=enc, cost=oracle.cost, label=oracle.label)


def product(u: UnitaryBlockEncoding, v: UnitaryBlockEncoding) -> UnitaryBlockEncoding:
    """(alpha beta, a+b, alpha eps_v + beta eps_u)-encoding of AB, one query each."""
    if u.system_qubits != v.system_qubits:
        raise ValidationError("system dimension mismatch in product")
    n = u.system_qubits
    dim_n, dim_a, dim_b = 2 ** n, 2 ** u.realized_ancillas, 2 ** v.realized_ancillas
    target = None
    if u.target is not None and v.target is not None:
        target = u.target @ v.target
    err = u.scale * v.declared_error + v.scale * u.declared_error
    cost = u.cost + v.cost
    if dim_n * dim_a * dim_b > LITERAL_DIM_LIMIT:
        return dilate(u.block() @ v.block(), target=target, cost=cost,
                      declared_ancillas=u.ancillas + v.ancillas,
                      scale=u.scale * v.scale, declared_error=err)
    u_pad = np.kron(u.unitary, np.eye(dim_b))
    v_pad = permute_subsystems(np.kron(v.unitary, np.eye(dim_a)),
                               (dim_n, dim_b, dim_a), (0, 2, 1))
    return UnitaryBlockEncoding(
        unitary=u_pad @ v_pad, system_qubits=n, ancillas=u.ancillas + v.ancillas,
        scale=u.scale * v.scale, declared_error=err, target=target, cost=cost)


def encoding_power(u: UnitaryBlockEncoding, k: int) -> UnitaryBlockEncoding:
    """k-fold self-product of a block-encoding."""
    if k < 1:
        raise ValidationError("power must be at least one")
    out = u
    for _ in range(k - 1):
        out = product(out, u)
    return out


def linear_combination_density(coefficients, oracles,
                               label: str | None = None) -> PurifiedAccessOracle:
    """Convex combination sum_k alpha_k A_k of subnormalized density operators.

    Literal select construction: a coefficient-preparation unitary over
    sqrt(alpha_k) controls the padded oracles, with register alignment at the
    maxima of the input ancilla counts.  A coefficient deficit 1 - sum(alpha)
    is parked on a branch that flips a block ancilla, so the block projection
    still returns the declared combination.  One query to each input.  Above
    LITERAL_DIM_LIMIT the output is re-materialized as a minimal purification
    of the exact combination with the same cost.
    """
    alphas = np.asarray(coefficients, dtype=float)
    if alphas.ndim != 1 or alphas.size != len(oracles) or alphas.size == 0:
        raise ValidationError("coefficient count must match the oracle count")
    if alphas.min() < 0:
        raise ValidationError("coefficients must be nonnegative")
    if alphas.size == 1 and abs(alphas[0] - 1.0) <= TRACE_TOL:
        return oracles[0]
    total = float(alphas.sum())
    if total > 1.0 + TRACE_TOL:
        raise ValidationError(f"coefficient sum {total} exceeds one")
    n = oracles[0].system_qubits
    if any(o.system_qubits != n for o in oracles):
        raise ValidationError("all oracles must share the system dimension")
    deficit = max(0.0, 1.0 - total)
    junk = deficit > TRACE_TOL
    a = max(o.block_ancillas for o in oracles)
    if junk:
        a = max(a, 1)
    b = max(o.purifying_ancillas for o in oracles)
    m = max(1, (len(oracles) + (1 if junk else 0) - 1).bit_length())
    dim_m, dim_n, dim_a, dim_b = 2 ** m, 2 ** n, 2 ** a, 2 ** b
    combo_matrix = sum(al * o.encoded.matrix for al, o in zip(alphas, oracles))
    total_cost = QueryCost(gates=2 * m)
    for o in oracles:
        total_cost = total_cost + o.cost
    if dim_m * dim_n * dim_a * dim_b > LITERAL_DIM_LIMIT:
        return purification_of(
            SubnormalizedDensityOperator(np.asarray(combo_matrix), n),
            label=label or oracles[0].label, cost=total_cost)

    coeff_state = np.zeros(dim_m, dtype=complex)
    coeff_state[:alphas.size] = np.sqrt(alphas)
    if junk:
        coeff_state[alphas.size] = np.sqrt(deficit)
    prep = unitary_from_first_column(coeff_state)

    def padded(oracle: PurifiedAccessOracle) -> np.ndarray:
        pa, pb = a - oracle.block_ancillas, b - oracle.purifying_ancillas
        dims = (dim_n, 2 ** oracle.block_ancillas, 2 ** oracle.purifying_ancillas,
                2 ** pa, 2 ** pb)
        ext = np.kron(oracle.unitary, np.eye(2 ** (pa + pb)))
        return permute_subsystems(ext, dims, (0, 1, 3, 2, 4))

    sub = dim_n * dim_a * dim_b
    select = np.zeros((dim_m * sub, dim_m * sub), dtype=complex)
    flip = np.eye(sub, dtype=complex)
    if junk:
        x_first = np.zeros((dim_a, dim_a))
        half = dim_a // 2
        x_first[half:, :half] = np.eye(half)
        x_first[:half, half:] = np.eye(half)
        flip = np.kron(np.kron(np.eye(dim_n), x_first), np.eye(dim_b))
    for k in range(dim_m):
        if k < len(oracles):
            blockk = padded(oracles[k])
        elif junk and k == len(oracles):
            blockk = flip
        else:
            blockk = np.eye(sub, dtype=complex)
        select[k * sub:(k + 1) * sub, k * sub:(k + 1) * sub] = blockk

    u_total = select @ np.kron(prep, np.eye(sub))
    # layout [m][n][a][b] -> [n][a][m][b]; the m register is traced out
    u_total = permute_subsystems(u_total, (dim_m, dim_n, dim_a, dim_b), (1, 2, 0, 3))
    return PurifiedAccessOracle(
        unitary=u_total, system_qubits=n, block_ancillas=a, purifying_ancillas=m + b,
        encoded=SubnormalizedDensityOperator(np.asarray(combo_matrix), n),
        cost=total_cost, label=label or oracles[0].label)


@dataclass(frozen=True)
class StatePreparationPair:
    """(beta, b, eps)-state-preparation pair for a coefficient vector y."""

    left_unitary: np.ndarray
    right_unitary: np.ndarray
    coefficients: np.ndarray
    norm_bound: float
    declared_error: float = 0.0

    def __post_init__(self):
        l, r = as_matrix(self.left_unitary), as_matrix(self.right_unitary)
        if l.shape != r.shape:
            raise ValidationError("pair unitaries must share dimensions")
        for u in (l, r):
            if unitarity_defect(u) > UNITARITY_TOL:
                raise ValidationError("state-preparation pair member is not unitary")
        y = np.asarray(self.coefficients, dtype=complex)
        m = y.size
        if m > l.shape[0]:
            raise ValidationError("coefficient vector longer than the register")
        c, d = l[:, 0], r[:, 0]
        err = float(np.abs(self.norm_bound * c[:m].conj() * d[:m] - y).sum())
        if err > self.declared_error + 1e-9:
            raise ValidationError(f"pair prepares y with l1 defect {err:.3e}")
        beyond = float(np.abs(c[m:].conj() * d[m:]).max(initial=0.0))
        if beyond > 1e-12:
            raise ValidationError("c_j* d_j must vanish beyond the coefficient vector")

    @property
    def qubits(self) -> int:
        return _qubits(self.left_unitary.shape[0], "pair")

    @staticmethod
    def for_coefficients(y) -> "StatePreparationPair":
        """Exact pair with beta = ||y||_1 (zero declared error)."""
        y = np.asarray(y, dtype=complex)
        beta = float(np.abs(y).sum())
        if beta <= 0:
            raise ValidationError("coefficient vector must be nonzero")
        b = max(1, (y.size - 1).bit_length())
        c = np.zeros(2 ** b, dtype=complex)
        d = np.zeros(2 ** b, dtype=complex)
        mags = np.sqrt(np.abs(y) / beta)
        phases = np.where(np.abs(y) > 0, y / np.where(np.abs(y) > 0, np.abs(y), 1.0), 1.0)
        c[:y.size] = mags * phases.conj()
        d[:y.size] = mags
        c /= np.linalg.norm(c)
        d /= np.linalg.norm(d)
        return StatePreparationPair(unitary_from_first_column(c),
                                    unitary_from_first_column(d), y, beta)

    @staticmethod
    def plus_minus() -> "StatePreparationPair":
        """(HX, H): the (2, 1, 0) pair for y = (1, -1)."""
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        return StatePreparationPair(h @ x, h, np.array([1.0, -1.0]), 2.0)


def lcu(pair: StatePreparationPair, encodings) -> UnitaryBlockEncoding:
    """Linear combination of block-encoded operators through a preparation pair.

    Output contract (alpha beta, a+b, alpha eps1 + alpha beta eps2) on
    sum_k y_k A_k; one query to each controlled input and to the pair members.
    Above LITERAL_DIM_LIMIT the realization is a minimal dilation of the
    combined block with the same contract and cost.
    """
    if len(encodings) == 0:
        raise ValidationError("need at least one encoding")
    y = np.asarray(pair.coefficients, dtype=complex)
    if y.size != len(encodings):
        raise ValidationError("coefficient count must match the encoding count")
    n = encodings[0].system_qubits
    alpha = encodings[0].scale
    if any(e.system_qubits != n for e in encodings):
        raise ValidationError("encodings must share the system dimension")
    if any(abs(e.scale - alpha) > 1e-12 for e in encodings):
        raise ValidationError("encodings must share the scale")
    a = max(e.realized_ancillas for e in encodings)
    dim_n, dim_a, dim_b = 2 ** n, 2 ** a, 2 ** pair.qubits
    target = None
    if all(e.target is not None for e in encodings):
        target = np.asarray(sum(yk * e.target for yk, e in zip(y, encodings)))
    eps2 = max(e.declared_error for e in encodings)
    err = alpha * pair.declared_error + alpha * pair.norm_bound * eps2
    cost = QueryCost(gates=pair.qubits ** 2)
    for e in encodings:
        cost = cost + e.cost
    c = pair.left_unitary[:, 0]
    d = pair.right_unitary[:, 0]
    if dim_n * dim_a * dim_b > LITERAL_DIM_LIMIT:
        combined = sum((c[k].conj() * d[k]) * encodings[k].block()
                       for k in range(len(encodings)))
        return dilate(np.asarray(combined), target=target, cost=cost,
                      declared_ancillas=a + pair.qubits,
                      scale=alpha * pair.norm_bound, declared_error=err)

    def padded(e: UnitaryBlockEncoding) -> np.ndarray:
        pad = a - e.realized_ancillas
        return np.kron(e.unitary, np.eye(2 ** pad))

    sub = dim_n * dim_a
    select = np.eye(dim_b * sub, dtype=complex)
    for k in range(len(encodings)):
        select[k * sub:(k + 1) * sub, k * sub:(k + 1) * sub] = padded(encodings[k])
    w = (np.kron(pair.left_unitary.conj().T, np.eye(sub)) @ select
         @ np.kron(pair.right_unitary, np.eye(sub)))
    # layout [b][n][a] -> [n][a][b]
    w = permute_subsystems(w, (dim_b, dim_n, dim_a), (1, 2, 0))
    return UnitaryBlockEncoding(
        unitary=w, system_qubits=n, ancillas=a + pair.qubits,
        scale=alpha * pair.norm_bound, declared_error=err,
        target=target, cost=cost)
