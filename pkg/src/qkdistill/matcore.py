"""Dense complex-matrix and quantum-information primitives.

Everything here operates on plain numpy arrays (complex128) plus three thin
value types: :class:`DensityOperator`, :class:`PureState` and :class:`Povm`.
All values are immutable after construction and every operation is pure, so
the whole module is safe to use from concurrent workers.

Fidelity follows the root convention F = Tr sqrt(sqrt(rho) sigma sqrt(rho)),
i.e. F = |<psi|phi>| for pure states.  With this convention the asymptotic
decay rate of a binary discrimination error for nearly pure hypotheses reads
directly as 2*log(F).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Numerical tolerances, shared across the package.
HERMITIAN_ATOL = 1e-9
TRACE_ATOL = 1e-9
PSD_EIG_FLOOR = -1e-9
CORRUPT_EIG_FLOOR = -1e-6
UNIT_NORM_ATOL = 1e-9
POVM_COMPLETENESS_ATOL = 1e-8
PRIOR_SUM_ATOL = 1e-12


def as_matrix(a: np.ndarray | Sequence) -> np.ndarray:
    """Coerce input to a finite 2-D complex array (rejects NaN/Inf)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix contains non-finite entries")
    return m


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-abs deviation of m from its conjugate transpose."""
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


@dataclass(frozen=True)
class PureState:
    """Unit-norm complex state vector with optional subsystem dimensions."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise ValueError("state vector contains non-finite entries")
        dims = tuple(int(d) for d in self.dims) if self.dims else (v.size,)
        if any(d < 1 for d in dims):
            raise ValueError("subsystem dimensions must be positive")
        if int(np.prod(dims)) != v.size:
            raise ValueError(
                f"product of dims {dims} does not match vector length {v.size}"
            )
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > UNIT_NORM_ATOL:
            raise ValueError(f"state vector norm {norm} deviates from 1")
        object.__setattr__(self, "amplitudes", _readonly(v))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        """Rank-1 density operator |psi><psi|."""
        v = self.amplitudes
        return DensityOperator(np.outer(v, v.conj()), self.dims)


@dataclass(frozen=True)
class DensityOperator:
    """Positive unit-trace Hermitian operator with subsystem metadata.

    Invariants enforced at construction:
      * Hermitian within 1e-9 (max-abs deviation from the adjoint),
      * trace within 1e-9 of 1,
      * minimum eigenvalue >= -1e-9.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density operator must be square, got {m.shape}")
        dims = tuple(int(d) for d in self.dims) if self.dims else (m.shape[0],)
        if any(d < 1 for d in dims):
            raise ValueError("subsystem dimensions must be positive")
        if int(np.prod(dims)) != m.shape[0]:
            raise ValueError(
                f"product of dims {dims} does not match matrix dimension {m.shape[0]}"
            )
        defect = hermiticity_defect(m)
        if defect > HERMITIAN_ATOL:
            raise ValueError(f"not Hermitian: defect {defect:.3e} > {HERMITIAN_ATOL}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {TRACE_ATOL}")
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if min_eig < PSD_EIG_FLOOR:
            raise ValueError(
                f"not positive semidefinite: min eigenvalue {min_eig:.3e}"
            )
        object.__setattr__(self, "matrix", _readonly(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_vector(cls, amplitudes: np.ndarray, dims: tuple[int, ...] = ()) -> "DensityOperator":
        return PureState(np.asarray(amplitudes), dims).density()

    @classmethod
    def maximally_mixed(cls, dim: int, dims: tuple[int, ...] = ()) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim, dims or (dim,))


@dataclass(frozen=True)
class Povm:
    """A positive operator-valued measure: PSD effects summing to identity."""

    effects: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        effects = tuple(_readonly(as_matrix(e)) for e in self.effects)
        if not effects:
            raise ValueError("a Povm needs at least one effect")
        dim = effects[0].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for e in effects:
            if e.shape != (dim, dim):
                raise ValueError("all effects must be square and equally sized")
            defect = hermiticity_defect(e)
            if defect > 10 * HERMITIAN_ATOL:
                raise ValueError(f"effect not Hermitian: defect {defect:.3e}")
            min_eig = float(np.linalg.eigvalsh((e + e.conj().T) / 2).min())
            if min_eig < PSD_EIG_FLOOR:
                raise ValueError(f"effect has negative eigenvalue {min_eig:.3e}")
            total = total + e
        dev = float(np.abs(total - np.eye(dim)).max())
        if dev > POVM_COMPLETENESS_ATOL:
            raise ValueError(f"effects do not sum to identity: deviation {dev:.3e}")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self) -> int:
        return len(self.effects)


def _matrix_of(x) -> np.ndarray:
    """Accept a DensityOperator or a raw array; return the matrix."""
    return x.matrix if isinstance(x, DensityOperator) else as_matrix(x)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker (tensor) product of two matrices."""
    return np.kron(_matrix_of(a), _matrix_of(b))


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Reduce a density operator to the subsystems listed in ``keep``.

    ``keep`` is a nonempty subset of subsystem indices (0-based, referring to
    ``rho.dims``); the kept subsystems retain their original order.  Trace is
    preserved.
    """
    keep_sorted = sorted(set(int(k) for k in keep))
    dims = list(rho.dims)
    if not keep_sorted:
        raise ValueError("keep must be a nonempty set of subsystem indices")
    for k in keep_sorted:
        if k < 0 or k >= len(dims):
            raise ValueError(f"subsystem index {k} out of range for dims {tuple(dims)}")
    if len(keep_sorted) == len(dims):
        return rho
    trace_out = [i for i in range(len(dims)) if i not in keep_sorted]
    arr = rho.matrix.reshape(dims + dims)
    ndims = list(dims)
    for idx in sorted(trace_out, reverse=True):
        arr = np.trace(arr, axis1=idx, axis2=idx + len(ndims))
        del ndims[idx]
    reduced_dim = int(np.prod(ndims))
    return DensityOperator(arr.reshape(reduced_dim, reduced_dim), tuple(ndims))


def hermitian_eigensystem(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (h + h†)/2 before decomposition; inputs whose
    hermiticity defect exceeds 1e-9 are rejected.  Returns eigenvalues in
    ascending order and the matching orthonormal eigenvector columns, so that
    ``h == V @ diag(w) @ V.conj().T`` within numerical accuracy.
    """
    m = _matrix_of(h)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got {m.shape}")
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_ATOL:
        raise ValueError(f"matrix not Hermitian: defect {defect:.3e} > {HERMITIAN_ATOL}")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return w, v


def psd_sqrt(rho) -> np.ndarray:
    """Positive-semidefinite square root.

    Eigenvalues in [-1e-9, 0) are treated as numerical noise and clipped to
    zero; anything below -1e-6 signals a corrupted state and raises.
    """
    w, v = hermitian_eigensystem(_matrix_of(rho))
    if float(w.min()) < CORRUPT_EIG_FLOOR:
        raise ValueError(f"eigenvalue {w.min():.3e} below {CORRUPT_EIG_FLOOR}: corrupted state")
    w = np.clip(w, 0.0, None)
    # Zero out relative-noise eigenvalues: sqrt turns an O(eps) spurious
    # eigenvalue into an O(sqrt(eps)) error, which would dominate otherwise.
    w[w < w.max() * 1e-13] = 0.0
    return (v * np.sqrt(w)[None, :]) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Root fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1].

    Symmetric in its arguments; equals |<psi|phi>| on pure states.
    Evaluated as the trace norm of sqrt(rho) @ sqrt(sigma), which is
    mathematically identical but keeps roundoff linear (no square root of
    eigenvalue-level noise) even for orthogonal or rank-deficient inputs.
    """
    a = _matrix_of(rho)
    b = _matrix_of(sigma)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    vals = np.linalg.svd(psd_sqrt(a) @ psd_sqrt(b), compute_uv=False)
    return min(max(float(vals.sum()), 0.0), 1.0)


def trace_norm(a) -> float:
    """Sum of singular values (for Hermitian input: sum of |eigenvalues|)."""
    m = _matrix_of(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got {m.shape}")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def helstrom_error(p0: float, rho0, p1: float, rho1) -> float:
    """Minimum-error probability for binary state discrimination.

    P_err = (1 - ||p0*rho0 - p1*rho1||_1) / 2 for priors (p0, p1).
    """
    if p0 < 0 or p1 < 0 or abs(p0 + p1 - 1.0) > PRIOR_SUM_ATOL:
        raise ValueError(f"invalid priors ({p0}, {p1}): must be nonnegative and sum to 1")
    a = _matrix_of(rho0)
    b = _matrix_of(rho1)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    delta = p0 * a - p1 * b
    w = np.linalg.eigvalsh((delta + delta.conj().T) / 2)
    err = 0.5 * (1.0 - float(np.abs(w).sum()))
    return min(max(err, 0.0), min(p0, p1))


def helstrom_projectors(p0: float, rho0, p1: float, rho1) -> Povm:
    """Optimal binary projective measurement: project onto the positive
    eigenspace of p0*rho0 - p1*rho1 for outcome 0, complement for outcome 1."""
    delta = p0 * _matrix_of(rho0) - p1 * _matrix_of(rho1)
    w, v = hermitian_eigensystem(delta)
    pos = v[:, w > 0]
    e0 = pos @ pos.conj().T
    e1 = np.eye(delta.shape[0], dtype=complex) - e0
    return Povm((e0, e1))


def square_root_measurement(priors: Sequence[float], states: Sequence) -> Povm:
    """Square-root ("pretty good") measurement for an ensemble of states.

    Effects are E_i = S^(-1/2) p_i rho_i S^(-1/2) with S the ensemble average
    and the inverse square root taken on the support of S.  If S is rank
    deficient the remainder I - sum(E_i) is appended as an extra null effect
    so the result is a complete Povm.  Optimal for geometrically uniform
    (cyclic-shift covariant) pure-state ensembles, which covers every n-ary
    discrimination performed in this package; binary problems use
    :func:`helstrom_error` directly.

    Numerically the effects are built from the polar factor of the stacked
    weighted state factors: with B = [sqrt(p_i) C_i] where rho_i = C_i C_i†
    and B = U diag(sigma) W†, one has S = B B† and S^(-1/2) B = U W†, so each
    effect is a Gram matrix of isometry columns.  That keeps every effect PSD
    and the completeness defect at machine level even when S is nearly
    singular (tiny mixture weights), where conjugating by an explicit
    S^(-1/2) would amplify roundoff beyond the Povm tolerances.
    """
    pr = np.asarray(priors, dtype=float)
    if pr.ndim != 1 or len(pr) != len(states):
        raise ValueError("priors and states must have equal length")
    if np.any(pr < 0) or abs(pr.sum() - 1.0) > PRIOR_SUM_ATOL:
        raise ValueError("priors must be nonnegative and sum to 1")
    mats = [_matrix_of(s) for s in states]
    dim = mats[0].shape[0]
    for m in mats:
        if m.shape != (dim, dim):
            raise ValueError("all states must share one dimension")
    blocks = []
    spans = []
    start = 0
    for p, m in zip(pr, mats):
        w, v = hermitian_eigensystem(m)
        keep = w > max(float(w.max()), 0.0) * 1e-14
        factor = v[:, keep] * np.sqrt(np.clip(w[keep], 0.0, None))[None, :]
        blocks.append(np.sqrt(p) * factor)
        spans.append((start, start + factor.shape[1]))
        start += factor.shape[1]
    stacked = np.hstack(blocks) if start else np.zeros((dim, 0), dtype=complex)
    if stacked.shape[1] == 0:
        raise ValueError("ensemble average state is zero")
    u, sigma, wh = np.linalg.svd(stacked, full_matrices=False)
    if float(sigma.max()) <= 0.0:
        raise ValueError("ensemble average state is zero")
    rank = sigma > float(sigma.max()) * 1e-12
    polar = u[:, rank] @ wh[rank, :]  # = S^(-1/2) @ stacked, on the support
    effects = []
    for lo, hi in spans:
        cols = polar[:, lo:hi]
        effects.append(cols @ cols.conj().T)
    support = u[:, rank] @ u[:, rank].conj().T
    remainder = np.eye(dim, dtype=complex) - support
    if float(np.abs(remainder).max()) > 1e-10:
        effects.append((remainder + remainder.conj().T) / 2)
    return Povm(tuple(effects))


def discrimination_error(priors: Sequence[float], states: Sequence, povm: Povm) -> float:
    """Error probability of guessing hypothesis i on POVM outcome i.

    Effect i is the "guess i" outcome; surplus effects (e.g. a null remainder)
    never count as a correct guess.  Returns 1 - sum_i p_i Tr(E_i rho_i),
    clamped to [0, 1].
    """
    pr = np.asarray(priors, dtype=float)
    if len(povm) < len(pr):
        raise ValueError("need at least one effect per hypothesis")
    mats = [_matrix_of(s) for s in states]
    for m in mats:
        if m.shape != (povm.dim, povm.dim):
            raise ValueError("state dimension does not match POVM dimension")
    correct = sum(
        float(p) * float(np.real(np.trace(e @ m)))
        for p, m, e in zip(pr, mats, povm.effects)
    )
    return min(max(1.0 - correct, 0.0), 1.0)
