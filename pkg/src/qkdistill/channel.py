"""Unbiased-noise qunit channel model.

Alice and Bob share a two-qunit isotropic state

    rho_AB = lam * |Phi><Phi| + (1 - lam) * I / n^2,   |Phi> = sum_i |ii> / sqrt(n),

the unique one-parameter unbiased-noise family whose matched-basis outcome
statistics are fully described by a single probability beta0 that the two
sides read the same symbol.  The adversary holds the purification of every
copy (dimension n^2), the worst case: anything weaker only loosens the
security thresholds computed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matcore import DensityOperator, PureState, partial_trace

PROB_ATOL = 1e-9
ZERO_PROB_CUTOFF = 1e-12


@dataclass(frozen=True)
class ChannelParams:
    """Channel parameters: dimension n and symbol-match probability beta0.

    Derived fields: ``lam`` is the isotropic mixing weight with
    beta0 = lam + (1 - lam)/n, and ``q = (1 - beta0)/(n - 1)`` is the
    probability of each particular wrong symbol on Bob's side.
    """

    n: int
    beta0: float
    lam: float = field(init=False)
    q: float = field(init=False)

    def __post_init__(self) -> None:
        n = int(self.n)
        if n < 2:
            raise ValueError(f"qunit dimension must be >= 2, got {n}")
        beta0 = float(self.beta0)
        if not (1.0 / n - 1e-12 <= beta0 <= 1.0 + 1e-12):
            raise ValueError(
                f"beta0={beta0} outside [1/n, 1] = [{1.0/n:.6f}, 1]; "
                "sub-unbiased channels are out of model"
            )
        beta0 = min(max(beta0, 1.0 / n), 1.0)
        lam = (beta0 - 1.0 / n) / (1.0 - 1.0 / n)
        q = (1.0 - beta0) / (n - 1)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "q", q)


def make_params(n: int, beta0: float) -> ChannelParams:
    """Validate and derive channel parameters from (n, beta0)."""
    return ChannelParams(n, beta0)


def maximally_entangled_vector(n: int) -> np.ndarray:
    """|Phi> = sum_i |ii> / sqrt(n) on an n x n bipartite space."""
    phi = np.zeros(n * n, dtype=complex)
    phi[:: n + 1] = 1.0 / np.sqrt(n)
    return phi


def isotropic_state(params: ChannelParams) -> DensityOperator:
    """Two-qunit isotropic state lam*|Phi><Phi| + (1-lam)*I/n^2."""
    n, lam = params.n, params.lam
    phi = maximally_entangled_vector(n)
    mat = lam * np.outer(phi, phi.conj()) + (1.0 - lam) * np.eye(n * n) / (n * n)
    return DensityOperator(mat, (n, n))


@dataclass(frozen=True)
class TripartiteState:
    """Pure state on (Alice, Bob, Eve) with dims (n, n, n^2).

    Eve's subsystem carries the purification of the Alice-Bob state.
    """

    vector: PureState

    def __post_init__(self) -> None:
        dims = self.vector.dims
        if len(dims) != 3 or dims[0] != dims[1] or dims[2] != dims[0] ** 2:
            raise ValueError(f"expected dims (n, n, n^2), got {dims}")

    @property
    def n(self) -> int:
        return self.vector.dims[0]


def purify(rho_ab: DensityOperator) -> TripartiteState:
    """Canonical purification of a two-qunit state, Eve holding dimension n^2.

    Built from the spectral decomposition: |Psi> = sum_k sqrt(mu_k) |k>_AB |k>_E
    with Eve's basis indexed by the AB eigenbasis.  Deterministic for a given
    input; tracing out Eve returns ``rho_ab`` within 1e-9 (verified here).
    """
    if len(rho_ab.dims) != 2 or rho_ab.dims[0] != rho_ab.dims[1]:
        raise ValueError(f"expected a state on dims (n, n), got {rho_ab.dims}")
    n = rho_ab.dims[0]
    mu, v = np.linalg.eigh(rho_ab.matrix)
    if float(mu.min()) < -1e-6:
        raise ValueError(f"input not positive semidefinite: eigenvalue {mu.min():.3e}")
    mu = np.clip(mu, 0.0, None)
    # Relative floor: an O(eps) spurious eigenvalue would otherwise inject
    # O(sqrt(eps)) amplitudes into Eve's conditionals.
    mu[mu < mu.max() * 1e-13] = 0.0
    # Psi[ab, e] = sqrt(mu_e) * v[ab, e]; flattening gives (A, B, E) ordering.
    psi = (v * np.sqrt(mu)[None, :]).reshape(-1)
    state = TripartiteState(PureState(psi, (n, n, n * n)))
    back = partial_trace(state.vector.density(), keep=(0, 1))
    if float(np.abs(back.matrix - rho_ab.matrix).max()) > PROB_ATOL:
        raise ValueError("purification round-trip failed")
    return state


def joint_statistics(params: ChannelParams) -> np.ndarray:
    """Matched-basis outcome distribution P(a, b) as an n x n array.

    P(a, b) = beta0/n on the diagonal and (1 - beta0)/(n(n-1)) elsewhere.
    """
    n, beta0 = params.n, params.beta0
    p = np.full((n, n), (1.0 - beta0) / (n * (n - 1)))
    np.fill_diagonal(p, beta0 / n)
    return p


@dataclass(frozen=True)
class EveConditional:
    """Eve's states conditioned on the (Alice, Bob) outcome pair.

    ``probabilities[a, b]`` is the outcome probability; ``vector(a, b)`` the
    normalized pure conditional on Eve's n^2-dimensional space (conditionals
    of a pure tripartite state are pure).  Outcomes with zero probability
    (e.g. mismatches of a noiseless channel) have no state: ``has_state``
    is False there and ``vector``/``state`` raise KeyError.
    """

    n: int
    probabilities: np.ndarray
    _vectors: dict

    def __post_init__(self) -> None:
        total = float(self.probabilities.sum())
        if abs(total - 1.0) > PROB_ATOL:
            raise ValueError(f"conditional probabilities sum to {total}, not 1")
        probs = np.array(self.probabilities, dtype=float)
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)

    def probability(self, a: int, b: int) -> float:
        return float(self.probabilities[a, b])

    def has_state(self, a: int, b: int) -> bool:
        return (a, b) in self._vectors

    def vector(self, a: int, b: int) -> np.ndarray:
        return self._vectors[(a, b)]

    def state(self, a: int, b: int) -> DensityOperator:
        v = self._vectors[(a, b)]
        return DensityOperator(np.outer(v, v.conj()), (self.n * self.n,))

    def items(self):
        """Iterate (a, b) -> (probability, DensityOperator) over present entries."""
        for (a, b) in sorted(self._vectors):
            yield (a, b), (self.probability(a, b), self.state(a, b))


def eve_conditionals(state: TripartiteState) -> EveConditional:
    """Condition Eve's purification on each (Alice, Bob) measurement pair.

    For outcome (a, b): probability <ab|rho_AB|ab> and Eve's pure state
    proportional to the partial projection <ab|Psi>.  The probabilities
    reproduce :func:`joint_statistics` of the generating channel, and the
    probability-weighted mixture of the conditionals reconstructs Eve's
    reduced state.
    """
    n = state.n
    psi = state.vector.amplitudes.reshape(n * n, n * n)  # rows: AB pair, cols: Eve
    probs = np.zeros((n, n))
    vectors: dict[tuple[int, int], np.ndarray] = {}
    for a in range(n):
        for b in range(n):
            w = psi[a * n + b, :]
            p = float(np.real(np.vdot(w, w)))
            probs[a, b] = p
            if p > ZERO_PROB_CUTOFF:
                vec = w / np.sqrt(p)
                vec.setflags(write=False)
                vectors[(a, b)] = vec
    diag = float(np.trace(probs))
    # Diagonal mass is the symbol-match probability of the generating channel.
    if not (0.0 <= diag <= 1.0 + PROB_ATOL):
        raise ValueError(f"invalid diagonal mass {diag}")
    return EveConditional(n, probs, vectors)


def channel_conditionals(params: ChannelParams) -> EveConditional:
    """Convenience: isotropic state -> purification -> Eve conditionals."""
    return eve_conditionals(purify(isotropic_state(params)))
