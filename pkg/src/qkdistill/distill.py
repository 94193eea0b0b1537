"""Classical advantage distillation: repetition blocks over a noisy channel.

Protocol (one block of size N): Alice draws a fresh uniform secret c and
announces m_i = (x_i - c) mod n for her raw symbols x_i.  Bob computes
d_i = (y_i - m_i) mod n from his symbols y_i and accepts the block iff all
d_i agree, in which case the common value is his guess of c.  Sampling uses
the classical per-symbol conditional P(y|x) = beta0 if y == x else q, which
is exactly the matched-basis statistics of the quantum channel; the quantum
detail only matters to the adversary and lives in :mod:`qkdistill.adversary`.

Randomness contract: one master seed.  Per-block generators derive from
``SeedSequence(entropy=seed, spawn_key=(STREAM_BLOCK, block_index))``; the
vectorized session path derives one generator per chunk of ``CHUNK_BLOCKS``
blocks from ``spawn_key=(STREAM_CHUNK, chunk_index)``.  Both schemes are
deterministic and parallelize cleanly (any block or chunk can be regenerated
in isolation).  Within :func:`simulate_block` the draw order is fixed:
alice symbols (N), secret (1), uniforms (N), wrong-symbol shifts (N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterator

import numpy as np

from .channel import ChannelParams

CHUNK_BLOCKS = 1 << 16
STREAM_BLOCK = 1
STREAM_CHUNK = 2


def acceptance_probability(params: ChannelParams, block_size: int) -> float:
    """Probability that Bob accepts a block: beta0^N + (n-1) q^N."""
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    n, beta0, q = params.n, params.beta0, params.q
    return beta0**block_size + (n - 1) * q**block_size

def bob_error_after_ad(params: ChannelParams, block_size: int) -> float:
    """Bob's error probability on accepted blocks.

    (n-1) q^N / (beta0^N + (n-1) q^N); strictly decreasing in N when q < beta0.
    """
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    n, beta0, q = params.n, params.beta0, params.q
    wrong = (n - 1) * q**block_size
    return wrong / (beta0**block_size + wrong)


def bob_error_exponent(params: ChannelParams) -> float:
    """Decay rate ln(q / beta0) of Bob's post-distillation error in N.

    Returns -inf for a noiseless channel (q = 0), where the error is
    identically zero.
    """
    if params.q == 0.0:
        return float("-inf")
    return math.log(params.q / params.beta0)


@dataclass(frozen=True)
class BlockTranscript:
    """One advantage-distillation block, including the public announcements."""

    block_size: int
    alice_symbols: tuple[int, ...]
    secret: int
    announcements: tuple[int, ...]
    bob_symbols: tuple[int, ...]
    bob_differences: tuple[int, ...]
    accepted: bool
    bob_guess: int | None

    def __post_init__(self) -> None:
        N = self.block_size
        fields = (self.alice_symbols, self.announcements, self.bob_symbols, self.bob_differences)
        if any(len(f) != N for f in fields):
            raise ValueError("symbol sequences must all have the block length")
        all_equal = len(set(self.bob_differences)) == 1
        if self.accepted != all_equal:
            raise ValueError("acceptance flag inconsistent with Bob's differences")
        if self.accepted and self.bob_guess != self.bob_differences[0]:
            raise ValueError("bob_guess must be the common difference when accepted")
        if not self.accepted and self.bob_guess is not None:
            raise ValueError("bob_guess must be absent on rejected blocks")


@dataclass(frozen=True)
class SessionStats:
    """Aggregate counts and rates over a simulated session.

    ``bob_error_rate`` is None (undefined) when no block was accepted.
    """

    blocks_run: int
    blocks_accepted: int
    bob_errors: int
    acceptance_rate: float
    bob_error_rate: float | None


def block_rng(seed: int, block_index: int) -> np.random.Generator:
    """Generator for one block under the documented per-block stream scheme."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(STREAM_BLOCK, block_index))
    return np.random.Generator(np.random.PCG64(ss))


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(STREAM_CHUNK, chunk_index))
    return np.random.Generator(np.random.PCG64(ss))


def simulate_block(params: ChannelParams, block_size: int, rng: np.random.Generator) -> BlockTranscript:
    """Simulate one block; deterministic given the generator state."""
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    n, beta0 = params.n, params.beta0
    x = rng.integers(0, n, size=block_size)
    c = int(rng.integers(0, n))
    u = rng.random(block_size)
    shift = rng.integers(1, n, size=block_size)
    y = np.where(u < beta0, x, (x + shift) % n)
    m = (x - c) % n
    d = (y - m) % n
    accepted = bool(np.all(d == d[0]))
    return BlockTranscript(
        block_size=block_size,
        alice_symbols=tuple(int(v) for v in x),
        secret=c,
        announcements=tuple(int(v) for v in m),
        bob_symbols=tuple(int(v) for v in y),
        bob_differences=tuple(int(v) for v in d),
        accepted=accepted,
        bob_guess=int(d[0]) if accepted else None,
    )


def run_session(params: ChannelParams, block_size: int, blocks: int, seed: int = 0) -> SessionStats:
    """Run ``blocks`` independent blocks and aggregate acceptance/error counts.

    Blocks are processed in vectorized chunks, each chunk drawing from its own
    derived stream (see module docstring), so results are reproducible for a
    fixed seed and chunks may be distributed across workers.  Per-chunk draw
    order mirrors :func:`simulate_block`: symbols, secrets, uniforms, shifts.
    """
    if blocks < 1:
        raise ValueError("need at least one block")
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    n, beta0 = params.n, params.beta0
    accepted = 0
    errors = 0
    for chunk_index, start in enumerate(range(0, blocks, CHUNK_BLOCKS)):
        count = min(CHUNK_BLOCKS, blocks - start)
        rng = _chunk_rng(seed, chunk_index)
        x = rng.integers(0, n, size=(count, block_size))
        c = rng.integers(0, n, size=count)
        u = rng.random((count, block_size))
        shift = rng.integers(1, n, size=(count, block_size))
        y = np.where(u < beta0, x, (x + shift) % n)
        d = (y - (x - c[:, None])) % n
        acc = np.all(d == d[:, :1], axis=1)
        accepted += int(acc.sum())
        errors += int(np.count_nonzero(d[acc, 0] != c[acc]))
    return SessionStats(
        blocks_run=blocks,
        blocks_accepted=accepted,
        bob_errors=errors,
        acceptance_rate=accepted / blocks,
        bob_error_rate=(errors / accepted) if accepted else None,
    )


def transcript_line(t: BlockTranscript) -> str:
    """Serialize one transcript as a comma-separated line of base-10 integers.

    Field order: block_size, alice symbols, secret, announcements, bob
    symbols, bob differences, accepted (0/1), bob guess (-1 when rejected).
    """
    parts = [t.block_size]
    parts += list(t.alice_symbols)
    parts.append(t.secret)
    parts += list(t.announcements)
    parts += list(t.bob_symbols)
    parts += list(t.bob_differences)
    parts.append(1 if t.accepted else 0)
    parts.append(t.bob_guess if t.bob_guess is not None else -1)
    return ",".join(str(p) for p in parts)


def iter_transcripts(params: ChannelParams, block_size: int, blocks: int, seed: int = 0) -> Iterator[BlockTranscript]:
    """Yield ``blocks`` transcripts under the per-block stream scheme."""
    for i in range(blocks):
        yield simulate_block(params, block_size, block_rng(seed, i))


def dump_transcripts(out: IO[str], params: ChannelParams, block_size: int, blocks: int, seed: int = 0) -> None:
    """Write one transcript line per block (debug output format)."""
    for t in iter_transcripts(params, block_size, blocks, seed):
        out.write(transcript_line(t) + "\n")
