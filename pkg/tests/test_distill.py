"""Tests for the repetition protocol: analytic formulas vs an independent
enumeration oracle, transcript invariants, and the seeded Monte Carlo."""

import math
from itertools import product

import numpy as np
import pytest

from qkdistill.channel import make_params
from qkdistill.distill import (
    BlockTranscript,
    acceptance_probability,
    block_rng,
    bob_error_after_ad,
    bob_error_exponent,
    dump_transcripts,
    iter_transcripts,
    run_session,
    simulate_block,
    transcript_line,
)


def enumerate_block_outcomes(n: int, beta0: float, N: int) -> tuple[float, float]:
    """Oracle: enumerate all n^N per-round offset strings directly.

    Bob accepts iff every round has the same offset between his symbol and
    Alice's; his guess is wrong iff that common offset is nonzero.  Returns
    (acceptance probability, error probability among accepted).
    """
    q = (1 - beta0) / (n - 1)
    accept = wrong = 0.0
    for offsets in product(range(n), repeat=N):
        prob = 1.0
        for e in offsets:
            prob *= beta0 if e == 0 else q
        if len(set(offsets)) == 1:
            accept += prob
            if offsets[0] != 0:
                wrong += prob
    return accept, wrong / accept


class TestAnalyticFormulas:
    def test_acceptance_matches_enumeration(self):
        for n, beta0, N in [(2, 0.8, 2), (2, 0.8, 5), (3, 0.6, 3), (4, 0.5, 2), (5, 0.4, 3)]:
            acc, _ = enumerate_block_outcomes(n, beta0, N)
            assert acceptance_probability(make_params(n, beta0), N) == pytest.approx(acc, abs=1e-12)

    def test_acceptance_examples(self):
        assert acceptance_probability(make_params(2, 1.0), 7) == pytest.approx(1.0, abs=1e-12)
        assert acceptance_probability(make_params(2, 0.8), 2) == pytest.approx(0.68, abs=1e-12)
        assert acceptance_probability(make_params(2, 0.5), 3) == pytest.approx(0.25, abs=1e-12)

    def test_bob_error_matches_enumeration(self):
        for n, beta0, N in [(2, 0.8, 2), (2, 0.75, 4), (3, 0.6, 3), (5, 0.4, 2)]:
            _, err = enumerate_block_outcomes(n, beta0, N)
            assert bob_error_after_ad(make_params(n, beta0), N) == pytest.approx(err, abs=1e-12)

    def test_bob_error_examples(self):
        assert bob_error_after_ad(make_params(2, 1.0), 4) == 0.0
        assert bob_error_after_ad(make_params(2, 0.8), 2) == pytest.approx(0.04 / 0.68, abs=1e-12)
        assert bob_error_after_ad(make_params(2, 2 / 3), 1) == pytest.approx(1 / 3, abs=1e-12)
        assert bob_error_after_ad(make_params(2, 0.75), 4) == pytest.approx(0.0121951219, abs=1e-9)

    def test_bob_error_decreasing_in_block_size(self):
        for n, beta0 in [(2, 0.8), (3, 0.5), (5, 0.3)]:
            p = make_params(n, beta0)
            errs = [bob_error_after_ad(p, N) for N in range(1, 8)]
            for a, b in zip(errs, errs[1:]):
                assert b <= a + 1e-12

    def test_exponent_examples(self):
        assert bob_error_exponent(make_params(2, 2 / 3)) == pytest.approx(math.log(0.5), abs=1e-12)
        assert bob_error_exponent(make_params(3, 1 / 3)) == pytest.approx(0.0, abs=1e-12)
        assert bob_error_exponent(make_params(5, 1 / 3)) == pytest.approx(math.log(0.5), abs=1e-12)

    def test_exponent_noiseless_sentinel(self):
        assert bob_error_exponent(make_params(2, 1.0)) == float("-inf")

    def test_exponent_bounds_error_curve(self):
        # log(error) - N*log(q/beta0) stays bounded over N.
        p = make_params(3, 0.6)
        rate = bob_error_exponent(p)
        vals = [
            math.log(bob_error_after_ad(p, N)) - N * rate for N in range(1, 31)
        ]
        assert max(vals) - min(vals) <= math.log(p.n)

    def test_block_size_validation(self):
        with pytest.raises(ValueError):
            acceptance_probability(make_params(2, 0.8), 0)


class TestSimulateBlock:
    def test_noiseless_always_accepts_with_correct_guess(self):
        p = make_params(3, 1.0)
        for i in range(20):
            t = simulate_block(p, 4, block_rng(seed=5, block_index=i))
            assert t.accepted
            assert t.bob_guess == t.secret

    def test_fixed_seed_reproduces_transcript(self):
        p = make_params(3, 0.6)
        t1 = simulate_block(p, 5, block_rng(seed=11, block_index=3))
        t2 = simulate_block(p, 5, block_rng(seed=11, block_index=3))
        assert t1 == t2
        assert transcript_line(t1) == transcript_line(t2)

    def test_different_blocks_differ(self):
        p = make_params(3, 0.6)
        lines = {transcript_line(simulate_block(p, 5, block_rng(0, i))) for i in range(20)}
        assert len(lines) > 1

    def test_announcements_consistent(self):
        p = make_params(5, 0.55)
        for i in range(25):
            t = simulate_block(p, 3, block_rng(seed=2, block_index=i))
            for m, x in zip(t.announcements, t.alice_symbols):
                assert (m + t.secret) % p.n == x

    def test_acceptance_matches_rederived_differences(self):
        p = make_params(4, 0.45)
        for i in range(25):
            t = simulate_block(p, 3, block_rng(seed=9, block_index=i))
            d = [(y - m) % p.n for y, m in zip(t.bob_symbols, t.announcements)]
            assert tuple(d) == t.bob_differences
            assert t.accepted == (len(set(d)) == 1)


class TestTranscriptType:
    def test_inconsistent_acceptance_rejected(self):
        with pytest.raises(ValueError, match="acceptance"):
            BlockTranscript(
                block_size=2,
                alice_symbols=(0, 1),
                secret=0,
                announcements=(0, 1),
                bob_symbols=(0, 0),
                bob_differences=(0, 1),
                accepted=True,
                bob_guess=0,
            )

    def test_guess_required_on_accept(self):
        with pytest.raises(ValueError, match="guess"):
            BlockTranscript(
                block_size=2,
                alice_symbols=(0, 1),
                secret=0,
                announcements=(0, 1),
                bob_symbols=(0, 1),
                bob_differences=(0, 0),
                accepted=True,
                bob_guess=1,
            )

    def test_line_format(self):
        t = BlockTranscript(
            block_size=2,
            alice_symbols=(0, 1),
            secret=1,
            announcements=(1, 0),
            bob_symbols=(0, 1),
            bob_differences=(1, 1),
            accepted=True,
            bob_guess=1,
        )
        assert transcript_line(t) == "2,0,1,1,1,0,0,1,1,1,1,1"

    def test_rejected_line_has_sentinel_guess(self):
        t = BlockTranscript(
            block_size=2,
            alice_symbols=(0, 0),
            secret=0,
            announcements=(0, 0),
            bob_symbols=(0, 1),
            bob_differences=(0, 1),
            accepted=False,
            bob_guess=None,
        )
        assert transcript_line(t).endswith(",0,-1")


class TestRunSession:
    def test_noiseless_session(self):
        stats = run_session(make_params(2, 1.0), 3, 5000, seed=7)
        assert stats.acceptance_rate == 1.0
        assert stats.bob_error_rate == 0.0

    def test_single_block_session(self):
        stats = run_session(make_params(2, 0.7), 2, 1, seed=3)
        assert stats.blocks_run == 1
        assert stats.blocks_accepted in (0, 1)
        assert stats.acceptance_rate in (0.0, 1.0)
        if stats.blocks_accepted == 0:
            assert stats.bob_error_rate is None
        else:
            assert stats.bob_error_rate in (0.0, 1.0)

    def test_deterministic_for_fixed_seed(self):
        p = make_params(3, 0.55)
        assert run_session(p, 3, 200_000, seed=42) == run_session(p, 3, 200_000, seed=42)

    def test_different_seeds_differ(self):
        p = make_params(3, 0.55)
        assert run_session(p, 3, 50_000, seed=1) != run_session(p, 3, 50_000, seed=2)

    def test_matches_analytic_rates(self):
        # Smaller version of the full consistency gate in the acceptance suite.
        for seed, (n, beta0, N) in enumerate([(2, 0.8, 3), (3, 0.6, 2), (5, 0.4, 2)]):
            p = make_params(n, beta0)
            blocks = 200_000
            stats = run_session(p, N, blocks, seed=seed)
            acc = acceptance_probability(p, N)
            err = bob_error_after_ad(p, N)
            se_acc = math.sqrt(acc * (1 - acc) / blocks)
            se_err = math.sqrt(err * (1 - err) / stats.blocks_accepted)
            assert abs(stats.acceptance_rate - acc) <= 4 * se_acc
            assert abs(stats.bob_error_rate - err) <= 4 * se_err

    def test_spans_multiple_chunks(self):
        p = make_params(2, 0.9)
        blocks = (1 << 16) + 123
        stats = run_session(p, 2, blocks, seed=0)
        assert stats.blocks_run == blocks
        acc = acceptance_probability(p, 2)
        assert abs(stats.acceptance_rate - acc) <= 5 * math.sqrt(acc * (1 - acc) / blocks)


class TestTranscriptDump:
    def test_dump_field_count_and_reload(self, tmp_path):
        p = make_params(3, 0.7)
        N, blocks = 4, 50
        path = tmp_path / "transcripts.csv"
        with open(path, "w") as fh:
            dump_transcripts(fh, p, N, blocks, seed=13)
        lines = path.read_text().splitlines()
        assert len(lines) == blocks
        for line, t in zip(lines, iter_transcripts(p, N, blocks, seed=13)):
            fields = [int(v) for v in line.split(",")]
            assert len(fields) == 4 * N + 4
            assert fields[0] == N
            assert line == transcript_line(t)
