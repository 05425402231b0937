import numpy as np
import pytest

from iqpforge import gf2, protocol
from iqpforge.attack import (
    AttackConfig,
    IterationStats,
    correlated_row,
    extract_key,
    extract_key_once,
    forge_samples,
    m_star,
)
from iqpforge.gf2 import BitMatrix, BitVec, DimensionError, dot, mat_vec
from iqpforge.xprogram import GenerationConfig, SecretKey, XProgram, extract_submatrix, generate


def find_probe_with_parity(prog, key, parity, seed=0):
    """Probe d whose encoding under the hidden code block has the given parity."""
    sub = extract_submatrix(prog.P, key.s)
    rng = np.random.default_rng(seed)
    while True:
        d = BitVec.random(prog.P.ncols, rng)
        if mat_vec(sub, d).parity() == parity:
            return d


class TestMStar:
    def test_identity(self):
        assert m_star(BitMatrix.identity(3)) == BitVec.ones(3)

    def test_duplicate_rows_cancel(self):
        P = BitMatrix.from01(["101", "101", "110", "110"])
        assert m_star(P) == BitVec.zeros(3)

    def test_hits_key_on_every_generated_program(self, backend):
        for seed in range(100):
            prog, key = generate(GenerationConfig(q=7, n=5, seed=seed))
            assert dot(m_star(prog.P), key.s) == 1


class TestCorrelatedRow:
    def test_zero_e_gives_m_star(self, backend):
        rng = np.random.default_rng(0)
        P = BitMatrix.identity(6)
        ms = m_star(P)
        d = BitVec.random(6, rng)
        assert correlated_row(P, ms, d, BitVec.zeros(6)) == ms

    def test_all_ones_probes_on_identity_cancel(self, backend):
        # every identity row hits d = e = 1...1, so the sum equals m_star
        P = BitMatrix.identity(5)
        ms = m_star(P)
        assert correlated_row(P, ms, BitVec.ones(5), BitVec.ones(5)) == BitVec.zeros(5)

    def test_dimension_error(self, backend):
        P = BitMatrix.identity(4)
        with pytest.raises(DimensionError):
            correlated_row(P, BitVec.zeros(4), BitVec.zeros(4), BitVec.zeros(5))

    def test_even_parity_probe_pins_every_row(self, backend):
        prog, key = generate(GenerationConfig(q=23, n=14, seed=4))
        ms = m_star(prog.P)
        d = find_probe_with_parity(prog, key, parity=0, seed=1)
        rng = np.random.default_rng(2)
        for _ in range(1000):
            e = BitVec.random(14, rng)
            assert dot(correlated_row(prog.P, ms, d, e), key.s) == 1

    def test_odd_parity_probe_leaves_rows_unpinned(self, backend):
        prog, key = generate(GenerationConfig(q=23, n=14, seed=4))
        ms = m_star(prog.P)
        d = find_probe_with_parity(prog, key, parity=1, seed=1)
        rng = np.random.default_rng(3)
        hits = 0
        for _ in range(1000):
            e = BitVec.random(14, rng)
            hits += dot(correlated_row(prog.P, ms, d, e), key.s)
        assert 200 < hits < 800


class TestExtractKeyOnce:
    def test_success_returns_planted_key(self, backend):
        prog, key = generate(GenerationConfig(q=7, n=5, seed=11))
        rng = np.random.default_rng(0)
        cfg = AttackConfig()
        for _ in range(32):
            found, stats = extract_key_once(prog, cfg, rng)
            assert stats.kernel_dim == prog.P.ncols - stats.rank_of_M
            if found is not None:
                assert found.s == key.s
                assert stats.d_was_good
                assert stats.candidates_checked >= 1
                return
        pytest.fail("no successful attempt in 32 tries")

    def test_forced_odd_parity_probe_fails(self, backend):
        prog, key = generate(GenerationConfig(q=23, n=14, seed=6))
        d = find_probe_with_parity(prog, key, parity=1, seed=7)
        found, stats = extract_key_once(prog, AttackConfig(), np.random.default_rng(8), forced_d=d)
        assert found is None
        assert not stats.d_was_good

    def test_forced_even_parity_probe_succeeds(self, backend):
        prog, key = generate(GenerationConfig(q=23, n=14, seed=6))
        d = find_probe_with_parity(prog, key, parity=0, seed=7)
        found, stats = extract_key_once(prog, AttackConfig(), np.random.default_rng(8), forced_d=d)
        assert found is not None and found.s == key.s

    def test_success_rate_near_half(self, backend):
        successes = 0
        total = 0
        for seed in range(10):
            prog, _ = generate(GenerationConfig(q=103, n=60, seed=seed))
            rng = np.random.default_rng(seed + 500)
            cfg = AttackConfig()
            for _ in range(20):
                found, _ = extract_key_once(prog, cfg, rng)
                successes += found is not None
                total += 1
        assert 0.35 <= successes / total <= 0.65

    def test_candidate_cap_of_one_fails_on_deficient_system(self, backend):
        # find an attempt whose solution coset has at least two members; a cap
        # of one then truncates the enumeration, which counts as a failure
        prog, _ = generate(GenerationConfig(q=7, n=5, seed=0))
        baseline = AttackConfig()
        for seed in range(64):
            found, stats = extract_key_once(prog, baseline, np.random.default_rng(seed))
            if stats.kernel_dim >= 1 and found is not None:
                capped = AttackConfig(candidate_cap=1)
                found2, stats2 = extract_key_once(prog, capped, np.random.default_rng(seed))
                assert found2 is None
                assert stats2.candidates_checked == 0
                assert not stats2.d_was_good
                return
        pytest.fail("no attempt with kernel_dim >= 1 found in 64 seeds")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AttackConfig(max_iterations=0).validate()
        with pytest.raises(ValueError):
            AttackConfig(rows_per_system=0).validate()


class TestExtractKey:
    def test_recovers_many_programs(self, backend):
        iterations = []
        for seed in range(50):
            prog, key = generate(GenerationConfig(q=103, n=60, seed=seed))
            report = extract_key(prog, AttackConfig(seed=seed + 1))
            assert report.succeeded
            assert report.key.s == key.s
            assert report.key.origin == "recovered"
            sub = extract_submatrix(prog.P, report.key.s)
            assert sub.nrows == 103
            iterations.append(len(report.iterations))
        mean_iters = float(np.mean(iterations))
        assert 1.2 <= mean_iters <= 3.2  # geometric with success probability 1/2

    def test_report_bookkeeping(self, backend):
        prog, _ = generate(GenerationConfig(q=23, n=13, seed=2))
        report = extract_key(prog, AttackConfig(seed=3))
        assert report.succeeded
        assert report.total_candidates_checked == sum(
            s.candidates_checked for s in report.iterations
        )
        assert report.wall_time_seconds > 0
        assert report.success_stats is report.iterations[-1]
        assert all(isinstance(s, IterationStats) for s in report.iterations)

    def test_failure_after_max_iterations(self, backend):
        # a valid program with no planted code: all attempts must fail
        rng = np.random.default_rng(0)
        rows = [int.from_bytes(rng.bytes(2), "little") & 0x3FF or 1 for _ in range(20)]
        prog_like = XProgram(BitMatrix(10, rows))
        report = extract_key(prog_like, AttackConfig(max_iterations=8, seed=1))
        assert not report.succeeded
        assert report.key is None
        assert len(report.iterations) == 8
        assert report.success_stats is None


class TestForgeSamples:
    def test_orthogonal_fraction_matches_quantum_bias(self, backend):
        prog, key = generate(GenerationConfig(q=103, n=60, seed=1))
        rng = np.random.default_rng(2)
        samples = forge_samples(prog, key, 10_000, rng)
        frac = sum(1 - dot(x, key.s) for x in samples) / len(samples)
        assert abs(frac - 0.8536) < 0.02

    def test_unit_key_pivot_arithmetic(self, backend):
        prog, _ = generate(GenerationConfig(q=7, n=5, seed=3))
        key = SecretKey(BitVec.unit(5, 0))
        rng = np.random.default_rng(4)
        samples = forge_samples(prog, key, 2000, rng)
        frac = sum(1 - x[0] for x in samples) / len(samples)
        assert abs(frac - 0.8536) < 0.03  # first bit encodes orthogonality here

    def test_forged_batch_passes_verifier(self, backend):
        prog, key = generate(GenerationConfig(q=103, n=60, seed=5))
        rng = np.random.default_rng(6)
        samples = forge_samples(prog, key, 10_000, rng)
        assert protocol.verify(key, samples).passed

    def test_wrong_length_key_rejected(self, backend):
        prog, _ = generate(GenerationConfig(q=7, n=5, seed=7))
        bad = SecretKey(BitVec.ones(6))
        with pytest.raises(DimensionError):
            forge_samples(prog, bad, 10, np.random.default_rng(0))
