from collections import Counter

import numpy as np
import pytest

from iqpforge import gf2, qr_code
from iqpforge.gf2 import BitMatrix, BitVec, mat_vec, rank
from iqpforge.qr_code import (
    build_generator,
    is_prime,
    looks_like_qr_code,
    qr_params,
    quadratic_residues,
    weight_check,
)
from iqpforge.xprogram import GenerationConfig, extract_submatrix, generate


def span_codewords(columns: BitMatrix) -> list[BitVec]:
    k = columns.ncols
    return [mat_vec(columns, BitVec(k, c)) for c in range(1 << k)]


class TestResidues:
    def test_q7(self):
        assert quadratic_residues(7) == frozenset({1, 2, 4})

    def test_q23(self):
        assert quadratic_residues(23) == frozenset({1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 18})

    @pytest.mark.parametrize("q", [7, 23, 31, 47, 71, 103])
    def test_count_is_half(self, q):
        assert len(quadratic_residues(q)) == (q - 1) // 2

    @pytest.mark.parametrize("q", [1, 2, 4, 9, 15, 21])
    def test_rejects_non_odd_primes(self, q):
        with pytest.raises(ValueError):
            quadratic_residues(q)

    def test_qr_params_needs_7_mod_8(self):
        assert qr_params(7).k == 4
        assert qr_params(103).k == 52
        for q in (11, 13, 17, 41):  # primes but wrong residue class
            with pytest.raises(ValueError):
                qr_params(q)


class TestBuildGenerator:
    def test_q7_weight_distribution_exhaustive(self, backend):
        gen = build_generator(7)
        words = span_codewords(gen.columns)
        assert len({w.to_int() for w in words}) == 16
        dist = Counter(w.weight() for w in words)
        assert dict(dist) == {0: 1, 3: 7, 4: 7, 7: 1}

    def test_q7_all_ones_in_span_and_first_column(self, backend):
        gen = build_generator(7)
        words = {w.to_int() for w in span_codewords(gen.columns)}
        assert (1 << 7) - 1 in words
        assert mat_vec(gen.columns, BitVec.unit(4, 0)) == BitVec.ones(7)

    @pytest.mark.parametrize("q", [7, 23, 31, 47, 103])
    def test_rank_is_k(self, backend, q):
        gen = build_generator(q)
        assert gen.columns.nrows == q
        assert gen.columns.ncols == (q + 1) // 2
        assert rank(gen.columns) == (q + 1) // 2
        assert mat_vec(gen.columns, BitVec.unit((q + 1) // 2, 0)) == BitVec.ones(q)

    def test_cyclic_shift_closure(self, backend):
        for q in (7, 23):
            gen = build_generator(q)
            base_rank = rank(gen.columns.transpose())
            rng = np.random.default_rng(q)
            mask = (1 << q) - 1
            for _ in range(20):
                c = mat_vec(gen.columns, BitVec.random(gen.columns.ncols, rng)).to_int()
                shifted = ((c << 1) | (c >> (q - 1))) & mask
                rows = gen.columns.transpose().row_ints + (shifted,)
                assert rank(BitMatrix(q, rows)) == base_rank  # still inside the span


class TestWeightCheck:
    def test_hand_cases(self):
        assert weight_check(BitVec.zeros(9))
        assert weight_check(BitVec.from01("1110000"))
        assert not weight_check(BitVec.from01("1000000"))
        assert weight_check(BitVec.ones(4))
        assert not weight_check(BitVec.ones(5))

    def test_every_q7_codeword(self, backend):
        gen = build_generator(7)
        assert all(weight_check(w) for w in span_codewords(gen.columns))


class TestSelfOrthogonality:
    def test_q7_exhaustive(self, backend):
        words = span_codewords(build_generator(7).columns)
        even = sum(1 for w in words if w.parity() == 0)
        assert even == 8  # exactly half the codewords have even parity
        for a in words:
            for b in words:
                expected = 0 if (a.parity() == 0 or b.parity() == 0) else 1
                assert gf2.dot(a, b) == expected

    def test_q23_random_pairs(self, backend):
        gen = build_generator(23)
        rng = np.random.default_rng(23)
        k = gen.columns.ncols
        for _ in range(10_000):
            a = mat_vec(gen.columns, BitVec.random(k, rng))
            b = mat_vec(gen.columns, BitVec.random(k, rng))
            expected = 0 if (a.parity() == 0 or b.parity() == 0) else 1
            assert gf2.dot(a, b) == expected


class TestLooksLikeQrCode:
    def test_accepts_planted_submatrix(self, backend):
        for seed in range(5):
            prog, key = generate(GenerationConfig(q=23, n=15, seed=seed))
            sub = extract_submatrix(prog.P, key.s)
            assert looks_like_qr_code(sub, np.random.default_rng(seed))

    def test_rejects_bit_flip(self, backend):
        rejected = 0
        seeds = 100
        for seed in range(seeds):
            prog, key = generate(GenerationConfig(q=23, n=15, seed=seed))
            sub = extract_submatrix(prog.P, key.s)
            rows = list(sub.row_ints)
            rng = np.random.default_rng(1000 + seed)
            i = int(rng.integers(0, len(rows)))
            j = int(rng.integers(0, sub.ncols))
            rows[i] ^= 1 << j
            damaged = BitMatrix(sub.ncols, rows)
            rejected += not looks_like_qr_code(damaged, rng)
        assert rejected >= seeds - 1  # overwhelming rejection probability

    def test_rejects_even_row_count(self, backend):
        rng = np.random.default_rng(0)
        sub = BitMatrix.identity(8)
        assert not looks_like_qr_code(sub, rng)

    def test_rejects_wrong_prime_class(self, backend):
        rng = np.random.default_rng(0)
        assert not looks_like_qr_code(BitMatrix.identity(11), rng)  # 11 = 3 mod 8
        assert not looks_like_qr_code(BitMatrix.identity(9), rng)  # not prime

    def test_rejects_wrong_rank(self, backend):
        # 7 rows but full rank 7 instead of k=4
        rng = np.random.default_rng(0)
        assert not looks_like_qr_code(BitMatrix.identity(7), rng)


def test_is_prime_small_values():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(-3, 50):
        assert is_prime(n) == (n in primes)
