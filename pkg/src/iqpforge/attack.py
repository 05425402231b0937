"""Key extraction from X-programs by correlated row sampling.

A single attempt draws a probe vector d and builds rows m_i = m* + (sum of
program rows hitting both d and a fresh random e). When the hidden code's
encoding of d has even parity, every m_i has inner product 1 with the key,
so solving M s = 1 and screening the (usually tiny) solution coset with
the residue-code property test recovers the key. A uniformly drawn d lands
on the even-parity half of the code with probability 1/2, so attempts
succeed independently about half the time and a handful of retries is
enough in practice.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import backends, gf2, qr_code
from .gf2 import BitMatrix, BitVec
from .rng import Seed, make_rng, random_bit_ints
from .xprogram import SecretKey, XProgram


@dataclass(frozen=True)
class AttackConfig:
    rows_per_system: int | None = None  # defaults to 2n
    max_iterations: int = 64
    candidate_cap: int = gf2.DEFAULT_ENUMERATION_CAP
    qr_trials: int = 64
    seed: Seed = 0

    def validate(self) -> None:
        for name in ("max_iterations", "candidate_cap", "qr_trials"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.rows_per_system is not None and self.rows_per_system < 1:
            raise ValueError("rows_per_system must be at least 1")


@dataclass(frozen=True)
class IterationStats:
    rank_of_M: int
    kernel_dim: int  # n - rank_of_M
    candidates_checked: int
    d_was_good: bool  # some candidate passed the residue-code test


@dataclass
class AttackReport:
    key: SecretKey | None
    iterations: list[IterationStats]
    total_candidates_checked: int
    wall_time_seconds: float

    @property
    def succeeded(self) -> bool:
        return self.key is not None

    @property
    def success_stats(self) -> IterationStats | None:
        return self.iterations[-1] if self.succeeded else None


def m_star(P: BitMatrix) -> BitVec:
    """XOR of all rows; has inner product 1 with the key because the code block is odd-sized."""
    acc = 0
    for r in P.row_ints:
        acc ^= r
    return BitVec(P.ncols, acc)


def correlated_row(P: BitMatrix, mstar: BitVec, d: BitVec, e: BitVec) -> BitVec:
    """mstar XOR (sum of rows of P non-orthogonal to both d and e)."""
    if not P.ncols == len(mstar) == len(d) == len(e):
        raise gf2.DimensionError("P, mstar, d and e must share one width")
    rows = backends.kernels().correlated_rows(
        P.row_ints, d.to_int(), [e.to_int()], mstar.to_int(), P.ncols
    )
    return BitVec(P.ncols, rows[0])


def extract_key_once(
    prog: XProgram,
    cfg: AttackConfig,
    rng: np.random.Generator,
    *,
    forced_d: BitVec | None = None,
) -> tuple[SecretKey | None, IterationStats]:
    """One extraction attempt; returns (key or None, stats for this attempt).

    forced_d is a test hook that pins the probe vector instead of drawing it.
    """
    cfg.validate()
    P = prog.P
    n = P.ncols
    rows_per_system = cfg.rows_per_system if cfg.rows_per_system is not None else 2 * n

    d = forced_d if forced_d is not None else BitVec.random(n, rng)
    if len(d) != n:
        raise gf2.DimensionError(f"d has length {len(d)}, program has {n} columns")
    mstar = m_star(P).to_int()
    e_ints = random_bit_ints(n, rows_per_system, rng)
    m_rows = backends.kernels().correlated_rows(P.row_ints, d.to_int(), e_ints, mstar, n)
    M = BitMatrix(n, m_rows)

    sol, rank_of_m = gf2.solve_affine_with_rank(M, BitVec.ones(rows_per_system))
    kernel_dim = n - rank_of_m
    if sol is None:
        return None, IterationStats(rank_of_m, kernel_dim, 0, False)

    candidates, truncated = gf2.enumerate_solutions(sol, cfg.candidate_cap, order="weight")
    if truncated:
        # coset too large to be worth walking; retry with fresh randomness instead
        return None, IterationStats(rank_of_m, kernel_dim, 0, False)

    checked = 0
    for cand in candidates:
        checked += 1
        if not cand:
            continue
        tagged = gf2.mat_vec(P, cand)
        count = tagged.weight()
        if count % 8 != 7 or not qr_code.is_prime(count):
            continue
        hits = tagged.to_int()
        p_rows = P.row_ints
        selected = []
        while hits:
            low = hits & -hits
            selected.append(p_rows[low.bit_length() - 1])
            hits ^= low
        sub = BitMatrix(n, selected)
        if qr_code.looks_like_qr_code(sub, rng, trials=cfg.qr_trials):
            key = SecretKey(cand, origin="recovered")
            return key, IterationStats(rank_of_m, kernel_dim, checked, True)
    return None, IterationStats(rank_of_m, kernel_dim, checked, False)


def extract_key(prog: XProgram, cfg: AttackConfig | None = None) -> AttackReport:
    """Repeat extraction attempts with fresh randomness up to max_iterations."""
    cfg = cfg if cfg is not None else AttackConfig()
    cfg.validate()
    rng = make_rng(cfg.seed)
    start = time.perf_counter()
    iterations: list[IterationStats] = []
    key = None
    for _ in range(cfg.max_iterations):
        key, stats = extract_key_once(prog, cfg, rng)
        iterations.append(stats)
        if key is not None:
            break
    elapsed = time.perf_counter() - start
    total = sum(s.candidates_checked for s in iterations)
    return AttackReport(
        key=key,
        iterations=iterations,
        total_candidates_checked=total,
        wall_time_seconds=elapsed,
    )


def forge_samples(
    prog: XProgram, key: SecretKey, count: int, rng: np.random.Generator
) -> list[BitVec]:
    """Classically forged samples reproducing only the orthogonality bias.

    Each sample is uniform on {x : x.s = 0} with probability cos^2(theta)
    and uniform on the complement otherwise; flipping one fixed coordinate
    where the key is set maps the two sides bijectively, so conditioning
    stays uniform.
    """
    s = key.s
    n = prog.P.ncols
    if len(s) != n:
        raise gf2.DimensionError(f"key has length {len(s)}, program has {n} columns")
    theta = float(np.pi * prog.theta_over_pi.numerator / prog.theta_over_pi.denominator)
    p_orthogonal = float(np.cos(theta) ** 2)
    s_int = s.to_int()
    pivot = 1 << ((s_int & -s_int).bit_length() - 1)
    nbytes = (n + 7) // 8
    mask = (1 << n) - 1
    out = []
    for _ in range(count):
        x = int.from_bytes(rng.bytes(nbytes), "little") & mask
        want = 0 if rng.random() < p_orthogonal else 1
        if (x & s_int).bit_count() & 1 != want:
            x ^= pivot
        out.append(BitVec(n, x))
    return out
