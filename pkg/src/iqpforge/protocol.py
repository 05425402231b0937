"""Verifier check, honest classical baseline, and a brute-force quantum oracle.

The verifier only measures the fraction of samples orthogonal to the key.
Honest quantum sampling gives cos^2(pi/8) = 0.8536, the baseline classical
strategy gives 3/4, and the default threshold sits at their midpoint. The
quantum side here is a desk-scale statevector oracle used to validate the
bias exactly on tiny instances; anything larger is refused by the guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gf2
from .gf2 import BitVec
from .xprogram import SecretKey, XProgram

COS2_THETA_DEFAULT = math.cos(math.pi / 8) ** 2
BASELINE_ORTHOGONAL_PROB = 0.75
DEFAULT_THRESHOLD = (BASELINE_ORTHOGONAL_PROB + COS2_THETA_DEFAULT) / 2

MAX_SIM_TERMS = 24
MAX_SIM_QUBITS = 20

_NORMALIZATION_TOL = 1e-9


class SimulationSizeError(ValueError):
    """Program too large for the brute-force amplitude oracle."""


@dataclass(frozen=True)
class VerifierPolicy:
    sample_count: int = 10_000
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie strictly between 0 and 1")


@dataclass(frozen=True)
class Verdict:
    orthogonal_fraction: float
    passed: bool
    sample_count: int


def verify(key: SecretKey, samples: list[BitVec], policy: VerifierPolicy | None = None) -> Verdict:
    """Fraction of samples orthogonal to the key, compared to the threshold."""
    policy = policy if policy is not None else VerifierPolicy()
    if not samples:
        raise ValueError("at least one sample is required")
    orthogonal = 0
    for x in samples:
        orthogonal += 1 - gf2.dot(x, key.s)
    fraction = orthogonal / len(samples)
    return Verdict(
        orthogonal_fraction=fraction,
        passed=fraction >= policy.threshold,
        sample_count=len(samples),
    )


def baseline_sample(prog: XProgram, rng: np.random.Generator) -> BitVec:
    """Best published classical strategy: XOR the rows hitting two random probes.

    The result is orthogonal to the key with probability exactly 3/4.
    """
    n = prog.P.ncols
    d = BitVec.random(n, rng).to_int()
    e = BitVec.random(n, rng).to_int()
    acc = 0
    for p in prog.P.row_ints:
        if (p & d).bit_count() & 1 and (p & e).bit_count() & 1:
            acc ^= p
    return BitVec(n, acc)


def baseline_samples(prog: XProgram, count: int, rng: np.random.Generator) -> list[BitVec]:
    return [baseline_sample(prog, rng) for _ in range(count)]


def _amplitude_table(prog: XProgram) -> np.ndarray:
    """Statevector after applying every term's rotation to |0...0>.

    Index x of the table is the outcome with bit j of x on qubit j. Each
    term acts as cos(theta) * I + i sin(theta) * (XOR by its row); terms
    commute, so application order is irrelevant.
    """
    m, n = prog.P.nrows, prog.P.ncols
    if m > MAX_SIM_TERMS:
        raise SimulationSizeError(f"{m} terms exceeds the oracle limit of {MAX_SIM_TERMS}")
    if n > MAX_SIM_QUBITS:
        raise SimulationSizeError(f"{n} qubits exceeds the oracle limit of {MAX_SIM_QUBITS}")
    theta = math.pi * prog.theta_over_pi.numerator / prog.theta_over_pi.denominator
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    size = 1 << n
    state = np.zeros(size, dtype=complex)
    state[0] = 1.0
    indices = np.arange(size)
    for row in prog.P.row_ints:
        state = cos_t * state + 1j * sin_t * state[indices ^ row]
    total = float(np.sum(np.abs(state) ** 2))
    if abs(total - 1.0) > _NORMALIZATION_TOL:
        raise RuntimeError(f"state norm drifted to {total}")
    return state


def quantum_amplitudes(prog: XProgram) -> dict[BitVec, complex]:
    """Exact output amplitudes of the program, outcome bitstring -> amplitude."""
    state = _amplitude_table(prog)
    n = prog.P.ncols
    return {BitVec(n, x): complex(state[x]) for x in range(state.size)}


def quantum_sample(prog: XProgram, count: int, rng: np.random.Generator) -> list[BitVec]:
    """i.i.d. draws from the exact output distribution via inverse CDF."""
    state = _amplitude_table(prog)
    probs = np.abs(state) ** 2
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    draws = np.searchsorted(cdf, rng.random(count), side="right")
    n = prog.P.ncols
    return [BitVec(n, int(x)) for x in draws]
