"""X-programs: a binary term matrix plus an action angle, with a planted key.

Generation hides a quadratic residue code inside the published matrix: the
rows hitting the secret vector form the code's generator matrix, every
other row is a decoy orthogonal to the secret, and an invertible column
transform plus a row shuffle hide where the code sits.

This module also owns the on-disk formats: the program text format, the
base64 key format (MSB-first bytes), and 0/1 sample lines.
"""

from __future__ import annotations

import base64
import binascii
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import gf2, qr_code
from .gf2 import BitMatrix, BitVec, DimensionError
from .rng import Seed, make_rng

_HEADER = "xprogram v1"
_META_RE = re.compile(r"^m=(\d+) n=(\d+) theta=pi/(\d+)$")
_GENERATION_ATTEMPTS = 64


class XProgramParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class KeyFormatError(ValueError):
    """Key text is not valid base64 for the expected bit length."""


class SampleParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class XProgram:
    """Term matrix P (rows = terms, columns = qubits) and the action angle.

    The angle is stored exactly as a rational multiple of pi; the default
    pi/8 is what the hidden-code bias is tuned for.
    """

    P: BitMatrix
    theta_over_pi: Fraction = Fraction(1, 8)

    def __post_init__(self):
        m, n = self.P.nrows, self.P.ncols
        if not m >= n >= 1:
            raise ValueError(f"need at least as many rows as columns and n >= 1, got {m}x{n}")
        if any(r == 0 for r in self.P.row_ints):
            raise ValueError("all-zero rows (identity terms) are not allowed")
        theta = self.theta_over_pi
        if not isinstance(theta, Fraction) or theta <= 0:
            raise ValueError("theta must be a positive rational multiple of pi")

    @property
    def num_terms(self) -> int:
        return self.P.nrows

    @property
    def num_qubits(self) -> int:
        return self.P.ncols


@dataclass(frozen=True)
class SecretKey:
    """Nonzero key vector; samples biased toward orthogonality with it pass the check."""

    s: BitVec
    origin: str = field(default="planted", compare=False)

    def __post_init__(self):
        if not self.s:
            raise ValueError("secret key must be nonzero")


@dataclass(frozen=True)
class GenerationConfig:
    q: int
    n: int
    extra_rows: int | None = None  # decoy rows; defaults to q
    seed: Seed = 0

    @property
    def k(self) -> int:
        return (self.q + 1) // 2

    @property
    def decoy_rows(self) -> int:
        return self.q if self.extra_rows is None else self.extra_rows

    def validate(self) -> None:
        qr_code.qr_params(self.q)
        if self.n < self.k + 1:
            raise ValueError(f"n must be at least k+1 = {self.k + 1} for q={self.q}")
        if self.decoy_rows < self.n - self.k:
            raise ValueError(
                f"need at least n-k = {self.n - self.k} decoy rows to reach full column rank"
            )


def _draw_nonzero_decoy(n: int, rng) -> int:
    # first bit cleared: decoys stay orthogonal to the pre-obfuscation key e1
    mask = ((1 << n) - 1) & ~1
    nbytes = (n + 7) // 8
    while True:
        bits = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if bits:
            return bits


def generate(cfg: GenerationConfig, *, obfuscate: bool = True) -> tuple[XProgram, SecretKey]:
    """Build an X-program with a planted key.

    Layout before hiding: q code rows whose first column is all-ones (so
    they all hit the key e1), with the remaining columns spanning the code
    plus random codeword re-samples, then `extra_rows` nonzero decoys with
    first bit 0. Hiding applies an invertible column transform T (the key
    becomes T^-1 e1) and a row shuffle. obfuscate=False is a test hook
    that skips the hiding step entirely.
    """
    cfg.validate()
    rng = make_rng(cfg.seed)
    q, n, k = cfg.q, cfg.n, cfg.k

    gen = qr_code.build_generator(q)
    cols = list(gen.columns.transpose().row_ints)  # k column words of q bits each
    for _ in range(n - k):
        coeff = BitVec.random(k, rng).to_int()
        word = 0
        while coeff:
            low = coeff & -coeff
            word ^= cols[low.bit_length() - 1]
            coeff ^= low
        cols.append(word)
    code_rows = [0] * q
    for j, col in enumerate(cols):
        while col:
            low = col & -col
            code_rows[low.bit_length() - 1] |= 1 << j
            col ^= low

    for _ in range(_GENERATION_ATTEMPTS):
        decoys = [_draw_nonzero_decoy(n, rng) for _ in range(cfg.decoy_rows)]
        rows = code_rows + decoys
        if gf2.rank(BitMatrix(n, rows)) == n:
            break
    else:
        raise RuntimeError("could not reach full column rank; decoy budget too tight")

    if obfuscate:
        transform = gf2.random_invertible(n, rng)
        matrix = BitMatrix(n, rows) @ transform
        s = gf2.mat_vec(gf2.invert(transform), BitVec.unit(n, 0))
        order = [int(i) for i in rng.permutation(len(rows))]
        matrix = BitMatrix(n, (matrix.row_ints[i] for i in order))
    else:
        matrix = BitMatrix(n, rows)
        s = BitVec.unit(n, 0)

    key = SecretKey(s, origin="planted")
    prog = XProgram(matrix)
    if extract_submatrix(prog.P, key.s).nrows != q:
        raise RuntimeError("generation postcondition failed: key does not tag exactly q rows")
    return prog, key


def extract_submatrix(P: BitMatrix, x: BitVec) -> BitMatrix:
    """Rows of P non-orthogonal to x, original order preserved."""
    if P.ncols != len(x):
        raise DimensionError(f"matrix has {P.ncols} columns, vector has length {len(x)}")
    hits = gf2.mat_vec(P, x).to_int()
    rows = P.row_ints
    selected = []
    while hits:
        low = hits & -hits
        selected.append(rows[low.bit_length() - 1])
        hits ^= low
    return BitMatrix(P.ncols, selected)


def serialize(prog: XProgram) -> str:
    if prog.theta_over_pi.numerator != 1:
        raise ValueError("the text format only carries theta = pi/<denominator>")
    lines = [
        _HEADER,
        f"m={prog.P.nrows} n={prog.P.ncols} theta=pi/{prog.theta_over_pi.denominator}",
    ]
    lines.extend(prog.P.to01())
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> XProgram:
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != _HEADER:
        raise XProgramParseError(1, f"expected header {_HEADER!r}")
    if len(lines) < 2:
        raise XProgramParseError(2, "missing size line")
    match = _META_RE.match(lines[1])
    if not match:
        raise XProgramParseError(2, "expected 'm=<int> n=<int> theta=pi/<int>'")
    m, n, denom = (int(g) for g in match.groups())
    if denom < 1:
        raise XProgramParseError(2, "theta denominator must be positive")
    if len(lines) - 2 != m:
        raise XProgramParseError(2, f"header says m={m} but {len(lines) - 2} rows follow")
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if len(line) != n:
            raise XProgramParseError(lineno, f"expected {n} characters, found {len(line)}")
        bad = set(line) - {"0", "1"}
        if bad:
            raise XProgramParseError(lineno, f"invalid characters {sorted(bad)}")
        value = BitVec.from01(line).to_int()
        if value == 0:
            raise XProgramParseError(lineno, "all-zero row")
        rows.append(value)
    try:
        return XProgram(BitMatrix(n, rows), Fraction(1, denom))
    except ValueError as exc:
        raise XProgramParseError(2, str(exc)) from exc


def encode_bits(v: BitVec) -> str:
    """Base64 of the MSB-first byte packing (External key format)."""
    return base64.b64encode(v.to_bytes_msb()).decode("ascii")


def decode_bits(text: str, n: int) -> BitVec:
    try:
        data = base64.b64decode(text.strip(), validate=True)
    except (binascii.Error, ValueError) as exc:
        raise KeyFormatError(f"invalid base64: {exc}") from exc
    expected = (n + 7) // 8
    if len(data) != expected:
        raise KeyFormatError(f"expected {expected} bytes for {n} bits, got {len(data)}")
    try:
        return BitVec.from_bytes_msb(data, n)
    except ValueError as exc:
        raise KeyFormatError(str(exc)) from exc


def encode_key(key: SecretKey) -> str:
    return encode_bits(key.s)


def decode_key(text: str, n: int) -> SecretKey:
    v = decode_bits(text, n)
    if not v:
        raise KeyFormatError("secret key must be nonzero")
    return SecretKey(v, origin="decoded")


def samples_to_text(samples: Iterable[BitVec]) -> str:
    lines = [s.to01() for s in samples]
    return "\n".join(lines) + "\n" if lines else ""


def samples_from_text(text: str) -> list[BitVec]:
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    samples: list[BitVec] = []
    for lineno, line in enumerate(lines, start=1):
        bad = set(line) - {"0", "1"}
        if bad or not line:
            raise SampleParseError(lineno, "samples must be nonempty strings over 0/1")
        if samples and len(line) != len(samples[0]):
            raise SampleParseError(lineno, f"expected {len(samples[0])} characters, found {len(line)}")
        samples.append(BitVec.from01(line))
    return samples
