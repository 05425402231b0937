"""Hidden-code X-programs, the key-extraction attack, and verification oracles."""

from .backends import active_backend, available_backends, set_backend
from .gf2 import BitMatrix, BitVec
from .xprogram import GenerationConfig, SecretKey, XProgram, generate
from .attack import AttackConfig, AttackReport, extract_key, extract_key_once, forge_samples
from .protocol import VerifierPolicy, Verdict, baseline_sample, quantum_amplitudes, quantum_sample, verify

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackReport",
    "BitMatrix",
    "BitVec",
    "GenerationConfig",
    "SecretKey",
    "Verdict",
    "VerifierPolicy",
    "XProgram",
    "active_backend",
    "available_backends",
    "baseline_sample",
    "extract_key",
    "extract_key_once",
    "forge_samples",
    "generate",
    "quantum_amplitudes",
    "quantum_sample",
    "set_backend",
    "verify",
]
