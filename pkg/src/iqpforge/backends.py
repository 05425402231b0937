"""Kernel backend selection.

The compiled extension is preferred when it was built; the int-bitset
fallback is always available. IQPFORGE_BACKEND=pure|compiled forces the
choice at import time, set_backend() switches it afterwards (used by the
equivalence tests and the backend benchmark).
"""

from __future__ import annotations

import os

from . import _pure

try:
    from . import _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"pure": _pure}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _initial() -> str:
    forced = os.environ.get("IQPFORGE_BACKEND")
    if forced:
        if forced not in _BACKENDS:
            raise RuntimeError(
                f"IQPFORGE_BACKEND={forced!r} requested but available backends are {sorted(_BACKENDS)}"
            )
        return forced
    return "compiled" if "compiled" in _BACKENDS else "pure"


_active = _initial()


def active_backend() -> str:
    return _active


def set_backend(backend: str) -> None:
    global _active
    if backend not in _BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; available: {sorted(_BACKENDS)}")
    _active = backend


def kernels():
    return _BACKENDS[_active]
