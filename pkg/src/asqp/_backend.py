"""Selects the compiled update-loop kernel when present.

The package works without the extension: every hot kernel has a NumPy
twin, and ``ASQP_BACKEND=python`` forces the fallback even when the
extension imports cleanly (useful for benchmarking the two against each
other).
"""

import os

try:
    from . import _native
except ImportError:  # extension not built for this interpreter
    _native = None

_ENV_CHOICE = os.environ.get("ASQP_BACKEND", "").strip().lower()


def native_module():
    if _ENV_CHOICE == "python":
        return None
    return _native


def native_available() -> bool:
    return _native is not None and _ENV_CHOICE != "python"


def resolve(requested: str = "auto") -> str:
    """Map a requested backend name to the one that will actually run."""
    if requested not in ("auto", "python", "native"):
        raise ValueError(f"unknown backend {requested!r}")
    if requested == "native":
        if not native_available():
            raise RuntimeError("compiled backend requested but not available")
        return "native"
    if requested == "python":
        return "python"
    return "native" if native_available() else "python"
