"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``MATCHQ_PURE_PYTHON=1`` to force the pure backend (used by the
benchmark and the backend-parity tests). Both kernels implement the same
algorithm and RNG and produce bit-identical output.
"""

from __future__ import annotations

import os

from . import _chain_py

if os.environ.get("MATCHQ_PURE_PYTHON"):
    _impl = _chain_py
else:
    try:
        from . import _chain_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _chain_py

run_chain = _impl.run_chain
BACKEND: str = _impl.BACKEND


def available_backends() -> dict[str, object]:
    """Map of backend name to its run_chain, for parity tests and benchmarks."""
    backends: dict[str, object] = {"python": _chain_py.run_chain}
    try:
        from . import _chain_cy

        backends["cython"] = _chain_cy.run_chain
    except ImportError:
        pass
    return backends
