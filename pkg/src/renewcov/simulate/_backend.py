"""Kernel backend selection: compiled extension when built, numpy otherwise.

Override with the ``RENEWCOV_BACKEND`` environment variable or the
``backend=`` argument accepted by the engine entry points: ``auto`` (default),
``compiled``, or ``python``.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _pathkernel as _kernel_compiled
except ImportError:
    _kernel_compiled = None

HAVE_COMPILED = _kernel_compiled is not None

_ENV_VAR = "RENEWCOV_BACKEND"


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def resolve_backend(name: str | None = None) -> str:
    name = name or os.environ.get(_ENV_VAR, "auto")
    if name == "auto":
        return "compiled" if HAVE_COMPILED else "python"
    if name == "compiled":
        if not HAVE_COMPILED:
            raise ValueError(
                "compiled backend requested but the extension is not built; "
                "run `python setup.py build_ext --inplace` or reinstall"
            )
        return name
    if name == "python":
        return name
    raise ValueError(f"unknown backend {name!r}; use auto, compiled, or python")


def kernel_for(backend: str):
    return _kernel_compiled if backend == "compiled" else _kernel_py
