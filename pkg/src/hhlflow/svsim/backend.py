"""Kernel backend selection.

The compiled core (``_ckernels``) is used when it was built; otherwise the
numpy kernels in ``_pykernels``.  ``HHLFLOW_KERNELS=python`` forces the
fallback, ``HHLFLOW_NUM_THREADS`` sets the compiled core's thread count.
"""
from __future__ import annotations

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on build
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels
    _threads = os.environ.get("HHLFLOW_NUM_THREADS")
    if _threads:
        _ckernels.set_num_threads(int(_threads))


def available() -> list[str]:
    return sorted(_BACKENDS)


def _default_name() -> str:
    forced = os.environ.get("HHLFLOW_KERNELS", "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            log.warning("HHLFLOW_KERNELS=%s not available, falling back", forced)
        else:
            return forced
    return "cython" if "cython" in _BACKENDS else "python"


DEFAULT = _default_name()


def get(name: str | None = None):
    """Kernel module for ``name`` (``None`` selects the default)."""
    if name is None:
        name = DEFAULT
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {available()}") from None
