"""Combinatorial kernels: compiled when available, pure Python otherwise.

Set ``CREMONA_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if not os.environ.get("CREMONA_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

minus_one_profiles = _impl.minus_one_profiles
max_weight_ideal = _impl.max_weight_ideal

__all__ = ["BACKEND", "minus_one_profiles", "max_weight_ideal"]
