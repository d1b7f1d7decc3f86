"""Extremal eigenvalue-gap statistics for generalized Wigner matrices."""

try:
    from ._core import *  # noqa: F401,F403  (installed layout)
    from . import _core as _c
except ImportError:  # build-tree layout: _core sits on PYTHONPATH
    from _core import *  # noqa: F401,F403
    import _core as _c

__all__ = [name for name in dir(_c) if not name.startswith("_")]
__version__ = "1.0.0"
