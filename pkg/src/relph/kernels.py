"""Hot-kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``RELPH_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("RELPH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

rips_triangles = _impl.rips_triangles
dowker_simplex_values = _impl.dowker_simplex_values
reduce_boundary = _impl.reduce_boundary
linear_assignment = _impl.linear_assignment
max_matching = _impl.max_matching


def backends():
    """Available kernel modules by name, for cross-checking and benchmarks."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
