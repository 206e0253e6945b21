"""Branch-and-bound kernel selection.

The compiled kernel is used when the extension was built and
``COARSEGROUPS_PURE`` is unset; otherwise the pure-Python one.
"""
import os

from . import _bnb_py

try:
    if os.environ.get("COARSEGROUPS_PURE"):
        raise ImportError("pure-Python kernel requested")
    from . import _bnb_c
except ImportError:
    _bnb_c = None

BACKENDS = {"python": _bnb_py}
if _bnb_c is not None:
    BACKENDS["cython"] = _bnb_c

BACKEND = "cython" if _bnb_c is not None else "python"

# the compiled kernel stores distances as signed 64-bit ints
INT64_MAX = 2**63 - 1


def get(name=None):
    if name is None:
        name = BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} is not available; have {sorted(BACKENDS)}") from None


greedy = _bnb_py.greedy
