"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
``RAILEVAC_PURE_PYTHON`` environment variable is set to a non-empty value,
the numpy/heapq implementation is used. Both expose
``all_pairs_train_time`` and ``transport_ssp`` with identical contracts.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

if _ckernels is not None and not os.environ.get("RAILEVAC_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def get(name: str | None = None):
    """Return the kernel module ``name`` (default: the active backend)."""
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {sorted(BACKENDS)}") from None


def all_pairs_train_time(*args, backend: str | None = None):
    return get(backend).all_pairs_train_time(*args)


def transport_ssp(cost, supply, capacity, tol, backend: str | None = None):
    return get(backend).transport_ssp(cost, supply, capacity, tol)
