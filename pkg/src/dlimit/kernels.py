"""Backend selection for the grid kernels.

The compiled extension is used when it imports; otherwise, or when the
``DLIMIT_PURE`` environment variable is set, the numpy versions are used.
``DLIMIT_THREADS`` caps the worker count of the compiled kernels.
"""
import os

from . import _pykernels

if os.environ.get("DLIMIT_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND


def thread_count() -> int:
    env = os.environ.get("DLIMIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def backend(name=None):
    """Kernel module by name ('cython' or 'numpy'); default is the active one."""
    if name is None:
        return _impl
    if name == "numpy":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def escape_steps(*args, **kw):
    kw.setdefault("threads", thread_count())
    return _impl.escape_steps(*args, **kw)


def cell_undecided(*args, **kw):
    kw.setdefault("threads", thread_count())
    return _impl.cell_undecided(*args, **kw)


def edt_sq(*args, **kw):
    kw.setdefault("threads", thread_count())
    return _impl.edt_sq(*args, **kw)
