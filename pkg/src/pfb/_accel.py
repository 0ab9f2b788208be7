"""Backend switch for the hot loops.

Kernels in :mod:`pfb.kernels` exist twice: a numba ``@njit`` loop and a
pure numpy/scipy path.  Numba is used when importable unless
``PFB_DISABLE_JIT`` is set to a truthy value.  :func:`use_backend` flips the
choice at runtime (benchmarks and equivalence tests use it).
"""
import contextlib
import os

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

_FALSY = ("", "0", "false", "no", "off")


def _default_backend():
    flag = os.environ.get("PFB_DISABLE_JIT", "").strip().lower()
    if flag not in _FALSY or not HAS_NUMBA:
        return "numpy"
    return "numba"


_backend = _default_backend()


def backend():
    return _backend


def set_backend(name):
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name):
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def njit(*args, **kwargs):
    """``numba.njit`` with caching on; identity decorator when numba is absent."""
    if not HAS_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)
