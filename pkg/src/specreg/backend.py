"""Interpolation backend selection.

The voxel-wise sampling loops exist twice: numba ``@njit`` kernels and a
pure-numpy fallback. The environment variable ``SPECREG_BACKEND`` picks one:

* ``numba``  - require the jitted kernels (raises if numba is unusable)
* ``numpy``  - force the pure-numpy path
* ``auto``   - numba when importable, numpy otherwise (default)

Both paths produce bit-identical results; the choice only affects speed.
``benchmarks/bench_kernels.py`` compares them.
"""

import os

ENV_VAR = "SPECREG_BACKEND"
_CHOICES = ("auto", "numba", "numpy")

_active = None


def resolve_backend(name: str | None = None) -> str:
    """Map a requested backend name to 'numba' or 'numpy'."""
    if name is None:
        name = os.environ.get(ENV_VAR, "auto")
    name = name.lower()
    if name not in _CHOICES:
        raise ValueError(f"{ENV_VAR} must be one of {_CHOICES}, got {name!r}")
    if name == "numpy":
        return "numpy"
    if name == "numba":
        import specreg._kernels_numba  # noqa: F401  (fails loudly if broken)
        return "numba"
    try:
        import specreg._kernels_numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


def kernels(name: str | None = None):
    """Return the kernel module for ``name`` (default: env-resolved, cached)."""
    global _active
    if name is None:
        if _active is None:
            _active = resolve_backend()
        name = _active
    else:
        name = resolve_backend(name)
    if name == "numba":
        from specreg import _kernels_numba
        return _kernels_numba
    from specreg import _kernels_numpy
    return _kernels_numpy


def active_backend() -> str:
    """Name of the backend the package is currently dispatching to."""
    return kernels().__name__.rsplit("_", 1)[-1]
