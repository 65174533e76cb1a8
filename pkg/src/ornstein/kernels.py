"""Backend selection for the structured-product kernels.

The compiled extension is used when it imports; ORNSTEIN_KERNEL=python forces
the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("ORNSTEIN_KERNEL", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def get_backend(name=None):
    """Return the kernel module for `name` ('cython', 'python') or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def product_form_dyadic(c1, c2, w, sine, u1, u2, out, backend=None):
    get_backend(backend).product_form_dyadic(c1, c2, w, bool(sine), u1, u2, out)


def product_form_grid(ca, sa, cb, sb, w, sine, out, backend=None):
    get_backend(backend).product_form_grid(ca, sa, cb, sb, w, bool(sine), out)
