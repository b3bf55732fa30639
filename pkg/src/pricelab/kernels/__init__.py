"""Subset-enumeration kernels with a compiled core and a NumPy fallback.

The hot loops (boost-factor tables over all 2^m bundles, buyer best-response
sweeps, exact max directed cut, fire-vector expectations) live in a Cython
extension; if it is missing or ``PRICELAB_BACKEND=python`` is set, the NumPy
implementations in :mod:`pricelab.kernels.numpy_backend` are used instead.
Both expose the same functions and are cross-checked in the test suite.
"""

from __future__ import annotations

import os

from . import numpy_backend

if os.environ.get("PRICELAB_BACKEND", "").lower() in {"python", "numpy", "py"}:
    _impl = numpy_backend
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = numpy_backend

boost_table = _impl.boost_table
best_responses = _impl.best_responses
best_response_stream = _impl.best_response_stream
max_dicut = _impl.max_dicut
degree_fire_expectation = _impl.degree_fire_expectation

# Pure utilities shared by both backends.
lex_less = numpy_backend.lex_less
lex_rank = numpy_backend.lex_rank


def backend_name() -> str:
    """Name of the active backend: 'compiled' or 'numpy'."""
    return "numpy" if _impl is numpy_backend else "compiled"


def available_backends() -> dict[str, object]:
    """Importable backends, keyed by name (for benchmarks and parity tests)."""
    out: dict[str, object] = {"numpy": numpy_backend}
    try:
        from . import _ckernels

        out["compiled"] = _ckernels
    except ImportError:
        pass
    return out
