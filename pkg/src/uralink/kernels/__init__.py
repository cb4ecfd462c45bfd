"""Backend dispatch for the hot kernels.

The numba backend is used when importable; set ``URALINK_NO_NUMBA=1`` to
force the pure-numpy fallback.  Every public wrapper accepts an optional
``backend`` argument ("numba" or "numpy") so tests and benchmarks can pin a
path explicitly.
"""

from __future__ import annotations

import os

import numpy as np

from . import numpy_impl

_DISABLED = os.environ.get("URALINK_NO_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on")

if not _DISABLED:
    try:
        from . import numba_impl
    except ImportError:
        numba_impl = None
else:
    numba_impl = None

BACKEND = "numba" if numba_impl is not None else "numpy"


def available_backends() -> list[str]:
    return ["numpy"] if numba_impl is None else ["numpy", "numba"]


def _resolve(backend):
    name = BACKEND if backend is None else backend
    if name == "numpy":
        return name
    if name == "numba":
        if numba_impl is None:
            raise RuntimeError("numba backend requested but not available")
        return name
    raise ValueError(f"unknown backend {backend!r}")


def warmup() -> None:
    """Compile the numba kernels ahead of time (no-op on the numpy path)."""
    if numba_impl is not None:
        numba_impl.warmup()


def screen_patterns(r, columns, ratios, var0, backend=None):
    if _resolve(backend) == "numba":
        return numba_impl.screen_patterns(r, columns, ratios, var0)
    return numpy_impl.screen_patterns(r, columns, ratios, var0)


def interference_stats(ex, vx, ratios_flat, rsq_flat, sigma2, index,
                       backend=None):
    """``index`` is a ``uralink.ga_mud.UseIndex`` describing slot sharing."""
    if ex.shape[0] == 0:
        empty = np.zeros(0)
        return (empty, empty.copy(), np.zeros(index.num_uses),
                np.full(index.num_uses, sigma2))
    if _resolve(backend) == "numba":
        return numba_impl.interference_stats(
            ex, vx, ratios_flat, rsq_flat, sigma2,
            index.use_ptr, index.use_members)
    return numpy_impl.interference_stats(
        ex, vx, ratios_flat, rsq_flat, sigma2,
        index.slot_use, index.pair_dst, index.pair_src, index.num_uses)


def activity_scores(lm, lprior, rsq_flat, v_xi, n_c, backend=None):
    if lm.shape[0] == 0:
        return np.zeros(0)
    if _resolve(backend) == "numba":
        return numba_impl.activity_scores(lm, lprior, rsq_flat, v_xi, n_c)
    return numpy_impl.activity_scores(lm, lprior, rsq_flat, v_xi, n_c)


def bp_decode_batch(llrs, graph, max_iter, clip, backend=None):
    """``graph`` is a ``uralink.channel_code.CodeGraph``."""
    if llrs.shape[0] == 0:
        return (np.zeros_like(llrs), np.zeros(0, dtype=bool),
                np.zeros(0, dtype=np.int32))
    if _resolve(backend) == "numba":
        return numba_impl.bp_decode_batch(
            llrs, graph.cn_ptr, graph.cn_edges, graph.vn_ptr, graph.vn_edges,
            graph.edge_var, max_iter, clip)
    return numpy_impl.bp_decode_batch(
        llrs, graph.cn_pad, graph.cn_mask, graph.cn_var_pad,
        graph.vn_pad, graph.vn_mask, graph.edge_var, max_iter, clip)
