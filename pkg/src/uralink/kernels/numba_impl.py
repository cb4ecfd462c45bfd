"""Numba-compiled implementations of the hot kernels.

Semantics mirror ``numpy_impl``; fastmath stays off so that accumulation
order (and therefore the exact-arithmetic guarantees of the leave-one-out
interference sums) is preserved.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_LN2 = math.log(2.0)
_ATANH_LIMIT = 1.0 - 1e-15


@njit(cache=True)
def screen_patterns(r, columns, ratios, var0):
    M, n_c = columns.shape
    scores = np.empty(M)
    for i in range(M):
        p = ratios[i]
        s = 0.0
        for j in range(n_c):
            z = p * r[columns[i, j]] / var0
            az = abs(z)
            s += az + math.log1p(math.exp(-2.0 * az)) - _LN2
        scores[i] = s - n_c * p * p / (2.0 * var0)
    return scores


@njit(cache=True)
def interference_stats(ex, vx, ratios_flat, rsq_flat, sigma2,
                       use_ptr, use_members):
    num_uses = use_ptr.shape[0] - 1
    e_xi = np.empty_like(ex)
    v_xi = np.empty_like(vx)
    er = np.empty(num_uses)
    vr = np.empty(num_uses)
    for j in range(num_uses):
        a, b = use_ptr[j], use_ptr[j + 1]
        se = 0.0
        sv = 0.0
        for t in range(a, b):
            s = use_members[t]
            se += ratios_flat[s] * ex[s]
            sv += rsq_flat[s] * vx[s]
        er[j] = se
        vr[j] = sv + sigma2
        for t in range(a, b):
            st = use_members[t]
            e = 0.0
            v = 0.0
            for u in range(a, b):
                if u == t:
                    continue
                s = use_members[u]
                e += ratios_flat[s] * ex[s]
                v += rsq_flat[s] * vx[s]
            e_xi[st] = e
            v_xi[st] = sigma2 + v
    return e_xi, v_xi, er, vr


@njit(cache=True)
def _logaddexp(x, y):
    if x < y:
        x, y = y, x
    if x == -np.inf:
        return x
    return x + math.log1p(math.exp(y - x))


@njit(cache=True)
def activity_scores(lm, lprior, rsq_flat, v_xi, n_c):
    C = lm.shape[0] // n_c
    lb = np.empty(C)
    for k in range(C):
        acc = 0.0
        base = k * n_c
        for j in range(n_c):
            s = base + j
            a = 0.5 * lm[s]
            acc += (_logaddexp(lprior[s] + a, -a) - _logaddexp(lprior[s], 0.0)
                    - rsq_flat[s] / (2.0 * v_xi[s]))
        lb[k] = acc
    return lb


@njit(cache=True)
def bp_decode_batch(llrs, cn_ptr, cn_edges, vn_ptr, vn_edges, edge_var,
                    max_iter, clip):
    C, n = llrs.shape
    E = edge_var.shape[0]
    num_checks = cn_ptr.shape[0] - 1
    app = np.empty((C, n))
    parity = np.zeros(C, dtype=np.bool_)
    iters = np.full(C, max_iter, dtype=np.int32)
    dc_max = 0
    for c in range(num_checks):
        d = cn_ptr[c + 1] - cn_ptr[c]
        if d > dc_max:
            dc_max = d
    tbuf = np.empty(dc_max)
    pre = np.empty(dc_max)
    lam = np.empty(n)
    mv = np.empty(E)
    mc = np.empty(E)
    for w in range(C):
        for v in range(n):
            x = llrs[w, v]
            if x > clip:
                x = clip
            elif x < -clip:
                x = -clip
            lam[v] = x
            app[w, v] = x
        for e in range(E):
            mv[e] = lam[edge_var[e]]
        for it in range(1, max_iter + 1):
            for c in range(num_checks):
                a, b = cn_ptr[c], cn_ptr[c + 1]
                d = b - a
                run = 1.0
                for i in range(d):
                    tbuf[i] = math.tanh(0.5 * mv[cn_edges[a + i]])
                    pre[i] = run
                    run *= tbuf[i]
                suf = 1.0
                for i in range(d - 1, -1, -1):
                    ext = pre[i] * suf
                    if ext > _ATANH_LIMIT:
                        ext = _ATANH_LIMIT
                    elif ext < -_ATANH_LIMIT:
                        ext = -_ATANH_LIMIT
                    m = 2.0 * math.atanh(ext)
                    if m > clip:
                        m = clip
                    elif m < -clip:
                        m = -clip
                    mc[cn_edges[a + i]] = m
                    suf *= tbuf[i]
            for v in range(n):
                s = lam[v]
                for t in range(vn_ptr[v], vn_ptr[v + 1]):
                    s += mc[vn_edges[t]]
                app[w, v] = s
                for t in range(vn_ptr[v], vn_ptr[v + 1]):
                    e = vn_edges[t]
                    m = s - mc[e]
                    if m > clip:
                        m = clip
                    elif m < -clip:
                        m = -clip
                    mv[e] = m
            ok = True
            for c in range(num_checks):
                x = 0
                for t in range(cn_ptr[c], cn_ptr[c + 1]):
                    if app[w, edge_var[cn_edges[t]]] < 0.0:
                        x ^= 1
                if x == 1:
                    ok = False
                    break
            if ok:
                parity[w] = True
                iters[w] = it
                break
    return app, parity, iters


def warmup():
    """Trigger compilation of every kernel on tiny inputs."""
    r = np.zeros(4)
    columns = np.array([[0, 1], [2, 3]], dtype=np.int32)
    ratios = np.ones(2)
    screen_patterns(r, columns, ratios, 1.0)
    ex = np.zeros(4)
    vx = np.ones(4)
    rf = np.ones(4)
    use_ptr = np.array([0, 1, 2, 3, 4], dtype=np.int64)
    members = np.arange(4, dtype=np.int64)
    interference_stats(ex, vx, rf, rf, 1.0, use_ptr, members)
    activity_scores(ex, ex, rf, vx, 2)
    llrs = np.ones((1, 3))
    cn_ptr = np.array([0, 2, 4], dtype=np.int32)
    cn_edges = np.array([0, 1, 2, 3], dtype=np.int32)
    vn_ptr = np.array([0, 1, 3, 4], dtype=np.int32)
    vn_edges = np.array([0, 1, 2, 3], dtype=np.int32)
    edge_var = np.array([0, 1, 1, 2], dtype=np.int32)
    bp_decode_batch(llrs, cn_ptr, cn_edges, vn_ptr, vn_edges, edge_var, 2, 30.0)
