"""Pure-numpy implementations of the hot kernels.

Fallback path used when numba is unavailable or disabled via
``URALINK_NO_NUMBA=1``.  Each function mirrors the semantics of its numba
twin in ``numba_impl``; accumulation orders are kept compatible where exact
floating-point behaviour is contractual (leave-one-out interference sums).
"""

from __future__ import annotations

import numpy as np

_LN2 = float(np.log(2.0))
_ATANH_LIMIT = 1.0 - 1e-15


def screen_patterns(r: np.ndarray, columns: np.ndarray, ratios: np.ndarray,
                    var0: float) -> np.ndarray:
    """Activity score of every pattern against a raw chunk observation.

    Per occupied position, the score adds log cosh(p * r / var0) and pays the
    energy penalty p^2 / (2 var0); both follow from a symmetric two-point
    prior on the BPSK symbol under a Gaussian interference model with
    variance ``var0``.
    """
    n_c = columns.shape[1]
    z = (ratios[:, None] / var0) * r[columns]
    az = np.abs(z)
    logcosh = az + np.log1p(np.exp(-2.0 * az)) - _LN2
    return logcosh.sum(axis=1) - n_c * ratios * ratios / (2.0 * var0)


def interference_stats(ex: np.ndarray, vx: np.ndarray,
                       ratios_flat: np.ndarray, rsq_flat: np.ndarray,
                       sigma2: float, slot_use: np.ndarray,
                       pair_dst: np.ndarray, pair_src: np.ndarray,
                       num_uses: int):
    """Leave-one-out interference moments per candidate slot.

    ``ex``/``vx`` are flat (C*n_c,) symbol moments, ``slot_use`` maps each
    slot to its channel use, and (``pair_dst``, ``pair_src``) enumerate all
    ordered pairs of distinct slots sharing a use.  Returns per-slot
    interference mean/variance plus per-use totals.  A slot with no
    co-located slots gets mean exactly 0.0 and variance exactly ``sigma2``.
    """
    terms_e = ratios_flat * ex
    terms_v = rsq_flat * vx
    e_xi = np.zeros_like(ex)
    v_xi = np.zeros_like(vx)
    np.add.at(e_xi, pair_dst, terms_e[pair_src])
    np.add.at(v_xi, pair_dst, terms_v[pair_src])
    v_xi += sigma2
    er = np.zeros(num_uses)
    vr = np.zeros(num_uses)
    np.add.at(er, slot_use, terms_e)
    np.add.at(vr, slot_use, terms_v)
    vr += sigma2
    return e_xi, v_xi, er, vr


def activity_scores(lm: np.ndarray, lprior: np.ndarray, rsq_flat: np.ndarray,
                    v_xi: np.ndarray, n_c: int) -> np.ndarray:
    """Sum of per-use log likelihood ratios for 'candidate active vs absent'.

    With a = p*(r - E[xi])/Var[xi] = lm/2 and prior log odds ``lprior`` on
    the symbol, each use contributes
    logaddexp(lprior + a, -a) - logaddexp(lprior, 0) - p^2 / (2 Var[xi]).
    """
    a = 0.5 * lm
    contrib = (np.logaddexp(lprior + a, -a) - np.logaddexp(lprior, 0.0)
               - rsq_flat / (2.0 * v_xi))
    return contrib.reshape(-1, n_c).sum(axis=1)


def bp_decode_batch(llrs: np.ndarray, cn_pad: np.ndarray, cn_mask: np.ndarray,
                    cn_var_pad: np.ndarray, vn_pad: np.ndarray,
                    vn_mask: np.ndarray, edge_var: np.ndarray,
                    max_iter: int, clip: float):
    """Flooding sum-product decoder over a batch of codewords.

    ``cn_pad``/``vn_pad`` hold edge ids grouped per check / per variable,
    padded with -1.  Rows stop updating once their syndrome is zero; the
    returned a-posteriori LLRs are frozen at that iteration.
    """
    C, n = llrs.shape
    E = edge_var.shape[0]
    lam = np.clip(llrs, -clip, clip)
    app = lam.copy()
    mv = lam[:, edge_var]
    mc = np.zeros((C, E))
    alive = np.ones(C, dtype=bool)
    parity = np.zeros(C, dtype=bool)
    iters = np.full(C, max_iter, dtype=np.int32)
    cn_cols = np.where(cn_mask, cn_pad, 0)
    vn_cols = np.where(vn_mask, vn_pad, 0)
    syn_cols = np.where(cn_mask, cn_var_pad, 0)
    scatter_edges = cn_pad[cn_mask]
    for it in range(1, max_iter + 1):
        t = np.tanh(0.5 * mv)
        tp = np.where(cn_mask, t[:, cn_cols], 1.0)
        pre = np.cumprod(tp, axis=2)
        suf = np.cumprod(tp[:, :, ::-1], axis=2)[:, :, ::-1]
        ext = np.ones_like(tp)
        ext[:, :, 1:] *= pre[:, :, :-1]
        ext[:, :, :-1] *= suf[:, :, 1:]
        vals = 2.0 * np.arctanh(np.clip(ext, -_ATANH_LIMIT, _ATANH_LIMIT))
        np.clip(vals, -clip, clip, out=vals)
        mc_new = np.empty_like(mc)
        mc_new[:, scatter_edges] = vals[:, cn_mask]
        mc[alive] = mc_new[alive]
        sums = lam + np.where(vn_mask, mc[:, vn_cols], 0.0).sum(axis=2)
        app[alive] = sums[alive]
        mv_new = np.clip(sums[:, edge_var] - mc, -clip, clip)
        mv[alive] = mv_new[alive]
        hard = app < 0.0
        syn = np.where(cn_mask, hard[:, syn_cols], False).sum(axis=2) & 1
        ok = ~syn.any(axis=1)
        newly = alive & ok
        iters[newly] = it
        parity[newly] = True
        alive &= ~ok
        if not alive.any():
            break
    return app, parity, iters
