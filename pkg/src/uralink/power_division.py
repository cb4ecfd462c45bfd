"""Analytical power-division planner.

Models the receiver as staged single-user decoding that treats residual
interference as noise: with ``K0`` equal-power users at post-cancellation
SINR ``alpha_k``, stage ``k`` succeeds if any remaining user beats the
finite-blocklength random-coding threshold.  ``solve_gamma0`` inverts the
resulting per-user error for a target SINR, ``optimize_group_count`` picks
how many power groups minimize total energy, and ``build_power_plan`` turns
the choice into per-group powers whose SINRs are all equal by construction.

All stage probabilities are evaluated in log space (``scipy.special
.log_ndtr``) so deeply sub-unity error rates underflow gracefully instead of
losing precision in the tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .config import SystemConfig

_LN2 = math.log(2.0)
GAMMA_LO = 1e-6     # SINR bracket used by the solver
GAMMA_HI = 1e4
_SCAN_POINTS = 512  # fallback grid when the residual is not monotone


@dataclass(frozen=True)
class TinSicParams:
    gamma: float   # per-stage SINR shared by every group
    K0: int        # users decoded within one group
    n0: int        # blocklength available to them
    B0: int        # information bits per user

    @property
    def rate(self) -> float:
        return self.B0 / self.n0


@dataclass(frozen=True)
class GammaSolution:
    gamma: float     # SINR meeting the target (or bracket edge)
    epsilon: float   # per-user error at that SINR
    boundary: bool   # True when no crossing exists inside the bracket


@dataclass(frozen=True)
class GroupOption:
    m: int
    gamma0: float
    epsilon: float
    boundary: bool
    log_objective: float   # log of the required total-power proxy


@dataclass(frozen=True)
class GroupChoice:
    m: int
    gamma0: float
    objective: float
    options: list[GroupOption]


@dataclass(frozen=True)
class PowerPlan:
    m: int
    gamma0: float
    raw_powers: np.ndarray   # (m,) per-group powers, ascending
    ratios: np.ndarray       # (m,) amplitude ratios, mean square 1
    objective: float

    def to_json_dict(self) -> dict:
        return {
            "m": self.m,
            "gamma0": self.gamma0,
            "P": [float(p) for p in self.raw_powers],
            "p": [float(r) for r in self.ratios],
            "objective": self.objective,
        }


def tin_sic_pupe(params: TinSicParams) -> float:
    """Per-user error probability of staged decoding under the TIN model."""
    return _stage_error(params.gamma, params.K0, params.n0, params.B0)


def _stage_error(gamma: float, K0: int, n0: int, B0: int) -> float:
    if K0 < 1 or n0 < 1 or B0 < 1:
        raise ValueError(f"need K0, n0, B0 >= 1, got {K0}, {n0}, {B0}")
    if not (gamma >= 0.0 and math.isfinite(gamma)):
        raise ValueError(f"gamma must be finite and >= 0, got {gamma}")
    rate = B0 / n0
    k = np.arange(1, K0 + 1)
    remaining = (K0 - k + 1).astype(np.float64)
    alpha = gamma / (1.0 + (K0 - k) * gamma)
    cap = 0.5 * np.log2(1.0 + alpha)
    disp = 0.5 * alpha * (alpha + 2.0) / (alpha + 1.0) ** 2 * _LN2 * _LN2
    # Vanishing dispersion makes the Q argument 0/0; take the continuous
    # limit instead: failure certain below capacity, a coin flip on it,
    # impossible above it.
    degenerate = disp < 1e-300
    safe_disp = np.where(degenerate, 1.0, disp)
    x = (cap - rate) / np.sqrt(safe_disp / n0)
    log_q = log_ndtr(-x)          # log Q(x), exact in the deep tail
    if np.any(degenerate):
        limit = np.where(cap < rate, 0.0,
                         np.where(cap > rate, -np.inf, math.log(0.5)))
        log_q = np.where(degenerate, limit, log_q)
    stage_fail = np.exp(remaining * log_q)
    survive = np.empty(K0)
    survive[0] = 1.0
    if K0 > 1:
        np.cumprod(1.0 - stage_fail[:-1], out=survive[1:])
    eps = float(np.sum(remaining / K0 * stage_fail * survive))
    return min(max(eps, 0.0), 1.0)


def solve_gamma0(K0: int, n0: int, B0: int, epsilon_t: float,
                 lo: float = GAMMA_LO, hi: float = GAMMA_HI) -> GammaSolution:
    """Smallest SINR in [lo, hi] whose per-user error meets ``epsilon_t``.

    The error is non-increasing in gamma; that is verified on a coarse grid
    and a dense scan takes over if it ever fails.  Without a crossing the
    nearer bracket edge is returned with ``boundary=True``.
    """
    if not (0.0 < epsilon_t < 1.0):
        raise ValueError(f"epsilon_t must lie in (0, 1), got {epsilon_t}")

    def f(g: float) -> float:
        return _stage_error(g, K0, n0, B0)

    eps_lo, eps_hi = f(lo), f(hi)
    if eps_lo <= epsilon_t:
        return GammaSolution(lo, eps_lo, True)
    if eps_hi > epsilon_t:
        return GammaSolution(hi, eps_hi, True)
    coarse = np.geomspace(lo, hi, 65)
    vals = np.array([f(g) for g in coarse])
    if np.any(np.diff(vals) > 1e-12):
        grid = np.geomspace(lo, hi, _SCAN_POINTS)
        gvals = np.array([f(g) for g in grid])
        below = np.nonzero(gvals <= epsilon_t)[0]
        first = below[0]
        if first == 0:
            return GammaSolution(float(grid[0]), float(gvals[0]), False)
        a, b = grid[first - 1], grid[first]
    else:
        a, b = lo, hi
    la, lb = math.log(a), math.log(b)
    for _ in range(200):
        lm = 0.5 * (la + lb)
        if f(math.exp(lm)) <= epsilon_t:
            lb = lm
        else:
            la = lm
    gamma = math.exp(lb)
    return GammaSolution(gamma, f(gamma), False)


def optimize_group_count(K_users: float, n0: int, B0: int, epsilon_t: float,
                         m_max: int = 16) -> GroupChoice:
    """Group count minimizing the total-power proxy (1 + (K/m) gamma0)^m.

    Group counts whose SINR target cannot be met inside the solver bracket
    are excluded; ties prefer fewer groups.
    """
    options: list[GroupOption] = []
    best: GroupOption | None = None
    for m in range(1, m_max + 1):
        K0 = max(1, math.ceil(K_users / m - 1e-9))
        sol = solve_gamma0(K0, n0, B0, epsilon_t)
        log_obj = (math.inf if sol.boundary
                   else m * math.log1p((K_users / m) * sol.gamma))
        opt = GroupOption(m=m, gamma0=sol.gamma, epsilon=sol.epsilon,
                          boundary=sol.boundary, log_objective=log_obj)
        options.append(opt)
        if not sol.boundary and (best is None
                                 or log_obj < best.log_objective):
            best = opt
    if best is None:
        raise RuntimeError(
            f"target per-user error {epsilon_t} is unreachable for every "
            f"group count in 1..{m_max}")
    return GroupChoice(m=best.m, gamma0=best.gamma0,
                       objective=math.exp(best.log_objective),
                       options=options)


def build_power_plan(m: int, gamma0: float, K_users: float,
                     sigma2: float) -> PowerPlan:
    """Per-group powers with equal post-cancellation SINR ``gamma0``.

    Groups are decoded strongest first; group j (ascending power) is decoded
    while groups 1..j-1 are still on air, so its noise floor is sigma2 plus
    the expected interference (K/m users per group) of the weaker groups.
    """
    if m < 1:
        raise ValueError(f"group count must be >= 1, got {m}")
    if not (gamma0 > 0.0 and math.isfinite(gamma0)):
        raise ValueError(f"gamma0 must be finite and positive, got {gamma0}")
    if not (sigma2 > 0.0 and math.isfinite(sigma2)):
        raise ValueError(f"sigma2 must be finite and positive, got {sigma2}")
    per_group = K_users / m
    powers = np.empty(m)
    floor = sigma2
    for j in range(m):
        powers[j] = gamma0 * floor
        floor += per_group * powers[j]
    total = float(np.sum(powers))
    ratios = np.sqrt(m * powers / total)
    return PowerPlan(m=m, gamma0=gamma0, raw_powers=powers, ratios=ratios,
                     objective=math.exp(m * math.log1p(per_group * gamma0)))


def plan_for_config(config: SystemConfig, m_max: int = 16) -> PowerPlan:
    """End-to-end plan for a system config (group count, powers, ratios)."""
    if config.pd_blocklength == "frame":
        n0, users = config.n, float(config.K_a)
    else:
        n0, users = config.n_p, config.users_per_chunk
    choice = optimize_group_count(users, n0, config.B, config.target_pupe,
                                  m_max=m_max)
    plan = build_power_plan(choice.m, choice.gamma0, users, config.sigma2)
    return PowerPlan(m=plan.m, gamma0=plan.gamma0,
                     raw_powers=plan.raw_powers, ratios=plan.ratios,
                     objective=choice.objective)
