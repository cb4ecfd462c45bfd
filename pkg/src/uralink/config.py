"""Scenario parameters shared by every stage of the simulator.

A frame of ``n`` real channel uses is split into ``J`` chunks of ``n_p``
uses.  Each of the ``K_a`` active users sends ``B`` bits: ``B_J`` select a
chunk, ``B_p`` select a sparse pattern inside the chunk, and ``B_c`` are
protected by a rate ``B_c / n_c`` binary code whose ``n_c`` BPSK symbols sit
on the pattern's occupied positions.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field, fields

_ACTIVITY_PRIOR_MODES = ("posterior", "prior")
_PD_BLOCKLENGTH_MODES = ("frame", "chunk")


def _ceil_ratio(numer: float, denom: float) -> int:
    """Ceiling of ``numer / denom`` robust to float noise (1/3, 2/5, ...)."""
    return math.ceil(numer / denom - 1e-9)


@dataclass(frozen=True)
class SystemConfig:
    K_a: int                      # number of active users per frame
    B: int                        # payload bits per user
    n: int                        # real channel uses per frame
    J: int                        # chunks per frame (power of two)
    B_J: int                      # bits selecting the chunk, log2(J)
    B_p: int                      # bits selecting the sparse pattern
    B_c: int                      # coded payload bits
    n_p: int                      # channel uses per chunk, n / J
    n_c: int                      # code length, occupied positions per pattern
    code_rate: float              # B_c / n_c
    sigma2: float = 1.0           # noise variance per real channel use
    target_pupe: float = 0.05     # per-user error target for planning
    inner_iters: int = 8          # detector/decoder exchange rounds per chunk
    outer_iters: int = 10         # interference cancellation rounds per frame
    bp_iters: int = 30            # belief propagation iterations per exchange
    candidate_cap: int = 0        # patterns kept after screening (0 = auto)
    drop_threshold: float = -50.0 # activity LLR below which a candidate dies
    master_seed: int = 0          # root seed for all derived randomness
    pd_enabled: bool = False      # scale user powers by the planned ratios
    activity_prior_mode: str = "posterior"  # LLR prior in the activity score
    pd_blocklength: str = "frame"           # blocklength fed to the planner

    def __post_init__(self):
        if self.candidate_cap == 0:
            object.__setattr__(self, "candidate_cap",
                               default_candidate_cap(self.K_a, self.J, self.B_p))

    @property
    def users_per_chunk(self) -> float:
        """Mean number of users landing in one chunk, K_a / J."""
        return self.K_a / self.J

    @property
    def num_patterns(self) -> int:
        return 1 << self.B_p


def default_candidate_cap(K_a: int, J: int, B_p: int) -> int:
    """Keep four times the mean per-chunk load, within legal bounds."""
    lo = max(1, -(-K_a // J))
    hi = 1 << B_p
    return min(hi, max(lo, 4 * lo))


def validate(config: SystemConfig) -> list[str]:
    """Return a list of constraint violations (empty when consistent)."""
    c = config
    problems: list[str] = []
    for name in ("K_a", "B", "n", "J", "B_p", "B_c", "n_p", "n_c",
                 "inner_iters", "outer_iters", "bp_iters", "candidate_cap"):
        if getattr(c, name) <= 0:
            problems.append(f"{name} must be positive, got {getattr(c, name)}")
    if c.B_J < 0:
        problems.append(f"B_J must be non-negative, got {c.B_J}")
    if c.J != 1 << max(c.B_J, 0):
        problems.append(f"J={c.J} must equal 2**B_J={1 << max(c.B_J, 0)}")
    if c.B != c.B_J + c.B_p + c.B_c:
        problems.append(f"B={c.B} must equal B_J+B_p+B_c={c.B_J + c.B_p + c.B_c}")
    if c.n != c.n_p * c.J:
        problems.append(f"n={c.n} must equal n_p*J={c.n_p * c.J}")
    if not (0.0 < c.code_rate <= 1.0):
        problems.append(f"code_rate must lie in (0, 1], got {c.code_rate}")
    elif c.n_c != _ceil_ratio(c.B_c, c.code_rate):
        problems.append(f"n_c={c.n_c} must equal ceil(B_c/code_rate)="
                        f"{_ceil_ratio(c.B_c, c.code_rate)}")
    if c.n_c > c.n_p:
        problems.append(f"n_c={c.n_c} must not exceed n_p={c.n_p}")
    if c.n_c <= c.B_c:
        problems.append(f"n_c={c.n_c} must exceed B_c={c.B_c} (code needs parity)")
    min_cap = -(-c.K_a // c.J)
    if not (min_cap <= c.candidate_cap <= (1 << c.B_p)):
        problems.append(f"candidate_cap={c.candidate_cap} must lie in "
                        f"[ceil(K_a/J), 2**B_p] = [{min_cap}, {1 << c.B_p}]")
    if not (c.sigma2 > 0.0 and math.isfinite(c.sigma2)):
        problems.append(f"sigma2 must be finite and positive, got {c.sigma2}")
    if not math.isfinite(c.drop_threshold):
        problems.append(f"drop_threshold must be finite, got {c.drop_threshold}")
    if not (0.0 < c.target_pupe < 1.0):
        problems.append(f"target_pupe must lie in (0, 1), got {c.target_pupe}")
    if not (0 <= c.master_seed < 1 << 64):
        problems.append(f"master_seed must fit in uint64, got {c.master_seed}")
    if c.activity_prior_mode not in _ACTIVITY_PRIOR_MODES:
        problems.append(f"activity_prior_mode must be one of "
                        f"{_ACTIVITY_PRIOR_MODES}, got {c.activity_prior_mode!r}")
    if c.pd_blocklength not in _PD_BLOCKLENGTH_MODES:
        problems.append(f"pd_blocklength must be one of "
                        f"{_PD_BLOCKLENGTH_MODES}, got {c.pd_blocklength!r}")
    return problems


def require_valid(config: SystemConfig) -> SystemConfig:
    problems = validate(config)
    if problems:
        raise ValueError("invalid configuration:\n  " + "\n  ".join(problems))
    return config


def eb_n0_to_sigma2(eb_n0_db: float, config: SystemConfig) -> float:
    """Noise variance that realizes the requested Eb/N0.

    Each user spends n_c unit-power real symbols on B bits, so
    Eb/N0 = n_c / (2 B sigma^2) and sigma^2 = n_c / (2 B Eb/N0).
    """
    if not math.isfinite(eb_n0_db):
        raise ValueError(f"eb_n0_db must be finite, got {eb_n0_db}")
    eb_n0 = 10.0 ** (eb_n0_db / 10.0)
    return config.n_c / (2.0 * config.B * eb_n0)


def sigma2_to_eb_n0(sigma2: float, config: SystemConfig) -> float:
    """Inverse of :func:`eb_n0_to_sigma2`, in dB."""
    if not (sigma2 > 0.0 and math.isfinite(sigma2)):
        raise ValueError(f"sigma2 must be finite and positive, got {sigma2}")
    return 10.0 * math.log10(config.n_c / (2.0 * config.B * sigma2))


# ---------------------------------------------------------------------------
# JSON round trip (strict, flat)
# ---------------------------------------------------------------------------

def config_from_dict(data: dict) -> SystemConfig:
    if not isinstance(data, dict):
        raise ValueError(f"config document must be a flat object, got {type(data).__name__}")
    known = {f.name: f for f in fields(SystemConfig)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        kwargs[name] = _coerce(name, known[name].type, value)
    try:
        cfg = SystemConfig(**kwargs)
    except TypeError as exc:
        raise ValueError(f"incomplete config: {exc}") from None
    return require_valid(cfg)


def _coerce(name: str, type_name: str, value):
    if type_name == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"config key {name} must be an integer, got {value!r}")
        return value
    if type_name == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"config key {name} must be a number, got {value!r}")
        return float(value)
    if type_name == "bool":
        if not isinstance(value, bool):
            raise ValueError(f"config key {name} must be a boolean, got {value!r}")
        return value
    if type_name == "str":
        if not isinstance(value, str):
            raise ValueError(f"config key {name} must be a string, got {value!r}")
        return value
    raise AssertionError(f"unhandled field type {type_name}")


def load_config(path: str) -> SystemConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON: {exc}") from None
    return config_from_dict(data)


def config_to_dict(config: SystemConfig) -> dict:
    return dataclasses.asdict(config)


def save_config(config: SystemConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(config_to_dict(config), fh, indent=2)
        fh.write("\n")


def apply_overrides(config: SystemConfig, overrides: list[str]) -> SystemConfig:
    """Apply ``key=value`` strings (CLI ``--set``) on top of a config."""
    known = {f.name: f for f in fields(SystemConfig)}
    updates = {}
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key = key.strip()
        if key not in known:
            raise ValueError(f"unknown config key in override: {key}")
        updates[key] = _parse_override(key, known[key].type, raw.strip())
    cfg = dataclasses.replace(config, **updates)
    return require_valid(cfg)


def _parse_override(name: str, type_name: str, raw: str):
    try:
        if type_name == "int":
            return int(raw, 0)
        if type_name == "float":
            return float(raw)
        if type_name == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return raw
    except ValueError:
        raise ValueError(f"cannot parse override {name}={raw!r} as {type_name}") from None


# ---------------------------------------------------------------------------
# Built-in profiles
# ---------------------------------------------------------------------------

def _make(**kw) -> SystemConfig:
    return require_valid(SystemConfig(**kw))


def _profiles() -> dict[str, SystemConfig]:
    return {
        # Reference operating point: 300 users, 30000 uses, 16 chunks of 1875
        # uses, 8192 patterns of 132 positions, rate-1/3 code on 44 bits.
        # The cap sits near the per-chunk load: a much larger candidate set
        # models far more interference than is actually on the air, which
        # shrinks every detector LLR and stops the decoder from ever firing.
        "reference-61": _make(
            K_a=300, B=61, n=30000, J=16, B_J=4, B_p=13, B_c=44,
            n_p=1875, n_c=132, code_rate=1.0 / 3.0,
            target_pupe=0.05, candidate_cap=24),
        # Same frame with the headline 100-bit payload: the extra bits go to
        # the coded part (B_c=83, n_c=249 at rate 1/3).
        "reference-100": _make(
            K_a=300, B=100, n=30000, J=16, B_J=4, B_p=13, B_c=83,
            n_p=1875, n_c=249, code_rate=1.0 / 3.0,
            target_pupe=0.05, candidate_cap=24),
        # Small single-user sanity scenario.
        "toy-single": _make(
            K_a=1, B=23, n=256, J=2, B_J=1, B_p=6, B_c=16,
            n_p=128, n_c=48, code_rate=1.0 / 3.0,
            target_pupe=0.05, candidate_cap=4),
        # Small multi-user regression scenario.
        "toy-multi": _make(
            K_a=16, B=27, n=2048, J=4, B_J=2, B_p=9, B_c=16,
            n_p=512, n_c=48, code_rate=1.0 / 3.0,
            target_pupe=0.05, candidate_cap=24),
        # Dense single-chunk scenario where power shaping matters.  The cap
        # matches the per-chunk load so the candidate set's modelled
        # interference stays close to the transmitted population.
        "toy-dense": _make(
            K_a=64, B=29, n=512, J=1, B_J=0, B_p=13, B_c=16,
            n_p=512, n_c=48, code_rate=1.0 / 3.0,
            target_pupe=0.05, candidate_cap=64,
            inner_iters=6, outer_iters=16),
    }


def profile_names() -> list[str]:
    return sorted(_profiles())


def profile(name: str) -> SystemConfig:
    table = _profiles()
    if name not in table:
        raise ValueError(f"unknown profile {name!r}; available: {', '.join(sorted(table))}")
    return table[name]
