"""Sum spectral efficiency of the evaluated multiple-access schemes and the
FDMA user-scheduling strategies.

All rates are in bits/s/Hz. User indices are 0-based.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .beamforming import AoOptions, alternating_optimize, effective_channel, random_reflection
from .errors import ConfigError, DegenerateChannelError, InvalidArgumentError

__all__ = [
    "SchemeId",
    "RateResult",
    "NomaConfig",
    "fdma_user_rate",
    "effective_gains",
    "fdma_sum_rate",
    "fdma_noirs_sum_rate",
    "tdma_noirs_sum_rate",
    "tdma_irs_sum_rate",
    "noma_sum_rate",
    "noma_power_coefficients",
    "schedule_exhaustive",
    "schedule_nearest",
    "schedule_farthest",
    "schedule_random",
    "DropEvaluator",
]


class SchemeId(str, enum.Enum):
    TDMA = "TDMA"
    NOMA = "NOMA"
    FDMA = "FDMA"
    TDMA_IRS = "TDMA-IRS"
    FDMA_RP = "FDMA-RP"
    FDMA_NEAR = "FDMA-Near"
    FDMA_FAR = "FDMA-Far"
    FDMA_EUS = "FDMA-EUS"
    FDMA_RU = "FDMA-RU"

    @classmethod
    def parse(cls, name):
        """Accept the display label or the member name, case-insensitively."""
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("_", "-")
        for member in cls:
            if member.value.upper() == key:
                return member
        raise ConfigError(f"unknown scheme {name!r}; expected one of {[m.value for m in cls]}")

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class RateResult:
    scheme: SchemeId
    per_user_rates: np.ndarray
    selected_user: int = None
    sum_rate: float = field(init=False)

    def __post_init__(self):
        r = np.asarray(self.per_user_rates, dtype=float)
        if np.any(r < 0):
            raise InvalidArgumentError("rates must be >= 0")
        r.setflags(write=False)
        object.__setattr__(self, "per_user_rates", r)
        object.__setattr__(self, "sum_rate", float(np.sum(r)))


@dataclass(frozen=True)
class NomaConfig:
    """Power split for NOMA. ``"auto"`` allocates ``alpha_k ∝ 1/||f_k||^2``
    normalised to sum to one; an explicit list is indexed by user."""

    power_coefficients: object = "auto"

    def __post_init__(self):
        pc = self.power_coefficients
        if isinstance(pc, str):
            if pc != "auto":
                raise ConfigError(f"power_coefficients must be 'auto' or a list, got {pc!r}")
            return
        a = tuple(float(x) for x in pc)
        if any(x < 0 for x in a) or sum(a) > 1.0 + 1e-12:
            raise ConfigError("NOMA power coefficients must be >= 0 with sum <= 1")
        object.__setattr__(self, "power_coefficients", a)


def fdma_user_rate(effective_gain, pd_watts, sigma_n2_watts, k_users):
    """``(1/K) log2(1 + P_d * gain / sigma_n^2)``; power and noise both scale
    by 1/K per subchannel, so only the bandwidth share remains."""
    if k_users < 1:
        raise InvalidArgumentError("k_users must be >= 1")
    return np.log2(1.0 + pd_watts * np.asarray(effective_gain) / sigma_n2_watts) / k_users


def _row_power(c):
    return np.sum(c.real**2 + c.imag**2, axis=-1)


def effective_gains(channels, theta):
    """``||g_k^T Θ H + f_k^T||^2`` for every user, i.e. the MRT gain per subchannel."""
    if theta.n_elements != channels.n_elements:
        raise InvalidArgumentError("reflection state does not match the surface size")
    c = (channels.G * theta.coefficients) @ channels.H + channels.F
    return _row_power(c)


def _require_direct_links(channels):
    if np.any(np.linalg.norm(channels.F, axis=1) == 0):
        raise DegenerateChannelError("a user has an all-zero direct channel")


def fdma_sum_rate(channels, theta, pd, sigma_n2, k_hat=None, scheme=SchemeId.FDMA_EUS):
    """FDMA sum rate with one common reflection ``theta`` for all subchannels.

    Every user applies MRT to its own effective channel under ``theta``,
    which also covers the jointly optimised user ``k_hat``.
    """
    gains = effective_gains(channels, theta)
    if np.any(gains == 0):
        raise DegenerateChannelError("an effective channel vanished")
    rates = fdma_user_rate(gains, pd, sigma_n2, channels.n_users)
    return RateResult(scheme=scheme, per_user_rates=rates, selected_user=k_hat)


def fdma_noirs_sum_rate(channels, pd, sigma_n2):
    _require_direct_links(channels)
    g = _row_power(channels.F)
    return RateResult(SchemeId.FDMA, fdma_user_rate(g, pd, sigma_n2, channels.n_users))


def tdma_noirs_sum_rate(channels, pd, sigma_n2):
    """Each user owns a 1/K time share at full power and bandwidth."""
    _require_direct_links(channels)
    k = channels.n_users
    rates = [np.log2(1.0 + pd * _row_power(f) / sigma_n2) / k for f in channels.F]
    return RateResult(SchemeId.TDMA, np.array(rates))


def _ao_results(channels, ao_opts, cache=None):
    cache = {} if cache is None else cache
    for k in range(channels.n_users):
        if k not in cache:
            cache[k] = alternating_optimize(channels.G[k], channels.H, channels.F[k], ao_opts)
    return cache


def tdma_irs_sum_rate(channels, pd, sigma_n2, ao_opts=None, _cache=None):
    """TDMA with the surface re-optimised for the user of each slot."""
    _require_direct_links(channels)
    k = channels.n_users
    ao = _ao_results(channels, ao_opts, _cache)
    rates = []
    for u in range(k):
        c = effective_channel(channels.G[u], ao[u].theta, channels.H, channels.F[u])
        rates.append(np.log2(1.0 + pd * _row_power(c) / sigma_n2) / k)
    return RateResult(SchemeId.TDMA_IRS, np.array(rates))


def noma_power_coefficients(channels, cfg):
    if cfg.power_coefficients == "auto":
        inv = 1.0 / np.sum(np.abs(channels.F) ** 2, axis=1)
        return inv / inv.sum()
    a = np.asarray(cfg.power_coefficients, dtype=float)
    if a.shape != (channels.n_users,):
        raise ConfigError(f"{a.size} NOMA coefficients for {channels.n_users} users")
    return a


def noma_sum_rate(channels, pd, sigma_n2, cfg=None):
    """Downlink power-domain NOMA over the full band, no IRS.

    Users are decoded weakest first (ascending ``||f_k||^2``). With ideal SIC
    user ``k`` removes every weaker user's signal and treats the stronger
    users' superimposed beams as interference.
    """
    _require_direct_links(channels)
    cfg = cfg or NomaConfig()
    F = channels.F
    alpha = noma_power_coefficients(channels, cfg)
    W = F.conj() / np.linalg.norm(F, axis=1, keepdims=True)  # row j is w_j
    cross = np.abs(F @ W.T) ** 2  # cross[k, j] = |f_k^T w_j|^2
    order = np.argsort(np.sum(np.abs(F) ** 2, axis=1), kind="stable")
    rates = np.zeros(channels.n_users)
    for pos, k in enumerate(order):
        stronger = order[pos + 1 :]
        interference = pd * np.sum(alpha[stronger] * cross[k, stronger])
        sinr = alpha[k] * pd * cross[k, k] / (sigma_n2 + interference)
        rates[k] = np.log2(1.0 + sinr)
    return RateResult(SchemeId.NOMA, rates)


def schedule_exhaustive(channels, pd, sigma_n2, ao_opts=None, _cache=None):
    """Optimise the surface for each user in turn and keep the user whose
    reflection maximises the FDMA sum rate (lowest index on ties)."""
    ao = _ao_results(channels, ao_opts, _cache)
    best_k, best = None, None
    for k in range(channels.n_users):
        res = fdma_sum_rate(channels, ao[k].theta, pd, sigma_n2, k_hat=k, scheme=SchemeId.FDMA_EUS)
        if best is None or res.sum_rate > best.sum_rate:
            best_k, best = k, res
    return best_k, best


def schedule_nearest(gains):
    """User with the largest ``E||g_k||^2 = N sigma_g2(k)``; lowest index on ties.

    Uses large-scale statistics only, never the fading realisation.
    """
    return int(np.argmax(gains.sigma_g2))


def schedule_farthest(gains):
    return int(np.argmin(gains.sigma_g2))


def schedule_random(k_users, rng):
    if int(k_users) < 1:
        raise InvalidArgumentError("k_users must be >= 1")
    return int(rng.generator.integers(0, int(k_users)))


class DropEvaluator:
    """Evaluate schemes on one :class:`ChannelSet`, sharing per-user
    alternating-optimisation results between EUS, Near, Far, RU and TDMA-IRS.

    ``rng`` supplies the random phases (substream 0) and the random user
    (substream 1); both are drawn only if the corresponding scheme is asked for.
    """

    def __init__(self, channels, pd, sigma_n2, ao_opts=None, noma=None, rng=None):
        self.channels = channels
        self.pd = pd
        self.sigma_n2 = sigma_n2
        self.ao_opts = ao_opts or AoOptions()
        self.noma = noma or NomaConfig()
        self.rng = rng
        self._ao = {}

    def _scheduled(self, k, scheme):
        ch = self.channels
        if k not in self._ao:
            self._ao[k] = alternating_optimize(ch.G[k], ch.H, ch.F[k], self.ao_opts)
        return fdma_sum_rate(ch, self._ao[k].theta, self.pd, self.sigma_n2, k_hat=k, scheme=scheme)

    def evaluate(self, scheme):
        scheme = SchemeId.parse(scheme)
        ch, pd, s2 = self.channels, self.pd, self.sigma_n2
        if scheme is SchemeId.TDMA:
            return tdma_noirs_sum_rate(ch, pd, s2)
        if scheme is SchemeId.FDMA:
            return fdma_noirs_sum_rate(ch, pd, s2)
        if scheme is SchemeId.NOMA:
            return noma_sum_rate(ch, pd, s2, self.noma)
        if scheme is SchemeId.TDMA_IRS:
            return tdma_irs_sum_rate(ch, pd, s2, self.ao_opts, self._ao)
        if scheme is SchemeId.FDMA_EUS:
            return schedule_exhaustive(ch, pd, s2, self.ao_opts, self._ao)[1]
        if scheme is SchemeId.FDMA_NEAR:
            return self._scheduled(schedule_nearest(ch.gains), scheme)
        if scheme is SchemeId.FDMA_FAR:
            return self._scheduled(schedule_farthest(ch.gains), scheme)
        if scheme is SchemeId.FDMA_RU:
            return self._scheduled(schedule_random(ch.n_users, self._need_rng().substream(1)), scheme)
        if scheme is SchemeId.FDMA_RP:
            theta = random_reflection(ch.n_elements, self._need_rng().substream(0))
            return fdma_sum_rate(ch, theta, pd, s2, scheme=SchemeId.FDMA_RP)
        raise InvalidArgumentError(f"unhandled scheme {scheme}")

    def _need_rng(self):
        if self.rng is None:
            raise InvalidArgumentError("random schemes need an rng")
        return self.rng

    def evaluate_all(self, schemes):
        return {SchemeId.parse(s): self.evaluate(s) for s in schemes}
