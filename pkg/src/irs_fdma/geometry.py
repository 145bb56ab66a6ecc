"""Cell layout, user dropping, path loss, shadowing and thermal noise."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, ScenarioError

BOLTZMANN = 1.380649e-23  # J/K

__all__ = [
    "BOLTZMANN",
    "Rect",
    "Scenario",
    "PathlossParams",
    "LargeScaleGains",
    "p0_db",
    "cost_hata_pathloss_db",
    "los_pathloss_linear",
    "large_scale_gain_linear",
    "noise_variance_watts",
    "drop_users",
    "compute_large_scale_gains",
]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle ``[x0, x1] x [y0, y1]`` in meters."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InvalidArgumentError(f"degenerate rectangle {self}")

    @property
    def centroid(self):
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains(self, points):
        p = np.atleast_2d(points)
        return (p[:, 0] >= self.x0) & (p[:, 0] <= self.x1) & (p[:, 1] >= self.y0) & (p[:, 1] <= self.y1)

    def overlaps(self, other):
        """True when the interiors intersect (shared edges are allowed)."""
        return self.x0 < other.x1 and other.x0 < self.x1 and self.y0 < other.y1 and other.y0 < self.y1


@dataclass(frozen=True)
class Scenario:
    bs_position: tuple = (0.0, 0.0)
    irs_position: tuple = (375.0, 375.0)
    center_area: Rect = field(default_factory=lambda: Rect(0.0, 0.0, 250.0, 250.0))
    edge_area: Rect = field(default_factory=lambda: Rect(250.0, 250.0, 500.0, 500.0))
    min_bs_distance: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "bs_position", tuple(float(c) for c in self.bs_position))
        object.__setattr__(self, "irs_position", tuple(float(c) for c in self.irs_position))
        if not np.allclose(self.irs_position, self.edge_area.centroid, rtol=0, atol=1e-9):
            raise InvalidArgumentError(
                f"IRS at {self.irs_position} is not the centroid {self.edge_area.centroid} of the edge area"
            )
        if self.center_area.overlaps(self.edge_area):
            raise InvalidArgumentError("center and edge areas overlap")
        if self.min_bs_distance < 0:
            raise InvalidArgumentError("min_bs_distance must be >= 0")

    @property
    def bs_irs_distance(self):
        return math.dist(self.bs_position, self.irs_position)


@dataclass(frozen=True)
class PathlossParams:
    """COST-Hata and BS-IRS line-of-sight parameters.

    ``p0_db`` of ``None`` (the default) means "derive the intercept from
    ``f0_mhz``, ``h_s_m`` and ``h_t_m``"; see :attr:`intercept_db`.
    ``los_form`` selects the BS-IRS law: ``"decay"`` is ``L0 * d**-alpha``;
    ``"as_printed"`` is ``L0 / d**-alpha`` (grows with distance, kept only to
    reproduce published curves).
    """

    p0_db: float = None
    d0_km: float = 0.01
    d1_km: float = 0.05
    shadow_sigma_db: float = 8.0
    l0_db: float = -30.0
    alpha: float = 2.0
    f0_mhz: float = 1900.0
    h_s_m: float = 15.0
    h_t_m: float = 1.65
    los_form: str = "decay"

    def __post_init__(self):
        if not 0 < self.d0_km < self.d1_km:
            raise InvalidArgumentError("need 0 < d0_km < d1_km")
        if self.alpha <= 0:
            raise InvalidArgumentError("alpha must be > 0")
        if self.shadow_sigma_db < 0:
            raise InvalidArgumentError("shadow_sigma_db must be >= 0")
        if self.los_form not in ("decay", "as_printed"):
            raise InvalidArgumentError(f"unknown los_form {self.los_form!r}")
        self.intercept_db  # validates the antenna parameters

    @property
    def intercept_db(self):
        if self.p0_db is not None:
            return float(self.p0_db)
        return p0_db(self.f0_mhz, self.h_s_m, self.h_t_m)


@dataclass(frozen=True)
class LargeScaleGains:
    """Linear power gains: per-user BS-UE and IRS-UE arrays, scalar BS-IRS."""

    sigma_f2: np.ndarray
    sigma_g2: np.ndarray
    sigma_h2: float

    def __post_init__(self):
        f = np.asarray(self.sigma_f2, dtype=float)
        g = np.asarray(self.sigma_g2, dtype=float)
        if f.shape != g.shape or f.ndim != 1:
            raise InvalidArgumentError("sigma_f2 and sigma_g2 must be 1-D arrays of equal length")
        vals = np.concatenate([f, g, [self.sigma_h2]])
        if not (np.all(np.isfinite(vals)) and np.all(vals > 0)):
            raise InvalidArgumentError("large-scale gains must be strictly positive and finite")
        object.__setattr__(self, "sigma_f2", f)
        object.__setattr__(self, "sigma_g2", g)
        object.__setattr__(self, "sigma_h2", float(self.sigma_h2))

    @property
    def n_users(self):
        return self.sigma_f2.shape[0]


def p0_db(f0_mhz, h_s_m, h_t_m):
    """COST-Hata intercept in dB, carrier in MHz and antenna heights in meters."""
    if min(f0_mhz, h_s_m, h_t_m) <= 0:
        raise InvalidArgumentError("frequency and antenna heights must be positive")
    lf = math.log10(f0_mhz)
    return (
        46.3
        + 33.9 * lf
        - 13.82 * math.log10(h_s_m)
        - (1.1 * lf - 0.7) * h_t_m
        + 1.56 * lf
        - 0.8
    )


def cost_hata_pathloss_db(d_km, params):
    """Three-slope COST-Hata path loss (negative dB) at distance ``d_km``.

    Accepts a scalar or an array of distances.
    """
    d = np.asarray(d_km, dtype=float)
    if np.any(~(d > 0)):
        raise InvalidArgumentError("distance must be > 0")
    p0 = params.intercept_db
    lg_d1 = math.log10(params.d1_km)
    far = -p0 - 35.0 * np.log10(d)
    mid = -p0 - 15.0 * lg_d1 - 20.0 * np.log10(d)
    near = -p0 - 15.0 * lg_d1 - 20.0 * math.log10(params.d0_km)
    out = np.where(d > params.d1_km, far, np.where(d > params.d0_km, mid, near))
    return float(out) if out.ndim == 0 else out


def los_pathloss_linear(d_m, l0_db, alpha, form="decay"):
    """Line-of-sight power gain with a 1 m reference distance."""
    d = float(d_m)
    if d < 1.0:
        raise InvalidArgumentError(f"LOS distance must be >= 1 m, got {d}")
    l0 = 10.0 ** (l0_db / 10.0)
    if form == "as_printed":
        return l0 / d ** (-alpha)
    return l0 * d ** (-alpha)


def large_scale_gain_linear(pathloss_db, shadow_db):
    return 10.0 ** ((np.asarray(pathloss_db) + np.asarray(shadow_db)) / 10.0)


def noise_variance_watts(bw_hz, t0_kelvin, nf_db):
    """Thermal noise power ``k * B * T0 * NF`` in watts."""
    if bw_hz <= 0 or t0_kelvin <= 0:
        raise InvalidArgumentError("bandwidth and temperature must be positive")
    return BOLTZMANN * bw_hz * t0_kelvin * 10.0 ** (nf_db / 10.0)


def _uniform_in(rect, n, rng, accept, max_attempts):
    out = np.empty((n, 2))
    filled = 0
    for _ in range(max_attempts):
        if filled == n:
            break
        batch = np.column_stack(
            [
                rng.generator.uniform(rect.x0, rect.x1, size=n - filled),
                rng.generator.uniform(rect.y0, rect.y1, size=n - filled),
            ]
        )
        ok = batch[accept(batch)]
        out[filled : filled + len(ok)] = ok
        filled += len(ok)
    if filled < n:
        raise ScenarioError(f"could not place {n} users in {rect} after {max_attempts} attempts")
    return out


def drop_users(scenario, k, rng, max_attempts=1000):
    """Place ``k`` users: ceil(k/2) far users in the edge area, then floor(k/2)
    near users in the center area.

    Returns a ``(k, 2)`` array; far users occupy the leading rows.
    """
    k = int(k)
    if k < 1:
        raise InvalidArgumentError("need at least one user")
    bs = np.asarray(scenario.bs_position)
    irs = np.asarray(scenario.irs_position)

    def accept(p):
        return (np.hypot(*(p - bs).T) >= scenario.min_bs_distance) & (np.hypot(*(p - irs).T) >= 1.0)

    n_far = (k + 1) // 2
    far = _uniform_in(scenario.edge_area, n_far, rng, accept, max_attempts)
    near = _uniform_in(scenario.center_area, k - n_far, rng, accept, max_attempts)
    return np.vstack([far, near])


def compute_large_scale_gains(scenario, positions, params, rng=None):
    """Large-scale gains for users at ``positions``.

    COST-Hata plus log-normal shadowing (drawn from ``rng``, one independent
    draw per link) for the BS-UE and IRS-UE links; deterministic LOS law for
    BS-IRS. ``rng=None`` disables shadowing.
    """
    p = np.atleast_2d(np.asarray(positions, dtype=float))
    d_bs = np.hypot(*(p - np.asarray(scenario.bs_position)).T) / 1000.0
    d_irs = np.hypot(*(p - np.asarray(scenario.irs_position)).T) / 1000.0
    k = p.shape[0]
    if rng is None or params.shadow_sigma_db == 0:
        s_f = s_g = np.zeros(k)
    else:
        s = rng.generator.normal(0.0, params.shadow_sigma_db, size=(2, k))
        s_f, s_g = s[0], s[1]
    return LargeScaleGains(
        sigma_f2=large_scale_gain_linear(cost_hata_pathloss_db(d_bs, params), s_f),
        sigma_g2=large_scale_gain_linear(cost_hata_pathloss_db(d_irs, params), s_g),
        sigma_h2=los_pathloss_linear(scenario.bs_irs_distance, params.l0_db, params.alpha, params.los_form),
    )
