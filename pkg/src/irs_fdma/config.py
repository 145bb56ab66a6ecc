"""Simulation configuration and its YAML text form.

Every key is optional; anything omitted takes the baseline value of the
two-area IRS scenario (16 BS antennas, 200 elements, 20 W over 20 MHz at
1.9 GHz, Rician factor 5, 8 dB shadowing, 9 dB noise figure, 290 K).
Example::

    n_users: 20
    schemes: [FDMA, FDMA-EUS, FDMA-RU, FDMA-RP]
    pathloss:
      los_form: decay
    ao:
      max_iterations: 3
"""

import dataclasses
import hashlib
from dataclasses import dataclass, field

import yaml

from .beamforming import AoOptions
from .errors import ConfigError, SimulationError
from .geometry import PathlossParams, Rect, Scenario, noise_variance_watts
from .multiaccess import NomaConfig, SchemeId

__all__ = ["SystemConfig", "parse_config", "dump_config", "load_config", "ALL_SCHEMES"]

ALL_SCHEMES = tuple(SchemeId)


@dataclass(frozen=True)
class SystemConfig:
    n_antennas: int = 16
    n_elements: int = 200
    n_users: int = 2
    pd_watts: float = 20.0
    bw_hz: float = 20e6
    f0_mhz: float = 1900.0
    nf_db: float = 9.0
    t0_kelvin: float = 290.0
    rician_gamma: float = 5.0
    shadow_sigma_db: float = 8.0
    pathloss: PathlossParams = field(default_factory=PathlossParams)
    scenario: Scenario = field(default_factory=Scenario)
    ao: AoOptions = field(default_factory=AoOptions)
    noma: NomaConfig = field(default_factory=NomaConfig)
    schemes: tuple = ALL_SCHEMES
    n_drops: int = 1000
    seed: int = 1

    def __post_init__(self):
        for name in ("n_antennas", "n_elements", "n_users", "n_drops"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("pd_watts", "bw_hz", "f0_mhz", "t0_kelvin"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.rician_gamma < 0 or self.shadow_sigma_db < 0:
            raise ConfigError("rician_gamma and shadow_sigma_db must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        schemes = tuple(SchemeId.parse(s) for s in self.schemes)
        if not schemes:
            raise ConfigError("schemes must be non-empty")
        if len(set(schemes)) != len(schemes):
            raise ConfigError("schemes contains duplicates")
        object.__setattr__(self, "schemes", schemes)
        # the carrier and shadowing spread live at the top level; keep the
        # path-loss model in sync with them
        if (self.pathloss.f0_mhz, self.pathloss.shadow_sigma_db) != (self.f0_mhz, self.shadow_sigma_db):
            object.__setattr__(
                self,
                "pathloss",
                dataclasses.replace(self.pathloss, f0_mhz=self.f0_mhz, shadow_sigma_db=self.shadow_sigma_db),
            )

    @property
    def noise_variance(self):
        return noise_variance_watts(self.bw_hz, self.t0_kelvin, self.nf_db)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def digest(self):
        """Short SHA-256 of the canonical YAML form."""
        return hashlib.sha256(dump_config(self).encode()).hexdigest()[:16]


# key -> converter, per section
_TOP = {
    "n_antennas": int,
    "n_elements": int,
    "n_users": int,
    "pd_watts": float,
    "bw_hz": float,
    "f0_mhz": float,
    "nf_db": float,
    "t0_kelvin": float,
    "rician_gamma": float,
    "shadow_sigma_db": float,
    "n_drops": int,
    "seed": int,
    "schemes": lambda v: tuple(SchemeId.parse(s) for s in _as_list(v)),
}


def _pair(v):
    v = _as_list(v)
    if len(v) != 2:
        raise ValueError("expected [x, y]")
    return tuple(float(c) for c in v)


def _rect(v):
    v = _as_list(v)
    if len(v) != 4:
        raise ValueError("expected [x0, y0, x1, y1]")
    return Rect(*(float(c) for c in v))


def _optional_float(v):
    return None if v is None else float(v)


_SECTIONS = {
    "scenario": {
        "bs_position": _pair,
        "irs_position": _pair,
        "center_area": _rect,
        "edge_area": _rect,
        "min_bs_distance": float,
    },
    "pathloss": {
        "p0_db": _optional_float,
        "d0_km": float,
        "d1_km": float,
        "l0_db": float,
        "alpha": float,
        "h_s_m": float,
        "h_t_m": float,
        "los_form": str,
    },
    "ao": {"max_iterations": int, "relative_tolerance": float},
    "noma": {"power_coefficients": lambda v: v if isinstance(v, str) else tuple(float(x) for x in _as_list(v))},
}


def _as_list(v):
    if isinstance(v, str):
        return [s for s in (p.strip() for p in v.split(",")) if s]
    if not isinstance(v, (list, tuple)):
        raise ValueError(f"expected a list, got {v!r}")
    return list(v)


def _line(node):
    return node.start_mark.line + 1


def _mapping_items(node, where):
    if isinstance(node, yaml.ScalarNode) and node.tag == "tag:yaml.org,2002:null":
        return []
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{where} must be a mapping", _line(node))
    out = []
    seen = set()
    for k, v in node.value:
        key = k.value
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", _line(k))
        seen.add(key)
        out.append((key, k, v))
    return out


def _convert(conv, value_node, key, line):
    try:
        return conv(yaml.safe_load(yaml.serialize(value_node)))
    except (ValueError, TypeError, SimulationError) as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}", line) from None


def parse_config(text):
    """Parse YAML ``text`` into a :class:`SystemConfig`.

    Unknown keys, malformed values and out-of-range settings raise
    :class:`ConfigError` carrying the offending line number.
    """
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {getattr(exc, 'problem', exc)}", mark.line + 1 if mark else None) from None
    top, sections = {}, {name: {} for name in _SECTIONS}
    if root is not None:
        for key, knode, vnode in _mapping_items(root, "configuration"):
            if key in _TOP:
                top[key] = _convert(_TOP[key], vnode, key, _line(knode))
            elif key in _SECTIONS:
                schema = _SECTIONS[key]
                for sub, sknode, svnode in _mapping_items(vnode, key):
                    if sub not in schema:
                        raise ConfigError(f"unknown key {key}.{sub!r}", _line(sknode))
                    sections[key][sub] = (_convert(schema[sub], svnode, f"{key}.{sub}", _line(sknode)), _line(sknode))
            else:
                raise ConfigError(f"unknown key {key!r}", _line(knode))

    def build(cls, name, **extra):
        values = {k: v for k, (v, _) in sections[name].items()}
        try:
            return cls(**values, **extra)
        except SimulationError as exc:
            lines = [ln for _, ln in sections[name].values()]
            raise ConfigError(f"{name}: {exc}", min(lines) if lines else None) from None

    f0 = top.get("f0_mhz", SystemConfig.f0_mhz)
    shadow = top.get("shadow_sigma_db", SystemConfig.shadow_sigma_db)
    try:
        return SystemConfig(
            **top,
            scenario=build(Scenario, "scenario"),
            pathloss=build(PathlossParams, "pathloss", f0_mhz=f0, shadow_sigma_db=shadow),
            ao=build(AoOptions, "ao"),
            noma=build(NomaConfig, "noma"),
        )
    except ConfigError:
        raise
    except SimulationError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _plain(config):
    s, p = config.scenario, config.pathloss
    rect = lambda r: [r.x0, r.y0, r.x1, r.y1]  # noqa: E731
    pc = config.noma.power_coefficients
    return {
        **{k: getattr(config, k) for k in _TOP if k != "schemes"},
        "schemes": [str(x) for x in config.schemes],
        "scenario": {
            "bs_position": list(s.bs_position),
            "irs_position": list(s.irs_position),
            "center_area": rect(s.center_area),
            "edge_area": rect(s.edge_area),
            "min_bs_distance": s.min_bs_distance,
        },
        "pathloss": {k: getattr(p, k) for k in _SECTIONS["pathloss"]},
        "ao": {"max_iterations": config.ao.max_iterations, "relative_tolerance": config.ao.relative_tolerance},
        "noma": {"power_coefficients": pc if isinstance(pc, str) else list(pc)},
    }


def dump_config(config):
    """Canonical YAML for ``config``; ``parse_config(dump_config(c)) == c``."""
    return yaml.safe_dump(_plain(config), sort_keys=False, default_flow_style=None)
