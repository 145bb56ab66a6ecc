"""Monte-Carlo study of user scheduling and passive beamforming for
IRS-aided FDMA/OFDMA downlink, with TDMA and NOMA baselines."""

__version__ = "0.1.0"

from .beamforming import (  # noqa: E402
    AoOptions,
    Beamformer,
    ReflectionState,
    alternating_optimize,
    effective_channel,
    mrt_beamformer,
    optimal_phases,
    random_reflection,
)
from .channel import ChannelSet, generate_channel_set, los_component  # noqa: E402
from .config import SystemConfig, dump_config, load_config, parse_config  # noqa: E402
from .montecarlo import CdfReport, emit_report, empirical_cdf, percentile, run_trials  # noqa: E402
from .multiaccess import DropEvaluator, NomaConfig, RateResult, SchemeId  # noqa: E402
from .numerics import RngStream  # noqa: E402
