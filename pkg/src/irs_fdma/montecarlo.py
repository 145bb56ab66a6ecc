"""Monte-Carlo driver: drops, paired scheme evaluation, CDF statistics and CSV output."""

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import generate_channel_set, los_component
from .errors import InvalidArgumentError, SimulationError
from .geometry import compute_large_scale_gains, drop_users
from .multiaccess import DropEvaluator, SchemeId
from .numerics import RngStream

log = logging.getLogger(__name__)

__all__ = [
    "CdfReport",
    "percentile",
    "empirical_cdf",
    "default_channel_source",
    "simulate_drop",
    "run_trials",
    "emit_report",
    "MAX_ABORT_FRACTION",
]

MAX_ABORT_FRACTION = 0.01

# substreams of the per-drop stream
_POSITIONS, _SHADOWING, _FADING, _SCHEMES = range(4)


def percentile(samples, p):
    """Ceiling order statistic: the ``ceil(p*n)``-th smallest sample (1-based).

    No interpolation, so the result is always one of the samples.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise InvalidArgumentError("percentile of an empty sample")
    if not 0 < p < 1:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p}")
    # the slack keeps e.g. 0.07*100 = 7.000000000000001 at rank 7
    rank = max(1, math.ceil(p * x.size - 1e-9))
    return float(x[rank - 1])


def empirical_cdf(samples):
    """Step points ``(x_(i), i/n)`` of the sorted sample."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise InvalidArgumentError("empirical CDF of an empty sample")
    return [(float(v), (i + 1) / n) for i, v in enumerate(x)]


@dataclass
class CdfReport:
    """Per-scheme sum-rate samples of a run.

    ``sum_rates[scheme][i]`` belongs to drop ``drops[i]``; drops that were
    aborted are absent from ``drops`` and listed in ``aborted``.
    """

    drops: np.ndarray
    sum_rates: dict
    seed: int
    n_drops: int
    config_hash: str = ""
    aborted: list = field(default_factory=list)

    @property
    def schemes(self):
        return list(self.sum_rates)

    def samples(self, scheme):
        """Ascending sum-rate samples for ``scheme``."""
        return np.sort(self.sum_rates[SchemeId.parse(scheme)])

    def p05(self, scheme):
        """95%-likely sum rate (5th percentile)."""
        return percentile(self.sum_rates[SchemeId.parse(scheme)], 0.05)

    def p50(self, scheme):
        return percentile(self.sum_rates[SchemeId.parse(scheme)], 0.5)

    def mean(self, scheme):
        return float(np.mean(self.sum_rates[SchemeId.parse(scheme)]))

    def summary(self):
        return {
            s: {"p05": self.p05(s), "p50": self.p50(s), "mean": self.mean(s), "max": float(np.max(self.sum_rates[s]))}
            for s in self.sum_rates
        }


def default_channel_source(config, drop, rng, los=None):
    """Positions, shadowing and fading for one drop, all from ``rng`` substreams."""
    positions = drop_users(config.scenario, config.n_users, rng.substream(_POSITIONS))
    gains = compute_large_scale_gains(config.scenario, positions, config.pathloss, rng.substream(_SHADOWING))
    if los is None:
        los = los_component(config.scenario, config.n_elements, config.n_antennas)
    return generate_channel_set(config.n_elements, config.n_antennas, gains, config.rician_gamma, los, rng.substream(_FADING))


def simulate_drop(config, drop, channel_source=None, los=None):
    """Evaluate every configured scheme on one shared channel realisation.

    Returns ``{SchemeId: sum_rate}``.
    """
    rng = RngStream(config.seed, drop)
    if channel_source is None:
        channels = default_channel_source(config, drop, rng, los)
    else:
        channels = channel_source(config, drop, rng)
    ev = DropEvaluator(
        channels,
        config.pd_watts,
        config.noise_variance,
        ao_opts=config.ao,
        noma=config.noma,
        rng=rng.substream(_SCHEMES),
    )
    return {s: ev.evaluate(s).sum_rate for s in config.schemes}


def _run_chunk(config, drops, channel_source=None):
    los = los_component(config.scenario, config.n_elements, config.n_antennas)
    out = []
    for d in drops:
        try:
            out.append((d, simulate_drop(config, d, channel_source, los), None))
        except SimulationError as exc:
            out.append((d, None, f"{type(exc).__name__}: {exc}"))
    return out


def run_trials(config, channel_source=None, workers=1):
    """Run ``config.n_drops`` drops and aggregate them into a :class:`CdfReport`.

    Drop ``d`` draws everything from ``RngStream(config.seed, d)``, so the
    result does not depend on ``workers``. A drop failing with a
    :class:`SimulationError` is logged and skipped; more than 1% failures
    aborts the run.
    """
    n = int(config.n_drops)
    if workers is None or workers < 1:
        workers = os.cpu_count() or 1
    if workers == 1 or n == 1:
        results = _run_chunk(config, range(n), channel_source)
    else:
        chunks = [list(range(n))[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [config] * workers, chunks, [channel_source] * workers)
            results = sorted((r for part in parts for r in part), key=lambda r: r[0])

    drops, aborted = [], []
    rates = {s: [] for s in config.schemes}
    for d, values, err in results:
        if err is not None:
            log.warning("drop %d aborted: %s", d, err)
            aborted.append(d)
            continue
        drops.append(d)
        for s in config.schemes:
            rates[s].append(values[s])
    if len(aborted) > MAX_ABORT_FRACTION * n:
        raise SimulationError(f"{len(aborted)} of {n} drops aborted (limit {MAX_ABORT_FRACTION:.0%})")
    if not drops:
        raise SimulationError("no drop completed")
    return CdfReport(
        drops=np.array(drops),
        sum_rates={s: np.array(v) for s, v in rates.items()},
        seed=int(config.seed),
        n_drops=n,
        config_hash=config.digest(),
        aborted=aborted,
    )


def _fmt(x):
    return format(float(x), ".17g")


def emit_report(report, out_dir, prefix=""):
    """Write the samples, summary and CDF-point CSVs into ``out_dir``.

    Returns a dict of the written paths keyed by ``samples``, ``summary``, ``cdf``.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, f"{prefix}{name}.csv") for name in ("samples", "summary", "cdf")}

    def writer(fh):
        return csv.writer(fh, lineterminator="\n")

    with open(paths["samples"], "w", newline="", encoding="utf-8") as fh:
        w = writer(fh)
        w.writerow(["scheme", "drop", "sum_rate_bps_hz"])
        for s, values in report.sum_rates.items():
            for d, v in zip(report.drops, values):
                w.writerow([str(s), int(d), _fmt(v)])
    with open(paths["summary"], "w", newline="", encoding="utf-8") as fh:
        w = writer(fh)
        w.writerow(["scheme", "p05", "p50", "mean", "n_drops", "seed"])
        for s in report.sum_rates:
            w.writerow([str(s), _fmt(report.p05(s)), _fmt(report.p50(s)), _fmt(report.mean(s)), len(report.drops), report.seed])
    with open(paths["cdf"], "w", newline="", encoding="utf-8") as fh:
        w = writer(fh)
        w.writerow(["scheme", "value", "cum_fraction"])
        for s, values in report.sum_rates.items():
            for v, frac in empirical_cdf(values):
                w.writerow([str(s), _fmt(v), _fmt(frac)])
    return paths
