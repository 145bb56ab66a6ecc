"""Passive (IRS phase) and active (BS MRT) beamforming.

The single-user problem is

    max_{theta, w}  |(g^T diag(e^{j theta}) H + f^T) w|^2,   ||w|| <= 1,

solved by alternating a closed-form phase alignment (fixed ``w``) with MRT
(fixed ``theta``). Channels follow the row convention of
:class:`~irs_fdma.channel.ChannelSet`: ``g`` has length N, ``f`` length N_b
and ``H`` is N x N_b.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConformabilityError, DegenerateChannelError, InvalidArgumentError
from .numerics import TWO_PI, phase_of

__all__ = [
    "ReflectionState",
    "Beamformer",
    "AoOptions",
    "AoResult",
    "effective_channel",
    "mrt_beamformer",
    "optimal_phases",
    "alternating_optimize",
    "random_reflection",
]


@dataclass(frozen=True)
class ReflectionState:
    """Unit-amplitude IRS configuration, phases canonicalised to ``[0, 2π)``."""

    phases: np.ndarray

    def __post_init__(self):
        ph = np.mod(np.asarray(self.phases, dtype=float), TWO_PI)
        ph[ph >= TWO_PI] = 0.0
        if ph.ndim != 1:
            raise InvalidArgumentError("phases must be a vector")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def n_elements(self):
        return self.phases.shape[0]

    @property
    def coefficients(self):
        """Diagonal of the reflection matrix, ``e^{j phi_n}``."""
        return np.exp(1j * self.phases)


@dataclass(frozen=True)
class Beamformer:
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex)
        if w.ndim != 1:
            raise InvalidArgumentError("beamformer must be a vector")
        if np.linalg.norm(w) > 1.0 + 1e-12:
            raise InvalidArgumentError(f"beamformer norm {np.linalg.norm(w)} exceeds 1")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class AoOptions:
    """Stopping rule: at most ``max_iterations`` phase/MRT rounds, or earlier
    once the relative objective gain of a round drops below
    ``relative_tolerance``."""

    max_iterations: int = 3
    relative_tolerance: float = 1e-6

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise InvalidArgumentError("max_iterations must be >= 1")
        if not self.relative_tolerance >= 0:
            raise InvalidArgumentError("relative_tolerance must be >= 0")


@dataclass(frozen=True)
class AoResult:
    theta: ReflectionState
    beamformer: Beamformer
    trace: list

    @property
    def objective(self):
        return self.trace[-1]

    def __iter__(self):
        return iter((self.theta, self.beamformer, self.trace))


def _check_dims(g, H, f):
    g = np.asarray(g, dtype=complex)
    f = np.asarray(f, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or g.shape != (H.shape[0],) or f.shape != (H.shape[1],):
        raise ConformabilityError(f"g{g.shape}, H{H.shape}, f{f.shape} are not conformable")
    return g, H, f


def effective_channel(g, theta, H, f):
    """``g^T diag(e^{j phi}) H + f^T`` as a length-N_b vector."""
    g, H, f = _check_dims(g, H, f)
    if theta.n_elements != g.shape[0]:
        raise ConformabilityError(f"{theta.n_elements} phases for {g.shape[0]} elements")
    return (g * theta.coefficients) @ H + f


def mrt_beamformer(c):
    """Unit-norm matched filter ``conj(c)/||c||``, so that ``|c^T w| = ||c||``."""
    c = np.asarray(c, dtype=complex)
    norm = np.linalg.norm(c)
    if norm == 0:
        raise DegenerateChannelError("MRT of an all-zero channel")
    w = c.conj() / norm
    # keep ||w|| <= 1 under rounding
    n2 = np.linalg.norm(w)
    if n2 > 1.0:
        w = w / n2
    return Beamformer(w)


def optimal_phases(g, H, w, f):
    """Closed-form phases aligning every reflected path with the direct one.

    ``phi_n = phi_0 - arg(g_n) - arg(h_n^T w)`` with ``phi_0 = arg(f^T w)``
    (``phi_0 = 0`` when ``f^T w = 0``). Elements whose cascaded coefficient
    ``g_n h_n^T w`` is exactly zero get ``phi_0``.
    """
    g, H, f = _check_dims(g, H, f)
    w = w.w if isinstance(w, Beamformer) else np.asarray(w, dtype=complex)
    if not np.any(w):
        raise DegenerateChannelError("phase alignment needs a nonzero beamformer")
    phi0 = phase_of(f @ w)
    hw = H @ w
    cascaded = g * hw
    phases = phi0 - phase_of(g) - phase_of(hw)
    phases = np.where(cascaded == 0, phi0, phases)
    return ReflectionState(phases)


def alternating_optimize(g, H, f, opts=None):
    """Jointly optimise IRS phases and the BS beamformer for one user.

    Starts from direct-link MRT ``w0 = conj(f)/||f||``, then repeats
    (phases given ``w``, MRT given phases). ``trace[0]`` is the direct-link
    objective ``||f||^2``; ``trace[i]`` is ``|(g^T Θ_i H + f^T) w_i|^2`` after
    round ``i``. A round that does not improve the objective (possible only
    through rounding once converged) is discarded and ends the loop, so the
    trace is non-decreasing and the returned pair attains ``trace[-1]``.

    Returns an :class:`AoResult`, which also unpacks as ``(theta, beamformer, trace)``.
    """
    opts = opts or AoOptions()
    g, H, f = _check_dims(g, H, f)
    fnorm = np.linalg.norm(f)
    if fnorm == 0:
        raise DegenerateChannelError("alternating optimisation is initialised by direct-link MRT; f is zero")
    w = mrt_beamformer(f)
    trace = [float(np.abs(f @ w.w) ** 2)]
    theta = None
    for it in range(int(opts.max_iterations)):
        new_theta = optimal_phases(g, H, w, f)
        c = effective_channel(g, new_theta, H, f)
        obj = float(np.real(np.vdot(c, c)))
        if obj == 0:
            raise DegenerateChannelError("effective channel vanished")
        if theta is not None and obj < trace[-1]:
            break
        prev = trace[-1]
        theta, w = new_theta, mrt_beamformer(c)
        trace.append(obj)
        if obj - prev <= opts.relative_tolerance * prev:
            break
    return AoResult(theta=theta, beamformer=w, trace=trace)


def random_reflection(n, rng):
    """I.i.d. uniform phases on ``[0, 2π)``; uses no channel knowledge."""
    if int(n) < 1:
        raise InvalidArgumentError("need at least one element")
    return ReflectionState(rng.generator.uniform(0.0, TWO_PI, size=int(n)))
