"""Complex linear-algebra kernels and seeded random streams.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
The helpers here only add the conformability checks and conventions
(phase canonicalisation, zero-phase rule) the rest of the package relies on.
"""

import numpy as np

from .errors import ConformabilityError, InvalidArgumentError

__all__ = [
    "RngStream",
    "sample_complex_gaussian",
    "complex_gaussian",
    "phase_of",
    "hermitian_inner",
    "matvec",
    "frobenius_norm",
]

TWO_PI = 2.0 * np.pi

_MASK64 = (1 << 64) - 1


class RngStream:
    """Counter-based random stream identified by ``(seed, stream_id)``.

    Backed by a Philox generator keyed through ``numpy.random.SeedSequence``,
    so the sample sequence only depends on the key and never on how many
    other streams exist or in which order they are consumed. Child streams
    (``substream``) extend the key and are independent of the parent.

    Instances are single-owner; do not share one between threads.
    """

    def __init__(self, seed, stream_id=0, _path=()):
        seed = int(seed)
        stream_id = int(stream_id)
        if not (0 <= seed <= _MASK64 and 0 <= stream_id <= _MASK64):
            raise InvalidArgumentError("seed and stream_id must be unsigned 64-bit integers")
        self.seed = seed
        self.stream_id = stream_id
        self._path = tuple(int(p) for p in _path)
        ss = np.random.SeedSequence(seed, spawn_key=(stream_id,) + self._path)
        self.generator = np.random.Generator(np.random.Philox(ss))

    def substream(self, offset):
        """Independent child stream at a fixed ``offset`` under this key."""
        return RngStream(self.seed, self.stream_id, self._path + (int(offset),))

    def __repr__(self):
        path = "".join(f"/{p}" for p in self._path)
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}{path})"


def _check_variance(variance):
    variance = float(variance)
    if not np.isfinite(variance) or variance < 0:
        raise InvalidArgumentError(f"variance must be finite and >= 0, got {variance}")
    return variance


def complex_gaussian(rng, variance, size=None):
    """Draw CN(0, variance) samples; real and imaginary parts are N(0, variance/2)."""
    variance = _check_variance(variance)
    z = rng.generator.standard_normal(size=(2,) if size is None else (2,) + tuple(np.atleast_1d(size)))
    out = np.sqrt(variance / 2.0) * (z[0] + 1j * z[1])
    return complex(out) if size is None else out


def sample_complex_gaussian(rng, variance):
    """Single CN(0, variance) draw. Zero variance returns exactly ``0j``."""
    return complex_gaussian(rng, variance)


def phase_of(v):
    """Element-wise phase in ``[0, 2π)``; the phase of an exact zero is 0."""
    v = np.asarray(v, dtype=complex)
    ph = np.angle(v)
    ph = np.where(ph < 0.0, ph + TWO_PI, ph)
    # angle() of tiny negative imag parts can round up to exactly 2π
    ph = np.where(ph >= TWO_PI, 0.0, ph)
    return np.where(v == 0, 0.0, ph)


def _as_vector(x, name):
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise ConformabilityError(f"{name} must be a vector, got shape {x.shape}")
    return x


def hermitian_inner(a, b):
    """``a^H b``."""
    a = _as_vector(a, "a")
    b = _as_vector(b, "b")
    if a.shape != b.shape:
        raise ConformabilityError(f"inner product of shapes {a.shape} and {b.shape}")
    return complex(np.vdot(a, b))


def matvec(m, v):
    m = np.asarray(m, dtype=complex)
    v = _as_vector(v, "v")
    if m.ndim != 2 or m.shape[1] != v.shape[0]:
        raise ConformabilityError(f"cannot multiply {m.shape} matrix by length-{v.shape[0]} vector")
    return m @ v


def frobenius_norm(x):
    x = np.asarray(x, dtype=complex)
    return float(np.sqrt(np.sum(x.real**2 + x.imag**2)))
