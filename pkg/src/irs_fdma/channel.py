"""Small-scale fading realisations for the BS-UE, IRS-UE and BS-IRS links."""

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConformabilityError, InvalidArgumentError
from .geometry import LargeScaleGains
from .numerics import complex_gaussian

__all__ = [
    "ChannelSet",
    "rayleigh_vector",
    "rician_matrix",
    "steering_vector",
    "los_component",
    "generate_channel_set",
    "write_channel_dump",
    "read_channel_dump",
]


@dataclass(frozen=True)
class ChannelSet:
    """One realisation of every link in a drop.

    Attributes
    ----------
    H : (N, N_b) complex array
        BS to IRS; row ``n`` is ``h_n^T``.
    F : (K, N_b) complex array
        BS to UE; row ``k`` is ``f_k^T``.
    G : (K, N) complex array
        IRS to UE; row ``k`` is ``g_k^T``.
    gains : LargeScaleGains
    rician_gamma : float
    """

    H: np.ndarray
    F: np.ndarray
    G: np.ndarray
    gains: LargeScaleGains
    rician_gamma: float = 5.0

    def __post_init__(self):
        n, nb = self.H.shape
        k = self.F.shape[0]
        if self.F.shape != (k, nb) or self.G.shape != (k, n):
            raise ConformabilityError(
                f"inconsistent channel shapes H{self.H.shape} F{self.F.shape} G{self.G.shape}"
            )
        if self.gains.n_users != k:
            raise ConformabilityError("gains do not match the number of users")
        for a in (self.H, self.F, self.G):
            a.setflags(write=False)

    @property
    def n_users(self):
        return self.F.shape[0]

    @property
    def n_elements(self):
        return self.H.shape[0]

    @property
    def n_antennas(self):
        return self.H.shape[1]

    def f(self, k):
        return self.F[k]

    def g(self, k):
        return self.G[k]


def rayleigh_vector(length, sigma2, rng):
    """I.i.d. CN(0, sigma2) vector."""
    if int(length) < 1:
        raise InvalidArgumentError("length must be >= 1")
    if not sigma2 > 0:
        raise InvalidArgumentError(f"sigma2 must be > 0, got {sigma2}")
    return complex_gaussian(rng, sigma2, size=int(length))


def rician_matrix(n_rows, n_cols, sigma_h2, gamma, los, rng):
    los = np.asarray(los, dtype=complex)
    if los.shape != (n_rows, n_cols):
        raise ConformabilityError(f"LOS matrix shape {los.shape} != {(n_rows, n_cols)}")
    if gamma < 0:
        raise InvalidArgumentError("Rician factor must be >= 0")
    if not sigma_h2 > 0:
        raise InvalidArgumentError("sigma_h2 must be > 0")
    nlos = complex_gaussian(rng, 1.0, size=(n_rows, n_cols))
    return np.sqrt(gamma * sigma_h2 / (gamma + 1.0)) * los + np.sqrt(sigma_h2 / (gamma + 1.0)) * nlos


def steering_vector(n, angle):
    """Half-wavelength ULA response ``exp(j*pi*i*sin(angle))``, i = 0..n-1."""
    return np.exp(1j * np.pi * np.arange(n) * np.sin(angle))


def los_component(scenario, n_elements, n_antennas):
    """Rank-one unit-modulus BS-IRS line-of-sight matrix ``a_r a_t^H``.

    Both arrays lie along the y-axis, so angles are measured from the x-axis:
    departure is the BS to IRS bearing and arrival the IRS to BS bearing.
    """
    dx = scenario.irs_position[0] - scenario.bs_position[0]
    dy = scenario.irs_position[1] - scenario.bs_position[1]
    aod = np.arctan2(dy, dx)
    aoa = np.arctan2(-dy, -dx)
    return los_from_angles(n_elements, n_antennas, aoa, aod)


def los_from_angles(n_elements, n_antennas, aoa, aod):
    a_r = steering_vector(n_elements, aoa)
    a_t = steering_vector(n_antennas, aod)
    return np.outer(a_r, a_t.conj())


def generate_channel_set(n_elements, n_antennas, gains, rician_gamma, los, rng):
    """Draw one independent realisation for all users.

    ``rng`` is split into fixed substreams (0: H, 1: F, 2: G) so each link
    family is reproducible on its own.
    """
    k = gains.n_users
    rh, rf, rg = rng.substream(0), rng.substream(1), rng.substream(2)
    H = rician_matrix(n_elements, n_antennas, gains.sigma_h2, rician_gamma, los, rh)
    F = np.vstack([rayleigh_vector(n_antennas, s, rf) for s in gains.sigma_f2])
    if n_elements > 0:
        G = np.vstack([rayleigh_vector(n_elements, s, rg) for s in gains.sigma_g2])
    else:
        G = np.zeros((k, 0), dtype=complex)
    return ChannelSet(H=H, F=F, G=G, gains=gains, rician_gamma=float(rician_gamma))


# Channel dump: a debugging format, one record per drop.
#
#   b"IRSCHAN1\n"
#   one UTF-8 JSON header line: {"n_elements", "n_antennas", "n_users", "seed", "layout"}
#   records: uint64 drop index, then H, F, G row-major, each complex entry as
#   two little-endian float64 (real, imag), then sigma_f2[K], sigma_g2[K],
#   sigma_h2 as little-endian float64.

_DUMP_MAGIC = b"IRSCHAN1\n"


def _record_size(n, nb, k):
    return 8 + 16 * (n * nb + k * nb + k * n) + 8 * (2 * k + 1)


def write_channel_dump(path, records, seed):
    """Write ``records``, an iterable of ``(drop_index, ChannelSet)``, to ``path``."""
    records = list(records)
    if not records:
        raise InvalidArgumentError("nothing to dump")
    first = records[0][1]
    dims = (first.n_elements, first.n_antennas, first.n_users)
    header = {
        "n_elements": dims[0],
        "n_antennas": dims[1],
        "n_users": dims[2],
        "seed": int(seed),
        "layout": "drop:u64 H[N,Nb] F[K,Nb] G[K,N] as <c16, sigma_f2[K] sigma_g2[K] sigma_h2 as <f8",
    }
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        for drop, ch in records:
            if (ch.n_elements, ch.n_antennas, ch.n_users) != dims:
                raise ConformabilityError("all dumped channel sets must share dimensions")
            fh.write(struct.pack("<Q", int(drop)))
            for a in (ch.H, ch.F, ch.G):
                fh.write(np.ascontiguousarray(a, dtype="<c16").tobytes())
            tail = np.concatenate([ch.gains.sigma_f2, ch.gains.sigma_g2, [ch.gains.sigma_h2]])
            fh.write(tail.astype("<f8").tobytes())


def read_channel_dump(path):
    """Inverse of :func:`write_channel_dump`; returns ``(header, [(drop, ChannelSet), ...])``.

    The Rician factor is not stored; records come back with the default.
    """
    with open(path, "rb") as fh:
        if fh.read(len(_DUMP_MAGIC)) != _DUMP_MAGIC:
            raise InvalidArgumentError(f"{path} is not a channel dump")
        header = json.loads(fh.readline())
        body = fh.read()
    n, nb, k = header["n_elements"], header["n_antennas"], header["n_users"]
    size = _record_size(n, nb, k)
    if len(body) % size:
        raise InvalidArgumentError("truncated channel dump")
    out = []
    for off in range(0, len(body), size):
        rec = body[off : off + size]
        (drop,) = struct.unpack_from("<Q", rec)
        c = np.frombuffer(rec, dtype="<c16", count=n * nb + k * nb + k * n, offset=8)
        H = c[: n * nb].reshape(n, nb).copy()
        F = c[n * nb : n * nb + k * nb].reshape(k, nb).copy()
        G = c[n * nb + k * nb :].reshape(k, n).copy()
        r = np.frombuffer(rec, dtype="<f8", offset=8 + 16 * c.size)
        gains = LargeScaleGains(sigma_f2=r[:k].copy(), sigma_g2=r[k : 2 * k].copy(), sigma_h2=float(r[-1]))
        out.append((drop, ChannelSet(H=H, F=F, G=G, gains=gains)))
    return header, out
