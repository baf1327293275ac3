"""Directional multipath channels for half-wavelength ULAs.

A channel is a short list of multipath components (MPCs), each carrying a
complex gain and a transmit/receive cosine angle. Rendering produces the
``N x M`` matrix ``sqrt(N*M) * sum(lam * g @ h^H)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

_POWER_SUM_TOL = 1e-12


class ChannelKind(str, enum.Enum):
    LOS = "LOS"
    NLOS = "NLOS"


@dataclass(frozen=True)
class Mpc:
    """One multipath component: gain ``lam`` and cosine angles."""

    lam: complex
    omega_t: float
    omega_r: float

    def __post_init__(self):
        for name in ("omega_t", "omega_r"):
            val = getattr(self, name)
            if not -1.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1], got {val}")


@dataclass(frozen=True)
class MultipathChannel:
    mpcs: tuple
    m_tx: int
    n_rx: int

    def __post_init__(self):
        object.__setattr__(self, "mpcs", tuple(self.mpcs))
        if not self.mpcs:
            raise ValueError("a channel needs at least one MPC")
        if self.m_tx < 1 or self.n_rx < 1:
            raise ValueError("array sizes must be positive")

    def render(self) -> np.ndarray:
        return render_channel(self)

    def to_dict(self) -> dict:
        return {
            "mpcs": [
                {
                    "re": float(np.real(p.lam)),
                    "im": float(np.imag(p.lam)),
                    "omega_t": float(p.omega_t),
                    "omega_r": float(p.omega_r),
                }
                for p in self.mpcs
            ],
            "m_tx": int(self.m_tx),
            "n_rx": int(self.n_rx),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MultipathChannel":
        mpcs = [
            Mpc(complex(d["re"], d["im"]), float(d["omega_t"]), float(d["omega_r"]))
            for d in data["mpcs"]
        ]
        return cls(tuple(mpcs), int(data["m_tx"]), int(data["n_rx"]))


@dataclass(frozen=True)
class ChannelProfile:
    """Per-MPC average powers ``E|lam_l|^2``; they must sum to one.

    For ``LOS`` the first entry is the deterministic power of the
    line-of-sight path; the rest are Rayleigh-faded.
    """

    kind: ChannelKind
    powers: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "powers", tuple(float(p) for p in self.powers))
        if not self.powers:
            raise ValueError("profile needs at least one MPC power")
        if any(p < 0 for p in self.powers):
            raise ValueError("MPC powers must be nonnegative")
        if abs(math.fsum(self.powers) - 1.0) > _POWER_SUM_TOL:
            raise ValueError(
                f"profile powers must sum to 1, got {math.fsum(self.powers)!r}"
            )

    @property
    def num_paths(self) -> int:
        return len(self.powers)


LOS_POWER = 0.7692
# The weak paths share the remaining power so the profile is exactly normalized.
LOS_PROFILE = ChannelProfile(ChannelKind.LOS, (LOS_POWER,) + ((1.0 - LOS_POWER) / 3,) * 3)
NLOS_PROFILE = ChannelProfile(ChannelKind.NLOS, (0.25, 0.25, 0.25, 0.25))


def profile_by_name(name: str) -> ChannelProfile:
    key = str(name).upper()
    if key == "LOS":
        return LOS_PROFILE
    if key == "NLOS":
        return NLOS_PROFILE
    raise ValueError(f"unknown channel profile {name!r} (expected 'los' or 'nlos')")


def steering_vector(omega: float, n: int) -> np.ndarray:
    """ULA steering vector, entry ``k`` equal to ``exp(j*pi*k*omega)/sqrt(n)``.

    >>> np.round(steering_vector(0.5, 4) * 2, 12)
    array([ 1.+0.j,  0.+1.j, -1.+0.j, -0.-1.j])
    """
    if int(n) != n or n < 1:
        raise ValueError(f"array size must be a positive integer, got {n!r}")
    k = np.arange(int(n))
    return np.exp(1j * np.pi * k * omega) / np.sqrt(n)


def render_channel(ch: MultipathChannel) -> np.ndarray:
    n, m = ch.n_rx, ch.m_tx
    h = np.zeros((n, m), dtype=complex)
    for p in ch.mpcs:
        g = steering_vector(p.omega_r, n)
        t = steering_vector(p.omega_t, m)
        h += p.lam * np.outer(g, t.conj())
    return np.sqrt(n * m) * h


def sample_angles(rng: np.random.Generator) -> tuple[float, float]:
    """Draw ``(omega_t, omega_r)`` as cosines of uniform angles on ``[0, 2*pi)``."""
    phi_t, phi_r = rng.uniform(0.0, 2.0 * np.pi, size=2)
    return float(np.cos(phi_t)), float(np.cos(phi_r))


def _cn(rng, var):
    re, im = rng.standard_normal(2)
    return complex(re, im) * math.sqrt(var / 2.0)


def sample_channel(profile: ChannelProfile, m_tx: int, n_rx: int,
                   rng: np.random.Generator) -> MultipathChannel:
    """Draw one channel realization.

    Per MPC, the gain is drawn first and then the angle pair. Under ``LOS``
    the first gain has fixed magnitude ``sqrt(powers[0])`` and uniform phase;
    every other gain is circularly-symmetric complex Gaussian with variance
    equal to its profile power.
    """
    if abs(math.fsum(profile.powers) - 1.0) > _POWER_SUM_TOL:
        raise ValueError("profile powers must sum to 1")
    mpcs = []
    for idx, power in enumerate(profile.powers):
        if profile.kind is ChannelKind.LOS and idx == 0:
            lam = math.sqrt(power) * complex(np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)))
        else:
            lam = _cn(rng, power)
        omega_t, omega_r = sample_angles(rng)
        mpcs.append(Mpc(lam, omega_t, omega_r))
    return MultipathChannel(tuple(mpcs), m_tx, n_rx)
