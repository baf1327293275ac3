"""Joint iterative Tx/Rx beamforming training.

Two schemes are provided:

``sgv_train``
    Alternating matched-filter estimates with identity training matrices;
    the noiseless recursion is power iteration on ``H^H H`` and converges to
    the principal singular pair. Weights have arbitrary amplitudes.

``stv_train``
    Same alternating structure but with DFT training matrices and an
    entry-wise phase extraction after every pass, so both ends only ever use
    constant-amplitude (phase-only) weights. It locks onto the steering
    vectors of the strongest path.

Each pass over the ``N`` receive (or ``M`` transmit) antennas costs one
training slot per antenna, so one iteration costs ``M + N`` slots.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix, as_vector, dft_matrix

DEFAULT_EPSILON = 3
_NORM_TOL = 1e-10


class Scheme(str, enum.Enum):
    SGV = "SGV"
    STV = "STV"

    @classmethod
    def parse(cls, value) -> "Scheme":
        return cls(str(value.value if isinstance(value, cls) else value).upper())


class DegenerateInputError(ValueError):
    """A zero vector reached an operation that needs a direction."""


@dataclass(frozen=True)
class Awv:
    """Unit-norm antenna weight vector.

    When ``ca_constrained`` is set every entry has magnitude ``1/sqrt(dim)``.
    """

    weights: np.ndarray
    ca_constrained: bool = False

    def __post_init__(self):
        w = as_vector(self.weights)
        if abs(np.linalg.norm(w) - 1.0) > _NORM_TOL:
            raise ValueError(f"AWV must have unit norm, got {np.linalg.norm(w)}")
        if self.ca_constrained:
            dev = np.max(np.abs(np.abs(w) - 1.0 / np.sqrt(w.size)))
            if dev > _NORM_TOL:
                raise ValueError(f"AWV violates the constant-amplitude constraint by {dev}")
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.weights.size

    def to_list(self) -> list:
        return [{"re": float(z.real), "im": float(z.imag)} for z in self.weights]


@dataclass(frozen=True)
class TrainConfig:
    scheme: Scheme
    epsilon: int = DEFAULT_EPSILON
    sigma2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if int(self.epsilon) != self.epsilon or self.epsilon < 1:
            raise ValueError(f"epsilon must be a positive integer, got {self.epsilon!r}")
        if not self.sigma2 >= 0:
            raise ValueError(f"sigma2 must be nonnegative, got {self.sigma2!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class TrainResult:
    t: Awv
    r: Awv
    slots_used: int

    def to_dict(self) -> dict:
        return {
            "t": self.t.to_list(),
            "r": self.r.to_list(),
            "slots_used": int(self.slots_used),
            "ca_constrained": bool(self.t.ca_constrained and self.r.ca_constrained),
        }


def _sweep(h, x, wh, sigma2, rng):
    # wh is the precomputed W^H
    y = h @ x
    if sigma2 > 0:
        n = rng.standard_normal((2, y.size))
        y = y + np.sqrt(sigma2 / 2.0) * (n[0] + 1j * n[1])
    return wh @ y


def _check_training_matrix(w, dim):
    w = as_matrix(w)
    if w.shape != (dim, dim):
        raise ValueError(f"training matrix must be {dim}x{dim}, got {w.shape}")
    return w


def measure_rx(h, t, w, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Receive-side sweep: ``W^H (H t + n)`` with one slot per column of ``W``.

    The pilot is ``s = 1``; ``n`` is fresh CN(0, sigma2) noise per slot.
    No random numbers are drawn when ``sigma2 == 0``.
    """
    h = as_matrix(h)
    tw = t.weights if isinstance(t, Awv) else as_vector(t)
    if h.shape[1] != tw.size:
        raise ValueError(f"dimension mismatch: H is {h.shape}, t has {tw.size} entries")
    w = _check_training_matrix(w, h.shape[0])
    return _sweep(h, tw, w.conj().T, sigma2, rng)


def measure_tx_side(h, r, w, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Reverse-link sweep ``W^H (H^H r + n)``, relying on channel reciprocity."""
    return measure_rx(as_matrix(h).conj().T, r, w, sigma2, rng)


def normalize(x) -> Awv:
    x = as_vector(x)
    nrm = np.linalg.norm(x)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise DegenerateInputError("cannot normalize a zero (or non-finite) vector")
    return Awv(x / nrm, ca_constrained=False)


def signature_estimate(x) -> Awv:
    """Phase-only projection ``exp(j*angle(x)) / sqrt(dim)``.

    Exact zeros take phase 0.
    """
    x = as_vector(x)
    phase = np.where(x == 0, 0.0, np.angle(x))
    return Awv(np.exp(1j * phase) / np.sqrt(x.size), ca_constrained=True)


def cazac_init(m: int) -> Awv:
    """Normalized Zadoff-Chu sequence of length ``m`` with root 1."""
    if int(m) != m or m < 1:
        raise ValueError(f"sequence length must be a positive integer, got {m!r}")
    m = int(m)
    k = np.arange(m)
    # k*k and k*(k+1) are reduced mod 2m; the phase has period 2m in that product
    prod = (k * k) % (2 * m) if m % 2 == 0 else (k * (k + 1)) % (2 * m)
    return Awv(np.exp(-1j * np.pi * prod / m) / np.sqrt(m), ca_constrained=True)


def _rng_for(cfg: TrainConfig, rng):
    return rng if rng is not None else np.random.default_rng(int(cfg.seed))


def sgv_train(h, cfg: TrainConfig, rng: np.random.Generator | None = None) -> TrainResult:
    """Singular-vector training with identity sweeps at both ends.

    The transmit AWV starts at ``ones(M)/sqrt(M)``. ``rng`` defaults to a
    generator seeded with ``cfg.seed``.
    """
    if cfg.scheme is not Scheme.SGV:
        raise ValueError(f"sgv_train called with scheme {cfg.scheme.value}")
    h = as_matrix(h)
    n, m = h.shape
    rng = _rng_for(cfg, rng)
    hh = h.conj().T
    eye_n, eye_m = np.eye(n), np.eye(m)
    t = Awv(np.ones(m, dtype=complex) / np.sqrt(m))
    r = None
    for _ in range(cfg.epsilon):
        r = normalize(_sweep(h, t.weights, eye_n, cfg.sigma2, rng))
        t = normalize(_sweep(hh, r.weights, eye_m, cfg.sigma2, rng))
    return TrainResult(t, r, cfg.epsilon * (m + n))


def stv_train(h, cfg: TrainConfig, rng: np.random.Generator | None = None, *,
              rx_matrix=None, tx_matrix=None) -> TrainResult:
    """Steering-vector training with constant-envelope sweeps.

    ``rx_matrix`` (``N x N``) and ``tx_matrix`` (``M x M``) default to the
    unitary DFT matrices; any unitary matrix with constant-magnitude entries
    keeps the weights phase-only.
    """
    if cfg.scheme is not Scheme.STV:
        raise ValueError(f"stv_train called with scheme {cfg.scheme.value}")
    h = as_matrix(h)
    n, m = h.shape
    rng = _rng_for(cfg, rng)
    f_n = dft_matrix(n) if rx_matrix is None else _check_training_matrix(rx_matrix, n)
    f_m = dft_matrix(m) if tx_matrix is None else _check_training_matrix(tx_matrix, m)
    hh = h.conj().T
    f_nh, f_mh = f_n.conj().T, f_m.conj().T
    t = cazac_init(m)
    r = None
    for _ in range(cfg.epsilon):
        y = _sweep(h, t.weights, f_nh, cfg.sigma2, rng)
        r = signature_estimate(f_n @ y)
        y = _sweep(hh, r.weights, f_mh, cfg.sigma2, rng)
        t = signature_estimate(f_m @ y)
    return TrainResult(t, r, cfg.epsilon * (m + n))


def train(h, cfg: TrainConfig, rng: np.random.Generator | None = None) -> TrainResult:
    """Dispatch on ``cfg.scheme``."""
    if cfg.scheme is Scheme.SGV:
        return sgv_train(h, cfg, rng)
    return stv_train(h, cfg, rng)
