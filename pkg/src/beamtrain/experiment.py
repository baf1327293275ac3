"""Monte Carlo evaluation of the training schemes.

Seeding
-------
Every random stream is derived from the experiment's ``master_seed`` with
:class:`numpy.random.SeedSequence`, using the spawn key as the mixing input:

* channel of trial ``i``: ``spawn_key=(0, i)``
* training noise of trial ``i`` in cell ``c``: ``spawn_key=(1, i, c)``

Cells are enumerated scheme-major, then epsilon, then SNR. Because channel
seeds do not depend on the cell, all cells see the same channel for a given
trial index (paired comparison), while their noise streams differ.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelProfile, MultipathChannel, render_channel, sample_channel
from .numerics import as_matrix, principal_svd
from .training import Awv, DegenerateInputError, Scheme, TrainConfig, TrainResult, train

CHANNEL_STREAM = 0
NOISE_STREAM = 1
THREADS_ENV = "BEAMTRAIN_THREADS"

CURVE_FIELDS = ("scheme", "epsilon", "snr_db", "mean_gain_db", "mean_bound_db", "trials")
# appended so multi-panel results stay unambiguous
CONTEXT_FIELDS = ("profile", "m_tx", "n_rx", "failed")
TRIAL_FIELDS = ("trial", "scheme", "epsilon", "snr_db", "gain_linear",
                "svd_bound_linear", "slots_used")


def derive_seed(master_seed: int, *key: int) -> int:
    """64-bit seed mixed from ``master_seed`` and the integer ``key``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def snr_to_sigma2(snr_db: float) -> float:
    """Noise power for a transmit SNR in dB; ``+inf`` means noiseless."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    if math.isnan(snr_db) or math.isinf(snr_db):
        raise ValueError(f"invalid SNR {snr_db!r}")
    return 10.0 ** (-snr_db / 10.0)


def to_db(x: float) -> float:
    return 10.0 * math.log10(x) if x > 0 else -math.inf


@dataclass(frozen=True)
class ExperimentConfig:
    profile: ChannelProfile
    m_tx: int
    n_rx: int
    schemes: tuple
    epsilons: tuple
    snr_db_grid: tuple
    trials: int
    master_seed: int = 0

    def __post_init__(self):
        schemes = sorted({Scheme.parse(s) for s in self.schemes}, key=lambda s: s.value)
        object.__setattr__(self, "schemes", tuple(schemes))
        object.__setattr__(self, "epsilons", tuple(int(e) for e in self.epsilons))
        object.__setattr__(self, "snr_db_grid", tuple(float(s) for s in self.snr_db_grid))
        if self.m_tx < 1 or self.n_rx < 1:
            raise ValueError("m_tx and n_rx must be positive")
        if not self.schemes or not self.epsilons or not self.snr_db_grid:
            raise ValueError("schemes, epsilons and snr_db_grid must be nonempty")
        if any(e < 1 for e in self.epsilons):
            raise ValueError("epsilons must be positive integers")
        for s in self.snr_db_grid:
            snr_to_sigma2(s)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")

    def cells(self) -> list:
        return [(s, e, snr) for s in self.schemes for e in self.epsilons
                for snr in self.snr_db_grid]


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    scheme: Scheme
    epsilon: int
    snr_db: float
    gain_linear: float
    svd_bound_linear: float
    slots_used: int
    failed: bool = False
    # trained weights, only kept when run_experiment(keep_awvs=True)
    result: TrainResult | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class CurvePoint:
    scheme: Scheme
    epsilon: int
    snr_db: float
    mean_gain_db: float
    mean_bound_db: float
    trials: int
    failed: int = 0
    profile: str = ""
    m_tx: int = 0
    n_rx: int = 0


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    points: list
    records: list = field(repr=False)

    @property
    def failed_trials(self) -> int:
        return sum(r.failed for r in self.records)


def array_gain(h, t, r) -> float:
    """``|r^H H t|^2``."""
    h = as_matrix(h)
    tw = t.weights if isinstance(t, Awv) else np.asarray(t, dtype=complex)
    rw = r.weights if isinstance(r, Awv) else np.asarray(r, dtype=complex)
    if h.shape != (rw.size, tw.size):
        raise ValueError(f"dimension mismatch: H is {h.shape}, r/t have {rw.size}/{tw.size}")
    return float(abs(np.vdot(rw, h @ tw)) ** 2)


def _evaluate(h, bound, trial_index, scheme, epsilon, snr_db, noise_seed, keep=False):
    cfg = TrainConfig(scheme, epsilon, snr_to_sigma2(snr_db), noise_seed)
    slots = epsilon * (h.shape[0] + h.shape[1])
    try:
        res = train(h, cfg)
    except DegenerateInputError:
        return TrialRecord(trial_index, cfg.scheme, epsilon, snr_db, math.nan, bound,
                           slots, failed=True)
    return TrialRecord(trial_index, cfg.scheme, epsilon, snr_db,
                       array_gain(h, res.t, res.r), bound, res.slots_used,
                       result=res if keep else None)


def train_once(profile: ChannelProfile, m_tx: int, n_rx: int, scheme, epsilon: int,
               snr_db: float, trial_seed: int, channel_seed: int | None = None):
    """Sample a channel and train on it once.

    Returns ``(channel, H, TrainResult, svd_bound_linear)``. Degenerate
    measurements propagate as :class:`DegenerateInputError`.
    """
    if channel_seed is None:
        channel_seed = derive_seed(trial_seed, CHANNEL_STREAM)
    ch = sample_channel(profile, m_tx, n_rx, np.random.default_rng(channel_seed))
    h = render_channel(ch)
    bound = principal_svd(h).sigma1 ** 2
    cfg = TrainConfig(scheme, epsilon, snr_to_sigma2(snr_db),
                      derive_seed(trial_seed, NOISE_STREAM))
    return ch, h, train(h, cfg), bound


def run_trial(profile: ChannelProfile, m_tx: int, n_rx: int, scheme, epsilon: int,
              snr_db: float, trial_seed: int, channel_seed: int | None = None) -> TrialRecord:
    """Sample a channel, train on it, and record gain against the SVD bound.

    The channel stream is derived from ``trial_seed`` unless ``channel_seed``
    is given; the noise stream is always derived from ``trial_seed``.
    """
    if channel_seed is None:
        channel_seed = derive_seed(trial_seed, CHANNEL_STREAM)
    ch = sample_channel(profile, m_tx, n_rx, np.random.default_rng(channel_seed))
    h = render_channel(ch)
    bound = principal_svd(h).sigma1 ** 2
    return _evaluate(h, bound, 0, scheme, epsilon, snr_db,
                     derive_seed(trial_seed, NOISE_STREAM))


def trial_channel(cfg: ExperimentConfig, trial_index: int) -> MultipathChannel:
    """Regenerate the channel every cell of ``cfg`` uses for ``trial_index``."""
    rng = np.random.default_rng(derive_seed(cfg.master_seed, CHANNEL_STREAM, trial_index))
    return sample_channel(cfg.profile, cfg.m_tx, cfg.n_rx, rng)


def _run_trial_index(cfg: ExperimentConfig, cells, i: int, keep: bool = False) -> list:
    h = render_channel(trial_channel(cfg, i))
    bound = principal_svd(h).sigma1 ** 2
    return [
        _evaluate(h, bound, i, scheme, eps, snr,
                  derive_seed(cfg.master_seed, NOISE_STREAM, i, c), keep)
        for c, (scheme, eps, snr) in enumerate(cells)
    ]


def resolve_workers(workers: int | None = None) -> int:
    """Worker count from the argument or ``BEAMTRAIN_THREADS`` (0 = auto)."""
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        workers = int(raw)
    if workers < 0:
        raise ValueError("worker count must be nonnegative")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


def _aggregate(cfg, cells, by_cell) -> list:
    points = []
    for c, (scheme, eps, snr) in enumerate(cells):
        recs = sorted(by_cell[c], key=lambda r: r.trial_index)
        ok = [r for r in recs if not r.failed]
        if ok:
            gain = to_db(math.fsum(r.gain_linear for r in ok) / len(ok))
            bound = to_db(math.fsum(r.svd_bound_linear for r in ok) / len(ok))
        else:
            gain = bound = math.nan
        points.append(CurvePoint(scheme, eps, snr, gain, bound, len(ok),
                                 len(recs) - len(ok), cfg.profile.kind.value,
                                 cfg.m_tx, cfg.n_rx))
    return points


def run_experiment(cfg: ExperimentConfig, workers: int | None = None,
                   keep_awvs: bool = False) -> ExperimentResult:
    """Run every (scheme, epsilon, SNR) cell over ``cfg.trials`` paired channels.

    Means are taken in linear power and reported in dB. Output does not
    depend on ``workers``: records are sorted by trial index before any
    reduction. With ``keep_awvs`` each record also carries its TrainResult.
    """
    cells = cfg.cells()
    workers = min(resolve_workers(workers), cfg.trials)
    if workers <= 1:
        per_trial = [_run_trial_index(cfg, cells, i, keep_awvs) for i in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(lambda i: _run_trial_index(cfg, cells, i, keep_awvs),
                                      range(cfg.trials)))
    by_cell = [[] for _ in cells]
    for recs in per_trial:
        for c, rec in enumerate(recs):
            by_cell[c].append(rec)
    records = [r for c in range(len(cells))
               for r in sorted(by_cell[c], key=lambda r: r.trial_index)]
    return ExperimentResult(cfg, _aggregate(cfg, cells, by_cell), records)


def fmt_float(x: float) -> str:
    """Six significant digits; infinities as ``inf``/``-inf``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".6g")


def curve_rows(points) -> list:
    return [
        [p.scheme.value, p.epsilon, fmt_float(p.snr_db), fmt_float(p.mean_gain_db),
         fmt_float(p.mean_bound_db), p.trials, p.profile, p.m_tx, p.n_rx, p.failed]
        for p in points
    ]


def curves_to_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_FIELDS + CONTEXT_FIELDS)
    writer.writerows(curve_rows(points))
    return buf.getvalue()


def trials_to_csv(results) -> str:
    """Per-trial rows for one or more :class:`ExperimentResult`."""
    if isinstance(results, ExperimentResult):
        results = [results]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRIAL_FIELDS + CONTEXT_FIELDS[:3])
    for res in results:
        ctx = [res.config.profile.kind.value, res.config.m_tx, res.config.n_rx]
        for r in res.records:
            writer.writerow([r.trial_index, r.scheme.value, r.epsilon, fmt_float(r.snr_db),
                             fmt_float(r.gain_linear), fmt_float(r.svd_bound_linear),
                             r.slots_used] + ctx)
    return buf.getvalue()
