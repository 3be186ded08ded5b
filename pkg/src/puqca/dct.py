"""Density classification: majority labels, guesses, fitness and the classical bound."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import statevector as sv
from .model import FermionRule, PUQCARule

MAX_ENUMERATE_N = 20
TIE_TOL = 1e-12
DEFAULT_MISCLASSIFIED_CAP = 1000
THREADS_ENV = "PUQCA_NUM_THREADS"


def worker_count() -> int:
    """Worker threads for evaluators; ``PUQCA_NUM_THREADS`` caps the default."""
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ClassifierSpec:
    n: int
    t: int
    p: int = 1
    delta: float = 0.0

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"n must be even and positive, got {self.n}")
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if not 0 <= self.p < self.n:
            raise ValueError(f"site p = {self.p} out of range for n = {self.n}")
        if not 0.0 <= self.delta < 0.5:
            raise ValueError("delta must lie in [0, 1/2)")


@dataclass
class FitnessReport:
    fitness: float
    total: int
    wrong_count: int
    half_error_count: int
    misclassified: list[str] = field(default_factory=list)

    @property
    def correct_count(self) -> int:
        return self.total - self.wrong_count - self.half_error_count

    @property
    def perfect(self) -> bool:
        return self.wrong_count == 0 and self.half_error_count == 0


def majority(b) -> int:
    bits = sv.as_bits(b)
    s, n = sum(bits), len(bits)
    return (2 * s > n) - (2 * s < n)


def enumerate_valid(n: int) -> np.ndarray:
    """Basis labels of all configurations with density != 1/2, ascending."""
    if n <= 0 or n % 2:
        raise ValueError(f"n must be even and positive, got {n}")
    if n > MAX_ENUMERATE_N:
        raise ValueError(f"n = {n} exceeds the enumeration cap {MAX_ENUMERATE_N}")
    labels = np.arange(1 << n, dtype=np.int64)
    return labels[popcount(labels) * 2 != n]


def popcount(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros(labels.shape, dtype=np.int64)
    x = labels.copy()
    while np.any(x):
        out += x & 1
        x >>= 1
    return out


def guess_from_probability(pr, delta: float = 0.0):
    """Map excitation probabilities to labels in ``{-1, 0, +1}``."""
    pr = np.asarray(pr, dtype=np.float64)
    if delta == 0.0:
        hi, lo = pr > 0.5 + TIE_TOL, pr < 0.5 - TIE_TOL
    else:
        hi, lo = pr >= 0.5 + delta, pr <= 0.5 - delta
    g = np.where(hi, 1, np.where(lo, -1, 0))
    return int(g) if g.ndim == 0 else g


def site_probabilities(rule: PUQCARule, n: int, t: int, p: int,
                       configs: np.ndarray | None = None, *, method: str = "sector",
                       odd_first: bool = False, workers: int | None = None) -> np.ndarray:
    """Excitation probability at site ``p`` after ``t`` steps for each input label."""
    configs = enumerate_valid(n) if configs is None else np.asarray(configs, dtype=np.int64)
    if method == "dense":
        return sv.dense_site_probabilities(rule, configs, n, t, p, odd_first=odd_first)
    if method != "sector":
        raise ValueError(f"unknown method {method!r}")
    weights = popcount(configs)
    out = np.empty(len(configs), dtype=np.float64)
    present = sorted(set(weights.tolist()))

    def one(k):
        sel = configs[weights == k]
        if len(np.unique(sel)) < comb(n, k):
            # a strict subset of the sector: evolve just those inputs
            return k, sv.sector_column_probabilities(rule, n, k, sel, t, p, odd_first=odd_first)
        probs = sv.sector_site_probabilities(rule, n, k, t, p, odd_first=odd_first)
        return k, probs[np.searchsorted(sv.sector_states(n, k), sel)]

    nworkers = min(workers or worker_count(), len(present)) or 1
    # big sectors first so the pool stays busy
    order = sorted(present, key=lambda k: -comb(n, k))
    if nworkers == 1:
        results = map(one, order)
    else:
        pool = ThreadPoolExecutor(nworkers)
        results = pool.map(one, order)
    try:
        for k, probs in results:
            out[weights == k] = probs
    finally:
        if nworkers > 1:
            pool.shutdown()
    return out


def report_from_probabilities(configs: np.ndarray, probs: np.ndarray, n: int,
                              delta: float = 0.0,
                              cap: int = DEFAULT_MISCLASSIFIED_CAP) -> FitnessReport:
    configs = np.asarray(configs, dtype=np.int64)
    if len(configs) == 0:
        raise ValueError("configuration set is empty")
    w = popcount(configs)
    if np.any(2 * w == n):
        raise ValueError("configuration set contains half-density strings")
    maj = np.where(2 * w > n, 1, -1)
    g = guess_from_probability(probs, delta)
    err = np.abs(g - maj)
    wrong = int(np.sum(err == 2))
    half = int(np.sum(err == 1))
    bad = configs[err > 0][:cap]
    total = len(configs)
    fit = 1.0 - (2 * wrong + half) / (2.0 * total)
    return FitnessReport(fit, total, wrong, half,
                         [sv.bits_to_str(sv.index_bits(int(c), n)) for c in bad])


def guess(rule: PUQCARule, b, spec: ClassifierSpec) -> int:
    bits = sv.as_bits(b)
    if len(bits) != spec.n:
        raise ValueError("configuration length does not match spec.n")
    if isinstance(rule, FermionRule):
        from . import fermion
        pr = fermion.site_probabilities(rule, spec.n, spec.t, spec.p,
                                        np.array([sv.config_index(bits)]))[0]
    else:
        pr = sv.sector_evolve(bits, rule, spec.t).excitation_probability(spec.p)
    return guess_from_probability(pr, spec.delta)


def fitness(rule: PUQCARule | FermionRule, spec: ClassifierSpec,
            configs: np.ndarray | None = None, *, method: str = "sector",
            cap: int = DEFAULT_MISCLASSIFIED_CAP, **kw) -> FitnessReport:
    """Exact fitness ``1 - sum |g - maj| / (2 |B|)`` over ``configs`` (default: all valid)."""
    configs = enumerate_valid(spec.n) if configs is None else np.asarray(configs, dtype=np.int64)
    if len(configs) == 0:
        raise ValueError("configuration set is empty")
    if isinstance(rule, FermionRule):
        from . import fermion
        probs = fermion.site_probabilities(rule, spec.n, spec.t, spec.p, configs, **kw)
    else:
        probs = site_probabilities(rule, spec.n, spec.t, spec.p, configs,
                                   method=method, **kw)
    return report_from_probabilities(configs, probs, spec.n, spec.delta, cap)


def classical_wrong_count(n: int) -> int:
    if n <= 0 or n % 2:
        raise ValueError(f"n must be even and positive, got {n}")
    return 2 ** (n - 1) - 2 * comb(n - 1, n // 2 - 1)


def classical_bound(n: int) -> float:
    """Fitness of any permutation rule read out at one site: ``1 - W / T``."""
    total = 2 ** n - comb(n, n // 2)
    return 1.0 - classical_wrong_count(n) / total


@dataclass(frozen=True)
class SampledFitness:
    estimate: float
    half_width: float
    sample_size: int


def sampled_fitness(rule, spec: ClassifierSpec, sample_size: int, seed: int = 0, *,
                    exhaustive: bool = False, z: float = 1.96) -> SampledFitness:
    """Fitness over configurations drawn uniformly with replacement from the valid set.

    ``half_width`` is the normal-approximation ``z * s / sqrt(N)``.
    """
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    valid = enumerate_valid(spec.n)
    if exhaustive:
        rep = fitness(rule, spec, valid)
        return SampledFitness(rep.fitness, 0.0, rep.total)
    rng = np.random.default_rng(seed)
    drawn = valid[rng.integers(0, len(valid), size=sample_size)]
    uniq, inverse = np.unique(drawn, return_inverse=True)
    if isinstance(rule, FermionRule):
        from . import fermion
        probs = fermion.site_probabilities(rule, spec.n, spec.t, spec.p, uniq)
    else:
        probs = site_probabilities(rule, spec.n, spec.t, spec.p, uniq)
    maj = np.where(2 * popcount(uniq) > spec.n, 1, -1)
    score = 1.0 - np.abs(guess_from_probability(probs, spec.delta) - maj) / 2.0
    s = score[inverse]
    sd = float(s.std(ddof=1)) if sample_size > 1 else 0.0
    return SampledFitness(float(s.mean()), z * sd / math.sqrt(sample_size), sample_size)
