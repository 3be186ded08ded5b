"""Exact simulation of the PUQCA brick-wall evolution on a periodic ring.

Configurations are bit strings ``b_0 ... b_{n-1}``; basis index
``l = sum_k b_k 2^(n-1-k)`` (``b_0`` is the most significant bit).  State
arrays may be 1-D (one state) or 2-D with one state per column; every update
acts on rows, so columns evolve independently.

Two equivalent back ends are provided: the full ``2^n`` space and the
fixed-Hamming-weight sector of dimension ``C(n, k)``.  Gates are applied in
place over amplitude pairs; no ``2^n x 2^n`` matrix is ever formed.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from . import kernels
from .model import PUQCARule

MAX_QUBITS = 24
MAX_SECTOR_DIM = 20000


def as_bits(b) -> tuple[int, ...]:
    """Normalise a configuration given as a string, sequence or array."""
    if isinstance(b, str):
        bits = tuple(int(c) for c in b.strip())
    else:
        bits = tuple(int(x) for x in b)
    if any(x not in (0, 1) for x in bits):
        raise ValueError(f"configuration must be binary: {b!r}")
    return bits


def bits_to_str(bits) -> str:
    return "".join(str(int(x)) for x in bits)


def config_index(b) -> int:
    bits = as_bits(b)
    idx = 0
    for x in bits:
        idx = (idx << 1) | x
    return idx


def index_bits(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - k)) & 1 for k in range(n))


def _check_n(n: int) -> None:
    if n <= 0 or n % 2:
        raise ValueError(f"lattice size must be even and positive, got {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"n = {n} exceeds the dense cap of {MAX_QUBITS}")


def num_qubits(psi: np.ndarray) -> int:
    dim = psi.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise ValueError(f"state dimension {dim} is not a power of two")
    return n


def tiles(n: int, layer: int) -> list[tuple[int, int]]:
    """Tiles ``(i, i+1 mod n)`` of the even (``layer=0``) or odd layer."""
    return [(i, (i + 1) % n) for i in range(layer, n, 2)]


# --------------------------------------------------------------------------
# index plans


@dataclass(frozen=True)
class _Plan:
    states: np.ndarray           # sorted basis labels covered by this plan
    pairs: tuple                 # per tile: (rows01, rows10, rows11)


def _build_plan(n: int, states: np.ndarray) -> _Plan:
    pairs = []
    for a, b in tiles(n, 0) + tiles(n, 1):
        ma, mb = 1 << (n - 1 - a), 1 << (n - 1 - b)
        has_a = (states & ma) != 0
        has_b = (states & mb) != 0
        r01 = np.flatnonzero(~has_a & has_b).astype(np.int64)
        r10 = np.searchsorted(states, states[r01] ^ (ma | mb)).astype(np.int64)
        r11 = np.flatnonzero(has_a & has_b).astype(np.int64)
        pairs.append((r01, r10, r11))
    return _Plan(states, tuple(pairs))


@functools.lru_cache(maxsize=16)
def _full_plan(n: int) -> _Plan:
    return _build_plan(n, np.arange(1 << n, dtype=np.int64))


@functools.lru_cache(maxsize=64)
def sector_states(n: int, k: int) -> np.ndarray:
    """Basis labels of weight ``k`` in ascending (lexicographic) order."""
    if not 0 <= k <= n:
        raise ValueError(f"weight {k} out of range for n = {n}")
    if comb(n, k) > MAX_SECTOR_DIM:
        raise ValueError(f"sector C({n},{k}) exceeds cap {MAX_SECTOR_DIM}")
    labels = [sum(1 << (n - 1 - i) for i in c)
              for c in itertools.combinations(range(n), k)]
    out = np.array(sorted(labels), dtype=np.int64)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=64)
def _sector_plan(n: int, k: int) -> _Plan:
    return _build_plan(n, sector_states(n, k))


def _apply_step(m: np.ndarray, plan: _Plan, n: int, w0: np.ndarray,
                w1: np.ndarray, odd_first: bool = False) -> None:
    half = n // 2
    layers = [(w0, plan.pairs[:half]), (w1, plan.pairs[half:])]
    if odd_first:
        layers.reverse()
    for w, tile_pairs in layers:
        u00, u01, u10, u11 = w[1, 1], w[1, 2], w[2, 1], w[2, 2]
        phase = w[3, 3]
        for r01, r10, r11 in tile_pairs:
            kernels.apply_pairs(m, r01, r10, u00, u01, u10, u11)
            if phase != 1.0:
                kernels.scale_rows(m, r11, phase)


def _as_matrix(psi: np.ndarray) -> tuple[np.ndarray, bool]:
    m = np.array(psi, dtype=np.complex128, order="C", copy=True)
    if m.ndim == 1:
        return m.reshape(-1, 1), True
    if m.ndim != 2:
        raise ValueError("state array must be 1-D or 2-D")
    return m, False


# --------------------------------------------------------------------------
# full-space operations


def basis_state(b) -> np.ndarray:
    bits = as_bits(b)
    _check_n(len(bits))
    psi = np.zeros(1 << len(bits), dtype=np.complex128)
    psi[config_index(bits)] = 1.0
    return psi


def step(psi: np.ndarray, rule: PUQCARule, *, odd_first: bool = False) -> np.ndarray:
    """One application of the evolution: even tiles with ``w0`` then odd tiles with ``w1``."""
    return evolve_state(psi, rule, 1, odd_first=odd_first)


def evolve_state(psi: np.ndarray, rule: PUQCARule, t: int, *,
                 odd_first: bool = False) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be non-negative")
    n = num_qubits(np.asarray(psi))
    _check_n(n)
    m, flat = _as_matrix(psi)
    plan = _full_plan(n)
    w0, w1 = rule.matrices()
    for _ in range(t):
        _apply_step(m, plan, n, w0, w1, odd_first)
    return m[:, 0] if flat else m


def evolve(b, rule: PUQCARule, t: int, *, odd_first: bool = False) -> np.ndarray:
    """``E^t |b>`` in the full ``2^n`` space."""
    return evolve_state(basis_state(b), rule, t, odd_first=odd_first)


def excitation_probability(psi: np.ndarray, p: int) -> float | np.ndarray:
    """Probability of finding site ``p`` excited (per column for 2-D input)."""
    psi = np.asarray(psi)
    n = num_qubits(psi)
    if not 0 <= p < n:
        raise IndexError(f"site {p} out of range for n = {n}")
    mask = ((np.arange(1 << n) >> (n - 1 - p)) & 1).astype(bool)
    pr = np.sum(np.abs(psi[mask]) ** 2, axis=0)
    return float(pr) if psi.ndim == 1 else pr


def marginal_profile(psi: np.ndarray) -> np.ndarray:
    """Excitation probability at every site (shape ``(n,)`` or ``(n, cols)``)."""
    psi = np.asarray(psi)
    n = num_qubits(psi)
    labels = np.arange(1 << n)
    weights = np.abs(psi) ** 2
    return np.array([weights[((labels >> (n - 1 - p)) & 1).astype(bool)].sum(axis=0)
                     for p in range(n)])


def translate_bits(b, m: int) -> tuple[int, ...]:
    """``T^m`` on a configuration: the bit at position ``k`` moves to ``k - m``."""
    bits = as_bits(b)
    n = len(bits)
    return tuple(bits[(k + m) % n] for k in range(n))


def translate(psi: np.ndarray, m: int) -> np.ndarray:
    """``T^m`` with ``T|b_0 b_1 ... b_{n-1}> = |b_1 ... b_{n-1} b_0>``.

    ``T^m`` is a left rotation of the bit string by ``m``; a right rotation by
    two sites (``10110000 -> 00101100``) is ``m = -2``.
    """
    psi = np.asarray(psi)
    n = num_qubits(psi)
    m %= n
    labels = np.arange(1 << n)
    full = (1 << n) - 1
    rotated = ((labels << m) | (labels >> (n - m))) & full if m else labels
    out = np.zeros_like(psi)
    out[rotated] = psi
    return out


# --------------------------------------------------------------------------
# weight-sector fast path


@dataclass(frozen=True)
class SectorState:
    """Amplitudes restricted to the Hamming-weight-``k`` sector."""

    n: int
    k: int
    amplitudes: np.ndarray

    def to_statevector(self) -> np.ndarray:
        psi = np.zeros(1 << self.n, dtype=np.complex128)
        psi[sector_states(self.n, self.k)] = self.amplitudes
        return psi

    @classmethod
    def from_statevector(cls, psi: np.ndarray, k: int) -> "SectorState":
        n = num_qubits(psi)
        return cls(n, k, np.asarray(psi)[sector_states(n, k)].copy())

    def excitation_probability(self, p: int) -> float:
        on = ((sector_states(self.n, self.k) >> (self.n - 1 - p)) & 1).astype(bool)
        return float(np.sum(np.abs(self.amplitudes[on]) ** 2))


def sector_basis_state(b) -> SectorState:
    bits = as_bits(b)
    n, k = len(bits), sum(bits)
    _check_n(n)
    states = sector_states(n, k)
    amps = np.zeros(len(states), dtype=np.complex128)
    amps[np.searchsorted(states, config_index(bits))] = 1.0
    return SectorState(n, k, amps)


def sector_evolve(b, rule: PUQCARule, t: int, *, odd_first: bool = False) -> SectorState:
    s = sector_basis_state(b)
    m = s.amplitudes.reshape(-1, 1).copy()
    plan = _sector_plan(s.n, s.k)
    w0, w1 = rule.matrices()
    for _ in range(t):
        _apply_step(m, plan, s.n, w0, w1, odd_first)
    return SectorState(s.n, s.k, m[:, 0])


def sector_propagator(rule: PUQCARule, n: int, k: int, t: int, *,
                      odd_first: bool = False) -> np.ndarray:
    """``E^t`` restricted to weight ``k``; column ``j`` is the image of state ``j``."""
    _check_n(n)
    if t < 0:
        raise ValueError("t must be non-negative")
    plan = _sector_plan(n, k)
    m = np.eye(len(plan.states), dtype=np.complex128)
    w0, w1 = rule.matrices()
    for _ in range(t):
        _apply_step(m, plan, n, w0, w1, odd_first)
    return m


def sector_site_probabilities(rule: PUQCARule, n: int, k: int, t: int, p: int, *,
                              odd_first: bool = False) -> np.ndarray:
    """Excitation probability at site ``p`` for every weight-``k`` input, in sector order."""
    if not 0 <= p < n:
        raise IndexError(f"site {p} out of range for n = {n}")
    m = sector_propagator(rule, n, k, t, odd_first=odd_first)
    states = sector_states(n, k)
    rows = np.flatnonzero((states >> (n - 1 - p)) & 1).astype(np.int64)
    out = np.empty(m.shape[1], dtype=np.float64)
    kernels.row_weights(m, rows, out)
    return out


def sector_column_probabilities(rule: PUQCARule, n: int, k: int, labels, t: int, p: int, *,
                                odd_first: bool = False, batch: int = 512) -> np.ndarray:
    """Site-``p`` probabilities for selected weight-``k`` inputs only.

    Cheaper than :func:`sector_site_probabilities` when ``labels`` is a small
    part of the sector, since only those columns are evolved.
    """
    _check_n(n)
    if not 0 <= p < n:
        raise IndexError(f"site {p} out of range for n = {n}")
    plan = _sector_plan(n, k)
    labels = np.asarray(labels, dtype=np.int64)
    cols = np.searchsorted(plan.states, labels)
    if np.any(cols >= len(plan.states)) or np.any(plan.states[np.minimum(cols, len(plan.states) - 1)] != labels):
        raise ValueError(f"labels are not all of Hamming weight {k}")
    w0, w1 = rule.matrices()
    rows = np.flatnonzero((plan.states >> (n - 1 - p)) & 1).astype(np.int64)
    out = np.empty(len(labels), dtype=np.float64)
    for lo in range(0, len(labels), batch):
        chunk = cols[lo:lo + batch]
        m = np.zeros((len(plan.states), len(chunk)), dtype=np.complex128)
        m[chunk, np.arange(len(chunk))] = 1.0
        for _ in range(t):
            _apply_step(m, plan, n, w0, w1, odd_first)
        kernels.row_weights(m, rows, out[lo:lo + len(chunk)])
    return out


def dense_site_probabilities(rule: PUQCARule, configs: np.ndarray, n: int, t: int,
                             p: int, *, odd_first: bool = False,
                             batch: int = 256) -> np.ndarray:
    """Same as the sector path but evolving columns in the full ``2^n`` space."""
    _check_n(n)
    configs = np.asarray(configs, dtype=np.int64)
    plan = _full_plan(n)
    w0, w1 = rule.matrices()
    rows = np.flatnonzero((plan.states >> (n - 1 - p)) & 1).astype(np.int64)
    out = np.empty(len(configs), dtype=np.float64)
    for lo in range(0, len(configs), batch):
        chunk = configs[lo:lo + batch]
        m = np.zeros((1 << n, len(chunk)), dtype=np.complex128)
        m[chunk, np.arange(len(chunk))] = 1.0
        for _ in range(t):
            _apply_step(m, plan, n, w0, w1, odd_first)
        kernels.row_weights(m, rows, out[lo:lo + len(chunk)])
    return out
