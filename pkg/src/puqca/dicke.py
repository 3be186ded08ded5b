"""Dicke states and a block unitary that classifies density at any single site.

Weight-``i`` basis states are enumerated in lexicographic order of their bit
strings (ascending basis index), which fixes the permutation index ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import dct
from . import statevector as sv

MAX_BLOCK_DIM = 5000
MAX_VERIFY_N = 10


def dicke_state(n: int, i: int) -> np.ndarray:
    if not 0 <= i <= n:
        raise ValueError(f"excitation count {i} out of range for n = {n}")
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[sv.sector_states(n, i)] = 1.0 / np.sqrt(comb(n, i))
    return psi


def dicke_marginal(n: int, i: int, p: int) -> float:
    if not 0 <= p < n:
        raise IndexError(f"site {p} out of range for n = {n}")
    return i / n


def _phases(n: int, i: int, k: int) -> np.ndarray:
    d = comb(n, i)
    if not 0 <= k < d:
        raise ValueError(f"phase index {k} out of range [0, {d})")
    return np.exp(2j * np.pi * k * np.arange(d) / d)


def generalized_dicke(n: int, i: int, k: int) -> np.ndarray:
    """Dicke state with amplitude ``e^{2 pi i k j / C(n,i)} / sqrt(C(n,i))`` on state ``j``."""
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[sv.sector_states(n, i)] = _phases(n, i, k) / np.sqrt(comb(n, i))
    return psi


def block_unitary(n: int, i: int) -> np.ndarray:
    """Sector matrix whose column ``k`` is ``generalized_dicke(n, i, k)`` restricted to weight ``i``."""
    d = comb(n, i)
    if d > MAX_BLOCK_DIM:
        raise ValueError(f"block dimension C({n},{i}) = {d} exceeds cap {MAX_BLOCK_DIM}")
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def dicke_fidelity(psi: np.ndarray, n: int, i: int) -> float:
    """``|<D_n^i|psi>|^2``; a probe only."""
    return float(abs(np.vdot(dicke_state(n, i), psi)) ** 2)


@dataclass
class ExistenceReport:
    n: int
    unitarity_error: float
    leaks_weight: bool
    checked_inputs: int
    violations: list[tuple[str, int, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.unitarity_error < 1e-10 and not self.leaks_weight and not self.violations


def verify_existence(n: int) -> ExistenceReport:
    """Apply ``U = (+)_i U^(i)`` to every valid input and check every site's guess."""
    if n <= 2 or n % 2:
        raise ValueError("n must be even and > 2")
    if n > MAX_VERIFY_N:
        raise ValueError(f"n = {n} exceeds the dense check cap {MAX_VERIFY_N}")
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(n + 1):
        idx = sv.sector_states(n, i)
        u[np.ix_(idx, idx)] = block_unitary(n, i)
    err = float(np.abs(u.conj().T @ u - np.eye(dim)).max())
    weights = dct.popcount(np.arange(dim))
    leaks = bool(np.any(np.abs(u[weights[:, None] != weights[None, :]]) > 1e-14))
    valid = dct.enumerate_valid(n)
    prof = sv.marginal_profile(u[:, valid])                 # (n, inputs)
    violations = []
    for col, label in enumerate(valid):
        maj = 1 if 2 * weights[label] > n else -1
        for p in range(n):
            if dct.guess_from_probability(prof[p, col]) != maj:
                violations.append((sv.bits_to_str(sv.index_bits(int(label), n)), p,
                                   float(prof[p, col])))
    return ExistenceReport(n, err, leaks, len(valid), violations)
