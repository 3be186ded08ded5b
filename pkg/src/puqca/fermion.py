"""Free-fermion fast path for rules whose gates have ``alpha = phi = 0``.

Such gates act on ``{|01>, |10>}`` as an SU(2) block ``[[a, b], [-b*, a*]]``.
Through the Jordan-Wigner map the brick wall becomes a single-particle
propagator ``A = A_o A_e`` on ``n`` modes, block-diagonalised by a Fourier
transform over the ``n/2`` cells into 2x2 momentum blocks ``M(k)``.  Site
occupations after ``t`` steps are ``sum_{c in S} |(A^t)_{j c}|^2``.

Boundary conditions
-------------------
``"periodic"``
    ``A_o`` uses the plain cyclic shift for every particle number.  This is
    the closed-form momentum expression as usually written.
``"parity"``
    The wrap-around bond carries the Jordan-Wigner string sign
    ``(-1)^(N-1)`` for ``N`` particles (antiperiodic momenta for even ``N``).
    This reproduces the qubit simulator exactly.

The two agree for odd particle number.
"""

from __future__ import annotations

import math

import numpy as np

from . import dct
from . import statevector as sv
from .model import FermionRule, GateParams, NotSimulableError, PUQCARule, TWO_PI

BOUNDARIES = ("periodic", "parity")


# --------------------------------------------------------------------------
# gates from local Hamiltonians


def hamiltonian_matrix(J: float, theta: float, h1: float, h2: float) -> np.ndarray:
    """Two-site hopping-plus-field Hamiltonian in the ``|00>,|01>,|10>,|11>`` basis."""
    h = np.zeros((4, 4), dtype=np.complex128)
    h[0, 0] = h1 + h2
    h[1, 1] = h1 - h2
    h[2, 2] = h2 - h1
    h[3, 3] = -h1 - h2
    h[1, 2] = J * np.exp(1j * theta)
    h[2, 1] = J * np.exp(-1j * theta)
    return h


def _beta(J: float, dh: float) -> tuple[float, float]:
    r = math.hypot(dh, J)
    if r == 0.0:
        return 1.0, 0.0
    # tan(beta) = J / dh, quadrant fixed by atan2; dh = 0 gives sin(beta) = sign(J)
    return dh / r, J / r


def block_from_hamiltonian(J, theta, h1, h2, tau) -> tuple[complex, complex]:
    """``(a, b)`` of the SU(2) block of ``exp(-i h tau)``."""
    omega = tau * math.hypot(h1 - h2, J)
    cb, sb = _beta(J, h1 - h2)
    a = complex(math.cos(omega), -cb * math.sin(omega))
    b = -1j * np.exp(1j * theta) * sb * math.sin(omega)
    return a, complex(b)


def gate_from_hamiltonian(J: float, theta: float, h1: float, h2: float,
                          tau: float) -> np.ndarray:
    """Closed form of ``exp(-i h tau)``.

    With ``Omega = tau sqrt((h1-h2)^2 + J^2)``, ``tan(beta) = J/(h1-h2)`` and
    ``phi = (h1+h2) tau`` the middle block is
    ``[[cos O - i cos b sin O, -i e^{i theta} sin b sin O], [..., cos O + i cos b sin O]]``
    and the corners are ``e^{-i phi}`` on ``|00>`` and ``e^{+i phi}`` on ``|11>``.
    """
    a, b = block_from_hamiltonian(J, theta, h1, h2, tau)
    phi = (h1 + h2) * tau
    w = np.zeros((4, 4), dtype=np.complex128)
    w[0, 0] = np.exp(-1j * phi)
    w[3, 3] = np.exp(1j * phi)
    w[1, 1], w[1, 2] = a, b
    w[2, 1], w[2, 2] = -np.conj(b), np.conj(a)
    return w


def quadratic_propagator(h: np.ndarray, tau: float) -> np.ndarray:
    """``exp(-i h tau)`` for Hermitian ``h`` by eigendecomposition."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("h must be square")
    if not np.allclose(h, h.conj().T, rtol=0.0, atol=1e-12):
        raise ValueError("h is not Hermitian")
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * tau * evals)) @ evecs.conj().T


# --------------------------------------------------------------------------
# rule correspondence


def gate_to_block(g: GateParams) -> tuple[complex, complex]:
    """``(a, b) = (e^{i xi} cos theta, e^{i gamma} sin theta)`` for a simulable gate."""
    if not (min(g.alpha, TWO_PI - g.alpha) <= 1e-12 and min(g.phi, TWO_PI - g.phi) <= 1e-12):
        raise NotSimulableError(
            f"gate is not classically simulable (alpha={g.alpha:.6g}, phi={g.phi:.6g})")
    return (complex(np.exp(1j * g.xi) * math.cos(g.theta)),
            complex(np.exp(1j * g.gamma) * math.sin(g.theta)))


def block_to_gate(a: complex, b: complex) -> GateParams:
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
        raise ValueError("|a|^2 + |b|^2 must equal 1")
    theta = math.atan2(abs(b), abs(a))
    xi = float(np.angle(a)) if abs(a) > 0 else 0.0
    gamma = float(np.angle(b)) if abs(b) > 0 else 0.0
    return GateParams(theta=theta, gamma=gamma, xi=xi)


def fermion_rule_from_puqca(rule: PUQCARule) -> FermionRule:
    """The six-angle rule of an ``alpha = phi = 0`` PUQCA rule."""
    for g in (rule.w0, rule.w1):
        gate_to_block(g)
    return FermionRule(rule.w0.theta, rule.w0.xi, rule.w0.gamma,
                       rule.w1.theta, rule.w1.xi, rule.w1.gamma)


def as_fermion_rule(rule) -> FermionRule:
    if isinstance(rule, FermionRule):
        return rule
    if isinstance(rule, PUQCARule):
        return fermion_rule_from_puqca(rule)
    raise TypeError(f"not a rule: {type(rule).__name__}")


# --------------------------------------------------------------------------
# single-particle propagators


def _su2(a: complex, b: complex) -> np.ndarray:
    return np.array([[a, b], [-np.conj(b), np.conj(a)]], dtype=np.complex128)


def shift_matrix(n: int, twist: complex = 1.0) -> np.ndarray:
    """``X_n = sum_j |j><j+1 mod n|`` with the wrap entry multiplied by ``twist``."""
    x = np.zeros((n, n), dtype=np.complex128)
    x[np.arange(n - 1), np.arange(1, n)] = 1.0
    x[n - 1, 0] = twist
    return x


def _check_n(n):
    if n < 2 or n % 2:
        raise ValueError(f"n must be even and >= 2, got {n}")


def layers(fr: FermionRule, n: int, twist: complex = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """``(A_e, A_o)``: even-pair blocks and the shifted odd-pair blocks."""
    _check_n(n)
    (a1, b1), (a2, b2) = fr.blocks()
    eye = np.eye(n // 2)
    a_e = np.kron(eye, _su2(a1, b1))
    x = shift_matrix(n, twist)
    a_o = x @ np.kron(eye, _su2(a2, b2)) @ x.conj().T
    return a_e, a_o


def step_propagator(fr: FermionRule, n: int, twist: complex = 1.0) -> np.ndarray:
    a_e, a_o = layers(fr, n, twist)
    return a_o @ a_e


def momentum_blocks(fr: FermionRule, n: int, shift: float = 0.0) -> np.ndarray:
    """Array of shape ``(n/2, 2, 2)`` with ``M(k)`` at momenta ``k + shift``.

    ``shift = 0`` for the periodic ring, ``1/2`` for the antiperiodic one.
    """
    _check_n(n)
    (a1, b1), (a2, b2) = fr.blocks()
    k = np.arange(n // 2) + shift
    e = np.exp(4j * np.pi * k / n)
    ec = np.conj(e)
    m = np.empty((n // 2, 2, 2), dtype=np.complex128)
    m[:, 0, 0] = np.conj(a2) * a1 + np.conj(b2) * np.conj(b1) * ec
    m[:, 0, 1] = np.conj(a2) * b1 - np.conj(b2) * np.conj(a1) * ec
    m[:, 1, 0] = a1 * b2 * e - a2 * np.conj(b1)
    m[:, 1, 1] = b2 * b1 * e + a2 * np.conj(a1)
    return m


def fourier_matrix(m: int, shift: float = 0.0) -> np.ndarray:
    """``F[j, k] = exp(2 pi i j (k + shift) / m) / sqrt(m)``."""
    j = np.arange(m)[:, None]
    k = np.arange(m)[None, :] + shift
    return np.exp(2j * np.pi * j * k / m) / math.sqrt(m)


def reconstruct_propagator(blocks: np.ndarray, shift: float = 0.0) -> np.ndarray:
    """``(F (x) I2) (sum_k |k><k| (x) M(k)) (F^dag (x) I2)``."""
    m = blocks.shape[0]
    f = np.kron(fourier_matrix(m, shift), np.eye(2))
    diag = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    for k in range(m):
        diag[2 * k:2 * k + 2, 2 * k:2 * k + 2] = blocks[k]
    return f @ diag @ f.conj().T


def block_powers(blocks: np.ndarray, t: int) -> np.ndarray:
    """``M(k)^t`` for each block via eigendecomposition."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return np.broadcast_to(np.eye(2, dtype=np.complex128), blocks.shape).copy()
    evals, evecs = np.linalg.eig(blocks)
    inv = np.linalg.inv(evecs)
    out = np.einsum("kij,kj,kjl->kil", evecs, evals ** t, inv)
    # unitary blocks are normal, so eigenvectors are well conditioned; guard anyway
    cond = np.linalg.norm(evecs, axis=(1, 2)) * np.linalg.norm(inv, axis=(1, 2))
    for k in np.flatnonzero(cond > 1e6):
        out[k] = np.linalg.matrix_power(blocks[k], t)
    return out


def _shift_for(boundary: str, particles: int) -> float:
    if boundary == "periodic":
        return 0.0
    if boundary == "parity":
        return 0.0 if particles % 2 else 0.5
    raise ValueError(f"boundary must be one of {BOUNDARIES}, got {boundary!r}")


# --------------------------------------------------------------------------
# occupations


def occupation_probability(fr, n: int, t: int, occupied, site, *,
                           boundary: str = "periodic") -> float:
    """Occupation of mode ``site = (j_s, j_p)`` after ``t`` steps.

    ``occupied`` is an iterable of ``(c_s, c_p)`` labels (cell, sub-cell).
    Evaluated as the double momentum sum
    ``(4/n^2) sum_{k,k'} sum_{c} e^{-4 pi i (k-k')(c_s - j_s)/n}
    <j_p|M(k)^t|c_p><c_p|M(k')^{dag t}|j_p>``.
    """
    fr = as_fermion_rule(fr)
    _check_n(n)
    labels = [(int(cs), int(cp)) for cs, cp in occupied]
    if len(set(labels)) != len(labels):
        raise ValueError("occupied labels must be distinct")
    m = n // 2
    for cs, cp in labels + [tuple(site)]:
        if not (0 <= cs < m and cp in (0, 1)):
            raise ValueError(f"mode label {(cs, cp)} out of range for n = {n}")
    if not labels:
        return 0.0
    js, jp = site
    mt = block_powers(momentum_blocks(fr, n, _shift_for(boundary, len(labels))), t)
    k = np.arange(m)
    dk = k[:, None] - k[None, :]
    total = 0.0 + 0.0j
    for cs, cp in labels:
        phase = np.exp(-4j * np.pi * dk * (cs - js) / n)
        left = mt[:, jp, cp]
        right = np.conj(mt[:, jp, cp])
        total += np.sum(phase * left[:, None] * right[None, :])
    return float(total.real) * 4.0 / n ** 2


def _mode_weights(fr: FermionRule, n: int, t: int, j: int, shift: float) -> np.ndarray:
    """``|(A^t)_{j c}|^2`` for every mode ``c``, from the momentum blocks."""
    m = n // 2
    js, jp = divmod(j, 2)
    mt = block_powers(momentum_blocks(fr, n, shift), t)           # (k, 2, 2)
    k = np.arange(m)
    cs = np.arange(m)
    # amplitude to (c_s, c_p); the k-independent twist phase drops out of |.|^2
    phase = np.exp(2j * np.pi * np.outer(js - cs, k) / m) / m     # (c_s, k)
    amp = phase @ mt[:, jp, :]                                     # (c_s, c_p)
    return (np.abs(amp) ** 2).reshape(n)


def mode_weights_dense(fr: FermionRule, n: int, t: int, j: int,
                       twist: complex = 1.0) -> np.ndarray:
    u = np.linalg.matrix_power(step_propagator(fr, n, twist), t)
    return np.abs(u[j]) ** 2


def site_probabilities(fr, n: int, t: int, p: int, configs=None, *,
                       boundary: str = "periodic") -> np.ndarray:
    """Occupation of site ``p`` after ``t`` steps for each input label."""
    fr = as_fermion_rule(fr)
    _check_n(n)
    if not 0 <= p < n:
        raise IndexError(f"site {p} out of range for n = {n}")
    configs = dct.enumerate_valid(n) if configs is None else np.asarray(configs, dtype=np.int64)
    bits = ((configs[:, None] >> (n - 1 - np.arange(n))) & 1).astype(np.float64)
    weights = bits.sum(axis=1).astype(np.int64)
    out = np.empty(len(configs))
    for parity in (0, 1):
        sel = np.flatnonzero(weights % 2 == parity)
        if len(sel) == 0:
            continue
        q = _mode_weights(fr, n, t, p, _shift_for(boundary, 1 if parity else 2))
        out[sel] = bits[sel] @ q
    return out


def profile(fr, b, t: int, *, boundary: str = "periodic") -> np.ndarray:
    """Occupation of every site for input configuration ``b``."""
    fr = as_fermion_rule(fr)
    bits = np.array(sv.as_bits(b), dtype=np.float64)
    n = len(bits)
    _check_n(n)
    shift = _shift_for(boundary, max(int(bits.sum()), 1))
    return np.array([_mode_weights(fr, n, t, j, shift) @ bits for j in range(n)])


def fermion_fitness(fr, spec: dct.ClassifierSpec, configs=None, *,
                    boundary: str = "periodic", cap: int = dct.DEFAULT_MISCLASSIFIED_CAP):
    configs = dct.enumerate_valid(spec.n) if configs is None else np.asarray(configs, dtype=np.int64)
    probs = site_probabilities(fr, spec.n, spec.t, spec.p, configs, boundary=boundary)
    return dct.report_from_probabilities(configs, probs, spec.n, spec.delta, cap)


def crosscheck(n: int, t: int, trials: int, seed: int = 0, rule=None,
               random_inputs: int = 20) -> float:
    """Largest site-marginal gap between this evaluator and the qubit simulator.

    Inputs are every weight-1 and weight-2 configuration plus ``random_inputs``
    uniformly drawn ones per rule.  Rules are drawn uniformly unless ``rule``
    is given, in which case only that rule is checked.
    """
    rng = np.random.default_rng(seed)
    fixed = [tuple(int(i == a) for i in range(n)) for a in range(n)]
    fixed += [tuple(int(i in (a, b)) for i in range(n))
              for a in range(n) for b in range(a + 1, n)]
    rules = ([as_fermion_rule(rule)] if rule is not None else
             [FermionRule.from_genes(rng.uniform(0.0, TWO_PI, 6)) for _ in range(trials)])
    worst = 0.0
    for fr in rules:
        full = fr.to_puqca()
        drawn = [tuple(int(x) for x in rng.integers(0, 2, n)) for _ in range(random_inputs)]
        for bits in fixed + drawn:
            a = profile(fr, bits, t, boundary="parity")
            b = sv.marginal_profile(sv.evolve(bits, full, t))
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst
