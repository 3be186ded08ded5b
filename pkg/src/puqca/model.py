"""Rule parameters and the gate-parametrisation-to-matrix map.

Every two-qubit gate in a PUQCA conserves the number of excitations, so it is
the identity on ``|00>``, a phase ``e^{i phi}`` on ``|11>`` and a U(2) block on
the single-excitation subspace ``{|01>, |10>}``.  Basis order is
``|00>, |01>, |10>, |11>`` with the left qubit being the lower lattice index.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from typing import Any

import numpy as np

TWO_PI = 2.0 * math.pi
SCHEMA_VERSION = 1


class RuleFormatError(ValueError):
    """Raised when a rule record cannot be parsed."""


class NotSimulableError(ValueError):
    """Raised when a gate lies outside the free-fermion (alpha = phi = 0) regime."""


def wrap_angle(x: float) -> float:
    """Map an angle into ``[0, 2 pi)``."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"angle must be finite, got {x!r}")
    y = math.fmod(x, TWO_PI)
    if y < 0.0:
        y += TWO_PI
    # fmod of a value just below 0 can round up to exactly 2 pi
    if y >= TWO_PI:
        y = 0.0
    return y


def _canonical(obj, names):
    for name in names:
        object.__setattr__(obj, name, wrap_angle(getattr(obj, name)))


@dataclass(frozen=True)
class GateParams:
    """Angles of one number-conserving two-qubit gate."""

    theta: float = 0.0
    alpha: float = 0.0
    gamma: float = 0.0
    xi: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        _canonical(self, ("theta", "alpha", "gamma", "xi", "phi"))

    def matrix(self) -> np.ndarray:
        return gate_matrix(self)


@dataclass(frozen=True)
class PUQCARule:
    """One time step: ``w0`` on even tiles, then ``w1`` on odd tiles."""

    w0: GateParams = field(default_factory=GateParams)
    w1: GateParams = field(default_factory=GateParams)

    @classmethod
    def from_genes(cls, genes) -> "PUQCARule":
        """Build from the 8-gene chromosome ``(theta, alpha, gamma, xi) x 2``."""
        g = [float(v) for v in genes]
        if len(g) != 8:
            raise ValueError(f"expected 8 genes, got {len(g)}")
        return cls(GateParams(*g[:4]), GateParams(*g[4:]))

    def genes(self) -> np.ndarray:
        return np.array(
            [self.w0.theta, self.w0.alpha, self.w0.gamma, self.w0.xi,
             self.w1.theta, self.w1.alpha, self.w1.gamma, self.w1.xi]
        )

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        return gate_matrix(self.w0), gate_matrix(self.w1)

    @property
    def is_simulable(self) -> bool:
        return all(_is_zero_angle(g.alpha) and _is_zero_angle(g.phi)
                   for g in (self.w0, self.w1))


IDENTITY_RULE = PUQCARule()


@dataclass(frozen=True)
class FermionRule:
    """Six angles of the simulable regime.

    The single-particle blocks are ``a_j = exp(i xi_j) cos(theta_j)`` and
    ``b_j = exp(i gamma_j) sin(theta_j)``, so ``|a_j|^2 + |b_j|^2 = 1``.
    """

    theta1: float = 0.0
    xi1: float = 0.0
    gamma1: float = 0.0
    theta2: float = 0.0
    xi2: float = 0.0
    gamma2: float = 0.0

    def __post_init__(self):
        _canonical(self, ("theta1", "xi1", "gamma1", "theta2", "xi2", "gamma2"))

    @classmethod
    def from_genes(cls, genes) -> "FermionRule":
        g = [float(v) for v in genes]
        if len(g) != 6:
            raise ValueError(f"expected 6 genes, got {len(g)}")
        return cls(*g)

    def genes(self) -> np.ndarray:
        return np.array([self.theta1, self.xi1, self.gamma1,
                         self.theta2, self.xi2, self.gamma2])

    def blocks(self) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
        """Return ``((a1, b1), (a2, b2))``."""
        return (_ab(self.theta1, self.xi1, self.gamma1),
                _ab(self.theta2, self.xi2, self.gamma2))

    def to_puqca(self) -> PUQCARule:
        """The full-regime rule with the same dynamics (alpha = phi = 0)."""
        return PUQCARule(
            GateParams(theta=self.theta1, gamma=self.gamma1, xi=self.xi1),
            GateParams(theta=self.theta2, gamma=self.gamma2, xi=self.xi2),
        )


def _ab(theta, xi, gamma):
    return (complex(np.exp(1j * xi) * math.cos(theta)),
            complex(np.exp(1j * gamma) * math.sin(theta)))


def _is_zero_angle(x: float, tol: float = 1e-12) -> bool:
    return min(x, TWO_PI - x) <= tol


def gate_matrix(g: GateParams) -> np.ndarray:
    """4x4 unitary of a number-conserving gate.

    The middle block is ``[[e^{i xi} cos, e^{i gamma} sin],
    [-e^{i(alpha-gamma)} sin, e^{i(alpha-xi)} cos]]`` with determinant
    ``e^{i alpha}``.
    """
    c, s = math.cos(g.theta), math.sin(g.theta)
    u = np.zeros((4, 4), dtype=np.complex128)
    u[0, 0] = 1.0
    u[1, 1] = np.exp(1j * g.xi) * c
    u[1, 2] = np.exp(1j * g.gamma) * s
    u[2, 1] = -np.exp(1j * (g.alpha - g.gamma)) * s
    u[2, 2] = np.exp(1j * (g.alpha - g.xi)) * c
    u[3, 3] = np.exp(1j * g.phi)
    return u


# --------------------------------------------------------------------------
# rule records

_FULL_KEYS = tuple(f"{w}.{a}" for w in ("w0", "w1")
                   for a in ("theta", "alpha", "gamma", "xi", "phi"))
_FERMION_KEYS = tuple(f.name for f in fields(FermionRule))
_META_KEYS = ("label", "source")


def rule_to_record(rule: PUQCARule | FermionRule, label: str | None = None,
                   source: str | None = None) -> dict[str, Any]:
    """Flat dictionary form of a rule (the rule-file schema)."""
    if isinstance(rule, PUQCARule):
        angles = {f"{w}.{a}": getattr(getattr(rule, w), a)
                  for w in ("w0", "w1")
                  for a in ("theta", "alpha", "gamma", "xi", "phi")}
        kind = "full"
    elif isinstance(rule, FermionRule):
        angles = {k: getattr(rule, k) for k in _FERMION_KEYS}
        kind = "fermionic"
    else:
        raise TypeError(f"not a rule: {type(rule).__name__}")
    rec: dict[str, Any] = {"schema": SCHEMA_VERSION, "kind": kind, "angles": angles}
    if label is not None:
        rec["label"] = label
    if source is not None:
        rec["source"] = source
    return rec


def serialize_rule(rule: PUQCARule | FermionRule, label: str | None = None,
                   source: str | None = None) -> str:
    # repr of a float is shortest-round-trip, which json uses
    return json.dumps(rule_to_record(rule, label, source), indent=2, sort_keys=True) + "\n"


def record_to_rule(rec: dict[str, Any]) -> PUQCARule | FermionRule:
    if not isinstance(rec, dict):
        raise RuleFormatError("rule record must be an object")
    extra = set(rec) - {"schema", "kind", "angles", *_META_KEYS}
    if extra:
        raise RuleFormatError(f"unknown keys: {sorted(extra)}")
    if rec.get("schema") != SCHEMA_VERSION:
        raise RuleFormatError(f"unsupported schema {rec.get('schema')!r}")
    kind = rec.get("kind")
    if kind == "full":
        required, optional = _FULL_KEYS, {"w0.phi", "w1.phi"}
    elif kind == "fermionic":
        required, optional = _FERMION_KEYS, set()
    else:
        raise RuleFormatError(f"kind must be 'full' or 'fermionic', got {kind!r}")
    angles = rec.get("angles")
    if not isinstance(angles, dict):
        raise RuleFormatError("missing 'angles' object")
    unknown = set(angles) - set(required)
    if unknown:
        raise RuleFormatError(f"unknown angle keys: {sorted(unknown)}")
    missing = [k for k in required if k not in angles and k not in optional]
    if missing:
        raise RuleFormatError(f"missing angle keys: {missing}")
    vals = {}
    for k in required:
        v = angles.get(k, 0.0)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise RuleFormatError(f"{k}: expected a number, got {v!r}")
        if not math.isfinite(v):
            raise RuleFormatError(f"{k}: non-finite value")
        vals[k] = float(v)
    if kind == "fermionic":
        return FermionRule(**vals)
    return PUQCARule(*(GateParams(*(vals[f"{w}.{a}"] for a in
                                    ("theta", "alpha", "gamma", "xi", "phi")))
                       for w in ("w0", "w1")))


def parse_rule(text: str) -> PUQCARule | FermionRule:
    """Inverse of :func:`serialize_rule`."""
    try:
        rec = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise RuleFormatError(f"invalid JSON: {exc}") from None
    return record_to_rule(rec)


def _reject_constant(name):
    raise RuleFormatError(f"non-finite value {name}")
