import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puqca.model import (IDENTITY_RULE, TWO_PI, FermionRule, GateParams, PUQCARule,
                         RuleFormatError, gate_matrix, parse_rule, rule_to_record,
                         serialize_rule, wrap_angle)

angle = st.floats(-50.0, 50.0, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("x, expected", [
    (0.0, 0.0), (TWO_PI, 0.0), (-math.pi, math.pi), (3 * math.pi, math.pi), (-1e-18, 0.0),
])
def test_wrap_angle_known_values(x, expected):
    assert wrap_angle(x) == pytest.approx(expected, abs=1e-12)


@given(angle)
def test_wrap_angle_range_and_phase(x):
    y = wrap_angle(x)
    assert 0.0 <= y < TWO_PI
    assert abs(np.exp(1j * x) - np.exp(1j * y)) < 1e-9


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_wrap_angle_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        wrap_angle(bad)


def test_identity_gate_matrix():
    assert np.array_equal(gate_matrix(GateParams()), np.eye(4))


def test_gate_matrix_entries():
    g = GateParams(theta=0.3, alpha=1.1, gamma=0.7, xi=2.0, phi=0.4)
    u = gate_matrix(g)
    c, s = math.cos(0.3), math.sin(0.3)
    assert u[1, 1] == pytest.approx(np.exp(2.0j) * c)
    assert u[1, 2] == pytest.approx(np.exp(0.7j) * s)
    assert u[2, 1] == pytest.approx(-np.exp(1j * (1.1 - 0.7)) * s)
    assert u[2, 2] == pytest.approx(np.exp(1j * (1.1 - 2.0)) * c)
    assert u[3, 3] == pytest.approx(np.exp(0.4j))
    assert u[0, 0] == 1.0


@given(angle, angle, angle, angle, angle)
def test_gate_matrix_is_unitary_and_number_conserving(th, al, ga, xi, ph):
    u = gate_matrix(GateParams(th, al, ga, xi, ph))
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    # no amplitude moves between excitation numbers 0, 1, 2
    mask = np.ones((4, 4), bool)
    mask[0, 0] = mask[3, 3] = False
    mask[1:3, 1:3] = False
    assert np.all(u[mask] == 0)
    assert np.linalg.det(u[1:3, 1:3]) == pytest.approx(np.exp(1j * al), abs=1e-12)


def test_rule_genes_roundtrip():
    genes = np.array([0.1, 0.2, 0.3, 0.4, 1.1, 1.2, 1.3, 1.4])
    rule = PUQCARule.from_genes(genes)
    assert np.allclose(rule.genes(), genes)
    assert rule.w1.xi == pytest.approx(1.4)
    with pytest.raises(ValueError):
        PUQCARule.from_genes(genes[:7])


def test_simulable_flag():
    assert IDENTITY_RULE.is_simulable
    assert not PUQCARule(GateParams(alpha=0.1)).is_simulable
    assert not PUQCARule(GateParams(), GateParams(phi=0.2)).is_simulable


def test_fermion_rule_blocks_and_full_form():
    fr = FermionRule(0.4, 1.0, 2.0, 0.8, 0.3, 0.1)
    (a1, b1), (a2, b2) = fr.blocks()
    assert a1 == pytest.approx(np.exp(1.0j) * math.cos(0.4))
    assert b2 == pytest.approx(np.exp(0.1j) * math.sin(0.8))
    w0, _ = fr.to_puqca().matrices()
    assert w0[1, 1] == pytest.approx(a1) and w0[1, 2] == pytest.approx(b1)
    assert w0[2, 1] == pytest.approx(-np.conj(b1)) and w0[2, 2] == pytest.approx(np.conj(a1))


rules = st.one_of(
    st.lists(angle, min_size=8, max_size=8).map(PUQCARule.from_genes),
    st.lists(angle, min_size=6, max_size=6).map(FermionRule.from_genes),
)


@given(rules)
@settings(max_examples=60)
def test_serialization_roundtrip_is_exact(rule):
    assert parse_rule(serialize_rule(rule, label="x")) == rule


def test_record_layout():
    rec = rule_to_record(IDENTITY_RULE, label="id", source="test")
    assert rec["schema"] == 1 and rec["kind"] == "full"
    assert set(rec["angles"]) == {f"{w}.{a}" for w in ("w0", "w1")
                                  for a in ("theta", "alpha", "gamma", "xi", "phi")}


def _full_record():
    return rule_to_record(PUQCARule.from_genes(np.arange(8) * 0.1))


@pytest.mark.parametrize("mutate", [
    lambda r: r.update(schema=2),
    lambda r: r.update(kind="other"),
    lambda r: r.update(extra=1),
    lambda r: r["angles"].pop("w0.theta"),
    lambda r: r["angles"].update({"w0.bogus": 1.0}),
    lambda r: r["angles"].update({"w0.theta": "1.0"}),
    lambda r: r["angles"].update({"w0.theta": True}),
    lambda r: r.pop("angles"),
])
def test_malformed_records_rejected(mutate):
    rec = _full_record()
    mutate(rec)
    with pytest.raises(RuleFormatError):
        parse_rule(json.dumps(rec))


def test_phi_keys_optional_and_non_finite_rejected():
    rec = _full_record()
    del rec["angles"]["w0.phi"], rec["angles"]["w1.phi"]
    assert parse_rule(json.dumps(rec)).w0.phi == 0.0
    text = json.dumps(_full_record()).replace('"w0.xi": 0.30000000000000004', '"w0.xi": NaN')
    assert "NaN" in text
    with pytest.raises(RuleFormatError):
        parse_rule(text)
    with pytest.raises(RuleFormatError):
        parse_rule("{not json")
