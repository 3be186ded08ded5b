from math import comb

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from puqca import dct
from puqca import statevector as sv
from puqca.model import IDENTITY_RULE, GateParams, PUQCARule
from puqca.verify import full_rule, load_tables


def table_rule(family, n=None):
    fam = load_tables()[family]
    if n is None:
        return full_rule(fam["rule"])
    return full_rule(next(r for r in fam["rows"] if r["n"] == n)["rule"])


@pytest.mark.parametrize("bits, expected", [("1100", 0), ("1110", 1), ("1000", -1),
                                            ("000000", -1), ("111110", 1)])
def test_majority(bits, expected):
    assert dct.majority(bits) == expected


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_enumerate_valid(n):
    v = dct.enumerate_valid(n)
    assert len(v) == 2 ** n - comb(n, n // 2)
    assert np.all(dct.popcount(v) * 2 != n)
    assert np.all(np.diff(v) > 0)


@pytest.mark.parametrize("n", [0, 3, 22])
def test_enumerate_valid_rejects(n):
    with pytest.raises(ValueError):
        dct.enumerate_valid(n)


@pytest.mark.parametrize("pr, delta, expected", [
    (0.7, 0.0, 1), (0.3, 0.0, -1), (0.5, 0.0, 0), (0.5 + 1e-13, 0.0, 0),
    (0.5 + 1e-9, 0.0, 1), (0.55, 0.1, 0), (0.6, 0.1, 1), (0.4, 0.1, -1),
])
def test_guess_thresholds(pr, delta, expected):
    assert dct.guess_from_probability(pr, delta) == expected


def test_guess_vectorised():
    assert list(dct.guess_from_probability([0.1, 0.5, 0.9])) == [-1, 0, 1]


@pytest.mark.parametrize("n, t, p, delta", [(3, 1, 0, 0), (4, -1, 0, 0), (4, 1, 4, 0),
                                            (4, 1, 0, 0.5), (4, 1, 0, -0.1)])
def test_spec_validation(n, t, p, delta):
    with pytest.raises(ValueError):
        dct.ClassifierSpec(n, t, p, delta)


@pytest.mark.parametrize("n, expected", [(4, 0.8), (6, 0.727273), (8, 0.688172),
                                         (14, 0.632489), (16, 0.622185)])
def test_classical_bound(n, expected):
    assert dct.classical_bound(n) == pytest.approx(expected, abs=5e-7)


def test_classical_bound_counts_small_case_by_hand():
    # n = 4, site 1 read out: wrong iff b_1 disagrees with the majority
    wrong = sum(1 for c in dct.enumerate_valid(4)
                if (2 * sv.index_bits(int(c), 4)[1] - 1) != dct.majority(sv.index_bits(int(c), 4)))
    assert wrong == dct.classical_wrong_count(4) == 2


def test_report_arithmetic():
    configs = np.array([sv.config_index(b) for b in ("1110", "0001", "1000", "0111")])
    probs = np.array([0.9, 0.2, 0.5, 0.1])    # right, right, undecided, wrong
    rep = dct.report_from_probabilities(configs, probs, 4)
    assert (rep.wrong_count, rep.half_error_count, rep.correct_count) == (1, 1, 2)
    assert rep.fitness == pytest.approx(1 - 3 / 8)
    assert rep.misclassified == ["1000", "0111"]
    assert not rep.perfect
    capped = dct.report_from_probabilities(configs, probs, 4, cap=1)
    assert capped.misclassified == ["1000"]


def test_report_rejects_half_density_and_empty():
    with pytest.raises(ValueError):
        dct.report_from_probabilities(np.array([sv.config_index("1100")]), np.array([0.5]), 4)
    with pytest.raises(ValueError):
        dct.report_from_probabilities(np.array([], dtype=np.int64), np.array([]), 4)


def test_six_cell_table_rule_is_perfect():
    rep = dct.fitness(table_rule("full_per_size", 6), dct.ClassifierSpec(6, 3, 1))
    assert rep.perfect and rep.fitness == 1.0 and rep.total == 44


def test_multi_size_rule_at_ten_cells_has_seven_errors():
    rep = dct.fitness(table_rule("full_multi"), dct.ClassifierSpec(10, 5, 1))
    assert rep.wrong_count == 7 and rep.total == 772
    assert len(rep.misclassified) == 7


def test_identity_rule_gives_classical_bound():
    assert dct.fitness(IDENTITY_RULE, dct.ClassifierSpec(8, 3, 2)).fitness == dct.classical_bound(8)


@pytest.mark.parametrize("workers", [1, 3])
def test_sector_and_dense_methods_agree(workers):
    rule = table_rule("full_multi")
    spec = dct.ClassifierSpec(8, 4, 3)
    a = dct.site_probabilities(rule, 8, 4, 3, method="sector", workers=workers)
    b = dct.site_probabilities(rule, 8, 4, 3, method="dense")
    assert np.allclose(a, b, atol=1e-13)
    assert dct.fitness(rule, spec).fitness == dct.fitness(rule, spec, method="dense").fitness
    with pytest.raises(ValueError):
        dct.site_probabilities(rule, 8, 4, 3, method="bogus")


def test_guess_single_configuration():
    rule = table_rule("full_per_size", 6)
    spec = dct.ClassifierSpec(6, 3, 1)
    for c in dct.enumerate_valid(6)[:10]:
        b = sv.index_bits(int(c), 6)
        assert dct.guess(rule, b, spec) == dct.majority(b)
    with pytest.raises(ValueError):
        dct.guess(rule, "1010", spec)


def test_sampled_fitness():
    rule = table_rule("full_multi")
    spec = dct.ClassifierSpec(10, 5, 1)
    exact = dct.fitness(rule, spec).fitness
    ex = dct.sampled_fitness(rule, spec, 10, exhaustive=True)
    assert ex.estimate == exact and ex.half_width == 0.0
    a = dct.sampled_fitness(rule, spec, 4000, seed=5)
    b = dct.sampled_fitness(rule, spec, 4000, seed=5)
    assert a == b
    assert abs(a.estimate - exact) <= 3 * a.half_width + 1e-3
    with pytest.raises(ValueError):
        dct.sampled_fitness(rule, spec, 0)


@given(st.floats(0.0, 1.0))
def test_guess_is_antisymmetric_about_one_half(pr):
    assume(abs(pr - 0.5) > 1e-9)   # keep clear of the tie band where 1 - pr rounds
    assert dct.guess_from_probability(pr) == -dct.guess_from_probability(1.0 - pr)


def test_worker_env(monkeypatch):
    monkeypatch.setenv(dct.THREADS_ENV, "3")
    assert dct.worker_count() == 3
    monkeypatch.delenv(dct.THREADS_ENV)
    assert dct.worker_count() >= 1


def test_fitness_accepts_fermionic_rule():
    g = GateParams(theta=0.5, gamma=0.3, xi=1.0)
    rule = PUQCARule(g, g)
    from puqca.fermion import fermion_rule_from_puqca
    fr = fermion_rule_from_puqca(rule)
    spec = dct.ClassifierSpec(6, 2, 0)
    assert dct.fitness(fr, spec, boundary="parity").fitness == pytest.approx(
        dct.fitness(rule, spec).fitness)
