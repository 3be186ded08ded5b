"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s`` (or execute this
file directly).  The summary block at the end of the pytest report repeats
every line.  Published values are compared at the tolerances the criteria
state; no tolerance here is loosened to make a row pass.
"""

import time
from math import comb

import numpy as np
import pytest

from puqca import dct, dicke, fermion, ga, verify
from puqca import statevector as sv
from puqca.cli import main as cli_main
from puqca.model import IDENTITY_RULE, FermionRule, GateParams, PUQCARule

TABLE_TOL = 5e-5


def _rows_detail(fam: verify.FamilyResult) -> str:
    parts = []
    for r in fam.rows:
        extra = "" if r.expected_wrong is None else f"/{r.computed_wrong}w"
        mark = "" if r.match else "!"
        parts.append(f"{mark}n{r.n}={r.computed:.4f}{extra}")
    return f"[{fam.variant}] " + " ".join(parts)


# -- 1 ---------------------------------------------------------------------


def test_criterion_01_closed_form_bound(record_criterion, capsys):
    expected = {4: 0.8000, 6: 0.7273, 8: 0.6882, 10: 0.6632, 12: 0.6456,
                14: 0.6325, 16: 0.6222}
    start = time.perf_counter()
    got = {}
    for n in expected:
        assert cli_main(["bound", str(n)]) == 0
        got[n] = float(capsys.readouterr().out.strip())
    elapsed = time.perf_counter() - start
    ok = all(round(got[n], 4) == expected[n] for n in expected) and elapsed < 1.0
    record_criterion(1, ok, "bound table " + " ".join(f"{got[n]:.4f}" for n in expected)
                     + f" in {elapsed:.3f}s")
    assert ok


# -- 2 ---------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_02_per_size_rules(record_criterion):
    fam = verify.verify_family("full_per_size", search=True)
    values_ok = all(abs(r.computed - 1.0) <= TABLE_TOL for r in fam.rows)
    ok = fam.passed and values_ok and len(fam.rows) == 6
    record_criterion(2, ok, "per-size F=1 at t=n/2 " + _rows_detail(fam))
    assert ok


# -- 3 ---------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_03_multi_size_rule(record_criterion):
    fam = verify.verify_family("full_multi", search=True)
    expected_wrong = {10: 7, 12: 44, 14: 102}
    counts_ok = all(r.computed_wrong == expected_wrong[r.n]
                    for r in fam.rows if r.n in expected_wrong)
    ok = fam.passed and counts_ok and len(fam.rows) == 6
    record_criterion(3, ok, "multi-size values and wrong counts " + _rows_detail(fam))
    assert ok


# -- 4 ---------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_04_simulable_multi_size_tables(record_criterion):
    fams = [verify.verify_family(name, search=True)
            for name in ("simulable_multi_a", "simulable_multi_b")]
    ok = all(f.passed and len(f.rows) == 6 for f in fams)
    record_criterion(4, ok, " | ".join(f"{f.family} {_rows_detail(f)}" for f in fams))
    assert ok


# -- 5 ---------------------------------------------------------------------


def test_criterion_05_fermionic_per_size_rules(record_criterion):
    tables = verify.load_tables()["fermion_per_size"]["rows"]
    start = time.perf_counter()
    values = {}
    for row in tables:
        fr = verify.six_angle_rule(row["rule"], "gamma")
        spec = dct.ClassifierSpec(row["n"], row["t"], row["p"])
        values[row["n"]] = (fermion.fermion_fitness(fr, spec).fitness, row["expected"])
    elapsed = time.perf_counter() - start
    ok = all(abs(c - e) <= TABLE_TOL for c, e in values.values()) and elapsed < 60.0
    record_criterion(5, ok, "fermionic per-size " + " ".join(
        f"n{n}={c:.4f}" for n, (c, _) in values.items()) + f" in {elapsed:.2f}s")
    assert ok


# -- 6 ---------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_06_fermion_statevector_equivalence(record_criterion):
    rng = np.random.default_rng(6)
    worst = 0.0
    for n in (4, 6, 8, 10):
        t = int(rng.integers(0, 11))
        worst = max(worst, fermion.crosscheck(n, t, trials=50, seed=int(rng.integers(2**32))))
    ok = worst <= 1e-9
    record_criterion(6, ok, f"50 random rules per n in (4,6,8,10), max deviation {worst:.2e}")
    assert ok


# -- 7 ---------------------------------------------------------------------


def test_criterion_07_dicke_properties(record_criterion):
    marg_ok = all(dicke.dicke_marginal(n, i, p) == i / n
                  for n in range(2, 13) for i in range(n + 1) for p in range(n))
    # the state itself carries the same marginal at every site
    num_ok = all(np.allclose(sv.marginal_profile(dicke.generalized_dicke(n, i, k)), i / n,
                             atol=1e-12)
                 for n in (4, 6, 8) for i in range(n + 1) for k in (0, comb(n, i) - 1))
    reports = [dicke.verify_existence(n) for n in (4, 6, 8)]
    ok = marg_ok and num_ok and all(r.passed for r in reports)
    record_criterion(7, ok, "marginal i/n exact; existence check "
                     + " ".join(f"n{r.n}:{'ok' if r.passed else 'violated'}" for r in reports))
    assert ok


# -- 8 ---------------------------------------------------------------------


def _rotate_labels(labels: np.ndarray, n: int, m: int) -> np.ndarray:
    """Basis label of ``T^m |b>`` for every label ``b``."""
    m %= n
    full = (1 << n) - 1
    return ((labels << m) | (labels >> (n - m))) & full if m else labels


def test_criterion_08_translation_covariance(record_criterion):
    rng = np.random.default_rng(8)
    worst = 0.0
    for n in (4, 6, 8):
        for _ in range(3):
            g = rng.uniform(0.0, 2 * np.pi, 10)
            rule = PUQCARule(GateParams(*g[:5]), GateParams(*g[5:]))
            t = int(rng.integers(1, 6))
            dim = 1 << n
            states = sv.evolve_state(np.eye(dim, dtype=np.complex128), rule, t)
            prof = sv.marginal_profile(states)                     # (n, inputs)
            labels = np.arange(dim)
            for m in range(0, n, 2):
                rotated = _rotate_labels(labels, n, m)
                # profile of T^m b equals the profile of b moved by -m sites
                dev = np.abs(prof[:, rotated] - np.roll(prof, -m, axis=0)).max()
                worst = max(worst, float(dev))
    ok = worst <= 1e-10
    record_criterion(8, ok, f"all inputs, all even shifts, n in (4,6,8): max deviation {worst:.2e}")
    assert ok


# -- 9 ---------------------------------------------------------------------


def test_criterion_09_identity_rule_equals_bound(record_criterion):
    mismatches = []
    for n in range(4, 13, 2):
        bound = dct.classical_bound(n)
        for t in (0, 1, 5):
            for p in range(n):
                rep = dct.fitness(IDENTITY_RULE, dct.ClassifierSpec(n, t, p), cap=0)
                if rep.fitness != bound or rep.wrong_count != dct.classical_wrong_count(n):
                    mismatches.append((n, t, p, rep.fitness))
    ok = not mismatches
    record_criterion(9, ok, f"identity rule vs bound, n=4..12, t in (0,1,5), every p: "
                     f"{len(mismatches)} mismatches")
    assert ok


# -- 10 --------------------------------------------------------------------


def test_criterion_10_appendix_oracles(record_criterion):
    rng = np.random.default_rng(10)
    gate_err = 0.0
    for _ in range(1000):
        J, theta, h1, h2, tau = rng.uniform(-3, 3, 5)
        dense = fermion.quadratic_propagator(fermion.hamiltonian_matrix(J, theta, h1, h2), tau)
        closed = fermion.gate_from_hamiltonian(J, theta, h1, h2, tau)
        gate_err = max(gate_err, float(np.abs(dense - closed).max()))
    block_err = 0.0
    for n in (4, 6, 8, 12):
        for _ in range(5):
            fr = FermionRule.from_genes(rng.uniform(0, 2 * np.pi, 6))
            for twist, shift in ((1.0, 0.0), (-1.0, 0.5)):
                dense = fermion.step_propagator(fr, n, twist)
                rebuilt = fermion.reconstruct_propagator(fermion.momentum_blocks(fr, n, shift),
                                                         shift)
                block_err = max(block_err, float(np.abs(dense - rebuilt).max()))
    ok = gate_err <= 1e-10 and block_err <= 1e-12
    record_criterion(10, ok, f"gate closed form err {gate_err:.1e}; "
                     f"momentum reconstruction err {block_err:.1e}")
    assert ok


# -- 11 --------------------------------------------------------------------


def test_criterion_11_ga_smoke(record_criterion):
    start = time.perf_counter()
    results = {}
    for seed in (1, 2, 3):
        obj = ga.FitnessObjective(dct.ClassifierSpec(4, 2, 1, 0.0))
        cfg = ga.GAConfig(obj, obj.n_genes, population_size=100, max_generations=100,
                          p_m=0.36, sigma=0.45, seed=seed)
        res = ga.evolve_search(cfg)
        results[seed] = (res.solved, res.generations)
    elapsed = time.perf_counter() - start
    ok = any(s for s, _ in results.values()) and elapsed < 120.0
    record_criterion(11, ok, "GA n=4 " + " ".join(
        f"seed{s}:{'solved' if v[0] else 'unsolved'}@gen{v[1]}" for s, v in results.items())
        + f" in {elapsed:.2f}s")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
