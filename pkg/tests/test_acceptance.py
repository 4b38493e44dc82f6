"""Acceptance criteria 1 to 11, one test each.

Every test appends a single PASS/FAIL line to ``ACCEPTANCE_LINES``; the lines
are printed in the terminal summary. Statistical checks use a 3-sigma window
and allow floor(2%) of the comparisons in a criterion to miss.
"""

import json
import math

import numpy as np

from conftest import ACCEPTANCE_LINES, random_bloch
from telefid.cli import main
from telefid.measures import (
    average_fidelity,
    covariance_element,
    d_bounds,
    delta,
    fidelity_deviation,
)
from telefid.montecarlo import SamplerConfig, mc_fidelity_moments, mc_moment2, mc_moment4
from telefid.optimizer import optimize_corrections
from telefid.qubit import pauli, random_su2, su2_to_so3
from telefid.teleportation import ProtocolConfig, pauli_set, random_config, teleport_closed, teleport_dense

SQRT5 = math.sqrt(5)
MC_SAMPLES = 10 ** 6


def record(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def allowed_misses(comparisons: int) -> int:
    return int(math.floor(0.02 * comparisons))


def sampler(seed: int) -> SamplerConfig:
    return SamplerConfig(seed=seed, n_samples=MC_SAMPLES)


def test_criterion_01_perfect_teleportation():
    cfg = ProtocolConfig.optimal()
    F, D = average_fidelity(cfg, 1.0), fidelity_deviation(cfg, 1.0)
    record(1, abs(F - 1) <= 1e-12 and abs(D) <= 1e-12,
           f"optimal Pauli config at p=1 gives F={F!r}, D={D!r}")


_oracle_runs = {}


def _oracle_comparisons():
    """50 random (config, p) with closed forms and 10^6-sample estimates, computed once."""
    if not _oracle_runs:
        rng = np.random.default_rng(1001)
        for i in range(50):
            cfg, p = random_config(rng), float(rng.uniform())
            mom = mc_fidelity_moments(cfg, p, sampler(5000 + i))
            _oracle_runs[i] = (average_fidelity(cfg, p), fidelity_deviation(cfg, p),
                               mom.mean_estimate(), mom.std_estimate())
    return list(_oracle_runs.values())


def test_criterion_02_average_fidelity_oracle():
    runs = _oracle_comparisons()
    misses = sum(not est.agrees_with(F) for F, _, est, _ in runs)
    worst = max(abs(est.mean - F) / est.std_error for F, _, est, _ in runs if est.std_error > 0)
    record(2, misses <= allowed_misses(len(runs)),
           f"F closed form vs Monte Carlo, {misses}/{len(runs)} 3-sigma misses "
           f"(allowed {allowed_misses(len(runs))}, max |z| {worst:.2f})")


def test_criterion_03_fidelity_deviation_oracle():
    runs = _oracle_comparisons()
    misses = sum(not est.agrees_with(D) for _, D, _, est in runs)
    worst = max(abs(est.mean - D) / est.std_error for _, D, _, est in runs if est.std_error > 0)
    record(3, misses <= allowed_misses(len(runs)),
           f"D closed form vs Monte Carlo, {misses}/{len(runs)} 3-sigma misses "
           f"(allowed {allowed_misses(len(runs))}, max |z| {worst:.2f})")


def test_criterion_04_bounds():
    rng = np.random.default_rng(1004)
    failures = []
    for i in range(1000):
        cfg, p = random_config(rng), float(rng.uniform())
        F, D = average_fidelity(cfg, p), fidelity_deviation(cfg, p)
        F_min, F_max = (1 - p / 3) / 2, (1 + p) / 2
        lo, hi = d_bounds(cfg, p)
        ok = (F_min - 1e-12 <= F <= F_max + 1e-12
              and D <= (F_max - F) / SQRT5 + 1e-9
              and D <= math.sqrt(max(F * (1 - F), 0.0)) + 1e-9
              and lo - 1e-9 <= D <= hi + 1e-9)
        if not ok:
            failures.append(i)
    record(4, not failures, f"F range, region, half-circle and D sandwich bounds, "
                            f"{1000 - len(failures)}/1000 configs satisfy all")


def test_criterion_05_worst_case_vertex():
    cfg = ProtocolConfig.permuted((1, 0, 3, 2))
    F, D = average_fidelity(cfg, 1.0), fidelity_deviation(cfg, 1.0)
    ok = abs(F - 1 / 3) <= 1e-12 and abs(D - 2 / (3 * SQRT5)) <= 1e-12
    record(5, ok, f"double-swap corrections at p=1 give (F, D)=({F!r}, {D!r})")


def _random_rotation(rng):
    return su2_to_so3(random_su2(rng))


def test_criterion_06_schur_moment_identities():
    rng = np.random.default_rng(1006)
    m2_miss = m4_miss = 0
    for i in range(20):
        R = _random_rotation(rng)
        m2_miss += not mc_moment2(R, sampler(6000 + i)).agrees_with(R.trace / 3)
    for i in range(20):
        A, B = _random_rotation(rng), _random_rotation(rng)
        # fourth moment predicted by the covariance closed form
        target = 4 * covariance_element(A, B) + A.trace * B.trace / 9
        m4_miss += not mc_moment4(A, B, sampler(6100 + i)).agrees_with(target)
    diag_err = 0.0
    for _ in range(20):
        R = _random_rotation(rng)
        diag_err = max(diag_err, abs(covariance_element(R, R) - ((3 - R.trace) / (6 * SQRT5)) ** 2))
    ok = m2_miss + m4_miss <= allowed_misses(40) and diag_err <= 1e-12
    record(6, ok, f"second moment {m2_miss}/20 misses, fourth moment {m4_miss}/20 misses, "
                  f"max diagonal covariance error {diag_err:.1e}")


def test_criterion_07_covariance_saturation():
    Rx, Ry, Rz = (su2_to_so3(pauli(k)) for k in (1, 2, 3))
    cases = [(Rx, Rz, -0.5), (Rx, Ry, -0.5), (Ry, Rz, -0.5), (Rx, Rx, 1.0), (Rz, Rz, 1.0)]
    closed_err, misses = 0.0, 0
    for i, (A, B, factor) in enumerate(cases):
        target = factor * delta(A) * delta(B)
        closed_err = max(closed_err, abs(covariance_element(A, B) - target))
        est = mc_moment4(A, B, sampler(7000 + i))
        # oracle covariance c = (E[q_a q_b] - E[q_a] E[q_b]) / 4 with E[q] = Tr R / 3
        oracle_mean = (est.mean - A.trace * B.trace / 9) / 4
        misses += abs(oracle_mean - target) > 3 * est.std_error / 4 + 1e-12
    ok = closed_err <= 1e-12 and misses == 0
    record(7, ok, f"pi rotations, orthogonal c=-delta^2/2 and parallel c=delta^2, "
                  f"closed-form error {closed_err:.1e}, {misses}/{len(cases)} oracle misses")


def test_criterion_08_dense_closed_equivalence():
    rng = np.random.default_rng(1008)
    worst = 0.0
    for _ in range(100):
        cfg, v, p = random_config(rng), random_bloch(rng), float(rng.uniform())
        worst = max(worst, float(np.max(np.abs(teleport_dense(v, cfg, p) - teleport_closed(v, cfg, p)))))
    record(8, worst <= 1e-10, f"100 random triples, max element-wise difference {worst:.1e}")


def test_criterion_09_optimizer_recovery():
    details, ok = [], True
    for p in (0.25, 0.5, 0.9):
        res = optimize_corrections(pauli_set(), p)
        gap = abs(res.F_best - (1 + p) / 2)
        ok &= gap <= 1e-8 and res.D_at_best <= 1e-6
        details.append(f"p={p}: |F_best-F_max|={gap:.1e}, D={res.D_at_best:.1e}")
    record(9, ok, "; ".join(details))


def test_criterion_10_region_data(capsys):
    ps = [1.0, 1 / math.sqrt(2), 1 / 3]
    code = main(["region", *map(repr, ps)])
    data = json.loads(capsys.readouterr().out)
    worst = 0.0
    for p, tri in zip(ps, data["triangles"]):
        expected = [((1 + p) / 2, 0.0), ((1 - p / 3) / 2, 0.0), ((1 - p / 3) / 2, 2 * p / (3 * SQRT5))]
        worst = max(worst, float(np.max(np.abs(np.array(tri["vertices"]) - expected))))
    middle = [D for F, D in data["half_circle"] if F == 0.5]
    ok = code == 0 and worst <= 1e-9 and middle == [0.5]
    record(10, ok, f"triangles for p=1, 1/sqrt2, 1/3 within {worst:.1e} of the vertex formulas, "
                   f"half circle at F=1/2 gives {middle}")


def test_criterion_11_linearity():
    rng = np.random.default_rng(1011)
    worst_F = worst_D = 0.0
    for _ in range(100):
        cfg = random_config(rng)
        F0, F1 = average_fidelity(cfg, 0.0), average_fidelity(cfg, 1.0)
        D1 = fidelity_deviation(cfg, 1.0)
        worst_F = max(worst_F, abs(F0 - 0.5))
        for p in rng.uniform(size=5):
            worst_F = max(worst_F, abs(average_fidelity(cfg, p) - (F0 + p * (F1 - F0))))
            worst_D = max(worst_D, abs(fidelity_deviation(cfg, p) - p * D1))
    record(11, worst_F <= 1e-12 and worst_D <= 1e-12,
           f"100 configs, max deviation from affine F {worst_F:.1e}, from D(p)=p D(1) {worst_D:.1e}")

