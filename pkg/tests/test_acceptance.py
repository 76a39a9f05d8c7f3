"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (printed at the end of the pytest
run by ``conftest.py``, or directly when this file is run as a script).
Tolerances are the stated ones; nothing here is loosened to make a check pass.
"""

import time

import numpy as np

from cvcluster.canonical import qnd_network_state, squeezing_budget, synthesize_canonical, uniform_cluster_squeezing
from cvcluster.decomp import paper_minimal_chain4, reck_decompose
from cvcluster.gaussian import squeezing_to_db, unitarity_residual
from cvcluster.graph import chain, cluster_condition_residuals, diamond, enumerate_graphs, excess_noise, measure_nullifiers, sixmode
from cvcluster.gram import PAPER_ALPHAS, assemble_unitary, derive_gram, paper_fixture, synthesize_gram
from cvcluster.linalg import haar_unitary
from cvcluster.synthesis import offline_circuit
from cvcluster.teleport import ProtocolSpec, monte_carlo_mean, run_teleport

RESULTS = {}


def record(n, title, checks, elapsed=None):
    """Store one line for criterion ``n``; ``checks`` maps label -> (ok, detail)."""
    ok = all(c[0] for c in checks.values())
    failed = [f"{k}: {d}" for k, (good, d) in checks.items() if not good]
    detail = "; ".join(failed) if failed else "; ".join(f"{k}: {d}" for k, (_, d) in checks.items())
    t = "" if elapsed is None else f" [{elapsed:.2f}s]"
    RESULTS[n] = f"{'PASS' if ok else 'FAIL'}  criterion {n}: {title}{t} | {detail}"
    print(RESULTS[n])
    return ok, failed


def _assert(result):
    ok, failed = result
    assert ok, "\n".join(failed)


def test_criterion_1_two_mode_canonical():
    t0 = time.perf_counter()
    res = synthesize_canonical(chain(2), 0.0)
    dt = time.perf_counter() - t0
    R0 = np.log((1 + np.sqrt(5)) / 2)
    db = squeezing_to_db(res.R)
    checks = {
        "lambdaA=5/4": (np.abs(res.lambdaA - 1.25).max() <= 1e-12, f"{res.lambdaA}"),
        "lambdaB=1/4": (np.abs(res.lambdaB - 0.25).max() <= 1e-12, f"{res.lambdaB}"),
        "R": (np.abs(res.R - R0).max() <= 1e-6, f"{res.R[0]:.6f} nats"),
        "dB": (np.abs(db - 4.180).max() <= 1e-3, f"{db[0]:.4f} dB"),
        "runtime<1s": (dt < 1.0, f"{dt:.3f}s"),
    }
    _assert(record(1, "two-mode canonical decomposition at r = 0", checks, dt))


def test_criterion_2_canonical_oracle_equivalence():
    t0 = time.perf_counter()
    worst, count = 0.0, 0
    for n in range(1, 6):
        for g in enumerate_graphs(n):
            for r in (0.0, 0.3, 1.0):
                cov = synthesize_canonical(g, r).prepare_state().cov
                worst = max(worst, float(np.abs(cov - qnd_network_state(g, r).cov).max()))
                count += 1
    dt = time.perf_counter() - t0
    checks = {
        "max-norm<=1e-8": (worst <= 1e-8, f"{worst:.2e} over {count} cases"),
        "runtime<30s": (dt < 30, f"{dt:.1f}s"),
    }
    _assert(record(2, "off-line circuit equals QND network (connected n <= 5)", checks, dt))


def test_criterion_3_gram_identities_and_fixtures():
    t0 = time.perf_counter()
    G4 = derive_gram(chain(4)).G
    Gd = derive_gram(diamond()).G
    G2 = derive_gram(chain(2)).G
    G6 = derive_gram(sixmode()).G
    exp4 = np.array([[3, 0, -1, 0], [0, 2, 0, -1], [-1, 0, 2, 0], [0, -1, 0, 3]]) / 5
    expd = np.array([[3, 0, 0, -2], [0, 3, -2, 0], [0, -2, 3, 0], [-2, 0, 0, 3]]) / 5
    # vertices {1, 3, 5} and {2, 4, 6} decouple
    blk = np.array([[7, -3, -1], [-3, 7, -1], [-1, -1, 3]]) / 10
    exp6 = np.zeros((6, 6))
    exp6[np.ix_([0, 2, 4], [0, 2, 4])] = blk
    exp6[np.ix_([5, 3, 1], [5, 3, 1])] = blk
    checks = {
        "chain4": (np.abs(G4 - exp4).max() <= 1e-12, f"{np.abs(G4 - exp4).max():.1e}"),
        "diamond": (np.abs(Gd - expd).max() <= 1e-12, f"{np.abs(Gd - expd).max():.1e}"),
        "two-mode": (np.abs(G2 - np.eye(2) / 2).max() <= 1e-12, f"{np.abs(G2 - np.eye(2) / 2).max():.1e}"),
        "sixmode": (np.abs(G6 - exp6).max() <= 1e-12, f"{np.abs(G6 - exp6).max():.1e}"),
    }
    for name in sorted(PAPER_ALPHAS):
        g, alpha = paper_fixture(name)
        gres = alpha.gram_residual(derive_gram(g))
        ures = unitarity_residual(assemble_unitary(g, alpha))
        checks[f"{name} vectors"] = (gres <= 1e-12 and ures <= 1e-12, f"gram {gres:.1e}, unitarity {ures:.1e}")
    _assert(record(3, "Gram matrices and stored vector solutions", checks, time.perf_counter() - t0))


def test_criterion_4_closed_form_vs_simulation():
    t0 = time.perf_counter()
    g2 = chain(2)
    U2 = assemble_unitary(g2, PAPER_ALPHAS["twomode"])
    two = 0.0
    for R in ([0.3, 0.9], [1.0, 1.0], [2.0, 0.5]):
        sim = measure_nullifiers(g2, offline_circuit(U2, R).prepare_state()).variances
        two = max(two, float(np.abs(sim - 2 * np.exp(-2 * np.array(R))).max()))
    rng = np.random.default_rng(2024)
    worst, count = 0.0, 0
    for n in range(1, 7):
        for g in enumerate_graphs(n, connected=False):
            res = synthesize_gram(g, rng.uniform(0.0, 2.0, n))
            sim = measure_nullifiers(g, res.prepare_state()).variances
            worst = max(worst, float(np.abs(sim - excess_noise(g, res.U, res.R)).max()))
            count += 1
    checks = {
        "two-mode 2e^{-2R}": (two <= 1e-9, f"{two:.1e}"),
        "all graphs n<=6": (worst <= 1e-9, f"{worst:.1e} over {count} graphs"),
    }
    _assert(record(4, "closed-form excess noise equals simulated nullifier variance", checks, time.perf_counter() - t0))


def test_criterion_5_minimal_network_and_reck():
    t0 = time.perf_counter()
    U = paper_minimal_chain4().matrix()
    unit = unitarity_residual(U)
    clus = float(cluster_condition_residuals(U, chain(4)).max())
    rng = np.random.default_rng(7)
    worst = 0.0
    for k in range(200):
        n = 2 + k % 7
        worst = max(worst, reck_decompose(haar_unitary(n, rng)).residual())
    dt = time.perf_counter() - t0
    checks = {
        "unitary<=1e-12": (unit <= 1e-12, f"{unit:.1e}"),
        "cluster condition<=1e-9": (clus <= 1e-9, f"{clus:.1e}"),
        "reck roundtrip<=1e-9": (worst <= 1e-9, f"{worst:.1e} over 200 unitaries, n=2..8"),
        "runtime<10s": (dt < 10, f"{dt:.2f}s"),
    }
    _assert(record(5, "three-splitter 4-chain network and Reck roundtrip", checks, dt))


def test_criterion_6_teleportation_noise_laws():
    t0 = time.perf_counter()
    grid = (0.5, 1.0, 2.0)
    diamond_err, x_worst = 0.0, 0.0
    for R3 in grid:
        for R4 in grid:
            rep = run_teleport(ProtocolSpec("diamond", (R3, R4), 12.0, vectors="paper"))
            law = (13 * np.exp(-2 * R3) + 5 * np.exp(-2 * R4)) / 12
            diamond_err = max(diamond_err, abs(rep.excess_p - law))
            x_worst = max(x_worst, rep.excess_x)
    chain_err, ratio_err = 0.0, 0.0
    for R in grid:
        c = run_teleport(ProtocolSpec("chain3", R, 12.0)).excess_p
        d = run_teleport(ProtocolSpec("diamond", R, 12.0)).excess_p
        chain_err = max(chain_err, abs(c - 3 * np.exp(-2 * R)))
        ratio_err = max(ratio_err, abs(d / c - 0.5))
    rail_err = {}
    for m in (1, 2, 3, 4):
        cl = {1: "chain3", 2: "diamond"}.get(m, f"multirail:{m}")
        rail_err[m] = max(abs(run_teleport(ProtocolSpec(cl, R, 12.0)).excess_p - 3 * np.exp(-2 * R) / m) for R in grid)
    dt = time.perf_counter() - t0
    checks = {
        "diamond (13e^{-2R3}+5e^{-2R4})/12": (diamond_err <= 1e-6, f"max err {diamond_err:.3e}"),
        "chain3 3e^{-2R}": (chain_err <= 1e-6, f"max err {chain_err:.1e}"),
        "diamond/chain3=1/2": (ratio_err <= 1e-6, f"max err {ratio_err:.3e}"),
    }
    for m, err in rail_err.items():
        checks[f"multirail m={m} 3e^{{-2R}}/m"] = (err <= 1e-6, f"max err {err:.3e}")
    checks["diamond x_out<=1e-6"] = (x_worst <= 1e-6, f"{x_worst:.1e}")
    checks["runtime<10s"] = (dt < 10, f"{dt:.2f}s")
    _assert(record(6, "teleportation output noise laws", checks, dt))


def test_criterion_7_mean_transfer():
    t0 = time.perf_counter()
    target = (0.7, -0.3)
    mc = monte_carlo_mean(ProtocolSpec("diamond", 1.0, 12.0, target, seed=2024), 10_000)
    dt = time.perf_counter() - t0
    z = np.abs(mc.mean - target) / mc.stderr
    checks = {
        "within 5 stderr": (mc.within(target, 5.0), f"mean {mc.mean.round(5)}, |z| {z.round(2)}"),
        "runtime<60s": (dt < 60, f"{dt:.2f}s"),
    }
    _assert(record(7, "coherent mean survives teleportation (10^4 shots)", checks, dt))


def test_criterion_8_resource_comparison():
    t0 = time.perf_counter()
    g = chain(2)
    R = uniform_cluster_squeezing(g, 1.0)
    res = synthesize_gram(g, R)
    sim_max = measure_nullifiers(g, res.prepare_state()).max
    gram_db = float(squeezing_to_db(R))
    canon_db = squeezing_budget(synthesize_canonical(g, 0.0)).max_db
    checks = {
        "gram 3.01 dB": (abs(gram_db - 3.01) <= 0.01, f"{gram_db:.4f} dB"),
        "gram reaches 1.0": (abs(sim_max - 1.0) <= 1e-9, f"simulated max excess {sim_max:.12f}"),
        "canonical 4.18 dB": (abs(canon_db - 4.18) <= 0.01, f"{canon_db:.4f} dB"),
    }
    _assert(record(8, "squeezing cost: cluster-type vs canonical two-mode", checks, time.perf_counter() - t0))


def test_criterion_9_canonical_bias():
    t0 = time.perf_counter()
    graphs = [g for n in range(1, 6) for g in enumerate_graphs(n, connected=False)] + [sixmode()]
    worst = 0.0
    for g in graphs:
        M = np.array([g.degree(a) for a in range(g.n)])
        for r in (0.3, 1.0):
            v = np.diag(qnd_network_state(g, r).cov) / 0.25
            worst = max(
                worst,
                float(np.abs(v[0::2] - np.exp(2 * r)).max()),
                float(np.abs(v[1::2] - (np.exp(-2 * r) + M * np.exp(2 * r))).max()),
            )
    checks = {"<x^2>, <p^2> laws": (worst <= 1e-9, f"{worst:.1e} over {len(graphs)} graphs")}
    _assert(record(9, "canonical states are biased in x and p", checks, time.perf_counter() - t0))


if __name__ == "__main__":
    import sys

    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
