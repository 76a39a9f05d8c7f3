import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvcluster.canonical import (
    canonical_lubo,
    check_canonical_conditions,
    decompose_canonical,
    qnd_network_state,
    squeezing_budget,
    synthesize_canonical,
    uniform_cluster_squeezing,
)
from cvcluster.errors import DecompositionError
from cvcluster.graph import Graph, chain, diamond, excess_noise, measure_nullifiers, sixmode
from cvcluster.gram import synthesize_gram
from cvcluster.linalg import haar_unitary, takagi
from cvcluster.synthesis import SynthesisResult

GOLDEN = (1 + np.sqrt(5)) / 2


def test_takagi_reconstructs():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    M = X + X.T
    U, d = takagi(M)
    assert np.allclose(U @ np.diag(d) @ U.T, M, atol=1e-12)
    assert np.allclose(U.conj().T @ U, np.eye(5), atol=1e-12)
    assert np.all(np.diff(d) <= 0)


def test_takagi_handles_zero_and_degenerate_values():
    rng = np.random.default_rng(1)
    V = haar_unitary(4, rng)
    M = V @ np.diag([2.0, 2.0, 1.0, 0.0]) @ V.T
    U, d = takagi(M)
    assert np.allclose(d, [2, 2, 1, 0], atol=1e-12)
    assert np.allclose(U @ np.diag(d) @ U.T, M, atol=1e-12)


def test_takagi_rejects_non_symmetric():
    with pytest.raises(ValueError):
        takagi(np.array([[0, 1], [0, 0]], dtype=complex))


def test_two_mode_r0_values():
    res = synthesize_canonical(chain(2), 0.0)
    assert np.allclose(res.lambdaA, 1.25, atol=1e-12)
    assert np.allclose(res.lambdaB, 0.25, atol=1e-12)
    assert np.allclose(res.R, np.log(GOLDEN), atol=1e-12)


def test_two_mode_unitary_closed_form():
    # U = (C, i; i, C)/sqrt(1 + C^2) where C is the reciprocal of the
    # per-column coefficient C_l, which is the golden ratio at r = 0
    res = synthesize_canonical(chain(2), 0.0)
    diag = check_canonical_conditions(res, chain(2), 0.0)
    assert np.allclose(diag.C, GOLDEN, atol=1e-12)
    C = 1 / GOLDEN
    expected = np.array([[C, 1j], [1j, C]]) / np.sqrt(1 + C * C)
    assert np.abs(res.U - expected).max() < 1e-12


def test_lubo_is_bogoliubov():
    for g in (chain(3), diamond(), sixmode()):
        r1, r2 = canonical_lubo(g, 0.7).bogoliubov_residuals()
        assert r1 < 1e-12 and r2 < 1e-12


def test_negative_r_rejected():
    with pytest.raises(ValueError):
        canonical_lubo(chain(2), -0.1)


def test_decomposition_failure_is_reported():
    lubo = canonical_lubo(chain(2), 0.5)
    broken = type(lubo)(lubo.A, lubo.B * 1.5, lubo.r, lubo.graph)
    with pytest.raises(DecompositionError) as info:
        decompose_canonical(broken)
    assert info.value.residual > 1e-8


def test_canonical_conditions_hold():
    for g, r in [(chain(2), 0.0), (chain(4), 0.3), (diamond(), 1.0), (sixmode(), 0.5)]:
        diag = check_canonical_conditions(synthesize_canonical(g, r), g, r)
        assert diag.ok, (g, r, diag.eq3_max, diag.eq4_max)


def test_conditions_large_r_stay_finite():
    g = chain(3)
    diag = check_canonical_conditions(synthesize_canonical(g, 20.0), g, 20.0)
    assert np.all(np.isfinite(diag.D))


def test_d_equals_eigenvalues_of_adjacency_squared():
    g = diamond()
    diag = check_canonical_conditions(synthesize_canonical(g, 0.4), g, 0.4)
    mu = np.linalg.eigvalsh(g.adjacency @ g.adjacency)
    assert np.allclose(np.sort(diag.D), np.sort(mu), atol=1e-9)


def test_nullifiers_of_canonical_state():
    g = diamond()
    rep = measure_nullifiers(g, qnd_network_state(g, 1.0))
    assert np.allclose(rep.variances, np.exp(-2), atol=1e-12)


def test_squeezing_budget_two_mode():
    b = squeezing_budget(synthesize_canonical(chain(2), 0.0))
    assert b.max_db == pytest.approx(4.1797528, abs=1e-6)
    assert b.total_db == pytest.approx(2 * 4.1797528, abs=1e-6)


def test_uniform_cluster_squeezing_matches_target():
    g = chain(4)
    R = uniform_cluster_squeezing(g, np.exp(-2.0))
    res = synthesize_gram(g, R)
    assert excess_noise(g, res.U, res.R).max() == pytest.approx(np.exp(-2.0))


def test_synthesis_result_json_roundtrip():
    res = synthesize_canonical(diamond(), 0.3)
    back = SynthesisResult.from_json(res.to_json())
    assert np.array_equal(back.U, res.U)
    assert np.array_equal(back.R, res.R)
    assert back.graph == diamond()


@settings(max_examples=25, deadline=None)
@given(mask=st.integers(0, 2**10 - 1), r=st.floats(0, 1.5))
def test_prop_offline_circuit_reproduces_canonical_state(mask, r):
    pairs = [(a, b) for a in range(5) for b in range(a + 1, 5)]
    g = Graph(5, [p for i, p in enumerate(pairs) if mask >> i & 1])
    res = synthesize_canonical(g, r)
    assert np.abs(res.prepare_state().cov - qnd_network_state(g, r).cov).max() < 1e-8
    assert np.all(res.R >= 0)
    assert np.allclose(res.lambdaA - res.lambdaB, 1.0)


@settings(max_examples=20, deadline=None)
@given(mask=st.integers(0, 2**6 - 1), r=st.sampled_from([0.3, 1.0]))
def test_prop_canonical_state_is_biased(mask, r):
    pairs = [(a, b) for a in range(4) for b in range(a + 1, 4)]
    g = Graph(4, [p for i, p in enumerate(pairs) if mask >> i & 1])
    cov = qnd_network_state(g, r).cov / 0.25
    M = np.array([g.degree(a) for a in range(4)])
    assert np.allclose(np.diag(cov)[0::2], np.exp(2 * r), atol=1e-9)
    assert np.allclose(np.diag(cov)[1::2], np.exp(-2 * r) + M * np.exp(2 * r), atol=1e-9)


def test_edgeless_graph_is_plain_squeezing():
    g = Graph(3)
    lubo = canonical_lubo(g, 0.6)
    assert np.allclose(lubo.A, np.cosh(0.6) * np.eye(3))
    assert np.allclose(lubo.B, np.sinh(0.6) * np.eye(3))
    res = decompose_canonical(lubo)
    assert np.allclose(np.abs(res.U), np.eye(3), atol=1e-12)
    assert np.allclose(res.R, 0.6)
    assert np.allclose(qnd_network_state(g, 0.0).cov, np.eye(6) / 4)


def test_v_identities():
    g = chain(4)
    lubo = canonical_lubo(g, 0.5)
    res = decompose_canonical(lubo)
    V = res.V
    assert np.abs(V.conj().T @ V - np.eye(4)).max() < 1e-9
    V2 = lubo.B.T @ res.U.conj() / np.sqrt(res.lambdaB)
    assert np.abs(V - V2).max() < 1e-9


def test_large_r_approaches_cluster_type_circuit():
    g = chain(2)
    res = synthesize_canonical(g, 20.0)
    diag = check_canonical_conditions(res, g, 20.0)
    assert np.abs(1 / diag.C - 1).max() < 1e-8
    # columns agree with the 50/50 circuit up to a phase each
    target = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    overlap = np.abs(np.diag(target.conj().T @ res.U))
    assert np.allclose(overlap, 1.0, atol=1e-8)


def test_canonical_u_is_not_cluster_type_at_finite_r():
    from cvcluster.gram import check_cluster_conditions

    res = synthesize_canonical(chain(2), 0.5)
    assert check_cluster_conditions(res.U, chain(2)).max > 1e-3


def test_columns_sorted_by_lambda():
    res = synthesize_canonical(sixmode(), 0.4)
    assert np.all(np.diff(res.lambdaA) <= 1e-12)


def test_zero_squeezing_budget():
    b = squeezing_budget(SynthesisResult(np.eye(2), np.zeros(2), np.ones(2), np.zeros(2)))
    assert b.total_db == 0.0
