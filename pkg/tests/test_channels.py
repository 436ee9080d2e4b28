import numpy as np
import pytest
from numpy.testing import assert_allclose

from cohdist.channels import (
    DistributionScenario,
    KrausChannel,
    apply_channel,
    dephasing_channel,
    distribution_terms,
    identity_channel,
    pure_state_corollary,
    random_incoherent_channel,
    run_distribution,
)
from cohdist.ensembles import named_state, random_state, state_rng
from cohdist.errors import DimensionMismatch, NotIncoherent, NotTracePreserving
from cohdist.fileio import read_channel, write_channel
from cohdist.measures import coherence, qi_coherence


def induced(dims, seed, index=0):
    return random_state("induced_mixed", dims, state_rng(seed, index))


def test_completeness_and_incoherence_enforced():
    with pytest.raises(NotTracePreserving):
        KrausChannel((0.9 * np.eye(2),))
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    with pytest.raises(NotIncoherent):
        KrausChannel((hadamard,))
    ch = KrausChannel((hadamard,), require_incoherent=False)
    assert not ch.is_incoherent()
    with pytest.raises(DimensionMismatch):
        KrausChannel((np.eye(2), np.eye(3)))


@pytest.mark.parametrize("dim", [2, 3, 4])
def test_random_channels_carry_certificates(dim):
    for k in range(20):
        ch = random_incoherent_channel(dim, state_rng(5, k))
        assert ch.completeness_residual() <= 1e-10
        assert ch.incoherence_residual() <= 1e-10


def test_apply_channel_matches_kron_oracle():
    rho = induced((2, 3, 2), 3)
    ch = random_incoherent_channel(3, 8)
    expected = sum(
        np.kron(np.kron(np.eye(2), k), np.eye(2)) @ rho.matrix @ np.kron(np.kron(np.eye(2), k), np.eye(2)).conj().T
        for k in ch.operators
    )
    assert_allclose(apply_channel(ch, rho, 1).matrix, expected, atol=1e-14)
    assert_allclose(apply_channel(identity_channel(2), rho, 0).matrix, rho.matrix, atol=1e-15)
    with pytest.raises(DimensionMismatch):
        apply_channel(ch, rho, 0)


def test_incoherent_channels_do_not_create_coherence():
    for k in range(10):
        rho = induced((3,), 12, k)
        ch = random_incoherent_channel(3, state_rng(13, k))
        assert coherence(apply_channel(ch, rho, 0)).value <= coherence(rho).value + 1e-12
    bell = named_state("bell")
    assert abs(qi_coherence(apply_channel(dephasing_channel(2), bell, 1), (1,)).value) < 1e-12


def test_distribution_terms_and_bound():
    rho = induced((2, 2, 2), 4)
    terms = distribution_terms(DistributionScenario(rho))
    assert set(terms) == {"C_AR|B", "C_A|BR", "C_R|AB"}
    report = run_distribution(DistributionScenario(rho))
    assert report.theorem_id == "5" and report.passed
    ch = random_incoherent_channel(2, 1)
    report = run_distribution(DistributionScenario(rho, channel=ch))
    assert report.theorem_id == "6" and report.passed
    assert "C_A|BR(final)" in report.terms
    with pytest.raises(DimensionMismatch):
        DistributionScenario(named_state("bell"))


def test_pure_state_corollary_on_ghz():
    cor = pure_state_corollary(named_state("ghz", n=3))
    assert_allclose([cor["S_AR"], cor["S_A"], cor["S_R"]], [1.0, 1.0, 1.0], atol=1e-12)
    report = run_distribution(DistributionScenario(named_state("ghz", n=3)))
    assert "S(AR~) <= S(A~) + S(R~)" in [c.name for c in report.checks]


def test_channel_json_round_trip(tmp_path):
    ch = random_incoherent_channel(3, 2)
    write_channel(ch, tmp_path / "ch.json")
    back = read_channel(tmp_path / "ch.json")
    for a, b in zip(ch.operators, back.operators):
        assert np.array_equal(a, b)
