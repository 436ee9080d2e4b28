import numpy as np
import pytest
from numpy.testing import assert_allclose

from cohdist.ensembles import KINDS, EnsembleSpec, named_state, random_state, random_states, state_rng
from cohdist.errors import BadParameter, UnknownName
from cohdist.qstate import entropy, mutual_information, partial_trace


@pytest.mark.parametrize("name", ["plus_plus", "bell", "datta", "ghz", "w", "maximally_mixed"])
def test_named_states_are_valid(name):
    rho = named_state(name)
    w = np.linalg.eigvalsh(rho.matrix)
    assert w.min() > -1e-14
    assert_allclose(np.trace(rho.matrix).real, 1.0, atol=1e-14)


def test_named_state_parameters():
    assert named_state("ghz", n=4).dims == (2, 2, 2, 2)
    assert named_state("maximally_mixed", dims=(3, 2)).dims == (3, 2)
    w3 = named_state("w", n=3)
    assert_allclose(np.diag(partial_trace(w3, [0]).matrix).real, [2 / 3, 1 / 3], atol=1e-14)
    assert_allclose(named_state("werner", p=1.0).matrix, named_state("bell").matrix, atol=1e-15)
    with pytest.raises(BadParameter):
        named_state("werner", p=1.5)
    with pytest.raises(BadParameter):
        named_state("werner")
    with pytest.raises(BadParameter):
        named_state("ghz", n=1)
    with pytest.raises(UnknownName):
        named_state("cat")


def test_ensemble_spec_validation():
    with pytest.raises(UnknownName):
        EnsembleSpec("gaussian", (2, 2), 3)
    with pytest.raises(BadParameter):
        EnsembleSpec("haar_pure", (2, 2), 0)
    with pytest.raises(BadParameter):
        EnsembleSpec("haar_pure", (1, 2), 3)


@pytest.mark.parametrize("kind", KINDS)
def test_draws_are_valid_and_replayable(kind):
    spec = EnsembleSpec(kind, (2, 3), 5, seed=17)
    states = list(random_states(spec))
    assert len(states) == 5
    for i, rho in enumerate(states):
        assert np.linalg.eigvalsh(rho.matrix).min() > -1e-12
        again = random_state(kind, spec.dims, state_rng(17, i))
        assert np.array_equal(again.matrix, rho.matrix)


def test_kind_signatures():
    rng = state_rng(0, 0)
    assert abs(entropy(random_state("haar_pure", (2, 2), rng))) < 1e-10
    prod = random_state("product_pure", (2, 3), rng)
    assert abs(mutual_information(prod)) < 1e-10
    # induced states from an equal-size environment are full rank almost surely
    induced = random_state("induced_mixed", (2, 2), rng)
    assert np.linalg.eigvalsh(induced.matrix).min() > 1e-8


def test_induced_mean_is_maximally_mixed():
    spec = EnsembleSpec("induced_mixed", (2, 2), 2000, seed=1)
    mean = sum(r.matrix for r in random_states(spec)) / spec.count
    assert_allclose(mean, np.eye(4) / 4, atol=0.02)
