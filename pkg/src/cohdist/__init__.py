"""Coherence, discord and their distribution across multipartite quantum states."""

from .basis_search import SearchConfig, minimize_over_bases
from .channels import DistributionScenario, KrausChannel, apply_channel, random_incoherent_channel
from .ensembles import EnsembleSpec, named_state, random_state, random_states
from .errors import CohDistError, ValidationError
from .measures import (
    chain_discord_sum,
    coherence,
    discord,
    dissonance,
    entropic_cost,
    local_coherences,
    one_way_discord,
    one_way_dissonance,
    qi_coherence,
    symmetric_discord,
    zurek_discord,
)
from .qstate import (
    DensityMatrix,
    ProductBasis,
    computational_basis,
    dephase,
    entropy,
    mutual_information,
    partial_trace,
    relative_entropy,
    total_correlation,
    validate,
)
from .tolerances import TOL
from .verifier import reproduce_paper, verify_ensemble

__version__ = "0.1.0"
