"""Continuous-variable cluster states from off-line squeezing and linear optics."""

from .canonical import (
    canonical_lubo,
    check_canonical_conditions,
    decompose_canonical,
    qnd_network_state,
    squeezing_budget,
    synthesize_canonical,
    uniform_cluster_squeezing,
)
from .decomp import ElementaryNetwork, Element, evaluate_network, paper_minimal_chain4, reck_decompose
from .errors import (
    CVClusterError,
    DecompositionError,
    DegenerateMeasurementError,
    FactorizationError,
    InvalidCircuitError,
    ModeIndexError,
    NonUnitaryError,
    ProtocolError,
)
from .gaussian import (
    GaussianState,
    apply,
    apply_all,
    apply_interferometer,
    coherent,
    db_to_squeezing,
    homodyne_p,
    squeezing_to_db,
    vacuum,
)
from .graph import Graph, excess_noise, measure_nullifiers, named_graph, nullifiers
from .gram import (
    assemble_unitary,
    check_cluster_conditions,
    derive_gram,
    factor_gram,
    paper_fixture,
    synthesize_gram,
    triangular_factor,
)
from .synthesis import SynthesisResult
from .teleport import (
    ProtocolSpec,
    TeleportReport,
    correction_sequence,
    heisenberg_oracle,
    monte_carlo_mean,
    run_teleport,
)

__version__ = "0.1.0"
