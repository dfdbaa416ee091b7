"""Multipartite entangled coherent states: construction, swapping, entanglement."""
from .coherent import (
    MultimodeSuperposition,
    OrthoBasisPair,
    apply_annihilation_all,
    inner_product,
    ortho_basis,
    overlap,
)
from .errors import (
    DegenerateBasisError,
    DomainError,
    MecsError,
    ModeMismatchError,
    NullStateError,
    TruncationError,
    ValidationError,
)
from .measures import (
    ConcurrenceDiagnostics,
    DensityOperator,
    GeneralPairSpec,
    MeasureReport,
    SplitSpec,
    general_pair_measures,
    measure_report,
    n_tangle_closed,
    n_tangle_numeric,
    pair_concurrence_closed,
    reduced_pair_density,
    solve_max_p,
    special_state_table,
    split_concurrence_closed,
    three_tangle,
    wootters_concurrence,
)
from .states import MecsSpec, QubitState, build_mecs, embed_as_qubits, ghz_state, w_state

__version__ = "0.1.0"
