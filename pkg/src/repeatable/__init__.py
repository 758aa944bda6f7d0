"""Repeatable procedures and maps in the open dynamics of a qubit."""

from .errors import ValidationError
from .linalg import (
    expm_hermitian_generator,
    hermitian_eig,
    max_abs_diff,
    partial_trace,
    tensor,
    trace_distance,
    verify_hermitian,
    verify_projector,
    verify_psd,
    verify_unitary,
)
from .states import (
    bloch_to_density,
    density_to_bloch,
    product_state,
    random_bloch,
    random_density,
)
from .procedures import (
    Procedure,
    RepeatabilityReport,
    advance_environment,
    ceil_map,
    floor_map,
    is_repeatable,
    is_repeatable_to_depth,
    repetition_drift,
)
from .channels import (
    QubitChannel,
    UnitaryMixture,
    channel_distance,
    channel_from_procedure,
    decompose_unital,
    is_completely_positive,
    is_trace_preserving,
    is_unital,
    mixture_to_channel,
    procedure_from_mixture,
)
from .paper_examples import (
    DilationProcedure,
    DilationSpec,
    PaperInteractionParams,
    analytic_environment_update,
    analytic_update,
    build_repeatable_dilation,
    paper_procedure,
    paper_unitary,
    run_paper_suite,
)

__version__ = "0.1.0"
