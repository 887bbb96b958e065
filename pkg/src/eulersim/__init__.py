"""Eulerian-cycle synthesis and verification of bounded-strength control schedules."""

__version__ = "0.1.0"

from .averaging import (  # noqa: F401
    AverageReport,
    avg_hamiltonian_first,
    decoupling_residual,
    f_gamma,
    magnus_error_estimate,
    magnus_second_term,
)
from .dynamics import (  # noqa: F401
    OpenSystemModel,
    SimulationReport,
    effective_error_decomposition,
    evolve_schedule,
    phase_invariant_infidelity,
    scaling_order_fit,
    simulate_cycles,
)
from .groups import (  # noqa: F401
    CayleyGraph,
    EulerCycle,
    GeneratorSpec,
    GroupClosure,
    build_cayley_graph,
    close_group,
    commutant_dimension,
    eulerian_cycle,
    group_average,
)
from .pauli import (  # noqa: F401
    OperatorSum,
    PauliWord,
    conjugate,
    frobenius_norm,
    matrix_exp,
    operator_norm,
    pauli_coefficients,
    to_dense,
)
from .pulses import PulseShape, pulse_axes_for_generator, segment_propagator  # noqa: F401
from .reachability import (  # noqa: F401
    InfeasibleTargetError,
    WeightAssignment,
    compose_schemes,
    solve_weights,
    solve_weights_open,
)
from .scheduler import (  # noqa: F401
    Schedule,
    Segment,
    build_bb_schedule,
    build_eulerian_schedule,
    build_symmetric_schedule,
    control_propagator_at,
    schedule_from_dict,
)
