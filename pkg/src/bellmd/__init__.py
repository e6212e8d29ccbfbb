"""Measurement-dependence toolkit for Bell-type experiments.

Builds finite local hidden-variable models whose hidden variables may
carry information about the measurement settings, quantifies that
dependence in bits, evaluates CHSH/KCBS statistics and their quantum
predictions, simulates teleportation, and searches for the least
dependence needed to reach a target CHSH value.
"""

__version__ = "0.1.0"

from .errors import InputError, InvariantError
from .hilbert import (
    MAX_TENSOR_DIM,
    OperatorMatrix,
    ProjectiveMeasurement,
    StateVector,
    apply,
    basis_state,
    born_probabilities,
    expectation,
    identity,
    pauli_x,
    pauli_y,
    pauli_z,
    rotated_zx,
    tensor,
    tensor_op,
)
from .infotheory import (
    CmdReport,
    JointDistribution,
    cmd,
    conditional_entropy,
    entropy_bits,
    mutual_information,
    setting_lambda_joint,
)
from .inequalities import (
    KCBS_QUANTUM_OPTIMAL,
    ChshScenario,
    KcbsScenario,
    bell_optimal_scenario,
    chsh_quantum,
    chsh_value,
    kcbs_classical_min,
    kcbs_pentagram,
    kcbs_value,
    lhv_chsh_max,
    outcome_projectors,
)
from .lhv import (
    CorrelationTable,
    LhvModel,
    SettingSpace,
    brans_construct,
    measurement_independent,
    predict,
)
from .mdsearch import (
    SearchConfig,
    SearchOutcome,
    TradeoffCurve,
    TradeoffPoint,
    envelope_min_cmd,
    max_chsh_under_budget,
    min_cmd_for_chsh,
    tradeoff_curve,
)
from .teleport import (
    TeleportInput,
    TeleportTranscript,
    TeleportationProtocol,
    bell_measurement,
    bell_state,
    branch_decomposition,
    run_teleportation,
    sample_outcome_counts,
    verify_no_setting_choice,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances
