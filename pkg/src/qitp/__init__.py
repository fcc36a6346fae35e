"""Thermal-state preparation by dilated imaginary-time propagation, simulated exactly."""

from .circuit import (
    Circuit,
    Gate,
    RegisterState,
    build_mme_prep,
    build_thermal_pipeline,
    circuit_unitary,
    compile_qitp_gray,
    outcome_distribution,
    simulate,
)
from .estimator import (
    Estimate,
    ShotRecord,
    dilate_observable,
    estimate_observable_ancilla,
    estimate_observable_pauli,
    estimate_partition,
    reduced_chi2,
    sample,
    uncertainty_study,
)
from .hamiltonian import (
    Hamiltonian,
    Observable,
    PairCoupling,
    builtin_model,
    heisenberg_pair_model,
    load_hamiltonian,
    pauli_decompose,
)
from .linalg import Eigensystem, hermitian_eig, kron, matrix_func_hermitian, partial_trace
from .propagator import (
    QitpParams,
    TrotterPlan,
    gibbs_oracle,
    make_trotter_plan,
    qitp_gs_matrix,
    qitp_th_matrix,
    success_probability,
    trotterized_gibbs_oracle,
)

__version__ = "0.1.0"
