"""Numerical tolerances and environment knobs shared across the package."""

HERMITICITY_TOL = 1e-12
RECON_TOL = 1e-10
UNITARITY_TOL = 1e-10

# Outcome probabilities below this are treated as impossible when post-selecting.
POSTSELECT_MIN_PROB = 1e-14
# Branches of the joint measurement distribution lighter than this are dropped.
BRANCH_PRUNE_PROB = 1e-15

PAULI_COEFF_CUTOFF = 1e-12
# Slack allowed on p * exp(-2 tau (E_i - E_T)) <= 1 before declaring infeasibility.
FEASIBILITY_TOL = 1e-12

MAX_QUBITS = 12
ANGLE_SIG_DIGITS = 15

OUTPUT_DIR_ENV = "QITP_OUTPUT_DIR"
