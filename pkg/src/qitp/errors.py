"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class QitpError(Exception):
    code = "qitp_error"
    exit_code = 1


class NonSquare(QitpError, ValueError):
    code = "non_square"
    exit_code = 10


class NonHermitian(QitpError, ValueError):
    code = "non_hermitian"
    exit_code = 11


class DomainError(QitpError, ValueError):
    code = "domain_error"
    exit_code = 12


class BadDimension(QitpError, ValueError):
    code = "bad_dimension"
    exit_code = 13


class BadIndex(QitpError, IndexError):
    code = "bad_index"
    exit_code = 14


class SchemaError(QitpError, ValueError):
    code = "schema_error"
    exit_code = 20


class PairSumMismatch(QitpError, ValueError):
    code = "pair_sum_mismatch"
    exit_code = 21


class BadSize(QitpError, ValueError):
    code = "bad_size"
    exit_code = 22


class InfeasibleParams(QitpError, ValueError):
    code = "infeasible_params"
    exit_code = 30


class NoPairTerms(QitpError, ValueError):
    code = "no_pair_terms"
    exit_code = 31


class InvalidCircuit(QitpError, ValueError):
    code = "invalid_circuit"
    exit_code = 40


class ZeroProbabilityPostselection(QitpError, RuntimeError):
    code = "zero_probability_postselection"
    exit_code = 41


class DegenerateObservable(QitpError, ValueError):
    code = "degenerate_observable"
    exit_code = 50


class NoSuccesses(QitpError, RuntimeError):
    code = "no_successes"
    exit_code = 51


class ZeroSigma(QitpError, ValueError):
    code = "zero_sigma"
    exit_code = 52


class EmptyResult(QitpError, ValueError):
    code = "empty_result"
    exit_code = 60


class ConfigError(QitpError, ValueError):
    code = "config_error"
    exit_code = 2
