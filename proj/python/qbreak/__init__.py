from ._qbreak import (
    Basis,
    DomainError,
    ModelParams,
    PropagationError,
    ResourceError,
    SparseHamiltonian,
    bogoliubov_v2,
    breaktime,
    build_hamiltonian,
    depletion_backreaction,
    depletion_critical,
    depletion_ppm_sum,
    elliptic_E,
    elliptic_K,
    elliptic_m,
    fit,
    record_trace,
    regime_report,
)

__all__ = [
    "Basis",
    "DomainError",
    "ModelParams",
    "PropagationError",
    "ResourceError",
    "SparseHamiltonian",
    "bogoliubov_v2",
    "breaktime",
    "build_hamiltonian",
    "depletion_backreaction",
    "depletion_critical",
    "depletion_ppm_sum",
    "elliptic_E",
    "elliptic_K",
    "elliptic_m",
    "fit",
    "record_trace",
    "regime_report",
]
