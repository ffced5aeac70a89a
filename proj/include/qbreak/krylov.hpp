#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qbreak/model.hpp"

namespace qbreak {

/// Amplitude vector together with the physical time it belongs to.
struct QuantumState {
    Eigen::VectorXcd amplitudes;
    double time = 0.0;
};

struct PropagationConfig {
    double tol = 1e-6;        ///< total 2-norm error budget over [0, t_max]
    double t_step = 0.01;     ///< observable sampling interval
    double t_max = 10.0;      ///< final time
    int krylov_dim_max = 40;  ///< Lanczos subspace cap per restart
};

struct PropagationStats {
    std::uint64_t matvecs = 0;
    std::uint64_t restarts = 0;
    double error_bound = 0.0; ///< accumulated certified 2-norm error
};

/// Called at every sample time t = j * t_step (including t = 0).
using Observer = std::function<void(const QuantumState&)>;

/// Propagate psi0 under exp(-i H t) on the uniform sample grid, invoking the
/// observer at every grid point. The accumulated error bound is kept below
/// tol by construction (linear budget in elapsed time); PropagationError is
/// thrown if the subspace cap cannot meet the local budget.
PropagationStats evolve(const SparseHamiltonian& h, const Eigen::VectorXcd& psi0,
                        const PropagationConfig& config, const Observer& observer);

/// Reference propagator via full dense diagonalization. Cubic in the
/// dimension; refuses dimensions above 2000.
void evolve_dense_oracle(const SparseHamiltonian& h, const Eigen::VectorXcd& psi0,
                         const PropagationConfig& config, const Observer& observer);

} // namespace qbreak
