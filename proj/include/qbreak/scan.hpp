#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qbreak/fitting.hpp"
#include "qbreak/observables.hpp"

namespace qbreak {

/// One scan or single-run definition, equivalent to a flat key=value file.
struct ScanConfig {
    ModelKind model = ModelKind::Npm;

    // base parameters; lambda and alpha are alternatives (lambda wins if both)
    int N = 10;
    int Q = 1;
    double lambda = 0.0;
    double Cm = 0.0;
    int C = 1;

    // sweep; empty variable means a single run
    std::string sweep_variable; ///< one of "", "N", "Q", "lambda", "Cm"
    std::vector<double> sweep_values;

    PropagationConfig propagation{1e-6, 0.01, 50.0, 40};
    std::uint64_t memory_budget_bytes = 3ull << 30;

    std::filesystem::path output_dir;
    std::vector<FitForm> fits;
    std::optional<double> fixed_shift; ///< forwarded to shifted-power fits

    /// Parse `key = value` lines ('#' comments); then apply overrides.
    static ScanConfig parse(const std::string& text,
                            const std::vector<std::string>& overrides = {});

    /// Model parameters of sweep point i (or of the single run if no sweep).
    /// For N-sweeps at fixed lambda, alpha is recomputed per point.
    ModelParams point(std::size_t i) const;
    std::size_t points() const { return sweep_variable.empty() ? 1 : sweep_values.size(); }

    void validate() const;
};

struct PointResult {
    ModelParams params;
    double sweep_value = 0.0;
    BreaktimeResult breaktime;
    double wall_seconds = 0.0;
    std::string error; ///< non-empty: propagation failed, point excluded
};

struct ScanResult {
    ScanConfig config;
    double b_th = 0.0;
    std::vector<PointResult> points;
    std::vector<FitReport> fit_reports;
};

/// Evolve one parameter point from the homogeneous initial state.
OccupationTrace run_single(const ScanConfig& cfg);

/// Evolve every sweep point, compute the scan-wide threshold and per-point
/// break-times, apply the requested fits, and persist everything under
/// cfg.output_dir (manifest.json, point_<i>/{trace.csv,summary.json},
/// fits.json, plotdata_<fit>.csv).
ScanResult run_scan(const ScanConfig& cfg);

/// Pre-flight estimate of the working-set bytes of one point.
std::uint64_t estimate_point_bytes(const ModelParams& p, ModelKind kind, int krylov_dim_max);

} // namespace qbreak
