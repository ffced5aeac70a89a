#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qbreak/errors.hpp"

namespace qbreak {

/// The four break-time fit families:
///   linear        y = m x + n
///   power         y = a x^c + b
///   log           y = p ln x + q
///   shifted-power y = a (x - d)^c
enum class FitForm { Linear, Power, Log, ShiftedPower };

std::string to_string(FitForm f);
FitForm fit_form_from_string(const std::string& s);

struct FitOptions {
    std::optional<double> fixed_shift; ///< freeze d of the shifted-power form
    int max_iterations = 200;
};

struct FitReport {
    FitForm form = FitForm::Linear;
    std::map<std::string, double> params; ///< named estimates, e.g. {"m", "n"}
    double rss = 0.0;
    int n_points = 0;
    bool converged = false;
};

/// Unweighted least squares. Linear and log forms are closed form; power and
/// shifted-power run Levenberg-Marquardt from a deterministic multi-start
/// grid, best rss wins. Deterministic given inputs.
FitReport fit(FitForm form, const std::vector<double>& xs, const std::vector<double>& ys,
              const FitOptions& options = {});

/// Per-series power fit, reporting the exponent curve c(lambda). A failing
/// series yields an entry with converged = false instead of aborting.
struct ExponentPoint {
    double lambda = 0.0;
    double c = 0.0;
    double rss = 0.0;
    bool converged = false;
};
std::vector<ExponentPoint> fit_exponent_sweep(
    const std::vector<double>& lambdas,
    const std::vector<std::vector<double>>& xs_per_series,
    const std::vector<std::vector<double>>& ys_per_series);

} // namespace qbreak
