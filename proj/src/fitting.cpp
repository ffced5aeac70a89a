#include "qbreak/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace qbreak {

std::string to_string(FitForm f) {
    switch (f) {
        case FitForm::Linear: return "linear";
        case FitForm::Power: return "power";
        case FitForm::Log: return "log";
        default: return "shifted-power";
    }
}

FitForm fit_form_from_string(const std::string& s) {
    if (s == "linear") return FitForm::Linear;
    if (s == "power") return FitForm::Power;
    if (s == "log") return FitForm::Log;
    if (s == "shifted-power") return FitForm::ShiftedPower;
    throw DomainError("unknown fit form: " + s);
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double rss_of(const VectorXd& r) { return r.squaredNorm(); }

// Closed-form least squares of y on {g(x), 1}; returns (slope, intercept, rss).
struct LinFit {
    double slope, intercept, rss;
};

LinFit linear_ls(const std::vector<double>& g, const std::vector<double>& ys) {
    const int n = static_cast<int>(g.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += g[i];
        sy += ys[i];
        sxx += g[i] * g[i];
        sxy += g[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw DomainError("fit: degenerate abscissae");
    LinFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy * sxx - sx * sxy) / det;
    f.rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - (f.slope * g[i] + f.intercept);
        f.rss += r * r;
    }
    return f;
}

// Generic Levenberg-Marquardt on residuals r(theta) = y - f(x; theta) with
// analytic Jacobian J = df/dtheta. `eval` fills r and J; returns false for an
// inadmissible theta (step rejected).
template <typename Eval>
bool levenberg_marquardt(VectorXd& theta, double& rss, const Eval& eval, int max_iter) {
    const int n_par = static_cast<int>(theta.size());
    VectorXd r;
    MatrixXd J;
    if (!eval(theta, r, J)) return false;
    rss = rss_of(r);
    double mu = 1e-3;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        const MatrixXd JtJ = J.transpose() * J;
        const VectorXd g = J.transpose() * r;
        MatrixXd A = JtJ;
        for (int k = 0; k < n_par; ++k) A(k, k) += mu * std::max(JtJ(k, k), 1e-12);
        const VectorXd step = A.ldlt().solve(g);
        const VectorXd trial = theta + step;
        VectorXd r2;
        MatrixXd J2;
        if (eval(trial, r2, J2) && rss_of(r2) < rss) {
            const double drop = rss - rss_of(r2);
            theta = trial;
            r = r2;
            J = J2;
            rss = rss_of(r);
            mu = std::max(mu * 0.3, 1e-12);
            if (drop <= 1e-14 * (1.0 + rss) && step.norm() <= 1e-12 * (1.0 + theta.norm())) {
                converged = true;
                break;
            }
        } else {
            mu *= 10.0;
            if (mu > 1e12) break;
        }
    }
    // flat residual also counts as converged (exact fits reach rss ~ 0)
    if (!converged) converged = rss <= 1e-20 || mu <= 1e-3;
    return converged && theta.allFinite();
}

constexpr double c_starts[] = {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0};

FitReport fit_power(const std::vector<double>& xs, const std::vector<double>& ys,
                    const FitOptions& opt) {
    const int n = static_cast<int>(xs.size());
    auto eval = [&](const VectorXd& th, VectorXd& r, MatrixXd& J) {
        const double a = th[0], b = th[1], c = th[2];
        r.resize(n);
        J.resize(n, 3);
        for (int i = 0; i < n; ++i) {
            const double xc = std::pow(xs[i], c);
            r[i] = ys[i] - (a * xc + b);
            J(i, 0) = xc;
            J(i, 1) = 1.0;
            J(i, 2) = a * xc * std::log(xs[i]);
        }
        return r.allFinite() && J.allFinite();
    };

    FitReport best;
    best.form = FitForm::Power;
    best.n_points = n;
    best.rss = std::numeric_limits<double>::infinity();
    std::vector<double> g(n);
    for (double c0 : c_starts) {
        for (int i = 0; i < n; ++i) g[i] = std::pow(xs[i], c0);
        LinFit lin;
        try {
            lin = linear_ls(g, ys);
        } catch (const DomainError&) {
            continue;
        }
        VectorXd th(3);
        th << lin.slope, lin.intercept, c0;
        double rss = 0.0;
        const bool ok = levenberg_marquardt(th, rss, eval, opt.max_iterations);
        if (rss < best.rss) {
            best.rss = rss;
            best.params = {{"a", th[0]}, {"b", th[1]}, {"c", th[2]}};
            best.converged = ok;
        }
    }
    return best;
}

FitReport fit_shifted_power(const std::vector<double>& xs, const std::vector<double>& ys,
                            const FitOptions& opt) {
    const int n = static_cast<int>(xs.size());
    const double xmin = *std::min_element(xs.begin(), xs.end());
    const double xmax = *std::max_element(xs.begin(), xs.end());
    const double span = std::max(xmax - xmin, 1e-6 * std::max(1.0, std::abs(xmin)));

    auto eval_free = [&](const VectorXd& th, VectorXd& r, MatrixXd& J) {
        const double a = th[0], d = th[1], c = th[2];
        if (d >= xmin) return false; // x - d must stay positive at every point
        r.resize(n);
        J.resize(n, 3);
        for (int i = 0; i < n; ++i) {
            const double u = xs[i] - d;
            const double uc = std::pow(u, c);
            r[i] = ys[i] - a * uc;
            J(i, 0) = uc;
            J(i, 1) = -a * c * std::pow(u, c - 1.0);
            J(i, 2) = a * uc * std::log(u);
        }
        return r.allFinite() && J.allFinite();
    };

    FitReport best;
    best.form = FitForm::ShiftedPower;
    best.n_points = n;
    best.rss = std::numeric_limits<double>::infinity();
    std::vector<double> g(n);

    if (opt.fixed_shift) {
        const double d = *opt.fixed_shift;
        if (d >= xmin) throw DomainError("fit: fixed shift must lie below min(x)");
        auto eval_fixed = [&](const VectorXd& th, VectorXd& r, MatrixXd& J) {
            const double a = th[0], c = th[1];
            r.resize(n);
            J.resize(n, 2);
            for (int i = 0; i < n; ++i) {
                const double u = xs[i] - d;
                const double uc = std::pow(u, c);
                r[i] = ys[i] - a * uc;
                J(i, 0) = uc;
                J(i, 1) = a * uc * std::log(u);
            }
            return r.allFinite() && J.allFinite();
        };
        for (double c0 : c_starts) {
            double num = 0, den = 0;
            for (int i = 0; i < n; ++i) {
                g[i] = std::pow(xs[i] - d, c0);
                num += g[i] * ys[i];
                den += g[i] * g[i];
            }
            if (den == 0.0) continue;
            VectorXd th(2);
            th << num / den, c0;
            double rss = 0.0;
            const bool ok = levenberg_marquardt(th, rss, eval_fixed, opt.max_iterations);
            if (rss < best.rss) {
                best.rss = rss;
                best.params = {{"a", th[0]}, {"d", d}, {"c", th[1]}};
                best.converged = ok;
            }
        }
        return best;
    }

    // deterministic shift starts: fixed fractions of the data span below xmin
    const double shift_fracs[] = {0.01, 0.05, 0.1, 0.25, 0.5};
    for (double sf : shift_fracs) {
        const double d0 = xmin - sf * span;
        for (double c0 : c_starts) {
            double num = 0, den = 0;
            for (int i = 0; i < n; ++i) {
                g[i] = std::pow(xs[i] - d0, c0);
                num += g[i] * ys[i];
                den += g[i] * g[i];
            }
            if (den == 0.0) continue;
            VectorXd th(3);
            th << num / den, d0, c0;
            double rss = 0.0;
            const bool ok = levenberg_marquardt(th, rss, eval_free, opt.max_iterations);
            if (rss < best.rss) {
                best.rss = rss;
                best.params = {{"a", th[0]}, {"d", th[1]}, {"c", th[2]}};
                best.converged = ok;
            }
        }
    }
    return best;
}

} // namespace

FitReport fit(FitForm form, const std::vector<double>& xs, const std::vector<double>& ys,
              const FitOptions& options) {
    if (xs.size() != ys.size()) throw DomainError("fit: xs and ys differ in length");
    const int n = static_cast<int>(xs.size());
    const int n_par = form == FitForm::Linear || form == FitForm::Log
                          ? 2
                          : (form == FitForm::ShiftedPower && options.fixed_shift ? 2 : 3);
    if (n < n_par + 1) throw DomainError("fit: need at least " + std::to_string(n_par + 1) +
                                         " points for the " + to_string(form) + " form");
    if (form == FitForm::Power || form == FitForm::Log) {
        for (double x : xs)
            if (!(x > 0.0)) throw DomainError("fit: " + to_string(form) + " form needs x > 0");
    }

    FitReport rep;
    rep.form = form;
    rep.n_points = n;
    switch (form) {
        case FitForm::Linear: {
            const LinFit f = linear_ls(xs, ys);
            rep.params = {{"m", f.slope}, {"n", f.intercept}};
            rep.rss = f.rss;
            rep.converged = true;
            return rep;
        }
        case FitForm::Log: {
            std::vector<double> lx(xs.size());
            std::transform(xs.begin(), xs.end(), lx.begin(),
                           [](double x) { return std::log(x); });
            const LinFit f = linear_ls(lx, ys);
            rep.params = {{"p", f.slope}, {"q", f.intercept}};
            rep.rss = f.rss;
            rep.converged = true;
            return rep;
        }
        case FitForm::Power:
            return fit_power(xs, ys, options);
        default:
            return fit_shifted_power(xs, ys, options);
    }
}

std::vector<ExponentPoint> fit_exponent_sweep(
    const std::vector<double>& lambdas,
    const std::vector<std::vector<double>>& xs_per_series,
    const std::vector<std::vector<double>>& ys_per_series) {
    if (lambdas.size() != xs_per_series.size() || lambdas.size() != ys_per_series.size())
        throw DomainError("fit_exponent_sweep: series counts differ");
    std::vector<ExponentPoint> out;
    out.reserve(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        ExponentPoint pt;
        pt.lambda = lambdas[i];
        try {
            const FitReport rep = fit(FitForm::Power, xs_per_series[i], ys_per_series[i]);
            pt.c = rep.params.at("c");
            pt.rss = rep.rss;
            pt.converged = rep.converged;
        } catch (const DomainError&) {
            pt.converged = false;
        }
        out.push_back(pt);
    }
    return out;
}

} // namespace qbreak
