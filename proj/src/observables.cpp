#include "qbreak/observables.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace qbreak {

void OccupationTrace::write_csv(std::ostream& os) const {
    os << "time";
    for (std::size_t k = 0; k < n_mean.size(); ++k) os << ",n" << k;
    os << '\n';
    os.precision(12);
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << times[i];
        for (const auto& col : n_mean) os << ',' << col[i];
        os << '\n';
    }
}

OccupationTrace OccupationTrace::read_csv(std::istream& is) {
    OccupationTrace tr;
    std::string line;
    if (!std::getline(is, line) || line.rfind("time", 0) != 0)
        throw DomainError("trace CSV: missing header");
    const std::size_t cols = std::count(line.begin(), line.end(), ',');
    tr.n_mean.resize(cols);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        tr.times.push_back(std::stod(cell));
        for (auto& col : tr.n_mean) {
            if (!std::getline(row, cell, ',')) throw DomainError("trace CSV: short row");
            col.push_back(std::stod(cell));
        }
    }
    if (tr.times.size() >= 2) tr.t_step = tr.times[1] - tr.times[0];
    return tr;
}

double expectation_nk(const QuantumState& state, const Basis& basis, int k) {
    if (k < 0 || k > basis.params().Q)
        throw DomainError("expectation_nk: mode index out of range");
    if (static_cast<std::uint64_t>(state.amplitudes.size()) != basis.size())
        throw DomainError("expectation_nk: state dimension does not match the basis");
    const int Q = basis.params().Q;
    const int N = basis.params().N;
    double acc = 0.0;
    for (std::uint64_t i = 0; i < basis.size(); ++i) {
        const double w = std::norm(state.amplitudes[static_cast<Eigen::Index>(i)]);
        if (w == 0.0) continue;
        int n;
        if (k == 0) {
            const std::uint16_t* sp = basis.species_row(i);
            int s = 0;
            for (int j = 0; j < Q; ++j) s += sp[j];
            n = N - s;
        } else {
            n = basis.species_row(i)[k - 1];
        }
        acc += w * n;
    }
    return acc;
}

double r_min(const OccupationTrace& trace) {
    if (trace.times.empty()) throw DomainError("r_min: empty trace");
    const double n = trace.params.N;
    double m = trace.n_mean[0][0];
    for (double v : trace.n_mean[0]) m = std::min(m, v);
    return m / n;
}

double threshold(const std::vector<OccupationTrace>& scan) {
    if (scan.empty()) throw DomainError("threshold: empty scan");
    double rmax = 0.0;
    for (const auto& tr : scan) {
        const double r = r_min(tr);
        if (r >= 1.0)
            throw DomainError("threshold: undefined, no depletion at N=" +
                              std::to_string(tr.params.N) + " Q=" + std::to_string(tr.params.Q) +
                              " lambda=" + std::to_string(tr.params.lambda()));
        rmax = std::max(rmax, r);
    }
    return 1.0 - (1.0 - rmax) * 0.8;
}

std::optional<double> detect(const OccupationTrace& trace, double b_th) {
    if (!(b_th > 0.0 && b_th < 1.0)) throw DomainError("detect: b_th must lie in (0, 1)");
    const double n = trace.params.N;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        if (trace.n_mean[0][i] / n < b_th) return trace.times[i];
    return std::nullopt;
}

OccupationTrace record_trace(const SparseHamiltonian& h, const Basis& basis,
                             const PropagationConfig& config) {
    const ModelParams& p = basis.params();
    const int modes = p.Q + 1;

    OccupationTrace tr;
    tr.params = p;
    tr.t_step = config.t_step;
    tr.tol = config.tol;
    tr.n_mean.resize(modes);

    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    psi0[0] = 1.0; // rank 0 is |N, 0, ..., 0>

    const double closure_tol = 10.0 * config.tol;
    std::vector<double> acc(modes);
    evolve(h, psi0, config, [&](const QuantumState& s) {
        // one pass over the basis for all modes at once
        std::fill(acc.begin(), acc.end(), 0.0);
        const int Q = p.Q;
        double wsum = 0.0;
        for (std::uint64_t i = 0; i < basis.size(); ++i) {
            const double w = std::norm(s.amplitudes[static_cast<Eigen::Index>(i)]);
            if (w == 0.0) continue;
            wsum += w;
            const std::uint16_t* sp = basis.species_row(i);
            for (int j = 0; j < Q; ++j) acc[j + 1] += w * sp[j];
        }
        double species = 0.0;
        for (int j = 1; j < modes; ++j) species += acc[j];
        acc[0] = wsum * p.N - species;

        tr.times.push_back(s.time);
        for (int k = 0; k < modes; ++k) tr.n_mean[k].push_back(acc[k]);
        const double total = wsum * p.N;
        if (std::abs(total - p.N) > closure_tol)
            throw PropagationError("record_trace: particle-number closure violated", s.time);
    });
    return tr;
}

} // namespace qbreak
