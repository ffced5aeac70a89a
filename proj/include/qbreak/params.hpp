#pragma once

#include <string>

#include "qbreak/errors.hpp"

namespace qbreak {

enum class ModelKind { Npm, Ppm3 };

inline std::string to_string(ModelKind k) { return k == ModelKind::Npm ? "npm" : "ppm3"; }

/// Physical and truncation parameters of one simulation point.
///
/// The collective coupling lambda = alpha * N is always derived, never stored.
/// Units are fixed by setting the free single-particle energy scale to one.
struct ModelParams {
    int N = 1;        ///< total particle number
    int Q = 1;        ///< number of species modes k = 1..Q
    double alpha = 0; ///< elementary coupling (> 0 for interacting runs)
    double Cm = 0;    ///< inter-species pair coupling
    int C = 1;        ///< occupation capacity of each mode k >= 1

    double lambda() const { return alpha * static_cast<double>(N); }

    static ModelParams from_lambda(int N, int Q, double lambda, double Cm, int C) {
        ModelParams p;
        p.N = N;
        p.Q = Q;
        p.alpha = lambda / static_cast<double>(N);
        p.Cm = Cm;
        p.C = C;
        return p;
    }

    void validate() const {
        if (N < 1) throw DomainError("ModelParams: N must be >= 1");
        if (Q < 1) throw DomainError("ModelParams: Q must be >= 1");
        if (C < 1) throw DomainError("ModelParams: C must be >= 1");
        if (alpha < 0) throw DomainError("ModelParams: alpha must be >= 0");
    }
};

} // namespace qbreak
