#include "qbreak/krylov.hpp"

#include <algorithm>
#include <cmath>

namespace qbreak {

namespace {

// 15-point Gauss-Legendre rule on [-1, 1].
constexpr int gl_n = 15;
constexpr double gl_x[gl_n] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double gl_w[gl_n] = {
    0.03075324199611727, 0.07036604748810812, 0.1071592204671719,
    0.1395706779261543,  0.1662692058169939,  0.1861610000155622,
    0.1984314853271116,  0.2025782419255613,  0.1984314853271116,
    0.1861610000155622,  0.1662692058169939,  0.1395706779261543,
    0.1071592204671719,  0.07036604748810812, 0.03075324199611727};

void check_config(const PropagationConfig& c) {
    if (!(c.t_step > 0.0)) throw DomainError("PropagationConfig: t_step must be > 0");
    if (!(c.t_max > 0.0)) throw DomainError("PropagationConfig: t_max must be > 0");
    if (!(c.tol > 0.0)) throw DomainError("PropagationConfig: tol must be > 0");
    if (c.krylov_dim_max < 2) throw DomainError("PropagationConfig: krylov_dim_max must be >= 2");
}

std::uint64_t grid_points(const PropagationConfig& c) {
    const double n = c.t_max / c.t_step;
    const std::uint64_t g = static_cast<std::uint64_t>(std::llround(n));
    if (std::abs(n - static_cast<double>(g)) > 1e-9 * std::max(1.0, n) || g == 0)
        throw DomainError("PropagationConfig: t_max must be an integer multiple of t_step");
    return g;
}

// One Lanczos factorization H V = V T + beta_m v_{m+1} e_m^T from the unit
// start vector, with full reorthogonalization. Columns of V beyond m are
// scratch. Returns the subspace size reached.
struct Factorization {
    int m = 0;
    double beta_tail = 0.0;     // coupling out of the subspace (0: invariant)
    Eigen::VectorXd theta;       // eigenvalues of T
    Eigen::MatrixXd S;           // eigenvectors of T
    bool happy = false;
};

Factorization lanczos(const SparseHamiltonian& h, Eigen::MatrixXcd& V,
                      const Eigen::VectorXcd& start, int m_max, double breakdown_tol,
                      std::uint64_t& matvecs) {
    const auto dim = static_cast<Eigen::Index>(h.dim);
    Eigen::VectorXd alpha(m_max), beta(m_max);
    Eigen::VectorXcd w(dim);

    V.col(0) = start;
    int m = m_max;
    bool happy = false;
    double beta_tail = 0.0;
    for (int j = 0; j < m_max; ++j) {
        h.matvec(V.col(j).data(), w.data());
        ++matvecs;
        alpha[j] = w.dot(V.col(j)).real();
        w -= alpha[j] * V.col(j);
        if (j > 0) w -= beta[j - 1] * V.col(j - 1);
        // two reorthogonalization sweeps keep the basis orthonormal to
        // machine precision
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
        const double b = w.norm();
        if (b <= breakdown_tol) {
            m = j + 1;
            happy = true;
            beta_tail = 0.0;
            break;
        }
        if (j + 1 < m_max) {
            beta[j] = b;
            V.col(j + 1) = w / b;
        } else {
            beta_tail = b;
        }
    }

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        T(j, j) = alpha[j];
        if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

    Factorization f;
    f.m = m;
    f.beta_tail = beta_tail;
    f.theta = es.eigenvalues();
    f.S = es.eigenvectors();
    f.happy = happy;
    return f;
}

// y(dt) = S exp(-i Theta dt) S^T e1 in the Krylov coordinates.
Eigen::VectorXcd krylov_coefficients(const Factorization& f, double dt) {
    const int m = f.m;
    Eigen::VectorXcd phase(m);
    for (int j = 0; j < m; ++j)
        phase[j] = std::polar(1.0, -f.theta[j] * dt) * f.S(0, j);
    return f.S * phase;
}

// Certified bound on the 2-norm defect of exp(-iHt)v against the Krylov
// approximation over [0, dt]: beta_m * integral of |[exp(-iTs) e1]_m| ds.
double error_bound(const Factorization& f, double dt) {
    if (f.beta_tail == 0.0) return 0.0;
    const int m = f.m;
    double integral = 0.0;
    for (int i = 0; i < gl_n; ++i) {
        const double s = 0.5 * dt * (gl_x[i] + 1.0);
        std::complex<double> g(0.0, 0.0);
        for (int j = 0; j < m; ++j)
            g += f.S(m - 1, j) * f.S(0, j) * std::polar(1.0, -f.theta[j] * s);
        integral += gl_w[i] * std::abs(g);
    }
    return f.beta_tail * 0.5 * dt * integral;
}

} // namespace

PropagationStats evolve(const SparseHamiltonian& h, const Eigen::VectorXcd& psi0,
                        const PropagationConfig& config, const Observer& observer) {
    check_config(config);
    if (static_cast<std::uint64_t>(psi0.size()) != h.dim)
        throw DomainError("evolve: state dimension does not match the Hamiltonian");
    const std::uint64_t n_grid = grid_points(config);

    const double nrm0 = psi0.norm();
    if (nrm0 == 0.0) throw DomainError("evolve: zero initial state");

    // Linear error budget: spend at most rate * dt per advanced interval so
    // the accumulated bound stays below tol for any restart pattern.
    const double rate = 0.7 * config.tol / config.t_max;
    const double breakdown_tol = 1e-12 * std::max(1.0, h.inf_norm());

    const auto dim = static_cast<Eigen::Index>(h.dim);
    Eigen::MatrixXcd V(dim, config.krylov_dim_max);
    Eigen::VectorXcd w = psi0 / nrm0;
    double scale = nrm0;

    PropagationStats stats;
    QuantumState sample;
    observer({psi0, 0.0});

    double t_cur = 0.0;
    std::uint64_t g_done = 0; // grid points already emitted (beyond t = 0)
    while (g_done < n_grid) {
        const double t_rem = config.t_max - t_cur;
        const Factorization f = lanczos(h, V, w, config.krylov_dim_max, breakdown_tol,
                                        stats.matvecs);
        ++stats.restarts;

        double dt = t_rem;
        double err = error_bound(f, dt);
        while (err > rate * dt) {
            dt *= 0.6;
            if (dt < 1e-3 * config.t_step)
                throw PropagationError(
                    "evolve: Krylov subspace cap too small for the requested tolerance",
                    t_cur);
            err = error_bound(f, dt);
        }
        stats.error_bound += err;

        // Emit every grid point inside the certified interval.
        const double t_end = t_cur + dt;
        while (g_done < n_grid) {
            const double t_g = static_cast<double>(g_done + 1) * config.t_step;
            if (t_g > t_end * (1.0 + 1e-12)) break;
            const Eigen::VectorXcd y = krylov_coefficients(f, t_g - t_cur);
            sample.amplitudes = scale * (V.leftCols(f.m) * y);
            sample.time = t_g;
            observer(sample);
            ++g_done;
        }
        if (g_done >= n_grid) break;

        const Eigen::VectorXcd y = krylov_coefficients(f, dt);
        w = V.leftCols(f.m) * y;
        const double nrm = w.norm();
        w /= nrm;
        scale *= nrm;
        t_cur = t_end;
    }
    return stats;
}

void evolve_dense_oracle(const SparseHamiltonian& h, const Eigen::VectorXcd& psi0,
                         const PropagationConfig& config, const Observer& observer) {
    check_config(config);
    if (h.dim > 2000) throw ResourceError("evolve_dense_oracle: dimension above 2000");
    if (static_cast<std::uint64_t>(psi0.size()) != h.dim)
        throw DomainError("evolve_dense_oracle: state dimension does not match the Hamiltonian");
    const std::uint64_t n_grid = grid_points(config);

    const auto dim = static_cast<Eigen::Index>(h.dim);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(dim, dim);
    for (std::uint64_t i = 0; i < h.dim; ++i)
        for (std::uint64_t p = h.row_ptr[i]; p < h.row_ptr[i + 1]; ++p)
            dense(static_cast<Eigen::Index>(i), h.col[p]) = h.val[p];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);

    const Eigen::VectorXcd c0 = es.eigenvectors().transpose() * psi0;
    QuantumState sample;
    observer({psi0, 0.0});
    for (std::uint64_t g = 1; g <= n_grid; ++g) {
        const double t = static_cast<double>(g) * config.t_step;
        Eigen::VectorXcd c(dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            c[j] = std::polar(1.0, -es.eigenvalues()[j] * t) * c0[j];
        sample.amplitudes = es.eigenvectors() * c;
        sample.time = t;
        observer(sample);
    }
}

} // namespace qbreak
