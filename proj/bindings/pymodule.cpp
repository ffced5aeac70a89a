#include <cstring>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qbreak/analytics.hpp"
#include "qbreak/fitting.hpp"
#include "qbreak/observables.hpp"

namespace py = pybind11;
using namespace qbreak;

namespace {

ModelKind kind_from_string(const std::string& s) {
    if (s == "npm") return ModelKind::Npm;
    if (s == "ppm3") return ModelKind::Ppm3;
    throw DomainError("unknown model '" + s + "' (expected npm or ppm3)");
}

// trace as (times[n], occupations[n, Q+1]) numpy arrays
py::tuple trace_arrays(const OccupationTrace& tr) {
    const auto n = static_cast<py::ssize_t>(tr.samples());
    const auto q1 = static_cast<py::ssize_t>(tr.n_mean.size());
    py::array_t<double> times(std::vector<py::ssize_t>{n}), occ({n, q1});
    std::memcpy(times.mutable_data(), tr.times.data(),
                static_cast<std::size_t>(n) * sizeof(double));
    auto o = occ.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i)
        for (py::ssize_t k = 0; k < q1; ++k)
            o(i, k) = tr.n_mean[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    return py::make_tuple(times, occ);
}

} // namespace

PYBIND11_MODULE(_qbreak, m) {
    m.doc() = "Break-time simulation for capped bosonic prototype models";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception<PropagationError>(m, "PropagationError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](int N, int Q, double lam, double Cm, int C) {
                 if (N < 1) throw DomainError("ModelParams: N must be >= 1");
                 // C omitted (or <= 0) ties the capacity to N
                 ModelParams p = ModelParams::from_lambda(N, Q, lam, Cm, C > 0 ? C : N);
                 p.validate();
                 return p;
             }),
             py::arg("N"), py::arg("Q"), py::arg("lam"), py::arg("Cm") = 0.0,
             py::arg("C") = -1)
        .def_readwrite("N", &ModelParams::N)
        .def_readwrite("Q", &ModelParams::Q)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("Cm", &ModelParams::Cm)
        .def_readwrite("C", &ModelParams::C)
        .def_property_readonly("lam", &ModelParams::lambda)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(N=" + std::to_string(p.N) + ", Q=" + std::to_string(p.Q) +
                   ", lam=" + std::to_string(p.lambda()) + ", Cm=" + std::to_string(p.Cm) +
                   ", C=" + std::to_string(p.C) + ")";
        });

    py::class_<Basis>(m, "Basis")
        .def_static("build", &Basis::build, py::arg("params"),
                    py::arg("memory_budget_bytes") = std::uint64_t{3} << 30)
        .def_static("dimension", &Basis::dimension)
        .def("__len__", &Basis::size)
        .def("unrank", [](const Basis& b, std::uint64_t r) { return b.unrank(r); })
        .def("rank", [](const Basis& b, const std::vector<int>& occ) {
            return b.rank(occ);
        });

    py::class_<SparseHamiltonian>(m, "SparseHamiltonian")
        .def_readonly("dim", &SparseHamiltonian::dim)
        .def_property_readonly("nnz", &SparseHamiltonian::nnz)
        .def("inf_norm", &SparseHamiltonian::inf_norm)
        .def("symmetry_defect", &SparseHamiltonian::symmetry_defect)
        .def("matvec", [](const SparseHamiltonian& h, const Eigen::VectorXcd& x) {
            Eigen::VectorXcd y(x.size());
            h.matvec(x.data(), y.data());
            return y;
        });

    m.def("build_hamiltonian",
          [](const ModelParams& p, const std::string& model) {
              const Basis b = Basis::build(p);
              return kind_from_string(model) == ModelKind::Npm ? build_npm(p, b)
                                                               : build_ppm3(p, b);
          },
          py::arg("params"), py::arg("model") = "npm");

    m.def("record_trace",
          [](const ModelParams& p, const std::string& model, double tol, double t_step,
             double t_max, int krylov_dim_max) {
              const Basis b = Basis::build(p);
              const SparseHamiltonian h = kind_from_string(model) == ModelKind::Npm
                                              ? build_npm(p, b)
                                              : build_ppm3(p, b);
              const PropagationConfig cfg{tol, t_step, t_max, krylov_dim_max};
              return trace_arrays(record_trace(h, b, cfg));
          },
          py::arg("params"), py::arg("model") = "npm", py::arg("tol") = 1e-6,
          py::arg("t_step") = 0.01, py::arg("t_max") = 10.0,
          py::arg("krylov_dim_max") = 40,
          "Evolve from the homogeneous initial state; returns (times, occupations).");

    m.def("breaktime",
          [](const std::vector<py::tuple>& traces, const std::vector<int>& Ns) {
              if (traces.size() != Ns.size())
                  throw DomainError("traces and Ns must have the same length");
              std::vector<OccupationTrace> trs;
              for (std::size_t i = 0; i < traces.size(); ++i) {
                  auto times = traces[i][0].cast<std::vector<double>>();
                  auto occ = traces[i][1].cast<py::array_t<double>>();
                  auto o = occ.unchecked<2>();
                  OccupationTrace tr;
                  tr.params.N = Ns[i];
                  tr.params.Q = static_cast<int>(o.shape(1)) - 1;
                  tr.times = std::move(times);
                  tr.n_mean.resize(static_cast<std::size_t>(o.shape(1)));
                  for (py::ssize_t k = 0; k < o.shape(1); ++k)
                      for (py::ssize_t j = 0; j < o.shape(0); ++j)
                          tr.n_mean[static_cast<std::size_t>(k)].push_back(o(j, k));
                  trs.push_back(std::move(tr));
              }
              const double b_th = threshold(trs);
              py::list out;
              for (const auto& tr : trs) {
                  const auto t_q = detect(tr, b_th);
                  py::dict d;
                  d["r_min"] = r_min(tr);
                  d["b_th"] = b_th;
                  d["t_q"] = t_q ? py::object(py::float_(*t_q)) : py::none();
                  out.append(d);
              }
              return out;
          },
          py::arg("traces"), py::arg("Ns"),
          "Scan-wide threshold and first-crossing times for (times, occupations) pairs.");

    m.def("fit",
          [](const std::string& form, const std::vector<double>& xs,
             const std::vector<double>& ys, std::optional<double> fixed_shift) {
              FitOptions opt;
              opt.fixed_shift = fixed_shift;
              const FitReport rep = fit(fit_form_from_string(form), xs, ys, opt);
              py::dict d;
              d["form"] = to_string(rep.form);
              d["params"] = rep.params;
              d["rss"] = rep.rss;
              d["converged"] = rep.converged;
              return d;
          },
          py::arg("form"), py::arg("xs"), py::arg("ys"),
          py::arg("fixed_shift") = py::none());

    m.def("bogoliubov_v2", [](double lam) { return bogoliubov_coeffs(lam).v2; },
          py::arg("lam"));
    m.def("depletion_ppm_sum", &depletion_ppm_sum, py::arg("lam"), py::arg("kmax"));
    m.def("depletion_backreaction",
          [](double lam, int N, int Q, const std::string& model) {
              return depletion_backreaction(lam, N, Q, kind_from_string(model));
          },
          py::arg("lam"), py::arg("N"), py::arg("Q"), py::arg("model") = "npm");
    m.def("depletion_critical", &depletion_critical, py::arg("N"), py::arg("Q"));
    m.def("elliptic_K", &elliptic_K, py::arg("m"));
    m.def("elliptic_E", &elliptic_E, py::arg("m"));
    m.def("elliptic_m", &elliptic_m, py::arg("lam"));
    m.def("regime_report", [](const ModelParams& p) {
        const RegimeReport rep = rate_and_heuristic_breaktime(p);
        py::dict d;
        d["regime"] = to_string(rep.regime);
        d["formula"] = rep.formula_used;
        d["rate"] = rep.rate;
        d["q_boundary"] = rep.q_boundary;
        d["near_boundary"] = rep.near_boundary;
        d["fictitious"] = rep.fictitious;
        d["t_q_estimate"] =
            rep.t_q_estimate ? py::object(py::float_(*rep.t_q_estimate)) : py::none();
        return d;
    });
}
