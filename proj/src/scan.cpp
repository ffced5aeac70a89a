#include "qbreak/scan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qbreak {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::istringstream is(v);
    std::string cell;
    while (std::getline(is, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

// "C = N" ties the capacity to the particle number per sweep point.
constexpr int c_follows_n = -1;

void apply_key(ScanConfig& cfg, const std::string& key, const std::string& value,
               std::optional<double>& alpha_seen) {
    if (key == "model") {
        if (value == "npm") cfg.model = ModelKind::Npm;
        else if (value == "ppm3") cfg.model = ModelKind::Ppm3;
        else throw DomainError("config: unknown model '" + value + "'");
    } else if (key == "N") cfg.N = std::stoi(value);
    else if (key == "Q") cfg.Q = std::stoi(value);
    else if (key == "lambda") cfg.lambda = std::stod(value);
    else if (key == "alpha") alpha_seen = std::stod(value);
    else if (key == "Cm") cfg.Cm = std::stod(value);
    else if (key == "C") cfg.C = value == "N" ? c_follows_n : std::stoi(value);
    else if (key == "sweep") cfg.sweep_variable = value;
    else if (key == "sweep_values") cfg.sweep_values = parse_list(value);
    else if (key == "tol") cfg.propagation.tol = std::stod(value);
    else if (key == "t_step") cfg.propagation.t_step = std::stod(value);
    else if (key == "t_max") cfg.propagation.t_max = std::stod(value);
    else if (key == "krylov_dim_max") cfg.propagation.krylov_dim_max = std::stoi(value);
    else if (key == "memory_budget_mb")
        cfg.memory_budget_bytes = static_cast<std::uint64_t>(std::stod(value) * (1 << 20));
    else if (key == "output") cfg.output_dir = value;
    else if (key == "fixed_shift") cfg.fixed_shift = std::stod(value);
    else if (key == "fits") {
        cfg.fits.clear();
        std::istringstream is(value);
        std::string cell;
        while (std::getline(is, cell, ','))
            if (!trim(cell).empty()) cfg.fits.push_back(fit_form_from_string(trim(cell)));
    } else throw DomainError("config: unknown key '" + key + "'");
}

} // namespace

ScanConfig ScanConfig::parse(const std::string& text,
                             const std::vector<std::string>& overrides) {
    ScanConfig cfg;
    std::optional<double> alpha_seen;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config: expected key = value: " + line);
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), alpha_seen);
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) throw DomainError("override: expected key=value: " + ov);
        apply_key(cfg, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)), alpha_seen);
    }
    if (alpha_seen && cfg.lambda == 0.0) cfg.lambda = *alpha_seen * cfg.N;
    cfg.validate();
    return cfg;
}

void ScanConfig::validate() const {
    if (!sweep_variable.empty()) {
        if (sweep_variable != "N" && sweep_variable != "Q" && sweep_variable != "lambda" &&
            sweep_variable != "Cm")
            throw DomainError("config: sweep must be one of N, Q, lambda, Cm");
        if (sweep_values.empty()) throw DomainError("config: sweep_values is empty");
        if (!std::is_sorted(sweep_values.begin(), sweep_values.end()) ||
            std::adjacent_find(sweep_values.begin(), sweep_values.end()) != sweep_values.end())
            throw DomainError("config: sweep_values must be strictly increasing");
    }
    for (std::size_t i = 0; i < points(); ++i) point(i).validate();
}

ModelParams ScanConfig::point(std::size_t i) const {
    int n = N, q = Q, c = C;
    double lam = lambda, cm = Cm;
    if (!sweep_variable.empty()) {
        const double v = sweep_values.at(i);
        if (sweep_variable == "N") n = static_cast<int>(std::llround(v));
        else if (sweep_variable == "Q") q = static_cast<int>(std::llround(v));
        else if (sweep_variable == "lambda") lam = v;
        else cm = v;
    }
    if (c == c_follows_n) c = n;
    if (model == ModelKind::Ppm3 && q != 2)
        throw DomainError("config: the ppm3 model requires Q = 2");
    return ModelParams::from_lambda(n, q, lam, cm, c);
}

std::uint64_t estimate_point_bytes(const ModelParams& p, ModelKind kind, int krylov_dim_max) {
    const std::uint64_t dim = Basis::dimension(p);
    const std::uint64_t state = 16ull * dim;
    const std::uint64_t krylov = state * static_cast<std::uint64_t>(krylov_dim_max + 2);
    const std::uint64_t nnz =
        static_cast<std::uint64_t>(estimate_nnz_per_row(p, kind) * static_cast<double>(dim));
    const std::uint64_t matrix = 12ull * nnz + 8ull * (dim + 1);
    const std::uint64_t basis = 2ull * dim * p.Q;
    return krylov + matrix + basis;
}

namespace {

OccupationTrace evolve_point(const ScanConfig& cfg, const ModelParams& p) {
    const Basis basis = Basis::build(p, cfg.memory_budget_bytes);
    const SparseHamiltonian h =
        cfg.model == ModelKind::Npm ? build_npm(p, basis) : build_ppm3(p, basis);
    return record_trace(h, basis, cfg.propagation);
}

json params_json(const ModelParams& p) {
    return json{{"N", p.N}, {"Q", p.Q},           {"alpha", p.alpha},
                {"lambda", p.lambda()}, {"Cm", p.Cm}, {"C", p.C}};
}

json config_json(const ScanConfig& cfg) {
    json fits = json::array();
    for (FitForm f : cfg.fits) fits.push_back(to_string(f));
    json j{{"model", to_string(cfg.model)},
           {"N", cfg.N},
           {"Q", cfg.Q},
           {"lambda", cfg.lambda},
           {"Cm", cfg.Cm},
           {"C", cfg.C},
           {"sweep", cfg.sweep_variable},
           {"sweep_values", cfg.sweep_values},
           {"tol", cfg.propagation.tol},
           {"t_step", cfg.propagation.t_step},
           {"t_max", cfg.propagation.t_max},
           {"krylov_dim_max", cfg.propagation.krylov_dim_max},
           {"fits", fits}};
    if (cfg.fixed_shift) j["fixed_shift"] = *cfg.fixed_shift;
    return j;
}

json fit_json(const FitReport& rep) {
    return json{{"form", to_string(rep.form)},
                {"params", rep.params},
                {"rss", rep.rss},
                {"n_points", rep.n_points},
                {"converged", rep.converged}};
}

double fit_eval(const FitReport& rep, double x) {
    switch (rep.form) {
        case FitForm::Linear: return rep.params.at("m") * x + rep.params.at("n");
        case FitForm::Log: return rep.params.at("p") * std::log(x) + rep.params.at("q");
        case FitForm::Power:
            return rep.params.at("a") * std::pow(x, rep.params.at("c")) + rep.params.at("b");
        default:
            return rep.params.at("a") * std::pow(x - rep.params.at("d"), rep.params.at("c"));
    }
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (f.read(buf, sizeof buf) || f.gcount() > 0)
        for (std::streamsize i = 0; i < f.gcount(); ++i)
            h = (h ^ static_cast<unsigned char>(buf[i])) * 1099511628211ull;
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ResourceError("cannot write " + path.string());
    f << text;
}

} // namespace

OccupationTrace run_single(const ScanConfig& cfg) {
    if (!cfg.sweep_variable.empty())
        throw DomainError("run_single: config defines a sweep; use run_scan");
    return evolve_point(cfg, cfg.point(0));
}

ScanResult run_scan(const ScanConfig& cfg) {
    cfg.validate();
    if (cfg.output_dir.empty()) throw DomainError("run_scan: output directory not set");

    // pre-flight: reject points whose working set exceeds the budget
    std::string rejected;
    for (std::size_t i = 0; i < cfg.points(); ++i) {
        const ModelParams p = cfg.point(i);
        const std::uint64_t bytes =
            estimate_point_bytes(p, cfg.model, cfg.propagation.krylov_dim_max);
        if (bytes > cfg.memory_budget_bytes)
            rejected += " point " + std::to_string(i) + " (~" +
                        std::to_string(bytes >> 20) + " MiB)";
    }
    if (!rejected.empty())
        throw ResourceError("run_scan: memory budget exceeded by" + rejected);

    std::filesystem::create_directories(cfg.output_dir);

    ScanResult res;
    res.config = cfg;
    std::vector<std::filesystem::path> files;
    std::vector<OccupationTrace> traces(cfg.points());
    std::vector<bool> ok(cfg.points(), false);

    for (std::size_t i = 0; i < cfg.points(); ++i) {
        PointResult pr;
        pr.params = cfg.point(i);
        pr.sweep_value = cfg.sweep_variable.empty() ? 0.0 : cfg.sweep_values[i];
        const auto start = std::chrono::steady_clock::now();
        try {
            traces[i] = evolve_point(cfg, pr.params);
            ok[i] = true;
        } catch (const PropagationError& e) {
            pr.error = e.what();
        }
        pr.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        const auto dir = cfg.output_dir / ("point_" + std::to_string(i));
        std::filesystem::create_directories(dir);
        if (ok[i]) {
            std::ofstream f(dir / "trace.csv", std::ios::binary);
            traces[i].write_csv(f);
            files.push_back(dir / "trace.csv");
        }
        res.points.push_back(std::move(pr));
    }

    std::vector<OccupationTrace> good;
    for (std::size_t i = 0; i < traces.size(); ++i)
        if (ok[i]) good.push_back(traces[i]);
    if (good.empty()) throw PropagationError("run_scan: every point failed", 0.0);
    res.b_th = threshold(good);

    std::vector<double> fit_x, fit_y;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        PointResult& pr = res.points[i];
        if (ok[i]) {
            pr.breaktime.r_min = r_min(traces[i]);
            pr.breaktime.b_th = res.b_th;
            pr.breaktime.t_q = detect(traces[i], res.b_th);
            if (pr.breaktime.t_q && !cfg.sweep_variable.empty()) {
                fit_x.push_back(pr.sweep_value);
                fit_y.push_back(*pr.breaktime.t_q);
            }
        }
        json summary{{"params", params_json(pr.params)},
                     {"sweep_value", pr.sweep_value},
                     {"r_min", pr.breaktime.r_min},
                     {"b_th", pr.breaktime.b_th},
                     {"wall_seconds", pr.wall_seconds}};
        summary["t_q"] = pr.breaktime.t_q ? json(*pr.breaktime.t_q) : json(nullptr);
        if (!pr.error.empty()) summary["error"] = pr.error;
        const auto path = cfg.output_dir / ("point_" + std::to_string(i)) / "summary.json";
        write_text(path, summary.dump(2) + "\n");
        files.push_back(path);
    }

    json fits_doc = json::array();
    for (FitForm form : cfg.fits) {
        if (fit_x.size() < 4) { // smallest nonlinear family needs 4 points
            fits_doc.push_back(json{{"form", to_string(form)}, {"skipped", "too few points"}});
            continue;
        }
        FitOptions opt;
        if (form == FitForm::ShiftedPower) opt.fixed_shift = cfg.fixed_shift;
        const FitReport rep = fit(form, fit_x, fit_y, opt);
        res.fit_reports.push_back(rep);
        fits_doc.push_back(fit_json(rep));

        std::ostringstream plot;
        plot.precision(12);
        plot << "x,t_q,fit\n";
        for (std::size_t i = 0; i < fit_x.size(); ++i)
            plot << fit_x[i] << ',' << fit_y[i] << ',' << fit_eval(rep, fit_x[i]) << '\n';
        const auto path = cfg.output_dir / ("plotdata_" + to_string(form) + ".csv");
        write_text(path, plot.str());
        files.push_back(path);
    }
    write_text(cfg.output_dir / "fits.json", fits_doc.dump(2) + "\n");
    files.push_back(cfg.output_dir / "fits.json");

    json manifest{{"config", config_json(cfg)}, {"b_th", res.b_th}};
    json flist = json::array();
    for (const auto& f : files)
        flist.push_back(json{{"path", std::filesystem::relative(f, cfg.output_dir).string()},
                             {"fnv1a64", hash_hex(fnv1a_file(f))}});
    manifest["files"] = flist;
    json excluded = json::array();
    for (const auto& pr : res.points)
        if (!pr.error.empty() || !pr.breaktime.t_q)
            excluded.push_back(pr.sweep_value);
    manifest["excluded_points"] = excluded;
    double wall = 0.0;
    for (const auto& pr : res.points) wall += pr.wall_seconds;
    manifest["wall_seconds_total"] = wall;
    write_text(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");

    return res;
}

} // namespace qbreak
