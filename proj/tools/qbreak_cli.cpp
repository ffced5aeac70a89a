#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qbreak/analytics.hpp"
#include "qbreak/scan.hpp"

using namespace qbreak;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ScanConfig load_config(const std::string& file, const std::vector<std::string>& sets) {
    return ScanConfig::parse(file.empty() ? "" : read_file(file), sets);
}

json params_json(const ModelParams& p) {
    return json{{"N", p.N}, {"Q", p.Q},           {"alpha", p.alpha},
                {"lambda", p.lambda()}, {"Cm", p.Cm}, {"C", p.C}};
}

json fit_json(const FitReport& rep) {
    return json{{"form", to_string(rep.form)},
                {"params", rep.params},
                {"rss", rep.rss},
                {"n_points", rep.n_points},
                {"converged", rep.converged}};
}

void read_xy_csv(const std::string& path, std::vector<double>& xs, std::vector<double>& ys) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot read " + path);
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) continue;
        try {
            const double x = std::stod(a), y = std::stod(b);
            xs.push_back(x);
            ys.push_back(y);
        } catch (const std::invalid_argument&) {
            // header or comment row
        }
    }
    if (xs.empty()) throw DomainError("no numeric rows in " + path);
}

int run(int argc, char** argv) {
    CLI::App app{"Break-time simulation and analysis for capped bosonic prototype models"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> sets;
    auto add_config_opts = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_file, "flat key = value config file");
        cmd->add_option("--set", sets, "override, key=value (repeatable)")->take_all();
    };

    auto* cmd_basis = app.add_subcommand("basis-info", "dimension and memory estimate");
    add_config_opts(cmd_basis);

    auto* cmd_evolve = app.add_subcommand("evolve", "single evolution, trace CSV to stdout");
    add_config_opts(cmd_evolve);
    std::string out_trace;
    cmd_evolve->add_option("-o,--output", out_trace, "trace CSV path (default stdout)");

    auto* cmd_scan = app.add_subcommand("scan", "parameter sweep with persistence");
    add_config_opts(cmd_scan);

    auto* cmd_break = app.add_subcommand("breaktime", "threshold + t_q from trace CSVs");
    std::vector<std::string> trace_files;
    cmd_break->add_option("traces", trace_files, "trace CSV files (one scan set)")->required();

    auto* cmd_fit = app.add_subcommand("fit", "least squares on a two-column CSV");
    std::string fit_form_name = "linear", fit_csv;
    double fixed_shift = 0.0;
    cmd_fit->add_option("-f,--form", fit_form_name, "linear | power | log | shifted-power");
    cmd_fit->add_option("csv", fit_csv, "x,y rows")->required();
    auto* opt_fixed_shift =
        cmd_fit->add_option("--fixed-shift", fixed_shift, "freeze d of the shifted-power form");

    auto* cmd_analytic = app.add_subcommand("analytic", "regime report and C_m bounds");
    add_config_opts(cmd_analytic);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // 0 for --help
        return code == 0 ? 0 : 2;
    }

    if (cmd_basis->parsed()) {
        const ScanConfig cfg = load_config(config_file, sets);
        json out = json::array();
        for (std::size_t i = 0; i < cfg.points(); ++i) {
            const ModelParams p = cfg.point(i);
            out.push_back(json{
                {"params", params_json(p)},
                {"dimension", Basis::dimension(p)},
                {"estimated_bytes",
                 estimate_point_bytes(p, cfg.model, cfg.propagation.krylov_dim_max)}});
        }
        std::cout << out.dump(2) << '\n';
    } else if (cmd_evolve->parsed()) {
        const ScanConfig cfg = load_config(config_file, sets);
        const OccupationTrace tr = run_single(cfg);
        if (out_trace.empty()) {
            tr.write_csv(std::cout);
        } else {
            std::ofstream f(out_trace, std::ios::binary);
            if (!f) throw ResourceError("cannot write " + out_trace);
            tr.write_csv(f);
        }
    } else if (cmd_scan->parsed()) {
        const ScanConfig cfg = load_config(config_file, sets);
        const ScanResult res = run_scan(cfg);
        std::cout << "b_th " << res.b_th << ", " << res.points.size() << " points, output in "
                  << cfg.output_dir.string() << '\n';
    } else if (cmd_break->parsed()) {
        std::vector<OccupationTrace> traces;
        for (const auto& path : trace_files) {
            std::ifstream f(path);
            if (!f) throw DomainError("cannot read " + path);
            traces.push_back(OccupationTrace::read_csv(f));
            // the CSV does not carry N; recover it from the t = 0 closure
            auto& tr = traces.back();
            double total = 0.0;
            for (const auto& col : tr.n_mean) total += col.front();
            tr.params.N = static_cast<int>(std::llround(total));
            tr.params.Q = static_cast<int>(tr.n_mean.size()) - 1;
        }
        const double b_th = threshold(traces);
        json out = json::array();
        for (std::size_t i = 0; i < traces.size(); ++i) {
            const auto t_q = detect(traces[i], b_th);
            out.push_back(json{{"trace", trace_files[i]},
                               {"r_min", r_min(traces[i])},
                               {"b_th", b_th},
                               {"t_q", t_q ? json(*t_q) : json(nullptr)}});
        }
        std::cout << out.dump(2) << '\n';
    } else if (cmd_fit->parsed()) {
        std::vector<double> xs, ys;
        read_xy_csv(fit_csv, xs, ys);
        FitOptions opt;
        if (opt_fixed_shift->count() > 0) opt.fixed_shift = fixed_shift;
        const FitReport rep = fit(fit_form_from_string(fit_form_name), xs, ys, opt);
        std::cout << fit_json(rep).dump(2) << '\n';
    } else if (cmd_analytic->parsed()) {
        const ScanConfig cfg = load_config(config_file, sets);
        const ModelParams p = cfg.point(0);
        const RegimeReport rep = rate_and_heuristic_breaktime(p);
        json out{{"params", params_json(p)},
                 {"regime", to_string(rep.regime)},
                 {"formula", rep.formula_used},
                 {"rate", rep.rate},
                 {"q_boundary", rep.q_boundary},
                 {"near_boundary", rep.near_boundary},
                 {"fictitious", rep.fictitious}};
        out["t_q_estimate"] = rep.t_q_estimate ? json(*rep.t_q_estimate) : json(nullptr);
        const CmBounds b = cm_bounds(p.lambda(), p.alpha);
        json bounds{{"expectation", b.expectation},
                    {"order_of_magnitude", b.order_of_magnitude}};
        if (b.final_bound) {
            bounds["final"] = *b.final_bound;
            bounds["final_branch"] = b.final_branch;
        }
        out["cm_bounds"] = bounds;
        std::cout << out.dump(2) << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const PropagationError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 4;
    } catch (const ResourceError& e) {
        std::cerr << "resource rejection: " << e.what() << '\n';
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
