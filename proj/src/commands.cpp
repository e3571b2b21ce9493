// SPDX-License-Identifier: MIT
#include "nlbs/commands.hpp"

#include "nlbs/error.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace nlbs {

using nlohmann::json;

namespace {

class Output {
public:
    explicit Output(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open " + path + " for writing");
    }

    std::ofstream& stream() { return out_; }

    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

std::string prepare_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return dir;
}

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void write_json(const std::string& path, const json& doc) {
    Output o(path);
    o.stream() << doc.dump(2) << '\n';
    o.close();
}

json history_json(const std::vector<ConvergenceRecord>& history) {
    json rows = json::array();
    for (const auto& h : history) rows.push_back({{"iteration", h.n}, {"d1", h.d1}, {"d2", h.d2}, {"dinf", h.dinf}});
    return rows;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json run_metadata(const RunConfig& config, const std::string& command, const NonlinearResult& res, double wall) {
    json doc = to_json(config);
    json run = {{"command", command},
                {"iterations", res.iterations},
                {"converged", res.converged},
                {"history", history_json(res.history)},
                {"wall_time_s", wall}};
    if (!res.converged) run["warning"] = "outer iteration stopped without reaching solver.tol";
    doc["run"] = run;
    return doc;
}

void write_convergence_csv(const std::string& path, const NonlinearResult& res, std::size_t max_iter) {
    Output o(path);
    auto& s = o.stream();
    s << "Iteration,Norm 1,Norm 2,Norm inf\n";
    for (const auto& h : res.history)
        s << h.n << ',' << format_number(h.d1) << ',' << format_number(h.d2) << ',' << format_number(h.dinf) << '\n';
    if (!res.converged)
        s << "# warning: not converged after " << res.iterations << " of max_iter " << max_iter << " sweeps\n";
    o.close();
}

const char* verdict_name(NodeVerdict v) {
    switch (v) {
    case NodeVerdict::Satisfied: return "satisfied";
    case NodeVerdict::Violated: return "violated";
    case NodeVerdict::Degenerate: return "degenerate";
    }
    return "unknown";
}

json node_json(const EllipticityNode& n) {
    return {{"i", n.i}, {"j", n.j}, {"S1", n.s1}, {"S2", n.s2}, {"max_eigenvalue", n.max_eigenvalue}};
}

} // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_surface_csv(const std::string& path, const GridSpec& grid, const Eigen::MatrixXd& values,
                       const std::string& value_name) {
    Output o(path);
    auto& s = o.stream();
    s << "x1,x2,S1,S2," << value_name << '\n';
    const std::size_t n = grid.nodes();
    for (std::size_t i = 0; i < n; ++i) {
        const std::string xi = format_number(grid.coordinate(i));
        const std::string si = format_number(grid.price(i));
        for (std::size_t j = 0; j < n; ++j) {
            s << xi << ',' << format_number(grid.coordinate(j)) << ',' << si << ',' << format_number(grid.price(j))
              << ',' << format_number(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
        }
    }
    o.close();
}

int cmd_price(const RunConfig& config, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = solve_nonlinear(config.scenario, config.solver);
    const double wall = seconds_since(start);

    const auto dir = prepare_dir(config.out_dir);
    write_surface_csv(join(dir, "surface.csv"), config.scenario.grid, res.terminal.values);
    write_surface_csv(join(dir, "cost_field.csv"), config.scenario.grid, res.cost_field, "G");
    write_json(join(dir, "metadata.json"), run_metadata(config, "price", res, wall));

    log << "price: " << res.iterations << " sweeps, " << (res.converged ? "converged" : "NOT converged");
    if (!res.history.empty()) log << ", last dinf " << format_number(res.history.back().dinf);
    log << '\n';
    return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_analytic(const RunConfig& config, std::ostream& log) {
    const Scenario& s = config.scenario;
    const GridSpec& g = s.grid;
    const auto n = static_cast<Eigen::Index>(g.nodes());
    Eigen::MatrixXd values(n, n);
    std::size_t failures = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double s1 = g.price(static_cast<std::size_t>(i));
            const double s2 = g.price(static_cast<std::size_t>(j));
            try {
                values(i, j) = cbest_price(s1, s2, s.market.T, s.market, s.payoff, config.analytic_form);
            } catch (const std::exception&) {
                values(i, j) = std::numeric_limits<double>::quiet_NaN();
                ++failures;
            }
        }
    }
    const auto dir = prepare_dir(config.out_dir);
    write_surface_csv(join(dir, "analytic_surface.csv"), g, values);
    log << "analytic: wrote " << n * n << " nodes";
    if (failures > 0) log << ", " << failures << " nodes could not be evaluated (written as nan)";
    log << '\n';
    return kExitOk;
}

int cmd_leland_1d(double sigma, double c0, double dt, const std::string& out_dir, std::ostream& log) {
    if (!(sigma > 0.0)) throw ConfigError("leland.sigma", "sigma must be positive");
    if (!(c0 >= 0.0)) throw ConfigError("leland.C0", "C0 must be nonnegative");
    if (!(dt > 0.0)) throw ConfigError("leland.dt", "dt must be positive");
    const double le = leland_number(sigma, c0, dt);
    const bool ok = leland_well_posed(le);
    log << "Le = " << format_number(le) << " (" << (ok ? "well_posed" : "ill_posed") << ")\n";

    const auto dir = prepare_dir(out_dir);
    write_json(join(dir, "leland_1d.json"),
               {{"sigma", sigma}, {"C0", c0}, {"dt", dt}, {"leland_number", le},
                {"classification", ok ? "well_posed" : "ill_posed"}});
    return kExitOk;
}

int cmd_leland(const RunConfig& config, std::ostream& log) {
    if (config.leland.one_d) {
        const Scenario& s = config.scenario;
        double c0 = config.leland.c0;
        if (!std::isfinite(c0)) {
            if (const auto* k = std::get_if<ConstantCost>(&s.cost)) c0 = k->c0;
            else if (const auto* e = std::get_if<ExponentialCost>(&s.cost)) c0 = e->c0;
            else throw ConfigError("leland.C0", "required for sampled cost models");
        }
        const double sigma = std::isfinite(config.leland.sigma) ? config.leland.sigma : s.market.sigmas(0);
        const double dt = std::isfinite(config.leland.dt) ? config.leland.dt : s.dt_tc;
        return cmd_leland_1d(sigma, c0, dt, config.out_dir, log);
    }

    if (const auto* s = std::get_if<SampledCost>(&config.scenario.cost); s && !s->derivative)
        throw ConfigError("cost.derivative", "cost derivative required");

    Eigen::MatrixXd surface;
    bool converged = true;
    if (config.leland.source == LelandSource::Analytic) {
        surface = analytic_surface(config.scenario);
    } else {
        const auto res = solve_nonlinear(config.scenario, config.solver);
        surface = res.terminal.values;
        converged = res.converged;
    }
    const auto report = scan_surface(surface, config.scenario, config.leland.scan);

    const auto dir = prepare_dir(config.out_dir);
    json doc = {{"satisfied", report.satisfied},
                {"violated", report.violated},
                {"degenerate", report.degenerate},
                {"fraction_satisfied", report.fraction_satisfied},
                {"all_satisfied", report.all_satisfied()},
                {"surface_source", config.leland.source == LelandSource::Solve ? "solve" : "analytic"},
                {"surface_converged", converged}};
    if (report.satisfied + report.violated > 0) doc["worst_node"] = node_json(report.nodes[report.worst]);
    write_json(join(dir, "ellipticity_report.json"), doc);

    if (config.node_csv) {
        Output o(join(dir, "ellipticity_nodes.csv"));
        auto& s = o.stream();
        s << "i,j,S1,S2,max_eigenvalue,verdict\n";
        for (const auto& node : report.nodes)
            s << node.i << ',' << node.j << ',' << format_number(node.s1) << ',' << format_number(node.s2) << ','
              << format_number(node.max_eigenvalue) << ',' << verdict_name(node.verdict) << '\n';
        o.close();
    }
    log << "leland: " << report.satisfied << " satisfied, " << report.violated << " violated, " << report.degenerate
        << " degenerate (fraction satisfied " << format_number(report.fraction_satisfied) << ")\n";
    return converged ? kExitOk : kExitNotConverged;
}

int cmd_converge(const RunConfig& config, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = solve_nonlinear(config.scenario, config.solver);
    const double wall = seconds_since(start);

    const auto dir = prepare_dir(config.out_dir);
    write_convergence_csv(join(dir, "convergence.csv"), res, config.solver.max_iter);
    write_json(join(dir, "metadata.json"), run_metadata(config, "converge", res, wall));

    log << "Iteration  Norm 1  Norm 2  Norm inf\n";
    for (const auto& h : res.history)
        log << h.n << "  " << h.d1 << "  " << h.d2 << "  " << h.dinf << '\n';
    if (!res.converged) log << "warning: not converged after " << res.iterations << " sweeps\n";
    return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
    auto probes = config.sweep.probes;
    if (probes.empty()) probes.push_back({config.scenario.payoff.strike, config.scenario.payoff.strike});
    const auto dts = log_spaced(config.sweep.dt_max, config.sweep.dt_min, config.sweep.count);
    const auto rows = dt_sensitivity_sweep(config.scenario, dts, probes, config.solver);

    const auto dir = prepare_dir(config.out_dir);
    Output o(join(dir, "sweep.csv"));
    auto& s = o.stream();
    s << "dt";
    for (std::size_t p = 0; p < probes.size(); ++p) s << ",price_" << p << ",G_" << p;
    s << ",iterations,converged\n";
    bool all_converged = true;
    for (const auto& row : rows) {
        s << format_number(row.dt);
        for (std::size_t p = 0; p < probes.size(); ++p)
            s << ',' << format_number(row.prices[p]) << ',' << format_number(row.costs[p]);
        s << ',' << row.iterations << ',' << (row.converged ? 1 : 0) << '\n';
        all_converged = all_converged && row.converged;
    }
    o.close();
    log << "sweep: " << rows.size() << " rehedging intervals"
        << (all_converged ? "" : ", some solves did not converge (see sweep.csv)") << '\n';
    return all_converged ? kExitOk : kExitNotConverged;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-asset option pricing under the nonlinear Black-Scholes equation with transaction costs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> flags;
    bool one_d = false;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"price", "solve the nonlinear problem and write the terminal surface"},
        {"analytic", "sample the zero-cost closed form on the grid"},
        {"leland", "check the generalized Leland condition"},
        {"converge", "write the outer-iteration convergence table"},
        {"sweep", "rehedging-interval sensitivity sweep"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "scenario JSON file");
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--flag", flags, "key=value override, repeatable")->take_all();
        if (name == "leland") sub->add_flag("--1d", one_d, "print the one-dimensional Leland number only");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (command == "leland" && one_d && config_path.empty()) {
            json doc = json::object();
            apply_overrides(doc, flags);
            const json le = doc.value("leland", json::object());
            auto need = [&](const char* key) {
                if (!le.contains(key) || !le.at(key).is_number())
                    throw ConfigError(std::string("leland.") + key, "missing (give --config or --flag leland." +
                                                                        std::string(key) + "=...)");
                return le.at(key).get<double>();
            };
            return cmd_leland_1d(need("sigma"), need("C0"), need("dt"), out_dir.empty() ? "out" : out_dir, out);
        }
        if (config_path.empty()) throw ConfigError("--config", "required");

        json doc = read_config_file(config_path);
        apply_overrides(doc, flags);
        if (one_d) doc["leland"]["mode"] = "1d";
        RunConfig config = parse_config(doc);
        if (!out_dir.empty()) config.out_dir = out_dir;

        if (command == "price") return cmd_price(config, out);
        if (command == "analytic") return cmd_analytic(config, out);
        if (command == "leland") return cmd_leland(config, out);
        if (command == "converge") return cmd_converge(config, out);
        return cmd_sweep(config, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNotConverged;
    }
}

} // namespace nlbs
