// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/adi_solver.hpp"
#include "nlbs/analytic_pricing.hpp"
#include "nlbs/diagnostics.hpp"
#include "nlbs/ellipticity.hpp"
#include "nlbs/market_model.hpp"

#include "json.hpp"

#include <limits>
#include <string>
#include <vector>

namespace nlbs {

struct SweepSettings {
    double dt_max = 0.007;
    double dt_min = 7.6e-5;
    std::size_t count = 100;
    std::vector<Probe> probes;  // empty: the at-the-money node S1 = S2 = X
};

enum class LelandSource { Solve, Analytic };

struct LelandSettings {
    bool one_d = false;
    // 1D inputs; NaN falls back to sigma_1, the cost C0 and dt_tc.
    double sigma = std::numeric_limits<double>::quiet_NaN();
    double c0 = std::numeric_limits<double>::quiet_NaN();
    double dt = std::numeric_limits<double>::quiet_NaN();
    LelandSource source = LelandSource::Solve;
    ScanOptions scan;
};

struct RunConfig {
    std::string name;
    Scenario scenario;  // validated, grid bounds resolved
    SolverOptions solver;
    CbestForm analytic_form = CbestForm::Standard;
    std::string out_dir = "out";
    bool node_csv = true;
    SweepSettings sweep;
    LelandSettings leland;
};

/// Builds a run configuration from JSON with sections market, cost, payoff,
/// grid, solver, analytic, output, sweep and leland. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

/// Applies "key=value" overrides. Keys are "section.field" or a bare field
/// name that is unique across sections. Values are read as JSON when they
/// parse, as strings otherwise.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

/// Reads a JSON file; throws ConfigError on unreadable or malformed input.
nlohmann::json read_config_file(const std::string& path);

/// Canonical JSON for a configuration; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

} // namespace nlbs
