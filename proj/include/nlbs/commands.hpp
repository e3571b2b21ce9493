// SPDX-License-Identifier: MIT
#pragma once

#include "nlbs/config.hpp"

#include <iosfwd>
#include <string>

namespace nlbs {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNotConverged = 3,
    kExitIo = 4,
};

/// "%.17g", the fixed number format of every CSV artifact.
std::string format_number(double v);

/// x1,x2,S1,S2,<value_name> rows in row-major node order.
void write_surface_csv(const std::string& path, const GridSpec& grid, const Eigen::MatrixXd& values,
                       const std::string& value_name = "value");

int cmd_price(const RunConfig& config, std::ostream& log);
int cmd_analytic(const RunConfig& config, std::ostream& log);
int cmd_leland(const RunConfig& config, std::ostream& log);
int cmd_converge(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);

/// 1D Leland check from the leland section alone (no scenario needed).
int cmd_leland_1d(double sigma, double c0, double dt, const std::string& out_dir, std::ostream& log);

/// Full command line: parses arguments, loads the configuration, dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nlbs
