// Subcommands of the rollmono tool. Each writes its files into
// RunConfig::out_dir and returns a JSON summary for standard output.
#pragma once

#include <iosfwd>
#include <optional>

#include "cli/config.hpp"
#include "cli/output.hpp"

namespace rollmono::cli {

Json cmd_simulate(const RunConfig& cfg);
Json cmd_integrals(const RunConfig& cfg);
/// A single row at `gamma3` when given, else the configured grid.
Json cmd_gmatrix(const RunConfig& cfg, std::optional<double> gamma3);
Json cmd_bifurcate(const RunConfig& cfg);
Json cmd_monodromy(const RunConfig& cfg);

/// Prints the loop table and one line per acceptance criterion to `out`.
/// Returns true when every criterion passed.
bool cmd_reproduce(const RunConfig& cfg, std::ostream& out);

/// Third coordinate of the image-curve point cloud for loops in the given
/// plane; it is the quantity that changes along the loop.
std::string projection_axis(Model model, FixedAxis axis);
double projection_value(const RollingSystem& sys, FixedAxis axis, const BodyState& s);

/// Full command line: parses, runs, prints, and maps errors to exit codes
/// (0 ok, 1 configuration or I/O, 2 numerical, 3 acceptance failures in
/// `reproduce`). Errors go to `err` as one JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rollmono::cli
