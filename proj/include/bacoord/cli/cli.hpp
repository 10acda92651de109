#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bacoord/verify/verify.hpp"

namespace bacoord::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { Success = 0, ValidationFailure = 1, RuntimeFailure = 2 };

/// Entry point of the `bacoord` tool. Never throws; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// "a,b,c" as a flow point; throws std::invalid_argument.
FlowPoint parse_flow_point(const std::string& text);

/// One CSV row per sample with columns u1..un, re_x1, im_x1, ..., orthogonality_residual, status.
/// Values use 17 significant digits. `gaps` receives the number of unsolved samples.
std::string coordinates_csv(const BakerAkhiezerProblem& problem, const std::vector<FlowPoint>& samples,
                            std::size_t* gaps = nullptr);

/// Residues of Ω at every declared pole and at ∞, the Q-residue verdict and the
/// weighted node sums, as text or JSON.
std::string residue_table(const SpectralData& data, bool json);

/// SVG of the coordinate net of a two-dimensional grid: one polyline per grid line,
/// broken at gaps. `polylines` receives the number emitted.
std::string coordinate_net_svg(const BakerAkhiezerProblem& problem, const GridSpec& grid,
                               std::size_t* polylines = nullptr);

}  // namespace bacoord::cli
