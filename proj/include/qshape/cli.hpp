#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qshape/grid.hpp"
#include "qshape/poly.hpp"
#include "qshape/verdict.hpp"

namespace qshape::cli {

using Json = nlohmann::ordered_json;

/// A parsed input file after remapping onto [-1/2, 1/2]^dim.
struct Problem {
  std::optional<Poly> uni;
  std::optional<MultiPoly> multi;
  Grid grid;
  WeightVector weights;
  /// Output scale removed by the remap; 1 when no domain was given.
  double scale = 1.0;
  std::vector<double> centers;
  std::vector<double> widths;
  std::vector<std::string> warnings;
};

/// Builds a problem from the input schema; `n_override` replaces the grid
/// with a uniform one. Throws std::invalid_argument on malformed input.
Problem load_problem(const nlohmann::json& input, std::optional<std::size_t> n_override);

Outcome outcome_from_string(const std::string& s);

Json ledger_report(const Verdict& v);
Json witness_json(const Witness& w, const Problem* problem = nullptr);
/// Estimates, witness values and oracle values are in the units of the
/// remapped polynomial; `remap` records the scale and affine map.
Json verdict_report(const Verdict& v, const Problem* problem = nullptr);

/// Empty when the report conforms to the published schema; otherwise one
/// message per violation.
std::vector<std::string> validate_report(const Json& report);

/// Runs the command line `args` (without the program name).
/// Exit codes: 0 verdict, 1 input error, 2 Inconclusive.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qshape::cli
