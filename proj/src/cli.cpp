#include "qshape/cli.hpp"

#include <bit>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qshape/estimate.hpp"
#include "qshape/oracle.hpp"
#include "qshape/tester.hpp"

namespace qshape::cli {

namespace {

constexpr int kExitVerdict = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInconclusive = 2;

std::vector<std::pair<double, double>> read_domain(const nlohmann::json& input, std::size_t dim) {
  std::vector<std::pair<double, double>> domain;
  if (!input.contains("domain")) {
    domain.assign(dim, {-0.5, 0.5});
    return domain;
  }
  const auto& d = input.at("domain");
  if (!d.is_array() || d.size() != dim) throw std::invalid_argument("domain needs one [a, b] per variable");
  for (const auto& iv : d) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw std::invalid_argument("domain entries must be [a, b]");
    domain.emplace_back(iv[0].get<double>(), iv[1].get<double>());
  }
  return domain;
}

Grid read_grid(const nlohmann::json& input, std::size_t dim, std::optional<std::size_t> n_override,
               const std::vector<double>& centers, const std::vector<double>& widths,
               std::vector<std::string>& warnings) {
  auto uniform = [&](std::size_t n) {
    if (dim == 1) {
      if (!std::has_single_bit(n)) warnings.push_back("n is not a power of two; grid padded to " +
                                                      std::to_string(std::bit_ceil(n)));
      return Grid::uniform(n);
    }
    if (!std::has_single_bit(n)) {
      warnings.push_back("n is not a power of two; tensor grid rounded up to " + std::to_string(std::bit_ceil(n)));
      n = std::bit_ceil(n);
    }
    return Grid::uniform_tensor(dim, n);
  };
  if (n_override) return uniform(*n_override);
  if (!input.contains("grid")) throw std::invalid_argument("input needs a grid (or pass --n)");
  const auto& g = input.at("grid");
  const std::string kind = g.at("kind").get<std::string>();
  if (kind == "uniform") return uniform(g.at("n").get<std::size_t>());
  if (kind != "explicit") throw std::invalid_argument("grid kind must be uniform or explicit");

  auto to_unit = [&](double x, std::size_t j) { return (x - centers[j]) / widths[j]; };
  const auto& pts = g.at("points");
  if (!pts.is_array() || pts.empty()) throw std::invalid_argument("explicit grid needs points");
  Grid grid = [&] {
    if (dim == 1) {
      std::vector<double> xs;
      for (const auto& p : pts) xs.push_back(to_unit(p.get<double>(), 0));
      return Grid::univariate(std::move(xs));
    }
    std::vector<std::vector<double>> xs;
    for (const auto& p : pts) {
      std::vector<double> row = p.get<std::vector<double>>();
      if (row.size() != dim) throw std::invalid_argument("grid point has wrong dimension");
      for (std::size_t j = 0; j < dim; ++j) row[j] = to_unit(row[j], j);
      xs.push_back(std::move(row));
    }
    return Grid::multivariate(dim, xs);
  }();
  if (grid.padded())
    warnings.push_back("grid size " + std::to_string(grid.real_size()) + " padded to " + std::to_string(grid.size()));
  return grid;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json oracle_json(const Outcome outcome, const std::optional<Witness>& w, Json values, const Problem& p) {
  Json o;
  o["outcome"] = to_string(outcome);
  o["witness"] = w ? witness_json(*w, &p) : Json(nullptr);
  o["values"] = std::move(values);
  return o;
}

/// Convexity outcomes agree when both say convex or both say not convex.
bool agrees(Outcome pipeline, Outcome oracle) { return pipeline == oracle; }

struct Options {
  std::string input;
  std::string method = "second-deriv";
  std::optional<std::size_t> n;
  double eps = 0.01;
  std::optional<std::uint64_t> seed;
  std::string noise = "exact";
  std::string direction = "inc";
  std::string report;
  std::string oracle_check = "on";
};

Json run_one(const std::string& method, const Problem& p, const Options& opt, const EstimatorConfig& cfg) {
  const bool check = opt.oracle_check == "on";
  const Direction dir = opt.direction == "dec" ? Direction::kDecreasing : Direction::kIncreasing;
  Verdict v;
  Json oracle(nullptr);
  if (p.multi) {
    if (method != "jensen") throw std::invalid_argument("multivariate input supports only --method jensen");
    v = test_convex_jensen(*p.multi, p.grid, p.weights, cfg);
    if (check) {
      const OracleConvex o = oracle_convex(*p.multi, p.grid, p.weights);
      oracle = oracle_json(o.outcome, o.witness, Json{{"lhs", *o.lhs}, {"rhs", *o.rhs}}, p);
    }
  } else if (method == "second-deriv" || method == "first-deriv" || method == "jensen") {
    ConvexCriterion crit = ConvexCriterion::kSecondDerivative;
    if (method == "second-deriv") {
      v = test_convex_second_derivative(*p.uni, p.grid, cfg);
    } else if (method == "first-deriv") {
      crit = ConvexCriterion::kFirstDerivative;
      v = test_convex_first_derivative(*p.uni, p.grid, cfg);
    } else {
      crit = ConvexCriterion::kJensen;
      v = test_convex_jensen(*p.uni, p.grid, p.weights, cfg);
    }
    if (check) {
      const OracleConvex o = oracle_convex(*p.uni, p.grid, p.weights, crit);
      Json values;
      values["min_second_derivative"] = o.min_d2;
      values["min_first_derivative_difference"] = number_or_null(o.min_d1_diff);
      values["lhs"] = *o.lhs;
      values["rhs"] = *o.rhs;
      oracle = oracle_json(o.outcome, o.witness, std::move(values), p);
    }
  } else if (method == "monotone") {
    v = test_monotone(*p.uni, p.grid, dir, cfg);
    if (check) {
      const OracleMonotone o = oracle_monotone(*p.uni, p.grid, dir);
      oracle = oracle_json(o.outcome, o.witness, Json{{"extreme_first_derivative", o.extreme_d1}}, p);
    }
  } else {
    throw std::invalid_argument("unknown method " + method);
  }

  Json r = verdict_report(v, &p);
  r["remap"] = Json{{"scale", p.scale}, {"centers", p.centers}, {"widths", p.widths}};
  r["oracle"] = oracle;
  if (check && v.outcome != Outcome::kInconclusive)
    r["agreement"] = agrees(v.outcome, outcome_from_string(oracle["outcome"].get<std::string>()));
  else
    r["agreement"] = nullptr;
  return r;
}

}  // namespace

Problem load_problem(const nlohmann::json& input, std::optional<std::size_t> n_override) {
  if (!input.is_object()) throw std::invalid_argument("input must be a JSON object");
  if (input.contains("schema") && input.at("schema") != 1) throw std::invalid_argument("unsupported input schema");
  if (!input.contains("poly")) throw std::invalid_argument("input needs a poly");
  const auto& pj = input.at("poly");

  std::optional<Poly> uni;
  std::optional<MultiPoly> multi;
  std::size_t dim = 1;
  if (is_univariate_json(pj)) {
    uni = poly_from_json(pj);
  } else {
    multi = multipoly_from_json(pj);
    dim = multi->dim();
  }
  const auto domain = read_domain(input, dim);

  double scale = 1.0;
  std::vector<double> centers(dim), widths(dim);
  if (uni) {
    Remapped r = remap_domain(*uni, domain[0].first, domain[0].second);
    uni = r.poly;
    scale = r.scale;
    centers[0] = r.center;
    widths[0] = r.width;
  } else {
    RemappedMulti r = remap_domain(*multi, domain);
    multi = r.poly;
    scale = r.scale;
    centers = r.centers;
    widths = r.widths;
  }

  std::vector<std::string> warnings;
  Grid grid = read_grid(input, dim, n_override, centers, widths, warnings).with_source_domain(domain);
  std::optional<WeightVector> w;
  if (input.contains("weights") && !n_override) {
    w = WeightVector(input.at("weights").get<std::vector<double>>());
  } else {
    if (input.contains("weights")) warnings.push_back("weights ignored because --n replaces the grid");
    w = WeightVector::uniform(grid.real_size());
  }
  if (w->size() != grid.real_size()) throw std::invalid_argument("one weight per grid point required");
  return Problem{std::move(uni), std::move(multi), std::move(grid), std::move(*w), scale,
                 std::move(centers), std::move(widths), std::move(warnings)};
}

Outcome outcome_from_string(const std::string& s) {
  for (Outcome o : {Outcome::kConvexOnGrid, Outcome::kNotConvex, Outcome::kMonotoneIncreasing,
                    Outcome::kMonotoneDecreasing, Outcome::kNotMonotone, Outcome::kInconclusive})
    if (to_string(o) == s) return o;
  throw std::invalid_argument("unknown outcome " + s);
}

Json ledger_report(const Verdict& v) {
  Json counts = Json::object();
  for (const auto& [k, c] : v.ledger.counts()) counts[k] = c;
  Json l;
  l["n"] = v.n;
  l["counts"] = std::move(counts);
  l["depth_units"] = v.ledger.depth_units();
  return l;
}

Json witness_json(const Witness& w, const Problem* problem) {
  Json j;
  j["kind"] = to_string(w.kind);
  j["index"] = w.index;
  if (w.kind == Witness::Kind::kAdjacentPair) j["index2"] = w.index2;
  j["point"] = w.point;
  if (problem && !problem->centers.empty()) {
    // Points are stored in grid coordinates; map back to the input domain.
    std::vector<double> src = w.point;
    const std::size_t dim = problem->centers.size();
    for (std::size_t i = 0; i < src.size(); ++i)
      src[i] = problem->centers[i % dim] + problem->widths[i % dim] * src[i];
    j["source_point"] = std::move(src);
  }
  j["value"] = w.value;
  return j;
}

Json verdict_report(const Verdict& v, const Problem* problem) {
  Json r;
  r["schema"] = 1;
  r["method"] = v.method;
  r["outcome"] = to_string(v.outcome);
  r["witness"] = v.witness ? witness_json(*v.witness, problem) : Json(nullptr);
  Json est = Json::object();
  for (const auto& [k, x] : v.estimates) est[k] = number_or_null(x);
  r["estimates"] = std::move(est);
  r["margin"] = v.margin;
  r["ledger"] = ledger_report(v);
  r["gap_flag"] = v.gap_flag;
  r["reason"] = v.reason.empty() ? Json(nullptr) : Json(v.reason);
  r["grid_semantics"] = kGridSemantics;
  r["oracle"] = nullptr;
  r["agreement"] = nullptr;
  return r;
}

std::vector<std::string> validate_report(const Json& report) {
  std::vector<std::string> errors;
  auto need = [&](const Json& obj, const char* key, auto pred, const char* what) {
    if (!obj.is_object() || !obj.contains(key)) {
      errors.push_back(std::string("missing ") + key);
      return false;
    }
    if (!pred(obj.at(key))) {
      errors.push_back(std::string(key) + " must be " + what);
      return false;
    }
    return true;
  };
  const auto is_num = [](const Json& j) { return j.is_number(); };
  const auto is_str = [](const Json& j) { return j.is_string(); };
  const auto is_obj = [](const Json& j) { return j.is_object(); };

  if (!report.is_object()) return {"report must be an object"};
  if (!need(report, "schema", [](const Json& j) { return j == 1; }, "1")) return errors;
  if (report.contains("method") && report.at("method") == "all") {
    if (need(report, "reports", [](const Json& j) { return j.is_array() && !j.empty(); }, "a nonempty array"))
      for (const auto& r : report.at("reports"))
        for (auto& e : validate_report(r)) errors.push_back("reports[]: " + e);
    return errors;
  }

  need(report, "method", [](const Json& j) {
    return j == "second-deriv" || j == "first-deriv" || j == "jensen" || j == "monotone";
  }, "a method name");
  need(report, "outcome", [](const Json& j) {
    if (!j.is_string()) return false;
    try {
      outcome_from_string(j.get<std::string>());
      return true;
    } catch (const std::invalid_argument&) {
      return false;
    }
  }, "an outcome name");
  if (need(report, "witness", [](const Json& j) { return j.is_null() || j.is_object(); }, "null or an object") &&
      report.at("witness").is_object()) {
    const Json& w = report.at("witness");
    need(w, "kind", is_str, "a string");
    need(w, "index", [](const Json& j) { return j.is_number_unsigned(); }, "an index");
    need(w, "point", [](const Json& j) { return j.is_array(); }, "an array");
    need(w, "value", is_num, "a number");
  }
  if (need(report, "estimates", is_obj, "an object"))
    for (const auto& [k, x] : report.at("estimates").items())
      if (!x.is_number() && !x.is_null()) errors.push_back("estimate " + k + " must be a number");
  need(report, "margin", [](const Json& j) { return j.is_number() && j.get<double>() >= 0.0; }, "a nonnegative number");
  if (need(report, "ledger", is_obj, "an object")) {
    const Json& l = report.at("ledger");
    need(l, "n", [](const Json& j) { return j.is_number_unsigned(); }, "a count");
    need(l, "depth_units", [](const Json& j) { return j.is_number_unsigned(); }, "a count");
    if (need(l, "counts", is_obj, "an object"))
      for (const auto& [k, c] : l.at("counts").items())
        if (!c.is_number_unsigned()) errors.push_back("ledger count " + k + " must be a count");
  }
  need(report, "gap_flag", [](const Json& j) { return j.is_boolean(); }, "a boolean");
  need(report, "reason", [](const Json& j) { return j.is_null() || j.is_string(); }, "null or a string");
  need(report, "grid_semantics", [](const Json& j) { return j == kGridSemantics; }, "the grid semantics string");
  if (need(report, "oracle", [](const Json& j) { return j.is_null() || j.is_object(); }, "null or an object") &&
      report.at("oracle").is_object()) {
    const Json& o = report.at("oracle");
    need(o, "outcome", is_str, "a string");
    need(o, "witness", [](const Json& j) { return j.is_null() || j.is_object(); }, "null or an object");
    need(o, "values", is_obj, "an object");
  }
  if (report.contains("remap") && need(report, "remap", is_obj, "an object"))
    need(report.at("remap"), "scale", [](const Json& j) { return j.is_number() && j.get<double>() > 0.0; },
         "a positive number");
  need(report, "agreement", [](const Json& j) { return j.is_null() || j.is_boolean(); }, "null or a boolean");
  return errors;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convexity and monotonicity tests for polynomials on a grid"};
  app.require_subcommand(1);
  CLI::App* test = app.add_subcommand("test", "Run a shape test on a problem file");
  Options opt;
  test->add_option("--input", opt.input, "Problem JSON file")->required();
  test->add_option("--method", opt.method, "Test to run")
      ->check(CLI::IsMember({"second-deriv", "first-deriv", "jensen", "monotone", "all"}));
  test->add_option("--n", opt.n, "Uniform grid size (replaces the grid in the file)")->check(CLI::PositiveNumber);
  test->add_option("--eps", opt.eps, "Estimation accuracy")->check(CLI::Range(1e-9, 0.25));
  test->add_option("--seed", opt.seed, "Noise seed (default: QSHAPE_SEED or 0)");
  test->add_option("--noise", opt.noise, "Estimator noise model")->check(CLI::IsMember({"exact", "uniform"}));
  test->add_option("--direction", opt.direction, "Monotonicity direction")->check(CLI::IsMember({"inc", "dec"}));
  test->add_option("--report", opt.report, "Write the report here instead of stdout");
  test->add_option("--oracle-check", opt.oracle_check, "Cross-check with the brute-force oracle")
      ->check(CLI::IsMember({"on", "off"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitVerdict;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitVerdict;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  EstimatorConfig cfg;
  cfg.eps = opt.eps;
  cfg.noise = opt.noise == "uniform" ? NoiseMode::kUniform : NoiseMode::kExact;
  if (opt.seed) {
    cfg.seed = *opt.seed;
  } else if (const char* env = std::getenv("QSHAPE_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      err << "error: QSHAPE_SEED must be an unsigned integer\n";
      return kExitInputError;
    }
  }

  Json report;
  bool inconclusive = false;
  try {
    std::ifstream in(opt.input);
    if (!in) throw std::invalid_argument("cannot open input file " + opt.input);
    nlohmann::json input;
    try {
      input = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    const Problem p = load_problem(input, opt.n);
    for (const auto& w : p.warnings) err << "warning: " << w << "\n";

    if (opt.method == "all") {
      report["schema"] = 1;
      report["method"] = "all";
      report["reports"] = Json::array();
      for (const char* m : {"second-deriv", "first-deriv", "jensen"}) {
        if (p.multi && std::string(m) != "jensen") continue;
        Json r = run_one(m, p, opt, cfg);
        inconclusive = inconclusive || r["outcome"] == "Inconclusive";
        report["reports"].push_back(std::move(r));
      }
    } else {
      report = run_one(opt.method, p, opt, cfg);
      inconclusive = report["outcome"] == "Inconclusive";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const std::string text = report.dump(2) + "\n";
  if (opt.report.empty()) {
    out << text;
  } else {
    std::ofstream f(opt.report);
    if (!(f << text)) {
      err << "error: cannot write report to " << opt.report << "\n";
      return kExitInputError;
    }
  }
  return inconclusive ? kExitInconclusive : kExitVerdict;
}

}  // namespace qshape::cli
