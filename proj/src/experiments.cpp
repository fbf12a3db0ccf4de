#include "sparsefw/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sparsefw/geometry.hpp"
#include "sparsefw/objectives.hpp"
#include "sparsefw/rng.hpp"

namespace sparsefw {

namespace {

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("experiment config: n must be at least 2");
  if (cfg.nnz_star < 1 || cfg.nnz_star > cfg.n) {
    throw std::invalid_argument("experiment config: nnz_star must lie in [1, n]");
  }
  if (!(cfg.radius > 0.0)) throw std::invalid_argument("experiment config: radius must be positive");
  if (!(cfg.a > 0.0)) throw std::invalid_argument("experiment config: a must be positive");
  if (!(cfg.c >= 0.0)) throw std::invalid_argument("experiment config: c must be nonnegative");
  if (cfg.trials < 1) throw std::invalid_argument("experiment config: trials must be positive");
  if (cfg.budget < 1) throw std::invalid_argument("experiment config: budget must be positive");
  std::set<std::string> seen;
  for (const SolverSpec& s : cfg.solvers) {
    if (s.name.empty()) throw std::invalid_argument("experiment config: solver name is empty");
    if (!seen.insert(s.name).second) {
      throw std::invalid_argument("experiment config: duplicate solver name \"" + s.name + "\"");
    }
    if (s.algo != "swfw" && s.algo != "afw" && s.algo != "vfista" && s.algo != "ragd") {
      throw std::invalid_argument("experiment config: solver \"" + s.name +
                                  "\" has unknown algo \"" + s.algo +
                                  "\" (expected swfw, afw, vfista or ragd)");
    }
    if (s.s < 0 || s.s > cfg.n) {
      throw std::invalid_argument("experiment config: solver \"" + s.name +
                                  "\" has sparsity outside [0, n]");
    }
    if (s.epoch_iters < 0) {
      throw std::invalid_argument("experiment config: solver \"" + s.name +
                                  "\" has negative epoch_iters");
    }
  }
}

StepMode step_mode_from_json(const nlohmann::json& j, const std::string& name) {
  const std::string step = j.value("step", std::string("line-search"));
  double eta = 0.0;
  if (j.contains("eta")) {
    if (!j["eta"].is_number()) {
      throw std::runtime_error("experiment config: solver \"" + name + "\": eta must be a number");
    }
    eta = j["eta"].get<double>();
  }
  if (step == "theory") {
    if (eta != 0.0) {
      throw std::runtime_error("experiment config: solver \"" + name +
                               "\": eta has no effect with step \"theory\"");
    }
    return StepMode::fixed_theoretical();
  }
  if (step == "manual") {
    if (!(eta > 0.0)) {
      throw std::runtime_error("experiment config: solver \"" + name +
                               "\": step \"manual\" needs a positive eta");
    }
    return StepMode::fixed_manual(eta);
  }
  if (step == "line-search") return StepMode::line_search(eta);
  if (step == "auto") {
    if (eta != 0.0) {
      throw std::runtime_error("experiment config: solver \"" + name +
                               "\": eta has no effect with step \"auto\"");
    }
    return StepMode::auto_tuned();
  }
  throw std::runtime_error("experiment config: solver \"" + name + "\": unknown step \"" + step +
                           "\" (expected theory, manual, line-search or auto)");
}

SolverSpec solver_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("experiment config: solver entries must be objects");
  static const std::set<std::string> known = {"name", "algo", "step", "eta", "s", "epoch_iters"};
  for (const auto& [key, val] : j.items()) {
    (void)val;
    if (!known.count(key)) {
      throw std::runtime_error("experiment config: unknown solver key \"" + key + "\"");
    }
  }
  SolverSpec spec;
  if (!j.contains("name") || !j["name"].is_string()) {
    throw std::runtime_error("experiment config: every solver needs a string \"name\"");
  }
  spec.name = j["name"].get<std::string>();
  if (!j.contains("algo") || !j["algo"].is_string()) {
    throw std::runtime_error("experiment config: solver \"" + spec.name +
                             "\" needs a string \"algo\"");
  }
  spec.algo = j["algo"].get<std::string>();
  if (spec.algo == "swfw") {
    spec.mode = step_mode_from_json(j, spec.name);
  } else if (j.contains("step") || j.contains("eta")) {
    throw std::runtime_error("experiment config: solver \"" + spec.name +
                             "\": step and eta apply to swfw only");
  }
  if (j.contains("s")) {
    if (!j["s"].is_number_integer()) {
      throw std::runtime_error("experiment config: solver \"" + spec.name +
                               "\": s must be an integer");
    }
    spec.s = j["s"].get<Eigen::Index>();
  }
  if (j.contains("epoch_iters")) {
    if (spec.algo != "ragd") {
      throw std::runtime_error("experiment config: solver \"" + spec.name +
                               "\": epoch_iters applies to ragd only");
    }
    if (!j["epoch_iters"].is_number_integer()) {
      throw std::runtime_error("experiment config: solver \"" + spec.name +
                               "\": epoch_iters must be an integer");
    }
    spec.epoch_iters = j["epoch_iters"].get<int>();
  }
  return spec;
}

}  // namespace

std::vector<SolverSpec> standard_solver_set(const ExperimentConfig& cfg) {
  const double beta1 = cfg.a + cfg.c;
  const double eta_manual = cfg.a / (2.0 * beta1 * static_cast<double>(cfg.nnz_star));
  std::vector<SolverSpec> out;
  out.push_back({"swfw-theory", "swfw", StepMode::line_search(), 0, 0});
  out.push_back({"swfw-manual", "swfw", StepMode::line_search(eta_manual), 0, 0});
  out.push_back({"swfw-auto", "swfw", StepMode::auto_tuned(), 0, 0});
  out.push_back({"afw", "afw", StepMode::line_search(), 0, 0});
  out.push_back({"vfista", "vfista", StepMode::line_search(), 0, 0});
  out.push_back({"ragd", "ragd", StepMode::line_search(), 0, 0});
  return out;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("experiment config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("experiment config: " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("experiment config: top level must be an object");

  static const std::set<std::string> known = {"n",      "radius", "nnz_star",
                                              "a",      "c",      "trials",
                                              "seed",   "budget", "solvers"};
  for (const auto& [key, val] : j.items()) {
    (void)val;
    if (!known.count(key)) {
      throw std::runtime_error("experiment config: unknown key \"" + key + "\"");
    }
  }

  ExperimentConfig cfg;
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) {
      throw std::runtime_error(std::string("experiment config: ") + key + " must be a number");
    }
    return j[key].get<double>();
  };
  auto integer = [&](const char* key, std::int64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) {
      throw std::runtime_error(std::string("experiment config: ") + key + " must be an integer");
    }
    return j[key].get<std::int64_t>();
  };

  cfg.n = static_cast<Eigen::Index>(integer("n", cfg.n));
  cfg.radius = number("radius", cfg.radius);
  cfg.nnz_star = static_cast<Eigen::Index>(integer("nnz_star", cfg.nnz_star));
  cfg.a = number("a", cfg.a);
  cfg.c = number("c", cfg.c);
  cfg.trials = static_cast<int>(integer("trials", cfg.trials));
  cfg.seed = static_cast<std::uint64_t>(integer("seed", static_cast<std::int64_t>(cfg.seed)));
  cfg.budget = static_cast<int>(integer("budget", cfg.budget));

  if (j.contains("solvers")) {
    if (!j["solvers"].is_array()) {
      throw std::runtime_error("experiment config: solvers must be an array");
    }
    for (const auto& entry : j["solvers"]) cfg.solvers.push_back(solver_from_json(entry));
  }
  validate_config(cfg);
  if (cfg.solvers.empty()) cfg.solvers = standard_solver_set(cfg);
  return cfg;
}

Eigen::VectorXd generate_instance(Eigen::Index n, Eigen::Index nnz, double radius,
                                  std::uint64_t seed) {
  if (n < 1 || nnz < 1 || nnz > n || !(radius > 0.0)) {
    throw std::invalid_argument("generate_instance: bad parameters");
  }
  SplitMix64 rng(seed);

  // Partial Fisher-Yates: the first nnz slots end up a uniform subset.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < nnz; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::sort(idx.begin(), idx.begin() + nnz);

  const double mag = radius / static_cast<double>(nnz);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < nnz; ++i) {
    x[idx[static_cast<std::size_t>(i)]] = rng.next_sign() > 0 ? mag : -mag;
  }
  return x;
}

namespace {

// Common iteration axis: row t of a trace is f at the iterate entering
// iteration t, so index j of the curve is row min(j / stride, last). stride
// is 1 except for ragd, whose rows are epochs of K iterations.
Eigen::VectorXd expand_curve(const SolverTrace& trace, int budget, int stride, double f_star) {
  if (trace.rows.empty()) throw std::logic_error("expand_curve: empty trace");
  const auto last = trace.rows.size() - 1;
  Eigen::VectorXd curve(budget);
  for (int jj = 0; jj < budget; ++jj) {
    const auto row = std::min(static_cast<std::size_t>(jj / stride), last);
    curve[jj] = trace.rows[row].f - f_star;
  }
  return curve;
}

Eigen::VectorXd run_one(const SolverSpec& spec, const ExperimentConfig& cfg,
                        const SpikedQuadratic& obj) {
  const SmoothnessConstants k = obj.constants();
  const Eigen::Index s = spec.s > 0 ? spec.s : cfg.nnz_star;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(cfg.n);

  if (spec.algo == "swfw") {
    const GeometrySpec geom = GeometrySpec::l1(cfg.radius, s, cfg.n);
    const SwfwParams params =
        make_swfw_params(geom, k.alpha2, k.beta1, spec.mode, cfg.budget, 0.0, 0.0);
    return expand_curve(solve_swfw(obj, geom, params, zero), cfg.budget, 1, 0.0);
  }
  if (spec.algo == "afw") {
    AfwParams params;
    params.radius = cfg.radius;
    params.budget = cfg.budget;
    params.tol = 0.0;
    params.f_star = 0.0;
    return expand_curve(solve_afw(obj, params), cfg.budget, 1, 0.0);
  }
  if (spec.algo == "vfista") {
    VFistaParams params;
    params.radius = cfg.radius;
    params.alpha2 = k.alpha2;
    params.beta2 = k.beta2;
    params.budget = cfg.budget;
    params.tol = 0.0;
    params.f_star = 0.0;
    return expand_curve(solve_vfista(obj, params, zero), cfg.budget, 1, 0.0);
  }
  if (spec.algo == "ragd") {
    const int K = spec.epoch_iters > 0 ? spec.epoch_iters
                                       : restart_epoch_length_heuristic(s, k.beta1, k.alpha2);
    RestartedAgdParams params;
    params.radius = cfg.radius;
    params.s = s;
    params.beta1 = k.beta1;
    params.alpha2 = k.alpha2;
    params.inner_iters = K;
    params.epochs = (cfg.budget + K - 1) / K;
    params.tol = 0.0;
    params.f_star = 0.0;
    return expand_curve(solve_restarted_agd(obj, params, zero), cfg.budget, K, 0.0);
  }
  throw std::invalid_argument("run_benchmark: unknown algo \"" + spec.algo + "\"");
}

}  // namespace

ErrorCurves run_benchmark(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  validate_config(cfg);
  if (cfg.solvers.empty()) cfg.solvers = standard_solver_set(cfg);

  ErrorCurves out;
  out.config = cfg;
  const std::size_t ns = cfg.solvers.size();
  out.names.reserve(ns);
  for (const SolverSpec& s : cfg.solvers) out.names.push_back(s.name);
  out.mean.assign(ns, Eigen::VectorXd::Zero(cfg.budget));
  out.per_trial.assign(ns, {});
  for (auto& v : out.per_trial) v.reserve(static_cast<std::size_t>(cfg.trials));

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const Eigen::VectorXd x_star =
        generate_instance(cfg.n, cfg.nnz_star, cfg.radius, trial_seed(cfg.seed, trial));
    const SpikedQuadratic obj(cfg.a, cfg.c, x_star);
    for (std::size_t si = 0; si < ns; ++si) {
      try {
        Eigen::VectorXd curve = run_one(cfg.solvers[si], cfg, obj);
        out.mean[si] += curve / static_cast<double>(cfg.trials);
        out.per_trial[si].push_back(std::move(curve));
      } catch (const std::exception& e) {
        throw std::runtime_error("run_benchmark: trial " + std::to_string(trial) + ", solver \"" +
                                 cfg.solvers[si].name + "\": " + e.what());
      }
    }
  }
  return out;
}

void write_benchmark_csv(const ErrorCurves& curves, const std::string& path) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw std::runtime_error("write_benchmark_csv: cannot open " + tmp);

  bool ok = std::fputs("iter", f) >= 0;
  for (const std::string& name : curves.names) {
    ok = ok && std::fprintf(f, ",%s", name.c_str()) >= 0;
  }
  ok = ok && std::fputc('\n', f) != EOF;
  const int rows = curves.mean.empty() ? 0 : static_cast<int>(curves.mean.front().size());
  for (int r = 0; ok && r < rows; ++r) {
    ok = std::fprintf(f, "%d", r) >= 0;
    for (const Eigen::VectorXd& col : curves.mean) {
      ok = ok && std::fprintf(f, ",%.17g", col[r]) >= 0;
    }
    ok = ok && std::fputc('\n', f) != EOF;
  }
  ok = std::fclose(f) == 0 && ok;
  if (!ok) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("write_benchmark_csv: failed writing " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("write_benchmark_csv: cannot rename into " + path);
  }
}

BenchmarkTable read_benchmark_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_benchmark_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_benchmark_csv: empty file " + path);

  BenchmarkTable table;
  std::stringstream header(line);
  std::string cell;
  if (!std::getline(header, cell, ',') || cell != "iter") {
    throw std::runtime_error("read_benchmark_csv: header must start with iter");
  }
  while (std::getline(header, cell, ',')) table.names.push_back(cell);

  std::vector<std::vector<double>> cols(table.names.size());
  int expect = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    if (!std::getline(row, cell, ',') || std::stoi(cell) != expect) {
      throw std::runtime_error("read_benchmark_csv: unexpected iter column at row " +
                               std::to_string(expect));
    }
    for (auto& col : cols) {
      if (!std::getline(row, cell, ',')) {
        throw std::runtime_error("read_benchmark_csv: short row at iter " + std::to_string(expect));
      }
      col.push_back(std::stod(cell));
    }
    ++expect;
  }
  for (const auto& col : cols) {
    table.columns.emplace_back(Eigen::Map<const Eigen::VectorXd>(col.data(),
                                                                 static_cast<Eigen::Index>(col.size())));
  }
  return table;
}

}  // namespace sparsefw
