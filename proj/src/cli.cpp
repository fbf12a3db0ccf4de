#include "sparsefw/cli.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsefw/experiments.hpp"
#include "sparsefw/geometry.hpp"
#include "sparsefw/objectives.hpp"
#include "sparsefw/rng.hpp"
#include "sparsefw/solvers.hpp"

namespace sparsefw {

namespace {

SmoothnessConstants constants_of(const VectorObjective& obj) {
  if (auto* p = dynamic_cast<const SpikedQuadratic*>(&obj)) return p->constants();
  if (auto* p = dynamic_cast<const QuadraticObjective*>(&obj)) return p->constants();
  throw std::runtime_error("objective family exposes no smoothness constants");
}

StepMode parse_step_mode(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  std::optional<double> eta;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      eta = std::stod(text.substr(colon + 1), &used);
      if (colon + 1 + used != text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error("--mode: cannot parse eta in \"" + text + "\"");
    }
  }
  if (head == "theory" || head == "auto") {
    if (eta) throw std::runtime_error("--mode " + head + " takes no eta");
    return head == "theory" ? StepMode::fixed_theoretical() : StepMode::auto_tuned();
  }
  if (head == "manual") {
    if (!eta || !(*eta > 0.0)) throw std::runtime_error("--mode manual:ETA needs a positive eta");
    return StepMode::fixed_manual(*eta);
  }
  if (head == "line-search") return StepMode::line_search(eta.value_or(0.0));
  throw std::runtime_error("--mode: unknown mode \"" + head +
                           "\" (theory, manual:ETA, line-search[:ETA] or auto)");
}

Eigen::VectorXd parse_vector(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::runtime_error("--input: expected a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) {
    if (!e.is_number()) throw std::runtime_error("--input: entries must be numbers");
    v[i++] = e.get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw std::runtime_error("--input: expected an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  if (cols == 0) throw std::runtime_error("--input: rows must be nonempty");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index r = 0;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::runtime_error("--input: rows must all have the same length");
    }
    Eigen::Index c = 0;
    for (const auto& e : row) {
      if (!e.is_number()) throw std::runtime_error("--input: entries must be numbers");
      m(r, c++) = e.get<double>();
    }
    ++r;
  }
  return m;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

struct BenchArgs {
  std::string config;
  std::string out_path;
  std::optional<std::int64_t> seed;
  std::optional<int> budget;
  std::optional<int> trials;
  bool verbose = false;
};

int run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_experiment_config(args.config);
    if (args.seed) cfg.seed = static_cast<std::uint64_t>(*args.seed);
    if (args.budget) cfg.budget = *args.budget;
    if (args.trials) cfg.trials = *args.trials;
  } catch (const std::exception& e) {
    err << "sparsefw bench: " << e.what() << "\n";
    return 1;
  }
  if (args.verbose) {
    out << "n: " << cfg.n << "\nnnz_star: " << cfg.nnz_star << "\ntrials: " << cfg.trials
        << "\nbudget: " << cfg.budget << "\nseed: " << cfg.seed << "\nsolvers:";
    for (const SolverSpec& s : cfg.solvers) out << " " << s.name;
    out << "\n";
  }

  ErrorCurves curves;
  const auto start = std::chrono::steady_clock::now();
  try {
    curves = run_benchmark(cfg);
  } catch (const std::exception& e) {
    err << "sparsefw bench: " << e.what() << "\n";
    return 2;
  }
  try {
    write_benchmark_csv(curves, args.out_path);
  } catch (const std::exception& e) {
    err << "sparsefw bench: " << e.what() << "\n";
    return 1;
  }
  if (args.verbose) {
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    out << "wrote " << args.out_path << " in " << secs.count() << "s\n";
  }
  return 0;
}

struct SolveArgs {
  std::string algo;
  std::string input;
  std::string instance;
  std::string out_path;
  std::string mode = "line-search";
  double radius = 0.0;
  Eigen::Index sparsity = 0;
  int budget = 1000;
  double tol = 0.0;
  std::int64_t seed = 1;
  bool verbose = false;
};

int run_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  std::unique_ptr<VectorObjective> owned;
  const VectorObjective* obj = nullptr;
  std::optional<double> f_star;
  StepMode mode = StepMode::line_search();
  try {
    if (!(args.radius > 0.0)) throw std::runtime_error("--radius must be positive");
    if (args.input.empty() == args.instance.empty()) {
      throw std::runtime_error("give exactly one of --input and --instance");
    }
    if (!args.input.empty()) {
      LoadedObjective loaded = load_objective_json(args.input);
      owned = std::move(loaded.objective);
      f_star = loaded.f_star;
    } else {
      // n,nnz planted spiked instance with the benchmark defaults a=1, c=3.
      const auto comma = args.instance.find(',');
      if (comma == std::string::npos) {
        throw std::runtime_error("--instance: expected N,NNZ (e.g. 1000,10)");
      }
      Eigen::Index n = 0, nnz = 0;
      try {
        n = static_cast<Eigen::Index>(std::stoll(args.instance.substr(0, comma)));
        nnz = static_cast<Eigen::Index>(std::stoll(args.instance.substr(comma + 1)));
      } catch (const std::exception&) {
        throw std::runtime_error("--instance: expected N,NNZ (e.g. 1000,10)");
      }
      owned = std::make_unique<SpikedQuadratic>(
          1.0, 3.0,
          generate_instance(n, nnz, args.radius, static_cast<std::uint64_t>(args.seed)));
      f_star = 0.0;
    }
    obj = owned.get();
    if ((args.algo == "swfw" || args.algo == "ragd") && args.sparsity < 1) {
      throw std::runtime_error("--sparsity is required for " + args.algo);
    }
    if (args.algo == "swfw") mode = parse_step_mode(args.mode);
  } catch (const std::exception& e) {
    err << "sparsefw solve: " << e.what() << "\n";
    return 1;
  }

  SolverTrace trace;
  try {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(obj->dim());
    if (args.algo == "swfw") {
      const GeometrySpec geom = GeometrySpec::l1(args.radius, args.sparsity, obj->dim());
      const SmoothnessConstants k = constants_of(*obj);
      const SwfwParams params =
          make_swfw_params(geom, k.alpha2, k.beta1, mode, args.budget, args.tol, f_star);
      trace = solve_swfw(*obj, geom, params, zero);
    } else if (args.algo == "afw") {
      AfwParams params;
      params.radius = args.radius;
      params.budget = args.budget;
      params.tol = args.tol;
      params.f_star = f_star;
      trace = solve_afw(*obj, params);
    } else if (args.algo == "vfista") {
      const SmoothnessConstants k = constants_of(*obj);
      VFistaParams params;
      params.radius = args.radius;
      params.alpha2 = k.alpha2;
      params.beta2 = k.beta2;
      params.budget = args.budget;
      params.tol = args.tol;
      params.f_star = f_star;
      trace = solve_vfista(*obj, params, zero);
    } else if (args.algo == "ragd") {
      const SmoothnessConstants k = constants_of(*obj);
      const int K = restart_epoch_length_heuristic(args.sparsity, k.beta1, k.alpha2);
      RestartedAgdParams params;
      params.radius = args.radius;
      params.s = args.sparsity;
      params.beta1 = k.beta1;
      params.alpha2 = k.alpha2;
      params.inner_iters = K;
      params.epochs = (args.budget + K - 1) / K;
      params.tol = args.tol;
      params.f_star = f_star;
      trace = solve_restarted_agd(*obj, params, zero);
    } else {
      err << "sparsefw solve: unknown --algo \"" << args.algo << "\"\n";
      return 1;
    }
  } catch (const std::exception& e) {
    err << "sparsefw solve: " << e.what() << "\n";
    return 2;
  }

  if (!args.out_path.empty()) {
    try {
      write_trace_csv(trace, args.out_path);
    } catch (const std::exception& e) {
      err << "sparsefw solve: " << e.what() << "\n";
      return 1;
    }
  }
  const TraceRow& last = trace.rows.back();
  out << "algo: " << args.algo << "\niterations: " << last.iter << "\nstatus: "
      << (trace.status == StopStatus::ToleranceReached ? "tolerance" : "budget") << "\nf: "
      << last.f << "\ngap: " << last.gap << "\n";
  if (args.verbose) {
    out << "rows: " << trace.rows.size() << "\nmax_update_sparsity: " << trace.max_update_sparsity
        << "\nnanos: " << last.nanos << "\n";
  }
  return 0;
}

struct ProjectArgs {
  std::string kind;
  std::string input;
  double radius = 0.0;
  Eigen::Index sparsity = 0;
};

int run_project(const ProjectArgs& args, std::ostream& out, std::ostream& err) {
  try {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(args.input);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(std::string("--input is not valid JSON: ") + e.what());
    }
    const bool needs_radius = args.kind == "l1" || args.kind == "simplex" ||
                              args.kind == "sparse-l1" || args.kind == "sparse-nuclear";
    const bool needs_s = args.kind == "hard" || args.kind == "sparse-l1" || args.kind == "rank" ||
                         args.kind == "sparse-nuclear";
    if (needs_radius && !(args.radius > 0.0)) {
      throw std::runtime_error("--radius must be positive for kind " + args.kind);
    }
    if (needs_s && args.sparsity < 1) {
      throw std::runtime_error("--sparsity must be positive for kind " + args.kind);
    }

    nlohmann::json result;
    if (args.kind == "l1") {
      result = vector_json(project_l1_ball(parse_vector(j), args.radius));
    } else if (args.kind == "simplex") {
      result = vector_json(project_simplex_leq(parse_vector(j), args.radius));
    } else if (args.kind == "hard") {
      result = vector_json(hard_threshold(parse_vector(j), args.sparsity));
    } else if (args.kind == "sparse-l1") {
      result = vector_json(sparse_l1_prox(parse_vector(j), args.radius, args.sparsity));
    } else if (args.kind == "rank") {
      result = matrix_json(rank_threshold(parse_matrix(j), args.sparsity).matrix);
    } else if (args.kind == "sparse-nuclear") {
      result = matrix_json(sparse_nuclear_prox(parse_matrix(j), args.radius, args.sparsity));
    } else {
      throw std::runtime_error("unknown --kind \"" + args.kind +
                               "\" (l1, simplex, hard, sparse-l1, rank or sparse-nuclear)");
    }
    out << result.dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "sparsefw project: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse convex optimization over l1 and nuclear norm balls"};
  app.require_subcommand(1);

  BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench", "Run a benchmark config and write averaged curves");
  b->add_option("--config", bench.config, "Benchmark config (JSON)")->required();
  b->add_option("--out", bench.out_path, "Output CSV path")->required();
  b->add_option("--seed", bench.seed, "Base seed (overrides the config value)");
  b->add_option("--budget", bench.budget, "Iteration budget (overrides the config value)");
  b->add_option("--trials", bench.trials, "Trial count (overrides the config value)");
  b->add_flag("--verbose", bench.verbose, "Print the resolved config and timing");

  SolveArgs solve;
  CLI::App* s = app.add_subcommand("solve", "Solve one instance and print a summary");
  s->add_option("--algo", solve.algo, "swfw | afw | vfista | ragd")->required();
  s->add_option("--input", solve.input, "Objective JSON file");
  s->add_option("--instance", solve.instance, "Planted instance N,NNZ instead of --input");
  s->add_option("--radius", solve.radius, "l1 ball radius")->required();
  s->add_option("--sparsity", solve.sparsity, "Sparsity level (swfw and ragd)");
  s->add_option("--budget", solve.budget, "Iteration budget");
  s->add_option("--tol", solve.tol, "Stopping tolerance");
  s->add_option("--mode", solve.mode,
                "swfw step mode: theory | manual:ETA | line-search[:ETA] | auto");
  s->add_option("--seed", solve.seed, "Seed for --instance");
  s->add_option("--out", solve.out_path, "Write the iteration trace CSV here");
  s->add_flag("--verbose", solve.verbose, "Print trace details");

  ProjectArgs project;
  CLI::App* p = app.add_subcommand("project", "Apply one projection or prox map, print JSON");
  p->add_option("--kind", project.kind,
                "l1 | simplex | hard | sparse-l1 | rank | sparse-nuclear")->required();
  p->add_option("--input", project.input, "Point as a JSON array (rows of arrays for matrices)")
      ->required();
  p->add_option("--radius", project.radius, "Ball radius");
  p->add_option("--sparsity", project.sparsity, "Sparsity or rank bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (b->parsed()) return run_bench(bench, out, err);
  if (s->parsed()) return run_solve(solve, out, err);
  return run_project(project, out, err);
}

}  // namespace sparsefw
