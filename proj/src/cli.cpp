#include "mpclust/cli.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "mpclust/binning.hpp"
#include "mpclust/errors.hpp"
#include "mpclust/evaluation.hpp"
#include "mpclust/io.hpp"
#include "mpclust/parallel.hpp"
#include "mpclust/refinement.hpp"
#include "mpclust/selection_em.hpp"
#include "mpclust/simulation.hpp"

namespace mpclust::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kSelectStream = 2;

struct SimulateArgs {
  int blocks = 3;
  std::string components = "3";
  int block_size = 6;
  std::size_t n = 400;
  std::string noise = "gaussian";
  std::optional<double> tau;
  std::optional<double> target_miscl;
  std::size_t calibration_mc = 200000;
  std::uint64_t seed = 1;
  int replicates = 1;
};

struct SelectArgs {
  std::optional<int> bins;
  std::optional<int> bins_exponent;
  int bmax = 3;
  int gmax = 3;
  int restarts = 20;
  int max_iter = 500;
  double tol = 1e-7;
  std::optional<double> epsilon;
  std::uint64_t seed = 1;
  std::vector<std::string> categorical;
};

struct RefineArgs {
  int max_iter = 200;
  double tol = 1e-8;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_timing(const fs::path& dir, const std::string& command, double seconds, int threads) {
  io::write_json(dir / "timing.json", {{"tool", io::tool_info()},
                                       {"command", command},
                                       {"wall_clock_seconds", seconds},
                                       {"threads", threads}});
}

std::string replicate_name(int r) {
  std::ostringstream s;
  s << "rep_" << std::setw(3) << std::setfill('0') << r + 1;
  return s.str();
}

// ---------------------------------------------------------------- simulate

SimulationConfig simulation_config(const SimulateArgs& a) {
  if (a.tau && a.target_miscl) throw std::invalid_argument("--tau and --target-miscl are mutually exclusive");
  SimulationConfig c;
  c.B = a.blocks;
  c.G.clear();
  std::stringstream ss(a.components);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      c.G.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("--components expects an integer or a comma-separated list");
    }
  }
  if (c.G.size() == 1) c.G.assign(static_cast<std::size_t>(std::max(1, c.B)), c.G.front());
  c.block_size = a.block_size;
  c.n = a.n;
  c.noise = parse_noise_family(a.noise);
  c.tau = a.tau;
  c.target_miscl = a.target_miscl;
  if (!c.tau && !c.target_miscl) c.target_miscl = 0.05;
  c.seed = a.seed;
  if (a.replicates < 1) throw std::invalid_argument("--replicates must be >= 1");
  if (a.calibration_mc < 1000) throw std::invalid_argument("--calibration-mc must be >= 1000");
  validate(c);
  return c;
}

struct ResolvedSimulation {
  SimulationConfig requested;
  SimulationConfig resolved;
  json config_json;
};

ResolvedSimulation resolve_simulation(const SimulateArgs& a) {
  ResolvedSimulation r;
  r.requested = simulation_config(a);
  CalibrationOptions calib;
  calib.n_mc = a.calibration_mc;
  r.resolved = resolve_tau(r.requested, calib);
  r.config_json = io::simulation_config_to_json(r.requested);
  r.config_json["tau_used"] = *r.resolved.tau;
  r.config_json["calibration_mc"] = a.calibration_mc;
  r.config_json["replicates"] = a.replicates;
  return r;
}

void simulate_replicate(const ResolvedSimulation& sim, int replicate, const fs::path& dir) {
  const std::uint64_t data_seed = derive_seed(sim.requested.seed, kDataStream, static_cast<std::uint64_t>(replicate));
  const LabeledSample sample = generate(sim.resolved, data_seed);
  io::write_csv(dir / "data.csv", sample.data);
  json truth;
  truth["tool"] = io::tool_info();
  truth["command"] = "simulate";
  truth["seed"] = sim.requested.seed;
  truth["replicate"] = replicate + 1;
  truth["data_seed"] = data_seed;
  truth["config"] = sim.config_json;
  const json record = io::truth_to_json(sample, sim.resolved);
  for (const auto& [key, value] : record.items()) truth[key] = value;
  io::write_json(dir / "truth.json", truth);
}

int cmd_simulate(const SimulateArgs& a, const fs::path& out_dir, int threads, std::ostream& out) {
  Stopwatch clock;
  const auto sim = resolve_simulation(a);
  for (int r = 0; r < a.replicates; ++r) {
    const fs::path dir = a.replicates == 1 ? out_dir : out_dir / replicate_name(r);
    simulate_replicate(sim, r, dir);
  }
  out << "simulated " << a.replicates << " replicate(s) of " << sim.resolved.n << " x "
      << sim.resolved.B * sim.resolved.block_size << " (tau = " << *sim.resolved.tau << ") into " << out_dir.string()
      << "\n";
  write_timing(out_dir, "simulate", clock.seconds(), threads);
  return kSuccess;
}

// ------------------------------------------------------------------ select

json select_config_json(const SelectArgs& a, int R) {
  json c;
  c["bins"] = R;
  c["bins_exponent"] = a.bins_exponent ? json(*a.bins_exponent) : json(nullptr);
  c["bmax"] = a.bmax;
  c["gmax"] = a.gmax;
  c["restarts"] = a.restarts;
  c["max_iter"] = a.max_iter;
  c["tol"] = a.tol;
  c["epsilon"] = a.epsilon ? json(*a.epsilon) : json(nullptr);
  c["categorical"] = a.categorical;
  return c;
}

json run_select(const SelectArgs& a, const fs::path& data_path, std::uint64_t seed, int threads, std::ostream& log) {
  if (a.bins && a.bins_exponent) throw std::invalid_argument("--bins and --bins-exponent are mutually exclusive");
  if (a.bins && *a.bins < 2) throw std::invalid_argument("--bins must be >= 2");
  if (a.bins_exponent && *a.bins_exponent < 1) throw std::invalid_argument("--bins-exponent must be >= 1");
  if (a.bmax < 1 || a.gmax < 1) throw std::invalid_argument("--bmax and --gmax must be >= 1");

  io::CsvOptions csv;
  for (const auto& c : a.categorical) {
    if (c == "auto") {
      csv.infer_categorical = true;
    } else {
      csv.categorical.push_back(c);
    }
  }
  // The level hint needs n, so peek at the row count first when inferring.
  Dataset data = io::read_csv(data_path, io::CsvOptions{csv.categorical, false, 0});
  const int exponent = a.bins_exponent.value_or(4);
  const int R = a.bins ? *a.bins : choose_num_bins(data.n(), exponent);
  if (csv.infer_categorical) {
    csv.max_levels_hint = R;
    data = io::read_csv(data_path, csv);
  }
  if (data.d() < 3) throw DataError("at least three variables are required (d = " + std::to_string(data.d()) + ")");
  for (std::size_t j = 0; j < data.d(); ++j) {
    if (data.column_type(j).is_categorical() && data.column_type(j).levels < 2)
      throw DataError("constant column (categorical column " + data.column_names()[j] + " has one level)");
  }

  const BinningScheme scheme = build_scheme(data, R);
  const DiscretizedData disc = discretize(data, scheme);
  const CandidateGrid grid = CandidateGrid::enumerate(a.bmax, a.gmax);
  EMConfig em;
  em.max_iterations = a.max_iter;
  em.rel_tolerance = a.tol;
  em.n_restarts = a.restarts;
  em.epsilon = a.epsilon;
  em.master_seed = seed;
  em.threads = threads;
  log << "select: n = " << data.n() << ", d = " << data.d() << ", R = " << R << ", " << grid.candidates.size()
      << " candidates x " << a.restarts << " restarts\n";
  const SelectionResult selection = select_model(disc, grid, em);

  SelectArgs resolved = a;
  resolved.bins_exponent = a.bins ? std::nullopt : std::optional<int>(exponent);
  json out;
  out["tool"] = io::tool_info();
  out["command"] = "select";
  out["seed"] = seed;
  out["config"] = select_config_json(resolved, R);
  out["config"]["epsilon_used"] = resolve_epsilon(em, disc);
  out["data"] = {{"file", data_path.filename().string()}, {"n", data.n()}, {"d", data.d()}};
  const json fit = io::selection_to_json(selection, scheme, data.column_names());
  for (const auto& [key, value] : fit.items()) out[key] = value;
  const auto& s = selection.best.structure;
  log << "selected B = " << s.B << ", G = (";
  for (int b = 0; b < s.B; ++b) log << (b ? "," : "") << s.G[b];
  log << "), penalized log-likelihood " << selection.best.penalized_loglik << "\n";
  return out;
}

// ------------------------------------------------------------------ refine

json run_refine(const RefineArgs& a, const fs::path& data_path, const fs::path& result_path, int threads) {
  if (a.max_iter < 1) throw std::invalid_argument("--max-iter must be >= 1");
  if (!fs::exists(result_path)) throw DataError("select result '" + result_path.string() + "' does not exist");
  const json result = io::read_json(result_path);
  const io::LoadedFit loaded = io::fit_from_json(result);
  io::CsvOptions csv;
  for (std::size_t j = 0; j < loaded.scheme.d(); ++j) {
    if (loaded.scheme.variables[j].categorical) csv.categorical.push_back(loaded.column_names[j]);
  }
  const Dataset data = io::read_csv(data_path, csv);
  if (data.d() != loaded.scheme.d() || data.column_names() != loaded.column_names)
    throw DataError("data columns do not match the select result");
  if (data.n() != loaded.fit.responsibilities.t.front().rows)
    throw DataError("data has " + std::to_string(data.n()) + " rows, the select result was fitted on " +
                    std::to_string(loaded.fit.responsibilities.t.front().rows));

  RefineConfig config;
  config.max_iterations = a.max_iter;
  config.rel_tolerance = a.tol;
  config.epsilon = loaded.fit.params.epsilon;
  const auto blocks = refine_fit(data, loaded.fit, config, threads);

  json out;
  out["tool"] = io::tool_info();
  out["command"] = "refine";
  out["seed"] = result.value("seed", std::uint64_t{0});
  out["config"] = {{"max_iter", a.max_iter}, {"tol", a.tol}, {"epsilon", config.epsilon}};
  out["source_result"] = result_path.filename().string();
  out["structure"] = io::structure_to_json(loaded.fit.structure);
  out["blocks"] = io::refinement_to_json(blocks);
  return out;
}

// ---------------------------------------------------------------- evaluate

json run_evaluate(const fs::path& result_path, const fs::path& truth_path, const std::optional<fs::path>& refined_path) {
  const json result = io::read_json(result_path);
  const io::LoadedFit loaded = io::fit_from_json(result);
  const io::Truth truth = io::truth_from_json(io::read_json(truth_path));
  const FitResult& fit = loaded.fit;
  if (truth.omega.size() != fit.structure.omega.size()) throw DataError("result and truth differ in the number of variables");
  for (const auto& p : truth.partitions.assignments) {
    if (p.size() != fit.responsibilities.t.front().rows) throw DataError("result and truth differ in the number of rows");
  }

  json report;
  report["tool"] = io::tool_info();
  report["command"] = "evaluate";
  const json& sim = truth.config;
  json scenario;
  scenario["n"] = fit.responsibilities.t.front().rows;
  scenario["noise"] = sim.value("noise", std::string("unknown"));
  scenario["block_size"] = sim.value("block_size", 0);
  scenario["blocks"] = truth.G.size();
  scenario["components"] = truth.G;
  scenario["target_miscl"] = sim.contains("target_miscl") ? sim["target_miscl"] : json(nullptr);
  scenario["tau"] = sim.contains("tau_used") ? sim["tau_used"] : json(nullptr);
  scenario["bins"] = result.at("config").value("bins", 0);
  scenario["bins_exponent"] = result.at("config").contains("bins_exponent") ? result["config"]["bins_exponent"] : json(nullptr);
  report["scenario"] = scenario;
  const json truth_json = io::read_json(truth_path);
  report["replicate"] = truth_json.value("replicate", 1);
  report["selected"] = {{"B", fit.structure.B}, {"G", fit.structure.G}};
  const auto discretized = evaluate_partitions(fit.structure, fit.map_partitions, truth.omega, truth.G, truth.partitions);
  report["discretized"] = io::report_to_json(discretized);
  if (refined_path) {
    const json refined_json = io::read_json(*refined_path);
    const PartitionSet refined = io::refined_partitions_from_json(refined_json);
    if (static_cast<int>(refined.assignments.size()) != fit.structure.B)
      throw DataError("refined result does not match the select result's blocks");
    report["refined"] = io::report_to_json(
        evaluate_partitions(fit.structure, refined, truth.omega, truth.G, truth.partitions));
  } else {
    report["refined"] = nullptr;
  }
  return report;
}

std::string csv_number(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_integer() || v.is_number_unsigned()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : "-") + csv_number(e);
  return s;
}

// One row per report.json found under root, ordered by path.
std::string summarize(const fs::path& root) {
  if (!fs::is_directory(root)) throw DataError("summary directory '" + root.string() + "' does not exist");
  std::vector<fs::path> reports;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "report.json") reports.push_back(entry.path());
  }
  std::sort(reports.begin(), reports.end());
  std::string text =
      "run,n,noise,block_size,blocks,components,target_miscl,tau,bins,bins_exponent,replicate,selected_B,selected_G,"
      "structure_match,block_ari,mean_individual_ari,refined_mean_individual_ari\n";
  for (const auto& path : reports) {
    const json r = io::read_json(path);
    const json& s = r.at("scenario");
    const auto rel = fs::relative(path.parent_path(), root).generic_string();
    text += (rel == "." ? std::string() : rel) + ",";
    for (const char* key : {"n", "noise", "block_size", "blocks", "components", "target_miscl", "tau", "bins", "bins_exponent"})
      text += csv_number(s.contains(key) ? s[key] : json(nullptr)) + ",";
    text += csv_number(r.at("replicate")) + ",";
    text += csv_number(r.at("selected").at("B")) + "," + csv_number(r.at("selected").at("G")) + ",";
    const json& disc = r.at("discretized");
    text += csv_number(disc.at("structure_match")) + "," + csv_number(disc.at("block_ari")) + "," +
            csv_number(disc.at("mean_individual_ari")) + ",";
    text += r.at("refined").is_null() ? "" : csv_number(r["refined"].at("mean_individual_ari"));
    text += "\n";
  }
  return text;
}

// ---------------------------------------------------------------- pipeline

void write_manifest(const fs::path& out_dir, const json& base, const std::vector<std::string>& status) {
  json manifest = base;
  json reps = json::array();
  bool complete = true;
  for (std::size_t r = 0; r < status.size(); ++r) {
    reps.push_back({{"id", replicate_name(static_cast<int>(r))},
                    {"status", status[r]},
                    {"artifacts", {"data.csv", "truth.json", "result.json", "refined.json", "report.json"}}});
    complete = complete && status[r] == "complete";
  }
  manifest["complete"] = complete;
  manifest["replicates"] = std::move(reps);
  io::write_json(out_dir / "manifest.json", manifest);
}

int cmd_pipeline(const SimulateArgs& sa, const SelectArgs& sel, const RefineArgs& ra, const fs::path& out_dir,
                 int threads, std::ostream& out) {
  Stopwatch clock;
  const auto sim = resolve_simulation(sa);
  json base;
  base["tool"] = io::tool_info();
  base["command"] = "pipeline";
  base["seed"] = sa.seed;
  base["config"] = {{"simulate", sim.config_json},
                    {"select", select_config_json(sel, sel.bins.value_or(0))},
                    {"refine", {{"max_iter", ra.max_iter}, {"tol", ra.tol}}}};
  std::vector<std::string> status(static_cast<std::size_t>(sa.replicates), "incomplete");
  write_manifest(out_dir, base, status);
  for (int r = 0; r < sa.replicates; ++r) {
    const fs::path dir = out_dir / replicate_name(r);
    Stopwatch rep_clock;
    simulate_replicate(sim, r, dir);
    const std::uint64_t select_seed = derive_seed(sa.seed, kSelectStream, static_cast<std::uint64_t>(r));
    io::write_json(dir / "result.json", run_select(sel, dir / "data.csv", select_seed, threads, out));
    io::write_json(dir / "refined.json", run_refine(ra, dir / "data.csv", dir / "result.json", threads));
    io::write_json(dir / "report.json", run_evaluate(dir / "result.json", dir / "truth.json", dir / "refined.json"));
    write_timing(dir, "pipeline", rep_clock.seconds(), threads);
    status[r] = "complete";
    write_manifest(out_dir, base, status);
  }
  io::write_text(out_dir / "summary.csv", summarize(out_dir));
  write_timing(out_dir, "pipeline", clock.seconds(), threads);
  out << "pipeline: " << sa.replicates << " replicate(s) written to " << out_dir.string() << "\n";
  return kSuccess;
}

// ------------------------------------------------------------------- flags

void add_simulate_flags(CLI::App* app, SimulateArgs& a) {
  app->add_option("--blocks", a.blocks, "Number of blocks B")->capture_default_str();
  app->add_option("--components", a.components, "Components per block: one value or a comma list")->capture_default_str();
  app->add_option("--block-size", a.block_size, "Variables per block")->capture_default_str();
  app->add_option("--n", a.n, "Sample size")->capture_default_str();
  app->add_option("--noise", a.noise, "gaussian | student3 | laplace")->capture_default_str();
  app->add_option("--tau", a.tau, "Separation of the shifted variables");
  app->add_option("--target-miscl", a.target_miscl, "Target Bayes misclassification rate (default 0.05)");
  app->add_option("--calibration-mc", a.calibration_mc, "Monte-Carlo rows for tau calibration")->capture_default_str();
  app->add_option("--replicates", a.replicates, "Number of replicates")->capture_default_str();
}

void add_select_flags(CLI::App* app, SelectArgs& a, bool with_seed) {
  app->add_option("--bins", a.bins, "Number of bins R");
  app->add_option("--bins-exponent", a.bins_exponent, "R = max(2, floor(n^(1/k))); default k = 4");
  app->add_option("--bmax", a.bmax, "Maximum number of blocks")->capture_default_str();
  app->add_option("--gmax", a.gmax, "Maximum components per block")->capture_default_str();
  app->add_option("--restarts", a.restarts, "Random restarts per candidate")->capture_default_str();
  app->add_option("--max-iter", a.max_iter, "EM iteration cap")->capture_default_str();
  app->add_option("--tol", a.tol, "Relative tolerance on the penalized objective")->capture_default_str();
  app->add_option("--epsilon", a.epsilon, "Probability clamp (default 1/(10 n R_max))");
  app->add_option("--categorical", a.categorical, "Categorical columns (names or 1-based indices), or 'auto'")
      ->delimiter(',');
  if (with_seed) app->add_option("--seed", a.seed, "Master seed")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiple-partitions model-based clustering of binned data"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Configuration file (TOML/INI), flags take precedence")->envname("MPCLUST_CONFIG");
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it")
      ->capture_default_str();
  app.set_version_flag("--version", io::kToolVersion);

  SimulateArgs sim_args;
  SelectArgs sel_args;
  RefineArgs ref_args;
  std::string out_dir = "out";
  std::string data_path, result_path, truth_path, refined_path, summary_dir;

  auto* sim = app.add_subcommand("simulate", "Generate synthetic multiple-partitions data with truth labels");
  add_simulate_flags(sim, sim_args);
  sim->add_option("--seed", sim_args.seed, "Master seed")->capture_default_str();
  sim->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* select = app.add_subcommand("select", "Select the block structure by penalized likelihood");
  select->add_option("--data", data_path, "Input CSV")->required();
  add_select_flags(select, sel_args, true);
  select->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* refine = app.add_subcommand("refine", "Refine partitions of a select result with kernel density estimates");
  refine->add_option("--data", data_path, "Original CSV")->required();
  refine->add_option("--result", result_path, "result.json from select")->required();
  refine->add_option("--max-iter", ref_args.max_iter, "Iteration cap")->capture_default_str();
  refine->add_option("--tol", ref_args.tol, "Relative tolerance")->capture_default_str();
  refine->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "Score a result against a truth record or summarize a run directory");
  auto* result_opt = evaluate->add_option("--result", result_path, "result.json from select");
  auto* truth_opt = evaluate->add_option("--truth", truth_path, "truth.json from simulate");
  evaluate->add_option("--refined", refined_path, "refined.json from refine");
  auto* summary_opt = evaluate->add_option("--summary", summary_dir, "Aggregate every report.json under a directory");
  summary_opt->excludes(result_opt)->excludes(truth_opt);
  evaluate->add_option("--out", out_dir, "Output directory")->capture_default_str();

  auto* pipeline = app.add_subcommand("pipeline", "simulate -> select -> refine -> evaluate for every replicate");
  add_simulate_flags(pipeline, sim_args);
  add_select_flags(pipeline, sel_args, false);
  pipeline->add_option("--seed", sim_args.seed, "Master seed")->capture_default_str();
  pipeline->add_option("--refine-max-iter", ref_args.max_iter, "Refinement iteration cap")->capture_default_str();
  pipeline->add_option("--refine-tol", ref_args.tol, "Refinement relative tolerance")->capture_default_str();
  pipeline->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidArguments;
  }

  try {
    if (threads < 0) throw std::invalid_argument("--threads must be >= 0");
    const fs::path out_path(out_dir);
    if (*sim) return cmd_simulate(sim_args, out_path, threads, out);
    if (*select) {
      Stopwatch clock;
      const json result = run_select(sel_args, data_path, sel_args.seed, threads, out);
      io::write_json(out_path / "result.json", result);
      write_timing(out_path, "select", clock.seconds(), threads);
      return kSuccess;
    }
    if (*refine) {
      Stopwatch clock;
      io::write_json(out_path / "refined.json", run_refine(ref_args, data_path, result_path, threads));
      write_timing(out_path, "refine", clock.seconds(), threads);
      return kSuccess;
    }
    if (*evaluate) {
      if (!summary_dir.empty()) {
        io::write_text(out_path / "summary.csv", summarize(summary_dir));
        return kSuccess;
      }
      if (result_path.empty() || truth_path.empty())
        throw std::invalid_argument("evaluate needs --result and --truth, or --summary");
      std::optional<fs::path> refined;
      if (!refined_path.empty()) refined = refined_path;
      io::write_json(out_path / "report.json", run_evaluate(result_path, truth_path, refined));
      return kSuccess;
    }
    if (*pipeline) return cmd_pipeline(sim_args, sel_args, ref_args, out_path, threads, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidArguments;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const std::exception& e) {
    err << "internal failure: " << e.what() << "\n";
    return kNumericFailure;
  }
  return kInvalidArguments;
}

}  // namespace mpclust::cli
