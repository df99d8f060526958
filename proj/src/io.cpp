#include "mpclust/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mpclust/errors.hpp"

namespace mpclust::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r' || s[a] == '"')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r' || s[b - 1] == '"')) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool is_positive_integer(double v) { return v >= 1.0 && v == std::floor(v) && v < 1e9; }

}  // namespace

Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  const auto names = split_line(line);
  const std::size_t d = names.size();
  std::vector<double> values;
  std::size_t n = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != d)
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0.0;
      if (!parse_double(fields[j], v))
        throw DataError("missing or non-numeric value '" + fields[j] + "' at line " + std::to_string(line_no) +
                        ", column " + names[j]);
      values.push_back(v);
    }
    ++n;
  }
  if (n == 0) throw DataError("'" + path.string() + "' has no observations");

  std::vector<ColumnType> types(d);
  std::vector<char> categorical(d, 0);
  for (const std::string& key : options.categorical) {
    auto it = std::find(names.begin(), names.end(), key);
    std::size_t j = d;
    if (it != names.end()) {
      j = static_cast<std::size_t>(it - names.begin());
    } else {
      std::size_t idx = 0;
      const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
      if (ec == std::errc() && ptr == key.data() + key.size() && idx >= 1 && idx <= d) j = idx - 1;
    }
    if (j == d) throw std::invalid_argument("--categorical names unknown column '" + key + "'");
    categorical[j] = 1;
  }
  const std::size_t max_distinct = static_cast<std::size_t>(std::max(10, options.max_levels_hint));
  for (std::size_t j = 0; j < d; ++j) {
    bool all_codes = true;
    std::set<double> distinct;
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = values[i * d + j];
      if (!is_positive_integer(v)) all_codes = false;
      distinct.insert(v);
      top = std::max(top, v);
    }
    if (categorical[j] && !all_codes)
      throw DataError("categorical column " + names[j] + " must hold integer level codes >= 1");
    if (!categorical[j] && options.infer_categorical && all_codes && distinct.size() <= max_distinct) categorical[j] = 1;
    if (categorical[j]) types[j] = ColumnType::categorical(static_cast<int>(top));
  }
  return Dataset(n, d, std::move(values), std::move(types), names);
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::string text;
  const auto& names = data.column_names();
  for (std::size_t j = 0; j < data.d(); ++j) {
    if (j) text += ',';
    text += names.empty() ? "x" + std::to_string(j + 1) : names[j];
  }
  text += '\n';
  char buf[64];
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t j = 0; j < data.d(); ++j) {
      if (j) text += ',';
      std::snprintf(buf, sizeof buf, "%.17g", data(i, j));
      text += buf;
    }
    text += '\n';
  }
  write_text(path, text);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("failed writing '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

json tool_info() { return {{"name", kToolName}, {"version", kToolVersion}}; }

namespace {

std::vector<int> plus_one(const std::vector<int>& v) {
  std::vector<int> out(v);
  for (int& x : out) ++x;
  return out;
}

std::vector<int> minus_one(const std::vector<int>& v) {
  std::vector<int> out(v);
  for (int& x : out) --x;
  return out;
}

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

json structure_to_json(const ModelStructure& s) {
  return {{"B", s.B}, {"G", s.G}, {"omega", plus_one(s.omega)}};
}

ModelStructure structure_from_json(const json& j) {
  return guarded("structure", [&] {
    ModelStructure s;
    s.B = j.at("B").get<int>();
    s.G = j.at("G").get<std::vector<int>>();
    s.omega = minus_one(j.at("omega").get<std::vector<int>>());
    if (static_cast<int>(s.G.size()) != s.B) throw DataError("structure G does not have B entries");
    for (int b : s.omega) {
      if (b < 0 || b >= s.B) throw DataError("structure omega out of range");
    }
    return s;
  });
}

json scheme_to_json(const BinningScheme& scheme, const std::vector<std::string>& names) {
  json vars = json::array();
  for (std::size_t j = 0; j < scheme.d(); ++j) {
    const auto& v = scheme.variables[j];
    json e;
    e["name"] = names.empty() ? "x" + std::to_string(j + 1) : names[j];
    e["type"] = v.categorical ? "categorical" : "continuous";
    e["R"] = v.R();
    if (!v.categorical) {
      e["boundaries"] = v.boundaries;
      e["measures"] = v.measures;
    }
    vars.push_back(std::move(e));
  }
  return {{"variables", std::move(vars)}};
}

BinningScheme scheme_from_json(const json& j) {
  return guarded("binning scheme", [&] {
    BinningScheme scheme;
    for (const auto& e : j.at("variables")) {
      VariableBins v;
      v.categorical = e.at("type").get<std::string>() == "categorical";
      if (v.categorical) {
        v.measures.assign(e.at("R").get<std::size_t>(), 1.0);
      } else {
        v.boundaries = e.at("boundaries").get<std::vector<double>>();
        v.measures = e.at("measures").get<std::vector<double>>();
        if (v.boundaries.size() != v.measures.size() + 1) throw DataError("bin boundaries and measures disagree");
      }
      scheme.variables.push_back(std::move(v));
    }
    return scheme;
  });
}

json partitions_to_json(const PartitionSet& p) {
  json out = json::array();
  for (const auto& labels : p.assignments) out.push_back(plus_one(labels));
  return out;
}

PartitionSet partitions_from_json(const json& j) {
  return guarded("partitions", [&] {
    PartitionSet p;
    for (const auto& labels : j) p.assignments.push_back(minus_one(labels.get<std::vector<int>>()));
    return p;
  });
}

json responsibilities_to_json(const Responsibilities& r) {
  json out = json::array();
  for (const Matrix& t : r.t) {
    json rows = json::array();
    for (std::size_t i = 0; i < t.rows; ++i) {
      const auto row = t.row(i);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

Responsibilities responsibilities_from_json(const json& j) {
  return guarded("responsibilities", [&] {
    Responsibilities r;
    for (const auto& block : j) {
      const std::size_t n = block.size();
      const std::size_t G = n ? block.front().size() : 0;
      Matrix t(n, G);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = block[i].get<std::vector<double>>();
        if (row.size() != G) throw DataError("ragged responsibilities");
        std::copy(row.begin(), row.end(), t.row(i).begin());
      }
      r.t.push_back(std::move(t));
    }
    return r;
  });
}

json parameters_to_json(const ModelStructure& s, const DiscreteParameters& params) {
  json blocks = json::array();
  const auto members = s.blocks();
  for (int b = 0; b < s.B; ++b) {
    json block;
    block["block"] = b + 1;
    block["variables"] = plus_one(members[b]);
    block["pi"] = params.pi[b];
    json alpha = json::array();
    for (int g = 0; g < s.G[b]; ++g) {
      json comp = json::array();
      for (int j : members[b]) {
        const int R = static_cast<int>(params.alpha[j].size()) / s.G[b];
        comp.push_back(std::vector<double>(params.alpha[j].begin() + static_cast<std::ptrdiff_t>(g) * R,
                                           params.alpha[j].begin() + static_cast<std::ptrdiff_t>(g + 1) * R));
      }
      alpha.push_back(std::move(comp));
    }
    block["alpha"] = std::move(alpha);
    blocks.push_back(std::move(block));
  }
  return {{"epsilon", params.epsilon}, {"blocks", std::move(blocks)}};
}

DiscreteParameters parameters_from_json(const json& j, const ModelStructure& s) {
  return guarded("parameters", [&] {
    DiscreteParameters params;
    params.epsilon = j.at("epsilon").get<double>();
    params.pi.resize(static_cast<std::size_t>(s.B));
    params.alpha.resize(s.omega.size());
    const auto& blocks = j.at("blocks");
    if (static_cast<int>(blocks.size()) != s.B) throw DataError("parameter blocks do not match the structure");
    for (int b = 0; b < s.B; ++b) {
      const auto& block = blocks[b];
      params.pi[b] = block.at("pi").get<std::vector<double>>();
      const auto vars = minus_one(block.at("variables").get<std::vector<int>>());
      const auto& alpha = block.at("alpha");
      if (static_cast<int>(alpha.size()) != s.G[b]) throw DataError("alpha does not have G_b components");
      for (std::size_t k = 0; k < vars.size(); ++k) {
        const int jv = vars[k];
        if (jv < 0 || static_cast<std::size_t>(jv) >= s.omega.size() || s.omega[jv] != b)
          throw DataError("parameter variables do not match omega");
        for (int g = 0; g < s.G[b]; ++g) {
          const auto row = alpha[g].at(k).get<std::vector<double>>();
          params.alpha[jv].insert(params.alpha[jv].end(), row.begin(), row.end());
        }
      }
    }
    return params;
  });
}

json fit_to_json(const FitResult& fit, const BinningScheme& scheme, const std::vector<std::string>& names) {
  json out;
  out["structure"] = structure_to_json(fit.structure);
  out["binning"] = scheme_to_json(scheme, names);
  out["parameters"] = parameters_to_json(fit.structure, fit.params);
  out["loglik"] = fit.loglik;
  out["penalty"] = fit.penalty;
  out["penalized_loglik"] = fit.penalized_loglik;
  out["n_iterations"] = fit.n_iterations;
  out["converged"] = fit.converged;
  out["objective_trace"] = fit.objective_trace;
  out["map_partitions"] = partitions_to_json(fit.map_partitions);
  out["responsibilities"] = responsibilities_to_json(fit.responsibilities);
  return out;
}

LoadedFit fit_from_json(const json& j) {
  return guarded("fit result", [&] {
    LoadedFit loaded;
    FitResult& fit = loaded.fit;
    fit.structure = structure_from_json(j.at("structure"));
    loaded.scheme = scheme_from_json(j.at("binning"));
    for (const auto& v : j.at("binning").at("variables")) loaded.column_names.push_back(v.at("name").get<std::string>());
    fit.params = parameters_from_json(j.at("parameters"), fit.structure);
    fit.loglik = j.at("loglik").get<double>();
    fit.penalty = j.at("penalty").get<double>();
    fit.penalized_loglik = j.at("penalized_loglik").get<double>();
    fit.n_iterations = j.at("n_iterations").get<int>();
    fit.converged = j.at("converged").get<bool>();
    fit.objective_trace = j.value("objective_trace", std::vector<double>{});
    fit.map_partitions = partitions_from_json(j.at("map_partitions"));
    fit.responsibilities = responsibilities_from_json(j.at("responsibilities"));
    if (loaded.scheme.d() != fit.structure.omega.size()) throw DataError("binning scheme does not match the structure");
    if (static_cast<int>(fit.responsibilities.t.size()) != fit.structure.B)
      throw DataError("responsibilities do not match the structure");
    return loaded;
  });
}

json selection_to_json(const SelectionResult& selection, const BinningScheme& scheme,
                       const std::vector<std::string>& names) {
  json out = fit_to_json(selection.best, scheme, names);
  json candidates = json::array();
  for (const auto& c : selection.candidates) {
    candidates.push_back({{"B", c.candidate.B},
                          {"G", c.candidate.G},
                          {"best_objective", c.best_objective},
                          {"best_restart", c.best_restart + 1},
                          {"admissible", c.admissible},
                          {"pruned_structure", structure_to_json(c.best_structure)}});
  }
  out["selected_candidate"] = selection.selected_candidate + 1;
  out["candidates"] = std::move(candidates);
  return out;
}

json simulation_config_to_json(const SimulationConfig& c) {
  json out;
  out["blocks"] = c.B;
  out["components"] = c.G;
  out["block_size"] = c.block_size;
  out["n"] = c.n;
  out["noise"] = to_string(c.noise);
  out["tau"] = c.tau ? json(*c.tau) : json(nullptr);
  out["target_miscl"] = c.target_miscl ? json(*c.target_miscl) : json(nullptr);
  out["proportions"] = c.proportions;
  out["seed"] = c.seed;
  return out;
}

SimulationConfig simulation_config_from_json(const json& j) {
  return guarded("simulation config", [&] {
    SimulationConfig c;
    c.B = j.at("blocks").get<int>();
    c.G = j.at("components").get<std::vector<int>>();
    c.block_size = j.at("block_size").get<int>();
    c.n = j.at("n").get<std::size_t>();
    c.noise = parse_noise_family(j.at("noise").get<std::string>());
    if (!j.at("tau").is_null()) c.tau = j.at("tau").get<double>();
    if (!j.at("target_miscl").is_null()) c.target_miscl = j.at("target_miscl").get<double>();
    c.proportions = j.value("proportions", std::vector<std::vector<double>>{});
    c.seed = j.value("seed", std::uint64_t{0});
    return c;
  });
}

json truth_to_json(const LabeledSample& sample, const SimulationConfig& config) {
  json out;
  out["omega"] = plus_one(sample.true_omega);
  out["G"] = config.G;
  out["tau"] = sample.tau_used;
  out["partitions"] = partitions_to_json(sample.true_partitions);
  return out;
}

Truth truth_from_json(const json& j) {
  return guarded("truth record", [&] {
    Truth t;
    t.omega = minus_one(j.at("omega").get<std::vector<int>>());
    t.G = j.at("G").get<std::vector<int>>();
    t.partitions = partitions_from_json(j.at("partitions"));
    t.config = j.value("config", json::object());
    if (t.G.size() != t.partitions.assignments.size()) throw DataError("truth G does not match its partitions");
    return t;
  });
}

json refinement_to_json(const std::vector<BlockRefinement>& blocks) {
  json out = json::array();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& r = blocks[b];
    Responsibilities wrapped;
    wrapped.t.push_back(r.responsibilities);
    std::vector<int> labels = plus_one(r.partition);
    out.push_back({{"block", b + 1},
                   {"pi", r.pi},
                   {"bandwidths", r.bandwidths},
                   {"n_iterations", r.n_iterations},
                   {"converged", r.converged},
                   {"objective_trace", r.objective_trace},
                   {"partition", labels},
                   {"responsibilities", responsibilities_to_json(wrapped).front()}});
  }
  return out;
}

PartitionSet refined_partitions_from_json(const json& j) {
  return guarded("refinement record", [&] {
    PartitionSet p;
    for (const auto& block : j.at("blocks")) p.assignments.push_back(minus_one(block.at("partition").get<std::vector<int>>()));
    return p;
  });
}

json report_to_json(const EvaluationReport& r) {
  std::vector<int> matched;
  for (int m : r.matched_block) matched.push_back(m < 0 ? 0 : m + 1);
  return {{"block_ari", r.block_ari},
          {"per_block_ari", r.per_block_ari},
          {"matched_block", matched},
          {"mean_individual_ari", r.mean_individual_ari},
          {"structure_match", r.structure_match}};
}

}  // namespace mpclust::io
