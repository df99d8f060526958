#pragma once

// File formats: CSV data matrices and JSON records for truth, fits,
// refinements and evaluation reports. Labels, block indices and level codes
// are 1-based on disk.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpclust/binning.hpp"
#include "mpclust/core_model.hpp"
#include "mpclust/evaluation.hpp"
#include "mpclust/refinement.hpp"
#include "mpclust/selection_em.hpp"
#include "mpclust/simulation.hpp"

namespace mpclust::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "mpclust";
inline constexpr const char* kToolVersion = "1.0.0";

struct CsvOptions {
  /// Column names or 1-based indices to read as categorical.
  std::vector<std::string> categorical;
  /// Infer categorical columns: all values positive integers with at most
  /// max(10, max_levels_hint) distinct values.
  bool infer_categorical = false;
  int max_levels_hint = 0;
};

/// Reads a headed CSV. Throws DataError on unreadable files, ragged rows,
/// missing or non-numeric values, and invalid categorical codes.
Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes values with 17 significant digits so that read_csv reproduces them exactly.
void write_csv(const std::filesystem::path& path, const Dataset& data);

json read_json(const std::filesystem::path& path);
/// Pretty-printed, newline-terminated; written through a temporary file and renamed.
void write_json(const std::filesystem::path& path, const json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

json tool_info();

json structure_to_json(const ModelStructure& s);
ModelStructure structure_from_json(const json& j);

json scheme_to_json(const BinningScheme& scheme, const std::vector<std::string>& names);
BinningScheme scheme_from_json(const json& j);

json partitions_to_json(const PartitionSet& p);
PartitionSet partitions_from_json(const json& j);

json responsibilities_to_json(const Responsibilities& r);
Responsibilities responsibilities_from_json(const json& j);

/// Per block: its variables, pi, and alpha[g][k] for the k-th variable of the block.
json parameters_to_json(const ModelStructure& s, const DiscreteParameters& params);
DiscreteParameters parameters_from_json(const json& j, const ModelStructure& s);

/// Full fit record; the bin scheme is embedded so the fit reloads without the data.
json fit_to_json(const FitResult& fit, const BinningScheme& scheme, const std::vector<std::string>& names);

struct LoadedFit {
  FitResult fit;
  BinningScheme scheme;
  std::vector<std::string> column_names;
};
LoadedFit fit_from_json(const json& j);

json selection_to_json(const SelectionResult& selection, const BinningScheme& scheme,
                       const std::vector<std::string>& names);

json simulation_config_to_json(const SimulationConfig& c);
SimulationConfig simulation_config_from_json(const json& j);

json truth_to_json(const LabeledSample& sample, const SimulationConfig& config);

struct Truth {
  std::vector<int> omega;
  std::vector<int> G;
  PartitionSet partitions;
  json config;
};
Truth truth_from_json(const json& j);

json refinement_to_json(const std::vector<BlockRefinement>& blocks);
PartitionSet refined_partitions_from_json(const json& j);

json report_to_json(const EvaluationReport& report);

}  // namespace mpclust::io
