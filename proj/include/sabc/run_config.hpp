#pragma once

#include "sabc/dictionary.hpp"
#include "sabc/sabc_config.hpp"
#include "sabc/simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sabc {

/// Where the measurements come from: a CSV on disk or a generated benchmark.
struct DatasetSource {
    std::optional<std::filesystem::path> path;
    std::string benchmark;
    double noise = 0.02;
    std::uint64_t seed = 0;
};

/// A parsed and validated discovery run description.
struct RunConfigFile {
    DatasetSource dataset;
    Dictionary dictionary;
    std::string dictionary_name;  // preset name, or "custom"
    SabcConfig sabc;
    bool substeps_given = false;  // otherwise chosen from the dataset's dt
    std::optional<std::vector<std::pair<std::string, double>>> truth;
    bool truth_from_dataset = false;  // "truth": "dataset"
    std::filesystem::path output;
};

/// Parses a run config. Relative paths resolve against `base_dir`. Unknown keys,
/// wrong types and out-of-range values throw InputError with the key path.
RunConfigFile parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfigFile load_run_config(const std::filesystem::path& path);

/// Loads or generates the dataset and fills in data-dependent defaults
/// (integrator substeps, truth taken from the dataset).
Dataset resolve_dataset(RunConfigFile& cfg);

std::vector<std::string> preset_names();
/// JSON text of a shipped preset; throws InputError for unknown names.
std::string preset_config(const std::string& name);

}  // namespace sabc
