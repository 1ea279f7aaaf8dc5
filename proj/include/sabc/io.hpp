#pragma once

#include "sabc/dictionary.hpp"
#include "sabc/sabc.hpp"
#include "sabc/sabc_config.hpp"
#include "sabc/simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sabc {

namespace fs = std::filesystem;

/// Shortest decimal form that parses back to the same double (max 17 digits).
std::string format_double(double v);

/// `dir/data.csv` (t,acc) and `dir/data.meta.json`. Creates `dir` if needed.
void write_dataset(const Dataset& data, const fs::path& dir);

/// Reads a `t,acc` CSV and the `<stem>.meta.json` sidecar next to it.
/// Throws InputError naming the file on any problem.
Dataset read_dataset(const fs::path& csv);

/// "xdd = c0 + c1*xd + c2*sin(x)" with the nonzero coefficients of theta.
std::string format_model(const Dictionary& dict, const Vector& theta);

/// What `report.json` keeps of a run; enough to recompute the metrics.
struct StoredReport {
    std::vector<std::string> terms;
    Vector best_theta;
    double best_loss = 0.0;
    double best_nmse = 0.0;
    int best_l0 = 0;
    Vector inclusion_prob;
};

/// Serialised report. Re-reading and re-serialising gives the same bytes.
std::string report_json(const RunReport& report, const Dictionary& dict, const SabcConfig& cfg);
StoredReport read_report(const fs::path& path);
/// Parses the terms/best section of a report document (text form).
StoredReport parse_report(const std::string& text);
/// Re-serialises a report document in canonical form.
std::string canonical_json(const std::string& text);

std::string inclusion_csv(const Dictionary& dict, const Vector& inclusion_prob);
std::string trace_csv(const std::vector<PopulationSummary>& populations);
/// t, measured acceleration and the simulated acceleration of theta; the last
/// column is empty where the simulation diverged.
std::string prediction_csv(const Dataset& data, const Dictionary& dict, const Vector& theta, const SimOptions& sim);

/// Truth file: a JSON object mapping term labels to coefficients.
std::vector<std::pair<std::string, double>> read_truth(const fs::path& path);

/// Metrics written by `evaluate`.
std::string evaluation_json(const StoredReport& report, const Dictionary& dict, const TruthModel& truth);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace sabc
