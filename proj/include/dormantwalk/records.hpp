#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dormantwalk/params.hpp"

namespace dormantwalk::records {

/// Resolved inputs of one experiment run.  Serialized in full into every
/// output header so a result file identifies its own provenance.
struct ExperimentConfig {
    std::string experiment;
    ModelParams params;
    std::vector<double> times;
    std::vector<double> lambdas;
    std::uint64_t paths = 100000;
    std::uint64_t seed = 1;
    int radius = 0;  ///< 0 = per-dimension default
    std::string estimator = "exposure";  ///< exposure | hardkill | both
    std::string format = "csv";
    std::string out;

    std::string to_json_text() const;
    static ExperimentConfig from_json_text(const std::string& text);
    /// FNV-1a over the canonical JSON dump.
    std::uint64_t hash() const;
};

/// Truncation radii giving a bracketing gap below 1e-6 at the default
/// horizons: 300, 60, 25 for d = 1, 2, >= 3.
int default_radius(const ModelParams& params);

/// Tabular result plus named scalars.  The CSV form deliberately omits the
/// timestamp so a rerun with the same config and seed is byte-identical;
/// the JSON form carries it.
struct ResultRecord {
    std::string experiment;
    std::string timestamp;
    std::uint64_t config_hash = 0;
    ExperimentConfig config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, double>> scalars;

    std::string to_csv() const;
    std::string to_json_text() const;
    static ResultRecord from_csv(const std::string& text);
    static ResultRecord from_json_text(const std::string& text);
};

}  // namespace dormantwalk::records
