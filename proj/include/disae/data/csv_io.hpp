#pragma once

#include "disae/data/dataset.hpp"
#include "disae/data/normalize.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace disae::data {

inline constexpr const char* kDatasetFormatVersion = "1";

// Column-role mapping that accompanies a CSV. Feature columns are plain
// names; tasks and domains appear in the header as `task:<name>` and
// `domain:<name>`.
struct Schema {
    std::vector<std::string> features;
    std::vector<TaskSpec> tasks;
    std::vector<DomainSpec> domains;
    std::optional<NormStats> normalization;
    nlohmann::json provenance = nlohmann::json::object();
};

std::filesystem::path metadata_path_for(const std::filesystem::path& csv_path);

Schema read_schema(const std::filesystem::path& metadata_path);
nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);
Schema schema_of(const Dataset& ds);

// Reads the CSV, checks it against the schema and validates labels. Rows
// with non-finite feature values are rejected with a count and row list.
Dataset load_dataset(const std::filesystem::path& csv_path, const Schema& schema);
// Reads the sidecar metadata next to the CSV.
Dataset load_dataset(const std::filesystem::path& csv_path);

// Writes `<stem>.csv` and its metadata sidecar. Output is byte-stable for a
// given dataset: doubles use the shortest round-trip representation.
void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                  const std::optional<NormStats>& stats = std::nullopt);

// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace disae::data
