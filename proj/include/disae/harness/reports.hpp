#pragma once

#include "disae/harness/experiment.hpp"
#include "disae/harness/robustness.hpp"
#include "disae/harness/sweep.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace disae::harness {

inline constexpr int kReportFormatVersion = 1;

// Score terms: one row per (model, fold) plus "mean" and "std" rows.
void write_scores_csv(const ExperimentResult& result, const std::filesystem::path& path);
// Every training run with its validation terms and status.
void write_runs_csv(const ExperimentResult& result, const std::filesystem::path& path);
// Fold-averaged V^sup per (representation, domain, split, rho).
void write_variation_csv(const ExperimentResult& result, const std::filesystem::path& path);
// Probe accuracies; the first line names the probe classifier.
void write_probe_csv(const ExperimentResult& result, const std::filesystem::path& path);
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
void write_robustness_csv(const RobustnessResult& result, const std::filesystem::path& path);

// scores.csv, runs.csv and, when targets were evaluated, variation.csv and
// probe.csv inside `dir`.
void write_experiment_reports(const ExperimentResult& result, const std::filesystem::path& dir);

// Format versions and substitutions shared by every manifest.
nlohmann::json manifest_base(const std::string& command);
void write_manifest(const nlohmann::json& manifest, const std::filesystem::path& dir);

// Text form used in CSV cells: shortest round trip, "nan" for NaN.
std::string cell(double v);

}  // namespace disae::harness
