#pragma once

#include "disae/data/dataset.hpp"
#include "disae/harness/probe.hpp"
#include "disae/metrics/score.hpp"
#include "disae/metrics/variation.hpp"
#include "disae/model/config.hpp"
#include "disae/model/trainer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace disae::harness {

// A named model variant. Heads are (re)derived from the dataset unless the
// variant is vanilla.
struct ModelSpec {
    std::string name;
    model::DisAEConfig config;
    bool vanilla = false;

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

struct ExperimentPlan {
    std::string dataset;  // standard name or CSV path; informational for run_experiment
    std::string split_domain = "instance";
    std::vector<int> source_instances{0, 1};
    std::vector<std::vector<int>> target_sets;  // each evaluated on its own
    int k = 5;
    int repeats = 5;
    double validation_fraction = 0.1;
    std::vector<ModelSpec> models;
    // Domains that receive adversarial heads; all dataset domains when unset.
    std::optional<std::vector<std::string>> head_domains;
    metrics::VariationConfig metric;       // selection score terms
    metrics::VariationConfig reliability{metrics::jensen_shannon()};  // per-domain table
    ProbeConfig probe;
    // Runs scoring below this on their validation split count as failed.
    double score_floor = -1.0;
    // Variation and probe tables over source/target splits; sweeps skip them.
    bool evaluate_targets = true;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
    nlohmann::json to_json() const;
    static ExperimentPlan from_json(const nlohmann::json& j);
};

// Default Dis-AE and vanilla AE variants used for the standard datasets.
ModelSpec default_disae(const model::DisAEConfig& base = {});
ModelSpec default_vanilla(const model::DisAEConfig& base = {});

enum class RunStatus { ok, diverged, below_floor };
std::string to_string(RunStatus s);

struct RunRecord {
    std::string model;
    int fold = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::ok;
    std::string message;               // failure diagnostics
    metrics::ScoreReport validation;   // selection score on the fold's validation split
    int best_epoch = -1;
};

struct FoldResult {
    std::string model;
    int fold = 0;
    int selected_repeat = -1;
    double selection_score = 0.0;
    int failed_repeats = 0;
    metrics::ScoreReport test;  // terms on the held-out fold
    model::TrainedModel winner;
};

struct VariationRow {
    std::string representation;
    std::string domain;
    std::string split;
    std::string rho;
    int fold = 0;
    double v_sup = 0.0;
    double ratio = 0.0;  // to the raw representation on the same split
};

struct ProbeRow {
    std::string representation;
    std::string evaluation;
    std::string task;
    int fold = 0;
    ProbeAccuracy accuracy;
};

struct ScoreSummary {
    std::string model;
    metrics::ScoreReport mean;
    metrics::ScoreReport std;  // sample standard deviation over folds
    int n_folds = 0;
    int failed_runs = 0;
};

struct ExperimentResult {
    ExperimentPlan plan;
    std::vector<RunRecord> runs;
    std::vector<FoldResult> folds;
    std::vector<VariationRow> variation;
    std::vector<ProbeRow> probe;

    // One entry per model variant, in plan order.
    std::vector<ScoreSummary> summary() const;
    ScoreSummary summary_for(const std::string& model) const;
};

// Split names used in the variation and probe tables.
std::string target_split_name(const std::vector<int>& target_set);

std::uint64_t run_seed(std::uint64_t master, int fold, int repeat);

// Trains repeats x folds models per variant on the source instances, keeps
// the best repeat per fold by selection score on the validation split and
// reports its terms on the held-out fold.
ExperimentResult run_experiment(const data::Dataset& raw, const ExperimentPlan& plan);

}  // namespace disae::harness
