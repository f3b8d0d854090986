#pragma once

#include "disae/harness/experiment.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace disae::harness {

// Candidate values per hyperparameter; an empty lr list keeps the base lr.
struct SweepGrid {
    std::vector<double> alpha{1.0};
    std::vector<double> beta{1.0};
    std::vector<double> lambda{1.0};
    std::vector<double> l2{0.0};
    std::vector<double> lr;

    void validate() const;
    std::size_t size() const;
    // Cartesian product over `base`, alpha varying slowest and lr fastest.
    std::vector<model::DisAEConfig> expand(const model::DisAEConfig& base) const;
    nlohmann::json to_json() const;
    static SweepGrid from_json(const nlohmann::json& j);
};

struct SweepRow {
    int rank = 0;  // 1 = best mean test-fold score
    std::string name;
    model::DisAEConfig config;
    ScoreSummary summary;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ranked
    ExperimentResult experiment;
};

// Evaluates every grid point as a model variant derived from `base` under
// `plan` (plan.models is replaced) and ranks by fold-mean score.
SweepResult sweep(const data::Dataset& raw, ExperimentPlan plan, const ModelSpec& base, const SweepGrid& grid);

}  // namespace disae::harness
