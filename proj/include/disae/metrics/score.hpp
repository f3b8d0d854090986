#pragma once

#include "disae/data/dataset.hpp"
#include "disae/metrics/variation.hpp"
#include "disae/model/model.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

namespace disae::metrics {

struct ScoreReport {
    std::vector<double> task_accuracy;  // per task
    double accuracy = 0.0;              // mean task accuracy
    double variation = 0.0;             // V^sup(latent) / V^sup(raw)
    double reconstruction = 0.0;        // sqrt(MSE / E(X^2))
    double score = 0.0;
    double v_sup_latent = 0.0;
    double v_sup_raw = 0.0;

    nlohmann::json to_json() const;
};

// score = accuracy - variation - reconstruction.
ScoreReport score_from_terms(double accuracy, double variation, double reconstruction);

// Evaluates the model on an already-normalised split. Task accuracy comes
// from the task heads unless `task_accuracy` is supplied (models without
// heads must supply it, e.g. from a probe). `raw_v_sup` must have been
// computed on the same split with the same rho.
ScoreReport selection_score(const model::DisAEModel& model, const data::Dataset& split,
                            const VariationLabels& labels, const VariationConfig& config, double raw_v_sup,
                            const std::optional<std::vector<double>>& task_accuracy = std::nullopt);

}  // namespace disae::metrics
