#pragma once

#include "disae/data/dataset.hpp"

#include <cstdint>
#include <vector>

namespace disae::synth {

struct GeneratorConfig {
    Index n_samples = 13000;
    int n_features = 8;
    int n_informative = 3;
    int n_redundant = 5;
    double class_sep = 1.0;
    int n_clusters_per_class = 2;
    int n_tasks = 1;
    std::vector<int> task_classes{2};
    // Per task, per class relative frequencies; empty means balanced.
    std::vector<std::vector<double>> task_ratios;
    // Gaussian noise added to redundant features (they are otherwise exact
    // linear combinations of the informative ones).
    double feature_noise = 0.0;
    // Noise on the multilabel decision functions before thresholding.
    double label_noise = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static GeneratorConfig from_json(const nlohmann::json& j);
};

// Gaussian blobs at class-specific hypercube vertices (side 2*class_sep) in
// the informative subspace; redundant features are random linear combinations
// of the informative ones; the rest are standard-normal noise. Single task.
data::Dataset make_classification(const GeneratorConfig& config);

// Standard-normal informative features with one linear decision function per
// task; weight vectors are mutually orthogonal while n_tasks <= n_informative.
// Class thresholds sit at the quantiles implied by task_ratios.
data::Dataset make_multilabel(const GeneratorConfig& config);

// Largest-remainder split of n into integer counts proportional to ratios.
std::vector<Index> proportional_counts(Index n, const std::vector<double>& ratios);

}  // namespace disae::synth
