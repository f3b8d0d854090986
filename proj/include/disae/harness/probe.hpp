#pragma once

#include "disae/data/normalize.hpp"
#include "disae/nn/dense.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace disae::harness {

// Downstream classifier trained on a frozen representation: one relu hidden
// layer (none when hidden = 0) and a softmax output, trained with Adam on
// standardised inputs.
struct ProbeConfig {
    int hidden = 32;
    int epochs = 30;
    int batch_size = 128;
    double lr = 3e-3;
    double l2 = 1e-4;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static ProbeConfig from_json(const nlohmann::json& j);
};

inline constexpr const char* kProbeDescription =
    "probe: in-repo dense softmax classifier (one relu hidden layer), used in place of a gradient-boosted tree model";

struct Probe {
    data::NormStats stats;
    nn::DenseNet net;
    int n_classes = 2;

    std::vector<int> predict(const Matrix& x) const;
};

Probe train_probe(const Matrix& x, std::span<const int> labels, int n_classes, const ProbeConfig& config);

struct ProbeAccuracy {
    double overall = 0.0;
    std::vector<double> per_class;  // NaN for classes absent from the evaluation set
    Index n = 0;
};

ProbeAccuracy evaluate_probe(const Probe& probe, const Matrix& x, std::span<const int> labels);

}  // namespace disae::harness
