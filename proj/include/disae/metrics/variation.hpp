#pragma once

#include "disae/data/dataset.hpp"
#include "disae/metrics/dissimilarity.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace disae::metrics {

// Task and domain labels the variation is conditioned on, one column per
// task/domain, one entry per sample.
struct VariationLabels {
    std::vector<std::vector<int>> tasks;
    std::vector<std::vector<int>> domains;
    std::vector<std::string> task_names;
    std::vector<std::string> domain_names;

    std::size_t n_samples() const;
    // Every task and every domain (or only the named domains) of `dataset`.
    static VariationLabels from(const data::Dataset& dataset,
                                const std::optional<std::vector<std::string>>& domains = std::nullopt);
    VariationLabels only_domain(std::size_t d) const;
};

struct VariationConfig {
    Dissimilarity rho;
    int min_cell = 10;
    int n_directions = 512;
    std::uint64_t seed = 0;
    // Also evaluate per-cell linear discriminant directions (see README).
    bool discriminant_directions = true;

    void validate() const;
    nlohmann::json to_json() const;
    static VariationConfig from_json(const nlohmann::json& j);
};

struct FeatureVariation {
    Matrix per_pair;  // tasks x domains, entry = variation for (tau, delta)
    double v = 0.0;   // max over entries
};

// Values are standardised internally before rho is applied; conditional
// cells with fewer than min_cell samples are skipped.
FeatureVariation feature_variation(std::span<const double> values, const VariationLabels& labels,
                                   const Dissimilarity& rho, int min_cell = 10);

struct VariationReport {
    double v_sup = 0.0;
    Vector direction;            // unit maximiser
    Matrix per_pair;             // feature variation table along `direction`
    std::vector<double> axis_v;  // V along each coordinate axis
    int n_random = 0;
    int n_discriminant = 0;
    int n_evaluated = 0;
    std::string rho;

    nlohmann::json to_json() const;
};

// Approximates the supremum of V(u^T Z) over unit u.
VariationReport model_variation(const Matrix& z, const VariationLabels& labels, const VariationConfig& config);

}  // namespace disae::metrics
