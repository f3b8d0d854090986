#pragma once

#include "disae/data/dataset.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace disae::synth {

struct CategoricalShift {
    std::string name;
    std::vector<data::AffineInstance> instances;
    std::vector<double> ratios;  // one per instance
};

enum class ResponseKind {
    translate,  // x += g(c) * r, g(c) = sin(2 pi c)
    scale,      // x *= 1 + c * r
    warp,       // x += c * r * tanh(x)
};

struct ContinuousShift {
    std::string name;
    ResponseKind kind = ResponseKind::translate;
    std::vector<int> subset;
    std::vector<double> response;  // per feature in subset
    int n_bins = 5;
    data::BinStrategy binning = data::BinStrategy::quantile;
};

using DomainShift = std::variant<CategoricalShift, ContinuousShift>;

struct ShiftPlan {
    std::vector<DomainShift> domains;
    // Gaussian-copula correlation between consecutive continuous covariates.
    double covariate_correlation = 0.5;
};

// Assigns samples to categorical instances in the declared ratios, applies
// each instance's affine map to its subset, draws continuous covariates
// uniformly on [0, 1) and applies their response. Task labels are untouched.
data::Dataset apply_shift_plan(const data::Dataset& dataset, const ShiftPlan& plan, std::uint64_t seed);

std::string to_string(ResponseKind k);

}  // namespace disae::synth
