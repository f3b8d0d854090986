#pragma once

#include "disae/core.hpp"
#include "disae/data/dataset.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace disae::data {

inline constexpr double kStdFloor = 1e-12;

struct NormStats {
    std::vector<double> means;
    std::vector<double> stds;  // population convention, floored at kStdFloor
};

NormStats fit_norm_stats(const Matrix& x);
Matrix apply_norm(const Matrix& x, const NormStats& stats);
Matrix denormalize(const Matrix& z, const NormStats& stats);

// Fits stats on `dataset` unless `stats` is given, then standardizes.
std::pair<Dataset, NormStats> normalize(const Dataset& dataset,
                                        const std::optional<NormStats>& stats = std::nullopt);

}  // namespace disae::data
