#include "disae/data/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace disae::data {

NormStats fit_norm_stats(const Matrix& x) {
    NormStats s;
    const auto n = static_cast<double>(x.rows());
    for (Index j = 0; j < x.cols(); ++j) {
        const double mean = n > 0 ? x.col(j).sum() / n : 0.0;
        const double var = n > 0 ? (x.col(j).array() - mean).square().sum() / n : 0.0;
        s.means.push_back(mean);
        s.stds.push_back(std::max(std::sqrt(var), kStdFloor));
    }
    return s;
}

static void check_width(const Matrix& x, const NormStats& stats) {
    if (static_cast<std::size_t>(x.cols()) != stats.means.size() ||
        stats.means.size() != stats.stds.size())
        throw ShapeError("normalization stats width " + std::to_string(stats.means.size()) +
                         " does not match data width " + std::to_string(x.cols()));
}

Matrix apply_norm(const Matrix& x, const NormStats& stats) {
    check_width(x, stats);
    Matrix z(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j)
        z.col(j) = (x.col(j).array() - stats.means[j]) / stats.stds[j];
    return z;
}

Matrix denormalize(const Matrix& z, const NormStats& stats) {
    check_width(z, stats);
    Matrix x(z.rows(), z.cols());
    for (Index j = 0; j < z.cols(); ++j)
        x.col(j) = z.col(j).array() * stats.stds[j] + stats.means[j];
    return x;
}

std::pair<Dataset, NormStats> normalize(const Dataset& dataset, const std::optional<NormStats>& stats) {
    NormStats s = stats ? *stats : fit_norm_stats(dataset.features());
    return {dataset.with_features(apply_norm(dataset.features(), s)), std::move(s)};
}

}  // namespace disae::data
