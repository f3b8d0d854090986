#pragma once

#include "disae/core.hpp"

#include <span>
#include <vector>

namespace disae::nn {

struct LossValue {
    double value = 0.0;
    Matrix grad;  // d value / d prediction
};

// Mean over all entries.
LossValue mse(const Matrix& prediction, const Matrix& target);

// Mean over the batch, natural log. Labels must lie in [0, logits.cols()).
LossValue softmax_cross_entropy(const Matrix& logits, std::span<const int> labels);

Matrix softmax(const Matrix& logits);
std::vector<int> argmax_rows(const Matrix& m);
double accuracy(std::span<const int> predicted, std::span<const int> labels);

}  // namespace disae::nn
