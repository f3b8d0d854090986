#include "disae/nn/losses.hpp"

#include <cmath>
#include <string>

namespace disae::nn {

LossValue mse(const Matrix& prediction, const Matrix& target) {
    if (prediction.rows() != target.rows() || prediction.cols() != target.cols())
        throw ShapeError("mse: prediction and target shapes differ");
    if (prediction.size() == 0) throw ShapeError("mse: empty input");
    const double n = static_cast<double>(prediction.size());
    Matrix diff = prediction - target;
    LossValue out;
    out.value = diff.squaredNorm() / n;
    out.grad = (2.0 / n) * diff;
    return out;
}

Matrix softmax(const Matrix& logits) {
    Matrix p = logits.colwise() - logits.rowwise().maxCoeff();
    p = p.array().exp();
    p.array().colwise() /= p.rowwise().sum().array();
    return p;
}

LossValue softmax_cross_entropy(const Matrix& logits, std::span<const int> labels) {
    if (static_cast<Index>(labels.size()) != logits.rows())
        throw ShapeError("cross entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(logits.rows()) + " rows");
    if (logits.rows() == 0) throw ShapeError("cross entropy: empty batch");
    const Index n = logits.rows();
    const Index c = logits.cols();
    LossValue out;
    out.grad = softmax(logits);
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= c)
            throw ValidationError("cross entropy: label " + std::to_string(y) + " out of range [0, " +
                                  std::to_string(c) + ") at row " + std::to_string(i));
        // log-sum-exp form keeps large logits finite.
        const double mx = logits.row(i).maxCoeff();
        const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
        total += lse - logits(i, y);
        out.grad(i, y) -= 1.0;
    }
    out.value = total / static_cast<double>(n);
    out.grad /= static_cast<double>(n);
    return out;
}

std::vector<int> argmax_rows(const Matrix& m) {
    std::vector<int> out(static_cast<std::size_t>(m.rows()));
    for (Index i = 0; i < m.rows(); ++i) {
        Index j = 0;
        m.row(i).maxCoeff(&j);
        out[static_cast<std::size_t>(i)] = static_cast<int>(j);
    }
    return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
    if (predicted.size() != labels.size()) throw ShapeError("accuracy: length mismatch");
    if (labels.empty()) throw ShapeError("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace disae::nn
