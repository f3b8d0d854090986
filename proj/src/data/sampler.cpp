#include "disae/data/sampler.hpp"

#include <algorithm>

namespace disae::data {

WeightedBatchSampler::WeightedBatchSampler(std::span<const int> labels, const TaskSpec& balance_task,
                                           Index batch_size, std::uint64_t seed)
    : batch_size_(batch_size), rng_(seed) {
    if (batch_size < 1) throw ConfigError("sampler: batch_size must be >= 1");
    balance_task.validate();
    std::vector<std::size_t> counts(static_cast<std::size_t>(balance_task.n_classes), 0);
    for (int y : labels) {
        if (y < 0 || y >= balance_task.n_classes)
            throw ValidationError("sampler: label " + std::to_string(y) + " outside task '" +
                                  balance_task.name + "'");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0)
            throw ValidationError("sampler: class " + std::to_string(c) + " of task '" + balance_task.name +
                                  "' has no samples");

    cumulative_.reserve(labels.size());
    double acc = 0.0;
    for (int y : labels) {
        const auto c = static_cast<std::size_t>(y);
        const double w = balance_task.class_weights.empty() ? 1.0 : balance_task.class_weights[c];
        acc += w / static_cast<double>(counts[c]);
        cumulative_.push_back(acc);
    }
}

std::vector<Index> WeightedBatchSampler::next_batch() {
    std::vector<Index> batch(static_cast<std::size_t>(batch_size_));
    const double total = cumulative_.back();
    for (auto& idx : batch) {
        const double u = rng_.uniform() * total;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        idx = static_cast<Index>(it - cumulative_.begin());
    }
    return batch;
}

}  // namespace disae::data
