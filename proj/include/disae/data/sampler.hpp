#pragma once

#include "disae/data/dataset.hpp"
#include "disae/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace disae::data {

// Draws batches with replacement so that each class of the balancing task is
// equally likely (or follows TaskSpec::class_weights when present).
class WeightedBatchSampler {
public:
    WeightedBatchSampler(std::span<const int> labels, const TaskSpec& balance_task,
                         Index batch_size, std::uint64_t seed);

    // Batch entries index into the label span given at construction.
    std::vector<Index> next_batch();

    Index batch_size() const { return batch_size_; }

private:
    std::vector<double> cumulative_;
    Index batch_size_;
    Rng rng_;
};

}  // namespace disae::data
