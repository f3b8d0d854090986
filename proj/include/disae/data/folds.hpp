#pragma once

#include "disae/data/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace disae::data {

struct SplitPlan {
    int k = 5;
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;
    std::vector<int> fold_of;  // per sample

    std::vector<Index> test_rows(int fold) const;
    std::vector<Index> train_rows(int fold) const;
    // Deterministic split of a fold's training rows into fit/validation parts.
    std::pair<std::vector<Index>, std::vector<Index>> fit_validation_rows(int fold) const;

    std::string serialize() const;
};

// Stratified by the first task's labels.
SplitPlan make_folds(const Dataset& dataset, int k, std::uint64_t seed,
                     double validation_fraction = 0.1);

// Shuffled, stratified holdout split of `rows` (fraction in the second part).
std::pair<std::vector<Index>, std::vector<Index>> stratified_holdout(
    const std::vector<int>& labels, std::vector<Index> rows, double fraction, std::uint64_t seed);

}  // namespace disae::data
