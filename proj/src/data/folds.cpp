#include "disae/data/folds.hpp"

#include "disae/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace disae::data {

std::vector<Index> SplitPlan::test_rows(int fold) const {
    std::vector<Index> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == fold) rows.push_back(static_cast<Index>(i));
    return rows;
}

std::vector<Index> SplitPlan::train_rows(int fold) const {
    std::vector<Index> rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != fold) rows.push_back(static_cast<Index>(i));
    return rows;
}

std::pair<std::vector<Index>, std::vector<Index>> SplitPlan::fit_validation_rows(int fold) const {
    std::vector<Index> rows = train_rows(fold);
    Rng rng(derive_seed(seed, "validation", static_cast<std::uint64_t>(fold)));
    rng.shuffle(rows);
    const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(rows.size())));
    std::vector<Index> val(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<Index> fit(rows.begin() + static_cast<std::ptrdiff_t>(n_val), rows.end());
    std::sort(val.begin(), val.end());
    std::sort(fit.begin(), fit.end());
    return {std::move(fit), std::move(val)};
}

std::string SplitPlan::serialize() const {
    nlohmann::json j;
    j["k"] = k;
    j["seed"] = seed;
    j["validation_fraction"] = validation_fraction;
    j["fold_of"] = fold_of;
    return j.dump();
}

SplitPlan make_folds(const Dataset& dataset, int k, std::uint64_t seed, double validation_fraction) {
    if (k < 2) throw ConfigError("make_folds: k must be >= 2");
    const Index n = dataset.n_samples();
    if (n < k)
        throw ConfigError("make_folds: k=" + std::to_string(k) + " exceeds sample count " + std::to_string(n));
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw ConfigError("make_folds: validation_fraction must be in [0, 1)");

    std::map<int, std::vector<Index>> by_class;
    for (Index i = 0; i < n; ++i) {
        const int y = dataset.n_tasks() > 0 ? dataset.task_labels(0)[static_cast<std::size_t>(i)] : 0;
        by_class[y].push_back(i);
    }

    SplitPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.validation_fraction = validation_fraction;
    plan.fold_of.assign(static_cast<std::size_t>(n), -1);
    Rng rng(derive_seed(seed, "folds"));
    std::size_t dealt = 0;
    for (auto& [label, rows] : by_class) {
        rng.shuffle(rows);
        for (Index r : rows) plan.fold_of[static_cast<std::size_t>(r)] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
    }
    return plan;
}

std::pair<std::vector<Index>, std::vector<Index>> stratified_holdout(
    const std::vector<int>& labels, std::vector<Index> rows, double fraction, std::uint64_t seed) {
    std::map<int, std::vector<Index>> by_class;
    for (Index r : rows) by_class[labels.at(static_cast<std::size_t>(r))].push_back(r);
    Rng rng(seed);
    std::vector<Index> keep, held;
    for (auto& [label, group] : by_class) {
        rng.shuffle(group);
        const auto n_held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(group.size())));
        held.insert(held.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_held));
        keep.insert(keep.end(), group.begin() + static_cast<std::ptrdiff_t>(n_held), group.end());
    }
    std::sort(keep.begin(), keep.end());
    std::sort(held.begin(), held.end());
    return {std::move(keep), std::move(held)};
}

}  // namespace disae::data
