#pragma once

#include "disae/data/dataset.hpp"
#include "disae/harness/experiment.hpp"
#include "disae/harness/probe.hpp"
#include "disae/metrics/variation.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace disae::harness {

struct RobustnessPlan {
    std::string dataset;
    std::string split_domain = "instance";
    std::vector<int> source_counts{2, 5, 10, 20, 35, 50};
    std::vector<ModelSpec> models;
    metrics::VariationConfig metric{metrics::jensen_shannon()};
    ProbeConfig probe;
    // Share of every source instance held out for the source-only point.
    double holdout_fraction = 0.1;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
    nlohmann::json to_json() const;
    static RobustnessPlan from_json(const nlohmann::json& j);
};

struct RobustnessPoint {
    bool is_source = false;  // the held-out source rows
    int target_rank = -1;    // distance rank of the target instance
    int instance = -1;
    double v_sup = 0.0;      // NaN when undefined (single source instance) or failed
    double accuracy = 0.0;
    bool failed = false;
};

struct RobustnessCurve {
    std::string model;
    int source_count = 0;
    std::vector<RobustnessPoint> points;  // source point first, then targets by rank
    std::string status = "ok";
    std::string message;
};

struct RobustnessResult {
    RobustnessPlan plan;
    std::vector<RobustnessCurve> curves;  // model-major, source counts in plan order

    const RobustnessCurve& curve(const std::string& model, int source_count) const;
};

// Instance ids of a categorical domain ordered by distance rank (id breaks ties).
std::vector<int> instances_by_rank(const data::DomainSpec& domain);

// Share of target ranks present in both curves where `a` is strictly more
// accurate than `b`. Failed points count as not dominating.
double dominance_fraction(const RobustnessCurve& a, const RobustnessCurve& b);

// For each model and source count c: train on the c lowest-rank instances,
// then evaluate every remaining instance in rank order (JSD V^sup between the
// held-out source rows and the target instance, and task accuracy).
RobustnessResult robustness_study(const data::Dataset& raw, const RobustnessPlan& plan);

}  // namespace disae::harness
