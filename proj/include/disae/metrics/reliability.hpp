#pragma once

#include "disae/metrics/variation.hpp"

#include <string>
#include <vector>

namespace disae::metrics {

struct Representation {
    std::string name;  // e.g. "raw", "vanilla-ae", "dis-ae"
    Matrix source;
    Matrix target;
};

struct ReliabilityRow {
    std::string representation;
    std::string domain;
    double within_source = 0.0;      // NaN when the source has < 2 instances of the domain
    double source_and_target = 0.0;
};

// Per representation and per domain: V^sup on the source alone and on the
// union of source and target. Meant to be used with rho = jsd.
std::vector<ReliabilityRow> reliability_assessment(const std::vector<Representation>& representations,
                                                   const VariationLabels& source, const VariationLabels& target,
                                                   const VariationConfig& config);

VariationLabels concat(const VariationLabels& a, const VariationLabels& b);

}  // namespace disae::metrics
