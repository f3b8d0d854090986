#include "disae/data/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace disae::data {

std::vector<int> discretize_domain(std::span<const double> values, const DomainSpec& spec) {
    if (spec.kind != DomainKind::continuous)
        throw ConfigError("discretize_domain: domain '" + spec.name + "' is not continuous");
    if (spec.n_bins < 2) throw ConfigError("discretize_domain: n_bins must be >= 2");
    if (values.empty()) throw ValidationError("discretize_domain: empty column");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
    if (distinct < spec.n_bins)
        throw ValidationError("domain '" + spec.name + "' has " + std::to_string(distinct) +
                              " distinct values but " + std::to_string(spec.n_bins) +
                              " bins were requested; lower n_bins");

    const int nb = spec.n_bins;
    const std::size_t n = values.size();
    std::vector<int> ids(n);
    if (spec.binning == BinStrategy::uniform) {
        const double lo = sorted.front();
        const double hi = sorted[static_cast<std::size_t>(distinct - 1)];
        const double width = (hi - lo) / nb;
        for (std::size_t i = 0; i < n; ++i) {
            const int b = static_cast<int>(std::floor((values[i] - lo) / width));
            ids[i] = std::clamp(b, 0, nb - 1);
        }
    } else {
        sorted.assign(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        // Edge j is the value at position j*n/nb; a value's bin is the number of
        // edges not above it, so ties always share a bin.
        std::vector<double> edges;
        for (int j = 1; j < nb; ++j) edges.push_back(sorted[(static_cast<std::size_t>(j) * n) / nb]);
        for (std::size_t i = 0; i < n; ++i)
            ids[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), values[i]) - edges.begin());
    }

    std::vector<std::size_t> counts(static_cast<std::size_t>(nb), 0);
    for (int b : ids) ++counts[static_cast<std::size_t>(b)];
    for (int b = 0; b < nb; ++b)
        if (counts[static_cast<std::size_t>(b)] == 0)
            throw ValidationError("domain '" + spec.name + "': bin " + std::to_string(b) +
                                  " is empty (heavy ties); lower n_bins");
    return ids;
}

}  // namespace disae::data
