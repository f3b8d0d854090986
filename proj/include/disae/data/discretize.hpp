#pragma once

#include "disae/data/dataset.hpp"

#include <span>
#include <vector>

namespace disae::data {

// Maps a continuous domain column to bin ids in [0, n_bins). Throws
// ValidationError when the column has fewer distinct values than bins or a
// bin would be left empty.
std::vector<int> discretize_domain(std::span<const double> values, const DomainSpec& spec);

}  // namespace disae::data
