#pragma once

#include "disae/data/dataset.hpp"
#include "disae/synth/generators.hpp"
#include "disae/synth/shift.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace disae::synth {

enum class StandardDataset { A, B, C, ManyAffines };

inline constexpr Index kManyAffinesDeskSize = 50000;
inline constexpr Index kManyAffinesFullSize = 500000;
inline constexpr int kManyAffinesInstances = 70;

// Accepts "A", "B", "C", "ManyAffines" / "many-affines" (case-insensitive).
StandardDataset parse_standard_name(const std::string& name);
std::string standard_name(StandardDataset which);

GeneratorConfig standard_generator_config(StandardDataset which, std::uint64_t seed);
// `base` is the unshifted generator output; shift directions are drawn
// relative to its redundant-feature mixing matrix.
ShiftPlan standard_shift_plan(StandardDataset which, const data::Dataset& base, std::uint64_t seed);

// `size_override` replaces the sample count (ManyAffines defaults to the desk
// size; pass kManyAffinesFullSize for the full corpus).
data::Dataset generate_standard(StandardDataset which, std::uint64_t seed,
                                std::optional<Index> size_override = std::nullopt);

}  // namespace disae::synth
