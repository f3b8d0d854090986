#pragma once

#include "disae/harness/experiment.hpp"
#include "disae/harness/robustness.hpp"
#include "disae/synth/standard.hpp"

#include <cstdint>

namespace disae::harness {

// Model hyperparameters used for the standard datasets (chosen by sweeps over
// lambda, l2 and head width; see README).
model::DisAEConfig standard_model_config(synth::StandardDataset which);

// Without heads the reconstruction objective is still improving when the
// Dis-AE budget runs out, so the baseline gets a longer one.
inline constexpr int kVanillaEpochFactor = 2;

// Dis-AE and vanilla AE variants built from `base`.
std::vector<ModelSpec> standard_models(const model::DisAEConfig& base);

// Source instances 1-2, each remaining instance as its own target, Dis-AE and
// vanilla AE variants, 5 folds x 5 repeats.
ExperimentPlan standard_plan(synth::StandardDataset which, std::uint64_t seed);

RobustnessPlan standard_robustness_plan(std::uint64_t seed);

}  // namespace disae::harness
