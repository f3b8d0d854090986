#include "disae/harness/presets.hpp"

namespace disae::harness {

model::DisAEConfig standard_model_config(synth::StandardDataset which) {
    model::DisAEConfig c;
    c.encoder_hidden = {16, 16};
    c.latent_dim = 4;
    c.head_hidden_default = {64};
    c.lambda = 3.0;
    c.l2 = 1.0;
    c.max_epochs = 150;
    c.scheduler.patience = 30;
    if (which == synth::StandardDataset::ManyAffines) c.max_epochs = 60;
    return c;
}

std::vector<ModelSpec> standard_models(const model::DisAEConfig& base) {
    ModelSpec vanilla = default_vanilla(base);
    vanilla.config.max_epochs = kVanillaEpochFactor * base.max_epochs;
    return {default_disae(base), vanilla};
}

ExperimentPlan standard_plan(synth::StandardDataset which, std::uint64_t seed) {
    if (which == synth::StandardDataset::ManyAffines)
        throw ConfigError("standard_plan: many-affines is evaluated with the robustness study");
    ExperimentPlan p;
    p.dataset = synth::standard_name(which);
    p.source_instances = {0, 1};
    p.target_sets = {{2}, {3}, {4}};
    p.models = standard_models(standard_model_config(which));
    p.seed = seed;
    return p;
}

RobustnessPlan standard_robustness_plan(std::uint64_t seed) {
    RobustnessPlan p;
    p.dataset = synth::standard_name(synth::StandardDataset::ManyAffines);
    p.models = standard_models(standard_model_config(synth::StandardDataset::ManyAffines));
    p.seed = seed;
    return p;
}

}  // namespace disae::harness
