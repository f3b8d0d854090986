#pragma once

#include "disae/data/dataset.hpp"
#include "disae/nn/optimizer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace disae::model {

// A classification head bound by name to a dataset task or domain.
struct HeadSpec {
    std::string name;
    int n_classes = 2;
    std::vector<int> hidden;  // empty: one hidden layer of the latent width
};

struct DisAEConfig {
    std::vector<int> encoder_hidden{32, 32};
    int latent_dim = 4;
    std::vector<HeadSpec> task_heads;
    std::vector<HeadSpec> domain_heads;
    // Hidden widths for heads that do not set their own; empty means {latent_dim}.
    std::vector<int> head_hidden_default;

    double alpha = 1.0;
    double beta = 1.0;
    double lambda = 1.0;
    double l2 = 0.0;
    double lr = 1e-3;
    int batch_size = 256;
    int max_epochs = 100;
    std::uint64_t seed = 0;
    // Name of the task whose classes the weighted sampler balances.
    std::optional<std::string> balance_task;
    double validation_fraction = 0.1;
    nn::PlateauSchedule::Config scheduler;

    // Decoder widths mirror the encoder: m, reversed hidden..., k.
    std::vector<int> decoder_hidden() const;
    std::vector<int> head_hidden(const HeadSpec& h) const;
    bool is_vanilla() const { return task_heads.empty() && domain_heads.empty(); }

    void validate() const;
    // Throws unless every head matches a task/domain of `dataset` with the
    // same class count.
    void check_compatible(const data::Dataset& dataset) const;

    nlohmann::json to_json() const;
    static DisAEConfig from_json(const nlohmann::json& j);
};

// One task head per dataset task and one domain head per domain (optionally
// restricted to `domains`), replacing any heads already present.
DisAEConfig with_heads_for(DisAEConfig config, const data::Dataset& dataset,
                           const std::optional<std::vector<std::string>>& domains = std::nullopt);

// Same encoder/decoder, no heads.
DisAEConfig make_vanilla_ae(DisAEConfig config);

}  // namespace disae::model
