#pragma once

#include "disae/model/config.hpp"
#include "disae/nn/dense.hpp"
#include "disae/nn/optimizer.hpp"

#include <span>
#include <vector>

namespace disae::model {

class DisAEModel {
public:
    DisAEModel() = default;
    // Builds and initialises every network from `config.seed`.
    DisAEModel(DisAEConfig config, int n_features);

    const DisAEConfig& config() const { return config_; }
    int n_features() const { return encoder_.input_width(); }
    int latent_dim() const { return config_.latent_dim; }

    const nn::DenseNet& encoder() const { return encoder_; }
    const nn::DenseNet& decoder() const { return decoder_; }
    const std::vector<nn::DenseNet>& task_heads() const { return task_heads_; }
    const std::vector<nn::DenseNet>& domain_heads() const { return domain_heads_; }
    nn::DenseNet& encoder() { return encoder_; }
    nn::DenseNet& decoder() { return decoder_; }
    std::vector<nn::DenseNet>& task_heads() { return task_heads_; }
    std::vector<nn::DenseNet>& domain_heads() { return domain_heads_; }

    Matrix encode(const Matrix& x) const;
    Matrix reconstruct(const Matrix& x) const;
    // Per task head, argmax predictions.
    std::vector<std::vector<int>> predict_tasks(const Matrix& x) const;
    std::vector<std::vector<int>> predict_domains(const Matrix& x) const;

    // Networks in checkpoint order: encoder, decoder, task heads, domain heads.
    std::vector<const nn::DenseNet*> networks() const;
    std::vector<nn::DenseNet*> networks();
    Index parameter_count() const;
    bool all_finite() const;

private:
    void check_width(const Matrix& x) const;

    DisAEConfig config_;
    nn::DenseNet encoder_;
    nn::DenseNet decoder_;
    std::vector<nn::DenseNet> task_heads_;
    std::vector<nn::DenseNet> domain_heads_;
};

struct LossBreakdown {
    double reconstruction = 0.0;  // alpha * mse
    std::vector<double> per_task;  // beta * cross entropy
    std::vector<double> per_domain;
    double total = 0.0;
};

// Labels, one span per head, in head order.
struct LabelView {
    std::vector<std::span<const int>> tasks;
    std::vector<std::span<const int>> domains;
};

struct ModelGradients {
    // Same order as DisAEModel::networks().
    std::vector<nn::Gradients> nets;
};

LossBreakdown compute_loss(const DisAEModel& model, const Matrix& x, const LabelView& labels);

// Loss plus the gradients one optimiser step applies: the domain-head
// gradients reach the encoder through the reversal layer (scaled by -lambda).
std::pair<LossBreakdown, ModelGradients> loss_and_gradients(const DisAEModel& model, const Matrix& x,
                                                            const LabelView& labels);

// Flattened parameter/gradient views for the optimiser, in networks() order.
std::vector<nn::ParamBlock> param_blocks(DisAEModel& model, const ModelGradients& grads);

// Relative reconstruction error sqrt(MSE(X, X~) / E(X^2)), both means over entries.
double relative_reconstruction_error(const Matrix& x, const Matrix& reconstruction);

}  // namespace disae::model
