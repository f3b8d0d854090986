#include "disae/model/model.hpp"

#include "disae/nn/losses.hpp"
#include "disae/random.hpp"

#include <cmath>

namespace disae::model {

DisAEModel::DisAEModel(DisAEConfig config, int n_features) : config_(std::move(config)) {
    config_.validate();
    if (n_features < 1) throw ConfigError("model needs at least one input feature");
    Rng rng(derive_seed(config_.seed, "init"));
    encoder_ = nn::make_mlp(n_features, config_.encoder_hidden, config_.latent_dim, nn::Activation::linear, rng);
    decoder_ = nn::make_mlp(config_.latent_dim, config_.decoder_hidden(), n_features, nn::Activation::linear, rng);
    for (const auto& h : config_.task_heads)
        task_heads_.push_back(
            nn::make_mlp(config_.latent_dim, config_.head_hidden(h), h.n_classes, nn::Activation::linear, rng));
    for (const auto& h : config_.domain_heads)
        domain_heads_.push_back(
            nn::make_mlp(config_.latent_dim, config_.head_hidden(h), h.n_classes, nn::Activation::linear, rng));
}

void DisAEModel::check_width(const Matrix& x) const {
    if (x.cols() != n_features())
        throw ShapeError("model expects " + std::to_string(n_features()) + " features, got " + std::to_string(x.cols()));
}

Matrix DisAEModel::encode(const Matrix& x) const {
    check_width(x);
    return encoder_.forward(x);
}

Matrix DisAEModel::reconstruct(const Matrix& x) const { return decoder_.forward(encode(x)); }

std::vector<std::vector<int>> DisAEModel::predict_tasks(const Matrix& x) const {
    const Matrix z = encode(x);
    std::vector<std::vector<int>> out;
    for (const auto& h : task_heads_) out.push_back(nn::argmax_rows(h.forward(z)));
    return out;
}

std::vector<std::vector<int>> DisAEModel::predict_domains(const Matrix& x) const {
    const Matrix z = encode(x);
    std::vector<std::vector<int>> out;
    for (const auto& h : domain_heads_) out.push_back(nn::argmax_rows(h.forward(z)));
    return out;
}

std::vector<const nn::DenseNet*> DisAEModel::networks() const {
    std::vector<const nn::DenseNet*> out{&encoder_, &decoder_};
    for (const auto& h : task_heads_) out.push_back(&h);
    for (const auto& h : domain_heads_) out.push_back(&h);
    return out;
}

std::vector<nn::DenseNet*> DisAEModel::networks() {
    std::vector<nn::DenseNet*> out{&encoder_, &decoder_};
    for (auto& h : task_heads_) out.push_back(&h);
    for (auto& h : domain_heads_) out.push_back(&h);
    return out;
}

Index DisAEModel::parameter_count() const {
    Index n = 0;
    for (const auto* net : networks()) n += net->parameter_count();
    return n;
}

bool DisAEModel::all_finite() const {
    for (const auto* net : networks())
        if (!net->all_finite()) return false;
    return true;
}

namespace {

void check_labels(const DisAEModel& model, const Matrix& x, const LabelView& labels) {
    const auto& cfg = model.config();
    if (labels.tasks.size() != cfg.task_heads.size() || labels.domains.size() != cfg.domain_heads.size())
        throw ValidationError("label columns missing: model has " + std::to_string(cfg.task_heads.size()) +
                              " task and " + std::to_string(cfg.domain_heads.size()) + " domain heads, got " +
                              std::to_string(labels.tasks.size()) + " and " + std::to_string(labels.domains.size()) +
                              " label columns");
    for (const auto* group : {&labels.tasks, &labels.domains})
        for (const auto& col : *group)
            if (static_cast<Index>(col.size()) != x.rows()) throw ShapeError("label column length differs from batch size");
}

}  // namespace

LossBreakdown compute_loss(const DisAEModel& model, const Matrix& x, const LabelView& labels) {
    check_labels(model, x, labels);
    const auto& cfg = model.config();
    const Matrix z = model.encode(x);
    LossBreakdown out;
    out.reconstruction = cfg.alpha * nn::mse(model.decoder().forward(z), x).value;
    out.total = out.reconstruction;
    for (std::size_t t = 0; t < model.task_heads().size(); ++t) {
        const double v = cfg.beta * nn::softmax_cross_entropy(model.task_heads()[t].forward(z), labels.tasks[t]).value;
        out.per_task.push_back(v);
        out.total += v;
    }
    for (std::size_t d = 0; d < model.domain_heads().size(); ++d) {
        const double v = nn::softmax_cross_entropy(model.domain_heads()[d].forward(z), labels.domains[d]).value;
        out.per_domain.push_back(v);
        out.total += v;
    }
    return out;
}

std::pair<LossBreakdown, ModelGradients> loss_and_gradients(const DisAEModel& model, const Matrix& x,
                                                            const LabelView& labels) {
    check_labels(model, x, labels);
    const auto& cfg = model.config();
    LossBreakdown loss;
    ModelGradients grads;

    const nn::ForwardCache enc = model.encoder().forward_cached(x);
    const Matrix& z = enc.result();

    const nn::ForwardCache dec = model.decoder().forward_cached(z);
    nn::LossValue rec = nn::mse(dec.result(), x);
    loss.reconstruction = cfg.alpha * rec.value;
    loss.total = loss.reconstruction;
    nn::Gradients dec_grad = model.decoder().backward(dec, cfg.alpha * rec.grad);
    Matrix dz = dec_grad.d_input;

    std::vector<nn::Gradients> task_grads;
    for (std::size_t t = 0; t < model.task_heads().size(); ++t) {
        const auto& head = model.task_heads()[t];
        const nn::ForwardCache c = head.forward_cached(z);
        nn::LossValue ce = nn::softmax_cross_entropy(c.result(), labels.tasks[t]);
        loss.per_task.push_back(cfg.beta * ce.value);
        loss.total += cfg.beta * ce.value;
        task_grads.push_back(head.backward(c, cfg.beta * ce.grad));
        dz += task_grads.back().d_input;
    }

    const nn::GradReversal reversal{cfg.lambda};
    std::vector<nn::Gradients> domain_grads;
    for (std::size_t d = 0; d < model.domain_heads().size(); ++d) {
        const auto& head = model.domain_heads()[d];
        const nn::ForwardCache c = head.forward_cached(reversal.forward(z));
        nn::LossValue ce = nn::softmax_cross_entropy(c.result(), labels.domains[d]);
        loss.per_domain.push_back(ce.value);
        loss.total += ce.value;
        domain_grads.push_back(head.backward(c, ce.grad));
        dz += reversal.backward(domain_grads.back().d_input);
    }

    grads.nets.push_back(model.encoder().backward(enc, dz));
    grads.nets.push_back(std::move(dec_grad));
    for (auto& g : task_grads) grads.nets.push_back(std::move(g));
    for (auto& g : domain_grads) grads.nets.push_back(std::move(g));
    return {std::move(loss), std::move(grads)};
}

std::vector<nn::ParamBlock> param_blocks(DisAEModel& model, const ModelGradients& grads) {
    auto nets = model.networks();
    if (nets.size() != grads.nets.size()) throw ShapeError("gradient list does not match the model's networks");
    const std::size_t n_tasks = model.task_heads().size();
    std::vector<nn::ParamBlock> blocks;
    for (std::size_t i = 0; i < nets.size(); ++i) {
        std::string prefix = i == 0 ? "encoder" : i == 1 ? "decoder"
                           : i < 2 + n_tasks ? "task_head" + std::to_string(i - 2)
                                             : "domain_head" + std::to_string(i - 2 - n_tasks);
        auto& layers = nets[i]->mutable_layers();
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const std::string name = prefix + ".layer" + std::to_string(l);
            blocks.push_back({name + ".W", layers[l].W.data(), grads.nets[i].dW[l].data(), layers[l].W.size(), true});
            blocks.push_back({name + ".b", layers[l].b.data(), grads.nets[i].db[l].data(), layers[l].b.size(), false});
        }
    }
    return blocks;
}

double relative_reconstruction_error(const Matrix& x, const Matrix& reconstruction) {
    if (x.rows() != reconstruction.rows() || x.cols() != reconstruction.cols())
        throw ShapeError("reconstruction shape differs from input");
    const double energy = x.squaredNorm() / static_cast<double>(x.size());
    if (!(energy > 0.0)) throw ValidationError("relative reconstruction error undefined for an all-zero input");
    const double err = (x - reconstruction).squaredNorm() / static_cast<double>(x.size());
    return std::sqrt(err / energy);
}

}  // namespace disae::model
