#include "disae/harness/probe.hpp"

#include "disae/nn/losses.hpp"
#include "disae/nn/optimizer.hpp"
#include "disae/random.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace disae::harness {

nlohmann::json ProbeConfig::to_json() const {
    return {{"hidden", hidden}, {"epochs", epochs}, {"batch_size", batch_size},
            {"lr", lr},         {"l2", l2},         {"seed", seed}};
}

ProbeConfig ProbeConfig::from_json(const nlohmann::json& j) {
    ProbeConfig c;
    try {
        c.hidden = j.value("hidden", c.hidden);
        c.epochs = j.value("epochs", c.epochs);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.lr = j.value("lr", c.lr);
        c.l2 = j.value("l2", c.l2);
        c.seed = j.value("seed", c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("probe config: ") + e.what());
    }
    if (c.epochs < 1 || c.batch_size < 1 || c.hidden < 0) throw ConfigError("probe: invalid configuration");
    return c;
}

std::vector<int> Probe::predict(const Matrix& x) const { return nn::argmax_rows(net.forward(data::apply_norm(x, stats))); }

Probe train_probe(const Matrix& x, std::span<const int> labels, int n_classes, const ProbeConfig& config) {
    if (static_cast<Index>(labels.size()) != x.rows()) throw ShapeError("probe: labels and representation differ in length");
    const std::set<int> classes(labels.begin(), labels.end());
    if (classes.size() < 2) throw ValidationError("probe: training split contains a single class");
    if (config.epochs < 1 || config.batch_size < 1 || config.hidden < 0) throw ConfigError("probe: invalid configuration");

    Probe probe;
    probe.n_classes = n_classes;
    probe.stats = data::fit_norm_stats(x);
    const Matrix xs = data::apply_norm(x, probe.stats);
    Rng rng(derive_seed(config.seed, "probe"));
    const std::vector<int> hidden = config.hidden > 0 ? std::vector<int>{config.hidden} : std::vector<int>{};
    probe.net = nn::make_mlp(static_cast<int>(x.cols()), hidden, n_classes, nn::Activation::linear, rng);
    nn::AdamW opt({config.lr, 0.9, 0.999, 1e-8, config.l2});

    std::vector<Index> order = data::all_rows(x.rows());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (Index start = 0; start < x.rows(); start += config.batch_size) {
            const Index end = std::min<Index>(x.rows(), start + config.batch_size);
            Matrix xb(end - start, x.cols());
            std::vector<int> yb;
            for (Index i = start; i < end; ++i) {
                xb.row(i - start) = xs.row(order[static_cast<std::size_t>(i)]);
                yb.push_back(labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
            }
            const nn::ForwardCache cache = probe.net.forward_cached(xb);
            const nn::LossValue loss = nn::softmax_cross_entropy(cache.result(), yb);
            const nn::Gradients g = probe.net.backward(cache, loss.grad);
            std::vector<nn::ParamBlock> blocks;
            auto& layers = probe.net.mutable_layers();
            for (std::size_t l = 0; l < layers.size(); ++l) {
                blocks.push_back({"probe.layer" + std::to_string(l) + ".W", layers[l].W.data(), g.dW[l].data(),
                                  layers[l].W.size(), true});
                blocks.push_back({"probe.layer" + std::to_string(l) + ".b", layers[l].b.data(), g.db[l].data(),
                                  layers[l].b.size(), false});
            }
            opt.step(blocks);
        }
    }
    return probe;
}

ProbeAccuracy evaluate_probe(const Probe& probe, const Matrix& x, std::span<const int> labels) {
    if (static_cast<Index>(labels.size()) != x.rows()) throw ShapeError("probe: labels and representation differ in length");
    if (labels.empty()) throw ValidationError("probe: empty evaluation set");
    const std::vector<int> pred = probe.predict(x);
    ProbeAccuracy out;
    out.n = x.rows();
    out.overall = nn::accuracy(pred, labels);
    std::vector<double> hit(static_cast<std::size_t>(probe.n_classes), 0.0), count(hit.size(), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto y = static_cast<std::size_t>(labels[i]);
        if (y >= count.size()) throw ValidationError("probe: label out of range");
        count[y] += 1.0;
        hit[y] += pred[i] == labels[i];
    }
    for (std::size_t c = 0; c < hit.size(); ++c)
        out.per_class.push_back(count[c] > 0 ? hit[c] / count[c] : std::numeric_limits<double>::quiet_NaN());
    return out;
}

}  // namespace disae::harness
