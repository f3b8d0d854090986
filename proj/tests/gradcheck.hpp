#pragma once

// Central finite-difference oracle for the Dis-AE parameter gradients.

#include "disae/model/model.hpp"
#include "disae/nn/losses.hpp"
#include "disae/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace testing {

struct GradCheck {
    double max_rel_error = 0.0;
    std::string worst_block;
    disae::Index parameters = 0;
};

struct RandomProblem {
    disae::model::DisAEModel model;
    disae::Matrix x;
    std::vector<std::vector<int>> task_labels;
    std::vector<std::vector<int>> domain_labels;

    disae::model::LabelView labels() const {
        disae::model::LabelView v;
        for (const auto& t : task_labels) v.tasks.emplace_back(t);
        for (const auto& d : domain_labels) v.domains.emplace_back(d);
        return v;
    }
};

inline RandomProblem random_problem(std::uint64_t seed, bool with_heads = true) {
    using namespace disae;
    Rng rng(seed);
    model::DisAEConfig c;
    const int k = 2 + static_cast<int>(rng.below(4));
    c.encoder_hidden = {2 + static_cast<int>(rng.below(4))};
    c.latent_dim = 1 + static_cast<int>(rng.below(3));
    c.alpha = rng.uniform(0.2, 2.0);
    c.beta = rng.uniform(0.2, 2.0);
    c.lambda = rng.uniform(0.0, 3.0);
    c.seed = rng.next_u64();
    if (with_heads) {
        const int n_tasks = 1 + static_cast<int>(rng.below(2));
        const int n_domains = 1 + static_cast<int>(rng.below(2));
        for (int t = 0; t < n_tasks; ++t)
            c.task_heads.push_back({"t" + std::to_string(t), 2 + static_cast<int>(rng.below(2)), {3}});
        for (int d = 0; d < n_domains; ++d)
            c.domain_heads.push_back({"d" + std::to_string(d), 2 + static_cast<int>(rng.below(3)), {}});
    }
    RandomProblem p{model::DisAEModel(c, k), Matrix(6, k), {}, {}};
    // Nonzero biases so that every parameter block matters.
    for (auto* net : p.model.networks())
        for (auto& layer : net->mutable_layers())
            for (Index j = 0; j < layer.b.size(); ++j) layer.b(j) = rng.uniform(-0.3, 0.3);
    for (Index i = 0; i < p.x.rows(); ++i)
        for (Index j = 0; j < k; ++j) p.x(i, j) = rng.normal();
    for (const auto& h : c.task_heads) {
        std::vector<int> y;
        for (Index i = 0; i < p.x.rows(); ++i) y.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(h.n_classes))));
        p.task_labels.push_back(y);
    }
    for (const auto& h : c.domain_heads) {
        std::vector<int> y;
        for (Index i = 0; i < p.x.rows(); ++i) y.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(h.n_classes))));
        p.domain_labels.push_back(y);
    }
    return p;
}

// The objective whose gradient the encoder receives: the reversal flips the
// sign of the domain terms and scales them by lambda. Every other network
// descends the plain total.
inline double encoder_objective(const disae::model::LossBreakdown& l, double lambda) {
    double v = l.reconstruction;
    for (double t : l.per_task) v += t;
    for (double d : l.per_domain) v -= lambda * d;
    return v;
}

// Compares loss_and_gradients with central differences of the matching
// objective, per parameter block; returns the worst norm-wise relative error.
inline GradCheck check_gradients(RandomProblem& p, double h = 1e-6) {
    using namespace disae;
    const auto labels = p.labels();
    const auto [loss, grads] = model::loss_and_gradients(p.model, p.x, labels);
    const double lambda = p.model.config().lambda;
    GradCheck out;
    auto nets = p.model.networks();
    for (std::size_t n = 0; n < nets.size(); ++n) {
        const bool encoder = n == 0;
        auto objective = [&] {
            const auto l = model::compute_loss(p.model, p.x, labels);
            return encoder ? encoder_objective(l, lambda) : l.total;
        };
        for (std::size_t li = 0; li < nets[n]->n_layers(); ++li) {
            for (int part = 0; part < 2; ++part) {
                const Matrix analytic = part == 0 ? grads.nets[n].dW[li] : Matrix(grads.nets[n].db[li]);
                Matrix numeric(analytic.rows(), analytic.cols());
                for (Index idx = 0; idx < analytic.size(); ++idx) {
                    auto& layer = nets[n]->mutable_layers()[li];
                    double& w = part == 0 ? layer.W.data()[idx] : layer.b.data()[idx];
                    const double saved = w;
                    w = saved + h;
                    const double up = objective();
                    w = saved - h;
                    const double down = objective();
                    w = saved;
                    numeric.data()[idx] = (up - down) / (2.0 * h);
                }
                out.parameters += analytic.size();
                const double scale = std::max({analytic.norm(), numeric.norm(), 1e-7});
                const double rel = (analytic - numeric).norm() / scale;
                if (rel > out.max_rel_error) {
                    out.max_rel_error = rel;
                    out.worst_block = "network " + std::to_string(n) + " layer " + std::to_string(li) + (part ? " b" : " W");
                }
            }
        }
    }
    return out;
}

}  // namespace testing
