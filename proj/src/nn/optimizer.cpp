#include "disae/nn/optimizer.hpp"

#include <cmath>

namespace disae::nn {

AdamW::AdamW(AdamConfig config) : config_(config) {
    if (!(config_.lr > 0.0)) throw ConfigError("learning rate must be positive");
    if (config_.weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
    if (!(config_.beta1 >= 0.0 && config_.beta1 < 1.0 && config_.beta2 >= 0.0 && config_.beta2 < 1.0))
        throw ConfigError("Adam betas must lie in [0, 1)");
}

void AdamW::step(const std::vector<ParamBlock>& blocks) {
    if (m_.empty()) {
        for (const auto& b : blocks) {
            m_.push_back(Vector::Zero(b.size));
            v_.push_back(Vector::Zero(b.size));
        }
    }
    if (blocks.size() != m_.size()) throw ShapeError("optimizer: parameter block count changed");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].size != m_[i].size()) throw ShapeError("optimizer: block '" + blocks[i].name + "' changed size");
        for (Index j = 0; j < blocks[i].size; ++j)
            if (!std::isfinite(blocks[i].grad[j]))
                throw DivergenceError("non-finite gradient in parameter block '" + blocks[i].name + "'");
    }

    ++steps_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const ParamBlock& b = blocks[i];
        Eigen::Map<Vector> p(b.value, b.size);
        Eigen::Map<const Vector> g(b.grad, b.size);
        m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
        v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseAbs2();
        const Vector update = (m_[i] / c1).array() / ((v_[i] / c2).array().sqrt() + config_.eps);
        if (b.decay && config_.weight_decay > 0.0) p -= config_.lr * config_.weight_decay * p;
        p -= config_.lr * update;
    }
}

PlateauSchedule::PlateauSchedule(Config config) : config_(config) {
    if (!(config_.factor > 0.0 && config_.factor < 1.0)) throw ConfigError("plateau factor must lie in (0, 1)");
    if (config_.patience < 1) throw ConfigError("plateau patience must be at least 1");
    if (config_.min_lr < 0.0) throw ConfigError("minimum learning rate must be non-negative");
}

double PlateauSchedule::update(double lr, double val_loss) {
    if (val_loss < best_ - config_.threshold) {
        best_ = val_loss;
        bad_epochs_ = 0;
        return lr;
    }
    if (++bad_epochs_ >= config_.patience) {
        bad_epochs_ = 0;
        return std::max(lr * config_.factor, config_.min_lr);
    }
    return lr;
}

}  // namespace disae::nn
