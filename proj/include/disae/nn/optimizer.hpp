#pragma once

#include "disae/core.hpp"

#include <nlohmann/json.hpp>

#include <limits>
#include <string>
#include <vector>

namespace disae::nn {

// A view of one parameter tensor and its gradient, flattened.
struct ParamBlock {
    std::string name;
    double* value = nullptr;
    const double* grad = nullptr;
    Index size = 0;
    bool decay = true;  // biases are excluded from weight decay
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;  // decoupled
};

class AdamW {
public:
    explicit AdamW(AdamConfig config = {});

    // The first call fixes the block layout; later calls must match it.
    void step(const std::vector<ParamBlock>& blocks);

    double lr() const { return config_.lr; }
    void set_lr(double lr) { config_.lr = lr; }
    long steps() const { return steps_; }
    const AdamConfig& config() const { return config_; }
    const std::vector<Vector>& first_moments() const { return m_; }
    const std::vector<Vector>& second_moments() const { return v_; }

private:
    AdamConfig config_;
    long steps_ = 0;
    std::vector<Vector> m_;
    std::vector<Vector> v_;
};

struct PlateauConfig {
    int patience = 10;
    double factor = 0.5;
    double min_lr = 1e-5;
    double threshold = 1e-6;
};

// Reduce-on-plateau: after `patience` consecutive epochs without an
// improvement larger than `threshold`, multiply the lr by `factor`.
class PlateauSchedule {
public:
    using Config = PlateauConfig;

    explicit PlateauSchedule(Config config = {});

    // Returns the learning rate to use for the next epoch.
    double update(double lr, double val_loss);

    const Config& config() const { return config_; }
    double best() const { return best_; }
    int bad_epochs() const { return bad_epochs_; }

private:
    Config config_;
    double best_ = std::numeric_limits<double>::infinity();
    int bad_epochs_ = 0;
};

}  // namespace disae::nn
