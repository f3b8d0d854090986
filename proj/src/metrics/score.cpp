#include "disae/metrics/score.hpp"

#include "disae/nn/losses.hpp"

#include <numeric>

namespace disae::metrics {

nlohmann::json ScoreReport::to_json() const {
    return {{"task_accuracy", task_accuracy}, {"accuracy", accuracy},     {"variation", variation},
            {"reconstruction", reconstruction}, {"score", score},       {"v_sup_latent", v_sup_latent},
            {"v_sup_raw", v_sup_raw}};
}

ScoreReport score_from_terms(double accuracy, double variation, double reconstruction) {
    ScoreReport r;
    r.accuracy = accuracy;
    r.variation = variation;
    r.reconstruction = reconstruction;
    r.score = accuracy - variation - reconstruction;
    return r;
}

ScoreReport selection_score(const model::DisAEModel& model, const data::Dataset& split, const VariationLabels& labels,
                            const VariationConfig& config, double raw_v_sup,
                            const std::optional<std::vector<double>>& task_accuracy) {
    if (!(raw_v_sup > 0.0)) throw ValidationError("raw-data V^sup is zero: the split shows no domain variation to compare against");
    const Matrix& x = split.features();

    std::vector<double> acc;
    if (task_accuracy) {
        acc = *task_accuracy;
    } else {
        if (model.task_heads().empty())
            throw ConfigError("selection score needs task accuracies for a model without task heads");
        const auto predicted = model.predict_tasks(x);
        for (std::size_t t = 0; t < predicted.size(); ++t) {
            const auto& name = model.config().task_heads[t].name;
            for (std::size_t j = 0; j < split.n_tasks(); ++j)
                if (split.tasks()[j].name == name) acc.push_back(nn::accuracy(predicted[t], split.task_labels(j)));
        }
    }
    if (acc.empty()) throw ValidationError("selection score: no task accuracies");

    const Matrix z = model.encode(x);
    const VariationReport v = model_variation(z, labels, config);
    const double rec = model::relative_reconstruction_error(x, model.decoder().forward(z));

    ScoreReport r = score_from_terms(std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size()),
                                     v.v_sup / raw_v_sup, rec);
    r.task_accuracy = std::move(acc);
    r.v_sup_latent = v.v_sup;
    r.v_sup_raw = raw_v_sup;
    return r;
}

}  // namespace disae::metrics
