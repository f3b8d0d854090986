#include "disae/harness/sweep.hpp"

#include "disae/data/csv_io.hpp"

#include <algorithm>

namespace disae::harness {

namespace {

void require_nonempty(const std::vector<double>& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string("sweep: empty candidate list for ") + name);
}

std::string point_name(const model::DisAEConfig& c) {
    using data::format_double;
    return "alpha=" + format_double(c.alpha) + ",beta=" + format_double(c.beta) + ",lambda=" + format_double(c.lambda) +
           ",l2=" + format_double(c.l2) + ",lr=" + format_double(c.lr);
}

}  // namespace

void SweepGrid::validate() const {
    require_nonempty(alpha, "alpha");
    require_nonempty(beta, "beta");
    require_nonempty(lambda, "lambda");
    require_nonempty(l2, "l2");
    for (const auto* list : {&alpha, &beta, &lambda, &l2, &lr})
        for (double v : *list)
            if (!(v >= 0.0)) throw ConfigError("sweep: candidate values must be non-negative");
    for (double v : lr)
        if (!(v > 0.0)) throw ConfigError("sweep: learning rates must be positive");
}

std::size_t SweepGrid::size() const {
    return alpha.size() * beta.size() * lambda.size() * l2.size() * std::max<std::size_t>(lr.size(), 1);
}

std::vector<model::DisAEConfig> SweepGrid::expand(const model::DisAEConfig& base) const {
    validate();
    const std::vector<double> lrs = lr.empty() ? std::vector<double>{base.lr} : lr;
    std::vector<model::DisAEConfig> out;
    for (double a : alpha)
        for (double b : beta)
            for (double l : lambda)
                for (double w : l2)
                    for (double r : lrs) {
                        model::DisAEConfig c = base;
                        c.alpha = a;
                        c.beta = b;
                        c.lambda = l;
                        c.l2 = w;
                        c.lr = r;
                        out.push_back(c);
                    }
    return out;
}

nlohmann::json SweepGrid::to_json() const {
    return {{"alpha", alpha}, {"beta", beta}, {"lambda", lambda}, {"l2", l2}, {"lr", lr}};
}

SweepGrid SweepGrid::from_json(const nlohmann::json& j) {
    SweepGrid g;
    try {
        g.alpha = j.value("alpha", g.alpha);
        g.beta = j.value("beta", g.beta);
        g.lambda = j.value("lambda", g.lambda);
        g.l2 = j.value("l2", g.l2);
        g.lr = j.value("lr", g.lr);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("sweep grid: ") + e.what());
    }
    g.validate();
    return g;
}

SweepResult sweep(const data::Dataset& raw, ExperimentPlan plan, const ModelSpec& base, const SweepGrid& grid) {
    const auto configs = grid.expand(base.config);
    plan.models.clear();
    for (const auto& c : configs) plan.models.push_back({point_name(c), c, base.vanilla});

    SweepResult result;
    result.experiment = run_experiment(raw, plan);
    const auto summaries = result.experiment.summary();
    for (std::size_t i = 0; i < configs.size(); ++i)
        result.rows.push_back({0, plan.models[i].name, configs[i], summaries[i]});
    // Stable: ties keep grid order.
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.summary.mean.score > b.summary.mean.score; });
    for (std::size_t i = 0; i < result.rows.size(); ++i) result.rows[i].rank = static_cast<int>(i) + 1;
    return result;
}

}  // namespace disae::harness
