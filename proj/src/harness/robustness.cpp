#include "disae/harness/robustness.hpp"

#include "disae/data/folds.hpp"
#include "disae/data/normalize.hpp"
#include "disae/harness/workers.hpp"
#include "disae/nn/losses.hpp"
#include "disae/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace disae::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_accuracy(const model::TrainedModel& tm, const std::vector<Probe>& probes, const data::Dataset& eval) {
    const Matrix x = data::apply_norm(eval.features(), tm.norm);
    double sum = 0.0;
    if (probes.empty()) {
        const auto predicted = tm.model.predict_tasks(x);
        for (std::size_t t = 0; t < predicted.size(); ++t) sum += nn::accuracy(predicted[t], eval.task_labels(t));
        return sum / static_cast<double>(predicted.size());
    }
    const Matrix z = tm.model.encode(x);
    for (std::size_t t = 0; t < probes.size(); ++t) sum += evaluate_probe(probes[t], z, eval.task_labels(t)).overall;
    return sum / static_cast<double>(probes.size());
}

// Task labels of both sets with a binary source(0)/target(1) domain column.
metrics::VariationLabels source_vs_target(const data::Dataset& source, const data::Dataset& target) {
    metrics::VariationLabels l;
    for (std::size_t t = 0; t < source.n_tasks(); ++t) {
        std::vector<int> col = source.task_labels(t);
        col.insert(col.end(), target.task_labels(t).begin(), target.task_labels(t).end());
        l.tasks.push_back(std::move(col));
        l.task_names.push_back(source.tasks()[t].name);
    }
    std::vector<int> d(static_cast<std::size_t>(source.n_samples()), 0);
    d.resize(static_cast<std::size_t>(source.n_samples() + target.n_samples()), 1);
    l.domains.push_back(std::move(d));
    l.domain_names.push_back("source-vs-target");
    return l;
}

}  // namespace

void RobustnessPlan::validate() const {
    if (source_counts.empty()) throw ConfigError("robustness: empty source count list");
    for (int c : source_counts)
        if (c < 1) throw ConfigError("robustness: source counts must be positive");
    if (models.empty()) throw ConfigError("robustness: no model variants");
    std::set<std::string> names;
    for (const auto& m : models)
        if (!names.insert(m.name).second) throw ConfigError("robustness: duplicate model name '" + m.name + "'");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw ConfigError("robustness: holdout_fraction must be in (0, 1)");
    metric.validate();
    if (workers < 0) throw ConfigError("robustness: workers must be >= 0");
}

nlohmann::json RobustnessPlan::to_json() const {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : models) ms.push_back(m.to_json());
    return {{"dataset", dataset},       {"split_domain", split_domain}, {"source_counts", source_counts},
            {"models", ms},             {"metric", metric.to_json()},   {"probe", probe.to_json()},
            {"holdout_fraction", holdout_fraction}, {"seed", seed}};
}

RobustnessPlan RobustnessPlan::from_json(const nlohmann::json& j) {
    RobustnessPlan p;
    try {
        p.dataset = j.value("dataset", p.dataset);
        p.split_domain = j.value("split_domain", p.split_domain);
        p.source_counts = j.value("source_counts", p.source_counts);
        if (j.contains("models"))
            for (const auto& m : j.at("models")) p.models.push_back(ModelSpec::from_json(m));
        if (j.contains("metric")) p.metric = metrics::VariationConfig::from_json(j.at("metric"));
        if (j.contains("probe")) p.probe = ProbeConfig::from_json(j.at("probe"));
        p.holdout_fraction = j.value("holdout_fraction", p.holdout_fraction);
        p.seed = j.value("seed", p.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("robustness plan: ") + e.what());
    }
    return p;
}

const RobustnessCurve& RobustnessResult::curve(const std::string& model, int source_count) const {
    for (const auto& c : curves)
        if (c.model == model && c.source_count == source_count) return c;
    throw ConfigError("robustness: no curve for model '" + model + "' with " + std::to_string(source_count) + " sources");
}

std::vector<int> instances_by_rank(const data::DomainSpec& domain) {
    std::vector<int> rank(static_cast<std::size_t>(domain.n_instances));
    std::iota(rank.begin(), rank.end(), 0);
    for (const auto& inst : domain.instances)
        if (inst.id >= 0 && inst.id < domain.n_instances) rank[static_cast<std::size_t>(inst.id)] = inst.distance_rank;
    std::vector<int> order(rank.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
    });
    return order;
}

double dominance_fraction(const RobustnessCurve& a, const RobustnessCurve& b) {
    std::map<int, const RobustnessPoint*> bpts;
    for (const auto& p : b.points)
        if (!p.is_source) bpts[p.target_rank] = &p;
    int common = 0, wins = 0;
    for (const auto& p : a.points) {
        if (p.is_source) continue;
        auto it = bpts.find(p.target_rank);
        if (it == bpts.end()) continue;
        ++common;
        if (!p.failed && !it->second->failed && p.accuracy > it->second->accuracy) ++wins;
    }
    if (common == 0) throw ValidationError("dominance_fraction: curves share no target rank");
    return static_cast<double>(wins) / common;
}

RobustnessResult robustness_study(const data::Dataset& raw, const RobustnessPlan& plan) {
    plan.validate();
    const auto d = raw.find_domain(plan.split_domain);
    if (!d || raw.domains()[*d].kind != data::DomainKind::categorical)
        throw ConfigError("robustness: dataset has no categorical domain '" + plan.split_domain + "'");
    const auto& domain = raw.domains()[*d];
    const std::vector<int> order = instances_by_rank(domain);
    std::vector<int> rank_of(order.size());
    for (const auto& inst : domain.instances) rank_of.at(static_cast<std::size_t>(inst.id)) = inst.distance_rank;
    if (domain.instances.empty())
        for (std::size_t i = 0; i < rank_of.size(); ++i) rank_of[i] = static_cast<int>(i);
    for (int c : plan.source_counts)
        if (c > domain.n_instances)
            throw ConfigError("robustness: source count " + std::to_string(c) + " exceeds the " +
                              std::to_string(domain.n_instances) + " instances of '" + plan.split_domain + "'");

    RobustnessResult result;
    result.plan = plan;
    const std::size_t n_counts = plan.source_counts.size();
    result.curves.resize(plan.models.size() * n_counts);
    const int workers = resolve_workers(plan.workers);

    parallel_for(result.curves.size(), workers, [&](std::size_t job) {
        const ModelSpec& spec = plan.models[job / n_counts];
        const int c = plan.source_counts[job % n_counts];
        RobustnessCurve& curve = result.curves[job];
        curve.model = spec.name;
        curve.source_count = c;

        const std::vector<int> src_ids(order.begin(), order.begin() + c);
        const std::uint64_t seed = derive_seed(plan.seed, "source-count", static_cast<std::uint64_t>(c));
        const std::vector<Index> src_rows = raw.rows_with_domain(*d, src_ids);
        const std::vector<int>& strat = raw.n_tasks() > 0 ? raw.task_labels(0) : std::vector<int>(raw.n_samples(), 0);
        auto [train_rows, held_rows] = data::stratified_holdout(strat, src_rows, plan.holdout_fraction,
                                                                derive_seed(seed, "holdout"));
        const data::Dataset held = raw.subset(held_rows);

        std::vector<RobustnessPoint> targets;
        for (std::size_t i = static_cast<std::size_t>(c); i < order.size(); ++i) {
            RobustnessPoint p;
            p.instance = order[i];
            p.target_rank = rank_of[static_cast<std::size_t>(order[i])];
            targets.push_back(p);
        }
        RobustnessPoint source_point;
        source_point.is_source = true;

        try {
            model::DisAEConfig config = spec.vanilla ? model::make_vanilla_ae(spec.config)
                                                     : model::with_heads_for(spec.config, raw.subset(train_rows));
            config.seed = seed;
            const model::TrainedModel tm = model::train_on_rows(raw, train_rows, config);

            std::vector<Probe> probes;
            if (tm.model.config().task_heads.empty()) {
                const data::Dataset train = raw.subset(train_rows);
                const Matrix z = tm.model.encode(data::apply_norm(train.features(), tm.norm));
                for (std::size_t t = 0; t < raw.n_tasks(); ++t) {
                    ProbeConfig pc = plan.probe;
                    pc.seed = derive_seed(seed, "probe", t);
                    probes.push_back(train_probe(z, train.task_labels(t), raw.tasks()[t].n_classes, pc));
                }
            }
            const Matrix z_held = tm.model.encode(data::apply_norm(held.features(), tm.norm));

            source_point.accuracy = mean_accuracy(tm, probes, held);
            if (c >= 2) {
                metrics::VariationLabels l = metrics::VariationLabels::from(held, std::vector<std::string>{plan.split_domain});
                source_point.v_sup = metrics::model_variation(z_held, l, plan.metric).v_sup;
            } else {
                source_point.v_sup = kNaN;
            }
            for (auto& p : targets) {
                const std::vector<int> one{p.instance};
                const data::Dataset tgt = raw.subset(raw.rows_with_domain(*d, one));
                p.accuracy = mean_accuracy(tm, probes, tgt);
                const Matrix zt = tm.model.encode(data::apply_norm(tgt.features(), tm.norm));
                Matrix both(z_held.rows() + zt.rows(), z_held.cols());
                both << z_held, zt;
                p.v_sup = metrics::model_variation(both, source_vs_target(held, tgt), plan.metric).v_sup;
            }
        } catch (const DivergenceError& e) {
            curve.status = "failed";
            curve.message = e.what();
            source_point.failed = true;
            source_point.v_sup = source_point.accuracy = kNaN;
            for (auto& p : targets) {
                p.failed = true;
                p.v_sup = p.accuracy = kNaN;
            }
        }
        curve.points.push_back(source_point);
        for (auto& p : targets) curve.points.push_back(p);
    });
    return result;
}

}  // namespace disae::harness
