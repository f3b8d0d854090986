#include "disae/harness/experiment.hpp"

#include "disae/data/folds.hpp"
#include "disae/data/normalize.hpp"
#include "disae/harness/workers.hpp"
#include "disae/metrics/reliability.hpp"
#include "disae/nn/losses.hpp"
#include "disae/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace disae::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t domain_index(const data::Dataset& ds, const std::string& name) {
    const auto d = ds.find_domain(name);
    if (!d) throw ConfigError("experiment: dataset has no domain '" + name + "'");
    if (ds.domains()[*d].kind != data::DomainKind::categorical)
        throw ConfigError("experiment: split domain '" + name + "' must be categorical");
    return *d;
}

model::DisAEConfig resolved_config(const ModelSpec& spec, const data::Dataset& source, const ExperimentPlan& plan,
                                   std::uint64_t seed) {
    model::DisAEConfig c = spec.vanilla ? model::make_vanilla_ae(spec.config)
                                        : model::with_heads_for(spec.config, source, plan.head_domains);
    c.seed = seed;
    c.validate();
    return c;
}

// Per-task accuracy of a trained model on `eval`: head argmax, or a probe
// trained on the fit split's latent for models without task heads.
std::vector<double> task_accuracy(const model::TrainedModel& tm, const data::Dataset& fit, const data::Dataset& eval,
                                  const ProbeConfig& probe, std::uint64_t seed) {
    std::vector<double> acc;
    if (!tm.model.config().task_heads.empty()) {
        const auto predicted = tm.model.predict_tasks(eval.features());
        for (std::size_t t = 0; t < predicted.size(); ++t) acc.push_back(nn::accuracy(predicted[t], eval.task_labels(t)));
        return acc;
    }
    const Matrix z_fit = tm.model.encode(fit.features());
    const Matrix z_eval = tm.model.encode(eval.features());
    for (std::size_t t = 0; t < fit.n_tasks(); ++t) {
        ProbeConfig pc = probe;
        pc.seed = derive_seed(seed, "probe", t);
        const Probe p = train_probe(z_fit, fit.task_labels(t), fit.tasks()[t].n_classes, pc);
        acc.push_back(evaluate_probe(p, z_eval, eval.task_labels(t)).overall);
    }
    return acc;
}

struct FoldData {
    std::vector<Index> fit_rows, val_rows, test_rows;
    data::NormStats stats;
    data::Dataset fit, val, test;
    metrics::VariationLabels val_labels, test_labels;
    double raw_val = 0.0;
    double raw_test = 0.0;
};

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

nlohmann::json ModelSpec::to_json() const { return {{"name", name}, {"vanilla", vanilla}, {"config", config.to_json()}}; }

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    ModelSpec m;
    try {
        m.name = j.at("name").get<std::string>();
        m.vanilla = j.value("vanilla", false);
        if (j.contains("config")) m.config = model::DisAEConfig::from_json(j.at("config"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model spec: ") + e.what());
    }
    return m;
}

ModelSpec default_disae(const model::DisAEConfig& base) { return {"dis-ae", base, false}; }

ModelSpec default_vanilla(const model::DisAEConfig& base) { return {"vanilla-ae", model::make_vanilla_ae(base), true}; }

void ExperimentPlan::validate() const {
    if (k < 2) throw ConfigError("experiment: k must be >= 2");
    if (repeats < 1) throw ConfigError("experiment: repeats must be >= 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw ConfigError("experiment: validation_fraction must be in (0, 1)");
    if (models.empty()) throw ConfigError("experiment: no model variants");
    std::set<std::string> names;
    for (const auto& m : models) {
        if (m.name.empty()) throw ConfigError("experiment: model variant without a name");
        if (m.name == "raw") throw ConfigError("experiment: 'raw' is reserved for the input representation");
        if (!names.insert(m.name).second) throw ConfigError("experiment: duplicate model name '" + m.name + "'");
    }
    if (source_instances.empty()) throw ConfigError("experiment: empty source instance set");
    const std::set<int> source(source_instances.begin(), source_instances.end());
    for (const auto& t : target_sets) {
        if (t.empty()) throw ConfigError("experiment: empty target instance set");
        for (int i : t)
            if (source.count(i))
                throw ConfigError("experiment: instance " + std::to_string(i) + " is both source and target");
    }
    metric.validate();
    reliability.validate();
    if (workers < 0) throw ConfigError("experiment: workers must be >= 0");
}

nlohmann::json ExperimentPlan::to_json() const {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : models) ms.push_back(m.to_json());
    nlohmann::json j{{"dataset", dataset},
                     {"split_domain", split_domain},
                     {"source_instances", source_instances},
                     {"target_sets", target_sets},
                     {"k", k},
                     {"repeats", repeats},
                     {"validation_fraction", validation_fraction},
                     {"models", ms},
                     {"metric", metric.to_json()},
                     {"reliability", reliability.to_json()},
                     {"probe", probe.to_json()},
                     {"score_floor", score_floor},
                     {"evaluate_targets", evaluate_targets},
                     {"seed", seed}};
    if (head_domains) j["head_domains"] = *head_domains;
    return j;
}

ExperimentPlan ExperimentPlan::from_json(const nlohmann::json& j) {
    ExperimentPlan p;
    try {
        p.dataset = j.value("dataset", p.dataset);
        p.split_domain = j.value("split_domain", p.split_domain);
        p.source_instances = j.value("source_instances", p.source_instances);
        p.target_sets = j.value("target_sets", p.target_sets);
        p.k = j.value("k", p.k);
        p.repeats = j.value("repeats", p.repeats);
        p.validation_fraction = j.value("validation_fraction", p.validation_fraction);
        if (j.contains("models"))
            for (const auto& m : j.at("models")) p.models.push_back(ModelSpec::from_json(m));
        if (j.contains("head_domains")) p.head_domains = j.at("head_domains").get<std::vector<std::string>>();
        if (j.contains("metric")) p.metric = metrics::VariationConfig::from_json(j.at("metric"));
        if (j.contains("reliability")) p.reliability = metrics::VariationConfig::from_json(j.at("reliability"));
        if (j.contains("probe")) p.probe = ProbeConfig::from_json(j.at("probe"));
        p.score_floor = j.value("score_floor", p.score_floor);
        p.evaluate_targets = j.value("evaluate_targets", p.evaluate_targets);
        p.seed = j.value("seed", p.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment plan: ") + e.what());
    }
    return p;
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::diverged: return "diverged";
        case RunStatus::below_floor: return "below-floor";
    }
    return "?";
}

std::string target_split_name(const std::vector<int>& target_set) {
    std::string s = "target:";
    for (std::size_t i = 0; i < target_set.size(); ++i) s += (i ? "+" : "") + std::to_string(target_set[i]);
    return s;
}

std::uint64_t run_seed(std::uint64_t master, int fold, int repeat) {
    return derive_seed(derive_seed(master, "fold", static_cast<std::uint64_t>(fold)), "repeat",
                       static_cast<std::uint64_t>(repeat));
}

std::vector<ScoreSummary> ExperimentResult::summary() const {
    std::vector<ScoreSummary> out;
    for (const auto& m : plan.models) {
        ScoreSummary s;
        s.model = m.name;
        std::vector<double> acc, var, rec, score;
        std::vector<std::vector<double>> per_task;
        for (const auto& f : folds) {
            if (f.model != m.name) continue;
            acc.push_back(f.test.accuracy);
            var.push_back(f.test.variation);
            rec.push_back(f.test.reconstruction);
            score.push_back(f.test.score);
            per_task.resize(f.test.task_accuracy.size());
            for (std::size_t t = 0; t < f.test.task_accuracy.size(); ++t) per_task[t].push_back(f.test.task_accuracy[t]);
        }
        for (const auto& r : runs)
            if (r.model == m.name && r.status != RunStatus::ok) ++s.failed_runs;
        s.n_folds = static_cast<int>(acc.size());
        s.mean = metrics::score_from_terms(mean_of(acc), mean_of(var), mean_of(rec));
        s.std.accuracy = sample_std(acc);
        s.std.variation = sample_std(var);
        s.std.reconstruction = sample_std(rec);
        s.std.score = sample_std(score);
        for (const auto& t : per_task) {
            s.mean.task_accuracy.push_back(mean_of(t));
            s.std.task_accuracy.push_back(sample_std(t));
        }
        out.push_back(std::move(s));
    }
    return out;
}

ScoreSummary ExperimentResult::summary_for(const std::string& model) const {
    for (auto& s : summary())
        if (s.model == model) return s;
    throw ConfigError("experiment: no model named '" + model + "'");
}

ExperimentResult run_experiment(const data::Dataset& raw, const ExperimentPlan& plan) {
    plan.validate();
    ExperimentResult result;
    result.plan = plan;

    const std::size_t split_d = domain_index(raw, plan.split_domain);
    const data::Dataset source = raw.subset(raw.rows_with_domain(split_d, plan.source_instances));
    if (source.n_samples() < plan.k)
        throw ValidationError("experiment: source instances hold only " + std::to_string(source.n_samples()) + " rows");
    const data::SplitPlan split = data::make_folds(source, plan.k, derive_seed(plan.seed, "folds"), plan.validation_fraction);
    const int workers = resolve_workers(plan.workers);

    // Fold-level data shared by every variant and repeat.
    std::vector<FoldData> folds(static_cast<std::size_t>(plan.k));
    parallel_for(folds.size(), workers, [&](std::size_t f) {
        FoldData& fd = folds[f];
        std::tie(fd.fit_rows, fd.val_rows) = split.fit_validation_rows(static_cast<int>(f));
        fd.test_rows = split.test_rows(static_cast<int>(f));
        std::tie(fd.fit, fd.stats) = data::normalize(source.subset(fd.fit_rows));
        fd.val = data::normalize(source.subset(fd.val_rows), fd.stats).first;
        fd.test = data::normalize(source.subset(fd.test_rows), fd.stats).first;
        fd.val_labels = metrics::VariationLabels::from(fd.val);
        fd.test_labels = metrics::VariationLabels::from(fd.test);
        fd.raw_val = metrics::model_variation(fd.val.features(), fd.val_labels, plan.metric).v_sup;
        fd.raw_test = metrics::model_variation(fd.test.features(), fd.test_labels, plan.metric).v_sup;
    });

    // Training jobs keyed by (model, fold, repeat).
    const std::size_t n_models = plan.models.size();
    const std::size_t per_model = static_cast<std::size_t>(plan.k * plan.repeats);
    std::vector<RunRecord> runs(n_models * per_model);
    std::vector<std::optional<model::TrainedModel>> trained(runs.size());
    parallel_for(runs.size(), workers, [&](std::size_t i) {
        const auto& spec = plan.models[i / per_model];
        const int fold = static_cast<int>((i % per_model) / static_cast<std::size_t>(plan.repeats));
        const int repeat = static_cast<int>(i % static_cast<std::size_t>(plan.repeats));
        const FoldData& fd = folds[static_cast<std::size_t>(fold)];
        RunRecord& rec = runs[i];
        rec.model = spec.name;
        rec.fold = fold;
        rec.repeat = repeat;
        rec.seed = run_seed(plan.seed, fold, repeat);
        const model::DisAEConfig config = resolved_config(spec, source, plan, rec.seed);
        try {
            model::TrainedModel tm = model::train_fold(source, split, fold, config);
            rec.best_epoch = tm.history.best_epoch;
            const auto acc = task_accuracy(tm, fd.fit, fd.val, plan.probe, rec.seed);
            rec.validation = metrics::selection_score(tm.model, fd.val, fd.val_labels, plan.metric, fd.raw_val, acc);
            if (!std::isfinite(rec.validation.score) || rec.validation.score < plan.score_floor) {
                rec.status = RunStatus::below_floor;
                rec.message = "validation score " + std::to_string(rec.validation.score) + " below floor " +
                              std::to_string(plan.score_floor);
            } else {
                trained[i] = std::move(tm);
            }
        } catch (const DivergenceError& e) {
            rec.status = RunStatus::diverged;
            rec.message = e.what();
        }
    });
    result.runs = runs;

    // Winner per (model, fold): highest validation score, earliest repeat on ties.
    std::vector<FoldResult> winners(n_models * static_cast<std::size_t>(plan.k));
    for (std::size_t m = 0; m < n_models; ++m)
        for (int f = 0; f < plan.k; ++f) {
            FoldResult& fr = winners[m * static_cast<std::size_t>(plan.k) + static_cast<std::size_t>(f)];
            fr.model = plan.models[m].name;
            fr.fold = f;
            std::string diagnostics;
            for (int r = 0; r < plan.repeats; ++r) {
                const std::size_t i = m * per_model + static_cast<std::size_t>(f * plan.repeats + r);
                if (runs[i].status != RunStatus::ok) {
                    ++fr.failed_repeats;
                    diagnostics += "\n  repeat " + std::to_string(r) + " (" + to_string(runs[i].status) + "): " + runs[i].message;
                    continue;
                }
                if (fr.selected_repeat < 0 || runs[i].validation.score > fr.selection_score) {
                    fr.selected_repeat = r;
                    fr.selection_score = runs[i].validation.score;
                }
            }
            if (fr.selected_repeat < 0)
                throw Error("experiment: all " + std::to_string(plan.repeats) + " repeats of '" + fr.model + "' failed in fold " +
                            std::to_string(f) + diagnostics);
            fr.winner = std::move(*trained[m * per_model + static_cast<std::size_t>(f * plan.repeats + fr.selected_repeat)]);
        }
    trained.clear();

    parallel_for(winners.size(), workers, [&](std::size_t i) {
        FoldResult& fr = winners[i];
        const FoldData& fd = folds[static_cast<std::size_t>(fr.fold)];
        const auto acc = task_accuracy(fr.winner, fd.fit, fd.test, plan.probe, run_seed(plan.seed, fr.fold, fr.selected_repeat));
        fr.test = metrics::selection_score(fr.winner.model, fd.test, fd.test_labels, plan.metric, fd.raw_test, acc);
    });

    if (plan.evaluate_targets) {
        // Splits: all source rows, then source plus each target set.
        std::vector<std::string> split_names{"source"};
        std::vector<data::Dataset> targets;
        for (const auto& t : plan.target_sets) {
            targets.push_back(raw.subset(raw.rows_with_domain(split_d, t)));
            if (targets.back().n_samples() == 0)
                throw ValidationError("experiment: target set " + target_split_name(t) + " has no rows");
            split_names.push_back("source+" + target_split_name(t));
        }
        const std::vector<const metrics::VariationConfig*> rhos{&plan.metric, &plan.reliability};
        const std::size_t n_reps = n_models + 1;
        const std::size_t n_splits = split_names.size();
        const std::size_t n_domains = raw.n_domains();

        // One job per (fold, representation, split); rows appended in key order.
        const std::size_t n_jobs = static_cast<std::size_t>(plan.k) * n_reps * n_splits;
        std::vector<std::vector<VariationRow>> var_rows(n_jobs);
        std::vector<std::vector<ProbeRow>> probe_rows(static_cast<std::size_t>(plan.k) * n_reps);
        parallel_for(n_jobs, workers, [&](std::size_t job) {
            const int f = static_cast<int>(job / (n_reps * n_splits));
            const std::size_t rep = (job / n_splits) % n_reps;
            const std::size_t s = job % n_splits;
            const FoldData& fd = folds[static_cast<std::size_t>(f)];
            const model::TrainedModel* tm =
                rep == 0 ? nullptr : &winners[(rep - 1) * static_cast<std::size_t>(plan.k) + static_cast<std::size_t>(f)].winner;
            auto represent = [&](const data::Dataset& ds) {
                const Matrix x = data::apply_norm(ds.features(), fd.stats);
                return tm ? tm->model.encode(x) : x;
            };
            const std::string rep_name = rep == 0 ? "raw" : plan.models[rep - 1].name;

            Matrix z = represent(source);
            metrics::VariationLabels labels = metrics::VariationLabels::from(source);
            if (s > 0) {
                const auto& tgt = targets[s - 1];
                const Matrix zt = represent(tgt);
                Matrix both(z.rows() + zt.rows(), z.cols());
                both << z, zt;
                z = std::move(both);
                labels = metrics::concat(labels, metrics::VariationLabels::from(tgt));
            }
            for (std::size_t d = 0; d < n_domains; ++d) {
                const auto dl = labels.only_domain(d);
                for (const auto* rho : rhos) {
                    VariationRow row;
                    row.representation = rep_name;
                    row.domain = labels.domain_names[d];
                    row.split = split_names[s];
                    row.rho = to_string(rho->rho.kind);
                    row.fold = f;
                    std::set<int> present(dl.domains[0].begin(), dl.domains[0].end());
                    row.v_sup = present.size() < 2 ? kNaN : metrics::model_variation(z, dl, *rho).v_sup;
                    var_rows[job].push_back(row);
                }
            }

            if (s == 0) {
                // Probe trained on the fold's fit split, evaluated on the held-out
                // source fold and on every target set.
                auto& out = probe_rows[static_cast<std::size_t>(f) * n_reps + rep];
                const Matrix z_fit = represent(source.subset(fd.fit_rows));
                const data::Dataset fit_raw = source.subset(fd.fit_rows);
                for (std::size_t t = 0; t < source.n_tasks(); ++t) {
                    ProbeConfig pc = plan.probe;
                    pc.seed = derive_seed(plan.seed, "table-probe", static_cast<std::uint64_t>(f) * 131 + t);
                    const Probe p = train_probe(z_fit, fit_raw.task_labels(t), source.tasks()[t].n_classes, pc);
                    const data::Dataset test_raw = source.subset(fd.test_rows);
                    out.push_back({rep_name, "source", source.tasks()[t].name, f,
                                   evaluate_probe(p, represent(test_raw), test_raw.task_labels(t))});
                    for (std::size_t g = 0; g < targets.size(); ++g)
                        out.push_back({rep_name, target_split_name(plan.target_sets[g]), source.tasks()[t].name, f,
                                       evaluate_probe(p, represent(targets[g]), targets[g].task_labels(t))});
                }
            }
        });
        for (auto& v : var_rows)
            for (auto& r : v) result.variation.push_back(std::move(r));
        for (auto& v : probe_rows)
            for (auto& r : v) result.probe.push_back(std::move(r));

        // Ratios against the raw representation on the same fold/split/domain/rho.
        std::map<std::tuple<int, std::string, std::string, std::string>, double> raw_v;
        for (const auto& r : result.variation)
            if (r.representation == "raw") raw_v[{r.fold, r.split, r.domain, r.rho}] = r.v_sup;
        for (auto& r : result.variation) {
            const double base = raw_v.at({r.fold, r.split, r.domain, r.rho});
            r.ratio = base > 0.0 ? r.v_sup / base : kNaN;
        }
    }

    result.folds = std::move(winners);
    return result;
}

}  // namespace disae::harness
