#include "disae/model/trainer.hpp"

#include "disae/data/sampler.hpp"
#include "disae/nn/losses.hpp"
#include "disae/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

namespace disae::model {

nlohmann::json TrainHistory::to_json() const {
    nlohmann::json j;
    j["best_epoch"] = best_epoch;
    j["epochs"] = nlohmann::json::array();
    for (const auto& e : epochs)
        j["epochs"].push_back({{"epoch", e.epoch},
                               {"lr", e.lr},
                               {"train_total", e.train_total},
                               {"train_relative_reconstruction", e.train_relative_reconstruction},
                               {"train_task_accuracy", e.train_task_accuracy},
                               {"train_domain_accuracy", e.train_domain_accuracy},
                               {"val_total", e.val_total},
                               {"val_relative_reconstruction", e.val_relative_reconstruction},
                               {"val_task_accuracy", e.val_task_accuracy},
                               {"proxy", e.proxy}});
    return j;
}

TrainHistory TrainHistory::from_json(const nlohmann::json& j) {
    TrainHistory h;
    h.best_epoch = j.at("best_epoch").get<int>();
    for (const auto& e : j.at("epochs")) {
        EpochRecord r;
        r.epoch = e.at("epoch").get<int>();
        r.lr = e.at("lr").get<double>();
        r.train_total = e.at("train_total").get<double>();
        r.train_relative_reconstruction = e.at("train_relative_reconstruction").get<double>();
        r.train_task_accuracy = e.at("train_task_accuracy").get<std::vector<double>>();
        r.train_domain_accuracy = e.at("train_domain_accuracy").get<std::vector<double>>();
        r.val_total = e.at("val_total").get<double>();
        r.val_relative_reconstruction = e.at("val_relative_reconstruction").get<double>();
        r.val_task_accuracy = e.at("val_task_accuracy").get<double>();
        r.proxy = e.at("proxy").get<double>();
        h.epochs.push_back(std::move(r));
    }
    return h;
}

LabelView label_view(const DisAEConfig& config, const data::Dataset& dataset) {
    config.check_compatible(dataset);
    LabelView v;
    for (const auto& h : config.task_heads)
        for (std::size_t t = 0; t < dataset.n_tasks(); ++t)
            if (dataset.tasks()[t].name == h.name) v.tasks.emplace_back(dataset.task_labels(t));
    for (const auto& h : config.domain_heads) v.domains.emplace_back(dataset.domain_labels(*dataset.find_domain(h.name)));
    return v;
}

namespace {

struct BatchLabels {
    std::vector<std::vector<int>> tasks, domains;
    LabelView view;
};

BatchLabels gather(const LabelView& full, const std::vector<Index>& rows) {
    BatchLabels b;
    auto pick = [&](std::span<const int> col) {
        std::vector<int> out(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = col[static_cast<std::size_t>(rows[i])];
        return out;
    };
    for (const auto& c : full.tasks) b.tasks.push_back(pick(c));
    for (const auto& c : full.domains) b.domains.push_back(pick(c));
    for (const auto& c : b.tasks) b.view.tasks.emplace_back(c);
    for (const auto& c : b.domains) b.view.domains.emplace_back(c);
    return b;
}

Matrix gather_rows(const Matrix& x, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
    return out;
}

std::vector<std::vector<Index>> epoch_batches(Index n, int batch_size, Rng& rng) {
    std::vector<Index> order = data::all_rows(n);
    rng.shuffle(order);
    std::vector<std::vector<Index>> batches;
    for (Index start = 0; start < n; start += batch_size) {
        const Index end = std::min<Index>(n, start + batch_size);
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

std::vector<double> head_accuracies(const std::vector<std::vector<int>>& predicted, const std::vector<std::span<const int>>& labels) {
    std::vector<double> out;
    for (std::size_t i = 0; i < predicted.size(); ++i) out.push_back(nn::accuracy(predicted[i], labels[i]));
    return out;
}

double mean_or_zero(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

[[noreturn]] void diverged(int epoch, std::size_t batch, const std::deque<double>& recent) {
    std::ostringstream msg;
    msg << "training diverged: non-finite loss at epoch " << epoch << ", batch " << batch << "; last finite losses:";
    for (double v : recent) msg << ' ' << v;
    throw DivergenceError(msg.str());
}

}  // namespace

TrainedModel train_model(const data::Dataset& fit, const data::Dataset& validation, const DisAEConfig& config,
                         const EpochCallback& on_epoch) {
    config.validate();
    config.check_compatible(fit);
    if (fit.n_samples() == 0 || validation.n_samples() == 0) throw ValidationError("training needs non-empty fit and validation sets");

    DisAEModel model(config, static_cast<int>(fit.n_features()));
    const LabelView fit_labels = label_view(config, fit);
    const LabelView val_labels = label_view(config, validation);
    const Matrix& x = fit.features();
    const Matrix& xv = validation.features();

    nn::AdamW optimizer({config.lr, 0.9, 0.999, 1e-8, config.l2});
    nn::PlateauSchedule schedule(config.scheduler);

    std::optional<data::WeightedBatchSampler> sampler;
    if (config.balance_task) {
        for (std::size_t t = 0; t < fit.n_tasks(); ++t)
            if (fit.tasks()[t].name == *config.balance_task)
                sampler.emplace(fit.task_labels(t), fit.tasks()[t], config.batch_size, derive_seed(config.seed, "sampler"));
    }
    Rng shuffle_rng(derive_seed(config.seed, "shuffle"));

    TrainedModel out;
    out.norm = {};
    DisAEModel best = model;
    double best_proxy = -std::numeric_limits<double>::infinity();
    std::deque<double> recent;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::vector<std::vector<Index>> batches;
        if (sampler) {
            const Index n_batches = (fit.n_samples() + config.batch_size - 1) / config.batch_size;
            for (Index b = 0; b < n_batches; ++b) batches.push_back(sampler->next_batch());
        } else {
            batches = epoch_batches(fit.n_samples(), config.batch_size, shuffle_rng);
        }

        double total = 0.0;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            const Matrix xb = gather_rows(x, batches[b]);
            const BatchLabels lb = gather(fit_labels, batches[b]);
            auto [loss, grads] = loss_and_gradients(model, xb, lb.view);
            if (!std::isfinite(loss.total)) diverged(epoch, b, recent);
            recent.push_back(loss.total);
            if (recent.size() > 5) recent.pop_front();
            total += loss.total;
            optimizer.step(param_blocks(model, grads));
        }
        if (!model.all_finite()) diverged(epoch, batches.size(), recent);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = optimizer.lr();
        rec.train_total = total / static_cast<double>(batches.size());
        rec.train_relative_reconstruction = relative_reconstruction_error(x, model.reconstruct(x));
        rec.train_task_accuracy = head_accuracies(model.predict_tasks(x), fit_labels.tasks);
        rec.train_domain_accuracy = head_accuracies(model.predict_domains(x), fit_labels.domains);
        const LossBreakdown val_loss = compute_loss(model, xv, val_labels);
        if (!std::isfinite(val_loss.total)) diverged(epoch, batches.size(), recent);
        rec.val_total = val_loss.total;
        rec.val_relative_reconstruction = relative_reconstruction_error(xv, model.reconstruct(xv));
        rec.val_task_accuracy = mean_or_zero(head_accuracies(model.predict_tasks(xv), val_labels.tasks));
        rec.proxy = rec.val_task_accuracy - rec.val_relative_reconstruction;
        out.history.epochs.push_back(rec);
        if (on_epoch) on_epoch(rec, model);

        if (rec.proxy > best_proxy) {
            best_proxy = rec.proxy;
            best = model;
            out.history.best_epoch = epoch;
        }
        optimizer.set_lr(schedule.update(optimizer.lr(), val_loss.total));
    }
    out.model = std::move(best);
    return out;
}

namespace {

TrainedModel train_split(const data::Dataset& raw, const std::vector<Index>& fit_rows, const std::vector<Index>& val_rows,
                         const DisAEConfig& config) {
    if (fit_rows.empty() || val_rows.empty()) throw ValidationError("fit or validation split is empty");
    const data::Dataset fit_raw = raw.subset(fit_rows);
    auto [fit, stats] = data::normalize(fit_raw);
    auto [val, unused] = data::normalize(raw.subset(val_rows), stats);
    (void)unused;
    TrainedModel out = train_model(fit, val, config);
    out.norm = stats;
    return out;
}

}  // namespace

TrainedModel train_on_rows(const data::Dataset& raw, const std::vector<Index>& rows, const DisAEConfig& config) {
    const std::vector<int>& strat = raw.n_tasks() > 0 ? raw.task_labels(0) : std::vector<int>(raw.n_samples(), 0);
    auto [fit_rows, val_rows] = data::stratified_holdout(strat, rows, config.validation_fraction,
                                                         derive_seed(config.seed, "holdout"));
    return train_split(raw, fit_rows, val_rows, config);
}

TrainedModel train_fold(const data::Dataset& raw, const data::SplitPlan& plan, int fold, const DisAEConfig& config) {
    auto [fit_rows, val_rows] = plan.fit_validation_rows(fold);
    return train_split(raw, fit_rows, val_rows, config);
}

std::vector<TrainedModel> train(const data::Dataset& raw, const data::SplitPlan& plan, const DisAEConfig& config) {
    std::vector<TrainedModel> out;
    for (int f = 0; f < plan.k; ++f) {
        DisAEConfig c = config;
        c.seed = derive_seed(config.seed, "fold", static_cast<std::uint64_t>(f));
        out.push_back(train_fold(raw, plan, f, c));
    }
    return out;
}

}  // namespace disae::model
