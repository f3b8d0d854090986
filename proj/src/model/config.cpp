#include "disae/model/config.hpp"

#include <algorithm>

namespace disae::model {

namespace {

nlohmann::json head_to_json(const HeadSpec& h) {
    return {{"name", h.name}, {"n_classes", h.n_classes}, {"hidden", h.hidden}};
}

HeadSpec head_from_json(const nlohmann::json& j) {
    HeadSpec h;
    h.name = j.at("name").get<std::string>();
    h.n_classes = j.at("n_classes").get<int>();
    h.hidden = j.value("hidden", std::vector<int>{});
    return h;
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::vector<int> DisAEConfig::decoder_hidden() const { return {encoder_hidden.rbegin(), encoder_hidden.rend()}; }

std::vector<int> DisAEConfig::head_hidden(const HeadSpec& h) const {
    if (!h.hidden.empty()) return h.hidden;
    return head_hidden_default.empty() ? std::vector<int>{latent_dim} : head_hidden_default;
}

void DisAEConfig::validate() const {
    if (latent_dim < 1) throw ConfigError("latent_dim must be at least 1");
    for (int w : encoder_hidden)
        if (w < 1) throw ConfigError("encoder widths must be positive");
    for (const auto* heads : {&task_heads, &domain_heads})
        for (const auto& h : *heads) {
            if (h.n_classes < 2) throw ConfigError("head '" + h.name + "' needs at least 2 classes");
            for (int w : h.hidden)
                if (w < 1) throw ConfigError("head '" + h.name + "' has a non-positive width");
        }
    for (int w : head_hidden_default)
        if (w < 1) throw ConfigError("head widths must be positive");
    if (alpha < 0.0 || beta < 0.0 || lambda < 0.0) throw ConfigError("alpha, beta and lambda must be non-negative");
    if (l2 < 0.0) throw ConfigError("l2 must be non-negative");
    if (!(lr > 0.0)) throw ConfigError("lr must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw ConfigError("validation_fraction must lie in (0, 1)");
    nn::PlateauSchedule check(scheduler);
    (void)check;
}

void DisAEConfig::check_compatible(const data::Dataset& dataset) const {
    for (const auto& h : task_heads) {
        const auto& tasks = dataset.tasks();
        auto it = std::find_if(tasks.begin(), tasks.end(), [&](const data::TaskSpec& t) { return t.name == h.name; });
        if (it == tasks.end()) throw ConfigError("task head '" + h.name + "' has no matching task in the dataset");
        if (it->n_classes != h.n_classes)
            throw ConfigError("task head '" + h.name + "' has " + std::to_string(h.n_classes) + " outputs but the task has " +
                              std::to_string(it->n_classes) + " classes");
    }
    for (const auto& h : domain_heads) {
        auto d = dataset.find_domain(h.name);
        if (!d) throw ConfigError("domain head '" + h.name + "' has no matching domain in the dataset");
        const int card = dataset.domains()[*d].cardinality();
        if (card != h.n_classes)
            throw ConfigError("domain head '" + h.name + "' has " + std::to_string(h.n_classes) +
                              " outputs but the domain has " + std::to_string(card) + " instances");
    }
    if (balance_task) {
        const auto& tasks = dataset.tasks();
        if (std::none_of(tasks.begin(), tasks.end(), [&](const data::TaskSpec& t) { return t.name == *balance_task; }))
            throw ConfigError("balance_task '" + *balance_task + "' is not a task of the dataset");
    }
}

nlohmann::json DisAEConfig::to_json() const {
    nlohmann::json j;
    j["encoder_hidden"] = encoder_hidden;
    j["latent_dim"] = latent_dim;
    j["task_heads"] = nlohmann::json::array();
    for (const auto& h : task_heads) j["task_heads"].push_back(head_to_json(h));
    j["domain_heads"] = nlohmann::json::array();
    for (const auto& h : domain_heads) j["domain_heads"].push_back(head_to_json(h));
    j["head_hidden"] = head_hidden_default;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["lambda"] = lambda;
    j["l2"] = l2;
    j["lr"] = lr;
    j["batch_size"] = batch_size;
    j["max_epochs"] = max_epochs;
    j["seed"] = seed;
    j["balance_task"] = balance_task ? nlohmann::json(*balance_task) : nlohmann::json(nullptr);
    j["validation_fraction"] = validation_fraction;
    j["scheduler"] = {{"patience", scheduler.patience},
                      {"factor", scheduler.factor},
                      {"min_lr", scheduler.min_lr},
                      {"threshold", scheduler.threshold}};
    return j;
}

DisAEConfig DisAEConfig::from_json(const nlohmann::json& j) {
    DisAEConfig c;
    try {
        read_opt(j, "encoder_hidden", c.encoder_hidden);
        read_opt(j, "latent_dim", c.latent_dim);
        read_opt(j, "head_hidden", c.head_hidden_default);
        if (j.contains("task_heads"))
            for (const auto& h : j.at("task_heads")) c.task_heads.push_back(head_from_json(h));
        if (j.contains("domain_heads"))
            for (const auto& h : j.at("domain_heads")) c.domain_heads.push_back(head_from_json(h));
        read_opt(j, "alpha", c.alpha);
        read_opt(j, "beta", c.beta);
        read_opt(j, "lambda", c.lambda);
        read_opt(j, "l2", c.l2);
        read_opt(j, "lr", c.lr);
        read_opt(j, "batch_size", c.batch_size);
        read_opt(j, "max_epochs", c.max_epochs);
        read_opt(j, "seed", c.seed);
        if (j.contains("balance_task") && !j.at("balance_task").is_null())
            c.balance_task = j.at("balance_task").get<std::string>();
        read_opt(j, "validation_fraction", c.validation_fraction);
        if (j.contains("scheduler")) {
            const auto& s = j.at("scheduler");
            read_opt(s, "patience", c.scheduler.patience);
            read_opt(s, "factor", c.scheduler.factor);
            read_opt(s, "min_lr", c.scheduler.min_lr);
            read_opt(s, "threshold", c.scheduler.threshold);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid model config: ") + e.what());
    }
    c.validate();
    return c;
}

DisAEConfig with_heads_for(DisAEConfig config, const data::Dataset& dataset,
                           const std::optional<std::vector<std::string>>& domains) {
    config.task_heads.clear();
    config.domain_heads.clear();
    for (const auto& t : dataset.tasks()) config.task_heads.push_back({t.name, t.n_classes, {}});
    for (const auto& d : dataset.domains()) {
        if (domains && std::find(domains->begin(), domains->end(), d.name) == domains->end()) continue;
        config.domain_heads.push_back({d.name, d.cardinality(), {}});
    }
    if (domains)
        for (const auto& name : *domains)
            if (!dataset.find_domain(name)) throw ConfigError("unknown domain '" + name + "'");
    return config;
}

DisAEConfig make_vanilla_ae(DisAEConfig config) {
    config.task_heads.clear();
    config.domain_heads.clear();
    return config;
}

}  // namespace disae::model
