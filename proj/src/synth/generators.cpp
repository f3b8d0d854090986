#include "disae/synth/generators.hpp"

#include "disae/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace disae::synth {

namespace {

std::vector<double> ratios_for(const GeneratorConfig& c, std::size_t task) {
    if (task < c.task_ratios.size() && !c.task_ratios[task].empty()) return c.task_ratios[task];
    return std::vector<double>(static_cast<std::size_t>(c.task_classes.at(task)), 1.0);
}

std::vector<std::string> feature_names(int n) {
    std::vector<std::string> names;
    for (int j = 0; j < n; ++j) names.push_back("f" + std::to_string(j));
    return names;
}

// Appends redundant and noise columns after the informative block. The
// mixing matrix (informative x redundant) is returned through `mix_out`.
Matrix complete_features(const Matrix& informative, const GeneratorConfig& c, Rng& rng, Matrix& mix_out) {
    const Index n = informative.rows();
    Matrix x(n, c.n_features);
    x.leftCols(c.n_informative) = informative;
    if (c.n_redundant > 0) {
        Matrix mix(c.n_informative, c.n_redundant);
        for (Index i = 0; i < mix.rows(); ++i)
            for (Index j = 0; j < mix.cols(); ++j) mix(i, j) = rng.uniform(-1.0, 1.0);
        x.middleCols(c.n_informative, c.n_redundant) = informative * mix;
        mix_out = mix;
        if (c.feature_noise > 0.0)
            for (Index i = 0; i < n; ++i)
                for (Index j = 0; j < c.n_redundant; ++j) x(i, c.n_informative + j) += c.feature_noise * rng.normal();
    }
    for (Index j = c.n_informative + c.n_redundant; j < c.n_features; ++j)
        for (Index i = 0; i < n; ++i) x(i, j) = rng.normal();
    return x;
}

data::Dataset assemble(Matrix x, const Matrix& mix, std::vector<std::vector<int>> labels, const GeneratorConfig& c,
                       Rng& rng) {
    std::vector<Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    rng.shuffle(order);
    Matrix shuffled(x.rows(), x.cols());
    std::vector<std::vector<int>> shuffled_labels(labels.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        shuffled.row(static_cast<Index>(r)) = x.row(order[r]);
        for (std::size_t t = 0; t < labels.size(); ++t)
            shuffled_labels[t].push_back(labels[t][static_cast<std::size_t>(order[r])]);
    }
    std::vector<data::TaskSpec> tasks;
    for (int t = 0; t < c.n_tasks; ++t)
        tasks.push_back({"task" + std::to_string(t + 1), c.task_classes[static_cast<std::size_t>(t)], {}});
    data::Dataset ds(std::move(shuffled), feature_names(c.n_features), std::move(tasks), std::move(shuffled_labels), {},
                     {});
    nlohmann::json mix_rows = nlohmann::json::array();
    for (Index i = 0; i < mix.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(mix.cols()));
        for (Index j = 0; j < mix.cols(); ++j) r[static_cast<std::size_t>(j)] = mix(i, j);
        mix_rows.push_back(r);
    }
    ds.set_provenance({{"generator", c.to_json()}, {"redundant_mix", mix_rows}});
    return ds;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (n_samples < 1) throw ConfigError("generator: n_samples must be positive");
    if (n_informative < 1) throw ConfigError("generator: n_informative must be >= 1");
    if (n_redundant < 0) throw ConfigError("generator: n_redundant must be >= 0");
    if (n_informative + n_redundant > n_features)
        throw ConfigError("generator: n_informative + n_redundant exceeds n_features");
    if (n_tasks < 1 || task_classes.size() != static_cast<std::size_t>(n_tasks))
        throw ConfigError("generator: task_classes must list one class count per task");
    for (int k : task_classes)
        if (k < 2) throw ConfigError("generator: every task needs >= 2 classes");
    if (task_ratios.size() > static_cast<std::size_t>(n_tasks))
        throw ConfigError("generator: more ratio vectors than tasks");
    for (std::size_t t = 0; t < task_ratios.size(); ++t) {
        if (task_ratios[t].empty()) continue;
        if (task_ratios[t].size() != static_cast<std::size_t>(task_classes[t]))
            throw ConfigError("generator: ratio vector length must equal class count");
        for (double r : task_ratios[t])
            if (!(r > 0.0)) throw ConfigError("generator: class ratios must be positive");
    }
    if (n_clusters_per_class < 1) throw ConfigError("generator: n_clusters_per_class must be >= 1");
    if (feature_noise < 0.0 || label_noise < 0.0) throw ConfigError("generator: noise levels must be >= 0");
}

nlohmann::json GeneratorConfig::to_json() const {
    return {{"n_samples", n_samples},         {"n_features", n_features},
            {"n_informative", n_informative}, {"n_redundant", n_redundant},
            {"class_sep", class_sep},         {"n_clusters_per_class", n_clusters_per_class},
            {"n_tasks", n_tasks},             {"task_classes", task_classes},
            {"task_ratios", task_ratios},     {"feature_noise", feature_noise},
            {"label_noise", label_noise},     {"seed", seed}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
    GeneratorConfig c;
    c.n_samples = j.value("n_samples", c.n_samples);
    c.n_features = j.value("n_features", c.n_features);
    c.n_informative = j.value("n_informative", c.n_informative);
    c.n_redundant = j.value("n_redundant", c.n_redundant);
    c.class_sep = j.value("class_sep", c.class_sep);
    c.n_clusters_per_class = j.value("n_clusters_per_class", c.n_clusters_per_class);
    c.n_tasks = j.value("n_tasks", c.n_tasks);
    c.task_classes = j.value("task_classes", c.task_classes);
    c.task_ratios = j.value("task_ratios", c.task_ratios);
    c.feature_noise = j.value("feature_noise", c.feature_noise);
    c.label_noise = j.value("label_noise", c.label_noise);
    c.seed = j.value("seed", c.seed);
    return c;
}

std::vector<Index> proportional_counts(Index n, const std::vector<double>& ratios) {
    if (ratios.empty()) throw ConfigError("proportional_counts: empty ratio vector");
    const double total = std::accumulate(ratios.begin(), ratios.end(), 0.0);
    std::vector<Index> counts;
    std::vector<std::pair<double, std::size_t>> remainders;
    Index assigned = 0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0)) throw ConfigError("proportional_counts: ratios must be positive");
        const double exact = static_cast<double>(n) * ratios[i] / total;
        const auto base = static_cast<Index>(std::floor(exact + 1e-9));
        counts.push_back(base);
        assigned += base;
        remainders.emplace_back(exact - static_cast<double>(base), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[remainders[r % remainders.size()].second];
    return counts;
}

data::Dataset make_classification(const GeneratorConfig& config) {
    config.validate();
    if (config.n_tasks != 1) throw ConfigError("make_classification: exactly one task is supported");
    const int n_classes = config.task_classes[0];
    const auto counts = proportional_counts(config.n_samples, ratios_for(config, 0));
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0)
            throw ConfigError("make_classification: class " + std::to_string(c) + " receives no samples with n_samples=" +
                              std::to_string(config.n_samples));

    const int n_clusters = n_classes * config.n_clusters_per_class;
    if (config.n_informative < 63 && (std::uint64_t{1} << config.n_informative) < static_cast<std::uint64_t>(n_clusters))
        throw ConfigError("make_classification: 2^n_informative must be >= n_classes * n_clusters_per_class");

    Rng rng(derive_seed(config.seed, "make_classification"));
    std::vector<std::uint64_t> vertices;
    std::set<std::uint64_t> used;
    const std::uint64_t n_vertices =
        config.n_informative < 63 ? (std::uint64_t{1} << config.n_informative) : ~std::uint64_t{0};
    while (vertices.size() < static_cast<std::size_t>(n_clusters)) {
        const std::uint64_t v = rng.below(n_vertices);
        if (used.insert(v).second) vertices.push_back(v);
    }

    Matrix informative(config.n_samples, config.n_informative);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(config.n_samples));
    Index row = 0;
    for (int c = 0; c < n_classes; ++c) {
        const auto per_cluster = proportional_counts(counts[static_cast<std::size_t>(c)],
                                                     std::vector<double>(static_cast<std::size_t>(config.n_clusters_per_class), 1.0));
        for (int k = 0; k < config.n_clusters_per_class; ++k) {
            const std::uint64_t v = vertices[static_cast<std::size_t>(c * config.n_clusters_per_class + k)];
            for (Index s = 0; s < per_cluster[static_cast<std::size_t>(k)]; ++s, ++row) {
                for (int j = 0; j < config.n_informative; ++j) {
                    const double centre = ((v >> j) & 1U) ? config.class_sep : -config.class_sep;
                    informative(row, j) = centre + rng.normal();
                }
                labels.push_back(c);
            }
        }
    }
    Matrix mix;
    Matrix x = complete_features(informative, config, rng, mix);
    return assemble(std::move(x), mix, {std::move(labels)}, config, rng);
}

data::Dataset make_multilabel(const GeneratorConfig& config) {
    config.validate();
    if (config.n_tasks < 2) throw ConfigError("make_multilabel: n_tasks must be >= 2");
    Rng rng(derive_seed(config.seed, "make_multilabel"));
    const Index n = config.n_samples;
    const int d = config.n_informative;

    Matrix informative(n, d);
    for (Index i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) informative(i, j) = rng.normal();

    // Gram-Schmidt on random directions keeps task decision functions
    // orthogonal (hence independent labels) while there is room.
    std::vector<Vector> weights;
    for (int t = 0; t < config.n_tasks; ++t) {
        Vector w(d);
        for (int j = 0; j < d; ++j) w(j) = rng.normal();
        if (static_cast<int>(weights.size()) < d)
            for (const auto& prev : weights) w -= w.dot(prev) * prev;
        w.normalize();
        weights.push_back(w);
    }

    std::vector<std::vector<int>> labels(static_cast<std::size_t>(config.n_tasks));
    for (int t = 0; t < config.n_tasks; ++t) {
        Vector score = config.class_sep * (informative * weights[static_cast<std::size_t>(t)]);
        for (Index i = 0; i < n; ++i) score(i) += config.label_noise * rng.normal();
        std::vector<double> sorted(score.data(), score.data() + n);
        std::sort(sorted.begin(), sorted.end());
        const auto counts = proportional_counts(n, ratios_for(config, static_cast<std::size_t>(t)));
        for (Index c : counts)
            if (c == 0) throw ConfigError("make_multilabel: a class receives no samples");
        std::vector<double> thresholds;
        Index cum = 0;
        for (std::size_t c = 0; c + 1 < counts.size(); ++c) {
            cum += counts[c];
            thresholds.push_back(sorted[static_cast<std::size_t>(cum)]);
        }
        auto& col = labels[static_cast<std::size_t>(t)];
        col.reserve(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i)
            col.push_back(static_cast<int>(std::upper_bound(thresholds.begin(), thresholds.end(), score(i)) -
                                           thresholds.begin()));
    }
    Matrix mix;
    Matrix x = complete_features(informative, config, rng, mix);
    return assemble(std::move(x), mix, std::move(labels), config, rng);
}

}  // namespace disae::synth
