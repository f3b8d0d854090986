#include "disae/metrics/variation.hpp"

#include "disae/data/normalize.hpp"
#include "disae/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace disae::metrics {

std::size_t VariationLabels::n_samples() const {
    if (!tasks.empty()) return tasks.front().size();
    if (!domains.empty()) return domains.front().size();
    return 0;
}

VariationLabels VariationLabels::from(const data::Dataset& dataset,
                                      const std::optional<std::vector<std::string>>& domains) {
    VariationLabels l;
    for (std::size_t t = 0; t < dataset.n_tasks(); ++t) {
        l.tasks.push_back(dataset.task_labels(t));
        l.task_names.push_back(dataset.tasks()[t].name);
    }
    if (domains) {
        for (const auto& name : *domains) {
            auto d = dataset.find_domain(name);
            if (!d) throw ConfigError("unknown domain '" + name + "'");
            l.domains.push_back(dataset.domain_labels(*d));
            l.domain_names.push_back(name);
        }
    } else {
        for (std::size_t d = 0; d < dataset.n_domains(); ++d) {
            l.domains.push_back(dataset.domain_labels(d));
            l.domain_names.push_back(dataset.domains()[d].name);
        }
    }
    return l;
}

VariationLabels VariationLabels::only_domain(std::size_t d) const {
    VariationLabels l;
    l.tasks = tasks;
    l.task_names = task_names;
    l.domains = {domains.at(d)};
    l.domain_names = {domain_names.at(d)};
    return l;
}

void VariationConfig::validate() const {
    rho.validate();
    if (min_cell < 1) throw ConfigError("min_cell must be at least 1");
    if (n_directions < 0) throw ConfigError("n_directions must be non-negative");
}

nlohmann::json VariationConfig::to_json() const {
    return {{"rho", rho.to_json()},
            {"min_cell", min_cell},
            {"n_directions", n_directions},
            {"seed", seed},
            {"discriminant_directions", discriminant_directions}};
}

VariationConfig VariationConfig::from_json(const nlohmann::json& j) {
    VariationConfig c;
    try {
        if (j.contains("rho")) c.rho = Dissimilarity::from_json(j.at("rho"));
        c.min_cell = j.value("min_cell", c.min_cell);
        c.n_directions = j.value("n_directions", c.n_directions);
        c.seed = j.value("seed", c.seed);
        c.discriminant_directions = j.value("discriminant_directions", c.discriminant_directions);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("variation config: ") + e.what());
    }
    c.validate();
    return c;
}

nlohmann::json VariationReport::to_json() const {
    nlohmann::json j;
    j["v_sup"] = v_sup;
    j["direction"] = std::vector<double>(direction.data(), direction.data() + direction.size());
    j["axis_v"] = axis_v;
    j["n_random"] = n_random;
    j["n_discriminant"] = n_discriminant;
    j["n_evaluated"] = n_evaluated;
    j["rho"] = rho;
    return j;
}

namespace {

// Row groups for every (task, domain, class, instance) cell that is large enough.
struct Cells {
    // [task][domain][class] -> list of instance row sets (at least two per class kept)
    std::vector<std::vector<std::vector<std::vector<std::vector<Index>>>>> groups;
    Index n_tasks = 0, n_domains = 0;
};

Cells build_cells(const VariationLabels& labels, int min_cell) {
    const std::size_t n = labels.n_samples();
    for (const auto* group : {&labels.tasks, &labels.domains})
        for (const auto& col : *group)
            if (col.size() != n) throw ShapeError("variation labels have inconsistent lengths");
    for (std::size_t d = 0; d < labels.domains.size(); ++d) {
        std::set<int> present(labels.domains[d].begin(), labels.domains[d].end());
        if (present.size() < 2)
            throw ValidationError("domain '" + (d < labels.domain_names.size() ? labels.domain_names[d] : std::to_string(d)) +
                                  "' has fewer than 2 instances; variation is undefined");
    }
    Cells c;
    c.n_tasks = static_cast<Index>(labels.tasks.size());
    c.n_domains = static_cast<Index>(labels.domains.size());
    c.groups.resize(labels.tasks.size());
    for (std::size_t t = 0; t < labels.tasks.size(); ++t) {
        c.groups[t].resize(labels.domains.size());
        for (std::size_t d = 0; d < labels.domains.size(); ++d) {
            std::map<int, std::map<int, std::vector<Index>>> by_class;
            for (std::size_t i = 0; i < n; ++i)
                by_class[labels.tasks[t][i]][labels.domains[d][i]].push_back(static_cast<Index>(i));
            for (auto& [y, by_inst] : by_class) {
                std::vector<std::vector<Index>> kept;
                for (auto& [e, rows] : by_inst)
                    if (static_cast<int>(rows.size()) >= min_cell) kept.push_back(std::move(rows));
                if (kept.size() >= 2) c.groups[t][d].push_back(std::move(kept));
            }
        }
    }
    return c;
}

FeatureVariation evaluate(std::span<const double> values, const Cells& cells, const Dissimilarity& rho) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::max(std::sqrt(var / n), data::kStdFloor);

    FeatureVariation out;
    out.per_pair = Matrix::Zero(cells.n_tasks, cells.n_domains);
    std::vector<std::vector<double>> sorted;
    for (Index t = 0; t < cells.n_tasks; ++t)
        for (Index d = 0; d < cells.n_domains; ++d) {
            double best = 0.0;
            for (const auto& instances : cells.groups[static_cast<std::size_t>(t)][static_cast<std::size_t>(d)]) {
                sorted.assign(instances.size(), {});
                for (std::size_t e = 0; e < instances.size(); ++e) {
                    auto& s = sorted[e];
                    s.reserve(instances[e].size());
                    for (Index r : instances[e]) s.push_back((values[static_cast<std::size_t>(r)] - mean) / sd);
                    std::sort(s.begin(), s.end());
                }
                for (std::size_t a = 0; a < sorted.size(); ++a)
                    for (std::size_t b = a + 1; b < sorted.size(); ++b) best = std::max(best, rho.sorted(sorted[a], sorted[b]));
            }
            out.per_pair(t, d) = best;
            out.v = std::max(out.v, best);
        }
    return out;
}

// Fisher/LDA directions per (task, domain, class) cell group: the leading
// generalised eigenvectors of between- vs within-instance scatter, plus the
// pairwise Fisher directions when there are only a few instances.
std::vector<Vector> discriminant_candidates(const Matrix& z, const Cells& cells) {
    const Index m = z.cols();
    std::vector<Vector> out;
    if (m < 2) return out;
    for (const auto& per_task : cells.groups)
        for (const auto& per_domain : per_task)
            for (const auto& instances : per_domain) {
                const std::size_t k = instances.size();
                std::vector<Vector> means;
                Matrix within = Matrix::Zero(m, m);
                Vector grand = Vector::Zero(m);
                double total = 0.0;
                for (const auto& rows : instances) {
                    Vector mu = Vector::Zero(m);
                    for (Index r : rows) mu += z.row(r).transpose();
                    mu /= static_cast<double>(rows.size());
                    for (Index r : rows) {
                        const Vector c = z.row(r).transpose() - mu;
                        within.noalias() += c * c.transpose();
                    }
                    grand += static_cast<double>(rows.size()) * mu;
                    total += static_cast<double>(rows.size());
                    means.push_back(std::move(mu));
                }
                grand /= total;
                within /= total;
                within.diagonal().array() += 1e-9 * std::max(within.trace() / static_cast<double>(m), 1e-12);
                Matrix between = Matrix::Zero(m, m);
                for (std::size_t e = 0; e < k; ++e) {
                    const Vector c = means[e] - grand;
                    between.noalias() += static_cast<double>(instances[e].size()) / total * c * c.transpose();
                }
                Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(between, within);
                if (solver.info() == Eigen::Success) {
                    const Index keep = std::min<Index>({m, static_cast<Index>(k) - 1, 3});
                    for (Index j = 0; j < keep; ++j) out.push_back(solver.eigenvectors().col(m - 1 - j));
                }
                if (k <= 6) {
                    const Eigen::LDLT<Matrix> ldlt(within);
                    for (std::size_t a = 0; a < k; ++a)
                        for (std::size_t b = a + 1; b < k; ++b) out.push_back(ldlt.solve(means[a] - means[b]));
                }
            }
    std::vector<Vector> unit;
    for (auto& v : out) {
        const double norm = v.norm();
        if (std::isfinite(norm) && norm > 0.0) unit.push_back(v / norm);
    }
    return unit;
}

}  // namespace

FeatureVariation feature_variation(std::span<const double> values, const VariationLabels& labels, const Dissimilarity& rho,
                                   int min_cell) {
    rho.validate();
    if (values.size() != labels.n_samples()) throw ShapeError("feature_variation: values and labels differ in length");
    if (values.empty()) throw ValidationError("feature_variation: no samples");
    return evaluate(values, build_cells(labels, min_cell), rho);
}

VariationReport model_variation(const Matrix& z, const VariationLabels& labels, const VariationConfig& config) {
    config.validate();
    const Index m = z.cols();
    if (m == 0) throw ShapeError("model_variation: representation has no columns");
    if (static_cast<std::size_t>(z.rows()) != labels.n_samples())
        throw ShapeError("model_variation: representation rows and labels differ in length");
    const Cells cells = build_cells(labels, config.min_cell);

    VariationReport report;
    report.rho = to_string(config.rho.kind);
    report.v_sup = -1.0;
    Vector projected(z.rows());
    auto consider = [&](const Vector& u) {
        projected.noalias() = z * u;
        FeatureVariation fv = evaluate({projected.data(), static_cast<std::size_t>(projected.size())}, cells, config.rho);
        ++report.n_evaluated;
        // Strict comparison keeps the earliest maximiser, so ties resolve the same way every run.
        if (fv.v > report.v_sup) {
            report.v_sup = fv.v;
            report.direction = u;
            report.per_pair = std::move(fv.per_pair);
        }
        return fv.v;
    };

    for (Index j = 0; j < m; ++j) report.axis_v.push_back(consider(Vector::Unit(m, j)));

    Rng rng(derive_seed(config.seed, "directions"));
    for (int i = 0; i < config.n_directions; ++i) {
        Vector u(m);
        double norm = 0.0;
        do {
            for (Index j = 0; j < m; ++j) u(j) = rng.normal();
            norm = u.norm();
        } while (norm == 0.0);
        consider(u / norm);
        ++report.n_random;
    }

    if (config.discriminant_directions)
        for (const auto& u : discriminant_candidates(z, cells)) {
            consider(u);
            ++report.n_discriminant;
        }
    return report;
}

}  // namespace disae::metrics
