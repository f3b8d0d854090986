#include "disae/data/dataset.hpp"

#include "disae/data/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace disae::data {

void TaskSpec::validate() const {
    if (n_classes < 2)
        throw ValidationError("task '" + name + "': n_classes must be >= 2");
    if (!class_weights.empty()) {
        if (class_weights.size() != static_cast<std::size_t>(n_classes))
            throw ValidationError("task '" + name + "': class_weights length must equal n_classes");
        for (double w : class_weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw ValidationError("task '" + name + "': class weights must be positive");
    }
}

double AffineInstance::shift_magnitude() const {
    double s = 0.0;
    for (double a : scale) s += (a - 1.0) * (a - 1.0);
    for (double b : offset) s += b * b;
    return std::sqrt(s);
}

void DomainSpec::validate() const {
    if (kind == DomainKind::categorical && n_instances < 2)
        throw ValidationError("domain '" + name + "': categorical cardinality must be >= 2");
    if (kind == DomainKind::continuous && n_bins < 2)
        throw ValidationError("domain '" + name + "': n_bins must be >= 2");
}

Dataset::Dataset(Matrix features, std::vector<std::string> feature_names,
                 std::vector<TaskSpec> tasks, std::vector<std::vector<int>> task_labels,
                 std::vector<DomainSpec> domains, std::vector<DomainColumn> domain_columns)
    : features_(std::move(features)),
      feature_names_(std::move(feature_names)),
      tasks_(std::move(tasks)),
      task_labels_(std::move(task_labels)),
      domains_(std::move(domains)),
      domain_columns_(std::move(domain_columns)) {
    const auto n = static_cast<std::size_t>(features_.rows());
    if (feature_names_.size() != static_cast<std::size_t>(features_.cols()))
        throw ValidationError("feature name count does not match feature matrix width");
    if (!features_.allFinite()) {
        for (Index i = 0; i < features_.rows(); ++i)
            if (!features_.row(i).allFinite())
                throw ValidationError("non-finite feature value in row " + std::to_string(i));
    }
    if (task_labels_.size() != tasks_.size())
        throw ValidationError("task label column count does not match task specs");
    if (domain_columns_.size() != domains_.size())
        throw ValidationError("domain column count does not match domain specs");

    for (std::size_t t = 0; t < tasks_.size(); ++t) {
        tasks_[t].validate();
        const auto& col = task_labels_[t];
        if (col.size() != n)
            throw ValidationError("task '" + tasks_[t].name + "' has " + std::to_string(col.size()) +
                                  " labels, expected " + std::to_string(n));
        for (std::size_t i = 0; i < n; ++i)
            if (col[i] < 0 || col[i] >= tasks_[t].n_classes)
                throw ValidationError("task '" + tasks_[t].name + "' label " + std::to_string(col[i]) +
                                      " out of range [0, " + std::to_string(tasks_[t].n_classes) +
                                      ") at row " + std::to_string(i));
    }

    for (std::size_t d = 0; d < domains_.size(); ++d) {
        const auto& spec = domains_[d];
        spec.validate();
        auto& col = domain_columns_[d];
        if (spec.kind == DomainKind::continuous) {
            if (col.values.size() != n)
                throw ValidationError("domain '" + spec.name + "' has " +
                                      std::to_string(col.values.size()) + " values, expected " +
                                      std::to_string(n));
            for (std::size_t i = 0; i < n; ++i)
                if (!std::isfinite(col.values[i]))
                    throw ValidationError("domain '" + spec.name + "' non-finite value at row " +
                                          std::to_string(i));
            if (col.ids.size() != n) col.ids = discretize_domain(col.values, spec);
        } else {
            col.values.clear();
            if (col.ids.size() != n)
                throw ValidationError("domain '" + spec.name + "' has " + std::to_string(col.ids.size()) +
                                      " labels, expected " + std::to_string(n));
        }
        for (std::size_t i = 0; i < n; ++i)
            if (col.ids[i] < 0 || col.ids[i] >= spec.cardinality())
                throw ValidationError("domain '" + spec.name + "' label " + std::to_string(col.ids[i]) +
                                      " out of range [0, " + std::to_string(spec.cardinality()) +
                                      ") at row " + std::to_string(i));
    }
}

std::vector<std::vector<int>> Dataset::all_domain_labels() const {
    std::vector<std::vector<int>> out;
    out.reserve(domain_columns_.size());
    for (const auto& c : domain_columns_) out.push_back(c.ids);
    return out;
}

Dataset Dataset::subset(std::span<const Index> rows) const {
    Dataset out;
    out.features_.resize(static_cast<Index>(rows.size()), features_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.features_.row(static_cast<Index>(r)) = features_.row(rows[r]);
    out.feature_names_ = feature_names_;
    out.tasks_ = tasks_;
    out.domains_ = domains_;
    out.provenance_ = provenance_;
    out.task_labels_.resize(task_labels_.size());
    for (std::size_t t = 0; t < task_labels_.size(); ++t) {
        out.task_labels_[t].reserve(rows.size());
        for (Index r : rows) out.task_labels_[t].push_back(task_labels_[t][static_cast<std::size_t>(r)]);
    }
    out.domain_columns_.resize(domain_columns_.size());
    for (std::size_t d = 0; d < domain_columns_.size(); ++d) {
        const auto& src = domain_columns_[d];
        auto& dst = out.domain_columns_[d];
        dst.ids.reserve(rows.size());
        for (Index r : rows) dst.ids.push_back(src.ids[static_cast<std::size_t>(r)]);
        if (!src.values.empty()) {
            dst.values.reserve(rows.size());
            for (Index r : rows) dst.values.push_back(src.values[static_cast<std::size_t>(r)]);
        }
    }
    return out;
}

Dataset Dataset::with_features(Matrix features) const {
    if (features.rows() != features_.rows() || features.cols() != features_.cols())
        throw ShapeError("with_features: shape mismatch");
    if (!features.allFinite()) throw ValidationError("with_features: non-finite values");
    Dataset out = *this;
    out.features_ = std::move(features);
    return out;
}

std::vector<Index> Dataset::rows_with_domain(std::size_t d, std::span<const int> instances) const {
    const std::set<int> wanted(instances.begin(), instances.end());
    std::vector<Index> rows;
    const auto& ids = domain_labels(d);
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (wanted.count(ids[i])) rows.push_back(static_cast<Index>(i));
    return rows;
}

std::optional<std::size_t> Dataset::find_domain(const std::string& name) const {
    for (std::size_t d = 0; d < domains_.size(); ++d)
        if (domains_[d].name == name) return d;
    return std::nullopt;
}

std::vector<Index> all_rows(Index n) {
    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    return rows;
}

}  // namespace disae::data
