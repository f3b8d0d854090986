#pragma once

#include "disae/core.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace disae::data {

struct TaskSpec {
    std::string name;
    int n_classes = 2;
    // Optional per-class sampling weights; empty means uniform over classes.
    std::vector<double> class_weights;

    void validate() const;
};

enum class DomainKind { categorical, continuous };
enum class BinStrategy { quantile, uniform };

// One affine domain instance: x'[subset] = scale * x[subset] + offset.
// Stored with the domain so that robustness studies can order targets.
struct AffineInstance {
    int id = 0;
    std::vector<int> subset;
    std::vector<double> scale;
    std::vector<double> offset;
    int distance_rank = 0;

    double shift_magnitude() const;
};

struct DomainSpec {
    std::string name;
    DomainKind kind = DomainKind::categorical;
    int n_instances = 2;  // categorical
    int n_bins = 5;       // continuous
    BinStrategy binning = BinStrategy::quantile;
    std::vector<AffineInstance> instances;  // optional provenance

    int cardinality() const { return kind == DomainKind::categorical ? n_instances : n_bins; }
    void validate() const;
};

// Categorical ids are stored as-is; continuous domains keep their raw values
// and the bin ids computed over the full dataset at construction time, so that
// row subsets share one binning.
struct DomainColumn {
    std::vector<int> ids;
    std::vector<double> values;
};

class Dataset {
public:
    Dataset() = default;

    // Validates every invariant and discretizes continuous domains.
    Dataset(Matrix features, std::vector<std::string> feature_names,
            std::vector<TaskSpec> tasks, std::vector<std::vector<int>> task_labels,
            std::vector<DomainSpec> domains, std::vector<DomainColumn> domain_columns);

    Index n_samples() const { return features_.rows(); }
    Index n_features() const { return features_.cols(); }
    std::size_t n_tasks() const { return tasks_.size(); }
    std::size_t n_domains() const { return domains_.size(); }

    const Matrix& features() const { return features_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<TaskSpec>& tasks() const { return tasks_; }
    const std::vector<DomainSpec>& domains() const { return domains_; }
    const std::vector<int>& task_labels(std::size_t t) const { return task_labels_.at(t); }
    const std::vector<std::vector<int>>& all_task_labels() const { return task_labels_; }
    // Integer labels as seen by domain heads and variation metrics.
    const std::vector<int>& domain_labels(std::size_t d) const { return domain_columns_.at(d).ids; }
    std::vector<std::vector<int>> all_domain_labels() const;
    const DomainColumn& domain_column(std::size_t d) const { return domain_columns_.at(d); }

    // Free-form provenance carried into the metadata sidecar.
    const nlohmann::json& provenance() const { return provenance_; }
    void set_provenance(nlohmann::json p) { provenance_ = std::move(p); }

    Dataset subset(std::span<const Index> rows) const;
    Dataset with_features(Matrix features) const;

    // Row indices whose label in domain d is one of `instances`.
    std::vector<Index> rows_with_domain(std::size_t d, std::span<const int> instances) const;

    std::optional<std::size_t> find_domain(const std::string& name) const;

private:
    Matrix features_;
    std::vector<std::string> feature_names_;
    std::vector<TaskSpec> tasks_;
    std::vector<std::vector<int>> task_labels_;
    std::vector<DomainSpec> domains_;
    std::vector<DomainColumn> domain_columns_;
    nlohmann::json provenance_ = nlohmann::json::object();
};

std::vector<Index> all_rows(Index n);

}  // namespace disae::data
