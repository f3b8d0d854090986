#include "disae/metrics/reliability.hpp"

#include <limits>

namespace disae::metrics {

VariationLabels concat(const VariationLabels& a, const VariationLabels& b) {
    if (a.tasks.size() != b.tasks.size() || a.domains.size() != b.domains.size())
        throw ShapeError("cannot concatenate label sets with different task/domain columns");
    VariationLabels out = a;
    for (std::size_t t = 0; t < b.tasks.size(); ++t) out.tasks[t].insert(out.tasks[t].end(), b.tasks[t].begin(), b.tasks[t].end());
    for (std::size_t d = 0; d < b.domains.size(); ++d)
        out.domains[d].insert(out.domains[d].end(), b.domains[d].begin(), b.domains[d].end());
    return out;
}

std::vector<ReliabilityRow> reliability_assessment(const std::vector<Representation>& representations,
                                                   const VariationLabels& source, const VariationLabels& target,
                                                   const VariationConfig& config) {
    if (target.n_samples() == 0) throw ValidationError("reliability assessment needs a non-empty target split");
    if (source.n_samples() == 0) throw ValidationError("reliability assessment needs a non-empty source split");
    const VariationLabels both = concat(source, target);
    std::vector<ReliabilityRow> rows;
    for (const auto& rep : representations) {
        if (static_cast<std::size_t>(rep.source.rows()) != source.n_samples() ||
            static_cast<std::size_t>(rep.target.rows()) != target.n_samples() || rep.source.cols() != rep.target.cols())
            throw ShapeError("representation '" + rep.name + "' does not match the source/target labels");
        Matrix stacked(rep.source.rows() + rep.target.rows(), rep.source.cols());
        stacked << rep.source, rep.target;
        for (std::size_t d = 0; d < source.domains.size(); ++d) {
            ReliabilityRow row;
            row.representation = rep.name;
            row.domain = d < source.domain_names.size() ? source.domain_names[d] : std::to_string(d);
            try {
                row.within_source = model_variation(rep.source, source.only_domain(d), config).v_sup;
            } catch (const ValidationError&) {
                row.within_source = std::numeric_limits<double>::quiet_NaN();
            }
            row.source_and_target = model_variation(stacked, both.only_domain(d), config).v_sup;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace disae::metrics
