#include "disae/synth/shift.hpp"

#include "disae/random.hpp"
#include "disae/synth/generators.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace disae::synth {

std::string to_string(ResponseKind k) {
    switch (k) {
        case ResponseKind::translate: return "translate";
        case ResponseKind::scale: return "scale";
        case ResponseKind::warp: return "warp";
    }
    return "unknown";
}

namespace {

void check_subset(const std::vector<int>& subset, Index n_features, const std::string& what) {
    for (int j : subset)
        if (j < 0 || j >= n_features)
            throw ConfigError(what + ": feature index " + std::to_string(j) + " out of range");
}

}  // namespace

data::Dataset apply_shift_plan(const data::Dataset& dataset, const ShiftPlan& plan, std::uint64_t seed) {
    const Index n = dataset.n_samples();
    Matrix x = dataset.features();
    std::vector<data::DomainSpec> specs = dataset.domains();
    std::vector<data::DomainColumn> columns;
    for (std::size_t d = 0; d < dataset.n_domains(); ++d) columns.push_back(dataset.domain_column(d));

    Rng rng(derive_seed(seed, "shift-plan"));
    bool have_latent = false;
    Vector previous_latent(n);
    std::size_t domain_index = 0;
    for (const auto& shift : plan.domains) {
        ++domain_index;
        if (const auto* cat = std::get_if<CategoricalShift>(&shift)) {
            if (cat->ratios.size() != cat->instances.size())
                throw ConfigError("shift '" + cat->name + "': " + std::to_string(cat->ratios.size()) + " ratios for " +
                                  std::to_string(cat->instances.size()) + " instances");
            for (const auto& inst : cat->instances) {
                check_subset(inst.subset, x.cols(), "shift '" + cat->name + "'");
                if (inst.scale.size() != inst.subset.size() || inst.offset.size() != inst.subset.size())
                    throw ConfigError("shift '" + cat->name + "': scale/offset length must match subset");
                for (double a : inst.scale)
                    if (a == 0.0 || !std::isfinite(a)) throw ConfigError("shift '" + cat->name + "': scale entries must be nonzero");
            }
            const auto counts = proportional_counts(n, cat->ratios);
            std::vector<Index> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), Index{0});
            Rng assign(derive_seed(seed, "assign", domain_index));
            assign.shuffle(order);
            data::DomainColumn col;
            col.ids.assign(static_cast<std::size_t>(n), 0);
            std::size_t pos = 0;
            for (std::size_t e = 0; e < counts.size(); ++e) {
                const auto& inst = cat->instances[e];
                for (Index c = 0; c < counts[e]; ++c, ++pos) {
                    const Index r = order[pos];
                    col.ids[static_cast<std::size_t>(r)] = static_cast<int>(e);
                    for (std::size_t s = 0; s < inst.subset.size(); ++s) {
                        double& v = x(r, inst.subset[s]);
                        v = inst.scale[s] * v + inst.offset[s];
                    }
                }
            }
            data::DomainSpec spec;
            spec.name = cat->name;
            spec.kind = data::DomainKind::categorical;
            spec.n_instances = static_cast<int>(cat->instances.size());
            spec.instances = cat->instances;
            specs.push_back(std::move(spec));
            columns.push_back(std::move(col));
        } else {
            const auto& cont = std::get<ContinuousShift>(shift);
            check_subset(cont.subset, x.cols(), "shift '" + cont.name + "'");
            if (cont.response.size() != cont.subset.size())
                throw ConfigError("shift '" + cont.name + "': response length must match subset");
            Vector latent(n);
            const double rho = plan.covariate_correlation;
            for (Index i = 0; i < n; ++i) {
                const double e = rng.normal();
                latent(i) = have_latent ? rho * previous_latent(i) + std::sqrt(1.0 - rho * rho) * e : e;
            }
            previous_latent = latent;
            have_latent = true;

            data::DomainColumn col;
            col.values.resize(static_cast<std::size_t>(n));
            for (Index i = 0; i < n; ++i) {
                const double c = 0.5 * std::erfc(-latent(i) / std::numbers::sqrt2);
                col.values[static_cast<std::size_t>(i)] = c;
                for (std::size_t s = 0; s < cont.subset.size(); ++s) {
                    double& v = x(i, cont.subset[s]);
                    const double r = cont.response[s];
                    switch (cont.kind) {
                        case ResponseKind::translate: v += std::sin(2.0 * std::numbers::pi * c) * r; break;
                        case ResponseKind::scale: v *= 1.0 + c * r; break;
                        case ResponseKind::warp: v += c * r * std::tanh(v); break;
                    }
                }
            }
            data::DomainSpec spec;
            spec.name = cont.name;
            spec.kind = data::DomainKind::continuous;
            spec.n_bins = cont.n_bins;
            spec.binning = cont.binning;
            specs.push_back(std::move(spec));
            columns.push_back(std::move(col));
        }
    }

    data::Dataset out(std::move(x), dataset.feature_names(), dataset.tasks(), dataset.all_task_labels(), std::move(specs),
                      std::move(columns));
    out.set_provenance(dataset.provenance());
    return out;
}

}  // namespace disae::synth
