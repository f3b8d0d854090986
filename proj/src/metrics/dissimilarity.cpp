#include "disae/metrics/dissimilarity.hpp"

#include <algorithm>
#include <cmath>

namespace disae::metrics {

namespace {

void require_nonempty(std::span<const double> p, std::span<const double> q, const char* what) {
    if (p.empty() || q.empty()) throw ValidationError(std::string(what) + ": empty sample set");
}

std::vector<double> sorted_copy(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

std::string to_string(DissimilarityKind k) { return k == DissimilarityKind::jsd ? "jsd" : "wasserstein2"; }

DissimilarityKind parse_dissimilarity(const std::string& s) {
    if (s == "wasserstein2" || s == "w2") return DissimilarityKind::wasserstein2;
    if (s == "jsd") return DissimilarityKind::jsd;
    throw ConfigError("unknown dissimilarity '" + s + "' (expected w2 or jsd)");
}

void Dissimilarity::validate() const {
    if (bins < 2) throw ConfigError("jsd needs at least 2 bins");
    if (!(epsilon > 0.0)) throw ConfigError("jsd smoothing epsilon must be positive");
}

double Dissimilarity::operator()(std::span<const double> p, std::span<const double> q) const {
    return kind == DissimilarityKind::jsd ? jsd(p, q, bins, epsilon) : wasserstein2_1d(p, q);
}

double Dissimilarity::sorted(std::span<const double> p, std::span<const double> q) const {
    return kind == DissimilarityKind::jsd ? jsd(p, q, bins, epsilon) : wasserstein2_sorted(p, q);
}

nlohmann::json Dissimilarity::to_json() const {
    nlohmann::json j{{"kind", to_string(kind)}};
    if (kind == DissimilarityKind::jsd) {
        j["bins"] = bins;
        j["epsilon"] = epsilon;
        j["log_base"] = 2;
    }
    return j;
}

Dissimilarity Dissimilarity::from_json(const nlohmann::json& j) {
    Dissimilarity d;
    try {
        if (j.is_string()) {
            d.kind = parse_dissimilarity(j.get<std::string>());
        } else {
            d.kind = parse_dissimilarity(j.value("kind", std::string("wasserstein2")));
            d.bins = j.value("bins", d.bins);
            d.epsilon = j.value("epsilon", d.epsilon);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("dissimilarity: ") + e.what());
    }
    d.validate();
    return d;
}

double wasserstein2_1d(std::span<const double> p, std::span<const double> q) {
    require_nonempty(p, q, "wasserstein2");
    const auto sp = sorted_copy(p);
    const auto sq = sorted_copy(q);
    return wasserstein2_sorted(sp, sq);
}

double wasserstein2_sorted(std::span<const double> p, std::span<const double> q) {
    require_nonempty(p, q, "wasserstein2");
    const std::size_t n = p.size(), m = q.size();
    double acc = 0.0;
    if (n == m) {
        for (std::size_t i = 0; i < n; ++i) acc += (p[i] - q[i]) * (p[i] - q[i]);
        return std::sqrt(acc / static_cast<double>(n));
    }
    // Walk the merged breakpoints i/n and j/m; on each segment both quantile
    // functions are constant. Compare i*m with j*n to stay in integers.
    std::size_t i = 0, j = 0;
    std::uint64_t prev = 0;  // current position on the common grid 1/(n*m)
    while (i < n && j < m) {
        const std::uint64_t next_p = static_cast<std::uint64_t>(i + 1) * m;
        const std::uint64_t next_q = static_cast<std::uint64_t>(j + 1) * n;
        const std::uint64_t next = std::min(next_p, next_q);
        const double d = p[i] - q[j];
        acc += static_cast<double>(next - prev) * d * d;
        prev = next;
        if (next_p == next) ++i;
        if (next_q == next) ++j;
    }
    return std::sqrt(acc / (static_cast<double>(n) * static_cast<double>(m)));
}

double jsd_from_masses(std::span<const double> P, std::span<const double> Q, double epsilon) {
    if (P.size() != Q.size() || P.empty()) throw ShapeError("jsd: mass vectors must be non-empty and equal length");
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (P[i] < 0.0 || Q[i] < 0.0) throw ValidationError("jsd: negative mass");
        sp += P[i] + epsilon;
        sq += Q[i] + epsilon;
    }
    double d = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double a = (P[i] + epsilon) / sp;
        const double b = (Q[i] + epsilon) / sq;
        const double mid = 0.5 * (a + b);
        d += 0.5 * a * std::log2(a / mid) + 0.5 * b * std::log2(b / mid);
    }
    return std::clamp(d, 0.0, 1.0);
}

double jsd(std::span<const double> p, std::span<const double> q, int bins, double epsilon) {
    require_nonempty(p, q, "jsd");
    if (bins < 2) throw ConfigError("jsd needs at least 2 bins");
    double lo = p[0], hi = p[0];
    for (double v : p) lo = std::min(lo, v), hi = std::max(hi, v);
    for (double v : q) lo = std::min(lo, v), hi = std::max(hi, v);
    if (!(hi > lo)) return 0.0;  // every sample identical

    std::vector<double> P(static_cast<std::size_t>(bins), 0.0), Q(static_cast<std::size_t>(bins), 0.0);
    const double width = (hi - lo) / bins;
    auto bin_of = [&](double v) {
        const auto b = static_cast<int>((v - lo) / width);
        return static_cast<std::size_t>(std::clamp(b, 0, bins - 1));
    };
    for (double v : p) P[bin_of(v)] += 1.0 / static_cast<double>(p.size());
    for (double v : q) Q[bin_of(v)] += 1.0 / static_cast<double>(q.size());
    return jsd_from_masses(P, Q, epsilon);
}

}  // namespace disae::metrics
