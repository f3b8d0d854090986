#pragma once

#include "disae/core.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace disae::metrics {

enum class DissimilarityKind { wasserstein2, jsd };

std::string to_string(DissimilarityKind k);
DissimilarityKind parse_dissimilarity(const std::string& s);

struct Dissimilarity {
    DissimilarityKind kind = DissimilarityKind::wasserstein2;
    int bins = 50;          // jsd only
    double epsilon = 1e-12; // jsd smoothing

    void validate() const;
    double operator()(std::span<const double> p, std::span<const double> q) const;
    // Same value, for inputs already sorted ascending (avoids re-sorting).
    double sorted(std::span<const double> p, std::span<const double> q) const;
    nlohmann::json to_json() const;
    static Dissimilarity from_json(const nlohmann::json& j);
};

inline Dissimilarity wasserstein2() { return {}; }
inline Dissimilarity jensen_shannon(int bins = 50, double epsilon = 1e-12) {
    return {DissimilarityKind::jsd, bins, epsilon};
}

// Exact 1-D W2 between empirical distributions via quantile functions.
double wasserstein2_1d(std::span<const double> p, std::span<const double> q);
double wasserstein2_sorted(std::span<const double> p, std::span<const double> q);

// Histogram JSD in bits on the shared min-max range of p and q.
double jsd(std::span<const double> p, std::span<const double> q, int bins = 50, double epsilon = 1e-12);
// JSD (bits) between two probability vectors after epsilon smoothing.
double jsd_from_masses(std::span<const double> P, std::span<const double> Q, double epsilon = 1e-12);

}  // namespace disae::metrics
