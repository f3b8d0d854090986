#pragma once

// Independent oracles for the 1-D dissimilarities.

#include "disae/metrics/dissimilarity.hpp"
#include "disae/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace testing {

// min over all bijections of sqrt(mean (p_i - q_s(i))^2).
inline double brute_force_w2(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<std::size_t> perm(q.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[perm[i]]) * (p[i] - q[perm[i]]);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::sqrt(best / static_cast<double>(p.size()));
}

inline std::vector<double> random_sample(disae::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    // Mix of continuous values and ties.
    const bool ties = rng.below(4) == 0;
    for (auto& x : v) x = ties ? static_cast<double>(rng.below(3)) : rng.uniform(-5.0, 5.0);
    return v;
}

struct OracleResult {
    int cases = 0;
    int failures = 0;
    double worst = 0.0;
    std::string first_failure;

    void record(bool ok, double err, const std::string& what) {
        ++cases;
        worst = std::max(worst, err);
        if (!ok && failures++ == 0) first_failure = what;
    }
    bool passed() const { return failures == 0; }
};

inline OracleResult w2_brute_force_suite(std::uint64_t seed, int cases = 1000) {
    disae::Rng rng(seed);
    OracleResult r;
    for (int c = 0; c < cases; ++c) {
        const std::size_t n = 1 + rng.below(6);
        const auto p = random_sample(rng, n), q = random_sample(rng, n);
        const double err = std::abs(disae::metrics::wasserstein2_1d(p, q) - brute_force_w2(p, q));
        r.record(err <= 1e-9, err, "w2 brute force case " + std::to_string(c));
    }
    return r;
}

// Axioms and bounds for W2 and the histogram JSD on random sample sets.
inline OracleResult metric_property_suite(std::uint64_t seed, int cases = 10000) {
    using namespace disae::metrics;
    disae::Rng rng(seed);
    OracleResult r;
    for (int c = 0; c < cases; ++c) {
        const std::string tag = "property case " + std::to_string(c);
        auto p = random_sample(rng, 1 + rng.below(12));
        auto q = random_sample(rng, 1 + rng.below(12));
        auto s = random_sample(rng, 1 + rng.below(12));
        const double pq = wasserstein2_1d(p, q), qp = wasserstein2_1d(q, p);
        const double ps = wasserstein2_1d(p, s), sq = wasserstein2_1d(s, q);
        r.record(pq >= 0.0, 0.0, tag + ": w2 negative");
        r.record(std::abs(pq - qp) <= 1e-12, std::abs(pq - qp), tag + ": w2 asymmetric");
        r.record(pq <= ps + sq + 1e-9, 0.0, tag + ": w2 triangle");
        auto shuffled = p;
        std::reverse(shuffled.begin(), shuffled.end());
        r.record(wasserstein2_1d(p, shuffled) == 0.0, 0.0, tag + ": w2 not zero on equal multisets");
        auto sp = p, sq2 = q;
        std::sort(sp.begin(), sp.end());
        std::sort(sq2.begin(), sq2.end());
        if (sp.size() == sq2.size() && sp != sq2) r.record(pq > 0.0, 0.0, tag + ": w2 zero on distinct multisets");

        const int bins = 2 + static_cast<int>(rng.below(60));
        const double j = jsd(p, q, bins), jr = jsd(q, p, bins);
        r.record(j >= 0.0 && j <= 1.0 + 1e-12, 0.0, tag + ": jsd out of [0,1]");
        r.record(std::abs(j - jr) <= 1e-12, std::abs(j - jr), tag + ": jsd asymmetric");
        r.record(jsd(p, p, bins) <= 1e-12, 0.0, tag + ": jsd(p,p) nonzero");
    }
    return r;
}

// The hand-computed case: M = [0.75, 0.25],
// KL(P||M) = 0.5 log2(0.5/0.75) + 0.5 log2(0.5/0.25), KL(Q||M) = log2(1/0.75).
inline double jsd_hand_case_reference() {
    const double kl_p = 0.5 * std::log2(0.5 / 0.75) + 0.5 * std::log2(0.5 / 0.25);
    const double kl_q = std::log2(1.0 / 0.75);
    return 0.5 * (kl_p + kl_q);
}

}  // namespace testing
