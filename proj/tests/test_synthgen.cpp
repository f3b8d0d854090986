#include "support.hpp"

#include "disae/data/csv_io.hpp"
#include "disae/data/normalize.hpp"
#include "disae/harness/probe.hpp"
#include "disae/synth/generators.hpp"
#include "disae/synth/shift.hpp"
#include "disae/synth/standard.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace disae;
using namespace disae::synth;

namespace {

double positive_fraction(const std::vector<int>& labels) {
    return static_cast<double>(std::count(labels.begin(), labels.end(), 1)) / static_cast<double>(labels.size());
}

double probe_accuracy(const data::Dataset& fit, const data::Dataset& eval, std::uint64_t seed, int hidden = 32) {
    harness::ProbeConfig pc;
    pc.seed = seed;
    pc.hidden = hidden;
    const auto probe = harness::train_probe(fit.features(), fit.task_labels(0), 2, pc);
    return harness::evaluate_probe(probe, eval.features(), eval.task_labels(0)).overall;
}

CategoricalShift two_instances(data::AffineInstance second) {
    CategoricalShift cat;
    cat.name = "instance";
    data::AffineInstance identity{0, {0, 1}, {1.0, 1.0}, {0.0, 0.0}, 0};
    cat.instances = {identity, second};
    cat.ratios = {1, 1};
    return cat;
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("make_classification: 13000 balanced samples split 6500/6500") {
    GeneratorConfig c;
    c.seed = 3;
    const auto ds = make_classification(c);
    CHECK(ds.n_samples() == 13000);
    CHECK(std::count(ds.task_labels(0).begin(), ds.task_labels(0).end(), 1) == 6500);
}

TEST_CASE("make_classification: huge class_sep is linearly separable") {
    GeneratorConfig c;
    c.n_samples = 2000;
    c.class_sep = 100.0;
    c.n_clusters_per_class = 1;
    c.seed = 4;
    const auto ds = make_classification(c);
    const std::vector<Index> fit_rows = [] {
        std::vector<Index> r(1400);
        std::iota(r.begin(), r.end(), Index{0});
        return r;
    }();
    std::vector<Index> eval_rows(600);
    std::iota(eval_rows.begin(), eval_rows.end(), Index{1400});
    CHECK(probe_accuracy(ds.subset(fit_rows), ds.subset(eval_rows), 1) >= 0.99);
}

TEST_CASE("make_classification: invalid configs are errors") {
    GeneratorConfig c;
    c.n_informative = 0;
    CHECK_THROWS_AS(make_classification(c), ConfigError);
    GeneratorConfig d;
    d.n_samples = 3;
    d.task_ratios = {{1.0, 100.0}};
    CHECK_THROWS_AS(make_classification(d), ConfigError);
    GeneratorConfig e;
    e.n_informative = 7;
    e.n_redundant = 5;
    CHECK_THROWS_AS(make_classification(e), ConfigError);
}

TEST_CASE("make_classification: redundant block is a linear mix of the informative block") {
    GeneratorConfig c;
    c.n_samples = 200;
    c.seed = 9;
    const auto ds = make_classification(c);
    const auto& mix_json = ds.provenance().at("redundant_mix");
    Matrix mix(c.n_informative, c.n_redundant);
    for (int i = 0; i < c.n_informative; ++i)
        for (int j = 0; j < c.n_redundant; ++j) mix(i, j) = mix_json[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const Matrix predicted = ds.features().leftCols(c.n_informative) * mix;
    CHECK((predicted - ds.features().middleCols(c.n_informative, c.n_redundant)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("make_multilabel: 5:2 ratio gives positive fraction 5/7") {
    GeneratorConfig c;
    c.n_samples = 7000;
    c.n_tasks = 2;
    c.task_classes = {2, 2};
    c.task_ratios = {{2, 5}, {}};
    c.seed = 2;
    const auto ds = make_multilabel(c);
    CHECK(std::abs(positive_fraction(ds.task_labels(0)) - 5.0 / 7.0) < 0.02);
    CHECK(std::abs(positive_fraction(ds.task_labels(1)) - 0.5) < 0.02);
}

TEST_CASE("make_multilabel: orthogonal tasks are uncorrelated") {
    GeneratorConfig c;
    c.n_samples = 20000;
    c.n_tasks = 2;
    c.task_classes = {2, 2};
    c.seed = 12;
    const auto ds = make_multilabel(c);
    const auto& a = ds.task_labels(0);
    const auto& b = ds.task_labels(1);
    const double ma = positive_fraction(a), mb = positive_fraction(b);
    double cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma) * (b[i] - mb);
    cov /= static_cast<double>(a.size());
    const double corr = cov / std::sqrt(ma * (1 - ma) * mb * (1 - mb));
    CHECK(std::abs(corr) < 0.05);
    GeneratorConfig single = c;
    single.n_tasks = 1;
    single.task_classes = {2};
    CHECK_THROWS_AS(make_multilabel(single), ConfigError);
}

TEST_CASE("proportional_counts sums to n") {
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> r(1 + rng.below(8));
        for (auto& x : r) x = rng.uniform(0.1, 5.0);
        const Index n = static_cast<Index>(rng.below(10000));
        const auto counts = proportional_counts(n, r);
        CHECK(std::accumulate(counts.begin(), counts.end(), Index{0}) == n);
    }
    CHECK(proportional_counts(13000, {5, 5, 1, 1, 1}) == std::vector<Index>{5000, 5000, 1000, 1000, 1000});
}

TEST_CASE("apply_shift_plan: 5:5:1:1:1 over 13000 samples") {
    const auto ds = generate_standard(StandardDataset::A, 1);
    const auto& ids = ds.domain_labels(0);
    std::vector<int> counts(5);
    for (int id : ids) ++counts[static_cast<std::size_t>(id)];
    CHECK(counts == std::vector<int>{5000, 5000, 1000, 1000, 1000});
}

TEST_CASE("apply_shift_plan: identity instance leaves rows unchanged, offset 10 moves the mean") {
    const auto base = testing::toy_dataset(4000, 5, 2);
    ShiftPlan plan;
    plan.domains.emplace_back(two_instances({1, {0, 1}, {1.0, 1.0}, {10.0, 0.0}, 1}));
    const auto shifted = apply_shift_plan(base, plan, 3);
    const auto& ids = shifted.domain_labels(1);
    double moved = 0.0, base_mean = 0.0;
    int n1 = 0;
    for (Index i = 0; i < base.n_samples(); ++i) {
        if (ids[static_cast<std::size_t>(i)] == 0) {
            CHECK(shifted.features().row(i) == base.features().row(i));
        } else {
            moved += shifted.features()(i, 0);
            base_mean += base.features()(i, 0);
            ++n1;
        }
    }
    CHECK(std::abs((moved - base_mean) / n1 - 10.0) < 1e-9);
    CHECK(std::abs(moved / n1 - 10.0) < 0.15);
}

TEST_CASE("apply_shift_plan: ratio length mismatch and zero scale are errors") {
    const auto base = testing::toy_dataset(100, 5, 2);
    ShiftPlan plan;
    auto cat = two_instances({1, {0, 1}, {1.0, 1.0}, {1.0, 0.0}, 1});
    cat.ratios = {1, 1, 1};
    plan.domains.emplace_back(cat);
    CHECK_THROWS_AS(apply_shift_plan(base, plan, 0), ConfigError);
    ShiftPlan zero;
    zero.domains.emplace_back(two_instances({1, {0, 1}, {0.0, 1.0}, {1.0, 0.0}, 1}));
    CHECK_THROWS_AS(apply_shift_plan(base, zero, 0), ConfigError);
}

TEST_CASE("property: shifts never touch task labels") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto base = testing::toy_dataset(200 + static_cast<Index>(rng.below(200)), rng.next_u64(), 2);
        ShiftPlan plan;
        plan.domains.emplace_back(two_instances({1, {0, 1}, {rng.uniform(0.5, 2), rng.uniform(-2, -0.5)},
                                                 {rng.normal(), rng.normal()}, 1}));
        ContinuousShift cont;
        cont.name = "age";
        cont.kind = static_cast<ResponseKind>(rng.below(3));
        cont.subset = {2, 3};
        cont.response = {rng.normal(), rng.normal()};
        plan.domains.emplace_back(cont);
        const auto shifted = apply_shift_plan(base, plan, rng.next_u64());
        CHECK(shifted.all_task_labels() == base.all_task_labels());
        CHECK(shifted.features().allFinite());
        for (double c : shifted.domain_column(2).values) CHECK((c >= 0.0 && c <= 1.0));
    }
}

TEST_CASE("standard datasets have the declared structure") {
    const auto a = generate_standard(StandardDataset::A, 2);
    CHECK(a.n_tasks() == 1);
    CHECK(a.n_domains() == 1);
    CHECK(a.domains()[0].n_instances == 5);

    const auto b = generate_standard(StandardDataset::B, 2);
    CHECK(b.n_tasks() == 1);
    REQUIRE(b.n_domains() == 3);
    CHECK(b.domains()[1].kind == data::DomainKind::continuous);
    CHECK(b.domains()[2].kind == data::DomainKind::continuous);

    const auto c = generate_standard(StandardDataset::C, 2);
    CHECK(c.n_samples() == 26000);
    REQUIRE(c.n_tasks() == 3);
    CHECK(c.n_domains() == 3);
    CHECK(std::abs(positive_fraction(c.task_labels(0)) - 5.0 / 7.0) < 0.02);
    CHECK(std::abs(positive_fraction(c.task_labels(1)) - 0.5) < 0.02);
    CHECK(std::abs(positive_fraction(c.task_labels(2)) - 5.0 / 7.0) < 0.02);

    const auto m = generate_standard(StandardDataset::ManyAffines, 2, 7000);
    CHECK(m.n_samples() == 7000);
    CHECK(m.domains()[0].n_instances == 70);
    CHECK(generate_standard(StandardDataset::ManyAffines, 2).n_samples() == kManyAffinesDeskSize);
    CHECK(standard_generator_config(StandardDataset::ManyAffines, 0).n_samples == 50000);
}

TEST_CASE("standard names parse and unknown names fail") {
    CHECK(parse_standard_name("a") == StandardDataset::A);
    CHECK(parse_standard_name("ManyAffines") == StandardDataset::ManyAffines);
    CHECK(parse_standard_name("many-affines") == StandardDataset::ManyAffines);
    CHECK_THROWS_AS(parse_standard_name("D"), ConfigError);
}

TEST_CASE("same seed gives byte-identical files") {
    testing::TempDir dir("gen");
    data::save_dataset(generate_standard(StandardDataset::B, 5, 2000), dir / "x.csv");
    data::save_dataset(generate_standard(StandardDataset::B, 5, 2000), dir / "y.csv");
    CHECK(testing::slurp(dir / "x.csv") == testing::slurp(dir / "y.csv"));
    data::save_dataset(generate_standard(StandardDataset::B, 6, 2000), dir / "z.csv");
    CHECK(testing::slurp(dir / "x.csv") != testing::slurp(dir / "z.csv"));
}

TEST_CASE("distance rank orders instances by shift magnitude") {
    const auto m = generate_standard(StandardDataset::ManyAffines, 3, 1400);
    const auto& inst = m.domains()[0].instances;
    REQUIRE(inst.size() == 70);
    for (std::size_t i = 1; i < inst.size(); ++i) {
        CHECK(inst[i].distance_rank > inst[i - 1].distance_rank);
        CHECK(inst[i].shift_magnitude() > inst[i - 1].shift_magnitude());
    }
    const auto a = generate_standard(StandardDataset::A, 3, 1300);
    const auto& ai = a.domains()[0].instances;
    for (std::size_t i = 1; i < ai.size(); ++i) CHECK(ai[i].shift_magnitude() > ai[i - 1].shift_magnitude());
}

TEST_CASE("linear probe trained on instance 1 of dataset A degrades along the shared shift direction") {
    // Instances 1-4 move one redundant-block direction with growing magnitude;
    // instance 5 moves the informative block and is checked on its own.
    const auto raw = generate_standard(StandardDataset::A, 7);
    const auto inst = [&](int id) {
        const std::vector<int> ids{id};
        return raw.subset(raw.rows_with_domain(0, ids));
    };
    const auto source = inst(0);
    std::vector<Index> fit_rows(4000), held_rows(1000);
    std::iota(fit_rows.begin(), fit_rows.end(), Index{0});
    std::iota(held_rows.begin(), held_rows.end(), Index{4000});
    const auto fit = source.subset(fit_rows);
    std::vector<double> acc{probe_accuracy(fit, source.subset(held_rows), 1, 0)};
    for (int id = 1; id < 4; ++id) acc.push_back(probe_accuracy(fit, inst(id), 1, 0));
    for (std::size_t i = 1; i < acc.size(); ++i) CHECK(acc[i] <= acc[i - 1] + 0.03);
    CHECK(acc.back() < acc.front() - 0.1);
    CHECK(probe_accuracy(fit, inst(4), 1, 0) < acc.front() - 0.1);
}

}  // TEST_SUITE
