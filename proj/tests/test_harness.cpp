#include "disae/harness/experiment.hpp"
#include "disae/harness/probe.hpp"
#include "disae/harness/reports.hpp"
#include "disae/harness/robustness.hpp"
#include "disae/harness/sweep.hpp"
#include "disae/harness/workers.hpp"

#include "support.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>

using namespace disae;
using namespace disae::harness;

namespace {

model::DisAEConfig tiny_config() {
    model::DisAEConfig c;
    c.encoder_hidden = {8};
    c.latent_dim = 3;
    c.max_epochs = 10;
    c.batch_size = 64;
    c.lr = 3e-3;
    return c;
}

ExperimentPlan tiny_plan() {
    ExperimentPlan p;
    p.dataset = "toy";
    p.source_instances = {0, 1};
    p.target_sets = {{2}};
    p.k = 2;
    p.repeats = 1;
    p.models = {default_disae(tiny_config()), default_vanilla(tiny_config())};
    p.metric.min_cell = 3;
    p.score_floor = -10.0;
    p.metric.n_directions = 16;
    p.reliability.min_cell = 3;
    p.reliability.n_directions = 16;
    p.probe.epochs = 3;
    p.seed = 11;
    return p;
}

std::string reports_text(const ExperimentResult& r, const testing::TempDir& dir) {
    write_experiment_reports(r, dir.path());
    std::string all;
    for (const char* f : {"scores.csv", "runs.csv", "variation.csv", "probe.csv"}) all += testing::slurp(dir / f);
    return all;
}

// Toy with affine provenance so instances have distance ranks.
data::Dataset ranked_toy(Index n, int n_instances) {
    data::Dataset ds = testing::toy_dataset(n, 21, n_instances);
    auto domains = ds.domains();
    for (int e = 0; e < n_instances; ++e) {
        data::AffineInstance inst;
        inst.id = e;
        inst.subset = {2};
        inst.scale = {1.0};
        inst.offset = {3.0 * e};
        inst.distance_rank = e;
        domains[0].instances.push_back(inst);
    }
    std::vector<data::DomainColumn> cols{ds.domain_column(0)};
    return data::Dataset(ds.features(), ds.feature_names(), ds.tasks(), ds.all_task_labels(), domains, cols);
}

RobustnessCurve curve(std::vector<double> acc, bool failed_last = false) {
    RobustnessCurve c;
    c.points.push_back({true, -1, -1, 0.0, 1.0, false});
    for (std::size_t i = 0; i < acc.size(); ++i)
        c.points.push_back({false, static_cast<int>(i), static_cast<int>(i), 0.0, acc[i],
                            failed_last && i + 1 == acc.size()});
    return c;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("experiment smoke test on a 1200-sample toy") {
    const auto ds = testing::toy_dataset(1200, 1, 3);
    const auto plan = tiny_plan();
    const auto r = run_experiment(ds, plan);
    CHECK(r.runs.size() == 2 * 2 * 1);
    CHECK(r.folds.size() == 4);
    const auto summary = r.summary();
    REQUIRE(summary.size() == 2);
    CHECK(summary[0].model == "dis-ae");
    CHECK(summary[1].model == "vanilla-ae");
    for (const auto& s : summary) {
        CHECK(s.n_folds == 2);
        CHECK(std::abs(s.mean.score - (s.mean.accuracy - s.mean.variation - s.mean.reconstruction)) < 1e-9);
        CHECK(s.mean.score <= 1.0);
    }
    CHECK(r.summary_for("dis-ae").mean.accuracy > 0.5);
    CHECK_THROWS(r.summary_for("nope"));
    // raw, dis-ae, vanilla over source and one target, two rho, two folds.
    CHECK(!r.variation.empty());
    bool raw_ratio_one = true;
    for (const auto& v : r.variation)
        if (v.representation == "raw") raw_ratio_one = raw_ratio_one && v.ratio == 1.0;
    CHECK(raw_ratio_one);
    CHECK(!r.probe.empty());
}

TEST_CASE("experiment reports are byte-identical for the same seed") {
    const auto ds = testing::toy_dataset(1200, 2, 3);
    auto plan = tiny_plan();
    plan.models = {default_disae(tiny_config())};
    testing::TempDir a("rep-a"), b("rep-b");
    const std::string ta = reports_text(run_experiment(ds, plan), a);
    const std::string tb = reports_text(run_experiment(ds, plan), b);
    CHECK(ta == tb);
    CHECK(ta.find("dis-ae") != std::string::npos);
    CHECK(testing::slurp(a / "probe.csv").rfind("# probe:", 0) == 0);
}

TEST_CASE("plan validation and json round trip") {
    auto plan = tiny_plan();
    CHECK(ExperimentPlan::from_json(plan.to_json()).to_json() == plan.to_json());
    plan.k = 1;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan = tiny_plan();
    plan.models.push_back(plan.models[0]);
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan = tiny_plan();
    plan.source_instances = {0};
    plan.target_sets = {{0}};
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    CHECK(run_seed(1, 0, 0) != run_seed(1, 0, 1));
    CHECK(run_seed(1, 2, 3) == run_seed(1, 2, 3));
    CHECK(target_split_name({2, 3}) != target_split_name({2}));
}

TEST_CASE("sweep: a 2x2 grid gives 4 ranked rows; a single point equals the plain experiment") {
    const auto ds = testing::toy_dataset(1200, 3, 3);
    auto plan = tiny_plan();
    plan.evaluate_targets = false;
    SweepGrid grid;
    grid.lambda = {0.5, 2.0};
    grid.l2 = {0.0, 0.1};
    CHECK(grid.size() == 4);
    const auto res = sweep(ds, plan, default_disae(tiny_config()), grid);
    REQUIRE(res.rows.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(res.rows[i].rank == static_cast<int>(i) + 1);
    for (std::size_t i = 1; i < 4; ++i) CHECK(res.rows[i - 1].summary.mean.score >= res.rows[i].summary.mean.score);

    SweepGrid single;
    single.lambda = {tiny_config().lambda};
    const auto one = sweep(ds, plan, default_disae(tiny_config()), single);
    auto direct_plan = plan;
    direct_plan.models = {default_disae(tiny_config())};
    const auto direct = run_experiment(ds, direct_plan);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].summary.mean.score == direct.summary()[0].mean.score);

    SweepGrid bad;
    bad.alpha = {};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(SweepGrid::from_json(grid.to_json()).size() == 4);
}

TEST_CASE("instances are ordered by distance rank, id breaking ties") {
    data::DomainSpec d;
    d.n_instances = 4;
    for (int id : {0, 1, 2, 3}) {
        data::AffineInstance inst;
        inst.id = id;
        inst.distance_rank = id == 3 ? 0 : (id == 0 ? 2 : 1);
        d.instances.push_back(inst);
    }
    CHECK(instances_by_rank(d) == std::vector<int>{3, 1, 2, 0});
}

TEST_CASE("dominance fraction counts strict wins over shared ranks; failed points never win") {
    CHECK(dominance_fraction(curve({0.9, 0.8, 0.7}), curve({0.8, 0.8, 0.6})) == doctest::Approx(2.0 / 3.0));
    CHECK(dominance_fraction(curve({0.9, 0.9}), curve({0.8, 0.8})) == 1.0);
    CHECK(dominance_fraction(curve({0.9, 0.9}, true), curve({0.8, 0.8})) == 0.5);
    CHECK_THROWS_AS(dominance_fraction(curve({}), curve({0.5})), ValidationError);
}

TEST_CASE("robustness: every count gets a curve; using all instances leaves only the source point") {
    const auto ds = ranked_toy(600, 3);
    RobustnessPlan plan;
    plan.source_counts = {1, 3};
    plan.models = {default_disae(tiny_config())};
    plan.metric.min_cell = 5;
    plan.metric.n_directions = 8;
    plan.probe.epochs = 2;
    plan.seed = 4;
    const auto r = robustness_study(ds, plan);
    REQUIRE(r.curves.size() == 2);
    const auto& one = r.curve("dis-ae", 1);
    REQUIRE(one.points.size() == 3);
    CHECK(one.points[0].is_source);
    CHECK(std::isnan(one.points[0].v_sup));
    CHECK(one.points[1].target_rank == 1);
    CHECK(one.points[2].target_rank == 2);
    const auto& all = r.curve("dis-ae", 3);
    REQUIRE(all.points.size() == 1);
    CHECK(all.points[0].is_source);
    CHECK(all.points[0].accuracy > 0.0);
    plan.source_counts = {4};
    CHECK_THROWS_AS(robustness_study(ds, plan), ConfigError);
    CHECK(RobustnessPlan::from_json(plan.to_json()).to_json() == plan.to_json());
}

TEST_CASE("probe: perfectly informative features are learned exactly; bad input is rejected") {
    Rng rng(1);
    const Index n = 300;
    Matrix x(n, 3);
    std::vector<int> y;
    for (Index i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % 3);
        y.push_back(c);
        for (int j = 0; j < 3; ++j) x(i, j) = (j == c ? 1.0 : 0.0) + 0.01 * rng.normal();
    }
    ProbeConfig cfg;
    cfg.epochs = 60;
    const Probe p = train_probe(x, y, 3, cfg);
    const auto acc = evaluate_probe(p, x, y);
    CHECK(acc.overall == 1.0);
    CHECK(acc.n == n);
    CHECK(acc.per_class.size() == 3);

    cfg.hidden = 0;
    CHECK(evaluate_probe(train_probe(x, y, 3, cfg), x, y).overall == 1.0);

    const std::vector<int> one_class(static_cast<std::size_t>(n), 0);
    CHECK_THROWS_AS(train_probe(x, one_class, 3, cfg), ValidationError);
    cfg.hidden = -1;
    CHECK_THROWS_AS(train_probe(x, y, 3, cfg), ConfigError);

    // Classes missing from the evaluation set report NaN.
    const std::vector<Index> rows{0, 3, 6};
    const Matrix sub = x(rows, Eigen::placeholders::all);
    const std::vector<int> sub_y{0, 0, 0};
    const auto partial = evaluate_probe(p, sub, sub_y);
    CHECK(std::isnan(partial.per_class[1]));
}

TEST_CASE("parallel_for visits every index once and rethrows the lowest failing index") {
    for (int workers : {1, 3}) {
        std::vector<int> hits(50, 0);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
        try {
            parallel_for(20, workers, [](std::size_t i) {
                if (i == 7 || i == 13) throw Error("job " + std::to_string(i));
            });
            FAIL("expected an exception");
        } catch (const Error& e) {
            CHECK(std::string(e.what()) == "job 7");
        }
    }
    CHECK(resolve_workers(0) >= 1);
    CHECK(resolve_workers(3) == 3);
}

TEST_CASE("csv cells round trip doubles") {
    CHECK(cell(0.1) == "0.1");
    CHECK(cell(std::nan("")) == "nan");
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform(-10, 10));
        CHECK(std::stod(cell(v)) == v);
    }
}

}  // TEST_SUITE
