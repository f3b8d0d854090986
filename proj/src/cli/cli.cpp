#include "disae/cli/cli.hpp"

#include "disae/data/csv_io.hpp"
#include "disae/data/folds.hpp"
#include "disae/data/normalize.hpp"
#include "disae/harness/experiment.hpp"
#include "disae/harness/presets.hpp"
#include "disae/harness/reports.hpp"
#include "disae/harness/robustness.hpp"
#include "disae/harness/sweep.hpp"
#include "disae/metrics/score.hpp"
#include "disae/metrics/variation.hpp"
#include "disae/model/checkpoint.hpp"
#include "disae/model/trainer.hpp"
#include "disae/nn/losses.hpp"
#include "disae/random.hpp"
#include "disae/synth/standard.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;

namespace disae::cli {

namespace {

struct Common {
    std::string out;
    int workers = 1;
    std::uint64_t seed = 0;
    bool verbose = false;
};

struct DataArgs {
    std::string data;
    std::uint64_t data_seed = 7;
    Index scale = 0;  // 0: standard size
};

struct LoadedData {
    data::Dataset dataset;
    std::string name;
    std::optional<synth::StandardDataset> standard;
    nlohmann::json provenance;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "Output directory (default: $" + std::string(kOutputRootEnv) + "/<command>)");
    sub->add_option("--workers", c.workers, "Worker threads for independent jobs (0: one per core)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", c.seed, "Master seed");
    sub->add_flag("-v,--verbose", c.verbose, "Progress output");
}

void add_data(CLI::App* sub, DataArgs& d) {
    sub->add_option("--data", d.data, "Dataset CSV (with metadata sidecar) or standard name: A, B, C, many-affines");
    sub->add_option("--data-seed", d.data_seed, "Seed for generating a standard dataset");
    sub->add_option("--scale", d.scale, "Sample count override for a standard dataset")->check(CLI::NonNegativeNumber);
}

fs::path output_dir(const Common& c, const std::string& command) {
    if (!c.out.empty()) return c.out;
    const char* root = std::getenv(kOutputRootEnv);
    return fs::path(root && *root ? root : "disae-out") / command;
}

LoadedData load_data(const DataArgs& args) {
    if (args.data.empty()) throw ConfigError("--data is required (a CSV path or a standard dataset name)");
    LoadedData out;
    if (fs::exists(args.data)) {
        out.dataset = data::load_dataset(args.data);
        out.name = fs::path(args.data).stem().string();
        out.provenance = {{"path", args.data}};
        return out;
    }
    synth::StandardDataset which;
    try {
        which = synth::parse_standard_name(args.data);
    } catch (const ConfigError&) {
        throw ConfigError("data '" + args.data + "' is neither an existing file nor a standard dataset name");
    }
    out.standard = which;
    out.name = synth::standard_name(which);
    std::optional<Index> size;
    if (args.scale > 0) size = args.scale;
    out.dataset = synth::generate_standard(which, args.data_seed, size);
    out.provenance = {{"standard", out.name}, {"seed", args.data_seed}, {"samples", out.dataset.n_samples()}};
    return out;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

std::vector<int> parse_ids(const std::string& s) {
    std::vector<int> ids;
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        try {
            std::size_t used = 0;
            ids.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("expected a comma-separated integer list, got '" + s + "'");
        }
        tok.clear();
    };
    for (char c : s) {
        if (c == ',') flush();
        else if (c != ' ') tok.push_back(c);
    }
    flush();
    return ids;
}

std::size_t categorical_domain(const data::Dataset& ds, const std::string& name) {
    const auto d = ds.find_domain(name);
    if (!d || ds.domains()[*d].kind != data::DomainKind::categorical)
        throw ConfigError("dataset has no categorical domain '" + name + "'");
    return *d;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

model::DisAEConfig resolve_model_config(const std::string& config_path, const std::vector<std::string>& overrides,
                                        const LoadedData& data) {
    model::DisAEConfig base =
        data.standard ? harness::standard_model_config(*data.standard) : model::DisAEConfig{};
    nlohmann::json j = base.to_json();
    if (!config_path.empty()) j.update(read_json_file(config_path));
    apply_overrides(j, overrides);
    return model::DisAEConfig::from_json(j);
}

harness::ExperimentPlan default_plan(const LoadedData& data, const model::DisAEConfig& base, std::uint64_t seed) {
    if (data.standard && *data.standard != synth::StandardDataset::ManyAffines) {
        harness::ExperimentPlan p = harness::standard_plan(*data.standard, seed);
        p.models = harness::standard_models(base);
        return p;
    }
    harness::ExperimentPlan p;
    p.dataset = data.name;
    p.seed = seed;
    const auto d = data.dataset.find_domain(p.split_domain);
    if (d) {
        const int n = data.dataset.domains()[*d].cardinality();
        for (int i = 2; i < n; ++i) p.target_sets.push_back({i});
    }
    p.models = harness::standard_models(base);
    return p;
}

harness::ExperimentPlan resolve_plan(const std::string& plan_path, const std::vector<std::string>& overrides,
                                     const LoadedData& data, const model::DisAEConfig& base, const Common& c) {
    nlohmann::json j = default_plan(data, base, c.seed).to_json();
    if (!plan_path.empty()) {
        const nlohmann::json file = read_json_file(plan_path);
        for (auto it = file.begin(); it != file.end(); ++it) j[it.key()] = it.value();
    }
    apply_overrides(j, overrides);
    harness::ExperimentPlan p = harness::ExperimentPlan::from_json(j);
    p.dataset = data.name;
    p.workers = c.workers;
    p.validate();
    return p;
}

nlohmann::json manifest(const std::string& command, const LoadedData* data, const Common& c) {
    nlohmann::json m = harness::manifest_base(command);
    if (data) m["data"] = data->provenance;
    m["seed"] = c.seed;
    m["workers"] = c.workers;
    return m;
}

void print_summary(std::ostream& out, const harness::ExperimentResult& r) {
    for (const auto& s : r.summary())
        out << s.model << ": accuracy=" << harness::cell(s.mean.accuracy) << " variation=" << harness::cell(s.mean.variation)
            << " reconstruction=" << harness::cell(s.mean.reconstruction) << " score=" << harness::cell(s.mean.score)
            << " (std " << harness::cell(s.std.score) << ", failed runs " << s.failed_runs << ")\n";
}

std::string history_csv(const model::TrainHistory& h) {
    std::ostringstream o;
    o << "epoch,lr,train_total,train_relative_reconstruction,val_total,val_relative_reconstruction,val_task_accuracy,proxy,"
         "train_task_accuracy,train_domain_accuracy,selected\n";
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + harness::cell(v[i]);
        return s;
    };
    for (std::size_t i = 0; i < h.epochs.size(); ++i) {
        const auto& e = h.epochs[i];
        o << e.epoch << ',' << harness::cell(e.lr) << ',' << harness::cell(e.train_total) << ','
          << harness::cell(e.train_relative_reconstruction) << ',' << harness::cell(e.val_total) << ','
          << harness::cell(e.val_relative_reconstruction) << ',' << harness::cell(e.val_task_accuracy) << ','
          << harness::cell(e.proxy) << ',' << list(e.train_task_accuracy) << ',' << list(e.train_domain_accuracy) << ','
          << (static_cast<int>(i) == h.best_epoch ? 1 : 0) << '\n';
    }
    return o.str();
}

// ---- subcommands ---------------------------------------------------------

struct GenArgs {
    std::string name;
    std::string config;
};

int cmd_gen(const GenArgs& g, const DataArgs& d, const Common& c, std::ostream& out) {
    data::Dataset ds;
    std::string stem;
    if (!g.config.empty()) {
        const auto gc = synth::GeneratorConfig::from_json(read_json_file(g.config));
        ds = gc.n_tasks > 1 ? synth::make_multilabel(gc) : synth::make_classification(gc);
        stem = fs::path(g.config).stem().string();
    } else {
        if (g.name.empty()) throw ConfigError("gen-data needs a dataset name or --config");
        const auto which = synth::parse_standard_name(g.name);
        std::optional<Index> size;
        if (d.scale > 0) size = d.scale;
        ds = synth::generate_standard(which, c.seed, size);
        stem = synth::standard_name(which);
    }
    const fs::path dir = output_dir(c, "gen-data");
    const fs::path csv = dir / (stem + ".csv");
    data::save_dataset(ds, csv);
    out << "wrote " << csv.string() << " and " << data::metadata_path_for(csv).string() << " (" << ds.n_samples()
        << " rows)\n";
    return kExitOk;
}

struct TrainArgs {
    std::string config;
    std::vector<std::string> overrides;
    bool vanilla = false;
    std::string source;
    std::string domain = "instance";
};

int cmd_train(const TrainArgs& t, const DataArgs& d, const Common& c, std::ostream& out) {
    const LoadedData data = load_data(d);
    model::DisAEConfig config = resolve_model_config(t.config, t.overrides, data);
    config.seed = c.seed;

    std::vector<Index> rows = data::all_rows(data.dataset.n_samples());
    if (!t.source.empty()) {
        const auto ids = parse_ids(t.source);
        rows = data.dataset.rows_with_domain(categorical_domain(data.dataset, t.domain), ids);
        if (rows.empty()) throw ValidationError("no rows belong to the requested source instances");
    }
    config = t.vanilla ? model::make_vanilla_ae(config) : model::with_heads_for(config, data.dataset);
    config.validate();

    const model::TrainedModel tm = model::train_on_rows(data.dataset, rows, config);
    const fs::path dir = output_dir(c, "train");
    fs::create_directories(dir);
    model::Checkpoint ckpt{tm, {{"data", data.provenance}, {"source", t.source}, {"domain", t.domain}}};
    model::save_checkpoint(ckpt, dir / "model.ckpt");
    write_text(dir / "history.csv", history_csv(tm.history));

    nlohmann::json m = manifest("train", &data, c);
    m["config"] = config.to_json();
    m["source"] = t.source;
    m["vanilla"] = t.vanilla;
    harness::write_manifest(m, dir);

    const auto& e = tm.history.selected();
    out << (t.vanilla ? "vanilla AE" : "Dis-AE") << " trained for " << tm.history.epochs.size() << " epochs; selected epoch "
        << e.epoch << " (val task accuracy " << harness::cell(e.val_task_accuracy) << ", val relative reconstruction "
        << harness::cell(e.val_relative_reconstruction) << ")\n"
        << "checkpoint: " << (dir / "model.ckpt").string() << '\n';
    return kExitOk;
}

struct ModelDataArgs {
    std::string checkpoint;
    std::string instances;
    std::string domain = "instance";
    std::string rho = "w2";
};

struct Evaluated {
    model::Checkpoint ckpt;
    LoadedData data;
    data::Dataset normalized;
};

Evaluated load_for_eval(const ModelDataArgs& a, const DataArgs& d) {
    if (a.checkpoint.empty()) throw ConfigError("--checkpoint is required");
    if (!fs::exists(a.checkpoint)) throw ConfigError("checkpoint " + a.checkpoint + " does not exist");
    Evaluated e{model::load_checkpoint(a.checkpoint), load_data(d), {}};
    data::Dataset ds = e.data.dataset;
    if (!a.instances.empty()) {
        const auto ids = parse_ids(a.instances);
        ds = ds.subset(ds.rows_with_domain(categorical_domain(ds, a.domain), ids));
    }
    if (ds.n_features() != e.ckpt.trained.model.n_features())
        throw ConfigError("checkpoint expects " + std::to_string(e.ckpt.trained.model.n_features()) + " features, data has " +
                          std::to_string(ds.n_features()));
    e.ckpt.trained.model.config().check_compatible(ds);
    e.normalized = data::normalize(ds, e.ckpt.trained.norm).first;
    return e;
}

// Task accuracy of a model without heads: probe on a stratified 70/30 split.
std::vector<double> probe_accuracy(const model::DisAEModel& m, const data::Dataset& ds, std::uint64_t seed) {
    std::vector<double> acc;
    for (std::size_t t = 0; t < ds.n_tasks(); ++t) {
        auto [fit_rows, eval_rows] = data::stratified_holdout(ds.task_labels(t), data::all_rows(ds.n_samples()), 0.3,
                                                              derive_seed(seed, "score-probe", t));
        const auto fit = ds.subset(fit_rows);
        const auto ev = ds.subset(eval_rows);
        harness::ProbeConfig pc;
        pc.seed = derive_seed(seed, "probe", t);
        const auto probe = harness::train_probe(m.encode(fit.features()), fit.task_labels(t), ds.tasks()[t].n_classes, pc);
        acc.push_back(harness::evaluate_probe(probe, m.encode(ev.features()), ev.task_labels(t)).overall);
    }
    return acc;
}

int cmd_score(const ModelDataArgs& a, const DataArgs& d, const Common& c, std::ostream& out) {
    const Evaluated e = load_for_eval(a, d);
    const auto& model = e.ckpt.trained.model;
    metrics::VariationConfig vc;
    vc.rho.kind = metrics::parse_dissimilarity(a.rho);
    vc.seed = c.seed;
    const auto labels = metrics::VariationLabels::from(e.normalized);
    const double raw = metrics::model_variation(e.normalized.features(), labels, vc).v_sup;
    std::optional<std::vector<double>> acc;
    if (model.config().task_heads.empty()) acc = probe_accuracy(model, e.normalized, c.seed);
    const auto report = metrics::selection_score(model, e.normalized, labels, vc, raw, acc);
    out << "accuracy " << harness::cell(report.accuracy) << "\nvariation " << harness::cell(report.variation)
        << "\nreconstruction " << harness::cell(report.reconstruction) << "\nscore " << harness::cell(report.score) << '\n';

    const fs::path dir = output_dir(c, "score");
    fs::create_directories(dir);
    write_text(dir / "score.json", report.to_json().dump(2) + "\n");
    nlohmann::json m = manifest("score", &e.data, c);
    m["checkpoint"] = a.checkpoint;
    m["metric"] = vc.to_json();
    m["instances"] = a.instances;
    m["accuracy_source"] = acc ? "probe (70/30 split)" : "task heads";
    harness::write_manifest(m, dir);
    return kExitOk;
}

int cmd_eval(const ModelDataArgs& a, const DataArgs& d, const Common& c, std::ostream& out) {
    const Evaluated e = load_for_eval(a, d);
    const auto& model = e.ckpt.trained.model;
    const data::Dataset& ds = e.normalized;
    nlohmann::json report;
    report["relative_reconstruction"] = model::relative_reconstruction_error(ds.features(), model.reconstruct(ds.features()));

    // Per-instance task accuracy from the heads.
    if (!model.config().task_heads.empty()) {
        if (const auto d_idx = ds.find_domain(a.domain)) {
            nlohmann::json per = nlohmann::json::array();
            const auto& col = ds.domain_labels(*d_idx);
            const std::set<int> present(col.begin(), col.end());
            for (int inst : present) {
                const std::vector<int> one{inst};
                const auto sub = ds.subset(ds.rows_with_domain(*d_idx, one));
                const auto pred = model.predict_tasks(sub.features());
                std::vector<double> acc;
                for (std::size_t t = 0; t < pred.size(); ++t) acc.push_back(nn::accuracy(pred[t], sub.task_labels(t)));
                per.push_back({{"instance", inst}, {"rows", sub.n_samples()}, {"task_accuracy", acc}});
                out << a.domain << ' ' << inst << ": accuracy";
                for (double v : acc) out << ' ' << harness::cell(v);
                out << '\n';
            }
            report["per_instance"] = per;
        }
    }
    // Per-domain V^sup of raw data and latent under both dissimilarities.
    const Matrix z = model.encode(ds.features());
    const auto labels = metrics::VariationLabels::from(ds);
    nlohmann::json var = nlohmann::json::array();
    for (const auto& rho : {metrics::wasserstein2(), metrics::jensen_shannon()}) {
        metrics::VariationConfig vc;
        vc.rho = rho;
        vc.seed = c.seed;
        for (std::size_t dd = 0; dd < ds.n_domains(); ++dd) {
            const auto l = labels.only_domain(dd);
            const std::set<int> present(l.domains[0].begin(), l.domains[0].end());
            if (present.size() < 2) continue;
            const double vr = metrics::model_variation(ds.features(), l, vc).v_sup;
            const double vz = metrics::model_variation(z, l, vc).v_sup;
            var.push_back({{"domain", labels.domain_names[dd]}, {"rho", to_string(rho.kind)}, {"raw", vr}, {"latent", vz}});
            out << "V^sup " << to_string(rho.kind) << ' ' << labels.domain_names[dd] << ": raw " << harness::cell(vr)
                << " latent " << harness::cell(vz) << '\n';
        }
    }
    report["variation"] = var;
    const fs::path dir = output_dir(c, "eval");
    fs::create_directories(dir);
    write_text(dir / "eval.json", report.dump(2) + "\n");
    nlohmann::json m = manifest("eval", &e.data, c);
    m["checkpoint"] = a.checkpoint;
    m["instances"] = a.instances;
    harness::write_manifest(m, dir);
    return kExitOk;
}

int cmd_export(const ModelDataArgs& a, const DataArgs& d, const Common& c, std::ostream& out) {
    const Evaluated e = load_for_eval(a, d);
    const auto& ds = e.normalized;
    const Matrix z = e.ckpt.trained.model.encode(ds.features());
    fs::path path = output_dir(c, "export-latent");
    if (path.extension() != ".csv") path /= "latent.csv";
    std::ostringstream o;
    for (Index j = 0; j < z.cols(); ++j) o << (j ? "," : "") << 'z' << j;
    for (const auto& t : ds.tasks()) o << ",task:" << t.name;
    for (const auto& dom : ds.domains()) o << ",domain:" << dom.name;
    o << '\n';
    for (Index i = 0; i < z.rows(); ++i) {
        for (Index j = 0; j < z.cols(); ++j) o << (j ? "," : "") << data::format_double(z(i, j));
        for (std::size_t t = 0; t < ds.n_tasks(); ++t) o << ',' << ds.task_labels(t)[static_cast<std::size_t>(i)];
        for (std::size_t dd = 0; dd < ds.n_domains(); ++dd) o << ',' << ds.domain_labels(dd)[static_cast<std::size_t>(i)];
        o << '\n';
    }
    write_text(path, o.str());
    nlohmann::json m = manifest("export-latent", &e.data, c);
    m["checkpoint"] = a.checkpoint;
    m["instances"] = a.instances;
    m["latent_dim"] = z.cols();
    harness::write_manifest(m, path.parent_path());
    out << "wrote " << z.rows() << " x " << z.cols() << " latent to " << path.string() << '\n';
    return kExitOk;
}

struct PlanArgs {
    std::string plan;
    std::string config;
    std::vector<std::string> overrides;
    bool save_models = false;
};

int cmd_experiment(const PlanArgs& p, const DataArgs& d, const Common& c, std::ostream& out) {
    const LoadedData data = load_data(d);
    const model::DisAEConfig base = resolve_model_config(p.config, {}, data);
    const harness::ExperimentPlan plan = resolve_plan(p.plan, p.overrides, data, base, c);
    const harness::ExperimentResult result = harness::run_experiment(data.dataset, plan);
    const fs::path dir = output_dir(c, "experiment");
    harness::write_experiment_reports(result, dir);
    if (p.save_models)
        for (const auto& f : result.folds)
            model::save_checkpoint({f.winner, {{"fold", f.fold}, {"repeat", f.selected_repeat}}},
                                   dir / "models" / (f.model + "-fold" + std::to_string(f.fold) + ".ckpt"));
    nlohmann::json m = manifest("experiment", &data, c);
    m["plan"] = plan.to_json();
    harness::write_manifest(m, dir);
    print_summary(out, result);
    out << "reports in " << dir.string() << '\n';
    return kExitOk;
}

struct SweepArgs {
    PlanArgs plan;
    std::string grid;
    std::vector<double> alpha, beta, lambda, l2, lr;
};

int cmd_sweep(const SweepArgs& s, const DataArgs& d, const Common& c, std::ostream& out) {
    const LoadedData data = load_data(d);
    const model::DisAEConfig base = resolve_model_config(s.plan.config, {}, data);
    harness::ExperimentPlan plan = resolve_plan(s.plan.plan, s.plan.overrides, data, base, c);
    plan.evaluate_targets = false;
    harness::SweepGrid grid;
    if (!s.grid.empty()) grid = harness::SweepGrid::from_json(read_json_file(s.grid));
    if (!s.alpha.empty()) grid.alpha = s.alpha;
    if (!s.beta.empty()) grid.beta = s.beta;
    if (!s.lambda.empty()) grid.lambda = s.lambda;
    if (!s.l2.empty()) grid.l2 = s.l2;
    if (!s.lr.empty()) grid.lr = s.lr;
    grid.validate();
    const harness::ModelSpec base_spec = plan.models.front();
    const harness::SweepResult result = harness::sweep(data.dataset, plan, base_spec, grid);
    const fs::path dir = output_dir(c, "sweep");
    harness::write_sweep_csv(result, dir / "sweep.csv");
    harness::write_experiment_reports(result.experiment, dir);
    nlohmann::json m = manifest("sweep", &data, c);
    m["plan"] = result.experiment.plan.to_json();
    m["grid"] = grid.to_json();
    harness::write_manifest(m, dir);
    for (const auto& r : result.rows)
        out << r.rank << ". " << r.name << " score=" << harness::cell(r.summary.mean.score) << '\n';
    return kExitOk;
}

struct RobustArgs {
    std::string plan;
    std::string config;
    std::vector<std::string> overrides;
    std::string counts;
};

int cmd_robustness(const RobustArgs& r, const DataArgs& d, const Common& c, std::ostream& out) {
    const LoadedData data = load_data(d);
    const model::DisAEConfig base = resolve_model_config(r.config, {}, data);
    harness::RobustnessPlan defaults = harness::standard_robustness_plan(c.seed);
    defaults.models = harness::standard_models(base);
    nlohmann::json j = defaults.to_json();
    if (!r.plan.empty()) {
        const nlohmann::json file = read_json_file(r.plan);
        for (auto it = file.begin(); it != file.end(); ++it) j[it.key()] = it.value();
    }
    apply_overrides(j, r.overrides);
    harness::RobustnessPlan plan = harness::RobustnessPlan::from_json(j);
    if (!r.counts.empty()) plan.source_counts = parse_ids(r.counts);
    plan.dataset = data.name;
    plan.workers = c.workers;
    const harness::RobustnessResult result = harness::robustness_study(data.dataset, plan);
    const fs::path dir = output_dir(c, "robustness");
    harness::write_robustness_csv(result, dir / "robustness.csv");
    nlohmann::json m = manifest("robustness", &data, c);
    m["plan"] = plan.to_json();
    harness::write_manifest(m, dir);
    const int lo = *std::min_element(plan.source_counts.begin(), plan.source_counts.end());
    const int hi = *std::max_element(plan.source_counts.begin(), plan.source_counts.end());
    for (const auto& spec : plan.models) {
        try {
            const double f = harness::dominance_fraction(result.curve(spec.name, hi), result.curve(spec.name, lo));
            out << spec.name << ": " << hi << "-source curve more accurate than " << lo << "-source curve on "
                << harness::cell(f) << " of shared target ranks\n";
        } catch (const ValidationError&) {
            out << spec.name << ": curves share no target rank\n";
        }
    }
    out << "grid in " << (dir / "robustness.csv").string() << '\n';
    return kExitOk;
}

}  // namespace

void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not of the form key=value");
        const std::string key = o.substr(0, eq);
        const std::string text = o.substr(eq + 1);
        nlohmann::json* node = &doc;
        std::size_t start = 0;
        while (true) {
            const auto dot = key.find('.', start);
            const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (node->is_object() && node->contains(part)) {
                node = &(*node)[part];
            } else if (node->is_array() && !part.empty() && part.find_first_not_of("0123456789") == std::string::npos &&
                       std::stoul(part) < node->size()) {
                node = &(*node)[std::stoul(part)];
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception&) {
            value = text;
        }
        const bool both_numbers = node->is_number() && value.is_number();
        if (!node->is_null() && !both_numbers && node->type() != value.type())
            throw ConfigError("override '" + key + "': expected " + std::string(node->type_name()) + ", got " +
                              value.type_name());
        *node = value;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Disentangling autoencoder toolkit: data generation, training, metrics and experiments", "disae"};
    app.require_subcommand(1);

    Common common;
    DataArgs data_args;

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a standard synthetic dataset (CSV + metadata)");
    gen_cmd->add_option("name", gen.name, "A, B, C or many-affines");
    gen_cmd->add_option("--config", gen.config, "Generator config JSON instead of a standard name");
    gen_cmd->add_option("--scale", data_args.scale, "Sample count override")->check(CLI::NonNegativeNumber);
    add_common(gen_cmd, common);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a Dis-AE (or vanilla AE) and write a checkpoint");
    add_data(train_cmd, data_args);
    train_cmd->add_option("--config", train.config, "Model config JSON");
    train_cmd->add_option("--set", train.overrides, "Config override key=value (repeatable)");
    train_cmd->add_flag("--vanilla", train.vanilla, "Train the vanilla autoencoder (no heads)");
    train_cmd->add_option("--source", train.source, "Comma-separated source instances (default: all rows)");
    train_cmd->add_option("--domain", train.domain, "Domain whose instances --source selects");
    add_common(train_cmd, common);

    ModelDataArgs md;
    auto add_model_data = [&](CLI::App* sub) {
        add_data(sub, data_args);
        sub->add_option("--checkpoint", md.checkpoint, "Checkpoint written by train");
        sub->add_option("--instances", md.instances, "Restrict to these instances (comma-separated)");
        sub->add_option("--domain", md.domain, "Domain whose instances --instances selects");
        add_common(sub, common);
    };
    auto* eval_cmd = app.add_subcommand("eval", "Per-instance accuracy and per-domain variation of a checkpoint");
    add_model_data(eval_cmd);
    auto* score_cmd = app.add_subcommand("score", "Selection score terms of a checkpoint on a dataset");
    add_model_data(score_cmd);
    score_cmd->add_option("--rho", md.rho, "Dissimilarity: w2 or jsd");
    auto* export_cmd = app.add_subcommand("export-latent", "Write the latent representation with labels as CSV");
    add_model_data(export_cmd);

    PlanArgs plan;
    auto add_plan = [&](CLI::App* sub, PlanArgs& p) {
        add_data(sub, data_args);
        sub->add_option("--plan", p.plan, "Experiment plan JSON");
        sub->add_option("--config", p.config, "Base model config JSON");
        sub->add_option("--set", p.overrides, "Plan override key=value (repeatable), e.g. repeats=2");
        add_common(sub, common);
    };
    auto* exp_cmd = app.add_subcommand("experiment", "Cross-validated comparison with repeat selection and reports");
    add_plan(exp_cmd, plan);
    exp_cmd->add_flag("--save-models", plan.save_models, "Also write the per-fold winning checkpoints");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid search over alpha, beta, lambda, l2 and lr");
    add_plan(sweep_cmd, sweep.plan);
    sweep_cmd->add_option("--grid", sweep.grid, "Grid JSON");
    sweep_cmd->add_option("--alpha", sweep.alpha, "Candidate alphas")->delimiter(',');
    sweep_cmd->add_option("--beta", sweep.beta, "Candidate betas")->delimiter(',');
    sweep_cmd->add_option("--lambda", sweep.lambda, "Candidate lambdas")->delimiter(',');
    sweep_cmd->add_option("--l2", sweep.l2, "Candidate l2 values")->delimiter(',');
    sweep_cmd->add_option("--lr", sweep.lr, "Candidate learning rates")->delimiter(',');

    RobustArgs robust;
    auto* robust_cmd = app.add_subcommand("robustness", "Accuracy and variation against target distance per source count");
    add_data(robust_cmd, data_args);
    robust_cmd->add_option("--plan", robust.plan, "Robustness plan JSON");
    robust_cmd->add_option("--config", robust.config, "Base model config JSON");
    robust_cmd->add_option("--set", robust.overrides, "Plan override key=value (repeatable)");
    robust_cmd->add_option("--counts", robust.counts, "Comma-separated source counts");
    add_common(robust_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, data_args, common, out);
        if (train_cmd->parsed()) return cmd_train(train, data_args, common, out);
        if (eval_cmd->parsed()) return cmd_eval(md, data_args, common, out);
        if (score_cmd->parsed()) return cmd_score(md, data_args, common, out);
        if (export_cmd->parsed()) return cmd_export(md, data_args, common, out);
        if (exp_cmd->parsed()) return cmd_experiment(plan, data_args, common, out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep, data_args, common, out);
        if (robust_cmd->parsed()) return cmd_robustness(robust, data_args, common, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"disae"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace disae::cli
