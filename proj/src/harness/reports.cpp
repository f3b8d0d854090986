#include "disae/harness/reports.hpp"

#include "disae/data/csv_io.hpp"
#include "disae/model/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace disae::harness {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::string joined(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + cell(v[i]);
    return s;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    int n = 0;
    for (double x : v)
        if (!std::isnan(x)) {
            s += x;
            ++n;
        }
    return n ? s / n : std::nan("");
}

double std_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    int n = 0;
    for (double x : v)
        if (!std::isnan(x)) {
            s += (x - m) * (x - m);
            ++n;
        }
    return n > 1 ? std::sqrt(s / (n - 1)) : 0.0;
}

}  // namespace

std::string cell(double v) { return std::isnan(v) ? "nan" : data::format_double(v); }

void write_scores_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "dataset,model,fold,accuracy,variation,reconstruction,score,task_accuracy,v_sup_latent,v_sup_raw,"
           "selected_repeat,selection_score,failed_repeats\n";
    const std::string& ds = result.plan.dataset;
    for (const auto& m : result.plan.models) {
        for (const auto& f : result.folds) {
            if (f.model != m.name) continue;
            const auto& t = f.test;
            out << ds << ',' << m.name << ',' << f.fold << ',' << cell(t.accuracy) << ',' << cell(t.variation) << ','
                << cell(t.reconstruction) << ',' << cell(t.score) << ',' << joined(t.task_accuracy) << ','
                << cell(t.v_sup_latent) << ',' << cell(t.v_sup_raw) << ',' << f.selected_repeat << ','
                << cell(f.selection_score) << ',' << f.failed_repeats << '\n';
        }
        const ScoreSummary s = result.summary_for(m.name);
        for (const auto* row : {&s.mean, &s.std}) {
            out << ds << ',' << m.name << ',' << (row == &s.mean ? "mean" : "std") << ',' << cell(row->accuracy) << ','
                << cell(row->variation) << ',' << cell(row->reconstruction) << ',' << cell(row->score) << ','
                << joined(row->task_accuracy) << ",,,,," << s.failed_runs << '\n';
        }
    }
}

void write_runs_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "model,fold,repeat,seed,status,best_epoch,accuracy,variation,reconstruction,score,message\n";
    for (const auto& r : result.runs) {
        std::string msg = r.message;
        for (char& c : msg)
            if (c == ',' || c == '\n' || c == '"') c = ' ';
        const bool ok = r.status == RunStatus::ok || r.status == RunStatus::below_floor;
        out << r.model << ',' << r.fold << ',' << r.repeat << ',' << r.seed << ',' << to_string(r.status) << ','
            << r.best_epoch << ',';
        if (ok)
            out << cell(r.validation.accuracy) << ',' << cell(r.validation.variation) << ','
                << cell(r.validation.reconstruction) << ',' << cell(r.validation.score);
        else
            out << ",,,";
        out << ',' << msg << '\n';
    }
}

void write_variation_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "dataset,representation,domain,split,rho,v_sup_mean,v_sup_std,ratio_mean,ratio_std,n_folds\n";
    // Keep first-seen order of (representation, domain, split, rho).
    std::vector<std::tuple<std::string, std::string, std::string, std::string>> keys;
    std::map<std::tuple<std::string, std::string, std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>>
        values;
    for (const auto& r : result.variation) {
        auto key = std::make_tuple(r.representation, r.domain, r.split, r.rho);
        auto [it, inserted] = values.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.first.push_back(r.v_sup);
        it->second.second.push_back(r.ratio);
    }
    for (const auto& key : keys) {
        const auto& [v, ratio] = values.at(key);
        out << result.plan.dataset << ',' << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
            << std::get<3>(key) << ',' << cell(mean_of(v)) << ',' << cell(std_of(v)) << ',' << cell(mean_of(ratio)) << ','
            << cell(std_of(ratio)) << ',' << v.size() << '\n';
    }
}

void write_probe_csv(const ExperimentResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "# " << kProbeDescription << '\n';
    out << "dataset,representation,task,evaluation,accuracy_mean,accuracy_std,per_class_mean,n_folds\n";
    using Key = std::tuple<std::string, std::string, std::string>;
    std::vector<Key> keys;
    std::map<Key, std::vector<const ProbeRow*>> rows;
    for (const auto& r : result.probe) {
        Key key{r.representation, r.task, r.evaluation};
        auto [it, inserted] = rows.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.push_back(&r);
    }
    for (const auto& key : keys) {
        const auto& group = rows.at(key);
        std::vector<double> acc;
        std::vector<std::vector<double>> per_class;
        for (const auto* r : group) {
            acc.push_back(r->accuracy.overall);
            per_class.resize(r->accuracy.per_class.size());
            for (std::size_t c = 0; c < r->accuracy.per_class.size(); ++c) per_class[c].push_back(r->accuracy.per_class[c]);
        }
        std::vector<double> pc;
        for (const auto& v : per_class) pc.push_back(mean_of(v));
        out << result.plan.dataset << ',' << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
            << cell(mean_of(acc)) << ',' << cell(std_of(acc)) << ',' << joined(pc) << ',' << group.size() << '\n';
    }
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "rank,alpha,beta,lambda,l2,lr,accuracy,variation,reconstruction,score,score_std,failed_runs\n";
    for (const auto& r : result.rows) {
        const auto& m = r.summary.mean;
        out << r.rank << ',' << cell(r.config.alpha) << ',' << cell(r.config.beta) << ',' << cell(r.config.lambda) << ','
            << cell(r.config.l2) << ',' << cell(r.config.lr) << ',' << cell(m.accuracy) << ',' << cell(m.variation) << ','
            << cell(m.reconstruction) << ',' << cell(m.score) << ',' << cell(r.summary.std.score) << ','
            << r.summary.failed_runs << '\n';
    }
}

void write_robustness_csv(const RobustnessResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "model,source_count,split,target_rank,instance,v_sup,accuracy,status\n";
    for (const auto& c : result.curves)
        for (const auto& p : c.points) {
            out << c.model << ',' << c.source_count << ',' << (p.is_source ? "source" : "target") << ',';
            if (!p.is_source) out << p.target_rank;
            out << ',';
            if (!p.is_source) out << p.instance;
            out << ',' << cell(p.v_sup) << ',' << cell(p.accuracy) << ',' << (p.failed ? "failed" : "ok") << '\n';
        }
}

void write_experiment_reports(const ExperimentResult& result, const std::filesystem::path& dir) {
    write_scores_csv(result, dir / "scores.csv");
    write_runs_csv(result, dir / "runs.csv");
    if (result.plan.evaluate_targets) {
        write_variation_csv(result, dir / "variation.csv");
        write_probe_csv(result, dir / "probe.csv");
    }
}

nlohmann::json manifest_base(const std::string& command) {
    return {{"command", command},
            {"format_versions",
             {{"dataset", data::kDatasetFormatVersion},
              {"checkpoint", model::kCheckpointVersion},
              {"reports", kReportFormatVersion}}},
            {"substitutions", {kProbeDescription}}};
}

void write_manifest(const nlohmann::json& manifest, const std::filesystem::path& dir) {
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace disae::harness
