#include "disae/data/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace disae::data {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t row, const std::string& column) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw ValidationError("row " + std::to_string(row) + ", column '" + column + "': cannot parse '" + s + "'");
    return v;
}

int parse_int(const std::string& s, std::size_t row, const std::string& column) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ValidationError("row " + std::to_string(row) + ", column '" + column + "': expected integer label, got '" +
                              s + "'");
    return v;
}

nlohmann::json instance_to_json(const AffineInstance& a) {
    return {{"id", a.id}, {"subset", a.subset}, {"scale", a.scale}, {"offset", a.offset},
            {"distance_rank", a.distance_rank}};
}

AffineInstance instance_from_json(const nlohmann::json& j) {
    AffineInstance a;
    a.id = j.at("id").get<int>();
    a.subset = j.at("subset").get<std::vector<int>>();
    a.scale = j.at("scale").get<std::vector<double>>();
    a.offset = j.at("offset").get<std::vector<double>>();
    a.distance_rank = j.at("distance_rank").get<int>();
    return a;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::filesystem::path metadata_path_for(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

nlohmann::json schema_to_json(const Schema& schema) {
    nlohmann::json j;
    j["format_version"] = kDatasetFormatVersion;
    j["features"] = schema.features;
    j["tasks"] = nlohmann::json::array();
    for (const auto& t : schema.tasks)
        j["tasks"].push_back({{"name", t.name}, {"n_classes", t.n_classes}, {"class_weights", t.class_weights}});
    j["domains"] = nlohmann::json::array();
    for (const auto& d : schema.domains) {
        nlohmann::json dj{{"name", d.name}};
        if (d.kind == DomainKind::categorical) {
            dj["kind"] = "categorical";
            dj["n_instances"] = d.n_instances;
        } else {
            dj["kind"] = "continuous";
            dj["n_bins"] = d.n_bins;
            dj["binning"] = d.binning == BinStrategy::quantile ? "quantile" : "uniform";
        }
        if (!d.instances.empty()) {
            dj["instances"] = nlohmann::json::array();
            for (const auto& a : d.instances) dj["instances"].push_back(instance_to_json(a));
        }
        j["domains"].push_back(dj);
    }
    if (schema.normalization)
        j["normalization"] = {{"means", schema.normalization->means}, {"stds", schema.normalization->stds}};
    else
        j["normalization"] = nullptr;
    j["provenance"] = schema.provenance;
    return j;
}

Schema schema_from_json(const nlohmann::json& j) {
    if (!j.contains("format_version") || j.at("format_version") != kDatasetFormatVersion)
        throw FormatError("dataset metadata: unsupported format_version " +
                          (j.contains("format_version") ? j.at("format_version").dump() : std::string("<missing>")) +
                          " (expected \"1\")");
    try {
        Schema s;
        s.features = j.at("features").get<std::vector<std::string>>();
        for (const auto& tj : j.at("tasks")) {
            TaskSpec t;
            t.name = tj.at("name").get<std::string>();
            t.n_classes = tj.at("n_classes").get<int>();
            if (tj.contains("class_weights")) t.class_weights = tj.at("class_weights").get<std::vector<double>>();
            t.validate();
            s.tasks.push_back(std::move(t));
        }
        for (const auto& dj : j.at("domains")) {
            DomainSpec d;
            d.name = dj.at("name").get<std::string>();
            const auto kind = dj.at("kind").get<std::string>();
            if (kind == "categorical") {
                d.kind = DomainKind::categorical;
                d.n_instances = dj.at("n_instances").get<int>();
            } else if (kind == "continuous") {
                d.kind = DomainKind::continuous;
                d.n_bins = dj.value("n_bins", 5);
                const auto b = dj.value("binning", std::string("quantile"));
                if (b != "quantile" && b != "uniform") throw SchemaError("unknown binning '" + b + "'");
                d.binning = b == "quantile" ? BinStrategy::quantile : BinStrategy::uniform;
            } else {
                throw SchemaError("domain '" + d.name + "': unknown kind '" + kind + "'");
            }
            if (dj.contains("instances"))
                for (const auto& aj : dj.at("instances")) d.instances.push_back(instance_from_json(aj));
            d.validate();
            s.domains.push_back(std::move(d));
        }
        if (j.contains("normalization") && !j.at("normalization").is_null()) {
            NormStats st;
            st.means = j.at("normalization").at("means").get<std::vector<double>>();
            st.stds = j.at("normalization").at("stds").get<std::vector<double>>();
            s.normalization = std::move(st);
        }
        if (j.contains("provenance")) s.provenance = j.at("provenance");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("dataset metadata: ") + e.what());
    }
}

Schema read_schema(const std::filesystem::path& metadata_path) {
    std::ifstream in(metadata_path);
    if (!in) throw SchemaError("cannot open dataset metadata '" + metadata_path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("dataset metadata '" + metadata_path.string() + "': " + e.what());
    }
    return schema_from_json(j);
}

Schema schema_of(const Dataset& ds) {
    Schema s;
    s.features = ds.feature_names();
    s.tasks = ds.tasks();
    s.domains = ds.domains();
    s.provenance = ds.provenance();
    return s;
}

Dataset load_dataset(const std::filesystem::path& csv_path, const Schema& schema) {
    std::ifstream in(csv_path);
    if (!in) throw SchemaError("cannot open dataset '" + csv_path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("dataset '" + csv_path.string() + "' is empty");
    const auto header = split_line(line);
    std::map<std::string, std::size_t> column;
    for (std::size_t c = 0; c < header.size(); ++c) column[header[c]] = c;

    auto locate = [&](const std::string& name) {
        auto it = column.find(name);
        if (it == column.end()) throw SchemaError("dataset '" + csv_path.string() + "': missing column '" + name + "'");
        return it->second;
    };
    std::vector<std::size_t> feature_cols, task_cols, domain_cols;
    for (const auto& f : schema.features) feature_cols.push_back(locate(f));
    for (const auto& t : schema.tasks) task_cols.push_back(locate("task:" + t.name));
    for (const auto& d : schema.domains) domain_cols.push_back(locate("domain:" + d.name));

    std::vector<std::vector<double>> rows;
    std::vector<std::vector<int>> tasks(schema.tasks.size());
    std::vector<DomainColumn> domains(schema.domains.size());
    std::vector<std::size_t> bad_rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw ValidationError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                                  " cells, found " + std::to_string(cells.size()));
        std::vector<double> x;
        x.reserve(feature_cols.size());
        bool finite = true;
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            const double v = parse_double(cells[feature_cols[f]], row, schema.features[f]);
            finite = finite && std::isfinite(v);
            x.push_back(v);
        }
        if (!finite) bad_rows.push_back(row);
        rows.push_back(std::move(x));
        for (std::size_t t = 0; t < task_cols.size(); ++t)
            tasks[t].push_back(parse_int(cells[task_cols[t]], row, "task:" + schema.tasks[t].name));
        for (std::size_t d = 0; d < domain_cols.size(); ++d) {
            const auto& cell = cells[domain_cols[d]];
            if (schema.domains[d].kind == DomainKind::categorical)
                domains[d].ids.push_back(parse_int(cell, row, "domain:" + schema.domains[d].name));
            else
                domains[d].values.push_back(parse_double(cell, row, "domain:" + schema.domains[d].name));
        }
        ++row;
    }
    if (!bad_rows.empty()) {
        std::string msg = std::to_string(bad_rows.size()) + " row(s) with non-finite feature values rejected: row";
        msg += bad_rows.size() > 1 ? "s " : " ";
        for (std::size_t i = 0; i < bad_rows.size() && i < 20; ++i)
            msg += (i ? ", " : "") + std::to_string(bad_rows[i]);
        if (bad_rows.size() > 20) msg += ", ...";
        throw ValidationError(msg);
    }

    Matrix features(static_cast<Index>(rows.size()), static_cast<Index>(schema.features.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            features(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    Dataset ds(std::move(features), schema.features, schema.tasks, std::move(tasks), schema.domains,
               std::move(domains));
    ds.set_provenance(schema.provenance);
    return ds;
}

Dataset load_dataset(const std::filesystem::path& csv_path) {
    return load_dataset(csv_path, read_schema(metadata_path_for(csv_path)));
}

void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path, const std::optional<NormStats>& stats) {
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw Error("cannot write '" + csv_path.string() + "'");
    std::string line;
    for (const auto& f : ds.feature_names()) line += f + ",";
    for (const auto& t : ds.tasks()) line += "task:" + t.name + ",";
    for (const auto& d : ds.domains()) line += "domain:" + d.name + ",";
    line.pop_back();
    out << line << '\n';
    for (Index i = 0; i < ds.n_samples(); ++i) {
        line.clear();
        for (Index j = 0; j < ds.n_features(); ++j) line += format_double(ds.features()(i, j)) + ",";
        for (std::size_t t = 0; t < ds.n_tasks(); ++t)
            line += std::to_string(ds.task_labels(t)[static_cast<std::size_t>(i)]) + ",";
        for (std::size_t d = 0; d < ds.n_domains(); ++d) {
            const auto& col = ds.domain_column(d);
            if (ds.domains()[d].kind == DomainKind::categorical)
                line += std::to_string(col.ids[static_cast<std::size_t>(i)]) + ",";
            else
                line += format_double(col.values[static_cast<std::size_t>(i)]) + ",";
        }
        line.pop_back();
        out << line << '\n';
    }
    if (!out) throw Error("failed writing '" + csv_path.string() + "'");

    Schema schema = schema_of(ds);
    schema.normalization = stats;
    std::ofstream meta(metadata_path_for(csv_path), std::ios::binary);
    meta << schema_to_json(schema).dump(2) << '\n';
    if (!meta) throw Error("failed writing metadata for '" + csv_path.string() + "'");
}

}  // namespace disae::data
