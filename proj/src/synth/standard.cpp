#include "disae/synth/standard.hpp"

#include "disae/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace disae::synth {

namespace {

// Feature layout shared by every standard dataset: informative block first,
// then the redundant block that carries the injected domain shifts.
constexpr int kInformative = 3;
constexpr int kRedundant = 5;
constexpr int kFeatures = kInformative + kRedundant;
constexpr double kClassSep = 1.5;
constexpr double kFeatureNoise = 0.1;

// Fraction of an instance's shift vector spent on scaling rather than offset.
constexpr double kScaleShare = 0.3;

// Dataset A/B/C instances 1-4 move along one direction of the redundant
// block with growing magnitude; instance 5 moves the informative block.
constexpr double kSharedMagnitudes[] = {0.0, 1.5, 3.0, 7.0};
constexpr double kOddInstanceMagnitude = 8.0;

// Many Affines: every instance draws its own direction in the redundant
// block; magnitude grows linearly with instance index.
constexpr double kManyAffinesStep = 0.1;

std::vector<int> block(int first, int count) {
    std::vector<int> v;
    for (int j = 0; j < count; ++j) v.push_back(first + j);
    return v;
}

// Random unit vector over (scale deviation, offset) pairs of `dim` features.
std::pair<Vector, Vector> random_shift_direction(int dim, Rng& rng) {
    Vector scale(dim), offset(dim);
    for (int j = 0; j < dim; ++j) scale(j) = kScaleShare * rng.normal();
    for (int j = 0; j < dim; ++j) offset(j) = rng.normal();
    const double norm = std::sqrt(scale.squaredNorm() + offset.squaredNorm());
    return {scale / norm, offset / norm};
}

data::AffineInstance make_instance(int id, std::vector<int> subset, const Vector& scale_dir, const Vector& offset_dir,
                                   double magnitude) {
    data::AffineInstance inst;
    inst.id = id;
    inst.distance_rank = id;
    inst.subset = std::move(subset);
    for (Index j = 0; j < scale_dir.size(); ++j) {
        inst.scale.push_back(1.0 + magnitude * scale_dir(j));
        inst.offset.push_back(magnitude * offset_dir(j));
    }
    return inst;
}

// Direction in the redundant block whose offset mimics a move of the
// informative features through the generator's mixing matrix, so the shifted
// rows stay close to the data manifold.
std::pair<Vector, Vector> manifold_shift_direction(const Matrix& mix, Rng& rng) {
    auto [scale, offset] = random_shift_direction(kRedundant, rng);
    Vector w(mix.rows());
    for (Index j = 0; j < w.size(); ++j) w(j) = rng.normal();
    offset = (mix.transpose() * w).normalized();
    const double norm = std::sqrt(scale.squaredNorm() + offset.squaredNorm());
    return {scale / norm, offset / norm};
}

Matrix mix_from(const data::Dataset& base) {
    const auto& rows = base.provenance().at("redundant_mix");
    Matrix mix(static_cast<Index>(rows.size()), kRedundant);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < kRedundant; ++j) mix(static_cast<Index>(i), j) = rows[i].at(static_cast<std::size_t>(j)).get<double>();
    return mix;
}

CategoricalShift five_instances(const Matrix& mix, Rng& rng) {
    CategoricalShift cat;
    cat.name = "instance";
    const auto [scale_dir, offset_dir] = manifold_shift_direction(mix, rng);
    for (int i = 0; i < 4; ++i)
        cat.instances.push_back(
            make_instance(i, block(kInformative, kRedundant), scale_dir, offset_dir, kSharedMagnitudes[i]));
    const auto [odd_scale, odd_offset] = random_shift_direction(kInformative, rng);
    cat.instances.push_back(make_instance(4, block(0, kInformative), odd_scale, odd_offset, kOddInstanceMagnitude));
    cat.ratios = {5, 5, 1, 1, 1};
    return cat;
}

std::vector<ContinuousShift> continuous_domains(Rng& rng) {
    ContinuousShift seasonal;
    seasonal.name = "season";
    seasonal.kind = ResponseKind::translate;
    seasonal.subset = block(kInformative, kRedundant);
    Vector r(kRedundant);
    for (int j = 0; j < kRedundant; ++j) r(j) = rng.normal();
    r *= 1.0 / r.norm();
    seasonal.response.assign(r.data(), r.data() + r.size());

    ContinuousShift age;
    age.name = "sample_age";
    age.kind = ResponseKind::warp;
    age.subset = block(kInformative, kRedundant);
    for (int j = 0; j < kRedundant; ++j) age.response.push_back(rng.uniform(0.2, 0.6));
    return {seasonal, age};
}

}  // namespace

StandardDataset parse_standard_name(const std::string& name) {
    std::string s;
    for (char c : name)
        if (c != '-' && c != '_' && c != ' ') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "a") return StandardDataset::A;
    if (s == "b") return StandardDataset::B;
    if (s == "c") return StandardDataset::C;
    if (s == "manyaffines") return StandardDataset::ManyAffines;
    throw ConfigError("unknown standard dataset '" + name + "' (expected A, B, C or many-affines)");
}

std::string standard_name(StandardDataset which) {
    switch (which) {
        case StandardDataset::A: return "A";
        case StandardDataset::B: return "B";
        case StandardDataset::C: return "C";
        case StandardDataset::ManyAffines: return "many-affines";
    }
    return "?";
}

GeneratorConfig standard_generator_config(StandardDataset which, std::uint64_t seed) {
    GeneratorConfig c;
    c.n_features = kFeatures;
    c.n_informative = kInformative;
    c.n_redundant = kRedundant;
    c.class_sep = kClassSep;
    c.feature_noise = kFeatureNoise;
    c.seed = derive_seed(seed, "generator");
    switch (which) {
        case StandardDataset::A:
        case StandardDataset::B:
            c.n_samples = 13000;
            c.task_classes = {2};
            break;
        case StandardDataset::C:
            c.n_samples = 26000;
            c.n_tasks = 3;
            c.task_classes = {2, 2, 2};
            c.task_ratios = {{2, 5}, {1, 1}, {2, 5}};
            c.class_sep = 1.0;
            c.label_noise = 0.7;
            break;
        case StandardDataset::ManyAffines:
            c.n_samples = kManyAffinesDeskSize;
            c.task_classes = {2};
            break;
    }
    return c;
}

ShiftPlan standard_shift_plan(StandardDataset which, const data::Dataset& base, std::uint64_t seed) {
    const Matrix mix = mix_from(base);
    Rng rng(derive_seed(seed, "shift-parameters"));
    ShiftPlan plan;
    if (which == StandardDataset::ManyAffines) {
        CategoricalShift cat;
        cat.name = "instance";
        for (int i = 0; i < kManyAffinesInstances; ++i) {
            const auto [scale_dir, offset_dir] = random_shift_direction(kRedundant, rng);
            cat.instances.push_back(
                make_instance(i, block(kInformative, kRedundant), scale_dir, offset_dir, kManyAffinesStep * i));
            cat.ratios.push_back(1.0);
        }
        plan.domains.emplace_back(std::move(cat));
        return plan;
    }
    plan.domains.emplace_back(five_instances(mix, rng));
    if (which != StandardDataset::A)
        for (auto& c : continuous_domains(rng)) plan.domains.emplace_back(std::move(c));
    return plan;
}

data::Dataset generate_standard(StandardDataset which, std::uint64_t seed, std::optional<Index> size_override) {
    GeneratorConfig config = standard_generator_config(which, seed);
    if (size_override) {
        if (*size_override < 1) throw ConfigError("generate_standard: size override must be positive");
        config.n_samples = *size_override;
    }
    data::Dataset base = which == StandardDataset::C ? make_multilabel(config) : make_classification(config);
    data::Dataset ds = apply_shift_plan(base, standard_shift_plan(which, base, seed), derive_seed(seed, "shift"));
    nlohmann::json prov = ds.provenance();
    prov["standard_dataset"] = standard_name(which);
    prov["seed"] = seed;
    ds.set_provenance(prov);
    return ds;
}

}  // namespace disae::synth
