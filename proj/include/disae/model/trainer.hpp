#pragma once

#include "disae/data/dataset.hpp"
#include "disae/data/folds.hpp"
#include "disae/data/normalize.hpp"
#include "disae/model/model.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <vector>

namespace disae::model {

struct EpochRecord {
    int epoch = 0;
    double lr = 0.0;
    double train_total = 0.0;  // mean of batch objectives
    double train_relative_reconstruction = 0.0;  // full fit set, end of epoch
    std::vector<double> train_task_accuracy;
    std::vector<double> train_domain_accuracy;
    double val_total = 0.0;
    double val_relative_reconstruction = 0.0;
    double val_task_accuracy = 0.0;  // mean over task heads (0 without heads)
    double proxy = 0.0;  // val_task_accuracy - val_relative_reconstruction
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;  // index into epochs of the returned parameters

    const EpochRecord& selected() const { return epochs.at(static_cast<std::size_t>(best_epoch)); }
    nlohmann::json to_json() const;
    static TrainHistory from_json(const nlohmann::json& j);
};

struct TrainedModel {
    DisAEModel model;
    data::NormStats norm;
    TrainHistory history;
};

// Label columns of `dataset` matched to the config's heads by name.
LabelView label_view(const DisAEConfig& config, const data::Dataset& dataset);

// Called after every epoch with the epoch's record and the current parameters.
using EpochCallback = std::function<void(const EpochRecord&, const DisAEModel&)>;

// Trains on already-normalised data. The validation set drives the plateau
// schedule and best-epoch selection.
TrainedModel train_model(const data::Dataset& fit, const data::Dataset& validation, const DisAEConfig& config,
                         const EpochCallback& on_epoch = {});

// Normalisation fitted on the fit part of `rows`; the validation part is a
// stratified holdout of config.validation_fraction.
TrainedModel train_on_rows(const data::Dataset& raw, const std::vector<Index>& rows, const DisAEConfig& config);

// One fold of a split plan (the plan fixes the fit/validation partition).
TrainedModel train_fold(const data::Dataset& raw, const data::SplitPlan& plan, int fold, const DisAEConfig& config);

std::vector<TrainedModel> train(const data::Dataset& raw, const data::SplitPlan& plan, const DisAEConfig& config);

}  // namespace disae::model
