#ifndef ORDINAL_TRAINER_HPP
#define ORDINAL_TRAINER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ordinal/data.hpp"
#include "ordinal/losses.hpp"
#include "ordinal/model.hpp"

namespace ordinal {

enum class SelectionMetric { QWK, MAE, Accuracy };

std::string selection_metric_name(SelectionMetric metric);
SelectionMetric selection_metric_from_name(const std::string& name);

/// Head the model must expose for a given loss.
HeadKind required_head(LossKind kind);

struct TrainConfig {
    int epochs = 100;
    int batch_size = 64;
    // small enough that the distance-weighted losses, whose gradients run one
    // to two orders of magnitude above plain CE, stay stable under momentum
    double learning_rate = 0.002;
    double momentum = 0.9;
    std::uint64_t seed = 0;
    SelectionMetric selection_metric = SelectionMetric::QWK;
    int patience = 0; // 0 disables early stopping
    bool shuffle = true;

    void validate() const;
};

struct TrainLog {
    std::vector<double> train_loss; // mean loss per completed epoch
    std::vector<double> val_metric; // selection metric per completed epoch
    int selected_epoch = -1;        // index into the vectors above
};

std::string train_log_json(const TrainLog& log);

struct TrainResult {
    MlpModel model; // parameters from the best validation epoch
    TrainLog log;
};

/// Mini-batch SGD with momentum. Deterministic in (model init, config.seed).
/// Throws a divergence error when a batch loss turns NaN/inf.
TrainResult train(MlpModel model, const LossSpec& loss, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config);

struct Predictions {
    std::vector<int> labels;
    Matrix scores; // n x K class probabilities; n x 1 for the regression head
};

Predictions predict(const MlpModel& model, const Matrix& X, const LossSpec& loss);

Matrix extract_features(const MlpModel& model, const Matrix& X);

struct EvalResult {
    double mean_loss = 0.0;
    Predictions predictions;
};

/// Whole-dataset forward pass; `parallel` selects the OpenMP kernel, the
/// serial path is the reference twin. Both produce identical bytes.
EvalResult evaluate(const MlpModel& model, const LossSpec& loss, const Matrix& X,
                    std::span<const int> y, bool parallel);

} // namespace ordinal

#endif
