#include "ordinal/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "ordinal/metrics.hpp"

namespace ordinal {

std::string selection_metric_name(SelectionMetric metric) {
    switch (metric) {
    case SelectionMetric::QWK: return "qwk";
    case SelectionMetric::MAE: return "mae";
    case SelectionMetric::Accuracy: return "accuracy";
    }
    throw std::invalid_argument("selection_metric_name: unknown metric");
}

SelectionMetric selection_metric_from_name(const std::string& name) {
    if (name == "qwk") return SelectionMetric::QWK;
    if (name == "mae") return SelectionMetric::MAE;
    if (name == "accuracy") return SelectionMetric::Accuracy;
    throw std::invalid_argument("selection_metric_from_name: unknown metric '" + name + "'");
}

HeadKind required_head(LossKind kind) {
    switch (kind) {
    case LossKind::CE:
    case LossKind::CDW_CE:
    case LossKind::CDW_CE_MARGIN:
    case LossKind::CO2:
    case LossKind::HO2:
        return HeadKind::Softmax;
    case LossKind::CORN:
        return HeadKind::Corn;
    case LossKind::MSE_REG:
        return HeadKind::Regression;
    }
    throw std::invalid_argument("required_head: unknown loss kind");
}

void TrainConfig::validate() const {
    if (epochs < 1)
        throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1)
        throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (learning_rate < 0.0)
        throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
    if (patience < 0)
        throw std::invalid_argument("TrainConfig: patience must be >= 0");
}

std::string train_log_json(const TrainLog& log) {
    nlohmann::json doc;
    doc["train_loss"] = log.train_loss;
    doc["val_metric"] = log.val_metric;
    doc["selected_epoch"] = log.selected_epoch;
    return doc.dump(2);
}

namespace {

void check_compat(const MlpModel& model, const LossSpec& loss) {
    loss.validate();
    if (model.config().head != required_head(loss.kind))
        throw std::invalid_argument("loss '" + loss.name() + "' needs head '" +
                                    head_name(required_head(loss.kind)) + "', model has '" +
                                    head_name(model.config().head) + "'");
    if (model.config().num_classes != loss.num_classes)
        throw std::invalid_argument("model and loss disagree on num_classes");
}

// Shared head decoding: writes the per-class scores for one sample and
// returns its label. scores has length K (softmax, corn) or 1 (regression).
int label_and_scores(const MlpConfig& config, std::span<const double> head_output,
                     std::span<double> scores) {
    switch (config.head) {
    case HeadKind::Softmax: {
        std::copy(head_output.begin(), head_output.end(), scores.begin());
        const auto best = std::max_element(head_output.begin(), head_output.end());
        return static_cast<int>(best - head_output.begin());
    }
    case HeadKind::Corn: {
        const Vector probs = corn_class_probs(head_output);
        std::copy(probs.begin(), probs.end(), scores.begin());
        return corn_rank(head_output);
    }
    case HeadKind::Regression:
        scores[0] = regression_prediction(head_output[0], config.num_classes);
        return regression_label(head_output[0], config.num_classes);
    }
    throw std::invalid_argument("label_and_scores: unknown head");
}

std::size_t score_dim(const MlpConfig& config) {
    return config.head == HeadKind::Regression
               ? 1
               : static_cast<std::size_t>(config.num_classes);
}

double validation_score(SelectionMetric metric, std::span<const int> y_true,
                        std::span<const int> y_pred, int num_classes) {
    switch (metric) {
    case SelectionMetric::QWK:
        return qwk(confusion(y_true, y_pred, num_classes));
    case SelectionMetric::MAE:
        return mae(y_true, y_pred);
    case SelectionMetric::Accuracy:
        return accuracy(confusion(y_true, y_pred, num_classes));
    }
    throw std::invalid_argument("validation_score: unknown metric");
}

bool improves(SelectionMetric metric, double candidate, double best) {
    return metric == SelectionMetric::MAE ? candidate < best : candidate > best;
}

} // namespace

TrainResult train(MlpModel model, const LossSpec& loss, const Dataset& train_set,
                  const Dataset& val_set, const TrainConfig& config) {
    config.validate();
    check_compat(model, loss);
    if (train_set.size() == 0 || val_set.size() == 0)
        throw std::invalid_argument("train: train and validation sets must be non-empty");
    if (train_set.X.cols() != static_cast<std::size_t>(model.config().input_dim))
        throw std::invalid_argument("train: dataset width != model input_dim");

    const std::size_t n = train_set.size();
    Gradients velocity = model.zero_gradients();
    Gradients batch_grads = model.zero_gradients();

    TrainResult result{model, {}};
    double best_score = 0.0;
    int bad_streak = 0;

    std::vector<std::size_t> order(n);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (config.shuffle) {
            SeededRng rng = SeededRng::derive(config.seed, static_cast<std::uint64_t>(epoch));
            rng.shuffle(order);
        }

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t stop = std::min(n, start + config.batch_size);
            const double inv = 1.0 / static_cast<double>(stop - start);
            batch_grads.zero();
            double batch_loss = 0.0;
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t row = order[b];
                ForwardTrace trace;
                LossResult lr;
                try {
                    trace = model.forward_trace(train_set.X.row(row));
                    lr = loss_dispatch(loss, trace.head_output, train_set.y[row]);
                } catch (const std::invalid_argument& e) {
                    // shapes were validated up front, so a domain failure here
                    // means the parameters have left the finite range
                    throw std::runtime_error(
                        "train: divergence at epoch " + std::to_string(epoch) + " batch " +
                        std::to_string(start / config.batch_size) + " (" + e.what() + ")");
                }
                if (!std::isfinite(lr.value))
                    throw std::runtime_error(
                        "train: divergence at epoch " + std::to_string(epoch) + " batch " +
                        std::to_string(start / config.batch_size) +
                        ", loss=" + std::to_string(lr.value));
                batch_loss += lr.value;
                batch_grads.add_scaled(model.backward(trace, lr.grad), inv);
            }
            velocity.scale(config.momentum);
            velocity.add_scaled(batch_grads, 1.0);
            model.apply_update(velocity, -config.learning_rate);
            epoch_loss += batch_loss;
        }
        result.log.train_loss.push_back(epoch_loss / static_cast<double>(n));

        double score = 0.0;
        try {
            const EvalResult val = evaluate(model, loss, val_set.X, val_set.y, false);
            score = validation_score(config.selection_metric, val_set.y,
                                     val.predictions.labels, model.config().num_classes);
        } catch (const std::invalid_argument& e) {
            // the last update of the epoch can push the parameters out of
            // the finite range before any training forward sees them
            throw std::runtime_error("train: divergence at epoch " +
                                     std::to_string(epoch) + " validation (" + e.what() +
                                     ")");
        }
        result.log.val_metric.push_back(score);

        if (result.log.selected_epoch < 0 ||
            improves(config.selection_metric, score, best_score)) {
            best_score = score;
            result.log.selected_epoch = epoch;
            result.model = model;
            bad_streak = 0;
        } else {
            ++bad_streak;
            if (config.patience > 0 && bad_streak >= config.patience)
                break;
        }
    }
    return result;
}

Predictions predict(const MlpModel& model, const Matrix& X, const LossSpec& loss) {
    check_compat(model, loss);
    Predictions out;
    out.labels.resize(X.rows());
    out.scores = Matrix(X.rows(), score_dim(model.config()));
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const ForwardTrace trace = model.forward_trace(X.row(i));
        out.labels[i] = label_and_scores(model.config(), trace.head_output, out.scores.row(i));
    }
    return out;
}

Matrix extract_features(const MlpModel& model, const Matrix& X) {
    Matrix features(X.rows(), static_cast<std::size_t>(model.config().penultimate_dim()));
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const ForwardTrace trace = model.forward_trace(X.row(i));
        std::copy(trace.penultimate.begin(), trace.penultimate.end(),
                  features.row(i).begin());
    }
    return features;
}

EvalResult evaluate(const MlpModel& model, const LossSpec& loss, const Matrix& X,
                    std::span<const int> y, bool parallel) {
    check_compat(model, loss);
    if (X.rows() != y.size())
        throw std::invalid_argument("evaluate: rows != labels");
    if (X.rows() == 0)
        throw std::invalid_argument("evaluate: empty input");

    const std::size_t n = X.rows();
    EvalResult out;
    out.predictions.labels.resize(n);
    out.predictions.scores = Matrix(n, score_dim(model.config()));
    std::vector<double> losses(n);

    // per-index slots plus an ordered serial reduction keep the result
    // bit-identical for every thread count
    auto one = [&](std::size_t i) {
        const ForwardTrace trace = model.forward_trace(X.row(i));
        const LossResult lr = loss_dispatch(loss, trace.head_output, y[i]);
        losses[i] = lr.value;
        out.predictions.labels[i] = label_and_scores(model.config(), trace.head_output,
                                                     out.predictions.scores.row(i));
    };
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            one(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            one(i);
    }
    double sum = 0.0;
    for (double v : losses)
        sum += v;
    out.mean_loss = sum / static_cast<double>(n);
    return out;
}

} // namespace ordinal
