#ifndef ORDINAL_LOSSES_HPP
#define ORDINAL_LOSSES_HPP

#include <optional>
#include <span>
#include <string>

#include "ordinal/numerics.hpp"

namespace ordinal {

enum class LossKind {
    CE,             // plain cross-entropy on K probabilities
    CDW_CE,         // class-distance weighted cross-entropy
    CDW_CE_MARGIN,  // CDW-CE with additive probability margin
    CO2,            // cross-entropy + unimodality penalty
    HO2,            // entropy + unimodality penalty
    CORN,           // K-1 conditional binary tasks on raw logits
    MSE_REG,        // squared error on sigmoid-scaled single output
};

const char* loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& name);

/// Selects one loss and its hyperparameters. Hyperparameters that do not
/// belong to the selected kind must be absent; validate() rejects both
/// missing-required and present-but-irrelevant settings.
struct LossSpec {
    LossKind kind = LossKind::CE;
    int num_classes = 0;
    std::optional<double> alpha;    // CDW_CE, CDW_CE_MARGIN; > 0
    std::optional<double> margin;   // CDW_CE_MARGIN; in [0, 0.5]
    std::optional<double> lambda;   // CO2, HO2; >= 0
    std::optional<double> delta;    // CO2, HO2; >= 0

    void validate() const;

    /// Expected model output length: K probabilities, K-1 logits, or 1 scalar.
    int head_input_dim() const;

    /// Compact tag for file names and report columns, e.g. "cdw_ce_a5".
    std::string name() const;
};

struct LossResult {
    double value = 0.0;
    Vector grad;  // d(loss)/d(input), same length as the loss's input
};

// Each probability-space loss has a checked entry taking ProbVector and a
// raw overload taking the components directly. The raw overloads require
// every component in [0,1] but not a unit sum; finite-difference probes
// need to step one component off the simplex.
LossResult ce_loss(const ProbVector& y_hat, int c);
LossResult ce_loss(std::span<const double> y_hat, int c);

LossResult cdw_ce_loss(const ProbVector& y_hat, int c, double alpha);
LossResult cdw_ce_loss(std::span<const double> y_hat, int c, double alpha);
Vector cdw_ce_grad(const ProbVector& y_hat, int c, double alpha);

LossResult cdw_ce_margin_loss(const ProbVector& y_hat, int c, double alpha, double m);
LossResult cdw_ce_margin_loss(std::span<const double> y_hat, int c, double alpha, double m);

LossResult co2_loss(const ProbVector& y_hat, int c, double lambda, double delta);
LossResult co2_loss(std::span<const double> y_hat, int c, double lambda, double delta);

LossResult ho2_loss(const ProbVector& y_hat, int c, double lambda, double delta);
LossResult ho2_loss(std::span<const double> y_hat, int c, double lambda, double delta);

/// logits has length K-1. The sample takes part in conditional task k only
/// while c > k-1 (task 0 sees every sample); targets are 1{c > k}. The
/// per-sample value is the mean binary cross-entropy over participating tasks.
LossResult corn_loss(std::span<const double> logits, int c);

/// Chained probabilities P(y > k) = prod_{j<=k} sigmoid(logit_j), length K-1.
Vector corn_chain_probs(std::span<const double> logits);

/// Per-class probabilities derived from the chain (length K, sums to 1).
Vector corn_class_probs(std::span<const double> logits);

/// Predicted rank: number of leading chain probabilities above 0.5.
int corn_rank(std::span<const double> logits);

LossResult mse_reg_loss(double raw_output, int c, int num_classes);

/// sigmoid(raw) * (K-1), the continuous regression prediction.
double regression_prediction(double raw_output, int num_classes);

/// round-half-up of the regression prediction, clamped to [0, K-1].
int regression_label(double raw_output, int num_classes);

/// Routes one model output row to the loss selected by spec. The input must
/// match spec's head contract (K probs | K-1 logits | 1 scalar).
LossResult loss_dispatch(const LossSpec& spec, std::span<const double> model_output, int c);

struct BatchLossResult {
    double value = 0.0;  // mean over samples
    Matrix grads;        // one gradient row per sample, scaled by 1/n
};

/// Mean loss over the rows of `outputs`; gradients carry the 1/n factor.
BatchLossResult loss_dispatch_batch(const LossSpec& spec, const Matrix& outputs,
                                    std::span<const int> labels);

} // namespace ordinal

#endif
