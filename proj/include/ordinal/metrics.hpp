#ifndef ORDINAL_METRICS_HPP
#define ORDINAL_METRICS_HPP

#include <span>
#include <vector>

#include "ordinal/numerics.hpp"

namespace ordinal {

/// K x K count matrix, rows = ground truth, columns = prediction.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int num_classes);

    int num_classes() const { return k_; }
    long long at(int truth, int pred) const;
    long long& at(int truth, int pred);
    long long total() const;
    long long row_sum(int truth) const;
    long long col_sum(int pred) const;

    void add(const ConfusionMatrix& other);

private:
    int k_;
    std::vector<long long> counts_;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          int num_classes);

/// Quadratic weighted kappa: 1 - sum(w O) / sum(w E) with w_ij =
/// (i-j)^2 / (K-1)^2 and E the marginal outer product at the same total.
double qwk(const ConfusionMatrix& cm);

double cohen_kappa(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);

/// Unweighted mean of per-class F1; a class with zero precision+recall
/// contributes 0 rather than NaN.
double macro_f1(const ConfusionMatrix& cm);

/// Per-class F1 values, for inspection and the remission bundle.
std::vector<double> per_class_f1(const ConfusionMatrix& cm);

double mae(std::span<const int> y_true, std::span<const int> y_pred);

/// Collapses a 4x4 MES matrix to 2x2: classes {0,1} vs {2,3}.
ConfusionMatrix remission_collapse(const ConfusionMatrix& cm);

struct RocPoint {
    double threshold;
    double fpr;
    double tpr;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// One-vs-rest ROC from per-sample scores and binary labels (1 = positive).
/// Tied scores share a threshold; AUC by the trapezoidal rule.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Mean silhouette over samples with Euclidean distances. Singleton
/// clusters score 0, as does a point with a_i = b_i = 0.
double silhouette(const Matrix& points, std::span<const int> labels);

/// Plain-loop reference for the parallel kernel; results are bit-identical.
double silhouette_serial(const Matrix& points, std::span<const int> labels);

/// Per-trial metric bundle. remission_* and silhouette are NaN when not
/// computed (remission needs K=4; AUC is skipped for the regression head).
struct MetricBundle {
    double qwk = 0.0;
    double kappa = 0.0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double mae = 0.0;
    std::vector<double> per_class_auc;
    double remission_kappa = 0.0;
    double remission_f1 = 0.0;
    double remission_accuracy = 0.0;
    double silhouette = 0.0;
};

} // namespace ordinal

#endif
