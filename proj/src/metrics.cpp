#include "ordinal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ordinal {

ConfusionMatrix::ConfusionMatrix(int num_classes) : k_(num_classes) {
    if (num_classes < 1)
        throw std::invalid_argument("ConfusionMatrix: num_classes must be >= 1");
    counts_.assign(static_cast<std::size_t>(k_) * k_, 0);
}

long long ConfusionMatrix::at(int truth, int pred) const {
    if (truth < 0 || truth >= k_ || pred < 0 || pred >= k_)
        throw std::out_of_range("ConfusionMatrix::at: index outside [0, K)");
    return counts_[static_cast<std::size_t>(truth) * k_ + pred];
}

long long& ConfusionMatrix::at(int truth, int pred) {
    if (truth < 0 || truth >= k_ || pred < 0 || pred >= k_)
        throw std::out_of_range("ConfusionMatrix::at: index outside [0, K)");
    return counts_[static_cast<std::size_t>(truth) * k_ + pred];
}

long long ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), 0LL);
}

long long ConfusionMatrix::row_sum(int truth) const {
    long long s = 0;
    for (int j = 0; j < k_; ++j)
        s += at(truth, j);
    return s;
}

long long ConfusionMatrix::col_sum(int pred) const {
    long long s = 0;
    for (int i = 0; i < k_; ++i)
        s += at(i, pred);
    return s;
}

void ConfusionMatrix::add(const ConfusionMatrix& other) {
    if (other.k_ != k_)
        throw std::invalid_argument("ConfusionMatrix::add: size mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i)
        counts_[i] += other.counts_[i];
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred,
                          int num_classes) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionMatrix cm(num_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i)
        ++cm.at(y_true[i], y_pred[i]);
    return cm;
}

double qwk(const ConfusionMatrix& cm) {
    const int k = cm.num_classes();
    const long long n = cm.total();
    if (n == 0)
        throw std::invalid_argument("qwk: empty confusion matrix");
    const double denom_scale = k > 1 ? static_cast<double>(k - 1) * (k - 1) : 1.0;
    double observed = 0.0, expected = 0.0;
    for (int i = 0; i < k; ++i) {
        const double row = static_cast<double>(cm.row_sum(i));
        for (int j = 0; j < k; ++j) {
            const double w = static_cast<double>(i - j) * (i - j) / denom_scale;
            observed += w * static_cast<double>(cm.at(i, j));
            expected += w * row * static_cast<double>(cm.col_sum(j)) / static_cast<double>(n);
        }
    }
    if (expected == 0.0)
        throw std::runtime_error("qwk: undefined (single class in both marginals)");
    return 1.0 - observed / expected;
}

double cohen_kappa(const ConfusionMatrix& cm) {
    const int k = cm.num_classes();
    const long long n = cm.total();
    if (n == 0)
        throw std::invalid_argument("cohen_kappa: empty confusion matrix");
    double po = 0.0, pe = 0.0;
    for (int i = 0; i < k; ++i) {
        po += static_cast<double>(cm.at(i, i));
        pe += static_cast<double>(cm.row_sum(i)) * static_cast<double>(cm.col_sum(i));
    }
    po /= static_cast<double>(n);
    pe /= static_cast<double>(n) * static_cast<double>(n);
    if (pe == 1.0)
        throw std::runtime_error("cohen_kappa: undefined (chance agreement is 1)");
    return (po - pe) / (1.0 - pe);
}

double accuracy(const ConfusionMatrix& cm) {
    const long long n = cm.total();
    if (n == 0)
        throw std::invalid_argument("accuracy: empty confusion matrix");
    long long diag = 0;
    for (int i = 0; i < cm.num_classes(); ++i)
        diag += cm.at(i, i);
    return static_cast<double>(diag) / static_cast<double>(n);
}

std::vector<double> per_class_f1(const ConfusionMatrix& cm) {
    const int k = cm.num_classes();
    std::vector<double> f1(k, 0.0);
    for (int i = 0; i < k; ++i) {
        const double tp = static_cast<double>(cm.at(i, i));
        const double fp = static_cast<double>(cm.col_sum(i)) - tp;
        const double fn = static_cast<double>(cm.row_sum(i)) - tp;
        const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        f1[i] = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    return f1;
}

double macro_f1(const ConfusionMatrix& cm) {
    if (cm.total() == 0)
        throw std::invalid_argument("macro_f1: empty confusion matrix");
    const std::vector<double> f1 = per_class_f1(cm);
    return std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(f1.size());
}

double mae(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("mae: length mismatch");
    if (y_true.empty())
        throw std::invalid_argument("mae: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i)
        s += std::abs(y_true[i] - y_pred[i]);
    return s / static_cast<double>(y_true.size());
}

ConfusionMatrix remission_collapse(const ConfusionMatrix& cm) {
    if (cm.num_classes() != 4)
        throw std::invalid_argument("remission_collapse: requires a 4x4 MES matrix");
    ConfusionMatrix out(2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out.at(i >= 2, j >= 2) += cm.at(i, j);
    return out;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_auc: length mismatch");
    long long pos = 0, neg = 0;
    for (int l : labels) {
        if (l != 0 && l != 1)
            throw std::invalid_argument("roc_auc: labels must be binary 0/1");
        (l == 1 ? pos : neg)++;
    }
    if (pos == 0 || neg == 0)
        throw std::runtime_error("roc_auc: undefined without both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    long long tp = 0, fp = 0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // consume the whole tie group at this threshold
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] == 1 ? tp : fp)++;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
        curve.points.push_back({threshold, fpr, tpr});
        curve.auc += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    return curve;
}

namespace {

// s_i for one sample; shared by the serial and parallel drivers so both
// produce identical values, summed in index order by the caller.
double silhouette_sample(const Matrix& points, std::span<const int> labels,
                         const std::vector<long long>& cluster_sizes, std::size_t i) {
    const int own = labels[i];
    std::vector<double> dist_sum(cluster_sizes.size(), 0.0);
    for (std::size_t j = 0; j < points.rows(); ++j) {
        if (j == i)
            continue;
        double d2 = 0.0;
        for (std::size_t f = 0; f < points.cols(); ++f) {
            const double diff = points(i, f) - points(j, f);
            d2 += diff * diff;
        }
        dist_sum[labels[j]] += std::sqrt(d2);
    }
    if (cluster_sizes[own] <= 1)
        return 0.0;  // singleton cluster
    const double a = dist_sum[own] / static_cast<double>(cluster_sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t cl = 0; cl < cluster_sizes.size(); ++cl) {
        if (static_cast<int>(cl) == own || cluster_sizes[cl] == 0)
            continue;
        b = std::min(b, dist_sum[cl] / static_cast<double>(cluster_sizes[cl]));
    }
    const double denom = std::max(a, b);
    return denom > 0.0 ? (b - a) / denom : 0.0;
}

std::vector<long long> silhouette_cluster_sizes(const Matrix& points,
                                                std::span<const int> labels) {
    if (points.rows() != labels.size())
        throw std::invalid_argument("silhouette: rows != labels");
    if (points.rows() == 0)
        throw std::invalid_argument("silhouette: empty input");
    int max_label = 0;
    for (int l : labels) {
        if (l < 0)
            throw std::invalid_argument("silhouette: negative label");
        max_label = std::max(max_label, l);
    }
    std::vector<long long> sizes(static_cast<std::size_t>(max_label) + 1, 0);
    for (int l : labels)
        ++sizes[l];
    const long long populated = std::count_if(sizes.begin(), sizes.end(),
                                              [](long long s) { return s > 0; });
    if (populated < 2)
        throw std::runtime_error("silhouette: undefined with a single cluster");
    return sizes;
}

} // namespace

double silhouette(const Matrix& points, std::span<const int> labels) {
    const std::vector<long long> sizes = silhouette_cluster_sizes(points, labels);
    const std::size_t n = points.rows();
    std::vector<double> s(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        s[i] = silhouette_sample(points, labels, sizes, static_cast<std::size_t>(i));
    double sum = 0.0;
    for (double si : s)
        sum += si;
    return sum / static_cast<double>(n);
}

double silhouette_serial(const Matrix& points, std::span<const int> labels) {
    const std::vector<long long> sizes = silhouette_cluster_sizes(points, labels);
    const std::size_t n = points.rows();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += silhouette_sample(points, labels, sizes, i);
    return sum / static_cast<double>(n);
}

} // namespace ordinal
