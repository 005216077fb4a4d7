#ifndef ORDINAL_TEST_ORACLES_HPP
#define ORDINAL_TEST_ORACLES_HPP

// Reference implementations used only by tests. Everything here transcribes
// the defining formula as literally as possible, independent of the library
// code paths, so that agreement is evidence and not tautology.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ordinal/losses.hpp"
#include "ordinal/numerics.hpp"

namespace oracle {

// |a-b| relative to the larger magnitude; the floor keeps exact-zero and
// noise-level components from dividing by ~0.
inline double rel_err(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-5});
    return std::fabs(a - b) / scale;
}

template <typename F>
double central_diff(F&& f, std::vector<double> x, std::size_t i, double h) {
    x[i] += h;
    const double hi = f(x);
    x[i] -= 2.0 * h;
    const double lo = f(x);
    return (hi - lo) / (2.0 * h);
}

struct FdReport {
    double max_rel_err = 0.0;
    int checked = 0;  // components compared against a central difference
    int skipped = 0;  // components excluded for sitting next to a kink
};

// Central-difference check of one loss gradient. skip(i) marks components
// whose +-h probes would straddle a kink (relu arms, the margin clamp).
template <typename Loss, typename Skip>
void fd_check(Loss&& loss, const std::vector<double>& x, double h, Skip&& skip, FdReport& rep) {
    const ordinal::LossResult base = loss(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (skip(i)) {
            ++rep.skipped;
            continue;
        }
        auto value_at = [&](const std::vector<double>& p) { return loss(p).value; };
        const double fd = central_diff(value_at, x, i, h);
        rep.max_rel_err = std::max(rep.max_rel_err, rel_err(base.grad[i], fd));
        ++rep.checked;
    }
}

// Random draws for every loss kind; returns one report per loss name.
// Hyperparameters stay in moderate ranges: the formulas do not branch on
// them, and extreme alpha makes the loss value so large that h=1e-6 central
// differences drown in cancellation noise for small-gradient components.
inline std::vector<std::pair<std::string, FdReport>> fd_check_losses(std::uint64_t seed,
                                                                     int n_draws) {
    using ordinal::SeededRng;
    const double h = 1e-6;
    SeededRng rng(seed);

    auto draw_probs = [&](int k) {
        std::vector<double> logits(k);
        for (double& l : logits)
            l = rng.uniform(-3.0, 3.0);
        return ordinal::softmax(logits).values();
    };
    auto no_skip = [](std::size_t) { return false; };
    // components touching an adjacent pair whose relu argument sits within
    // 1e-6 of zero are excluded
    auto relu_skip = [](const std::vector<double>& p, int c, double delta) {
        std::vector<bool> skip(p.size(), false);
        for (std::size_t pr = 0; pr + 1 < p.size(); ++pr) {
            const bool rising = pr < static_cast<std::size_t>(c);
            const double arg = rising ? delta + p[pr] - p[pr + 1] : delta + p[pr + 1] - p[pr];
            if (std::fabs(arg) <= 1e-6)
                skip[pr] = skip[pr + 1] = true;
        }
        return skip;
    };

    std::vector<std::pair<std::string, FdReport>> out;

    {  // ce
        FdReport rep;
        for (int d = 0; d < n_draws; ++d) {
            const int k = 2 + static_cast<int>(rng.next_below(5));
            const std::vector<double> p = draw_probs(k);
            const int c = static_cast<int>(rng.next_below(k));
            fd_check([&](const std::vector<double>& q) { return ordinal::ce_loss(q, c); }, p, h,
                     no_skip, rep);
        }
        out.emplace_back("ce", rep);
    }
    {  // cdw_ce
        FdReport rep;
        for (int d = 0; d < n_draws; ++d) {
            const int k = 2 + static_cast<int>(rng.next_below(5));
            const std::vector<double> p = draw_probs(k);
            const int c = static_cast<int>(rng.next_below(k));
            const double alpha = rng.uniform(0.2, 5.0);
            fd_check([&](const std::vector<double>& q) { return ordinal::cdw_ce_loss(q, c, alpha); },
                     p, h, no_skip, rep);
        }
        out.emplace_back("cdw_ce", rep);
    }
    {  // cdw_ce_margin; the clamp boundary needs a wider berth because the
       // slope behind it grows like 1/(1 - y - m)
        FdReport rep;
        for (int d = 0; d < n_draws; ++d) {
            const int k = 2 + static_cast<int>(rng.next_below(5));
            const std::vector<double> p = draw_probs(k);
            const int c = static_cast<int>(rng.next_below(k));
            const double alpha = rng.uniform(0.2, 4.0);
            const double m = rng.uniform(0.0, 0.45);
            auto skip = [&](std::size_t i) {
                return std::fabs(p[i] + m - (1.0 - ordinal::prob_eps)) <= 1e-4;
            };
            fd_check(
                [&](const std::vector<double>& q) {
                    return ordinal::cdw_ce_margin_loss(q, c, alpha, m);
                },
                p, h, skip, rep);
        }
        out.emplace_back("cdw_ce_margin", rep);
    }
    {  // co2
        FdReport rep;
        for (int d = 0; d < n_draws; ++d) {
            const int k = 2 + static_cast<int>(rng.next_below(5));
            const std::vector<double> p = draw_probs(k);
            const int c = static_cast<int>(rng.next_below(k));
            const double lambda = rng.uniform(0.05, 1.0);
            const double delta = rng.uniform(0.0, 0.2);
            const std::vector<bool> skip = relu_skip(p, c, delta);
            fd_check(
                [&](const std::vector<double>& q) {
                    return ordinal::co2_loss(q, c, lambda, delta);
                },
                p, h, [&](std::size_t i) { return skip[i]; }, rep);
        }
        out.emplace_back("co2", rep);
    }
    {  // ho2
        FdReport rep;
        for (int d = 0; d < n_draws; ++d) {
            const int k = 2 + static_cast<int>(rng.next_below(5));
            const std::vector<double> p = draw_probs(k);
            const int c = static_cast<int>(rng.next_below(k));
            const double lambda = rng.uniform(0.05, 1.0);
            const double delta = rng.uniform(0.0, 0.2);
            const std::vector<bool> skip = relu_skip(p, c, delta);
            fd_check(
                [&](const std::vector<double>& q) {
                    return ordinal::ho2_loss(q, c, lambda, delta);
                },
                p, h, [&](std::size_t i) { return skip[i]; }, rep);
        }
        out.emplace_back("ho2", rep);
    }
    {  // corn on raw logits
        FdReport rep;
        for (int d = 0; d < n_draws; ++d) {
            const int k = 2 + static_cast<int>(rng.next_below(5));
            std::vector<double> logits(k - 1);
            for (double& l : logits)
                l = rng.uniform(-4.0, 4.0);
            const int c = static_cast<int>(rng.next_below(k));
            fd_check([&](const std::vector<double>& q) { return ordinal::corn_loss(q, c); },
                     logits, h, no_skip, rep);
        }
        out.emplace_back("corn", rep);
    }
    {  // mse_reg on the single raw output
        FdReport rep;
        for (int d = 0; d < n_draws; ++d) {
            const int k = 2 + static_cast<int>(rng.next_below(5));
            const std::vector<double> raw = {rng.uniform(-4.0, 4.0)};
            const int c = static_cast<int>(rng.next_below(k));
            fd_check(
                [&](const std::vector<double>& q) {
                    return ordinal::mse_reg_loss(q[0], c, k);
                },
                raw, h, no_skip, rep);
        }
        out.emplace_back("mse_reg", rep);
    }
    return out;
}

// ---- metric references, straight from the definitions ----

inline std::vector<std::vector<double>> count_matrix(std::span<const int> y_true,
                                                     std::span<const int> y_pred, int k) {
    std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < y_true.size(); ++i)
        o[y_true[i]][y_pred[i]] += 1.0;
    return o;
}

inline double qwk_direct(std::span<const int> y_true, std::span<const int> y_pred, int k) {
    const auto o = count_matrix(y_true, y_pred, k);
    const double n = static_cast<double>(y_true.size());
    std::vector<double> row(k, 0.0), col(k, 0.0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            row[i] += o[i][j];
            col[j] += o[i][j];
        }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double w = static_cast<double>((i - j) * (i - j)) / ((k - 1.0) * (k - 1.0));
            num += w * o[i][j];
            den += w * row[i] * col[j] / n;
        }
    return 1.0 - num / den;
}

inline double kappa_direct(std::span<const int> y_true, std::span<const int> y_pred, int k) {
    const auto o = count_matrix(y_true, y_pred, k);
    const double n = static_cast<double>(y_true.size());
    double po = 0.0, pe = 0.0;
    for (int i = 0; i < k; ++i) {
        po += o[i][i] / n;
        double row = 0.0, col = 0.0;
        for (int j = 0; j < k; ++j) {
            row += o[i][j];
            col += o[j][i];
        }
        pe += (row / n) * (col / n);
    }
    return (po - pe) / (1.0 - pe);
}

inline double macro_f1_direct(std::span<const int> y_true, std::span<const int> y_pred, int k) {
    const auto o = count_matrix(y_true, y_pred, k);
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
        double tp = o[c][c], fp = 0.0, fn = 0.0;
        for (int i = 0; i < k; ++i) {
            if (i != c) {
                fp += o[i][c];
                fn += o[c][i];
            }
        }
        const double denom = 2.0 * tp + fp + fn;
        sum += denom == 0.0 ? 0.0 : 2.0 * tp / denom;
    }
    return sum / k;
}

inline double mae_direct(std::span<const int> y_true, std::span<const int> y_pred) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i)
        sum += std::fabs(static_cast<double>(y_true[i]) - y_pred[i]);
    return sum / static_cast<double>(y_true.size());
}

// probability that a positive outranks a negative, ties worth 1/2
inline double auc_pairwise(std::span<const int> labels, std::span<const double> scores) {
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1)
            continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != 0)
                continue;
            pairs += 1.0;
            if (scores[i] > scores[j])
                wins += 1.0;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / pairs;
}

inline double silhouette_direct(const ordinal::Matrix& x, std::span<const int> labels) {
    const std::size_t n = x.rows();
    const int k = 1 + *std::max_element(labels.begin(), labels.end());
    auto dist = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t f = 0; f < x.cols(); ++f) {
            const double d = x(a, f) - x(b, f);
            s += d * d;
        }
        return std::sqrt(s);
    };
    std::vector<double> cluster_size(k, 0.0);
    for (int l : labels)
        cluster_size[l] += 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> mean_dist(k, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                mean_dist[labels[j]] += dist(i, j);
        const int own = labels[i];
        if (cluster_size[own] <= 1.0)
            continue;  // singleton contributes s = 0
        const double a = mean_dist[own] / (cluster_size[own] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (int cl = 0; cl < k; ++cl)
            if (cl != own && cluster_size[cl] > 0.0)
                b = std::min(b, mean_dist[cl] / cluster_size[cl]);
        if (std::max(a, b) > 0.0)
            total += (b - a) / std::max(a, b);  // coincident points score 0
    }
    return total / static_cast<double>(n);
}

} // namespace oracle

#endif
