#include "ordinal/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ordinal {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: shape mismatch " + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " * " + std::to_string(b.rows()) +
                                    "x" + std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size())
        throw std::invalid_argument("matvec: shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        y[i] = dot(a.row(i), x);
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

ProbVector::ProbVector(Vector probs) : probs_(std::move(probs)) {
    if (probs_.empty())
        throw std::invalid_argument("ProbVector: empty");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("ProbVector: component outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("ProbVector: sum " + std::to_string(sum) + " not within 1e-9 of 1");
}

ProbVector softmax(std::span<const double> logits) {
    if (logits.size() < 2)
        throw std::invalid_argument("softmax: need at least 2 logits");
    double max_logit = -std::numeric_limits<double>::infinity();
    for (double z : logits) {
        if (!std::isfinite(z))
            throw std::invalid_argument("softmax: non-finite logit");
        max_logit = std::max(max_logit, z);
    }
    Vector p(logits.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - max_logit);
        denom += p[i];
    }
    constexpr double floor = std::numeric_limits<double>::min();
    for (double& pi : p)
        pi = std::max(pi / denom, floor);
    return ProbVector(std::move(p));
}

double stable_log1m(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("stable_log1m: p outside [0,1]");
    if (p > 1.0 - prob_eps)
        p = 1.0 - prob_eps;
    return std::log1p(-p);
}

double sigmoid(double x) {
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

SeededRng::SeededRng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_)
        word = splitmix64(s);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t x = master_seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    return splitmix64(x);
}

SeededRng SeededRng::derive(std::uint64_t master_seed, std::uint64_t stream) {
    return SeededRng(derive_seed(master_seed, stream));
}

std::uint64_t SeededRng::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double SeededRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
}

double SeededRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0,1] so the log stays finite
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t SeededRng::next_below(std::uint64_t bound) {
    if (bound == 0)
        throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold)
            return r % bound;
    }
}

std::vector<std::uint64_t> SeededRng::take(std::size_t n) {
    std::vector<std::uint64_t> out(n);
    for (auto& v : out)
        v = next_u64();
    return out;
}

} // namespace ordinal
