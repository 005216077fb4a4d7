#ifndef ORDINAL_NUMERICS_HPP
#define ORDINAL_NUMERICS_HPP

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ordinal {

using Vector = std::vector<double>;

// Probabilities are clamped away from the log singularities with this
// epsilon inside loss evaluation; stored model outputs are never mutated.
inline constexpr double prob_eps = 1e-12;

/// Dense row-major matrix of doubles. Shape is fixed at construction;
/// all operations shape-check.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

/// A normalized class-probability distribution over K ordinal classes.
/// Construction validates: every component in [0,1], sum within 1e-9 of 1.
class ProbVector {
public:
    explicit ProbVector(Vector probs);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const Vector& values() const { return probs_; }

private:
    Vector probs_;
};

/// Numerically stable softmax (max subtraction). Requires finite logits,
/// length >= 2. Output components are strictly positive and sum to 1.
ProbVector softmax(std::span<const double> logits);

/// ln(1-p) for p in [0,1], computed without cancellation near p=0.
/// p >= 1-prob_eps is clamped to 1-prob_eps before the log.
double stable_log1m(double p);

double sigmoid(double x);

/// Deterministic child seed for (master_seed, stream); the basis for every
/// per-trial / per-epoch stream in the project.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream);

/// xoshiro256++ seeded through splitmix64. The same seed yields the same
/// stream on every platform; std::random distributions are avoided for
/// that reason.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed);

    /// Independent stream for (master_seed, stream_index) pairs, used to
    /// give each trial / epoch its own generator.
    static SeededRng derive(std::uint64_t master_seed, std::uint64_t stream);

    std::uint64_t next_u64();

    /// Uniform in [0,1) with 53-bit resolution.
    double next_double();

    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller; second value cached.
    double normal();

    /// Unbiased uniform integer in [0, bound); bound > 0.
    std::uint64_t next_below(std::uint64_t bound);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::vector<std::uint64_t> take(std::size_t n);

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace ordinal

#endif
