#ifndef ORDINAL_DATA_HPP
#define ORDINAL_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ordinal/numerics.hpp"

namespace ordinal {

struct SyntheticParams {
    int num_classes = 4;
    int input_dim = 8;
    int n_samples = 1000;
    std::vector<double> class_proportions = {0.541, 0.271, 0.111, 0.077};
    double class_center_spacing = 1.0;
    double noise_sigma = 0.8;
    // extra noise along the class-center axis only; raises between-class
    // overlap without widening the transverse spread
    double overlap_jitter = 0.0;

    void validate() const;
};

struct Dataset {
    enum class Source { Synthetic, Csv };

    Matrix X;
    std::vector<int> y;
    int num_classes = 0;
    std::vector<std::string> class_names; // optional, may be empty
    Source source = Source::Synthetic;
    std::uint64_t seed = 0;   // meaningful for Source::Synthetic
    std::string path;         // meaningful for Source::Csv

    std::size_t size() const { return y.size(); }
    std::vector<long long> class_counts() const;
};

struct SplitSpec {
    double train_fraction = 0.8;
    double val_fraction = 0.1;
    double test_fraction = 0.1;
    bool stratified = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SplitResult {
    Dataset train;
    Dataset val;
    Dataset test;
};

Dataset generate_synthetic(const SyntheticParams& params, std::uint64_t seed);

// expected_classes pins K up front; otherwise K is inferred as max label + 1
Dataset load_csv(const std::string& path, const std::string& label_column,
                 std::optional<int> expected_classes = std::nullopt);

void save_csv(const Dataset& ds, const std::string& path);

SplitResult split(const Dataset& ds, const SplitSpec& spec);

} // namespace ordinal

#endif
