#include "ordinal/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ordinal {

namespace {

// round-half-up counts for n * weight, adjusted by largest remainder so the
// total comes out to exactly n
std::vector<long long> counts_from_weights(long long n, const std::vector<double>& weights) {
    std::vector<long long> counts(weights.size());
    std::vector<double> raw(weights.size());
    long long total = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        raw[i] = static_cast<double>(n) * weights[i];
        counts[i] = static_cast<long long>(std::floor(raw[i] + 0.5));
        total += counts[i];
    }
    while (total < n) {
        std::size_t best = 0;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            const double gap = raw[i] - static_cast<double>(counts[i]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        ++counts[best];
        ++total;
    }
    while (total > n) {
        std::size_t best = counts.size();
        double best_gap = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] == 0)
                continue;
            const double gap = raw[i] - static_cast<double>(counts[i]);
            if (best == counts.size() || gap < best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        --counts[best];
        --total;
    }
    return counts;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.X = Matrix(idx.size(), ds.X.cols());
    out.y.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < ds.X.cols(); ++c)
            out.X(r, c) = ds.X(idx[r], c);
        out.y[r] = ds.y[idx[r]];
    }
    out.num_classes = ds.num_classes;
    out.class_names = ds.class_names;
    out.source = ds.source;
    out.seed = ds.seed;
    out.path = ds.path;
    return out;
}

} // namespace

void SyntheticParams::validate() const {
    if (num_classes < 2)
        throw std::invalid_argument("SyntheticParams: num_classes must be >= 2");
    if (input_dim < 1)
        throw std::invalid_argument("SyntheticParams: input_dim must be >= 1");
    if (n_samples < num_classes)
        throw std::invalid_argument("SyntheticParams: n_samples must be >= num_classes");
    if (class_proportions.size() != static_cast<std::size_t>(num_classes))
        throw std::invalid_argument("SyntheticParams: proportions length != num_classes");
    double sum = 0.0;
    for (double p : class_proportions) {
        if (p <= 0.0)
            throw std::invalid_argument("SyntheticParams: proportions must all be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw std::invalid_argument("SyntheticParams: proportions must sum to 1");
    if (class_center_spacing < 0.0 || noise_sigma < 0.0 || overlap_jitter < 0.0)
        throw std::invalid_argument("SyntheticParams: spacing/sigma/jitter must be >= 0");
}

std::vector<long long> Dataset::class_counts() const {
    std::vector<long long> counts(static_cast<std::size_t>(num_classes), 0);
    for (int label : y) {
        if (label < 0 || label >= num_classes)
            throw std::out_of_range("Dataset: label outside [0, K)");
        ++counts[label];
    }
    return counts;
}

Dataset generate_synthetic(const SyntheticParams& params, std::uint64_t seed) {
    params.validate();
    SeededRng rng(seed);

    const std::size_t d = static_cast<std::size_t>(params.input_dim);
    std::vector<double> axis(d);
    double norm = 0.0;
    for (double& v : axis) {
        v = rng.normal();
        norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
        std::fill(axis.begin(), axis.end(), 0.0);
        axis[0] = 1.0;
    } else {
        for (double& v : axis)
            v /= norm;
    }

    std::vector<long long> counts =
        counts_from_weights(params.n_samples, params.class_proportions);
    // every class must appear at least once
    for (std::size_t k = 0; k < counts.size(); ++k) {
        while (counts[k] == 0) {
            std::size_t donor = static_cast<std::size_t>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
            --counts[donor];
            ++counts[k];
        }
    }

    Dataset ds;
    ds.X = Matrix(static_cast<std::size_t>(params.n_samples), d);
    ds.y.resize(static_cast<std::size_t>(params.n_samples));
    ds.num_classes = params.num_classes;
    ds.source = Dataset::Source::Synthetic;
    ds.seed = seed;

    std::size_t row = 0;
    for (int k = 0; k < params.num_classes; ++k) {
        const double offset = static_cast<double>(k) * params.class_center_spacing;
        for (long long s = 0; s < counts[k]; ++s, ++row) {
            const double along = params.overlap_jitter * rng.normal();
            for (std::size_t f = 0; f < d; ++f)
                ds.X(row, f) = offset * axis[f] + params.noise_sigma * rng.normal() +
                               along * axis[f];
            ds.y[row] = k;
        }
    }
    return ds;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 std::optional<int> expected_classes) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_csv: cannot open '" + path + "'");

    auto split_line = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (!line.empty() && line.back() == ',')
            cells.push_back("");
        return cells;
    };

    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("load_csv: '" + path + "' is empty");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const std::vector<std::string> header = split_line(line);
    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == label_column)
            label_idx = i;
    if (label_idx == header.size())
        throw std::invalid_argument("load_csv: label column '" + label_column +
                                    "' not in header");
    const std::size_t n_features = header.size() - 1;

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("load_csv: row " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        std::vector<double> features;
        features.reserve(n_features);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::size_t used = 0;
            if (c == label_idx) {
                long long label = 0;
                try {
                    label = std::stoll(cells[c], &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != cells[c].size())
                    throw std::runtime_error("load_csv: non-integer label at row " +
                                             std::to_string(line_no) + " col " +
                                             std::to_string(c + 1));
                if (label < 0)
                    throw std::invalid_argument("load_csv: negative label at row " +
                                                std::to_string(line_no));
                labels.push_back(static_cast<int>(label));
            } else {
                double value = 0.0;
                try {
                    value = std::stod(cells[c], &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != cells[c].size())
                    throw std::runtime_error("load_csv: non-numeric cell at row " +
                                             std::to_string(line_no) + " col " +
                                             std::to_string(c + 1));
                features.push_back(value);
            }
        }
        rows.push_back(std::move(features));
    }
    if (rows.empty())
        throw std::invalid_argument("load_csv: '" + path + "' has a header but no rows");

    int max_label = *std::max_element(labels.begin(), labels.end());
    int num_classes = max_label + 1;
    if (expected_classes) {
        if (*expected_classes < 2)
            throw std::invalid_argument("load_csv: expected_classes must be >= 2");
        if (max_label >= *expected_classes)
            throw std::invalid_argument("load_csv: label " + std::to_string(max_label) +
                                        " outside declared " +
                                        std::to_string(*expected_classes) + " classes");
        num_classes = *expected_classes;
    } else if (num_classes < 2) {
        num_classes = 2;
    }

    Dataset ds;
    ds.X = Matrix(rows.size(), n_features);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < n_features; ++c)
            ds.X(r, c) = rows[r][c];
    ds.y = std::move(labels);
    ds.num_classes = num_classes;
    ds.source = Dataset::Source::Csv;
    ds.path = path;
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_csv: cannot open '" + path + "'");
    for (std::size_t c = 0; c < ds.X.cols(); ++c)
        out << 'f' << c << ',';
    out << "label\n";
    char buf[64];
    for (std::size_t r = 0; r < ds.X.rows(); ++r) {
        for (std::size_t c = 0; c < ds.X.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.X(r, c));
            out << buf << ',';
        }
        out << ds.y[r] << '\n';
    }
}

void SplitSpec::validate() const {
    if (train_fraction < 0.0 || val_fraction < 0.0 || test_fraction < 0.0)
        throw std::invalid_argument("SplitSpec: fractions must be >= 0");
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
        throw std::invalid_argument("SplitSpec: fractions must sum to 1");
}

SplitResult split(const Dataset& ds, const SplitSpec& spec) {
    spec.validate();
    if (ds.size() == 0)
        throw std::invalid_argument("split: empty dataset");
    const std::vector<double> fractions = {spec.train_fraction, spec.val_fraction,
                                           spec.test_fraction};
    int active_splits = 0;
    for (double f : fractions)
        if (f > 0.0)
            ++active_splits;

    SeededRng rng(spec.seed);
    std::vector<std::size_t> train_idx, val_idx, test_idx;
    auto assign = [&](std::vector<std::size_t>& pool) {
        const std::vector<long long> take =
            counts_from_weights(static_cast<long long>(pool.size()), fractions);
        std::size_t at = 0;
        for (long long i = 0; i < take[0]; ++i)
            train_idx.push_back(pool[at++]);
        for (long long i = 0; i < take[1]; ++i)
            val_idx.push_back(pool[at++]);
        for (long long i = 0; i < take[2]; ++i)
            test_idx.push_back(pool[at++]);
    };

    if (spec.stratified) {
        const std::vector<long long> counts = ds.class_counts();
        for (int k = 0; k < ds.num_classes; ++k)
            if (counts[k] < active_splits)
                throw std::invalid_argument("split: class " + std::to_string(k) + " has " +
                                            std::to_string(counts[k]) +
                                            " samples, fewer than the " +
                                            std::to_string(active_splits) + " active splits");
        for (int k = 0; k < ds.num_classes; ++k) {
            std::vector<std::size_t> pool;
            for (std::size_t i = 0; i < ds.size(); ++i)
                if (ds.y[i] == k)
                    pool.push_back(i);
            rng.shuffle(pool);
            assign(pool);
        }
    } else {
        std::vector<std::size_t> pool(ds.size());
        std::iota(pool.begin(), pool.end(), 0);
        rng.shuffle(pool);
        assign(pool);
    }

    SplitResult result;
    result.train = subset(ds, train_idx);
    result.val = subset(ds, val_idx);
    result.test = subset(ds, test_idx);
    return result;
}

} // namespace ordinal
