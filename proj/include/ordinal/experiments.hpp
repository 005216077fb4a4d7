#ifndef ORDINAL_EXPERIMENTS_HPP
#define ORDINAL_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ordinal/data.hpp"
#include "ordinal/losses.hpp"
#include "ordinal/metrics.hpp"
#include "ordinal/model.hpp"
#include "ordinal/trainer.hpp"

namespace ordinal {

struct ExperimentConfig {
    // dataset: synthetic unless csv_path is set
    SyntheticParams synthetic;
    std::string csv_path;
    std::string csv_label_column = "label";
    int csv_num_classes = 0; // 0 = infer from labels

    std::vector<int> hidden_dims = {32, 16};
    Activation activation = Activation::Tanh;
    TrainConfig train; // its seed field is ignored; seeds are derived per trial
    SplitSpec split;   // same for its seed field
    std::vector<LossSpec> losses;
    int n_trials = 10;
    std::uint64_t master_seed = 42;
    std::string output_dir = "out";
    int jobs = 1;

    void validate() const;
    int num_classes() const;
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// The six-loss benchmark column set: ce, mse_reg, corn, co2, ho2, cdw_ce(5).
std::vector<LossSpec> default_loss_grid();

struct TrialOutcome {
    int trial = 0;
    bool ok = false;
    std::string error; // divergence / undefined-metric message when !ok
    MetricBundle metrics;
    double dist2_fraction = 0.0; // share of test samples with |pred - true| >= 2
    TrainLog log;
    std::vector<long long> confusion; // K*K row-major, truth-major

    // pooled-ROC inputs, kept in memory only
    Matrix scores;
    std::vector<int> y_true;
};

struct LossAggregate {
    LossSpec spec;
    std::string name;
    std::vector<TrialOutcome> trials;
    int completed = 0; // trials that finished without error
    std::map<std::string, double> mean;
    std::map<std::string, double> stddev; // sample std over completed trials
    Matrix mean_confusion;
};

struct AggregateReport {
    ExperimentConfig config;
    std::vector<LossAggregate> losses;
};

/// Trains every loss across n_trials trials (shared per-trial split and
/// init seeds) and writes trials/*.json, aggregate.json, trials.csv,
/// summary.md, confusion_<loss>.csv and roc_<loss>_class<k>.csv under
/// config.output_dir.
AggregateReport run_benchmark(const ExperimentConfig& config);

/// Benchmark over cdw_ce with each alpha; adds sweep_alpha.csv.
AggregateReport run_alpha_sweep(const ExperimentConfig& base,
                                const std::vector<double>& alphas);

/// Benchmark over cdw_ce_margin at fixed alpha; adds sweep_margin.csv.
/// The m=0 column reproduces the plain cdw_ce run bit for bit.
AggregateReport run_margin_sweep(const ExperimentConfig& base, double alpha,
                                 const std::vector<double>& margins);

enum class ReportFormat { Json, Csv, Markdown };

void emit_report(const AggregateReport& report, ReportFormat format,
                 const std::string& output_dir);

std::string report_to_json(const AggregateReport& report);
AggregateReport report_from_json(const std::string& text);

} // namespace ordinal

#endif
