#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ordinal/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file");
    cmd->add_option("--seed", opts.seed, "master seed (overrides config)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--jobs", opts.jobs, "concurrent trials (overrides config)");
}

ordinal::ExperimentConfig resolve_config(const CommonOpts& opts, const CLI::App* cmd) {
    ordinal::ExperimentConfig cfg;
    if (!opts.config_path.empty())
        cfg = ordinal::load_config_file(opts.config_path);
    if (cfg.losses.empty())
        cfg.losses = ordinal::default_loss_grid();
    if (cmd->count("--seed"))
        cfg.master_seed = opts.seed;
    if (cmd->count("--out"))
        cfg.output_dir = opts.out_dir;
    if (cmd->count("--jobs"))
        cfg.jobs = opts.jobs;
    return cfg;
}

void print_summary(const ordinal::AggregateReport& report) {
    for (const ordinal::LossAggregate& agg : report.losses) {
        const auto mean = agg.mean.find("qwk");
        const auto sd = agg.stddev.find("qwk");
        if (mean == agg.mean.end() || std::isnan(mean->second)) {
            std::cout << agg.name << ": no completed trials\n";
            continue;
        }
        char line[128];
        std::snprintf(line, sizeof line, "%s: qwk %.4f ± %.4f (%d/%zu trials)",
                      agg.name.c_str(), mean->second, sd->second, agg.completed,
                      agg.trials.size());
        std::cout << line << '\n';
    }
    std::cout << "reports written to " << report.config.output_dir << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordinal loss benchmark harness"};
    app.require_subcommand(1);

    CommonOpts opts;

    CLI::App* bench = app.add_subcommand("bench", "run the multi-trial loss benchmark");
    add_common(bench, opts);

    std::vector<double> alphas = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CLI::App* sweep_a = app.add_subcommand("sweep-alpha", "benchmark cdw_ce across alphas");
    add_common(sweep_a, opts);
    sweep_a->add_option("--alphas", alphas, "alpha grid")->delimiter(',');

    double alpha = 5.0;
    std::vector<double> margins = {0.0, 0.0025, 0.025, 0.05};
    CLI::App* sweep_m =
        app.add_subcommand("sweep-margin", "benchmark cdw_ce_margin across margins");
    add_common(sweep_m, opts);
    sweep_m->add_option("--alpha", alpha, "fixed alpha");
    sweep_m->add_option("--margins", margins, "margin grid")->delimiter(',');

    std::string data_out = "dataset.csv";
    CLI::App* gen = app.add_subcommand("gen-data", "write the synthetic dataset as csv");
    gen->add_option("--config", opts.config_path, "JSON config file");
    gen->add_option("--seed", opts.seed, "master seed (overrides config)");
    gen->add_option("--out", data_out, "output csv path");

    std::string report_in = "out/aggregate.json";
    std::string report_format = "markdown";
    std::string report_out = "out";
    CLI::App* rep = app.add_subcommand("report", "re-emit a stored aggregate report");
    rep->add_option("--in", report_in, "aggregate.json to read");
    rep->add_option("--format", report_format, "json, csv or markdown")
        ->check(CLI::IsMember({"json", "csv", "markdown"}));
    rep->add_option("--out", report_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (bench->parsed()) {
            print_summary(ordinal::run_benchmark(resolve_config(opts, bench)));
        } else if (sweep_a->parsed()) {
            print_summary(ordinal::run_alpha_sweep(resolve_config(opts, sweep_a), alphas));
        } else if (sweep_m->parsed()) {
            print_summary(
                ordinal::run_margin_sweep(resolve_config(opts, sweep_m), alpha, margins));
        } else if (gen->parsed()) {
            ordinal::ExperimentConfig cfg;
            if (!opts.config_path.empty())
                cfg = ordinal::load_config_file(opts.config_path);
            if (gen->count("--seed"))
                cfg.master_seed = opts.seed;
            if (!cfg.csv_path.empty())
                throw std::invalid_argument("gen-data needs a synthetic dataset config");
            const ordinal::Dataset ds = ordinal::generate_synthetic(
                cfg.synthetic, ordinal::derive_seed(cfg.master_seed, 0));
            ordinal::save_csv(ds, data_out);
            std::cout << "wrote " << ds.size() << " rows to " << data_out << '\n';
        } else if (rep->parsed()) {
            std::ifstream in(report_in, std::ios::binary);
            if (!in)
                throw std::runtime_error("cannot open '" + report_in + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            const ordinal::AggregateReport report = ordinal::report_from_json(buf.str());
            ordinal::ReportFormat format = ordinal::ReportFormat::Markdown;
            if (report_format == "json")
                format = ordinal::ReportFormat::Json;
            else if (report_format == "csv")
                format = ordinal::ReportFormat::Csv;
            ordinal::emit_report(report, format, report_out);
            std::cout << "wrote " << report_format << " report to " << report_out << '\n';
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
