#include "ordinal/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ordinal {

namespace {

using nlohmann::json;

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out)
        throw std::runtime_error("short write to '" + path + "'");
}

double json_double(const json& j) {
    return j.is_null() ? nan_value : j.get<double>();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k)
                known = true;
        if (!known)
            throw std::invalid_argument(std::string("config: unknown key '") + it.key() +
                                        "' in " + where);
    }
}

json loss_spec_to_json(const LossSpec& spec) {
    json o;
    o["kind"] = loss_kind_name(spec.kind);
    if (spec.num_classes != 0)
        o["num_classes"] = spec.num_classes;
    if (spec.alpha)
        o["alpha"] = *spec.alpha;
    if (spec.margin)
        o["margin"] = *spec.margin;
    if (spec.lambda)
        o["lambda"] = *spec.lambda;
    if (spec.delta)
        o["delta"] = *spec.delta;
    return o;
}

LossSpec loss_spec_from_json(const json& o) {
    check_keys(o, {"kind", "num_classes", "alpha", "margin", "lambda", "delta"}, "losses[]");
    LossSpec s;
    s.kind = loss_kind_from_name(o.at("kind").get<std::string>());
    if (o.contains("num_classes"))
        s.num_classes = o["num_classes"].get<int>();
    if (o.contains("alpha"))
        s.alpha = o["alpha"].get<double>();
    if (o.contains("margin"))
        s.margin = o["margin"].get<double>();
    if (o.contains("lambda"))
        s.lambda = o["lambda"].get<double>();
    if (o.contains("delta"))
        s.delta = o["delta"].get<double>();
    return s;
}

json config_to_json_obj(const ExperimentConfig& c) {
    json o;
    if (c.csv_path.empty()) {
        o["dataset"] = {
            {"type", "synthetic"},
            {"num_classes", c.synthetic.num_classes},
            {"input_dim", c.synthetic.input_dim},
            {"n_samples", c.synthetic.n_samples},
            {"class_proportions", c.synthetic.class_proportions},
            {"class_center_spacing", c.synthetic.class_center_spacing},
            {"noise_sigma", c.synthetic.noise_sigma},
            {"overlap_jitter", c.synthetic.overlap_jitter},
        };
    } else {
        o["dataset"] = {
            {"type", "csv"},
            {"path", c.csv_path},
            {"label_column", c.csv_label_column},
            {"num_classes", c.csv_num_classes},
        };
    }
    o["model"] = {
        {"hidden_dims", c.hidden_dims},
        {"activation", activation_name(c.activation)},
    };
    o["train"] = {
        {"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"learning_rate", c.train.learning_rate},
        {"momentum", c.train.momentum},
        {"selection_metric", selection_metric_name(c.train.selection_metric)},
        {"patience", c.train.patience},
        {"shuffle", c.train.shuffle},
    };
    o["split"] = {
        {"train_fraction", c.split.train_fraction},
        {"val_fraction", c.split.val_fraction},
        {"test_fraction", c.split.test_fraction},
        {"stratified", c.split.stratified},
    };
    o["losses"] = json::array();
    for (const LossSpec& s : c.losses)
        o["losses"].push_back(loss_spec_to_json(s));
    o["n_trials"] = c.n_trials;
    o["master_seed"] = c.master_seed;
    o["output_dir"] = c.output_dir;
    o["jobs"] = c.jobs;
    return o;
}

ExperimentConfig config_from_json_obj(const json& o) {
    check_keys(o,
               {"dataset", "model", "train", "split", "losses", "n_trials", "master_seed",
                "output_dir", "jobs"},
               "top level");
    ExperimentConfig c;
    if (o.contains("dataset")) {
        const json& d = o["dataset"];
        const std::string type = d.value("type", std::string("synthetic"));
        if (type == "synthetic") {
            check_keys(d,
                       {"type", "num_classes", "input_dim", "n_samples", "class_proportions",
                        "class_center_spacing", "noise_sigma", "overlap_jitter"},
                       "dataset");
            SyntheticParams& p = c.synthetic;
            p.num_classes = d.value("num_classes", p.num_classes);
            p.input_dim = d.value("input_dim", p.input_dim);
            p.n_samples = d.value("n_samples", p.n_samples);
            if (d.contains("class_proportions"))
                p.class_proportions = d["class_proportions"].get<std::vector<double>>();
            else if (p.num_classes != 4)
                p.class_proportions.assign(p.num_classes,
                                           1.0 / static_cast<double>(p.num_classes));
            p.class_center_spacing = d.value("class_center_spacing", p.class_center_spacing);
            p.noise_sigma = d.value("noise_sigma", p.noise_sigma);
            p.overlap_jitter = d.value("overlap_jitter", p.overlap_jitter);
        } else if (type == "csv") {
            check_keys(d, {"type", "path", "label_column", "num_classes"}, "dataset");
            c.csv_path = d.at("path").get<std::string>();
            c.csv_label_column = d.value("label_column", c.csv_label_column);
            c.csv_num_classes = d.value("num_classes", 0);
        } else {
            throw std::invalid_argument("config: dataset type must be synthetic or csv");
        }
    }
    if (o.contains("model")) {
        const json& m = o["model"];
        check_keys(m, {"hidden_dims", "activation"}, "model");
        if (m.contains("hidden_dims"))
            c.hidden_dims = m["hidden_dims"].get<std::vector<int>>();
        if (m.contains("activation"))
            c.activation = activation_from_name(m["activation"].get<std::string>());
    }
    if (o.contains("train")) {
        const json& t = o["train"];
        check_keys(t,
                   {"epochs", "batch_size", "learning_rate", "momentum", "selection_metric",
                    "patience", "shuffle"},
                   "train");
        c.train.epochs = t.value("epochs", c.train.epochs);
        c.train.batch_size = t.value("batch_size", c.train.batch_size);
        c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
        c.train.momentum = t.value("momentum", c.train.momentum);
        if (t.contains("selection_metric"))
            c.train.selection_metric =
                selection_metric_from_name(t["selection_metric"].get<std::string>());
        c.train.patience = t.value("patience", c.train.patience);
        c.train.shuffle = t.value("shuffle", c.train.shuffle);
    }
    if (o.contains("split")) {
        const json& s = o["split"];
        check_keys(s, {"train_fraction", "val_fraction", "test_fraction", "stratified"},
                   "split");
        c.split.train_fraction = s.value("train_fraction", c.split.train_fraction);
        c.split.val_fraction = s.value("val_fraction", c.split.val_fraction);
        c.split.test_fraction = s.value("test_fraction", c.split.test_fraction);
        c.split.stratified = s.value("stratified", c.split.stratified);
    }
    if (o.contains("losses")) {
        c.losses.clear();
        for (const json& e : o["losses"])
            c.losses.push_back(loss_spec_from_json(e));
    }
    c.n_trials = o.value("n_trials", c.n_trials);
    c.master_seed = o.value("master_seed", c.master_seed);
    c.output_dir = o.value("output_dir", c.output_dir);
    c.jobs = o.value("jobs", c.jobs);
    return c;
}

json metrics_to_json(const MetricBundle& m, double dist2) {
    json o;
    o["qwk"] = m.qwk;
    o["kappa"] = m.kappa;
    o["accuracy"] = m.accuracy;
    o["macro_f1"] = m.macro_f1;
    o["mae"] = m.mae;
    o["dist2_fraction"] = dist2;
    o["silhouette"] = m.silhouette;
    o["remission_kappa"] = m.remission_kappa;
    o["remission_f1"] = m.remission_f1;
    o["remission_accuracy"] = m.remission_accuracy;
    o["per_class_auc"] = m.per_class_auc;
    return o;
}

void metrics_from_json(const json& o, MetricBundle& m, double& dist2) {
    m.qwk = json_double(o.at("qwk"));
    m.kappa = json_double(o.at("kappa"));
    m.accuracy = json_double(o.at("accuracy"));
    m.macro_f1 = json_double(o.at("macro_f1"));
    m.mae = json_double(o.at("mae"));
    dist2 = json_double(o.at("dist2_fraction"));
    m.silhouette = json_double(o.at("silhouette"));
    m.remission_kappa = json_double(o.at("remission_kappa"));
    m.remission_f1 = json_double(o.at("remission_f1"));
    m.remission_accuracy = json_double(o.at("remission_accuracy"));
    m.per_class_auc.clear();
    for (const json& e : o.at("per_class_auc"))
        m.per_class_auc.push_back(json_double(e));
}

std::map<std::string, double> metric_map(const TrialOutcome& o) {
    std::map<std::string, double> m;
    m["qwk"] = o.metrics.qwk;
    m["kappa"] = o.metrics.kappa;
    m["accuracy"] = o.metrics.accuracy;
    m["macro_f1"] = o.metrics.macro_f1;
    m["mae"] = o.metrics.mae;
    m["dist2_fraction"] = o.dist2_fraction;
    m["silhouette"] = o.metrics.silhouette;
    m["remission_kappa"] = o.metrics.remission_kappa;
    m["remission_f1"] = o.metrics.remission_f1;
    m["remission_accuracy"] = o.metrics.remission_accuracy;
    for (std::size_t k = 0; k < o.metrics.per_class_auc.size(); ++k)
        m["auc_class_" + std::to_string(k)] = o.metrics.per_class_auc[k];
    return m;
}

json confusion_to_json(const std::vector<long long>& counts, int k) {
    json rows = json::array();
    for (int i = 0; i < k; ++i) {
        json row = json::array();
        for (int j = 0; j < k; ++j)
            row.push_back(counts[static_cast<std::size_t>(i) * k + j]);
        rows.push_back(row);
    }
    return rows;
}

json train_log_to_json_obj(const TrainLog& log) {
    json o;
    o["train_loss"] = log.train_loss;
    o["val_metric"] = log.val_metric;
    o["selected_epoch"] = log.selected_epoch;
    return o;
}

std::array<std::uint64_t, 3> trial_seeds(std::uint64_t master_seed, int trial) {
    const std::uint64_t root = derive_seed(master_seed, 1);
    const std::uint64_t trial_seed = derive_seed(root, static_cast<std::uint64_t>(trial));
    return {derive_seed(trial_seed, 0), derive_seed(trial_seed, 1), derive_seed(trial_seed, 2)};
}

Dataset build_dataset(const ExperimentConfig& cfg) {
    if (cfg.csv_path.empty())
        return generate_synthetic(cfg.synthetic, derive_seed(cfg.master_seed, 0));
    std::optional<int> k;
    if (cfg.csv_num_classes != 0)
        k = cfg.csv_num_classes;
    return load_csv(cfg.csv_path, cfg.csv_label_column, k);
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const SplitResult& sp,
                       const LossSpec& loss, int trial) {
    TrialOutcome out;
    out.trial = trial;
    const std::array<std::uint64_t, 3> seeds = trial_seeds(cfg.master_seed, trial);
    try {
        MlpConfig mc;
        mc.input_dim = static_cast<int>(sp.train.X.cols());
        mc.hidden_dims = cfg.hidden_dims;
        mc.head = required_head(loss.kind);
        mc.num_classes = loss.num_classes;
        mc.activation = cfg.activation;
        mc.init_seed = seeds[1];
        TrainConfig tc = cfg.train;
        tc.seed = seeds[2];

        const TrainResult tr = train(init_model(mc), loss, sp.train, sp.val, tc);
        out.log = tr.log;

        const EvalResult ev = evaluate(tr.model, loss, sp.test.X, sp.test.y, false);
        const int k = loss.num_classes;
        const ConfusionMatrix cm = confusion(sp.test.y, ev.predictions.labels, k);
        out.metrics.qwk = qwk(cm);
        out.metrics.kappa = cohen_kappa(cm);
        out.metrics.accuracy = accuracy(cm);
        out.metrics.macro_f1 = macro_f1(cm);
        out.metrics.mae = mae(sp.test.y, ev.predictions.labels);

        long long far = 0;
        for (std::size_t i = 0; i < sp.test.size(); ++i)
            if (std::abs(sp.test.y[i] - ev.predictions.labels[i]) >= 2)
                ++far;
        out.dist2_fraction = static_cast<double>(far) / static_cast<double>(sp.test.size());

        if (k == 4) {
            const ConfusionMatrix rc = remission_collapse(cm);
            out.metrics.remission_kappa = cohen_kappa(rc);
            // positive class = non-remission {2,3}
            out.metrics.remission_f1 = per_class_f1(rc)[1];
            out.metrics.remission_accuracy = accuracy(rc);
        } else {
            out.metrics.remission_kappa = nan_value;
            out.metrics.remission_f1 = nan_value;
            out.metrics.remission_accuracy = nan_value;
        }

        if (required_head(loss.kind) != HeadKind::Regression) {
            out.metrics.per_class_auc.assign(static_cast<std::size_t>(k), nan_value);
            for (int cls = 0; cls < k; ++cls) {
                std::vector<double> col(sp.test.size());
                std::vector<int> bin(sp.test.size());
                for (std::size_t i = 0; i < sp.test.size(); ++i) {
                    col[i] = ev.predictions.scores(i, static_cast<std::size_t>(cls));
                    bin[i] = sp.test.y[i] == cls ? 1 : 0;
                }
                try {
                    out.metrics.per_class_auc[cls] = roc_auc(col, bin).auc;
                } catch (const std::runtime_error&) {
                    // single-class fold: this class's AUC stays undefined
                }
            }
        }

        const Matrix features = extract_features(tr.model, sp.test.X);
        out.metrics.silhouette = silhouette(features, sp.test.y);

        out.confusion.resize(static_cast<std::size_t>(k) * k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                out.confusion[static_cast<std::size_t>(i) * k + j] = cm.at(i, j);
        out.scores = ev.predictions.scores;
        out.y_true = sp.test.y;
        out.ok = true;
    } catch (const std::runtime_error& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

void aggregate_loss(LossAggregate& agg) {
    const int k = agg.spec.num_classes;
    agg.completed = 0;
    agg.mean.clear();
    agg.stddev.clear();
    agg.mean_confusion = Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    std::vector<std::map<std::string, double>> rows;
    for (const TrialOutcome& t : agg.trials)
        if (t.ok)
            rows.push_back(metric_map(t));
    agg.completed = static_cast<int>(rows.size());
    if (rows.empty())
        return;
    for (const auto& [key, first] : rows.front()) {
        (void)first;
        double sum = 0.0;
        for (const auto& r : rows)
            sum += r.at(key);
        const double mean = sum / static_cast<double>(rows.size());
        double var = 0.0;
        for (const auto& r : rows) {
            const double d = r.at(key) - mean;
            var += d * d;
        }
        agg.mean[key] = mean;
        agg.stddev[key] =
            rows.size() > 1 ? std::sqrt(var / static_cast<double>(rows.size() - 1)) : 0.0;
    }
    for (const TrialOutcome& t : agg.trials) {
        if (!t.ok)
            continue;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                agg.mean_confusion(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +=
                    static_cast<double>(t.confusion[static_cast<std::size_t>(i) * k + j]);
    }
    for (double& v : agg.mean_confusion.data())
        v /= static_cast<double>(agg.completed);
}

double agg_stat(const std::map<std::string, double>& m, const std::string& key) {
    const auto it = m.find(key);
    return it == m.end() ? nan_value : it->second;
}

void write_trial_files(const AggregateReport& report) {
    const std::string dir = report.config.output_dir + "/trials";
    for (const LossAggregate& agg : report.losses) {
        for (const TrialOutcome& t : agg.trials) {
            const std::array<std::uint64_t, 3> seeds =
                trial_seeds(report.config.master_seed, t.trial);
            json j;
            j["trial"] = t.trial;
            j["loss"] = agg.name;
            j["ok"] = t.ok;
            j["error"] = t.error;
            j["seeds"] = {{"split", seeds[0]}, {"init", seeds[1]}, {"train", seeds[2]}};
            if (t.ok) {
                j["metrics"] = metrics_to_json(t.metrics, t.dist2_fraction);
                j["confusion"] = confusion_to_json(t.confusion, agg.spec.num_classes);
                j["train_log"] = train_log_to_json_obj(t.log);
            } else {
                j["metrics"] = nullptr;
                j["confusion"] = nullptr;
                j["train_log"] = nullptr;
            }
            char tag[16];
            std::snprintf(tag, sizeof tag, "%03d", t.trial);
            write_file(dir + "/trial_" + tag + "_" + agg.name + ".json", j.dump(2) + "\n");
        }
    }
}

void write_confusion_csvs(const AggregateReport& report) {
    for (const LossAggregate& agg : report.losses) {
        std::string csv;
        for (std::size_t i = 0; i < agg.mean_confusion.rows(); ++i) {
            for (std::size_t j = 0; j < agg.mean_confusion.cols(); ++j) {
                if (j)
                    csv += ',';
                csv += g17(agg.mean_confusion(i, j));
            }
            csv += '\n';
        }
        write_file(report.config.output_dir + "/confusion_" + agg.name + ".csv", csv);
    }
}

void write_roc_csvs(const AggregateReport& report) {
    for (const LossAggregate& agg : report.losses) {
        if (required_head(agg.spec.kind) == HeadKind::Regression)
            continue;
        const int k = agg.spec.num_classes;
        for (int cls = 0; cls < k; ++cls) {
            // pool scores over completed trials in trial order
            std::vector<double> scores;
            std::vector<int> bin;
            for (const TrialOutcome& t : agg.trials) {
                if (!t.ok || t.scores.rows() == 0)
                    continue;
                for (std::size_t i = 0; i < t.scores.rows(); ++i) {
                    scores.push_back(t.scores(i, static_cast<std::size_t>(cls)));
                    bin.push_back(t.y_true[i] == cls ? 1 : 0);
                }
            }
            std::string csv = "threshold,fpr,tpr\n";
            if (!scores.empty()) {
                try {
                    const RocCurve curve = roc_auc(scores, bin);
                    for (const RocPoint& p : curve.points)
                        csv += g17(p.threshold) + "," + g17(p.fpr) + "," + g17(p.tpr) + "\n";
                } catch (const std::runtime_error&) {
                    // pooled labels single-class: emit the header only
                }
            }
            write_file(report.config.output_dir + "/roc_" + agg.name + "_class" +
                           std::to_string(cls) + ".csv",
                       csv);
        }
    }
}

} // namespace

void ExperimentConfig::validate() const {
    if (n_trials < 1)
        throw std::invalid_argument("ExperimentConfig: n_trials must be >= 1");
    if (losses.empty())
        throw std::invalid_argument("ExperimentConfig: loss grid must be non-empty");
    if (jobs < 1)
        throw std::invalid_argument("ExperimentConfig: jobs must be >= 1");
    if (output_dir.empty())
        throw std::invalid_argument("ExperimentConfig: output_dir must be set");
    if (hidden_dims.empty())
        throw std::invalid_argument("ExperimentConfig: hidden_dims must be non-empty");
    for (int d : hidden_dims)
        if (d < 1)
            throw std::invalid_argument("ExperimentConfig: hidden dims must be >= 1");
    train.validate();
    split.validate();
    if (csv_path.empty())
        synthetic.validate();
    else if (csv_num_classes != 0 && csv_num_classes < 2)
        throw std::invalid_argument("ExperimentConfig: csv num_classes must be >= 2");
    for (std::size_t a = 0; a < losses.size(); ++a)
        for (std::size_t b = a + 1; b < losses.size(); ++b)
            if (losses[a].name() == losses[b].name())
                throw std::invalid_argument("ExperimentConfig: duplicate loss '" +
                                            losses[a].name() + "' in grid");
}

int ExperimentConfig::num_classes() const {
    return csv_path.empty() ? synthetic.num_classes : csv_num_classes;
}

std::vector<LossSpec> default_loss_grid() {
    std::vector<LossSpec> grid(6);
    grid[0].kind = LossKind::CE;
    grid[1].kind = LossKind::MSE_REG;
    grid[2].kind = LossKind::CORN;
    grid[3].kind = LossKind::CO2;
    grid[3].lambda = 0.1;
    grid[3].delta = 0.05;
    grid[4].kind = LossKind::HO2;
    // ho2 has no cross-entropy term; the unimodality penalty carries the whole
    // label signal, so its weight has to dominate the entropy term
    grid[4].lambda = 4.0;
    grid[4].delta = 0.05;
    grid[5].kind = LossKind::CDW_CE;
    grid[5].alpha = 5.0;
    return grid;
}

std::string config_to_json(const ExperimentConfig& config) {
    return config_to_json_obj(config).dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config parse: ") + e.what());
    }
    try {
        return config_from_json_obj(doc);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

AggregateReport run_benchmark(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    cfg.validate();
    const Dataset ds = build_dataset(cfg);
    const int k = ds.num_classes;
    for (LossSpec& s : cfg.losses) {
        if (s.num_classes == 0)
            s.num_classes = k;
        if (s.num_classes != k)
            throw std::invalid_argument("loss '" + s.name() + "' declares " +
                                        std::to_string(s.num_classes) +
                                        " classes, dataset has " + std::to_string(k));
        s.validate();
    }

    const int n_losses = static_cast<int>(cfg.losses.size());
    std::vector<SplitResult> splits;
    splits.reserve(cfg.n_trials);
    for (int t = 0; t < cfg.n_trials; ++t) {
        SplitSpec sp = cfg.split;
        sp.seed = trial_seeds(cfg.master_seed, t)[0];
        splits.push_back(split(ds, sp));
    }

    AggregateReport report;
    report.config = cfg;
    report.losses.resize(cfg.losses.size());
    for (int l = 0; l < n_losses; ++l) {
        report.losses[l].spec = cfg.losses[l];
        report.losses[l].name = cfg.losses[l].name();
        report.losses[l].trials.resize(cfg.n_trials);
    }

    const int total = n_losses * cfg.n_trials;
    auto run_item = [&](int idx) {
        const int l = idx / cfg.n_trials;
        const int t = idx % cfg.n_trials;
        report.losses[l].trials[t] = run_trial(cfg, splits[t], cfg.losses[l], t);
    };
    if (cfg.jobs > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(cfg.jobs)
#endif
        for (int i = 0; i < total; ++i)
            run_item(i);
    } else {
        for (int i = 0; i < total; ++i)
            run_item(i);
    }

    for (LossAggregate& agg : report.losses)
        aggregate_loss(agg);

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir + "/trials", ec);
    if (ec)
        throw std::runtime_error("cannot create '" + cfg.output_dir + "': " + ec.message());
    write_trial_files(report);
    emit_report(report, ReportFormat::Json, cfg.output_dir);
    emit_report(report, ReportFormat::Csv, cfg.output_dir);
    emit_report(report, ReportFormat::Markdown, cfg.output_dir);
    write_confusion_csvs(report);
    write_roc_csvs(report);
    return report;
}

AggregateReport run_alpha_sweep(const ExperimentConfig& base,
                                const std::vector<double>& alphas) {
    if (alphas.empty())
        throw std::invalid_argument("alpha sweep: empty grid");
    for (double a : alphas)
        if (a <= 0.0)
            throw std::invalid_argument("alpha sweep: alpha must be > 0");
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (std::size_t j = i + 1; j < alphas.size(); ++j)
            if (alphas[i] == alphas[j])
                throw std::invalid_argument("alpha sweep: duplicate alpha " +
                                            std::to_string(alphas[i]));

    ExperimentConfig cfg = base;
    cfg.losses.clear();
    for (double a : alphas) {
        LossSpec s;
        s.kind = LossKind::CDW_CE;
        s.alpha = a;
        cfg.losses.push_back(s);
    }
    AggregateReport report = run_benchmark(cfg);

    std::string csv = "alpha,mean_qwk,std_qwk\n";
    for (std::size_t i = 0; i < alphas.size(); ++i)
        csv += g17(alphas[i]) + "," + g17(agg_stat(report.losses[i].mean, "qwk")) + "," +
               g17(agg_stat(report.losses[i].stddev, "qwk")) + "\n";
    write_file(cfg.output_dir + "/sweep_alpha.csv", csv);
    return report;
}

AggregateReport run_margin_sweep(const ExperimentConfig& base, double alpha,
                                 const std::vector<double>& margins) {
    if (margins.empty())
        throw std::invalid_argument("margin sweep: empty grid");
    if (alpha <= 0.0)
        throw std::invalid_argument("margin sweep: alpha must be > 0");
    for (double m : margins)
        if (m < 0.0 || m >= 0.5)
            throw std::invalid_argument("margin sweep: margin must lie in [0, 0.5)");
    for (std::size_t i = 0; i < margins.size(); ++i)
        for (std::size_t j = i + 1; j < margins.size(); ++j)
            if (margins[i] == margins[j])
                throw std::invalid_argument("margin sweep: duplicate margin " +
                                            std::to_string(margins[i]));

    ExperimentConfig cfg = base;
    cfg.losses.clear();
    for (double m : margins) {
        LossSpec s;
        s.kind = LossKind::CDW_CE_MARGIN;
        s.alpha = alpha;
        s.margin = m;
        cfg.losses.push_back(s);
    }
    AggregateReport report = run_benchmark(cfg);

    std::string csv = "alpha,margin,mean_qwk,std_qwk\n";
    for (std::size_t i = 0; i < margins.size(); ++i)
        csv += g17(alpha) + "," + g17(margins[i]) + "," +
               g17(agg_stat(report.losses[i].mean, "qwk")) + "," +
               g17(agg_stat(report.losses[i].stddev, "qwk")) + "\n";
    write_file(cfg.output_dir + "/sweep_margin.csv", csv);
    return report;
}

void emit_report(const AggregateReport& report, ReportFormat format,
                 const std::string& output_dir) {
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create '" + output_dir + "': " + ec.message());

    if (format == ReportFormat::Json) {
        write_file(output_dir + "/aggregate.json", report_to_json(report));
        return;
    }
    if (format == ReportFormat::Csv) {
        std::string csv =
            "loss,trial,ok,qwk,kappa,accuracy,macro_f1,mae,dist2_fraction,silhouette,"
            "remission_kappa,remission_f1,remission_accuracy\n";
        for (const LossAggregate& agg : report.losses) {
            for (const TrialOutcome& t : agg.trials) {
                const MetricBundle& m = t.metrics;
                const double bad = nan_value;
                csv += agg.name + "," + std::to_string(t.trial) + "," + (t.ok ? "1" : "0");
                for (double v : {t.ok ? m.qwk : bad, t.ok ? m.kappa : bad,
                                 t.ok ? m.accuracy : bad, t.ok ? m.macro_f1 : bad,
                                 t.ok ? m.mae : bad, t.ok ? t.dist2_fraction : bad,
                                 t.ok ? m.silhouette : bad, t.ok ? m.remission_kappa : bad,
                                 t.ok ? m.remission_f1 : bad,
                                 t.ok ? m.remission_accuracy : bad})
                    csv += "," + g17(v);
                csv += '\n';
            }
        }
        write_file(output_dir + "/trials.csv", csv);
        return;
    }

    // markdown: metric rows x loss columns
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"qwk", "QWK"},
        {"kappa", "Kappa"},
        {"accuracy", "Accuracy"},
        {"macro_f1", "Macro F1"},
        {"mae", "MAE"},
        {"dist2_fraction", "|pred-true|>=2 fraction"},
        {"silhouette", "Silhouette"},
        {"remission_kappa", "Remission Kappa"},
        {"remission_f1", "Remission F1"},
        {"remission_accuracy", "Remission Accuracy"},
    };
    std::ostringstream md;
    md << "# Benchmark summary\n\n";
    md << "Values are mean ± sample std over completed trials (n/a where undefined).\n\n";
    md << "| metric |";
    for (const LossAggregate& agg : report.losses)
        md << ' ' << agg.name << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < report.losses.size(); ++i)
        md << "---|";
    md << "\n| completed trials |";
    for (const LossAggregate& agg : report.losses)
        md << ' ' << agg.completed << '/' << agg.trials.size() << " |";
    md << '\n';
    for (const auto& [key, label] : rows) {
        md << "| " << label << " |";
        for (const LossAggregate& agg : report.losses) {
            const double mean = agg_stat(agg.mean, key);
            const double sd = agg_stat(agg.stddev, key);
            if (std::isnan(mean)) {
                md << " n/a |";
            } else {
                char cell[64];
                std::snprintf(cell, sizeof cell, " %.4f ± %.4f |", mean, sd);
                md << cell;
            }
        }
        md << '\n';
    }
    write_file(output_dir + "/summary.md", md.str());
}

std::string report_to_json(const AggregateReport& report) {
    json j;
    j["config"] = config_to_json_obj(report.config);
    j["losses"] = json::array();
    for (const LossAggregate& agg : report.losses) {
        json o;
        o["name"] = agg.name;
        o["spec"] = loss_spec_to_json(agg.spec);
        o["completed"] = agg.completed;
        o["mean"] = json(agg.mean);
        o["std"] = json(agg.stddev);
        json mc = json::array();
        for (std::size_t i = 0; i < agg.mean_confusion.rows(); ++i) {
            json row = json::array();
            for (std::size_t c = 0; c < agg.mean_confusion.cols(); ++c)
                row.push_back(agg.mean_confusion(i, c));
            mc.push_back(row);
        }
        o["mean_confusion"] = mc;
        json trials = json::array();
        for (const TrialOutcome& t : agg.trials) {
            const std::array<std::uint64_t, 3> seeds =
                trial_seeds(report.config.master_seed, t.trial);
            json jt;
            jt["trial"] = t.trial;
            jt["ok"] = t.ok;
            jt["error"] = t.error;
            jt["seeds"] = {{"split", seeds[0]}, {"init", seeds[1]}, {"train", seeds[2]}};
            if (t.ok) {
                jt["metrics"] = metrics_to_json(t.metrics, t.dist2_fraction);
                jt["confusion"] = confusion_to_json(t.confusion, agg.spec.num_classes);
                jt["train_log"] = train_log_to_json_obj(t.log);
            } else {
                jt["metrics"] = nullptr;
                jt["confusion"] = nullptr;
                jt["train_log"] = nullptr;
            }
            trials.push_back(jt);
        }
        o["trials"] = trials;
        j["losses"].push_back(o);
    }
    return j.dump(2) + "\n";
}

AggregateReport report_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("report parse: ") + e.what());
    }
    try {
        AggregateReport report;
        report.config = config_from_json_obj(doc.at("config"));
        for (const json& o : doc.at("losses")) {
            LossAggregate agg;
            agg.name = o.at("name").get<std::string>();
            agg.spec = loss_spec_from_json(o.at("spec"));
            agg.completed = o.at("completed").get<int>();
            for (const auto& [key, v] : o.at("mean").items())
                agg.mean[key] = json_double(v);
            for (const auto& [key, v] : o.at("std").items())
                agg.stddev[key] = json_double(v);
            const json& mc = o.at("mean_confusion");
            const std::size_t k = mc.size();
            agg.mean_confusion = Matrix(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t c = 0; c < k; ++c)
                    agg.mean_confusion(i, c) = mc[i][c].get<double>();
            for (const json& jt : o.at("trials")) {
                TrialOutcome t;
                t.trial = jt.at("trial").get<int>();
                t.ok = jt.at("ok").get<bool>();
                t.error = jt.at("error").get<std::string>();
                if (t.ok) {
                    metrics_from_json(jt.at("metrics"), t.metrics, t.dist2_fraction);
                    const json& cj = jt.at("confusion");
                    for (const json& row : cj)
                        for (const json& cell : row)
                            t.confusion.push_back(cell.get<long long>());
                    const json& lj = jt.at("train_log");
                    t.log.train_loss = lj.at("train_loss").get<std::vector<double>>();
                    t.log.val_metric = lj.at("val_metric").get<std::vector<double>>();
                    t.log.selected_epoch = lj.at("selected_epoch").get<int>();
                }
                agg.trials.push_back(std::move(t));
            }
            report.losses.push_back(std::move(agg));
        }
        return report;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("report parse: ") + e.what());
    }
}

} // namespace ordinal
