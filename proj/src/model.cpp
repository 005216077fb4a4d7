#include "ordinal/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ordinal {

std::string head_name(HeadKind head) {
    switch (head) {
    case HeadKind::Softmax: return "softmax";
    case HeadKind::Corn: return "corn";
    case HeadKind::Regression: return "regression";
    }
    throw std::invalid_argument("head_name: unknown head");
}

HeadKind head_from_name(const std::string& name) {
    if (name == "softmax") return HeadKind::Softmax;
    if (name == "corn") return HeadKind::Corn;
    if (name == "regression") return HeadKind::Regression;
    throw std::invalid_argument("head_from_name: unknown head '" + name + "'");
}

std::string activation_name(Activation act) {
    return act == Activation::ReLU ? "relu" : "tanh";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "tanh") return Activation::Tanh;
    throw std::invalid_argument("activation_from_name: unknown activation '" + name + "'");
}

void MlpConfig::validate() const {
    if (input_dim < 1)
        throw std::invalid_argument("MlpConfig: input_dim must be >= 1");
    if (hidden_dims.empty())
        throw std::invalid_argument("MlpConfig: hidden_dims must be non-empty");
    for (int d : hidden_dims)
        if (d < 1)
            throw std::invalid_argument("MlpConfig: hidden dims must be >= 1");
    if (num_classes < 2)
        throw std::invalid_argument("MlpConfig: num_classes must be >= 2");
}

int MlpConfig::output_dim() const {
    switch (head) {
    case HeadKind::Softmax: return num_classes;
    case HeadKind::Corn: return num_classes - 1;
    case HeadKind::Regression: return 1;
    }
    throw std::invalid_argument("MlpConfig: unknown head");
}

int MlpConfig::penultimate_dim() const {
    return hidden_dims.back();
}

void Gradients::zero() {
    for (Matrix& m : dw)
        std::fill(m.data().begin(), m.data().end(), 0.0);
    for (std::vector<double>& b : db)
        std::fill(b.begin(), b.end(), 0.0);
}

void Gradients::scale(double s) {
    for (Matrix& m : dw)
        for (double& v : m.data())
            v *= s;
    for (std::vector<double>& b : db)
        for (double& v : b)
            v *= s;
}

void Gradients::add_scaled(const Gradients& other, double s) {
    if (other.dw.size() != dw.size())
        throw std::invalid_argument("Gradients::add_scaled: layer count mismatch");
    for (std::size_t l = 0; l < dw.size(); ++l) {
        if (other.dw[l].rows() != dw[l].rows() || other.dw[l].cols() != dw[l].cols())
            throw std::invalid_argument("Gradients::add_scaled: shape mismatch");
        for (std::size_t i = 0; i < dw[l].data().size(); ++i)
            dw[l].data()[i] += s * other.dw[l].data()[i];
        for (std::size_t i = 0; i < db[l].size(); ++i)
            db[l][i] += s * other.db[l][i];
    }
}

MlpModel::MlpModel(const MlpConfig& config) : config_(config) {
    config_.validate();
    std::vector<int> dims;
    dims.push_back(config_.input_dim);
    dims.insert(dims.end(), config_.hidden_dims.begin(), config_.hidden_dims.end());
    dims.push_back(config_.output_dim());
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        weights_.emplace_back(static_cast<std::size_t>(dims[l + 1]),
                              static_cast<std::size_t>(dims[l]));
        biases_.emplace_back(static_cast<std::size_t>(dims[l + 1]), 0.0);
    }
}

const Matrix& MlpModel::weights(std::size_t layer) const {
    if (layer >= weights_.size())
        throw std::out_of_range("MlpModel::weights: layer index");
    return weights_[layer];
}

Matrix& MlpModel::weights(std::size_t layer) {
    if (layer >= weights_.size())
        throw std::out_of_range("MlpModel::weights: layer index");
    return weights_[layer];
}

const std::vector<double>& MlpModel::biases(std::size_t layer) const {
    if (layer >= biases_.size())
        throw std::out_of_range("MlpModel::biases: layer index");
    return biases_[layer];
}

std::vector<double>& MlpModel::biases(std::size_t layer) {
    if (layer >= biases_.size())
        throw std::out_of_range("MlpModel::biases: layer index");
    return biases_[layer];
}

namespace {

double activate(Activation act, double z) {
    return act == Activation::ReLU ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// derivative expressed through the post-activation value where possible
double activate_grad(Activation act, double pre, double post) {
    if (act == Activation::ReLU)
        return pre > 0.0 ? 1.0 : 0.0;
    return 1.0 - post * post;
}

} // namespace

ForwardTrace MlpModel::forward_trace(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(config_.input_dim))
        throw std::invalid_argument("MlpModel::forward: input length != input_dim");
    ForwardTrace trace;
    std::vector<double> act(x.begin(), x.end());
    const std::size_t hidden_count = config_.hidden_dims.size();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        trace.inputs.push_back(act);
        std::vector<double> pre = matvec(weights_[l], act);
        for (std::size_t i = 0; i < pre.size(); ++i)
            pre[i] += biases_[l][i];
        trace.pre.push_back(pre);
        if (l < hidden_count) {
            act.resize(pre.size());
            for (std::size_t i = 0; i < pre.size(); ++i)
                act[i] = activate(config_.activation, pre[i]);
            if (l + 1 == hidden_count)
                trace.penultimate = act;
        } else {
            if (config_.head == HeadKind::Softmax)
                trace.head_output = softmax(pre).values();
            else
                trace.head_output = pre;
        }
    }
    return trace;
}

Gradients MlpModel::backward(const ForwardTrace& trace,
                             std::span<const double> head_grad) const {
    if (trace.pre.size() != weights_.size())
        throw std::invalid_argument("MlpModel::backward: trace does not match model");
    if (head_grad.size() != trace.head_output.size())
        throw std::invalid_argument("MlpModel::backward: head gradient length mismatch");

    Gradients grads = zero_gradients();
    std::vector<double> delta;
    if (config_.head == HeadKind::Softmax) {
        // chain through softmax: dz_j = p_j * (g_j - sum_i p_i g_i)
        const std::vector<double>& p = trace.head_output;
        const double mix = dot(p, head_grad);
        delta.resize(p.size());
        for (std::size_t j = 0; j < p.size(); ++j)
            delta[j] = p[j] * (head_grad[j] - mix);
    } else {
        delta.assign(head_grad.begin(), head_grad.end());
    }

    for (std::size_t l = weights_.size(); l-- > 0;) {
        const std::vector<double>& in = trace.inputs[l];
        for (std::size_t r = 0; r < weights_[l].rows(); ++r) {
            grads.db[l][r] = delta[r];
            for (std::size_t c = 0; c < weights_[l].cols(); ++c)
                grads.dw[l](r, c) = delta[r] * in[c];
        }
        if (l == 0)
            break;
        std::vector<double> prev(weights_[l].cols(), 0.0);
        for (std::size_t r = 0; r < weights_[l].rows(); ++r)
            for (std::size_t c = 0; c < weights_[l].cols(); ++c)
                prev[c] += weights_[l](r, c) * delta[r];
        // in == post-activation of layer l-1
        for (std::size_t c = 0; c < prev.size(); ++c)
            prev[c] *= activate_grad(config_.activation, trace.pre[l - 1][c], in[c]);
        delta = std::move(prev);
    }
    return grads;
}

const std::vector<double>& MlpModel::forward(std::span<const double> x) {
    last_trace_ = forward_trace(x);
    has_trace_ = true;
    return last_trace_.head_output;
}

Gradients MlpModel::backward(std::span<const double> head_grad) {
    if (!has_trace_)
        throw std::runtime_error("MlpModel::backward: no forward pass cached");
    return backward(last_trace_, head_grad);
}

Gradients MlpModel::zero_gradients() const {
    Gradients g;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        g.dw.emplace_back(weights_[l].rows(), weights_[l].cols());
        g.db.emplace_back(biases_[l].size(), 0.0);
    }
    return g;
}

void MlpModel::apply_update(const Gradients& step, double factor) {
    if (step.dw.size() != weights_.size())
        throw std::invalid_argument("MlpModel::apply_update: layer count mismatch");
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (std::size_t i = 0; i < weights_[l].data().size(); ++i)
            weights_[l].data()[i] += factor * step.dw[l].data()[i];
        for (std::size_t i = 0; i < biases_[l].size(); ++i)
            biases_[l][i] += factor * step.db[l][i];
    }
}

MlpModel init_model(const MlpConfig& config) {
    MlpModel model(config);
    SeededRng rng(config.init_seed);
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        Matrix& w = model.weights(l);
        const double fan_in = static_cast<double>(w.cols());
        const double fan_out = static_cast<double>(w.rows());
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : w.data())
            v = rng.uniform(-bound, bound);
    }
    return model;
}

void save_checkpoint(const MlpModel& model, const std::string& path) {
    nlohmann::json doc;
    const MlpConfig& c = model.config();
    doc["config"] = {
        {"input_dim", c.input_dim},
        {"hidden_dims", c.hidden_dims},
        {"head", head_name(c.head)},
        {"num_classes", c.num_classes},
        {"activation", activation_name(c.activation)},
        {"init_seed", c.init_seed},
    };
    doc["layers"] = nlohmann::json::array();
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        doc["layers"].push_back({
            {"w", model.weights(l).data()},
            {"b", model.biases(l)},
        });
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_checkpoint: cannot open '" + path + "'");
    out << doc.dump(2) << '\n';
}

MlpModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_checkpoint: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_checkpoint: parse failure in '" + path + "': " + e.what());
    }
    if (!doc.contains("config") || !doc.contains("layers"))
        throw std::invalid_argument("load_checkpoint: missing config/layers");
    const nlohmann::json& jc = doc["config"];
    MlpConfig config;
    config.input_dim = jc.at("input_dim").get<int>();
    config.hidden_dims = jc.at("hidden_dims").get<std::vector<int>>();
    config.head = head_from_name(jc.at("head").get<std::string>());
    config.num_classes = jc.at("num_classes").get<int>();
    config.activation = activation_from_name(jc.at("activation").get<std::string>());
    config.init_seed = jc.at("init_seed").get<std::uint64_t>();

    MlpModel model(config);
    const nlohmann::json& layers = doc["layers"];
    if (!layers.is_array() || layers.size() != model.num_layers())
        throw std::invalid_argument("load_checkpoint: layer count mismatch");
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        std::vector<double> w = layers[l].at("w").get<std::vector<double>>();
        std::vector<double> b = layers[l].at("b").get<std::vector<double>>();
        if (w.size() != model.weights(l).data().size() || b.size() != model.biases(l).size())
            throw std::invalid_argument("load_checkpoint: weight shape mismatch");
        model.weights(l).data() = std::move(w);
        model.biases(l) = std::move(b);
    }
    return model;
}

} // namespace ordinal
