#include "ordinal/losses.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ordinal {

const char* loss_kind_name(LossKind kind) {
    switch (kind) {
    case LossKind::CE: return "ce";
    case LossKind::CDW_CE: return "cdw_ce";
    case LossKind::CDW_CE_MARGIN: return "cdw_ce_margin";
    case LossKind::CO2: return "co2";
    case LossKind::HO2: return "ho2";
    case LossKind::CORN: return "corn";
    case LossKind::MSE_REG: return "mse_reg";
    }
    throw std::invalid_argument("loss_kind_name: unknown kind");
}

LossKind loss_kind_from_name(const std::string& name) {
    for (LossKind k : {LossKind::CE, LossKind::CDW_CE, LossKind::CDW_CE_MARGIN, LossKind::CO2,
                       LossKind::HO2, LossKind::CORN, LossKind::MSE_REG})
        if (name == loss_kind_name(k))
            return k;
    throw std::invalid_argument("unknown loss kind '" + name + "'");
}

namespace {

std::string trim_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void require_absent(const std::optional<double>& p, const char* pname, LossKind kind) {
    if (p.has_value())
        throw std::invalid_argument(std::string(pname) + " is not a parameter of " +
                                    loss_kind_name(kind));
}

void check_class_index(int c, std::size_t k) {
    if (c < 0 || static_cast<std::size_t>(c) >= k)
        throw std::out_of_range("class index " + std::to_string(c) + " outside [0, " +
                                std::to_string(k) + ")");
}

double clamp_low(double p) {
    return p < prob_eps ? prob_eps : p;
}

void check_prob_components(std::span<const double> y_hat) {
    for (double p : y_hat)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("probability component outside [0, 1]");
}

// Unimodality penalty shared by CO2/HO2: the adjacent pair (k, k+1) must
// rise while k < c and fall from k = c on. The printed equations index both
// sums up to K-1 and overlap at k = c; pairs are constrained once here,
// which is what makes a strictly unimodal peak at c cost zero.
void add_unimodal_penalty(std::span<const double> y_hat, int c, double lambda, double delta,
                          LossResult& out) {
    const std::size_t k = y_hat.size();
    for (std::size_t pair = 0; pair + 1 < k; ++pair) {
        const bool rising = pair < static_cast<std::size_t>(c);
        const double arg = rising ? delta + y_hat[pair] - y_hat[pair + 1]
                                  : delta + y_hat[pair + 1] - y_hat[pair];
        if (arg > 0.0) {
            out.value += lambda * arg;
            const double sign = rising ? 1.0 : -1.0;
            out.grad[pair] += lambda * sign;
            out.grad[pair + 1] -= lambda * sign;
        }
    }
}

} // namespace

void LossSpec::validate() const {
    if (num_classes < 2)
        throw std::invalid_argument("LossSpec: num_classes must be >= 2");
    switch (kind) {
    case LossKind::CE:
    case LossKind::CORN:
    case LossKind::MSE_REG:
        require_absent(alpha, "alpha", kind);
        require_absent(margin, "margin", kind);
        require_absent(lambda, "lambda", kind);
        require_absent(delta, "delta", kind);
        break;
    case LossKind::CDW_CE:
    case LossKind::CDW_CE_MARGIN:
        if (!alpha.has_value() || *alpha <= 0.0)
            throw std::invalid_argument("LossSpec: alpha > 0 required for CDW variants");
        if (kind == LossKind::CDW_CE_MARGIN) {
            if (!margin.has_value() || *margin < 0.0 || *margin > 0.5)
                throw std::invalid_argument("LossSpec: margin must lie in [0, 0.5]");
        } else {
            require_absent(margin, "margin", kind);
        }
        require_absent(lambda, "lambda", kind);
        require_absent(delta, "delta", kind);
        break;
    case LossKind::CO2:
    case LossKind::HO2:
        if (!lambda.has_value() || *lambda < 0.0)
            throw std::invalid_argument("LossSpec: lambda >= 0 required for CO2/HO2");
        if (!delta.has_value() || *delta < 0.0)
            throw std::invalid_argument("LossSpec: delta >= 0 required for CO2/HO2");
        require_absent(alpha, "alpha", kind);
        require_absent(margin, "margin", kind);
        break;
    }
}

int LossSpec::head_input_dim() const {
    switch (kind) {
    case LossKind::CORN: return num_classes - 1;
    case LossKind::MSE_REG: return 1;
    default: return num_classes;
    }
}

std::string LossSpec::name() const {
    std::string n = loss_kind_name(kind);
    if (alpha.has_value())
        n += "_a" + trim_number(*alpha);
    if (margin.has_value())
        n += "_m" + trim_number(*margin);
    if (lambda.has_value())
        n += "_l" + trim_number(*lambda);
    if (delta.has_value() && *delta != 0.0)
        n += "_d" + trim_number(*delta);
    return n;
}

LossResult ce_loss(std::span<const double> y_hat, int c) {
    check_prob_components(y_hat);
    check_class_index(c, y_hat.size());
    const double pc = clamp_low(y_hat[c]);
    LossResult out;
    out.value = -std::log(pc);
    out.grad.assign(y_hat.size(), 0.0);
    out.grad[c] = -1.0 / pc;
    return out;
}

LossResult ce_loss(const ProbVector& y_hat, int c) {
    return ce_loss(std::span<const double>(y_hat.values()), c);
}

LossResult cdw_ce_margin_loss(std::span<const double> y_hat, int c, double alpha, double m) {
    check_prob_components(y_hat);
    check_class_index(c, y_hat.size());
    if (alpha <= 0.0)
        throw std::invalid_argument("cdw_ce: alpha must be > 0");
    if (m < 0.0 || m >= 1.0)
        throw std::invalid_argument("cdw_ce margin must lie in [0, 1)");
    LossResult out;
    out.grad.assign(y_hat.size(), 0.0);
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        if (static_cast<int>(i) == c)
            continue;  // weight |i-c|^alpha is exactly 0
        const double w = std::pow(std::abs(static_cast<double>(i) - c), alpha);
        const double shifted = y_hat[i] + m;
        if (shifted > 1.0 - prob_eps) {
            // saturated: the clamped log is locally constant in y_hat[i]
            out.value += -std::log1p(-(1.0 - prob_eps)) * w;
        } else {
            out.value += -std::log1p(-shifted) * w;
            out.grad[i] = w / (1.0 - shifted);
        }
    }
    return out;
}

LossResult cdw_ce_margin_loss(const ProbVector& y_hat, int c, double alpha, double m) {
    return cdw_ce_margin_loss(std::span<const double>(y_hat.values()), c, alpha, m);
}

LossResult cdw_ce_loss(std::span<const double> y_hat, int c, double alpha) {
    // same computation path as the margin form so that m=0 matches bit for bit
    return cdw_ce_margin_loss(y_hat, c, alpha, 0.0);
}

LossResult cdw_ce_loss(const ProbVector& y_hat, int c, double alpha) {
    return cdw_ce_loss(std::span<const double>(y_hat.values()), c, alpha);
}

Vector cdw_ce_grad(const ProbVector& y_hat, int c, double alpha) {
    return cdw_ce_loss(y_hat, c, alpha).grad;
}

LossResult co2_loss(std::span<const double> y_hat, int c, double lambda, double delta) {
    if (lambda < 0.0 || delta < 0.0)
        throw std::invalid_argument("co2: lambda and delta must be >= 0");
    LossResult out = ce_loss(y_hat, c);
    add_unimodal_penalty(y_hat, c, lambda, delta, out);
    return out;
}

LossResult co2_loss(const ProbVector& y_hat, int c, double lambda, double delta) {
    return co2_loss(std::span<const double>(y_hat.values()), c, lambda, delta);
}

LossResult ho2_loss(std::span<const double> y_hat, int c, double lambda, double delta) {
    if (lambda < 0.0 || delta < 0.0)
        throw std::invalid_argument("ho2: lambda and delta must be >= 0");
    check_prob_components(y_hat);
    check_class_index(c, y_hat.size());
    LossResult out;
    out.grad.assign(y_hat.size(), 0.0);
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        const double p = y_hat[i];
        if (p > 0.0) {
            const double lp = std::log(clamp_low(p));
            out.value += -p * lp;
            out.grad[i] = -(lp + 1.0);
        }
        // p == 0 contributes 0 (limit of p ln p); subgradient taken as 0
    }
    add_unimodal_penalty(y_hat, c, lambda, delta, out);
    return out;
}

LossResult ho2_loss(const ProbVector& y_hat, int c, double lambda, double delta) {
    return ho2_loss(std::span<const double>(y_hat.values()), c, lambda, delta);
}

LossResult corn_loss(std::span<const double> logits, int c) {
    if (logits.empty())
        throw std::invalid_argument("corn_loss: needs K-1 >= 1 logits");
    const int k = static_cast<int>(logits.size()) + 1;
    check_class_index(c, static_cast<std::size_t>(k));
    const int n_tasks = std::min(c, k - 2) + 1;
    LossResult out;
    out.grad.assign(logits.size(), 0.0);
    for (int task = 0; task < n_tasks; ++task) {
        const double l = logits[task];
        const double target = c > task ? 1.0 : 0.0;
        // bce(sigmoid(l), t) = max(l,0) - l t + log(1 + exp(-|l|))
        out.value += std::max(l, 0.0) - l * target + std::log1p(std::exp(-std::abs(l)));
        out.grad[task] = sigmoid(l) - target;
    }
    out.value /= n_tasks;
    for (double& g : out.grad)
        g /= n_tasks;
    return out;
}

Vector corn_chain_probs(std::span<const double> logits) {
    Vector chain(logits.size());
    double running = 1.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        running *= sigmoid(logits[i]);
        chain[i] = running;
    }
    return chain;
}

Vector corn_class_probs(std::span<const double> logits) {
    const Vector chain = corn_chain_probs(logits);
    Vector probs(logits.size() + 1);
    double prev = 1.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        probs[i] = prev - chain[i];
        prev = chain[i];
    }
    probs[chain.size()] = prev;
    return probs;
}

int corn_rank(std::span<const double> logits) {
    const Vector chain = corn_chain_probs(logits);
    int rank = 0;
    for (double p : chain) {
        if (p > 0.5)
            ++rank;
        else
            break;
    }
    return rank;
}

LossResult mse_reg_loss(double raw_output, int c, int num_classes) {
    if (num_classes < 2)
        throw std::invalid_argument("mse_reg_loss: num_classes must be >= 2");
    check_class_index(c, static_cast<std::size_t>(num_classes));
    const double s = sigmoid(raw_output);
    const double p = s * (num_classes - 1);
    const double diff = p - c;
    LossResult out;
    out.value = diff * diff;
    out.grad.assign(1, 2.0 * diff * (num_classes - 1) * s * (1.0 - s));
    return out;
}

double regression_prediction(double raw_output, int num_classes) {
    return sigmoid(raw_output) * (num_classes - 1);
}

int regression_label(double raw_output, int num_classes) {
    const double p = regression_prediction(raw_output, num_classes);
    const int label = static_cast<int>(std::floor(p + 0.5));  // ties round half-up
    return std::clamp(label, 0, num_classes - 1);
}

LossResult loss_dispatch(const LossSpec& spec, std::span<const double> model_output, int c) {
    spec.validate();
    if (static_cast<int>(model_output.size()) != spec.head_input_dim())
        throw std::invalid_argument("loss_dispatch: " + std::string(loss_kind_name(spec.kind)) +
                                    " expects input length " +
                                    std::to_string(spec.head_input_dim()) + ", got " +
                                    std::to_string(model_output.size()));
    switch (spec.kind) {
    case LossKind::CE:
        return ce_loss(ProbVector(Vector(model_output.begin(), model_output.end())), c);
    case LossKind::CDW_CE:
        return cdw_ce_loss(ProbVector(Vector(model_output.begin(), model_output.end())), c,
                           *spec.alpha);
    case LossKind::CDW_CE_MARGIN:
        return cdw_ce_margin_loss(ProbVector(Vector(model_output.begin(), model_output.end())), c,
                                  *spec.alpha, *spec.margin);
    case LossKind::CO2:
        return co2_loss(ProbVector(Vector(model_output.begin(), model_output.end())), c,
                        *spec.lambda, *spec.delta);
    case LossKind::HO2:
        return ho2_loss(ProbVector(Vector(model_output.begin(), model_output.end())), c,
                        *spec.lambda, *spec.delta);
    case LossKind::CORN:
        return corn_loss(model_output, c);
    case LossKind::MSE_REG:
        return mse_reg_loss(model_output[0], c, spec.num_classes);
    }
    throw std::invalid_argument("loss_dispatch: unknown kind");
}

BatchLossResult loss_dispatch_batch(const LossSpec& spec, const Matrix& outputs,
                                    std::span<const int> labels) {
    if (outputs.rows() != labels.size())
        throw std::invalid_argument("loss_dispatch_batch: rows != labels");
    if (outputs.rows() == 0)
        throw std::invalid_argument("loss_dispatch_batch: empty batch");
    BatchLossResult out;
    out.grads = Matrix(outputs.rows(), outputs.cols());
    const double inv_n = 1.0 / static_cast<double>(outputs.rows());
    for (std::size_t i = 0; i < outputs.rows(); ++i) {
        LossResult r = loss_dispatch(spec, outputs.row(i), labels[i]);
        out.value += r.value * inv_n;
        for (std::size_t j = 0; j < outputs.cols(); ++j)
            out.grads(i, j) = r.grad[j] * inv_n;
    }
    return out;
}

} // namespace ordinal
