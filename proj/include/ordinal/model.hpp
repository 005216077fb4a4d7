#ifndef ORDINAL_MODEL_HPP
#define ORDINAL_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ordinal/numerics.hpp"

namespace ordinal {

enum class HeadKind { Softmax, Corn, Regression };
enum class Activation { ReLU, Tanh };

std::string head_name(HeadKind head);
HeadKind head_from_name(const std::string& name);
std::string activation_name(Activation act);
Activation activation_from_name(const std::string& name);

struct MlpConfig {
    int input_dim = 8;
    std::vector<int> hidden_dims = {32, 16};
    HeadKind head = HeadKind::Softmax;
    int num_classes = 4;
    Activation activation = Activation::Tanh;
    std::uint64_t init_seed = 0;

    void validate() const;
    int output_dim() const;      // K, K-1 or 1 depending on head
    int penultimate_dim() const; // last hidden width
};

/// Cached activations from one forward pass, enough to run backward.
struct ForwardTrace {
    std::vector<std::vector<double>> inputs; // inputs[l] feeds layer l; inputs[0] is x
    std::vector<std::vector<double>> pre;    // pre-activation of each layer, head last
    std::vector<double> head_output;         // probabilities (softmax) or raw outputs
    std::vector<double> penultimate;
};

/// Per-layer parameter gradients, same shapes as the model's weights/biases.
struct Gradients {
    std::vector<Matrix> dw;
    std::vector<std::vector<double>> db;

    void zero();
    void scale(double s);
    void add_scaled(const Gradients& other, double s);
};

class MlpModel {
public:
    explicit MlpModel(const MlpConfig& config);

    const MlpConfig& config() const { return config_; }
    std::size_t num_layers() const { return weights_.size(); }
    const Matrix& weights(std::size_t layer) const;
    Matrix& weights(std::size_t layer);
    const std::vector<double>& biases(std::size_t layer) const;
    std::vector<double>& biases(std::size_t layer);

    // Pure forward/backward pair; safe to call concurrently on a frozen model.
    ForwardTrace forward_trace(std::span<const double> x) const;
    Gradients backward(const ForwardTrace& trace, std::span<const double> head_grad) const;

    // Stateful convenience wrapper around the pair above.
    const std::vector<double>& forward(std::span<const double> x);
    Gradients backward(std::span<const double> head_grad);

    Gradients zero_gradients() const;
    void apply_update(const Gradients& step, double factor);

private:
    MlpConfig config_;
    std::vector<Matrix> weights_;
    std::vector<std::vector<double>> biases_;
    ForwardTrace last_trace_;
    bool has_trace_ = false;
};

MlpModel init_model(const MlpConfig& config);

void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);

} // namespace ordinal

#endif
