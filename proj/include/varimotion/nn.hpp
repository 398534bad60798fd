#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vmo {

// Fully connected network: affine layers with ReLU on hidden layers and an
// identity output. Double precision throughout so gradient checks can be
// strict. Samples are matrix columns.
class Mlp {
public:
    struct Gradients {
        std::vector<Eigen::MatrixXd> weights;
        std::vector<Eigen::VectorXd> biases;

        void setZero();
        void scale(double factor);
        void add(const Gradients& other, double factor = 1.0);
    };

    // Cached activations of one forward pass, consumed by backward().
    struct Trace {
        std::vector<Eigen::MatrixXd> activations; // activations[0] = input
    };

    Mlp() = default;
    // He-uniform weight init, zero biases.
    Mlp(std::vector<int> widths, std::uint64_t init_seed);

    int input_dim() const { return widths_.empty() ? 0 : widths_.front(); }
    int output_dim() const { return widths_.empty() ? 0 : widths_.back(); }
    const std::vector<int>& widths() const { return widths_; }
    std::int64_t parameter_count() const;

    Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x, Trace& trace) const;

    // Reverse mode: accumulates parameter gradients into `grads` and returns
    // the gradient with respect to the input batch. ReLU subgradient is 0 at 0.
    Eigen::MatrixXd backward(const Trace& trace, const Eigen::MatrixXd& output_cotangent,
                             Gradients& grads) const;

    Gradients zero_gradients() const;

    std::vector<Eigen::MatrixXd>& weight_matrices() { return weights_; }
    std::vector<Eigen::VectorXd>& bias_vectors() { return biases_; }
    const std::vector<Eigen::MatrixXd>& weight_matrices() const { return weights_; }
    const std::vector<Eigen::VectorXd>& bias_vectors() const { return biases_; }

private:
    std::vector<int> widths_;
    std::vector<Eigen::MatrixXd> weights_; // weights_[l]: widths[l+1] x widths[l]
    std::vector<Eigen::VectorXd> biases_;
};

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First/second moment accumulators matching one Mlp's parameter shapes.
class AdamState {
public:
    AdamState() = default;
    AdamState(const Mlp& net, const AdamConfig& config);

    void step(Mlp& net, const Mlp::Gradients& grads);
    std::int64_t step_count() const { return step_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    Mlp::Gradients m_, v_;
    std::int64_t step_ = 0;
};

// loss(prediction, target) -> value, and writes d loss / d prediction.
using LossFn = std::function<double(const Eigen::MatrixXd& prediction,
                                    const Eigen::MatrixXd& target,
                                    Eigen::MatrixXd& cotangent)>;

// Mean squared error over every matrix entry.
double mse_loss(const Eigen::MatrixXd& prediction, const Eigen::MatrixXd& target,
                Eigen::MatrixXd& cotangent);

// Plain minibatch regression on (inputs, targets) column pairs; shuffling is
// deterministic per (seed, epoch). Returns per-epoch mean loss. Throws on a
// non-finite loss.
std::vector<double> train_regression(Mlp& net, const Eigen::MatrixXd& inputs,
                                     const Eigen::MatrixXd& targets, const LossFn& loss,
                                     int epochs, int batch_size, std::uint64_t seed,
                                     const AdamConfig& adam = {});

void save_weights(const Mlp& net, const std::string& path);
Mlp load_weights(const std::string& path);

class BinaryWriter;
class BinaryReader;

// Section-level (de)serialization so bundles can embed networks alongside
// other model state in a single container.
void save_mlp_sections(BinaryWriter& writer, const Mlp& net);
Mlp load_mlp_sections(BinaryReader& reader);

} // namespace vmo
