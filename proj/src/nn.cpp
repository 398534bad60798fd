#include "varimotion/nn.hpp"

#include "varimotion/binio.hpp"
#include "varimotion/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vmo {

void Mlp::Gradients::setZero() {
    for (auto& w : weights) w.setZero();
    for (auto& b : biases) b.setZero();
}

void Mlp::Gradients::scale(double factor) {
    for (auto& w : weights) w *= factor;
    for (auto& b : biases) b *= factor;
}

void Mlp::Gradients::add(const Gradients& other, double factor) {
    for (size_t l = 0; l < weights.size(); ++l) {
        weights[l] += factor * other.weights[l];
        biases[l] += factor * other.biases[l];
    }
}

Mlp::Mlp(std::vector<int> widths, std::uint64_t init_seed) : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw std::runtime_error("Mlp needs at least input and output widths");
    for (int w : widths_) {
        if (w <= 0) throw std::runtime_error("Mlp widths must be positive");
    }
    Rng rng = Rng(init_seed).substream("he-init");
    for (size_t l = 0; l + 1 < widths_.size(); ++l) {
        const int fan_in = widths_[l];
        const int fan_out = widths_[l + 1];
        const double limit = std::sqrt(6.0 / fan_in);
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i) {
            for (int j = 0; j < fan_in; ++j) w(i, j) = rng.uniform(-limit, limit);
        }
        weights_.push_back(std::move(w));
        biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    }
}

std::int64_t Mlp::parameter_count() const {
    std::int64_t count = 0;
    for (size_t l = 0; l < weights_.size(); ++l) {
        count += weights_[l].size() + biases_[l].size();
    }
    return count;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
    return forward_batch(x);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& x) const {
    if (x.rows() != input_dim()) throw std::runtime_error("Mlp input dimension mismatch");
    Eigen::MatrixXd a = x;
    for (size_t l = 0; l < weights_.size(); ++l) {
        a = (weights_[l] * a).colwise() + biases_[l];
        if (l + 1 < weights_.size()) a = a.cwiseMax(0.0);
    }
    return a;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& x, Trace& trace) const {
    if (x.rows() != input_dim()) throw std::runtime_error("Mlp input dimension mismatch");
    trace.activations.clear();
    trace.activations.reserve(weights_.size() + 1);
    trace.activations.push_back(x);
    Eigen::MatrixXd a = x;
    for (size_t l = 0; l < weights_.size(); ++l) {
        a = (weights_[l] * a).colwise() + biases_[l];
        if (l + 1 < weights_.size()) a = a.cwiseMax(0.0);
        trace.activations.push_back(a);
    }
    return a;
}

Eigen::MatrixXd Mlp::backward(const Trace& trace, const Eigen::MatrixXd& output_cotangent,
                              Gradients& grads) const {
    if (trace.activations.size() != weights_.size() + 1) {
        throw std::runtime_error("Mlp backward: trace does not match network depth");
    }
    if (output_cotangent.rows() != output_dim() ||
        output_cotangent.cols() != trace.activations.back().cols()) {
        throw std::runtime_error("Mlp backward: cotangent shape mismatch");
    }
    Eigen::MatrixXd delta = output_cotangent;
    for (int l = static_cast<int>(weights_.size()) - 1; l >= 0; --l) {
        grads.weights[l].noalias() += delta * trace.activations[l].transpose();
        grads.biases[l] += delta.rowwise().sum();
        delta = weights_[l].transpose() * delta;
        if (l > 0) {
            // ReLU mask from the stored post-activation; 0 stays 0.
            delta = (trace.activations[l].array() > 0.0).cast<double>() * delta.array();
        }
    }
    return delta;
}

Mlp::Gradients Mlp::zero_gradients() const {
    Gradients g;
    for (size_t l = 0; l < weights_.size(); ++l) {
        g.weights.push_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(biases_[l].size()));
    }
    return g;
}

AdamState::AdamState(const Mlp& net, const AdamConfig& config)
    : config_(config), m_(net.zero_gradients()), v_(net.zero_gradients()) {}

namespace {

void adam_update(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad,
                 Eigen::MatrixXd& m, Eigen::MatrixXd& v, const AdamConfig& c, double bc1,
                 double bc2) {
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v.array().matrix() + (1.0 - c.beta2) * grad.cwiseProduct(grad);
    param.array() -=
        c.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + c.epsilon);
}

} // namespace

void AdamState::step(Mlp& net, const Mlp::Gradients& grads) {
    ++step_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
    auto& weights = net.weight_matrices();
    auto& biases = net.bias_vectors();
    for (size_t l = 0; l < weights.size(); ++l) {
        if (!grads.weights[l].allFinite() || !grads.biases[l].allFinite()) {
            throw std::runtime_error("non-finite gradient in Adam step");
        }
        adam_update(weights[l], grads.weights[l], m_.weights[l], v_.weights[l], config_, bc1, bc2);
        Eigen::MatrixXd gb = grads.biases[l];
        Eigen::MatrixXd mb = m_.biases[l];
        Eigen::MatrixXd vb = v_.biases[l];
        adam_update(biases[l], gb, mb, vb, config_, bc1, bc2);
        m_.biases[l] = mb;
        v_.biases[l] = vb;
    }
}

double mse_loss(const Eigen::MatrixXd& prediction, const Eigen::MatrixXd& target,
                Eigen::MatrixXd& cotangent) {
    const Eigen::MatrixXd diff = prediction - target;
    const double n = static_cast<double>(diff.size());
    cotangent = (2.0 / n) * diff;
    return diff.squaredNorm() / n;
}

std::vector<double> train_regression(Mlp& net, const Eigen::MatrixXd& inputs,
                                     const Eigen::MatrixXd& targets, const LossFn& loss,
                                     int epochs, int batch_size, std::uint64_t seed,
                                     const AdamConfig& adam) {
    if (inputs.cols() != targets.cols()) throw std::runtime_error("inputs/targets count mismatch");
    if (inputs.cols() == 0) throw std::runtime_error("empty training set");
    if (batch_size <= 0) batch_size = static_cast<int>(inputs.cols());

    AdamState optimizer(net, adam);
    Mlp::Gradients grads = net.zero_gradients();
    std::vector<double> history;
    const int n = static_cast<int>(inputs.cols());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng shuffle = Rng(seed).substream("shuffle-" + std::to_string(epoch));
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(shuffle.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        int batches = 0;
        for (int start = 0; start < n; start += batch_size) {
            const int count = std::min(batch_size, n - start);
            Eigen::MatrixXd x(inputs.rows(), count);
            Eigen::MatrixXd y(targets.rows(), count);
            for (int k = 0; k < count; ++k) {
                x.col(k) = inputs.col(order[start + k]);
                y.col(k) = targets.col(order[start + k]);
            }
            Mlp::Trace trace;
            const Eigen::MatrixXd pred = net.forward_batch(x, trace);
            Eigen::MatrixXd cot;
            const double value = loss(pred, y, cot);
            if (!std::isfinite(value)) {
                throw std::runtime_error("training aborted: loss became non-finite at epoch " +
                                         std::to_string(epoch));
            }
            grads.setZero();
            net.backward(trace, cot, grads);
            optimizer.step(net, grads);
            epoch_loss += value;
            ++batches;
        }
        history.push_back(epoch_loss / batches);
    }
    return history;
}

void save_mlp_sections(BinaryWriter& writer, const Mlp& net) {
    Eigen::VectorXd widths(static_cast<Eigen::Index>(net.widths().size()));
    for (size_t i = 0; i < net.widths().size(); ++i) {
        widths[static_cast<Eigen::Index>(i)] = net.widths()[i];
    }
    writer.section("mlp/widths", widths);
    for (size_t l = 0; l < net.weight_matrices().size(); ++l) {
        writer.section("mlp/w" + std::to_string(l), net.weight_matrices()[l]);
        writer.section("mlp/b" + std::to_string(l), net.bias_vectors()[l]);
    }
}

Mlp load_mlp_sections(BinaryReader& reader) {
    const Eigen::VectorXd widths = reader.vector("mlp/widths");
    if (widths.size() < 2) throw std::runtime_error("mlp container declares fewer than 2 layers");
    std::vector<int> w(static_cast<size_t>(widths.size()));
    for (Eigen::Index i = 0; i < widths.size(); ++i) {
        w[static_cast<size_t>(i)] = static_cast<int>(widths[i]);
        if (w[static_cast<size_t>(i)] <= 0) throw std::runtime_error("mlp container has invalid width");
    }
    Mlp net(w, 0);
    for (size_t l = 0; l + 1 < w.size(); ++l) {
        Eigen::MatrixXd weight = reader.matrix("mlp/w" + std::to_string(l));
        Eigen::VectorXd bias = reader.vector("mlp/b" + std::to_string(l));
        if (weight.rows() != w[l + 1] || weight.cols() != w[l] || bias.size() != w[l + 1]) {
            throw std::runtime_error("mlp container shape does not match declared widths");
        }
        net.weight_matrices()[l] = std::move(weight);
        net.bias_vectors()[l] = std::move(bias);
    }
    return net;
}

void save_weights(const Mlp& net, const std::string& path) {
    BinaryWriter writer(path);
    save_mlp_sections(writer, net);
}

Mlp load_weights(const std::string& path) {
    BinaryReader reader(path);
    return load_mlp_sections(reader);
}

} // namespace vmo
