#include "varimotion/mogen.hpp"

#include "varimotion/binio.hpp"
#include "varimotion/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vmo {

void MogenModel::save(const std::string& path) const {
    BinaryWriter writer(path);
    writer.scalar("mogen/pose_dim", pose_dim());
    writer.scalar("mogen/lifted_dim", lifted_dim());
    save_mlp_sections(writer, f_net);
    save_mlp_sections(writer, pi_net);
}

MogenModel MogenModel::load(const std::string& path) {
    BinaryReader reader(path);
    const int pose_dim = static_cast<int>(reader.scalar("mogen/pose_dim"));
    const int lifted_dim = static_cast<int>(reader.scalar("mogen/lifted_dim"));
    MogenModel model;
    model.f_net = load_mlp_sections(reader);
    model.pi_net = load_mlp_sections(reader);
    if (model.f_net.input_dim() != pose_dim || model.f_net.output_dim() != lifted_dim ||
        model.pi_net.input_dim() != lifted_dim || model.pi_net.output_dim() != pose_dim) {
        throw std::runtime_error("mogen container dims do not match its networks");
    }
    return model;
}

MogenModel make_mogen(const MogenDims& dims, std::uint64_t seed) {
    std::vector<int> f_widths, pi_widths;
    f_widths.push_back(dims.pose_dim);
    f_widths.insert(f_widths.end(), dims.f_hidden.begin(), dims.f_hidden.end());
    f_widths.push_back(dims.lifted_dim);
    pi_widths.push_back(dims.lifted_dim);
    pi_widths.insert(pi_widths.end(), dims.pi_hidden.begin(), dims.pi_hidden.end());
    pi_widths.push_back(dims.pose_dim);
    MogenModel model;
    model.f_net = Mlp(f_widths, Rng(seed).substream("f-init").next_u64());
    model.pi_net = Mlp(pi_widths, Rng(seed).substream("pi-init").next_u64());
    return model;
}

namespace {

void check_window(const MogenModel& model, const PoseSequence& seq) {
    if (seq.frame_count() < 3) throw std::runtime_error("mogen needs windows of length >= 3");
    for (const auto& frame : seq.codes) {
        if (frame.size() != model.pose_dim()) {
            throw std::runtime_error("mogen pose dimension mismatch");
        }
    }
}

// Forward pass over a batch of windows, shared by loss evaluation and
// training. Every window contributes columns (a_0, a_1, a_T) to the f batch
// and 2T points to the pi batch: T interpolation samples then T
// extrapolation samples.
struct BatchPass {
    Eigen::MatrixXd f_inputs;   // d x 3W
    Eigen::MatrixXd pi_inputs;  // N x 2TW
    Eigen::MatrixXd targets;    // d x 2TW (alpha_i repeated for both losses)
    Mlp::Trace f_trace, pi_trace;
    Eigen::MatrixXd pi_outputs;
    int T = 0;
    int windows = 0;
};

BatchPass run_batch(const MogenModel& model, const std::vector<PoseSequence>& windows,
                    const std::vector<int>& indices) {
    BatchPass pass;
    pass.windows = static_cast<int>(indices.size());
    pass.T = windows[static_cast<size_t>(indices.front())].frame_count() - 1;
    const int d = model.pose_dim();
    const int N = model.lifted_dim();
    const int T = pass.T;

    pass.f_inputs.resize(d, 3 * pass.windows);
    for (int w = 0; w < pass.windows; ++w) {
        const PoseSequence& seq = windows[static_cast<size_t>(indices[static_cast<size_t>(w)])];
        if (seq.frame_count() != T + 1) {
            throw std::runtime_error("mogen batch windows must share a length");
        }
        pass.f_inputs.col(3 * w + 0) = seq.codes.front();
        pass.f_inputs.col(3 * w + 1) = seq.codes[1];
        pass.f_inputs.col(3 * w + 2) = seq.codes.back();
    }
    const Eigen::MatrixXd lifted = model.f_net.forward_batch(pass.f_inputs, pass.f_trace);

    pass.pi_inputs.resize(N, 2 * T * pass.windows);
    pass.targets.resize(d, 2 * T * pass.windows);
    for (int w = 0; w < pass.windows; ++w) {
        const PoseSequence& seq = windows[static_cast<size_t>(indices[static_cast<size_t>(w)])];
        const auto p0 = lifted.col(3 * w + 0);
        const auto p1 = lifted.col(3 * w + 1);
        const auto pT = lifted.col(3 * w + 2);
        for (int i = 1; i <= T; ++i) {
            const int col = w * 2 * T + (i - 1);
            pass.pi_inputs.col(col) = p0 + (static_cast<double>(i) / T) * (pT - p0);
            pass.targets.col(col) = seq.codes[static_cast<size_t>(i)];
            const int col2 = w * 2 * T + T + (i - 1);
            pass.pi_inputs.col(col2) = p0 + static_cast<double>(i) * (p1 - p0);
            pass.targets.col(col2) = seq.codes[static_cast<size_t>(i)];
        }
    }
    pass.pi_outputs = model.pi_net.forward_batch(pass.pi_inputs, pass.pi_trace);
    return pass;
}

// Mean over windows of (1/(2T)) sum of per-term coordinate MSEs.
double batch_loss(const BatchPass& pass, Eigen::MatrixXd* cotangent) {
    const Eigen::MatrixXd diff = pass.pi_outputs - pass.targets;
    const double d = static_cast<double>(diff.rows());
    const double scale = 1.0 / (2.0 * pass.T * pass.windows * d);
    if (cotangent) *cotangent = (2.0 * scale) * diff;
    return scale * diff.squaredNorm();
}

} // namespace

double mogen_loss(const MogenModel& model, const PoseSequence& seq) {
    check_window(model, seq);
    std::vector<PoseSequence> one = {seq};
    const BatchPass pass = run_batch(model, one, {0});
    return batch_loss(pass, nullptr);
}

std::vector<double> train_mogen(MogenModel& model, const std::vector<PoseSequence>& windows,
                                const MogenTrainConfig& config) {
    if (windows.empty()) throw std::runtime_error("mogen training corpus is empty");
    for (const auto& w : windows) check_window(model, w);

    AdamState f_opt(model.f_net, config.adam);
    AdamState pi_opt(model.pi_net, config.adam);
    Mlp::Gradients f_grads = model.f_net.zero_gradients();
    Mlp::Gradients pi_grads = model.pi_net.zero_gradients();

    const int n = static_cast<int>(windows.size());
    const int batch = config.batch_size > 0 ? std::min(config.batch_size, n) : n;
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> history;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle = Rng(config.seed).substream("mogen-shuffle-" + std::to_string(epoch));
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(shuffle.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        int batches = 0;
        for (int start = 0; start < n; start += batch) {
            const int size = std::min(batch, n - start);
            std::vector<int> indices(order.begin() + start, order.begin() + start + size);
            const BatchPass pass = run_batch(model, windows, indices);
            Eigen::MatrixXd pi_cot;
            const double loss = batch_loss(pass, &pi_cot);
            if (!std::isfinite(loss)) {
                throw std::runtime_error("mogen training loss became non-finite at epoch " +
                                         std::to_string(epoch));
            }

            pi_grads.setZero();
            const Eigen::MatrixXd pi_input_grad =
                model.pi_net.backward(pass.pi_trace, pi_cot, pi_grads);

            // Chain the pi-input gradients back onto the lifted endpoints:
            //   interp sample i depends on f(a_0) with weight (1 - i/T) and
            //   f(a_T) with weight i/T; extrap sample i on f(a_0) with weight
            //   (1 - i) and f(a_1) with weight i.
            const int T = pass.T;
            Eigen::MatrixXd f_cot = Eigen::MatrixXd::Zero(model.lifted_dim(), 3 * pass.windows);
            for (int w = 0; w < pass.windows; ++w) {
                for (int i = 1; i <= T; ++i) {
                    const double t = static_cast<double>(i) / T;
                    const auto g_interp = pi_input_grad.col(w * 2 * T + (i - 1));
                    const auto g_extrap = pi_input_grad.col(w * 2 * T + T + (i - 1));
                    f_cot.col(3 * w + 0) += (1.0 - t) * g_interp + (1.0 - i) * g_extrap;
                    f_cot.col(3 * w + 1) += static_cast<double>(i) * g_extrap;
                    f_cot.col(3 * w + 2) += t * g_interp;
                }
            }
            f_grads.setZero();
            model.f_net.backward(pass.f_trace, f_cot, f_grads);

            pi_opt.step(model.pi_net, pi_grads);
            f_opt.step(model.f_net, f_grads);
            epoch_loss += loss;
            ++batches;
        }
        history.push_back(epoch_loss / batches);
    }
    return history;
}

std::vector<PoseSequence> extract_minisequences(const std::vector<PoseSequence>& sequences,
                                                int T, int stride) {
    if (T < 2) throw std::runtime_error("mini-sequence T must be >= 2");
    if (stride <= 0) throw std::runtime_error("mini-sequence stride must be positive");
    std::vector<PoseSequence> windows;
    for (const PoseSequence& seq : sequences) {
        for (int start = 0; start + T < seq.frame_count(); start += stride) {
            PoseSequence window;
            window.frame_rate = seq.frame_rate;
            window.codes.assign(seq.codes.begin() + start, seq.codes.begin() + start + T + 1);
            windows.push_back(std::move(window));
        }
    }
    return windows;
}

PoseSequence interpolate(const MogenModel& model, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b, int steps) {
    if (steps < 2) throw std::runtime_error("interpolate needs at least 2 steps");
    if (a.size() != model.pose_dim() || b.size() != model.pose_dim()) {
        throw std::runtime_error("interpolate pose dimension mismatch");
    }
    const Eigen::VectorXd fa = model.lift(a);
    const Eigen::VectorXd fb = model.lift(b);
    PoseSequence out;
    out.codes.reserve(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        // Endpoints hit f(a) and f(b) bit-exactly.
        Eigen::VectorXd point;
        if (i == 0) {
            point = fa;
        } else if (i == steps - 1) {
            point = fb;
        } else {
            point = fa + (static_cast<double>(i) / (steps - 1)) * (fb - fa);
        }
        out.codes.push_back(model.project(point));
    }
    return out;
}

PoseSequence extrapolate(const MogenModel& model, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& a_next, int steps) {
    if (steps < 1) throw std::runtime_error("extrapolate needs at least 1 step");
    if (a.size() != model.pose_dim() || a_next.size() != model.pose_dim()) {
        throw std::runtime_error("extrapolate pose dimension mismatch");
    }
    const Eigen::VectorXd fa = model.lift(a);
    const Eigen::VectorXd fn = model.lift(a_next);
    PoseSequence out;
    out.codes.reserve(static_cast<size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        Eigen::VectorXd point;
        if (i == 0) {
            point = fa;
        } else if (i == 1) {
            point = fn;
        } else {
            point = fa + static_cast<double>(i) * (fn - fa);
        }
        out.codes.push_back(model.project(point));
    }
    return out;
}

} // namespace vmo
