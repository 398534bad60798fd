#pragma once

#include "varimotion/nn.hpp"
#include "varimotion/pose_sequence.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vmo {

// The lift f: L -> R^N and projection pi: R^N -> L. Motions that are curved
// in pose space become (approximately) straight lines in the lifted space.
struct MogenModel {
    Mlp f_net;  // d_pose -> N
    Mlp pi_net; // N -> d_pose

    int pose_dim() const { return f_net.input_dim(); }
    int lifted_dim() const { return f_net.output_dim(); }

    Eigen::VectorXd lift(const Eigen::VectorXd& pose) const { return f_net.forward(pose); }
    Eigen::VectorXd project(const Eigen::VectorXd& point) const { return pi_net.forward(point); }

    void save(const std::string& path) const;
    static MogenModel load(const std::string& path);
};

struct MogenDims {
    int pose_dim = 48;
    int lifted_dim = 192; // ~4x expansion over pose space
    std::vector<int> f_hidden = {256, 256};
    std::vector<int> pi_hidden = {256, 256};
};

MogenModel make_mogen(const MogenDims& dims, std::uint64_t seed);

// Training loss on one mini-sequence alpha_0..alpha_T (T >= 2):
//   (1/(2T)) sum_{i=1..T} [ MSE(pi(f(a_0) + i*(f(a_T)-f(a_0))/T), a_i)
//                         + MSE(pi(f(a_0) + i*(f(a_1)-f(a_0))),   a_i) ]
// where MSE averages squared coordinate differences. The first term is the
// interpolation loss, the second the extrapolation loss.
double mogen_loss(const MogenModel& model, const PoseSequence& seq);

struct MogenTrainConfig {
    int epochs = 200;
    int batch_size = 16; // windows per step
    std::uint64_t seed = 0;
    AdamConfig adam = {1e-3, 0.9, 0.999, 1e-8};
};

// Minimizes the mean mogen_loss over mini-sequence batches, backpropagating
// through both nets (including through pi's input into f). Returns per-epoch
// mean loss.
std::vector<double> train_mogen(MogenModel& model, const std::vector<PoseSequence>& windows,
                                const MogenTrainConfig& config);

// Sliding windows of length T+1; sequences shorter than a window are skipped.
std::vector<PoseSequence> extract_minisequences(const std::vector<PoseSequence>& sequences,
                                                int T, int stride);

// pi evaluated at `steps` equispaced points of [f(a), f(b)], endpoints
// sampled at exactly f(a) and f(b).
PoseSequence interpolate(const MogenModel& model, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& b, int steps);

// Frame i = pi(f(a) + i * (f(a_next) - f(a))), i = 0..steps-1.
PoseSequence extrapolate(const MogenModel& model, const Eigen::VectorXd& a,
                         const Eigen::VectorXd& a_next, int steps);

} // namespace vmo
