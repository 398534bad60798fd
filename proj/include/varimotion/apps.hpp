#pragma once

#include "varimotion/mogen.hpp"
#include "varimotion/pose_sequence.hpp"
#include "varimotion/varishape.hpp"

#include <cstdint>
#include <vector>

namespace vmo {

// A motion paired with a body identity; decodable frame by frame through a
// pose/shape decoder.
struct BodyMotion {
    Eigen::VectorXd identity; // shape block
    PoseSequence poses;
};

TriMesh decode_frame(const Decoder& f, const BodyMotion& motion, int frame);

// A path in the lifted space stored as a start point plus per-step
// increments; translation changes only the start, so increments survive a
// transfer bit-for-bit.
struct LiftedPath {
    Eigen::VectorXd start;
    std::vector<Eigen::VectorXd> increments;

    std::vector<Eigen::VectorXd> points() const; // cumulative sums
};

LiftedPath lift_path(const MogenModel& model, const PoseSequence& poses);

// Variant 1 (block swap): retrieve every motion frame and the target, keep
// the frames' pose blocks and the target's shape block.
BodyMotion transfer_pose_swap(const std::vector<TriMesh>& motion_meshes,
                              const TriMesh& target_mesh, const VariShapeModel& model);

// Variant 2 (lifted translation): replay the motion's lifted increments from
// f(target_pose) and project back. The identity block is copied from the
// input motion (callers swap it separately if desired).
BodyMotion transfer_lifted(const BodyMotion& motion, const Eigen::VectorXd& target_pose,
                           const MogenModel& model, LiftedPath* out_path = nullptr);

// Least-squares line through lifted frames, arc-length parameterized:
// base = projection of the first frame, |direction| = 1, interval [0, length].
struct LiftedLine {
    Eigen::VectorXd base;
    Eigen::VectorXd direction;
    double length = 0.0;
    bool constant = false;
    double residual = 0.0; // RMS point-to-line distance
};

LiftedLine fit_lifted_line(const PoseSequence& poses, const MogenModel& model);

enum class Blend4d {
    kLine,      // blend (base, direction, interval length) of fitted lines
    kPointwise, // resample both lifted polylines and blend pointwise
};

// Blends the two motions' lifted representations by s (s in [0,1]
// interpolates; outside extrapolates) and projects out_frames samples back
// to pose space.
PoseSequence interpolate_4d(const PoseSequence& seq_a, const PoseSequence& seq_b, double s,
                            int out_frames, const MogenModel& model,
                            Blend4d scheme = Blend4d::kLine);

inline PoseSequence extrapolate_4d(const PoseSequence& seq_a, const PoseSequence& seq_b,
                                   double s, int out_frames, const MogenModel& model,
                                   Blend4d scheme = Blend4d::kLine) {
    return interpolate_4d(seq_a, seq_b, s, out_frames, model, scheme);
}

// Gaussian KDE with per-coordinate Scott's-rule bandwidths
// (k^(-1/(dim+4)) * per-coordinate std * bandwidth_scale); equivalent to a
// scalar bandwidth on standardized coordinates.
struct KdeModel {
    Eigen::MatrixXd samples;   // dim x k
    Eigen::VectorXd bandwidth; // per coordinate
};

KdeModel fit_kde(const Eigen::MatrixXd& samples, double bandwidth_scale = 1.0);
Eigen::VectorXd sample_kde(const KdeModel& model, Rng& rng);

// Samples a lifted pose code and a shape code, projects the pose via pi, and
// decodes. The pose KDE lives in the lifted space, the identity KDE in shape
// space.
TriMesh generate_body(const KdeModel& kde_pose, const KdeModel& kde_shape,
                      const MogenModel& mogen, const Decoder& f, std::uint64_t seed);

} // namespace vmo
