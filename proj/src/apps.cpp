#include "varimotion/apps.hpp"

#include "varimotion/rng.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace vmo {

TriMesh decode_frame(const Decoder& f, const BodyMotion& motion, int frame) {
    if (frame < 0 || frame >= motion.poses.frame_count()) {
        throw std::runtime_error("motion frame index out of range");
    }
    Eigen::VectorXd code(f.latent_dim());
    code.head(f.pose_dim()) = motion.poses.codes[static_cast<size_t>(frame)];
    code.tail(f.latent_dim() - f.pose_dim()) = motion.identity;
    return f.decode(code);
}

std::vector<Eigen::VectorXd> LiftedPath::points() const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(increments.size() + 1);
    out.push_back(start);
    for (const auto& inc : increments) out.push_back(out.back() + inc);
    return out;
}

LiftedPath lift_path(const MogenModel& model, const PoseSequence& poses) {
    if (poses.frame_count() < 1) throw std::runtime_error("cannot lift an empty sequence");
    LiftedPath path;
    Eigen::VectorXd prev = model.lift(poses.codes.front());
    path.start = prev;
    for (int i = 1; i < poses.frame_count(); ++i) {
        Eigen::VectorXd next = model.lift(poses.codes[static_cast<size_t>(i)]);
        path.increments.push_back(next - prev);
        prev = std::move(next);
    }
    return path;
}

BodyMotion transfer_pose_swap(const std::vector<TriMesh>& motion_meshes,
                              const TriMesh& target_mesh, const VariShapeModel& model) {
    if (motion_meshes.empty()) throw std::runtime_error("motion has no frames");
    BodyMotion out;
    out.identity = model.retrieve(target_mesh).shape;
    for (const TriMesh& frame : motion_meshes) {
        out.poses.codes.push_back(model.retrieve(frame).pose);
    }
    return out;
}

BodyMotion transfer_lifted(const BodyMotion& motion, const Eigen::VectorXd& target_pose,
                           const MogenModel& model, LiftedPath* out_path) {
    if (target_pose.size() != model.pose_dim()) {
        throw std::runtime_error("transfer_lifted pose dimension mismatch");
    }
    LiftedPath source = lift_path(model, motion.poses);
    LiftedPath translated;
    translated.start = model.lift(target_pose);
    translated.increments = std::move(source.increments);

    BodyMotion out;
    out.identity = motion.identity;
    out.poses.frame_rate = motion.poses.frame_rate;
    for (const auto& point : translated.points()) {
        out.poses.codes.push_back(model.project(point));
    }
    if (out_path) *out_path = std::move(translated);
    return out;
}

LiftedLine fit_lifted_line(const PoseSequence& poses, const MogenModel& model) {
    if (poses.frame_count() < 2) throw std::runtime_error("line fit needs at least 2 frames");
    const int count = poses.frame_count();
    const int N = model.lifted_dim();
    Eigen::MatrixXd points(N, count);
    for (int i = 0; i < count; ++i) points.col(i) = model.lift(poses.codes[static_cast<size_t>(i)]);

    const Eigen::VectorXd mean = points.rowwise().mean();
    Eigen::MatrixXd centered = points.colwise() - mean;

    LiftedLine line;
    const double spread = centered.norm();
    if (spread < 1e-12 * std::max(1.0, mean.norm())) {
        line.base = mean;
        line.direction = Eigen::VectorXd::Zero(N);
        line.constant = true;
        return line;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
    Eigen::VectorXd direction = svd.matrixU().col(0);
    // Orient along time.
    if (direction.dot(centered.col(count - 1) - centered.col(0)) < 0.0) direction = -direction;

    Eigen::VectorXd params(count);
    for (int i = 0; i < count; ++i) params[i] = direction.dot(centered.col(i));
    line.base = mean + params[0] * direction;
    line.direction = direction;
    line.length = params[count - 1] - params[0];

    double sq = 0.0;
    for (int i = 0; i < count; ++i) {
        sq += (centered.col(i) - params[i] * direction).squaredNorm();
    }
    line.residual = std::sqrt(sq / count);
    return line;
}

namespace {

PoseSequence project_samples(const MogenModel& model, const std::vector<Eigen::VectorXd>& pts) {
    PoseSequence out;
    out.codes.reserve(pts.size());
    for (const auto& p : pts) out.codes.push_back(model.project(p));
    return out;
}

// Piecewise-linear resampling of a lifted polyline at `frames` uniform
// parameters.
std::vector<Eigen::VectorXd> resample_polyline(const Eigen::MatrixXd& points, int frames) {
    const int count = static_cast<int>(points.cols());
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<size_t>(frames));
    for (int k = 0; k < frames; ++k) {
        const double u = frames == 1 ? 0.0 : static_cast<double>(k) / (frames - 1) * (count - 1);
        const int lo = std::min(static_cast<int>(u), count - 2);
        const double w = u - lo;
        out.push_back((1.0 - w) * points.col(lo) + w * points.col(lo + 1));
    }
    return out;
}

} // namespace

PoseSequence interpolate_4d(const PoseSequence& seq_a, const PoseSequence& seq_b, double s,
                            int out_frames, const MogenModel& model, Blend4d scheme) {
    if (out_frames < 2) throw std::runtime_error("interpolate_4d needs at least 2 output frames");

    if (scheme == Blend4d::kPointwise) {
        Eigen::MatrixXd pa(model.lifted_dim(), seq_a.frame_count());
        Eigen::MatrixXd pb(model.lifted_dim(), seq_b.frame_count());
        for (int i = 0; i < seq_a.frame_count(); ++i) {
            pa.col(i) = model.lift(seq_a.codes[static_cast<size_t>(i)]);
        }
        for (int i = 0; i < seq_b.frame_count(); ++i) {
            pb.col(i) = model.lift(seq_b.codes[static_cast<size_t>(i)]);
        }
        const auto ra = resample_polyline(pa, out_frames);
        const auto rb = resample_polyline(pb, out_frames);
        std::vector<Eigen::VectorXd> blended(static_cast<size_t>(out_frames));
        for (int k = 0; k < out_frames; ++k) {
            blended[static_cast<size_t>(k)] = (1.0 - s) * ra[static_cast<size_t>(k)] +
                                              s * rb[static_cast<size_t>(k)];
        }
        PoseSequence out = project_samples(model, blended);
        out.frame_rate = (1.0 - s) * seq_a.frame_rate + s * seq_b.frame_rate;
        return out;
    }

    const LiftedLine line_a = fit_lifted_line(seq_a, model);
    const LiftedLine line_b = fit_lifted_line(seq_b, model);

    const Eigen::VectorXd base = (1.0 - s) * line_a.base + s * line_b.base;
    Eigen::VectorXd direction = (1.0 - s) * line_a.direction + s * line_b.direction;
    const double length = (1.0 - s) * line_a.length + s * line_b.length;
    const double norm = direction.norm();
    if (norm > 1e-12) {
        direction /= norm;
    } else {
        direction.setZero(); // both lines constant (or exactly opposed)
    }

    std::vector<Eigen::VectorXd> samples;
    samples.reserve(static_cast<size_t>(out_frames));
    for (int k = 0; k < out_frames; ++k) {
        const double t = static_cast<double>(k) / (out_frames - 1) * length;
        samples.push_back(base + t * direction);
    }
    PoseSequence out = project_samples(model, samples);
    out.frame_rate = (1.0 - s) * seq_a.frame_rate + s * seq_b.frame_rate;
    return out;
}

KdeModel fit_kde(const Eigen::MatrixXd& samples, double bandwidth_scale) {
    if (samples.cols() < 2) throw std::runtime_error("KDE needs at least 2 samples");
    const double k = static_cast<double>(samples.cols());
    const double dim = static_cast<double>(samples.rows());
    const double scott = std::pow(k, -1.0 / (dim + 4.0));
    KdeModel model;
    model.samples = samples;
    model.bandwidth.resize(samples.rows());
    for (Eigen::Index r = 0; r < samples.rows(); ++r) {
        const double mean = samples.row(r).mean();
        const double var = (samples.row(r).array() - mean).square().mean();
        model.bandwidth[r] = bandwidth_scale * scott * std::sqrt(var);
    }
    return model;
}

Eigen::VectorXd sample_kde(const KdeModel& model, Rng& rng) {
    const Eigen::Index pick =
        static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(model.samples.cols())));
    Eigen::VectorXd out = model.samples.col(pick);
    for (Eigen::Index r = 0; r < out.size(); ++r) {
        out[r] += rng.normal(0.0, model.bandwidth[r]);
    }
    return out;
}

TriMesh generate_body(const KdeModel& kde_pose, const KdeModel& kde_shape,
                      const MogenModel& mogen, const Decoder& f, std::uint64_t seed) {
    Rng rng(seed);
    Rng pose_rng = rng.substream("kde-pose");
    Rng shape_rng = rng.substream("kde-shape");
    const Eigen::VectorXd lifted = sample_kde(kde_pose, pose_rng);
    const Eigen::VectorXd pose = mogen.project(lifted);
    const Eigen::VectorXd shape = sample_kde(kde_shape, shape_rng);
    if (pose.size() != f.pose_dim() || shape.size() != f.latent_dim() - f.pose_dim()) {
        throw std::runtime_error("generate_body dimension mismatch");
    }
    Eigen::VectorXd code(f.latent_dim());
    code.head(pose.size()) = pose;
    code.tail(shape.size()) = shape;
    return f.decode(code);
}

} // namespace vmo
