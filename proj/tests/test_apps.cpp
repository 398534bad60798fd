#include "varimotion/apps.hpp"

#include "varimotion/rng.hpp"
#include "varimotion/skinned_body.hpp"
#include "varimotion/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace vmo;

namespace {

MogenModel small_model(int pose_dim = 6, int lifted_dim = 10, std::uint64_t seed = 3) {
    MogenDims dims;
    dims.pose_dim = pose_dim;
    dims.lifted_dim = lifted_dim;
    dims.f_hidden = {16};
    dims.pi_hidden = {16};
    return make_mogen(dims, seed);
}

MogenModel identity_model(int dim) {
    MogenModel model;
    model.f_net = Mlp({dim, dim}, 1);
    model.pi_net = Mlp({dim, dim}, 2);
    model.f_net.weight_matrices()[0] = Eigen::MatrixXd::Identity(dim, dim);
    model.f_net.bias_vectors()[0].setZero();
    model.pi_net.weight_matrices()[0] = Eigen::MatrixXd::Identity(dim, dim);
    model.pi_net.bias_vectors()[0].setZero();
    return model;
}

PoseSequence random_sequence(Rng& rng, int frames, int dim) {
    PoseSequence seq;
    for (int i = 0; i < frames; ++i) {
        Eigen::VectorXd p(dim);
        for (int k = 0; k < dim; ++k) p[k] = 0.4 * rng.normal();
        seq.codes.push_back(p);
    }
    return seq;
}

// A straight-line motion in pose space: under the identity lift its lifted
// line fit is exact.
PoseSequence line_sequence(const Eigen::VectorXd& a, const Eigen::VectorXd& dir, int frames,
                           double step) {
    PoseSequence seq;
    for (int i = 0; i < frames; ++i) seq.codes.push_back(a + (i * step) * dir);
    return seq;
}

} // namespace

TEST_CASE("lifted path points are cumulative sums of increments") {
    const MogenModel model = small_model();
    Rng rng(60);
    const PoseSequence seq = random_sequence(rng, 5, 6);
    const LiftedPath path = lift_path(model, seq);
    REQUIRE(path.increments.size() == 4);
    const auto pts = path.points();
    REQUIRE(pts.size() == 5);
    CHECK(pts[0] == path.start);
    for (size_t i = 0; i < seq.codes.size(); ++i) {
        CHECK((pts[i] - model.lift(seq.codes[i])).norm() < 1e-12);
    }
}

TEST_CASE("transfer_lifted preserves the increments bit-for-bit") {
    const MogenModel model = small_model();
    Rng rng(61);
    BodyMotion motion;
    motion.identity = Eigen::VectorXd::Ones(3);
    motion.poses = random_sequence(rng, 7, 6);
    Eigen::VectorXd target(6);
    for (int i = 0; i < 6; ++i) target[i] = 0.3 * rng.normal();

    const LiftedPath original = lift_path(model, motion.poses);
    LiftedPath transferred;
    const BodyMotion out = transfer_lifted(motion, target, model, &transferred);

    REQUIRE(transferred.increments.size() == original.increments.size());
    for (size_t i = 0; i < original.increments.size(); ++i) {
        CHECK(transferred.increments[i] == original.increments[i]);
    }
    CHECK(transferred.start == model.lift(target));
    // First output frame is the autoencoded target pose.
    CHECK(out.poses.codes.front() == model.project(model.lift(target)));
    CHECK(out.poses.codes.size() == motion.poses.codes.size());
    CHECK(out.identity == motion.identity);
}

TEST_CASE("transfer_lifted onto the motion's own first pose reproduces it") {
    const MogenModel model = small_model();
    Rng rng(62);
    BodyMotion motion;
    motion.identity = Eigen::VectorXd::Ones(2);
    motion.poses = random_sequence(rng, 6, 6);
    const BodyMotion out = transfer_lifted(motion, motion.poses.codes.front(), model);
    for (size_t i = 0; i < motion.poses.codes.size(); ++i) {
        // Same start, same increments: identical lifted points, identical output.
        const Eigen::VectorXd expected =
            model.project(lift_path(model, motion.poses).points()[i]);
        CHECK(out.poses.codes[i] == expected);
    }
}

TEST_CASE("fit_lifted_line is exact on straight lifted motions") {
    const int dim = 5;
    const MogenModel model = identity_model(dim);
    Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(dim, 0.0, 1.0);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
    dir[2] = 1.0;
    const PoseSequence seq = line_sequence(a, dir, 6, 0.25);

    const LiftedLine line = fit_lifted_line(seq, model);
    CHECK(line.constant == false);
    CHECK(line.residual < 1e-12);
    CHECK(std::abs(line.direction.norm() - 1.0) < 1e-12);
    // Direction is oriented along time.
    CHECK(line.direction.dot(dir) > 0.99);
    // Interval length equals the covered distance: 5 steps of 0.25.
    CHECK(line.length == doctest::Approx(1.25).epsilon(1e-12));
    CHECK((line.base - a).norm() < 1e-12);
}

TEST_CASE("fit_lifted_line flags constant motions") {
    const MogenModel model = identity_model(3);
    Eigen::VectorXd a(3);
    a << 0.1, 0.2, 0.3;
    const PoseSequence seq = line_sequence(a, Eigen::VectorXd::Zero(3), 4, 0.0);
    const LiftedLine line = fit_lifted_line(seq, model);
    CHECK(line.constant == true);
    CHECK(line.length == 0.0);
}

TEST_CASE("interpolate_4d at s=0 replays sequence A (line scheme)") {
    const int dim = 4;
    const MogenModel model = identity_model(dim);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd da = Eigen::VectorXd::Unit(dim, 0);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(dim);
    Eigen::VectorXd db = Eigen::VectorXd::Unit(dim, 1);
    const PoseSequence seq_a = line_sequence(a, da, 5, 0.2);
    const PoseSequence seq_b = line_sequence(b, db, 5, 0.3);

    const PoseSequence out = interpolate_4d(seq_a, seq_b, 0.0, 5, model, Blend4d::kLine);
    REQUIRE(out.codes.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK((out.codes[static_cast<size_t>(i)] - seq_a.codes[static_cast<size_t>(i)])
                  .norm() < 1e-10);
    }
}

TEST_CASE("interpolate_4d between a sequence and itself returns it") {
    const MogenModel model = small_model(6, 9, 8);
    Rng rng(63);
    const PoseSequence seq = random_sequence(rng, 6, 6);
    for (Blend4d scheme : {Blend4d::kLine, Blend4d::kPointwise}) {
        const PoseSequence out = interpolate_4d(seq, seq, 0.5, 6, model, scheme);
        const PoseSequence self0 = interpolate_4d(seq, seq, 0.0, 6, model, scheme);
        REQUIRE(out.codes.size() == 6);
        for (size_t i = 0; i < out.codes.size(); ++i) {
            CHECK((out.codes[i] - self0.codes[i]).norm() < 1e-10);
        }
    }
}

TEST_CASE("line scheme blends interval lengths affinely") {
    const int dim = 3;
    const MogenModel model = identity_model(dim);
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(dim);
    const Eigen::VectorXd dir = Eigen::VectorXd::Unit(dim, 0);
    // Same line, different speeds: lengths 1.0 and 2.0.
    const PoseSequence slow = line_sequence(origin, dir, 5, 0.25);
    const PoseSequence fast = line_sequence(origin, dir, 5, 0.5);

    // At s = 0.75 the blended interval length must be 1.75, so the final
    // frame sits at 1.75 * dir.
    const PoseSequence out = interpolate_4d(slow, fast, 0.75, 5, model, Blend4d::kLine);
    CHECK((out.codes.back() - 1.75 * dir).norm() < 1e-10);
    CHECK(out.codes.front().norm() < 1e-10);
}

TEST_CASE("pointwise scheme blends resampled lifted points") {
    const int dim = 2;
    const MogenModel model = identity_model(dim);
    const PoseSequence seq_a = line_sequence(Eigen::VectorXd::Zero(dim),
                                             Eigen::VectorXd::Unit(dim, 0), 3, 0.5);
    const PoseSequence seq_b = line_sequence(Eigen::VectorXd::Zero(dim),
                                             Eigen::VectorXd::Unit(dim, 1), 5, 0.25);
    const PoseSequence out = interpolate_4d(seq_a, seq_b, 0.5, 3, model, Blend4d::kPointwise);
    REQUIRE(out.codes.size() == 3);
    // Endpoint of A is (1, 0), of B is (0, 1); midpoint blend is (0.5, 0.5).
    CHECK((out.codes.back() - Eigen::Vector2d(0.5, 0.5)).norm() < 1e-10);
}

TEST_CASE("extrapolate_4d outside [0,1] overshoots the endpoints") {
    const int dim = 2;
    const MogenModel model = identity_model(dim);
    const PoseSequence seq_a = line_sequence(Eigen::VectorXd::Zero(dim),
                                             Eigen::VectorXd::Unit(dim, 0), 4, 0.25);
    PoseSequence seq_b = seq_a;
    for (auto& c : seq_b.codes) c[1] += 1.0; // parallel line shifted in y
    const PoseSequence out = extrapolate_4d(seq_a, seq_b, 2.0, 4, model, Blend4d::kPointwise);
    // s = 2 doubles the shift.
    CHECK(out.codes.front()[1] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("kde with a tiny bandwidth resamples the input points") {
    Eigen::MatrixXd samples(2, 3);
    samples << 0, 10, 20, 0, -10, 5;
    const KdeModel kde = fit_kde(samples, 1e-12);
    Rng rng(64);
    for (int i = 0; i < 50; ++i) {
        const Eigen::VectorXd x = sample_kde(kde, rng);
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < 3; ++j) best = std::min(best, (x - samples.col(j)).norm());
        CHECK(best < 1e-6);
    }
}

TEST_CASE("kde bandwidth follows Scott's rule per coordinate") {
    Rng rng(65);
    const int k = 500;
    Eigen::MatrixXd samples(2, k);
    for (int j = 0; j < k; ++j) {
        samples(0, j) = 2.0 * rng.normal();   // std 2
        samples(1, j) = 0.5 * rng.normal();   // std 0.5
    }
    const KdeModel kde = fit_kde(samples);
    const double factor = std::pow(static_cast<double>(k), -1.0 / (2 + 4));
    Eigen::VectorXd std_dev(2);
    for (int d = 0; d < 2; ++d) {
        const double mean = samples.row(d).mean();
        std_dev[d] = std::sqrt((samples.row(d).array() - mean).square().sum() / k);
    }
    CHECK(kde.bandwidth[0] == doctest::Approx(factor * std_dev[0]).epsilon(1e-9));
    CHECK(kde.bandwidth[1] == doctest::Approx(factor * std_dev[1]).epsilon(1e-9));
    CHECK(kde.bandwidth[0] > 2.5 * kde.bandwidth[1]);
}

TEST_CASE("kde samples reproduce the source mean") {
    Rng rng(66);
    const int k = 200;
    Eigen::MatrixXd samples(1, k);
    for (int j = 0; j < k; ++j) samples(0, j) = 3.0 + rng.normal();
    const KdeModel kde = fit_kde(samples);
    Rng sampler(67);
    double sum = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) sum += sample_kde(kde, sampler)[0];
    CHECK(std::abs(sum / n - samples.row(0).mean()) < 0.1);
}

TEST_CASE("generate_body is deterministic per seed and decodes cleanly") {
    SkinnedBody::Config cfg;
    cfg.rings = 4;
    cfg.segments = 6;
    const SkinnedBody body = SkinnedBody::build(cfg);
    const MogenModel model = small_model(SkinnedBody::kPoseDim, 64, 17);

    Rng rng(68);
    Eigen::MatrixXd lifted(64, 20), shapes(SkinnedBody::kShapeDim, 20);
    for (int j = 0; j < 20; ++j) {
        Eigen::VectorXd pose(SkinnedBody::kPoseDim);
        for (int i = 0; i < pose.size(); ++i) pose[i] = 0.3 * rng.normal();
        lifted.col(j) = model.lift(pose);
        shapes.col(j) = sample_shape(rng, SkinnedBody::kShapeDim);
    }
    const KdeModel kde_pose = fit_kde(lifted);
    const KdeModel kde_shape = fit_kde(shapes);

    const TriMesh a = generate_body(kde_pose, kde_shape, model, body, 42);
    const TriMesh b = generate_body(kde_pose, kde_shape, model, body, 42);
    const TriMesh c = generate_body(kde_pose, kde_shape, model, body, 43);
    validate(a);
    REQUIRE(a.vertex_count() == body.vertex_count());
    for (int v = 0; v < a.vertex_count(); ++v) CHECK(a.vertices[v] == b.vertices[v]);
    double moved = 0.0;
    for (int v = 0; v < a.vertex_count(); ++v) moved = std::max(moved, (a.vertices[v] - c.vertices[v]).norm());
    CHECK(moved > 0.0);
}

TEST_CASE("decode_frame splices the identity block onto each frame") {
    SkinnedBody::Config cfg;
    cfg.rings = 4;
    cfg.segments = 6;
    const SkinnedBody body = SkinnedBody::build(cfg);

    BodyMotion motion;
    motion.identity = Eigen::VectorXd::Constant(SkinnedBody::kShapeDim, 1.1);
    MotionSpec spec;
    spec.frames = 4;
    spec.seed = 2;
    motion.poses = generate_motion(spec, SkinnedBody::kPoseDim);

    const TriMesh frame = decode_frame(body, motion, 2);
    Eigen::VectorXd expected_code(body.latent_dim());
    expected_code << motion.poses.codes[2], motion.identity;
    const TriMesh direct = body.decode(expected_code);
    for (int v = 0; v < frame.vertex_count(); ++v) CHECK(frame.vertices[v] == direct.vertices[v]);
    CHECK_THROWS_AS(decode_frame(body, motion, 9), std::runtime_error);
}
