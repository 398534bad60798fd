#include "varimotion/synth.hpp"

#include "test_util.hpp"
#include "varimotion/rng.hpp"
#include "varimotion/skinned_body.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace vmo;

namespace {

SkinnedBody small_body() {
    SkinnedBody::Config cfg;
    cfg.rings = 4;
    cfg.segments = 6;
    return SkinnedBody::build(cfg);
}

double max_frame_step(const PoseSequence& seq) {
    double step = 0.0;
    for (size_t i = 1; i < seq.codes.size(); ++i) {
        step = std::max(step, (seq.codes[i] - seq.codes[i - 1]).norm());
    }
    return step;
}

} // namespace

TEST_CASE("motion kind names round trip and reject garbage") {
    for (MotionKind kind : {MotionKind::kSwing, MotionKind::kWave, MotionKind::kSquat}) {
        CHECK(motion_kind_from_name(motion_kind_name(kind)) == kind);
    }
    CHECK_THROWS_AS(motion_kind_from_name("moonwalk"), std::runtime_error);
}

TEST_CASE("generate_motion is a pure function of its spec") {
    MotionSpec spec;
    spec.kind = MotionKind::kWave;
    spec.frames = 12;
    spec.seed = 99;
    const PoseSequence a = generate_motion(spec, SkinnedBody::kPoseDim);
    const PoseSequence b = generate_motion(spec, SkinnedBody::kPoseDim);
    REQUIRE(a.codes.size() == 12);
    for (size_t i = 0; i < a.codes.size(); ++i) CHECK(a.codes[i] == b.codes[i]);
    spec.seed = 100;
    const PoseSequence c = generate_motion(spec, SkinnedBody::kPoseDim);
    CHECK(a.codes[3] != c.codes[3]);
}

TEST_CASE("zero amplitude yields a constant zero pose") {
    MotionSpec spec;
    spec.amplitude_scale = 0.0;
    spec.frames = 6;
    const PoseSequence seq = generate_motion(spec, SkinnedBody::kPoseDim);
    for (const auto& code : seq.codes) CHECK(code.norm() == 0.0);
}

TEST_CASE("swing trajectories are genuinely curved in pose space") {
    MotionSpec spec;
    spec.kind = MotionKind::kSwing;
    spec.frames = 30;
    spec.seed = 7;
    const PoseSequence seq = generate_motion(spec, SkinnedBody::kPoseDim);
    // Deviation of the midpoint frame from the endpoint chord, in radians.
    const Eigen::VectorXd& a = seq.codes.front();
    const Eigen::VectorXd& b = seq.codes.back();
    double max_dev = 0.0;
    for (int i = 1; i + 1 < spec.frames; ++i) {
        const double t = static_cast<double>(i) / (spec.frames - 1);
        max_dev = std::max(max_dev, (seq.codes[static_cast<size_t>(i)] - ((1 - t) * a + t * b)).norm());
    }
    CHECK(max_dev > 0.1);
}

TEST_CASE("motions are smooth: per-frame steps stay bounded") {
    for (MotionKind kind : {MotionKind::kSwing, MotionKind::kWave, MotionKind::kSquat}) {
        MotionSpec spec;
        spec.kind = kind;
        spec.frames = 30;
        spec.seed = 11;
        const PoseSequence seq = generate_motion(spec, SkinnedBody::kPoseDim);
        CHECK(max_frame_step(seq) < 0.35);
        for (const auto& code : seq.codes) CHECK(code.lpNorm<Eigen::Infinity>() < 1.6);
    }
}

TEST_CASE("each style animates a distinct joint set") {
    auto active_joints = [](MotionKind kind) {
        MotionSpec spec;
        spec.kind = kind;
        spec.frames = 10;
        spec.seed = 3;
        const PoseSequence seq = generate_motion(spec, SkinnedBody::kPoseDim);
        std::set<int> joints;
        for (const auto& code : seq.codes) {
            for (int i = 0; i < code.size(); ++i) {
                if (std::abs(code[i]) > 1e-6) joints.insert(i / 3);
            }
        }
        return joints;
    };
    const auto swing = active_joints(MotionKind::kSwing);
    const auto wave = active_joints(MotionKind::kWave);
    const auto squat = active_joints(MotionKind::kSquat);
    CHECK(swing != wave);
    CHECK(wave != squat);
    CHECK(swing.count(kShoulderL) == 1);
    CHECK(wave.count(kShoulderR) == 1);
    CHECK(wave.count(kShoulderL) == 0);
    CHECK(squat.count(kKneeL) == 1);
}

TEST_CASE("sample_shape stays in its clamp range around 1") {
    Rng rng(40);
    double sum = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd s = sample_shape(rng, SkinnedBody::kShapeDim);
        REQUIRE(s.size() == SkinnedBody::kShapeDim);
        CHECK(s.minCoeff() >= 0.7);
        CHECK(s.maxCoeff() <= 1.3);
        sum += s.mean();
    }
    CHECK(std::abs(sum / n - 1.0) < 0.02);
}

TEST_CASE("sample_body is deterministic per seed and pose is bounded") {
    const LatentCode a = sample_body(5, SkinnedBody::kPoseDim, SkinnedBody::kShapeDim);
    const LatentCode b = sample_body(5, SkinnedBody::kPoseDim, SkinnedBody::kShapeDim);
    CHECK(a.pose == b.pose);
    CHECK(a.shape == b.shape);
    CHECK(a.pose.lpNorm<Eigen::Infinity>() <= 0.9);
}

TEST_CASE("make_dataset shapes, split, and identity-per-sequence invariants") {
    const SkinnedBody body = small_body();
    DatasetConfig cfg;
    cfg.count = 100;
    cfg.frames_per_sequence = 5;
    const Dataset ds = make_dataset(body, cfg, 17);

    REQUIRE(ds.items.size() == 100);
    CHECK(ds.train_indices.size() == 80);
    CHECK(ds.test_indices.size() == 20);

    // The split partitions the items and never splits a sequence.
    std::set<int> seen;
    std::set<int> train_seqs, test_seqs;
    for (int i : ds.train_indices) {
        seen.insert(i);
        train_seqs.insert(ds.items[static_cast<size_t>(i)].sequence);
    }
    for (int i : ds.test_indices) {
        seen.insert(i);
        test_seqs.insert(ds.items[static_cast<size_t>(i)].sequence);
    }
    CHECK(seen.size() == 100);
    for (int s : test_seqs) CHECK(train_seqs.count(s) == 0);

    // Identity (shape) is constant within a sequence and varies across them.
    for (const auto& item : ds.items) {
        const auto& first = ds.items[static_cast<size_t>(item.sequence * cfg.frames_per_sequence)];
        CHECK(item.code.shape == first.code.shape);
    }
    std::set<double> shape_leads;
    for (int s = 0; s < 20; ++s) {
        shape_leads.insert(ds.items[static_cast<size_t>(s * cfg.frames_per_sequence)].code.shape[0]);
    }
    CHECK(shape_leads.size() > 1);
}

TEST_CASE("identity corruption keeps raw == registered bitwise") {
    const SkinnedBody body = small_body();
    DatasetConfig cfg;
    cfg.count = 10;
    cfg.frames_per_sequence = 5;
    cfg.corruption = CorruptionSpec{}; // identity
    const Dataset ds = make_dataset(body, cfg, 23);
    for (const auto& item : ds.items) {
        REQUIRE(item.raw.vertex_count() == item.registered.vertex_count());
        for (int v = 0; v < item.raw.vertex_count(); ++v) {
            CHECK(item.raw.vertices[v] == item.registered.vertices[v]);
        }
        CHECK(item.raw.faces == item.registered.faces);
    }
}

TEST_CASE("corrupted raw meshes stay valid and near the registered surface") {
    const SkinnedBody body = small_body();
    DatasetConfig cfg;
    cfg.count = 15;
    cfg.frames_per_sequence = 5;
    cfg.corruption.hole_count = 1;
    cfg.corruption.hole_radius_frac = 0.03;
    cfg.corruption.jitter_sigma_frac = 0.002;
    cfg.corruption.drop_face_frac = 0.005;
    cfg.subdivide_fraction = 0.3;
    const Dataset ds = make_dataset(body, cfg, 29);

    int topology_changed = 0;
    for (const auto& item : ds.items) {
        validate(item.raw);
        CHECK(item.raw.face_count() > 0);
        if (item.raw.vertex_count() != item.registered.vertex_count()) ++topology_changed;
        // Registered frames decode from the stored code.
        const TriMesh decoded = body.decode(item.code.concat());
        for (int v = 0; v < decoded.vertex_count(); ++v) {
            CHECK(decoded.vertices[v] == item.registered.vertices[v]);
        }
        // Raw stays within a fraction of the bounding box of the clean mesh.
        const double diag = bbox_diagonal(item.registered);
        double worst = 0.0;
        for (const auto& p : item.raw.vertices) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : item.registered.vertices) {
                best = std::min(best, (p - q).norm());
            }
            worst = std::max(worst, best);
        }
        CHECK(worst < 0.5 * diag);
    }
    CHECK(topology_changed > 0);
}

TEST_CASE("make_dataset is deterministic per seed") {
    const SkinnedBody body = small_body();
    DatasetConfig cfg;
    cfg.count = 10;
    cfg.frames_per_sequence = 5;
    cfg.corruption.jitter_sigma_frac = 0.002;
    const Dataset a = make_dataset(body, cfg, 31);
    const Dataset b = make_dataset(body, cfg, 31);
    REQUIRE(a.items.size() == b.items.size());
    for (size_t i = 0; i < a.items.size(); ++i) {
        CHECK(a.items[i].code.concat() == b.items[i].code.concat());
        REQUIRE(a.items[i].raw.vertex_count() == b.items[i].raw.vertex_count());
        for (int v = 0; v < a.items[i].raw.vertex_count(); ++v) {
            CHECK(a.items[i].raw.vertices[v] == b.items[i].raw.vertices[v]);
        }
    }
    const Dataset c = make_dataset(body, cfg, 32);
    CHECK(a.items[0].code.concat() != c.items[0].code.concat());
}
