#include "varimotion/synth.hpp"

#include "varimotion/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace vmo {

namespace {

// One sinusoidal term acting on a single pose coordinate.
struct MotionTerm {
    int joint;
    int axis;
    double amplitude; // radians
    double phase;     // offset c_j
    double harmonic;  // h_j
};

// Joint ids mirror SkinnedBody's layout; terms landing past pose_dim are
// dropped so smaller pose spaces still produce usable (if simpler) motions.
std::vector<MotionTerm> style_terms(MotionKind kind) {
    switch (kind) {
    case MotionKind::kSwing:
        return {
            {4, 0, 0.55, 0.0, 1.0},   // shoulder L
            {7, 0, -0.55, 0.0, 1.0},  // shoulder R, anti-phase
            {5, 0, 0.30, 0.4, 1.0},   // elbow L
            {8, 0, -0.30, 0.4, 1.0},  // elbow R
            {10, 0, -0.40, 0.1, 1.0}, // hip L
            {13, 0, 0.40, 0.1, 1.0},  // hip R
            {11, 0, 0.25, 0.6, 1.0},  // knee L
            {14, 0, -0.25, 0.6, 1.0}, // knee R
            {1, 1, 0.12, 0.2, 1.0},   // spine twist
        };
    case MotionKind::kWave:
        return {
            {7, 2, 0.45, 0.0, 1.0},  // shoulder R
            {8, 2, 0.50, 0.7, 1.0},  // elbow R
            {9, 2, 0.40, 1.4, 1.0},  // wrist R
            {7, 0, 0.15, 0.3, 1.0},
            {3, 2, 0.10, 0.5, 1.0},  // neck
            {2, 2, 0.08, 0.9, 1.0},  // chest
        };
    case MotionKind::kSquat:
        return {
            {10, 0, 0.55, 0.0, 1.0},  // hips flex
            {13, 0, 0.55, 0.0, 1.0},
            {11, 0, -0.75, 0.0, 1.0}, // knees bend
            {14, 0, -0.75, 0.0, 1.0},
            {12, 0, 0.30, 0.0, 1.0},  // ankles
            {15, 0, 0.30, 0.0, 1.0},
            {1, 0, 0.20, 0.3, 2.0},   // torso counterbalance, 2nd harmonic
            {2, 0, 0.12, 0.3, 2.0},
            {4, 0, 0.25, 0.5, 1.0},   // arms raise
            {7, 0, -0.25, 0.5, 1.0},
        };
    }
    throw std::runtime_error("unknown motion kind");
}

} // namespace

MotionKind motion_kind_from_name(const std::string& name) {
    if (name == "swing") return MotionKind::kSwing;
    if (name == "wave") return MotionKind::kWave;
    if (name == "squat") return MotionKind::kSquat;
    throw std::runtime_error("unknown motion kind '" + name + "'");
}

std::string motion_kind_name(MotionKind kind) {
    switch (kind) {
    case MotionKind::kSwing: return "swing";
    case MotionKind::kWave: return "wave";
    case MotionKind::kSquat: return "squat";
    }
    throw std::runtime_error("unknown motion kind");
}

PoseSequence generate_motion(const MotionSpec& spec, int pose_dim) {
    if (spec.frames < 3) throw std::runtime_error("generate_motion needs at least 3 frames");
    if (pose_dim <= 0) throw std::runtime_error("generate_motion needs a positive pose dimension");

    Rng rng(spec.seed);
    // Phase advances linearly; starting in [-1.15, -0.95] with these steps
    // keeps a 10-frame sequence inside one monotone branch of the sine.
    const double phi0 = rng.substream("phase0").uniform(-1.15, -0.95);
    const double dphi = rng.substream("dphi").uniform(0.18, 0.23);
    const double gain = rng.substream("amp").uniform(0.85, 1.15);
    const double decay = rng.substream("decay").uniform(0.005, 0.02);

    const std::vector<MotionTerm> terms = style_terms(spec.kind);
    PoseSequence seq;
    seq.frame_rate = spec.fps;
    seq.codes.reserve(static_cast<size_t>(spec.frames));
    for (int i = 0; i < spec.frames; ++i) {
        const double phi = phi0 + dphi * i;
        const double envelope = spec.amplitude_scale * gain * std::exp(-decay * i);
        Eigen::VectorXd pose = Eigen::VectorXd::Zero(pose_dim);
        for (const MotionTerm& term : terms) {
            const int index = 3 * term.joint + term.axis;
            if (index >= pose_dim) continue;
            pose[index] += envelope * term.amplitude * std::sin(term.phase + term.harmonic * phi);
        }
        seq.codes.push_back(std::move(pose));
    }
    return seq;
}

Eigen::VectorXd sample_shape(Rng& rng, int shape_dim) {
    Eigen::VectorXd shape(shape_dim);
    for (int k = 0; k < shape_dim; ++k) {
        shape[k] = std::clamp(rng.normal(1.0, 0.12), 0.7, 1.3);
    }
    return shape;
}

LatentCode sample_body(std::uint64_t seed, int pose_dim, int shape_dim) {
    Rng rng(seed);
    Rng pose_rng = rng.substream("pose");
    Eigen::VectorXd pose(pose_dim);
    for (int k = 0; k < pose_dim; ++k) {
        pose[k] = std::clamp(pose_rng.normal(0.0, 0.25), -0.9, 0.9);
    }
    Rng shape_rng = rng.substream("shape");
    return LatentCode(std::move(pose), sample_shape(shape_rng, shape_dim));
}

Dataset make_dataset(const Decoder& body, const DatasetConfig& config, std::uint64_t seed) {
    if (config.count <= 0) throw std::runtime_error("dataset count must be positive");
    if (config.frames_per_sequence < 3) {
        throw std::runtime_error("dataset needs at least 3 frames per sequence");
    }
    const int pose_dim = body.pose_dim();
    const int shape_dim = body.latent_dim() - pose_dim;
    if (pose_dim <= 0 || shape_dim <= 0) {
        throw std::runtime_error("dataset generation needs a pose/shape split decoder");
    }

    Rng rng(seed);
    const int per_seq = config.frames_per_sequence;
    const int sequence_count = (config.count + per_seq - 1) / per_seq;

    Dataset dataset;
    dataset.items.reserve(static_cast<size_t>(config.count));
    for (int s = 0; s < sequence_count; ++s) {
        MotionSpec spec;
        spec.kind = static_cast<MotionKind>(s % 3);
        spec.frames = per_seq;
        spec.seed = rng.substream("motion-" + std::to_string(s)).next_u64();
        const PoseSequence motion = generate_motion(spec, pose_dim);
        Rng shape_rng = rng.substream("shape-" + std::to_string(s));
        const Eigen::VectorXd shape = sample_shape(shape_rng, shape_dim);

        for (int f = 0; f < per_seq; ++f) {
            const int index = s * per_seq + f;
            if (index >= config.count) break;
            DatasetItem item;
            item.sequence = s;
            item.frame = f;
            item.code = LatentCode(motion.codes[f], shape);
            item.registered = body.decode(item.code.concat());
            if (config.corruption.is_identity()) {
                item.raw = item.registered;
            } else {
                Rng raw_rng = rng.substream("raw-" + std::to_string(index));
                const bool subdivide = raw_rng.uniform() < config.subdivide_fraction;
                const TriMesh base =
                    subdivide ? midpoint_subdivide(item.registered) : item.registered;
                item.raw = corrupt(base, config.corruption, raw_rng.next_u64());
            }
            dataset.items.push_back(std::move(item));
        }
    }

    // 80/20 by sequence: the first 4 of every 5 sequences train. Tiny
    // datasets still get at least one training sequence.
    const int train_sequences = std::max(1, (sequence_count * 4) / 5);
    for (int i = 0; i < static_cast<int>(dataset.items.size()); ++i) {
        if (dataset.items[static_cast<size_t>(i)].sequence < train_sequences) {
            dataset.train_indices.push_back(i);
        } else {
            dataset.test_indices.push_back(i);
        }
    }
    return dataset;
}

} // namespace vmo
