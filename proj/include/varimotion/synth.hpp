#pragma once

#include "varimotion/latent.hpp"
#include "varimotion/pose_sequence.hpp"
#include "varimotion/trimesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vmo {

class Rng;

enum class MotionKind { kSwing, kWave, kSquat };

MotionKind motion_kind_from_name(const std::string& name);
std::string motion_kind_name(MotionKind kind);

struct MotionSpec {
    MotionKind kind = MotionKind::kSwing;
    int frames = 30;
    std::uint64_t seed = 0;
    double fps = 30.0;
    double amplitude_scale = 1.0;
};

// Damped-sinusoid pose trajectories. Per style, joint angles follow
// a * exp(-decay * i) * A_j * sin(c_j + h_j * (phi0 + dphi * i)) so the pair
// (log-amplitude, phase) moves along a straight line in frame index; the
// trajectory itself is genuinely curved in pose space.
PoseSequence generate_motion(const MotionSpec& spec, int pose_dim);

// Shape multipliers ~ N(1, 0.12) clamped to [0.7, 1.3].
Eigen::VectorXd sample_shape(Rng& rng, int shape_dim);
LatentCode sample_body(std::uint64_t seed, int pose_dim, int shape_dim);

struct DatasetItem {
    TriMesh raw;
    TriMesh registered;
    LatentCode code;
    int sequence = 0;
    int frame = 0;
};

struct Dataset {
    std::vector<DatasetItem> items;
    std::vector<int> train_indices;
    std::vector<int> test_indices;
};

struct DatasetConfig {
    int count = 100;
    int frames_per_sequence = 5;
    CorruptionSpec corruption;
    // Fraction of raw meshes additionally passed through midpoint subdivision
    // (connectivity change on top of corruption). Ignored when corruption is
    // the identity.
    double subdivide_fraction = 0.3;
};

// Decodes `count` frames grouped into sequences of `frames_per_sequence`,
// cycling motion styles per sequence, one identity per sequence. Split 80/20
// by sequence, deterministically.
Dataset make_dataset(const Decoder& body, const DatasetConfig& config, std::uint64_t seed);

} // namespace vmo
