#pragma once

#include "varimotion/latent.hpp"

#include <cstdint>

namespace vmo {

// Joint layout of the procedural articulated body.
enum JointId : int {
    kPelvis = 0,
    kSpine,
    kChest,
    kNeck,
    kShoulderL,
    kElbowL,
    kWristL,
    kShoulderR,
    kElbowR,
    kWristR,
    kHipL,
    kKneeL,
    kAnkleL,
    kHipR,
    kKneeR,
    kAnkleR,
    kJointCount
};

// Articulated capsule body: axis-angle pose per joint, forward kinematics,
// linear blend skinning, and linear shape blendshapes (bone length and girth
// multipliers). Zero pose with unit shape reproduces the template exactly.
class SkinnedBody : public Decoder {
public:
    static constexpr int kPoseDim = 3 * kJointCount;
    static constexpr int kShapeDim = 10;

    struct Config {
        // Capsule tessellation; the default lands near 1.5k vertices / 3k faces.
        int rings = 9;
        int segments = 10;
    };

    static SkinnedBody build();
    static SkinnedBody build(const Config& config);

    int latent_dim() const override { return kPoseDim + kShapeDim; }
    int pose_dim() const override { return kPoseDim; }
    const std::vector<std::array<int, 3>>& faces() const override { return template_.faces; }
    int vertex_count() const override { return template_.vertex_count(); }

    TriMesh decode(const Eigen::VectorXd& code) const override;

    // Zero pose, unit shape multipliers: decodes to the template exactly.
    Eigen::VectorXd neutral_code() const override {
        Eigen::VectorXd code = Eigen::VectorXd::Zero(latent_dim());
        code.tail(kShapeDim).setOnes();
        return code;
    }
    Eigen::VectorXd vjp(const Eigen::VectorXd& code,
                        const std::vector<Eigen::Vector3d>& cotangent) const override;

    // Directional derivative of decode at `code` along `tangent`; exact
    // forward-mode differentiation of the kinematic chain.
    std::vector<Eigen::Vector3d> decode_jvp(const Eigen::VectorXd& code,
                                            const Eigen::VectorXd& tangent) const;

    const TriMesh& template_mesh() const { return template_; }
    const std::vector<int>& parents() const { return parents_; }

    // Per-vertex skinning weights, at most two influences, convex.
    struct Influence {
        int joint[2] = {-1, -1};
        double weight[2] = {0.0, 0.0};
    };
    const std::vector<Influence>& influences() const { return influences_; }

    void save_sections(BinaryWriter& writer) const;
    static SkinnedBody load_sections(BinaryReader& reader);

private:
    struct KinematicState; // FK transforms shared by decode / jvp / vjp

    void evaluate_kinematics(const Eigen::VectorXd& code, KinematicState& state) const;

    std::vector<int> parents_;
    Eigen::VectorXd rest_offsets_;      // 3J, offsets from parent at unit shape
    Eigen::MatrixXd offset_shape_basis_; // 3J x kShapeDim
    TriMesh template_;
    Eigen::MatrixXd vertex_shape_basis_; // 3V x kShapeDim
    std::vector<Influence> influences_;
};

// Rotation matrix exp([w]_x) with a small-angle Taylor branch.
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis_angle);

// Left Jacobian of SO(3): d exp([w + dw]_x) = [J_l(w) dw]_x exp([w]_x).
Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& axis_angle);

} // namespace vmo
