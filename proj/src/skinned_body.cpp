#include "varimotion/skinned_body.hpp"

#include "varimotion/binio.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace vmo {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

// Bone endpoint (child joint or a fixed tip) and capsule radius per joint.
struct BoneSpec {
    Eigen::Vector3d tip;     // offset from the joint, unit shape
    double radius;
    bool tip_is_child;       // tip equals the child joint's rest offset
    int child = -1;
};

// Sensitivity rows: how much each shape coordinate scales a joint's bone
// length / girth. Columns are the 10 shape multipliers:
//   0 overall height, 1 overall girth, 2 torso length, 3 arm length,
//   4 leg length, 5 head/neck size, 6 torso girth, 7 limb girth,
//   8 shoulder width, 9 hip width.
struct ShapeSensitivity {
    double length[SkinnedBody::kShapeDim] = {};
    double girth[SkinnedBody::kShapeDim] = {};
};

struct BodyPlan {
    std::vector<int> parents;
    std::vector<Eigen::Vector3d> offsets; // from parent, unit shape
    std::vector<BoneSpec> bones;
    std::vector<ShapeSensitivity> sensitivity;
};

BodyPlan make_plan() {
    BodyPlan plan;
    plan.parents = {-1, kPelvis, kSpine, kChest, kChest, kShoulderL, kElbowL,
                    kChest, kShoulderR, kElbowR, kPelvis, kHipL, kKneeL,
                    kPelvis, kHipR, kKneeR};
    plan.offsets.assign(kJointCount, Eigen::Vector3d::Zero());
    plan.offsets[kPelvis] = {0.0, 1.00, 0.0};
    plan.offsets[kSpine] = {0.0, 0.16, 0.0};
    plan.offsets[kChest] = {0.0, 0.22, 0.0};
    plan.offsets[kNeck] = {0.0, 0.20, 0.0};
    plan.offsets[kShoulderL] = {0.21, 0.14, 0.0};
    plan.offsets[kElbowL] = {0.28, 0.0, 0.0};
    plan.offsets[kWristL] = {0.26, 0.0, 0.0};
    plan.offsets[kShoulderR] = {-0.21, 0.14, 0.0};
    plan.offsets[kElbowR] = {-0.28, 0.0, 0.0};
    plan.offsets[kWristR] = {-0.26, 0.0, 0.0};
    plan.offsets[kHipL] = {0.11, -0.06, 0.0};
    plan.offsets[kKneeL] = {0.0, -0.44, 0.0};
    plan.offsets[kAnkleL] = {0.0, -0.42, 0.0};
    plan.offsets[kHipR] = {-0.11, -0.06, 0.0};
    plan.offsets[kKneeR] = {0.0, -0.44, 0.0};
    plan.offsets[kAnkleR] = {0.0, -0.42, 0.0};

    plan.bones.assign(kJointCount, {});
    auto child_bone = [&](int joint, int child, double radius) {
        plan.bones[joint] = {plan.offsets[child], radius, true, child};
    };
    auto tip_bone = [&](int joint, const Eigen::Vector3d& tip, double radius) {
        plan.bones[joint] = {tip, radius, false, -1};
    };
    child_bone(kPelvis, kSpine, 0.15);
    child_bone(kSpine, kChest, 0.15);
    child_bone(kChest, kNeck, 0.14);
    tip_bone(kNeck, {0.0, 0.24, 0.0}, 0.10);
    child_bone(kShoulderL, kElbowL, 0.055);
    child_bone(kElbowL, kWristL, 0.045);
    tip_bone(kWristL, {0.16, 0.0, 0.0}, 0.04);
    child_bone(kShoulderR, kElbowR, 0.055);
    child_bone(kElbowR, kWristR, 0.045);
    tip_bone(kWristR, {-0.16, 0.0, 0.0}, 0.04);
    child_bone(kHipL, kKneeL, 0.075);
    child_bone(kKneeL, kAnkleL, 0.06);
    tip_bone(kAnkleL, {0.0, -0.07, 0.14}, 0.05);
    child_bone(kHipR, kKneeR, 0.075);
    child_bone(kKneeR, kAnkleR, 0.06);
    tip_bone(kAnkleR, {0.0, -0.07, 0.14}, 0.05);

    plan.sensitivity.assign(kJointCount, {});
    auto add_length = [&](int joint, int dim, double w) { plan.sensitivity[joint].length[dim] += w; };
    auto add_girth = [&](int joint, int dim, double w) { plan.sensitivity[joint].girth[dim] += w; };
    const int torso[] = {kPelvis, kSpine, kChest};
    const int arms[] = {kShoulderL, kElbowL, kWristL, kShoulderR, kElbowR, kWristR};
    const int legs[] = {kHipL, kKneeL, kAnkleL, kHipR, kKneeR, kAnkleR};
    for (int j = 0; j < kJointCount; ++j) {
        add_length(j, 0, 0.5); // overall height
        add_girth(j, 1, 0.5);  // overall girth
    }
    for (int j : torso) {
        add_length(j, 2, 0.5);
        add_girth(j, 6, 0.5);
    }
    add_length(kNeck, 5, 0.6);
    add_girth(kNeck, 5, 0.4);
    for (int j : arms) {
        add_length(j, 3, 0.5);
        add_girth(j, 7, 0.4);
    }
    for (int j : legs) {
        add_length(j, 4, 0.5);
        add_girth(j, 7, 0.4);
    }
    add_length(kShoulderL, 8, 0.5);
    add_length(kShoulderR, 8, 0.5);
    add_length(kHipL, 9, 0.5);
    add_length(kHipR, 9, 0.5);
    return plan;
}

// Length/girth multipliers for a shape vector; affine in (shape - 1).
double length_multiplier(const ShapeSensitivity& s, const Eigen::VectorXd& shape) {
    double m = 1.0;
    for (int k = 0; k < SkinnedBody::kShapeDim; ++k) m += s.length[k] * (shape[k] - 1.0);
    return m;
}

double girth_multiplier(const ShapeSensitivity& s, const Eigen::VectorXd& shape) {
    double m = 1.0;
    for (int k = 0; k < SkinnedBody::kShapeDim; ++k) m += s.girth[k] * (shape[k] - 1.0);
    return m;
}

// Orthonormal frame perpendicular to `axis`.
void perpendicular_frame(const Eigen::Vector3d& axis, Eigen::Vector3d& u, Eigen::Vector3d& w) {
    const Eigen::Vector3d n = axis.normalized();
    const Eigen::Vector3d seed =
        std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    u = n.cross(seed).normalized();
    w = n.cross(u);
}

// All rest geometry evaluated at an arbitrary shape vector. The construction
// is affine in the shape multipliers, which lets the caller extract exact
// blendshape columns by finite differencing once per coordinate.
struct RestGeometry {
    std::vector<Eigen::Vector3d> joint_offsets;
    std::vector<Eigen::Vector3d> vertices;
};

RestGeometry evaluate_rest(const BodyPlan& plan, const SkinnedBody::Config& config,
                           const Eigen::VectorXd& shape,
                           std::vector<SkinnedBody::Influence>* influences,
                           std::vector<std::array<int, 3>>* faces) {
    RestGeometry rest;
    rest.joint_offsets.resize(kJointCount);
    std::vector<Eigen::Vector3d> joint_pos(kJointCount);
    for (int j = 0; j < kJointCount; ++j) {
        const int parent = plan.parents[j];
        const double scale = parent < 0 ? 1.0 : length_multiplier(plan.sensitivity[parent], shape);
        rest.joint_offsets[j] = plan.offsets[j] * scale;
        joint_pos[j] = (parent < 0 ? Eigen::Vector3d::Zero() : joint_pos[parent]) +
                       rest.joint_offsets[j];
    }

    const int rings = config.rings;
    const int segments = config.segments;
    for (int j = 0; j < kJointCount; ++j) {
        const BoneSpec& bone = plan.bones[j];
        const double len_scale = length_multiplier(plan.sensitivity[j], shape);
        const double girth_scale = girth_multiplier(plan.sensitivity[j], shape);
        const Eigen::Vector3d tip = bone.tip * len_scale;
        Eigen::Vector3d u, w;
        perpendicular_frame(bone.tip, u, w); // frame from the unit-shape axis: shape-invariant
        const double radius = bone.radius * girth_scale;

        const int base = static_cast<int>(rest.vertices.size());
        // Bottom pole, `rings` circles, top pole.
        rest.vertices.push_back(joint_pos[j]);
        for (int r = 0; r < rings; ++r) {
            const double t = (r + 0.5) / rings;
            const double profile = std::sqrt(std::max(0.0, 1.0 - 0.8 * (2.0 * t - 1.0) * (2.0 * t - 1.0)));
            for (int s = 0; s < segments; ++s) {
                const double theta = 2.0 * M_PI * s / segments;
                rest.vertices.push_back(joint_pos[j] + t * tip +
                                        profile * radius * (std::cos(theta) * u + std::sin(theta) * w));
            }
        }
        rest.vertices.push_back(joint_pos[j] + tip);

        if (influences) {
            auto blend = [&](double t) {
                SkinnedBody::Influence inf;
                const int parent = plan.parents[j];
                if (parent >= 0 && t < 0.3) {
                    const double wp = 0.5 * (1.0 - t / 0.3);
                    inf.joint[0] = j;
                    inf.weight[0] = 1.0 - wp;
                    inf.joint[1] = parent;
                    inf.weight[1] = wp;
                } else {
                    inf.joint[0] = j;
                    inf.weight[0] = 1.0;
                }
                return inf;
            };
            influences->push_back(blend(0.0));
            for (int r = 0; r < rings; ++r) {
                const double t = (r + 0.5) / rings;
                for (int s = 0; s < segments; ++s) influences->push_back(blend(t));
            }
            influences->push_back(blend(1.0));
        }
        if (faces) {
            const int bottom = base;
            const int top = base + 1 + rings * segments;
            auto ring_vertex = [&](int r, int s) { return base + 1 + r * segments + (s % segments); };
            for (int s = 0; s < segments; ++s) {
                faces->push_back({bottom, ring_vertex(0, s + 1), ring_vertex(0, s)});
                faces->push_back({top, ring_vertex(rings - 1, s), ring_vertex(rings - 1, s + 1)});
            }
            for (int r = 0; r + 1 < rings; ++r) {
                for (int s = 0; s < segments; ++s) {
                    const int a = ring_vertex(r, s);
                    const int b = ring_vertex(r, s + 1);
                    const int c = ring_vertex(r + 1, s);
                    const int d = ring_vertex(r + 1, s + 1);
                    faces->push_back({a, b, d});
                    faces->push_back({a, d, c});
                }
            }
        }
    }
    return rest;
}

} // namespace

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& axis_angle) {
    const double theta2 = axis_angle.squaredNorm();
    const Eigen::Matrix3d k = skew(axis_angle);
    if (theta2 < 1e-16) {
        return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
    }
    const double theta = std::sqrt(theta2);
    return Eigen::Matrix3d::Identity() + (std::sin(theta) / theta) * k +
           ((1.0 - std::cos(theta)) / theta2) * k * k;
}

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& axis_angle) {
    const double theta2 = axis_angle.squaredNorm();
    const Eigen::Matrix3d k = skew(axis_angle);
    if (theta2 < 1e-16) {
        return Eigen::Matrix3d::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
    }
    const double theta = std::sqrt(theta2);
    return Eigen::Matrix3d::Identity() + ((1.0 - std::cos(theta)) / theta2) * k +
           ((theta - std::sin(theta)) / (theta2 * theta)) * k * k;
}

struct SkinnedBody::KinematicState {
    Eigen::VectorXd shape_delta;             // shape - 1
    std::vector<Eigen::Vector3d> offsets;    // shaped offsets from parent
    std::vector<Eigen::Vector3d> rest_joint; // shaped rest joint positions
    std::vector<Eigen::Matrix3d> local_rot;
    std::vector<Eigen::Matrix3d> world_rot;
    std::vector<Eigen::Vector3d> world_pos;
    Eigen::VectorXd shaped_vertices; // 3V
    std::vector<Eigen::Vector3d> pose_axis; // local axis-angle per joint
};

void SkinnedBody::evaluate_kinematics(const Eigen::VectorXd& code, KinematicState& state) const {
    if (code.size() != latent_dim()) throw std::runtime_error("skinned body latent dim mismatch");
    state.shape_delta = code.tail(kShapeDim).array() - 1.0;
    const Eigen::VectorXd offsets_flat =
        rest_offsets_ + offset_shape_basis_ * state.shape_delta;
    state.offsets.resize(kJointCount);
    state.rest_joint.resize(kJointCount);
    state.local_rot.resize(kJointCount);
    state.world_rot.resize(kJointCount);
    state.world_pos.resize(kJointCount);
    state.pose_axis.resize(kJointCount);
    for (int j = 0; j < kJointCount; ++j) {
        state.offsets[j] = offsets_flat.segment<3>(3 * j);
        state.pose_axis[j] = code.segment<3>(3 * j);
        state.local_rot[j] = rodrigues(state.pose_axis[j]);
        const int parent = parents_[j];
        if (parent < 0) {
            state.rest_joint[j] = state.offsets[j];
            state.world_rot[j] = state.local_rot[j];
            state.world_pos[j] = state.offsets[j];
        } else {
            state.rest_joint[j] = state.rest_joint[parent] + state.offsets[j];
            state.world_rot[j] = state.world_rot[parent] * state.local_rot[j];
            state.world_pos[j] = state.world_pos[parent] + state.world_rot[parent] * state.offsets[j];
        }
    }
    state.shaped_vertices = flatten_vertices(template_) + vertex_shape_basis_ * state.shape_delta;
}

TriMesh SkinnedBody::decode(const Eigen::VectorXd& code) const {
    KinematicState state;
    evaluate_kinematics(code, state);

    TriMesh out;
    out.faces = template_.faces;
    out.vertices.resize(template_.vertices.size());
    for (int v = 0; v < vertex_count(); ++v) {
        const Eigen::Vector3d x = state.shaped_vertices.segment<3>(3 * v);
        // x + sum_j w_j [ R_j (x - r_j) + t_j - x ]; exact identity at rest.
        Eigen::Vector3d p = x;
        const Influence& inf = influences_[v];
        for (int k = 0; k < 2; ++k) {
            const int j = inf.joint[k];
            if (j < 0) continue;
            p += inf.weight[k] * (state.world_rot[j] * (x - state.rest_joint[j]) +
                                  state.world_pos[j] - x);
        }
        out.vertices[v] = p;
    }
    return out;
}

std::vector<Eigen::Vector3d> SkinnedBody::decode_jvp(const Eigen::VectorXd& code,
                                                     const Eigen::VectorXd& tangent) const {
    KinematicState state;
    evaluate_kinematics(code, state);

    const Eigen::VectorXd shape_tangent = tangent.tail(kShapeDim);
    const Eigen::VectorXd d_offsets_flat = offset_shape_basis_ * shape_tangent;
    const Eigen::VectorXd d_vertices_flat = vertex_shape_basis_ * shape_tangent;

    std::vector<Eigen::Matrix3d> d_world_rot(kJointCount);
    std::vector<Eigen::Vector3d> d_world_pos(kJointCount);
    std::vector<Eigen::Vector3d> d_rest_joint(kJointCount);
    for (int j = 0; j < kJointCount; ++j) {
        const Eigen::Vector3d d_omega = tangent.segment<3>(3 * j);
        const Eigen::Matrix3d d_local =
            skew(so3_left_jacobian(state.pose_axis[j]) * d_omega) * state.local_rot[j];
        const Eigen::Vector3d d_offset = d_offsets_flat.segment<3>(3 * j);
        const int parent = parents_[j];
        if (parent < 0) {
            d_rest_joint[j] = d_offset;
            d_world_rot[j] = d_local;
            d_world_pos[j] = d_offset;
        } else {
            d_rest_joint[j] = d_rest_joint[parent] + d_offset;
            d_world_rot[j] = d_world_rot[parent] * state.local_rot[j] +
                             state.world_rot[parent] * d_local;
            d_world_pos[j] = d_world_pos[parent] + d_world_rot[parent] * state.offsets[j] +
                             state.world_rot[parent] * d_offset;
        }
    }

    std::vector<Eigen::Vector3d> out(template_.vertices.size());
    for (int v = 0; v < vertex_count(); ++v) {
        const Eigen::Vector3d x = state.shaped_vertices.segment<3>(3 * v);
        const Eigen::Vector3d dx = d_vertices_flat.segment<3>(3 * v);
        Eigen::Vector3d dp = dx;
        const Influence& inf = influences_[v];
        for (int k = 0; k < 2; ++k) {
            const int j = inf.joint[k];
            if (j < 0) continue;
            dp += inf.weight[k] *
                  (d_world_rot[j] * (x - state.rest_joint[j]) +
                   state.world_rot[j] * (dx - d_rest_joint[j]) + d_world_pos[j] - dx);
        }
        out[v] = dp;
    }
    return out;
}

Eigen::VectorXd SkinnedBody::vjp(const Eigen::VectorXd& code,
                                 const std::vector<Eigen::Vector3d>& cotangent) const {
    if (static_cast<int>(cotangent.size()) != vertex_count()) {
        throw std::runtime_error("skinned body cotangent size mismatch");
    }
    // J^T w assembled column by column from exact forward-mode derivatives;
    // the latent dimension is small so this stays cheap.
    Eigen::VectorXd grad(latent_dim());
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(latent_dim());
    for (int k = 0; k < latent_dim(); ++k) {
        basis[k] = 1.0;
        const std::vector<Eigen::Vector3d> column = decode_jvp(code, basis);
        basis[k] = 0.0;
        double dot = 0.0;
        for (size_t v = 0; v < column.size(); ++v) dot += column[v].dot(cotangent[v]);
        grad[k] = dot;
    }
    return grad;
}

SkinnedBody SkinnedBody::build() { return build(Config{}); }

SkinnedBody SkinnedBody::build(const Config& config) {
    if (config.rings < 2 || config.segments < 3) {
        throw std::runtime_error("skinned body tessellation too coarse");
    }
    const BodyPlan plan = make_plan();

    SkinnedBody body;
    body.parents_ = plan.parents;

    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(kShapeDim);
    std::vector<std::array<int, 3>> faces;
    const RestGeometry base = evaluate_rest(plan, config, unit, &body.influences_, &faces);

    body.template_.faces = std::move(faces);
    body.template_.vertices = base.vertices;
    body.rest_offsets_.resize(3 * kJointCount);
    for (int j = 0; j < kJointCount; ++j) body.rest_offsets_.segment<3>(3 * j) = base.joint_offsets[j];

    const Eigen::Index coords = 3 * static_cast<Eigen::Index>(base.vertices.size());
    body.vertex_shape_basis_.resize(coords, kShapeDim);
    body.offset_shape_basis_.resize(3 * kJointCount, kShapeDim);
    for (int k = 0; k < kShapeDim; ++k) {
        Eigen::VectorXd bumped = unit;
        bumped[k] += 1.0;
        const RestGeometry shifted = evaluate_rest(plan, config, bumped, nullptr, nullptr);
        // The construction is affine in shape, so one unit step recovers the
        // exact basis column.
        for (size_t v = 0; v < base.vertices.size(); ++v) {
            body.vertex_shape_basis_.block<3, 1>(3 * static_cast<Eigen::Index>(v), k) =
                shifted.vertices[v] - base.vertices[v];
        }
        for (int j = 0; j < kJointCount; ++j) {
            body.offset_shape_basis_.block<3, 1>(3 * j, k) =
                shifted.joint_offsets[j] - base.joint_offsets[j];
        }
    }
    return body;
}

void SkinnedBody::save_sections(BinaryWriter& writer) const {
    Eigen::VectorXd parents(kJointCount);
    for (int j = 0; j < kJointCount; ++j) parents[j] = parents_[j];
    writer.section("skinned/parents", parents);
    writer.section("skinned/rest_offsets", rest_offsets_);
    writer.section("skinned/offset_shape_basis", offset_shape_basis_);
    writer.section("skinned/template", flatten_vertices(template_));
    save_faces_section(writer, template_.faces);
    writer.section("skinned/vertex_shape_basis", vertex_shape_basis_);
    Eigen::MatrixXd inf(static_cast<Eigen::Index>(influences_.size()), 4);
    for (size_t v = 0; v < influences_.size(); ++v) {
        inf(static_cast<Eigen::Index>(v), 0) = influences_[v].joint[0];
        inf(static_cast<Eigen::Index>(v), 1) = influences_[v].weight[0];
        inf(static_cast<Eigen::Index>(v), 2) = influences_[v].joint[1];
        inf(static_cast<Eigen::Index>(v), 3) = influences_[v].weight[1];
    }
    writer.section("skinned/influences", inf);
}

SkinnedBody SkinnedBody::load_sections(BinaryReader& reader) {
    SkinnedBody body;
    const Eigen::VectorXd parents = reader.vector("skinned/parents");
    if (parents.size() != kJointCount) throw std::runtime_error("skinned container joint count mismatch");
    body.parents_.resize(kJointCount);
    for (int j = 0; j < kJointCount; ++j) body.parents_[j] = static_cast<int>(parents[j]);
    body.rest_offsets_ = reader.vector("skinned/rest_offsets");
    body.offset_shape_basis_ = reader.matrix("skinned/offset_shape_basis");
    const Eigen::VectorXd tpl = reader.vector("skinned/template");
    const auto faces = load_faces_section(reader);
    body.template_ = unflatten_vertices(tpl, faces);
    body.vertex_shape_basis_ = reader.matrix("skinned/vertex_shape_basis");
    const Eigen::MatrixXd inf = reader.matrix("skinned/influences");
    if (inf.rows() != body.template_.vertex_count() || inf.cols() != 4) {
        throw std::runtime_error("skinned container influence table mismatch");
    }
    body.influences_.resize(static_cast<size_t>(inf.rows()));
    for (Eigen::Index v = 0; v < inf.rows(); ++v) {
        auto& e = body.influences_[static_cast<size_t>(v)];
        e.joint[0] = static_cast<int>(inf(v, 0));
        e.weight[0] = inf(v, 1);
        e.joint[1] = static_cast<int>(inf(v, 2));
        e.weight[1] = inf(v, 3);
    }
    return body;
}

} // namespace vmo
