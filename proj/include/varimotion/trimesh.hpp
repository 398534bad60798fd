#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

namespace vmo {

// Triangle mesh: the universal geometric currency of the library.
// Faces index into vertices; degenerate (zero-area) triangles are allowed
// and get masked out by compute_face_geometry.
struct TriMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;

    bool empty() const { return vertices.empty() || faces.empty(); }
    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

// Per-face barycenters and area-weighted normals (|normal| == face area).
// valid[f] is false for faces below the degeneracy threshold; downstream
// kernels must skip those.
struct FaceGeometry {
    std::vector<Eigen::Vector3d> centers;
    std::vector<Eigen::Vector3d> normals;
    std::vector<std::uint8_t> valid;
    int valid_count = 0;
};

struct CorruptionSpec {
    int hole_count = 0;
    double hole_radius_frac = 0.0;
    double jitter_sigma_frac = 0.0;
    double drop_face_frac = 0.0;

    bool is_identity() const {
        return hole_count == 0 && jitter_sigma_frac == 0.0 && drop_face_frac == 0.0;
    }
};

// Throws std::runtime_error if face indices are out of range or any
// coordinate is non-finite.
void validate(const TriMesh& mesh);

double bbox_diagonal(const TriMesh& mesh);

// Centers = vertex mean, normals = 0.5 * cross(v1-v0, v2-v0). Faces with
// area below 1e-12 * diag^2 are flagged invalid and get a zero normal.
// Throws on an empty face list.
FaceGeometry compute_face_geometry(const TriMesh& mesh);

double total_area(const TriMesh& mesh);

// 1-to-4 split via edge midpoints; shared edges share midpoint vertices.
TriMesh midpoint_subdivide(const TriMesh& mesh);

// Deterministic corruption for invariance experiments: random face drop,
// hole punching around random surface points, Gaussian vertex jitter.
// Unreferenced vertices are compacted away whenever faces were removed.
// Throws if nothing valid survives.
TriMesh corrupt(const TriMesh& mesh, const CorruptionSpec& spec, std::uint64_t seed);

// Translates the mesh so the area-weighted centroid of face centers is at
// the origin. Falls back to the plain vertex mean if every face is degenerate.
TriMesh center(const TriMesh& mesh);

TriMesh translated(const TriMesh& mesh, const Eigen::Vector3d& offset);
TriMesh rotated(const TriMesh& mesh, const Eigen::Matrix3d& rotation);

} // namespace vmo
