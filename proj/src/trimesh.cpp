#include "varimotion/trimesh.hpp"

#include "varimotion/rng.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace vmo {

void validate(const TriMesh& mesh) {
    const int nv = mesh.vertex_count();
    for (const auto& v : mesh.vertices) {
        if (!v.allFinite()) throw std::runtime_error("mesh vertex is not finite");
    }
    for (const auto& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            if (f[k] < 0 || f[k] >= nv) throw std::runtime_error("face index out of range");
        }
    }
}

double bbox_diagonal(const TriMesh& mesh) {
    if (mesh.vertices.empty()) return 0.0;
    Eigen::Vector3d lo = mesh.vertices.front();
    Eigen::Vector3d hi = lo;
    for (const auto& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

FaceGeometry compute_face_geometry(const TriMesh& mesh) {
    if (mesh.faces.empty()) throw std::runtime_error("empty mesh");
    const double diag = bbox_diagonal(mesh);
    const double area_eps = 1e-12 * diag * diag;

    FaceGeometry geo;
    geo.centers.resize(mesh.faces.size());
    geo.normals.resize(mesh.faces.size());
    geo.valid.resize(mesh.faces.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& tri = mesh.faces[f];
        const Eigen::Vector3d& a = mesh.vertices[tri[0]];
        const Eigen::Vector3d& b = mesh.vertices[tri[1]];
        const Eigen::Vector3d& c = mesh.vertices[tri[2]];
        geo.centers[f] = (a + b + c) / 3.0;
        const Eigen::Vector3d n = 0.5 * (b - a).cross(c - a);
        const bool ok = n.norm() > area_eps;
        geo.normals[f] = ok ? n : Eigen::Vector3d::Zero();
        geo.valid[f] = ok ? 1 : 0;
        geo.valid_count += ok ? 1 : 0;
    }
    return geo;
}

double total_area(const TriMesh& mesh) {
    double area = 0.0;
    for (const auto& tri : mesh.faces) {
        const Eigen::Vector3d& a = mesh.vertices[tri[0]];
        const Eigen::Vector3d& b = mesh.vertices[tri[1]];
        const Eigen::Vector3d& c = mesh.vertices[tri[2]];
        area += 0.5 * (b - a).cross(c - a).norm();
    }
    return area;
}

TriMesh midpoint_subdivide(const TriMesh& mesh) {
    validate(mesh);
    TriMesh out;
    out.vertices = mesh.vertices;
    out.faces.reserve(mesh.faces.size() * 4);

    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int i, int j) {
        const auto key = std::minmax(i, j);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        const int idx = out.vertex_count();
        out.vertices.push_back(0.5 * (mesh.vertices[i] + mesh.vertices[j]));
        midpoint.emplace(key, idx);
        return idx;
    };

    for (const auto& tri : mesh.faces) {
        const int m01 = mid(tri[0], tri[1]);
        const int m12 = mid(tri[1], tri[2]);
        const int m20 = mid(tri[2], tri[0]);
        out.faces.push_back({tri[0], m01, m20});
        out.faces.push_back({tri[1], m12, m01});
        out.faces.push_back({tri[2], m20, m12});
        out.faces.push_back({m01, m12, m20});
    }
    return out;
}

TriMesh corrupt(const TriMesh& mesh, const CorruptionSpec& spec, std::uint64_t seed) {
    validate(mesh);
    if (spec.hole_radius_frac < 0.0 || spec.hole_radius_frac > 1.0 ||
        spec.jitter_sigma_frac < 0.0 || spec.jitter_sigma_frac > 1.0 ||
        spec.drop_face_frac < 0.0 || spec.drop_face_frac > 1.0 || spec.hole_count < 0) {
        throw std::runtime_error("corruption fractions must lie in [0,1]");
    }
    if (spec.is_identity()) return mesh;

    const double diag = bbox_diagonal(mesh);
    Rng rng(seed);

    std::vector<std::uint8_t> keep(mesh.faces.size(), 1);

    if (spec.drop_face_frac > 0.0) {
        Rng drop = rng.substream("drop");
        std::vector<int> order(mesh.faces.size());
        std::iota(order.begin(), order.end(), 0);
        // Fisher-Yates prefix shuffle, then drop that prefix.
        const auto n_drop = static_cast<size_t>(
            std::llround(spec.drop_face_frac * static_cast<double>(mesh.faces.size())));
        for (size_t i = 0; i < n_drop && i < order.size(); ++i) {
            const size_t j = i + static_cast<size_t>(drop.below(order.size() - i));
            std::swap(order[i], order[j]);
            keep[order[i]] = 0;
        }
    }

    if (spec.hole_count > 0 && spec.hole_radius_frac > 0.0) {
        Rng holes = rng.substream("holes");
        // Area-weighted face choice, then a uniform barycentric point on it.
        std::vector<double> cumulative(mesh.faces.size());
        double acc = 0.0;
        for (size_t f = 0; f < mesh.faces.size(); ++f) {
            const auto& tri = mesh.faces[f];
            acc += 0.5 * (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                             .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]])
                             .norm();
            cumulative[f] = acc;
        }
        if (acc <= 0.0) throw std::runtime_error("cannot punch holes in a zero-area mesh");
        const double radius = spec.hole_radius_frac * diag;
        for (int h = 0; h < spec.hole_count; ++h) {
            const double pick = holes.uniform(0.0, acc);
            const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
            const size_t f = static_cast<size_t>(it - cumulative.begin());
            const auto& tri = mesh.faces[std::min(f, mesh.faces.size() - 1)];
            double u = holes.uniform();
            double v = holes.uniform();
            if (u + v > 1.0) {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            const Eigen::Vector3d point = mesh.vertices[tri[0]] +
                                          u * (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]) +
                                          v * (mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
            for (size_t g = 0; g < mesh.faces.size(); ++g) {
                if (!keep[g]) continue;
                const auto& t2 = mesh.faces[g];
                const Eigen::Vector3d bc =
                    (mesh.vertices[t2[0]] + mesh.vertices[t2[1]] + mesh.vertices[t2[2]]) / 3.0;
                if ((bc - point).norm() <= radius) keep[g] = 0;
            }
        }
    }

    TriMesh out;
    const bool removed_any =
        std::any_of(keep.begin(), keep.end(), [](std::uint8_t k) { return k == 0; });
    if (removed_any) {
        std::vector<int> remap(mesh.vertices.size(), -1);
        for (size_t f = 0; f < mesh.faces.size(); ++f) {
            if (!keep[f]) continue;
            std::array<int, 3> tri{};
            for (int k = 0; k < 3; ++k) {
                int& slot = remap[mesh.faces[f][k]];
                if (slot < 0) {
                    slot = out.vertex_count();
                    out.vertices.push_back(mesh.vertices[mesh.faces[f][k]]);
                }
                tri[k] = slot;
            }
            out.faces.push_back(tri);
        }
    } else {
        out = mesh;
    }
    if (out.faces.empty()) throw std::runtime_error("corruption removed every face");

    if (spec.jitter_sigma_frac > 0.0) {
        Rng jitter = rng.substream("jitter");
        const double sigma = spec.jitter_sigma_frac * diag;
        for (auto& v : out.vertices) {
            for (int k = 0; k < 3; ++k) v[k] += jitter.normal(0.0, sigma);
        }
    }

    if (compute_face_geometry(out).valid_count == 0) {
        throw std::runtime_error("corruption left no valid face");
    }
    return out;
}

TriMesh center(const TriMesh& mesh) {
    if (mesh.vertices.empty()) throw std::runtime_error("cannot center an empty mesh");
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    double weight = 0.0;
    if (!mesh.faces.empty()) {
        const FaceGeometry geo = compute_face_geometry(mesh);
        for (size_t f = 0; f < mesh.faces.size(); ++f) {
            if (!geo.valid[f]) continue;
            const double area = geo.normals[f].norm();
            centroid += area * geo.centers[f];
            weight += area;
        }
    }
    if (weight <= 0.0) {
        for (const auto& v : mesh.vertices) centroid += v;
        weight = static_cast<double>(mesh.vertices.size());
    }
    return translated(mesh, -centroid / weight);
}

TriMesh translated(const TriMesh& mesh, const Eigen::Vector3d& offset) {
    TriMesh out = mesh;
    for (auto& v : out.vertices) v += offset;
    return out;
}

TriMesh rotated(const TriMesh& mesh, const Eigen::Matrix3d& rotation) {
    TriMesh out = mesh;
    for (auto& v : out.vertices) v = rotation * v;
    return out;
}

} // namespace vmo
