#pragma once

#include "varimotion/trimesh.hpp"

#include <vector>

namespace vmo {

// Sum of centered Gaussians rho(r) = sum_s w_s * exp(-r^2 / (2 sigma_s^2)).
// A single scale is the default; multiple scales give coarse-to-fine metrics.
struct VarifoldKernel {
    std::vector<double> sigmas;
    std::vector<double> weights;

    static VarifoldKernel single(double sigma) { return {{sigma}, {1.0}}; }
    void validate() const;
};

// The three blocks of the squared varifold distance:
//   d^2 = self_a + self_b - 2 * cross, clamped to >= 0.
struct VarifoldTerms {
    double self_a = 0.0;
    double self_b = 0.0;
    double cross = 0.0;

    double sq_dist() const {
        const double d = self_a + self_b - 2.0 * cross;
        return d > 0.0 ? d : 0.0;
    }
};

VarifoldTerms varifold_terms(const TriMesh& a, const TriMesh& b, const VarifoldKernel& kernel);

// Squared varifold distance over all valid face pairs; exact O(m*m')
// summation with a thread-count-independent reduction. Throws
// "degenerate mesh" if either side has no valid face.
double varifold_sq_dist(const TriMesh& a, const TriMesh& b, const VarifoldKernel& kernel);

// Self term of a single mesh, used to normalize reported errors.
double varifold_self_term(const TriMesh& mesh, const VarifoldKernel& kernel);

// Analytic gradient of varifold_sq_dist(fixed, var) with respect to the
// vertex positions of `var`, chain-ruled through barycenters and
// area-weighted normals. Invalid faces contribute nothing.
std::vector<Eigen::Vector3d> varifold_grad_vertices(const TriMesh& fixed, const TriMesh& var,
                                                    const VarifoldKernel& kernel);

// Precomputed variable-side mesh for repeated gradients against many query
// meshes (the feature-extraction hot path). The self-term gradient of the
// template does not depend on the query, so it is baked in once.
struct VarifoldTemplate {
    TriMesh mesh;
    FaceGeometry geometry;
    std::vector<Eigen::Vector3d> self_grad;
    double self_term = 0.0;
};

VarifoldTemplate make_varifold_template(const TriMesh& mesh, const VarifoldKernel& kernel);

// Gradient of d^2(query, .) at the template; identical to
// varifold_grad_vertices(query, template.mesh, kernel).
std::vector<Eigen::Vector3d> varifold_grad_at_template(const TriMesh& query,
                                                       const VarifoldTemplate& tpl,
                                                       const VarifoldKernel& kernel);

// Chamfer: symmetric mean of squared nearest-neighbor distances between the
// two vertex sets (each direction averaged over its own points, then summed).
double chamfer_sq_dist(const TriMesh& a, const TriMesh& b);

struct ChamferResult {
    double value = 0.0;
    // Subgradient with respect to b's vertices, nearest-neighbor assignments
    // held fixed.
    std::vector<Eigen::Vector3d> grad_b;
};

ChamferResult chamfer_sq_dist_grad(const TriMesh& a, const TriMesh& b);

} // namespace vmo
