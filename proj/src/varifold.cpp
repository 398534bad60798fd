#include "varimotion/varifold.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vmo {

namespace {

struct FaceData {
    std::vector<Eigen::Vector3d> centers;
    std::vector<Eigen::Vector3d> normals;
    std::vector<double> norm_len; // |n_f|
    int count = 0;                // valid faces only
};

// Valid faces only, compacted; the original face index is kept for gradient
// scatter.
struct CompactFaces {
    FaceData data;
    std::vector<int> face_index;
};

CompactFaces compact_valid(const TriMesh& mesh, const FaceGeometry& geo) {
    CompactFaces out;
    out.data.centers.reserve(geo.valid_count);
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        if (!geo.valid[f]) continue;
        out.data.centers.push_back(geo.centers[f]);
        out.data.normals.push_back(geo.normals[f]);
        out.data.norm_len.push_back(geo.normals[f].norm());
        out.face_index.push_back(static_cast<int>(f));
    }
    out.data.count = static_cast<int>(out.data.centers.size());
    return out;
}

CompactFaces compact_valid(const TriMesh& mesh) {
    return compact_valid(mesh, compute_face_geometry(mesh));
}

// rho evaluated on a squared radius.
inline double kernel_value(const VarifoldKernel& k, double r2) {
    double v = 0.0;
    for (size_t s = 0; s < k.sigmas.size(); ++s) {
        v += k.weights[s] * std::exp(-r2 / (2.0 * k.sigmas[s] * k.sigmas[s]));
    }
    return v;
}

// rho and d(rho)/d(r^2) in one pass.
inline void kernel_value_deriv(const VarifoldKernel& k, double r2, double& rho, double& drho_dr2) {
    rho = 0.0;
    drho_dr2 = 0.0;
    for (size_t s = 0; s < k.sigmas.size(); ++s) {
        const double inv2s2 = 1.0 / (2.0 * k.sigmas[s] * k.sigmas[s]);
        const double e = k.weights[s] * std::exp(-r2 * inv2s2);
        rho += e;
        drho_dr2 -= e * inv2s2;
    }
}

// Sum over all pairs of kernel terms between two (possibly identical) face
// sets. Deterministic: per-row partial sums, rows combined in index order.
double pair_sum(const FaceData& a, const FaceData& b, const VarifoldKernel& k) {
    std::vector<double> row(a.count, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.count; ++i) {
        const Eigen::Vector3d ci = a.centers[i];
        const Eigen::Vector3d ni = a.normals[i];
        const double li = a.norm_len[i];
        double acc = 0.0;
        for (int j = 0; j < b.count; ++j) {
            const double r2 = (ci - b.centers[j]).squaredNorm();
            const double dot = ni.dot(b.normals[j]);
            acc += kernel_value(k, r2) * dot * dot / (li * b.norm_len[j]);
        }
        row[i] = acc;
    }
    double total = 0.0;
    for (int i = 0; i < a.count; ++i) total += row[i];
    return total;
}

// Gradient of sum_ij k(fixed_i, var_j) with respect to var's face centers and
// normals. `self_factor` is 2 when fixed == var (both kernel slots move).
void pair_grad_faces(const FaceData& fixed, const FaceData& var, const VarifoldKernel& k,
                     double scale, double self_factor, std::vector<Eigen::Vector3d>& grad_c,
                     std::vector<Eigen::Vector3d>& grad_n) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < var.count; ++j) {
        const Eigen::Vector3d cj = var.centers[j];
        const Eigen::Vector3d nj = var.normals[j];
        const double lj = var.norm_len[j];
        Eigen::Vector3d gc = Eigen::Vector3d::Zero();
        Eigen::Vector3d gn = Eigen::Vector3d::Zero();
        for (int i = 0; i < fixed.count; ++i) {
            const Eigen::Vector3d diff = cj - fixed.centers[i];
            const double r2 = diff.squaredNorm();
            double rho, drho_dr2;
            kernel_value_deriv(k, r2, rho, drho_dr2);
            const double dot = fixed.normals[i].dot(nj);
            const double inv_l = 1.0 / (fixed.norm_len[i] * lj);
            const double psi = dot * dot * inv_l;
            // d(r^2)/d(c_j) = 2 * diff
            gc += (2.0 * drho_dr2 * psi) * diff;
            gn += rho * (2.0 * dot * inv_l * fixed.normals[i] - psi / (lj * lj) * nj);
        }
        grad_c[j] += (scale * self_factor) * gc;
        grad_n[j] += (scale * self_factor) * gn;
    }
}

// Chain rule from per-face (center, normal) gradients to vertex gradients.
// c = (v0+v1+v2)/3, n = 0.5 * (v1-v0) x (v2-v0).
void scatter_to_vertices(const TriMesh& mesh, const CompactFaces& faces,
                         const std::vector<Eigen::Vector3d>& grad_c,
                         const std::vector<Eigen::Vector3d>& grad_n,
                         std::vector<Eigen::Vector3d>& grad_v) {
    for (int j = 0; j < faces.data.count; ++j) {
        const auto& tri = mesh.faces[faces.face_index[j]];
        const Eigen::Vector3d& v0 = mesh.vertices[tri[0]];
        const Eigen::Vector3d& v1 = mesh.vertices[tri[1]];
        const Eigen::Vector3d& v2 = mesh.vertices[tri[2]];
        const Eigen::Vector3d e1 = v1 - v0;
        const Eigen::Vector3d e2 = v2 - v0;
        const Eigen::Vector3d gc = grad_c[j] / 3.0;
        const Eigen::Vector3d& gn = grad_n[j];
        grad_v[tri[0]] += gc + 0.5 * (e1 - e2).cross(gn);
        grad_v[tri[1]] += gc + 0.5 * e2.cross(gn);
        grad_v[tri[2]] += gc + 0.5 * gn.cross(e1);
    }
}

// Content-based strict weak order on face sets, so the cross term can pick a
// canonical summation grouping: pair_sum(a, b) and pair_sum(b, a) sum the same
// numbers but group them by different rows, which costs bitwise symmetry.
bool canonical_before(const FaceData& a, const FaceData& b) {
    if (a.count != b.count) return a.count < b.count;
    for (int f = 0; f < a.count; ++f) {
        for (int k = 0; k < 3; ++k) {
            if (a.centers[f][k] != b.centers[f][k]) return a.centers[f][k] < b.centers[f][k];
            if (a.normals[f][k] != b.normals[f][k]) return a.normals[f][k] < b.normals[f][k];
        }
    }
    return false; // identical content: either order computes the same sum
}

} // namespace

void VarifoldKernel::validate() const {
    if (sigmas.empty() || sigmas.size() != weights.size()) {
        throw std::runtime_error("varifold kernel needs matching non-empty sigma/weight lists");
    }
    for (double s : sigmas) {
        if (!(s > 0.0)) throw std::runtime_error("varifold kernel sigma must be positive");
    }
    for (double w : weights) {
        if (!(w > 0.0)) throw std::runtime_error("varifold kernel weight must be positive");
    }
}

VarifoldTerms varifold_terms(const TriMesh& a, const TriMesh& b, const VarifoldKernel& kernel) {
    kernel.validate();
    const CompactFaces fa = compact_valid(a);
    const CompactFaces fb = compact_valid(b);
    if (fa.data.count == 0 || fb.data.count == 0) throw std::runtime_error("degenerate mesh");
    VarifoldTerms t;
    t.self_a = pair_sum(fa.data, fa.data, kernel);
    t.self_b = pair_sum(fb.data, fb.data, kernel);
    t.cross = canonical_before(fb.data, fa.data) ? pair_sum(fb.data, fa.data, kernel)
                                                 : pair_sum(fa.data, fb.data, kernel);
    return t;
}

double varifold_sq_dist(const TriMesh& a, const TriMesh& b, const VarifoldKernel& kernel) {
    return varifold_terms(a, b, kernel).sq_dist();
}

double varifold_self_term(const TriMesh& mesh, const VarifoldKernel& kernel) {
    kernel.validate();
    const CompactFaces f = compact_valid(mesh);
    if (f.data.count == 0) throw std::runtime_error("degenerate mesh");
    return pair_sum(f.data, f.data, kernel);
}

std::vector<Eigen::Vector3d> varifold_grad_vertices(const TriMesh& fixed, const TriMesh& var,
                                                    const VarifoldKernel& kernel) {
    kernel.validate();
    const CompactFaces ff = compact_valid(fixed);
    const CompactFaces fv = compact_valid(var);
    if (ff.data.count == 0 || fv.data.count == 0) throw std::runtime_error("degenerate mesh");

    std::vector<Eigen::Vector3d> grad_c(fv.data.count, Eigen::Vector3d::Zero());
    std::vector<Eigen::Vector3d> grad_n(fv.data.count, Eigen::Vector3d::Zero());
    // d^2 = A(fixed,fixed) + A(var,var) - 2 A(fixed,var); only var moves.
    pair_grad_faces(fv.data, fv.data, kernel, 1.0, 2.0, grad_c, grad_n);
    pair_grad_faces(ff.data, fv.data, kernel, -2.0, 1.0, grad_c, grad_n);

    std::vector<Eigen::Vector3d> grad_v(var.vertices.size(), Eigen::Vector3d::Zero());
    scatter_to_vertices(var, fv, grad_c, grad_n, grad_v);
    return grad_v;
}

VarifoldTemplate make_varifold_template(const TriMesh& mesh, const VarifoldKernel& kernel) {
    kernel.validate();
    VarifoldTemplate tpl;
    tpl.mesh = mesh;
    tpl.geometry = compute_face_geometry(mesh);
    const CompactFaces fv = compact_valid(mesh, tpl.geometry);
    if (fv.data.count == 0) throw std::runtime_error("degenerate mesh");
    tpl.self_term = pair_sum(fv.data, fv.data, kernel);

    std::vector<Eigen::Vector3d> grad_c(fv.data.count, Eigen::Vector3d::Zero());
    std::vector<Eigen::Vector3d> grad_n(fv.data.count, Eigen::Vector3d::Zero());
    pair_grad_faces(fv.data, fv.data, kernel, 1.0, 2.0, grad_c, grad_n);
    tpl.self_grad.assign(mesh.vertices.size(), Eigen::Vector3d::Zero());
    scatter_to_vertices(mesh, fv, grad_c, grad_n, tpl.self_grad);
    return tpl;
}

std::vector<Eigen::Vector3d> varifold_grad_at_template(const TriMesh& query,
                                                       const VarifoldTemplate& tpl,
                                                       const VarifoldKernel& kernel) {
    const CompactFaces fq = compact_valid(query);
    const CompactFaces fv = compact_valid(tpl.mesh, tpl.geometry);
    if (fq.data.count == 0 || fv.data.count == 0) throw std::runtime_error("degenerate mesh");

    std::vector<Eigen::Vector3d> grad_c(fv.data.count, Eigen::Vector3d::Zero());
    std::vector<Eigen::Vector3d> grad_n(fv.data.count, Eigen::Vector3d::Zero());
    pair_grad_faces(fq.data, fv.data, kernel, -2.0, 1.0, grad_c, grad_n);

    std::vector<Eigen::Vector3d> grad_v = tpl.self_grad;
    scatter_to_vertices(tpl.mesh, fv, grad_c, grad_n, grad_v);
    return grad_v;
}

double chamfer_sq_dist(const TriMesh& a, const TriMesh& b) {
    return chamfer_sq_dist_grad(a, b).value;
}

ChamferResult chamfer_sq_dist_grad(const TriMesh& a, const TriMesh& b) {
    if (a.vertices.empty() || b.vertices.empty()) {
        throw std::runtime_error("chamfer distance of an empty vertex set");
    }
    ChamferResult result;
    result.grad_b.assign(b.vertices.size(), Eigen::Vector3d::Zero());
    const double inv_na = 1.0 / static_cast<double>(a.vertices.size());
    const double inv_nb = 1.0 / static_cast<double>(b.vertices.size());

    double sum_a = 0.0;
    for (const auto& p : a.vertices) {
        double best = std::numeric_limits<double>::infinity();
        size_t best_j = 0;
        for (size_t j = 0; j < b.vertices.size(); ++j) {
            const double d2 = (p - b.vertices[j]).squaredNorm();
            if (d2 < best) {
                best = d2;
                best_j = j;
            }
        }
        sum_a += best;
        result.grad_b[best_j] += (2.0 * inv_na) * (b.vertices[best_j] - p);
    }

    double sum_b = 0.0;
    for (size_t j = 0; j < b.vertices.size(); ++j) {
        double best = std::numeric_limits<double>::infinity();
        size_t best_i = 0;
        for (size_t i = 0; i < a.vertices.size(); ++i) {
            const double d2 = (b.vertices[j] - a.vertices[i]).squaredNorm();
            if (d2 < best) {
                best = d2;
                best_i = i;
            }
        }
        sum_b += best;
        result.grad_b[j] += (2.0 * inv_nb) * (b.vertices[j] - a.vertices[best_i]);
    }

    result.value = sum_a * inv_na + sum_b * inv_nb;
    return result;
}

} // namespace vmo
