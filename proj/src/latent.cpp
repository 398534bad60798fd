#include "varimotion/latent.hpp"

#include "varimotion/binio.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace vmo {

double wrap_angle(double radians) {
    if (std::abs(radians) <= M_PI) return radians;
    return radians - 2.0 * M_PI * std::round(radians / (2.0 * M_PI));
}

LatentCode::LatentCode(Eigen::VectorXd pose_in, Eigen::VectorXd shape_in)
    : pose(std::move(pose_in)), shape(std::move(shape_in)) {
    if (!pose.allFinite() || !shape.allFinite()) {
        throw std::runtime_error("latent code entries must be finite");
    }
    for (Eigen::Index i = 0; i < pose.size(); ++i) pose[i] = wrap_angle(pose[i]);
}

Eigen::VectorXd LatentCode::concat() const {
    Eigen::VectorXd full(dim());
    full.head(pose.size()) = pose;
    full.tail(shape.size()) = shape;
    return full;
}

LatentCode LatentCode::split(const Eigen::VectorXd& full, int pose_dim) {
    if (pose_dim < 0 || pose_dim > full.size()) {
        throw std::runtime_error("invalid pose dimension in latent split");
    }
    return LatentCode(full.head(pose_dim), full.tail(full.size() - pose_dim));
}

Eigen::VectorXd flatten_vertices(const TriMesh& mesh) {
    Eigen::VectorXd out(3 * mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v) out.segment<3>(3 * v) = mesh.vertices[v];
    return out;
}

TriMesh unflatten_vertices(const Eigen::VectorXd& coords,
                           const std::vector<std::array<int, 3>>& faces) {
    if (coords.size() % 3 != 0) throw std::runtime_error("flat coordinate size not divisible by 3");
    TriMesh mesh;
    mesh.vertices.resize(coords.size() / 3);
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        mesh.vertices[v] = coords.segment<3>(3 * static_cast<Eigen::Index>(v));
    }
    mesh.faces = faces;
    return mesh;
}

AffineDecoder::AffineDecoder(Eigen::VectorXd mean, Eigen::MatrixXd basis,
                             std::vector<std::array<int, 3>> faces)
    : mean_(std::move(mean)), basis_(std::move(basis)), faces_(std::move(faces)) {
    if (mean_.size() != basis_.rows()) {
        throw std::runtime_error("affine decoder mean/basis row mismatch");
    }
    if (mean_.size() % 3 != 0) throw std::runtime_error("affine decoder size not divisible by 3");
}

TriMesh AffineDecoder::decode(const Eigen::VectorXd& code) const {
    if (code.size() != basis_.cols()) throw std::runtime_error("affine decoder dim mismatch");
    return unflatten_vertices(mean_ + basis_ * code, faces_);
}

Eigen::VectorXd AffineDecoder::vjp(const Eigen::VectorXd& code,
                                   const std::vector<Eigen::Vector3d>& cotangent) const {
    if (code.size() != basis_.cols()) throw std::runtime_error("affine decoder dim mismatch");
    if (static_cast<int>(cotangent.size()) != vertex_count()) {
        throw std::runtime_error("affine decoder cotangent size mismatch");
    }
    Eigen::VectorXd flat(mean_.size());
    for (size_t v = 0; v < cotangent.size(); ++v) {
        flat.segment<3>(3 * static_cast<Eigen::Index>(v)) = cotangent[v];
    }
    return basis_.transpose() * flat;
}

void AffineDecoder::save_sections(BinaryWriter& writer) const {
    writer.section("affine/mean", mean_);
    writer.section("affine/basis", basis_);
    save_faces_section(writer, faces_);
}

AffineDecoder AffineDecoder::load_sections(BinaryReader& reader) {
    Eigen::VectorXd mean = reader.vector("affine/mean");
    Eigen::MatrixXd basis = reader.matrix("affine/basis");
    return AffineDecoder(std::move(mean), std::move(basis), load_faces_section(reader));
}

void save_faces_section(BinaryWriter& writer, const std::vector<std::array<int, 3>>& faces) {
    Eigen::MatrixXd table(static_cast<Eigen::Index>(faces.size()), 3);
    for (size_t f = 0; f < faces.size(); ++f) {
        for (int k = 0; k < 3; ++k) table(static_cast<Eigen::Index>(f), k) = faces[f][k];
    }
    writer.section("faces", table);
}

std::vector<std::array<int, 3>> load_faces_section(BinaryReader& reader) {
    const Eigen::MatrixXd table = reader.matrix("faces");
    if (table.cols() != 3) throw std::runtime_error("face table must have 3 columns");
    std::vector<std::array<int, 3>> faces(static_cast<size_t>(table.rows()));
    for (Eigen::Index f = 0; f < table.rows(); ++f) {
        for (int k = 0; k < 3; ++k) faces[static_cast<size_t>(f)][k] = static_cast<int>(table(f, k));
    }
    return faces;
}

AffineFit fit_affine(const std::vector<TriMesh>& meshes, int dimension) {
    if (dimension <= 0) throw std::runtime_error("affine fit needs a positive dimension");
    if (static_cast<int>(meshes.size()) <= dimension) {
        throw std::runtime_error("affine fit needs more samples than retained components");
    }
    const int n = static_cast<int>(meshes.size());
    const Eigen::Index coords = 3 * meshes.front().vertex_count();
    for (const auto& m : meshes) {
        if (3 * m.vertex_count() != coords || m.faces != meshes.front().faces) {
            throw std::runtime_error("affine fit requires shared connectivity");
        }
    }

    Eigen::MatrixXd stacked(coords, n);
    for (int i = 0; i < n; ++i) stacked.col(i) = flatten_vertices(meshes[i]);
    const Eigen::VectorXd mean = stacked.rowwise().mean();
    stacked.colwise() -= mean;

    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd basis(coords, dimension);
    double total_variance = 0.0;

    if (n <= coords) {
        // Gram-matrix route: eigenvectors of X^T X lift to principal directions.
        const Eigen::MatrixXd gram = stacked.transpose() * stacked;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success) throw std::runtime_error("PCA eigensolver failed");
        total_variance = solver.eigenvalues().sum();
        eigenvalues.resize(dimension);
        for (int k = 0; k < dimension; ++k) {
            const int src = n - 1 - k; // eigenvalues ascend
            const double lambda = solver.eigenvalues()[src];
            if (lambda <= 1e-12 * std::max(1.0, solver.eigenvalues()[n - 1])) {
                throw std::runtime_error("affine fit: dataset rank below requested dimension");
            }
            eigenvalues[k] = lambda;
            basis.col(k) = stacked * solver.eigenvectors().col(src) / std::sqrt(lambda);
        }
    } else {
        const Eigen::MatrixXd covariance = stacked * stacked.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
        if (solver.info() != Eigen::Success) throw std::runtime_error("PCA eigensolver failed");
        total_variance = solver.eigenvalues().sum();
        eigenvalues.resize(dimension);
        for (int k = 0; k < dimension; ++k) {
            const Eigen::Index src = coords - 1 - k;
            eigenvalues[k] = solver.eigenvalues()[src];
            basis.col(k) = solver.eigenvectors().col(src);
        }
    }

    AffineFit fit;
    fit.decoder = AffineDecoder(mean, std::move(basis), meshes.front().faces);
    fit.explained_variance = eigenvalues / std::max(total_variance, 1e-300);
    return fit;
}

} // namespace vmo
