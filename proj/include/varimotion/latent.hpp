#pragma once

#include "varimotion/trimesh.hpp"

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace vmo {

class BinaryWriter;
class BinaryReader;

// Pose block (axis-angle radians, wrapped into [-pi, pi] on construction)
// followed by a shape block (dimensionless multipliers around 1).
struct LatentCode {
    Eigen::VectorXd pose;
    Eigen::VectorXd shape;

    LatentCode() = default;
    LatentCode(Eigen::VectorXd pose_in, Eigen::VectorXd shape_in);

    int dim() const { return static_cast<int>(pose.size() + shape.size()); }
    Eigen::VectorXd concat() const;
    static LatentCode split(const Eigen::VectorXd& full, int pose_dim);
};

double wrap_angle(double radians); // into [-pi, pi]

// A latent body model: a map from codes to meshes over a fixed face list,
// plus the transposed-Jacobian product needed to differentiate through it.
class Decoder {
public:
    virtual ~Decoder() = default;

    virtual int latent_dim() const = 0;
    // Size of the leading pose block; 0 when the model has no pose/shape split.
    virtual int pose_dim() const = 0;
    virtual const std::vector<std::array<int, 3>>& faces() const = 0;
    virtual int vertex_count() const = 0;

    virtual TriMesh decode(const Eigen::VectorXd& code) const = 0;

    // The code of the model's template / rest configuration. Features and
    // template meshes are anchored here; zero unless a model's coordinates
    // are naturally centered elsewhere (e.g. multipliers around 1).
    virtual Eigen::VectorXd neutral_code() const {
        return Eigen::VectorXd::Zero(latent_dim());
    }

    // J(code)^T * cotangent for a per-vertex 3D cotangent field.
    virtual Eigen::VectorXd vjp(const Eigen::VectorXd& code,
                                const std::vector<Eigen::Vector3d>& cotangent) const = 0;
};

// mean + basis * code, orthonormal basis columns. Vertex v owns flat
// coordinates (3v, 3v+1, 3v+2).
class AffineDecoder : public Decoder {
public:
    AffineDecoder() = default;
    AffineDecoder(Eigen::VectorXd mean, Eigen::MatrixXd basis,
                  std::vector<std::array<int, 3>> faces);

    int latent_dim() const override { return static_cast<int>(basis_.cols()); }
    int pose_dim() const override { return 0; }
    const std::vector<std::array<int, 3>>& faces() const override { return faces_; }
    int vertex_count() const override { return static_cast<int>(mean_.size() / 3); }

    TriMesh decode(const Eigen::VectorXd& code) const override;
    Eigen::VectorXd vjp(const Eigen::VectorXd& code,
                        const std::vector<Eigen::Vector3d>& cotangent) const override;

    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& basis() const { return basis_; }

    void save_sections(BinaryWriter& writer) const;
    static AffineDecoder load_sections(BinaryReader& reader);

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd basis_;
    std::vector<std::array<int, 3>> faces_;
};

struct AffineFit {
    AffineDecoder decoder;
    // Fraction of total variance captured by each retained component.
    Eigen::VectorXd explained_variance;
};

// Mean-centered PCA over stacked vertex coordinates of registered meshes.
// Uses the Gram matrix (samples x samples) when that is the smaller problem.
AffineFit fit_affine(const std::vector<TriMesh>& meshes, int dimension);

Eigen::VectorXd flatten_vertices(const TriMesh& mesh);
TriMesh unflatten_vertices(const Eigen::VectorXd& coords,
                           const std::vector<std::array<int, 3>>& faces);

void save_faces_section(BinaryWriter& writer, const std::vector<std::array<int, 3>>& faces);
std::vector<std::array<int, 3>> load_faces_section(BinaryReader& reader);

} // namespace vmo
