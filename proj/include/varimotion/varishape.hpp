#pragma once

#include "varimotion/latent.hpp"
#include "varimotion/nn.hpp"
#include "varimotion/synth.hpp"
#include "varimotion/varifold.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace vmo {

// Gradient of z -> d_Var(q, G(z))^2 at G's neutral code: the mesh-invariant
// feature vector in R^m. Rebuilds the template state on every call; use
// FeatureExtractor for the repeated-query hot path.
Eigen::VectorXd extract_feature(const TriMesh& q, const Decoder& G, const VarifoldKernel& kernel);

// Precomputes G's template decode, face geometry, and the query-independent
// self-gradient once. Pure and thread-safe afterwards.
class FeatureExtractor {
public:
    FeatureExtractor(std::shared_ptr<const Decoder> g, VarifoldKernel kernel);

    Eigen::VectorXd operator()(const TriMesh& q) const;

    const Decoder& g() const { return *g_; }
    const std::shared_ptr<const Decoder>& g_ptr() const { return g_; }
    const VarifoldKernel& kernel() const { return kernel_; }

private:
    std::shared_ptr<const Decoder> g_;
    VarifoldKernel kernel_;
    VarifoldTemplate template_;
};

// Trained retrieval pipeline: psi(normalize(extract_feature(q))) -> code of F.
class VariShapeModel {
public:
    VariShapeModel() = default;
    VariShapeModel(std::shared_ptr<const Decoder> g, std::shared_ptr<const Decoder> f,
                   VarifoldKernel kernel, Mlp net, Eigen::VectorXd feature_mean,
                   Eigen::VectorXd feature_std);

    LatentCode retrieve(const TriMesh& q) const;
    Eigen::VectorXd retrieve_raw(const TriMesh& q) const; // unsplit code of F

    const Decoder& f() const { return *f_; }
    const std::shared_ptr<const Decoder>& f_ptr() const { return f_; }
    const FeatureExtractor& extractor() const { return extractor_; }
    const Mlp& net() const { return net_; }
    const Eigen::VectorXd& feature_mean() const { return feature_mean_; }
    const Eigen::VectorXd& feature_std() const { return feature_std_; }

    Eigen::VectorXd normalize(const Eigen::VectorXd& feature) const;

    void save(const std::string& path) const;
    static VariShapeModel load(const std::string& path);

private:
    std::shared_ptr<const Decoder> f_;
    FeatureExtractor extractor_{nullptr, VarifoldKernel()};
    Mlp net_;
    Eigen::VectorXd feature_mean_, feature_std_;
};

struct VariShapeTrainConfig {
    std::vector<int> hidden = {256, 256, 256};
    int warm_epochs = 300; // latent-code MSE on cached features
    int fine_epochs = 40;  // vertex MSE through F's vjp
    int batch_size = 32;
    std::uint64_t seed = 0;
    AdamConfig warm_adam = {1e-3, 0.9, 0.999, 1e-8};
    AdamConfig fine_adam = {2e-4, 0.9, 0.999, 1e-8};
};

struct VariShapeHistory {
    std::vector<double> warm_loss;
    std::vector<double> fine_loss; // mean vertex MSE per epoch
};

// Features are extracted once from the raw meshes of the training split and
// cached; normalization constants are fit on that cache.
VariShapeModel train_varishape(std::shared_ptr<const Decoder> g,
                               std::shared_ptr<const Decoder> f, const VarifoldKernel& kernel,
                               const Dataset& dataset, const VariShapeTrainConfig& config,
                               VariShapeHistory* history = nullptr);

struct ChamferSearchResult {
    Eigen::VectorXd code;
    double value = 0.0;   // best objective seen
    int iterations = 0;   // accepted iterates
    double seconds = 0.0;
};

// L-BFGS (history 10, Armijo backtracking) on v -> chamfer(q, F(v)); falls
// back to steepest descent when curvature pairs degenerate and restarts with
// a smaller step on non-finite values (abort after 3 restarts).
ChamferSearchResult chamfer_search(const Decoder& f, const TriMesh& q,
                                   const Eigen::VectorXd& init, int iters);

struct RetrievalMetrics {
    double mean_vertex_dist = 0.0;     // registered targets only
    double chamfer_error = 0.0;        // against the raw targets
    double varifold_error = 0.0;       // raw squared varifold distance
    double varifold_error_normalized = 0.0; // divided by target self term
    double wall_time_per_1k = 0.0;     // seconds of retrieval per 1000 meshes
};

RetrievalMetrics evaluate(const VariShapeModel& model, const Dataset& dataset,
                          const std::vector<int>& indices);

} // namespace vmo
