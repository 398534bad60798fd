#include "varimotion/varishape.hpp"

#include "varimotion/binio.hpp"
#include "varimotion/decoder_io.hpp"
#include "varimotion/rng.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vmo {

namespace {

Eigen::VectorXd feature_from_gradient(const Decoder& g,
                                      const std::vector<Eigen::Vector3d>& vertex_grad) {
    return g.vjp(g.neutral_code(), vertex_grad);
}

} // namespace

Eigen::VectorXd extract_feature(const TriMesh& q, const Decoder& g,
                                const VarifoldKernel& kernel) {
    const TriMesh tpl = g.decode(g.neutral_code());
    return feature_from_gradient(g, varifold_grad_vertices(q, tpl, kernel));
}

FeatureExtractor::FeatureExtractor(std::shared_ptr<const Decoder> g, VarifoldKernel kernel)
    : g_(std::move(g)), kernel_(std::move(kernel)) {
    if (g_) {
        template_ = make_varifold_template(g_->decode(g_->neutral_code()), kernel_);
    }
}

Eigen::VectorXd FeatureExtractor::operator()(const TriMesh& q) const {
    if (!g_) throw std::runtime_error("feature extractor has no decoder");
    return feature_from_gradient(*g_, varifold_grad_at_template(q, template_, kernel_));
}

VariShapeModel::VariShapeModel(std::shared_ptr<const Decoder> g, std::shared_ptr<const Decoder> f,
                               VarifoldKernel kernel, Mlp net, Eigen::VectorXd feature_mean,
                               Eigen::VectorXd feature_std)
    : f_(std::move(f)), extractor_(std::move(g), std::move(kernel)), net_(std::move(net)),
      feature_mean_(std::move(feature_mean)), feature_std_(std::move(feature_std)) {
    if (net_.input_dim() != extractor_.g().latent_dim() ||
        net_.output_dim() != f_->latent_dim()) {
        throw std::runtime_error("varishape net widths do not match the decoders");
    }
    if (feature_mean_.size() != net_.input_dim() || feature_std_.size() != net_.input_dim()) {
        throw std::runtime_error("varishape normalization size mismatch");
    }
}

Eigen::VectorXd VariShapeModel::normalize(const Eigen::VectorXd& feature) const {
    return (feature - feature_mean_).cwiseQuotient(feature_std_);
}

Eigen::VectorXd VariShapeModel::retrieve_raw(const TriMesh& q) const {
    return net_.forward(normalize(extractor_(q)));
}

LatentCode VariShapeModel::retrieve(const TriMesh& q) const {
    return LatentCode::split(retrieve_raw(q), f_->pose_dim());
}

void VariShapeModel::save(const std::string& path) const {
    BinaryWriter writer(path);
    save_decoder(writer, extractor_.g());
    save_decoder(writer, *f_);
    Eigen::VectorXd sigmas(static_cast<Eigen::Index>(extractor_.kernel().sigmas.size()));
    Eigen::VectorXd weights(sigmas.size());
    for (Eigen::Index i = 0; i < sigmas.size(); ++i) {
        sigmas[i] = extractor_.kernel().sigmas[static_cast<size_t>(i)];
        weights[i] = extractor_.kernel().weights[static_cast<size_t>(i)];
    }
    writer.section("kernel/sigmas", sigmas);
    writer.section("kernel/weights", weights);
    writer.section("feature/mean", feature_mean_);
    writer.section("feature/std", feature_std_);
    save_mlp_sections(writer, net_);
}

VariShapeModel VariShapeModel::load(const std::string& path) {
    BinaryReader reader(path);
    std::shared_ptr<Decoder> g = load_decoder(reader);
    std::shared_ptr<Decoder> f = load_decoder(reader);
    const Eigen::VectorXd sigmas = reader.vector("kernel/sigmas");
    const Eigen::VectorXd weights = reader.vector("kernel/weights");
    VarifoldKernel kernel;
    for (Eigen::Index i = 0; i < sigmas.size(); ++i) {
        kernel.sigmas.push_back(sigmas[i]);
        kernel.weights.push_back(weights[i]);
    }
    Eigen::VectorXd mean = reader.vector("feature/mean");
    Eigen::VectorXd std = reader.vector("feature/std");
    Mlp net = load_mlp_sections(reader);
    return VariShapeModel(std::move(g), std::move(f), std::move(kernel), std::move(net),
                          std::move(mean), std::move(std));
}

VariShapeModel train_varishape(std::shared_ptr<const Decoder> g,
                               std::shared_ptr<const Decoder> f, const VarifoldKernel& kernel,
                               const Dataset& dataset, const VariShapeTrainConfig& config,
                               VariShapeHistory* history) {
    if (dataset.train_indices.empty()) throw std::runtime_error("varishape training set is empty");
    kernel.validate();

    const FeatureExtractor extractor(g, kernel);
    const int m = g->latent_dim();
    const int n = f->latent_dim();
    const int count = static_cast<int>(dataset.train_indices.size());

    // Features are the expensive part; extract once and cache.
    Eigen::MatrixXd features(m, count);
    Eigen::MatrixXd codes(n, count);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        const DatasetItem& item = dataset.items[static_cast<size_t>(dataset.train_indices[i])];
        features.col(i) = extractor(item.raw);
        codes.col(i) = item.code.concat();
    }

    Eigen::VectorXd mean = features.rowwise().mean();
    Eigen::VectorXd std_dev(m);
    for (int r = 0; r < m; ++r) {
        const double var = (features.row(r).array() - mean[r]).square().mean();
        std_dev[r] = std::max(std::sqrt(var), 1e-12);
    }
    Eigen::MatrixXd normalized = (features.colwise() - mean).array().colwise() / std_dev.array();

    std::vector<int> widths;
    widths.push_back(m);
    widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
    widths.push_back(n);
    Mlp net(widths, Rng(config.seed).substream("psi-init").next_u64());

    // Warm start: plain latent-code regression on the cached features.
    std::vector<double> warm;
    if (config.warm_epochs > 0) {
        warm = train_regression(net, normalized, codes, mse_loss, config.warm_epochs,
                                config.batch_size, Rng(config.seed).substream("warm").next_u64(),
                                config.warm_adam);
    }

    // Fine-tune on the end objective: vertex MSE against the registered
    // meshes, backpropagated through F's vjp.
    std::vector<double> fine;
    if (config.fine_epochs > 0) {
        AdamState optimizer(net, config.fine_adam);
        Mlp::Gradients grads = net.zero_gradients();
        std::vector<int> order(static_cast<size_t>(count));
        std::iota(order.begin(), order.end(), 0);
        const int batch = config.batch_size > 0 ? config.batch_size : count;
        const std::uint64_t fine_seed = Rng(config.seed).substream("fine").next_u64();

        for (int epoch = 0; epoch < config.fine_epochs; ++epoch) {
            Rng shuffle = Rng(fine_seed).substream("shuffle-" + std::to_string(epoch));
            for (int i = count - 1; i > 0; --i) {
                const int j = static_cast<int>(shuffle.below(static_cast<std::uint64_t>(i) + 1));
                std::swap(order[i], order[j]);
            }
            double epoch_loss = 0.0;
            int batches = 0;
            for (int start = 0; start < count; start += batch) {
                const int size = std::min(batch, count - start);
                Eigen::MatrixXd x(m, size);
                for (int k = 0; k < size; ++k) x.col(k) = normalized.col(order[start + k]);
                Mlp::Trace trace;
                const Eigen::MatrixXd pred = net.forward_batch(x, trace);

                Eigen::MatrixXd cotangent(n, size);
                double loss = 0.0;
                for (int k = 0; k < size; ++k) {
                    const DatasetItem& item =
                        dataset.items[static_cast<size_t>(dataset.train_indices[order[start + k]])];
                    const TriMesh decoded = f->decode(pred.col(k));
                    const int vcount = f->vertex_count();
                    std::vector<Eigen::Vector3d> residual(static_cast<size_t>(vcount));
                    double sample_loss = 0.0;
                    for (int v = 0; v < vcount; ++v) {
                        residual[static_cast<size_t>(v)] =
                            decoded.vertices[static_cast<size_t>(v)] -
                            item.registered.vertices[static_cast<size_t>(v)];
                        sample_loss += residual[static_cast<size_t>(v)].squaredNorm();
                    }
                    sample_loss /= vcount;
                    loss += sample_loss;
                    const double scale = 2.0 / (static_cast<double>(vcount) * size);
                    for (auto& r : residual) r *= scale;
                    cotangent.col(k) = f->vjp(pred.col(k), residual);
                }
                loss /= size;
                if (!std::isfinite(loss)) {
                    throw std::runtime_error("varishape fine-tune loss became non-finite");
                }
                grads.setZero();
                net.backward(trace, cotangent, grads);
                optimizer.step(net, grads);
                epoch_loss += loss;
                ++batches;
            }
            fine.push_back(epoch_loss / batches);
        }
    }

    if (history) {
        history->warm_loss = std::move(warm);
        history->fine_loss = std::move(fine);
    }
    return VariShapeModel(std::move(g), std::move(f), kernel, std::move(net), std::move(mean),
                          std::move(std_dev));
}

namespace {

struct Objective {
    const Decoder& f;
    const TriMesh& q;

    double eval(const Eigen::VectorXd& v, Eigen::VectorXd& grad) const {
        const TriMesh decoded = f.decode(v);
        const ChamferResult res = chamfer_sq_dist_grad(q, decoded);
        grad = f.vjp(v, res.grad_b);
        return res.value;
    }
};

} // namespace

ChamferSearchResult chamfer_search(const Decoder& f, const TriMesh& q,
                                   const Eigen::VectorXd& init, int iters) {
    if (init.size() != f.latent_dim()) throw std::runtime_error("chamfer_search init dim mismatch");
    const Objective objective{f, q};
    const auto start_time = std::chrono::steady_clock::now();

    constexpr int kHistory = 10;
    constexpr double kArmijo = 1e-4;

    double step_scale = 1.0;
    for (int restart = 0; restart < 3; ++restart) {
        Eigen::VectorXd x = init;
        Eigen::VectorXd grad;
        double fx = objective.eval(x, grad);
        if (!std::isfinite(fx) || !grad.allFinite()) {
            step_scale *= 0.1;
            continue;
        }

        ChamferSearchResult result;
        result.code = x;
        result.value = fx;

        std::vector<Eigen::VectorXd> s_hist, y_hist;
        bool failed = false;
        for (int iter = 0; iter < iters; ++iter) {
            // Two-loop recursion.
            Eigen::VectorXd direction = -grad;
            std::vector<double> alpha(s_hist.size());
            for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
                const double rho = 1.0 / y_hist[h].dot(s_hist[h]);
                alpha[h] = rho * s_hist[h].dot(direction);
                direction -= alpha[h] * y_hist[h];
            }
            if (!s_hist.empty()) {
                const auto& s = s_hist.back();
                const auto& y = y_hist.back();
                direction *= s.dot(y) / y.dot(y);
            }
            for (size_t h = 0; h < s_hist.size(); ++h) {
                const double rho = 1.0 / y_hist[h].dot(s_hist[h]);
                const double beta = rho * y_hist[h].dot(direction);
                direction += (alpha[h] - beta) * s_hist[h];
            }
            double slope = direction.dot(grad);
            if (!(slope < 0.0)) { // degenerate curvature: steepest descent
                direction = -grad;
                slope = -grad.squaredNorm();
                s_hist.clear();
                y_hist.clear();
            }
            if (grad.norm() < 1e-12) break;

            double t = s_hist.empty() ? step_scale / std::max(1.0, grad.norm()) : step_scale;
            Eigen::VectorXd x_new, g_new;
            double f_new = fx;
            bool accepted = false;
            for (int ls = 0; ls < 25; ++ls) {
                x_new = x + t * direction;
                f_new = objective.eval(x_new, g_new);
                if (std::isfinite(f_new) && g_new.allFinite() &&
                    f_new <= fx + kArmijo * t * slope) {
                    accepted = true;
                    break;
                }
                if (!std::isfinite(f_new) || !g_new.allFinite()) {
                    failed = true;
                    break;
                }
                t *= 0.5;
            }
            if (failed || !accepted) break;

            Eigen::VectorXd s = x_new - x;
            Eigen::VectorXd y = g_new - grad;
            if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
                s_hist.push_back(std::move(s));
                y_hist.push_back(std::move(y));
                if (static_cast<int>(s_hist.size()) > kHistory) {
                    s_hist.erase(s_hist.begin());
                    y_hist.erase(y_hist.begin());
                }
            }
            x = std::move(x_new);
            grad = std::move(g_new);
            fx = f_new;
            ++result.iterations;
            if (fx < result.value) {
                result.value = fx;
                result.code = x;
            }
        }
        if (!failed) {
            result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                           start_time)
                                 .count();
            return result;
        }
        step_scale *= 0.1;
    }
    throw std::runtime_error("chamfer_search: objective stayed non-finite after 3 restarts");
}

RetrievalMetrics evaluate(const VariShapeModel& model, const Dataset& dataset,
                          const std::vector<int>& indices) {
    if (indices.empty()) throw std::runtime_error("evaluate called with no indices");
    RetrievalMetrics metrics;
    const Decoder& f = model.f();
    double retrieval_seconds = 0.0;
    for (int index : indices) {
        const DatasetItem& item = dataset.items[static_cast<size_t>(index)];
        const auto t0 = std::chrono::steady_clock::now();
        const Eigen::VectorXd code = model.retrieve_raw(item.raw);
        retrieval_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const TriMesh recon = f.decode(code);

        double vertex_dist = 0.0;
        for (int v = 0; v < f.vertex_count(); ++v) {
            vertex_dist += (recon.vertices[static_cast<size_t>(v)] -
                            item.registered.vertices[static_cast<size_t>(v)])
                               .norm();
        }
        metrics.mean_vertex_dist += vertex_dist / f.vertex_count();
        metrics.chamfer_error += chamfer_sq_dist(item.raw, recon);
        const double varifold = varifold_sq_dist(item.raw, recon, model.extractor().kernel());
        metrics.varifold_error += varifold;
        metrics.varifold_error_normalized +=
            varifold / varifold_self_term(item.raw, model.extractor().kernel());
    }
    const double count = static_cast<double>(indices.size());
    metrics.mean_vertex_dist /= count;
    metrics.chamfer_error /= count;
    metrics.varifold_error /= count;
    metrics.varifold_error_normalized /= count;
    metrics.wall_time_per_1k = retrieval_seconds / count * 1000.0;
    return metrics;
}

} // namespace vmo
