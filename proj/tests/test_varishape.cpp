#include "varimotion/varishape.hpp"

#include "test_util.hpp"
#include "varimotion/rng.hpp"
#include "varimotion/skinned_body.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <memory>

using namespace vmo;
using namespace vmo::testutil;

namespace {

std::shared_ptr<const SkinnedBody> small_body() {
    SkinnedBody::Config cfg;
    cfg.rings = 4;
    cfg.segments = 6;
    return std::make_shared<const SkinnedBody>(SkinnedBody::build(cfg));
}

VarifoldKernel body_kernel(const Decoder& body) {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(body.latent_dim());
    zero.tail(SkinnedBody::kShapeDim).setOnes();
    return VarifoldKernel::single(0.15 * bbox_diagonal(body.decode(zero)));
}

Eigen::VectorXd unit_code(const Decoder& body) {
    Eigen::VectorXd code = Eigen::VectorXd::Zero(body.latent_dim());
    code.tail(SkinnedBody::kShapeDim).setOnes();
    return code;
}

} // namespace

TEST_CASE("feature of the template against itself is numerically zero") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    // When q is the template itself, the neutral code minimizes the distance,
    // so the gradient (= the feature) vanishes there.
    const TriMesh tpl = body->decode(body->neutral_code());
    const Eigen::VectorXd feature = extract_feature(tpl, *body, kernel);
    REQUIRE(feature.size() == body->latent_dim());
    Eigen::VectorXd bent = body->neutral_code();
    bent[3 * kShoulderL] = 0.5;
    const Eigen::VectorXd other = extract_feature(body->decode(bent), *body, kernel);
    CHECK(feature.norm() < 1e-6 * other.norm());
}

TEST_CASE("feature matches finite differences of the varifold objective") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    Rng rng(70);
    Eigen::VectorXd query_code = unit_code(*body);
    for (int i = 0; i < SkinnedBody::kPoseDim; ++i) query_code[i] = 0.3 * rng.normal();
    const TriMesh q = body->decode(query_code);

    const Eigen::VectorXd feature = extract_feature(q, *body, kernel);
    auto objective = [&](const Eigen::VectorXd& z) {
        return varifold_sq_dist(q, body->decode(z), kernel);
    };
    const Eigen::VectorXd neutral = body->neutral_code();
    const double h = 1e-6;
    for (int i = 0; i < body->latent_dim(); i += 11) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(body->latent_dim());
        e[i] = h;
        const double fd = (objective(neutral + e) - objective(neutral - e)) / (2.0 * h);
        CHECK(std::abs(fd - feature[i]) < 1e-4 * (1.0 + std::abs(fd)));
    }
}

TEST_CASE("feature is stable under remeshing of the query") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    Rng rng(71);
    Eigen::VectorXd code = unit_code(*body);
    for (int i = 0; i < SkinnedBody::kPoseDim; ++i) code[i] = 0.25 * rng.normal();
    const TriMesh q = body->decode(code);
    const TriMesh q_fine = midpoint_subdivide(q);

    const FeatureExtractor extractor(body, kernel);
    const Eigen::VectorXd f_coarse = extractor(q);
    const Eigen::VectorXd f_fine = extractor(q_fine);
    CHECK((f_coarse - f_fine).norm() < 0.05 * f_coarse.norm());
}

TEST_CASE("extractor fast path equals the slow path") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    const FeatureExtractor extractor(body, kernel);
    const TriMesh q = body->decode(unit_code(*body));
    const Eigen::VectorXd fast = extractor(q);
    const Eigen::VectorXd slow = extract_feature(q, *body, kernel);
    CHECK((fast - slow).norm() < 1e-12 * (1.0 + slow.norm()));
}

TEST_CASE("training overfits a small dataset and retrieval is deterministic") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    DatasetConfig dc;
    dc.count = 10;
    dc.frames_per_sequence = 5;
    const Dataset ds = make_dataset(*body, dc, 77);

    VariShapeTrainConfig tc;
    tc.hidden = {64, 64};
    tc.warm_epochs = 400;
    tc.fine_epochs = 0;
    tc.batch_size = 8;
    tc.seed = 5;
    VariShapeHistory history;
    const VariShapeModel model = train_varishape(body, body, kernel, ds, tc, &history);

    REQUIRE(history.warm_loss.size() == 400);
    CHECK(history.warm_loss.back() < 0.05 * history.warm_loss.front());

    // Overfit check: training meshes come back close in vertex space.
    double worst = 0.0;
    for (int idx : ds.train_indices) {
        const DatasetItem& item = ds.items[static_cast<size_t>(idx)];
        const TriMesh recon = body->decode(model.retrieve_raw(item.raw));
        double mean_dist = 0.0;
        for (int v = 0; v < recon.vertex_count(); ++v) {
            mean_dist += (recon.vertices[v] - item.registered.vertices[v]).norm();
        }
        worst = std::max(worst, mean_dist / recon.vertex_count());
    }
    CHECK(worst < 0.15 * bbox_diagonal(ds.items[0].registered));

    // Determinism of retrieval.
    const Eigen::VectorXd a = model.retrieve_raw(ds.items[0].raw);
    const Eigen::VectorXd b = model.retrieve_raw(ds.items[0].raw);
    CHECK(a == b);

    // retrieve() splits into pose and shape blocks.
    const LatentCode code = model.retrieve(ds.items[0].raw);
    CHECK(code.pose.size() == SkinnedBody::kPoseDim);
    CHECK(code.shape.size() == SkinnedBody::kShapeDim);

    // Fine-tuning from this warm start does not blow up the solution.
    VariShapeTrainConfig ft = tc;
    ft.warm_epochs = 50;
    ft.fine_epochs = 2;
    VariShapeHistory fh;
    const VariShapeModel fine = train_varishape(body, body, kernel, ds, ft, &fh);
    REQUIRE(fh.fine_loss.size() == 2);
    CHECK(std::isfinite(fh.fine_loss.back()));
    CHECK(fh.fine_loss.back() <= fh.fine_loss.front() * 1.5);
}

TEST_CASE("training is deterministic per seed") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    DatasetConfig dc;
    dc.count = 10;
    dc.frames_per_sequence = 5;
    const Dataset ds = make_dataset(*body, dc, 78);

    VariShapeTrainConfig tc;
    tc.hidden = {32};
    tc.warm_epochs = 10;
    tc.fine_epochs = 1;
    tc.batch_size = 4;
    tc.seed = 3;
    VariShapeHistory ha, hb;
    train_varishape(body, body, kernel, ds, tc, &ha);
    train_varishape(body, body, kernel, ds, tc, &hb);
    CHECK(ha.warm_loss == hb.warm_loss);
    CHECK(ha.fine_loss == hb.fine_loss);
}

TEST_CASE("bundle round trips through disk with identical outputs") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    DatasetConfig dc;
    dc.count = 10;
    dc.frames_per_sequence = 5;
    const Dataset ds = make_dataset(*body, dc, 79);
    VariShapeTrainConfig tc;
    tc.hidden = {32};
    tc.warm_epochs = 5;
    tc.fine_epochs = 0;
    tc.batch_size = 4;
    const VariShapeModel model = train_varishape(body, body, kernel, ds, tc);

    const auto path = std::filesystem::temp_directory_path() / "vmo_varishape_bundle.bin";
    model.save(path.string());
    const VariShapeModel loaded = VariShapeModel::load(path.string());
    const Eigen::VectorXd a = model.retrieve_raw(ds.items[0].raw);
    const Eigen::VectorXd b = loaded.retrieve_raw(ds.items[0].raw);
    CHECK(a == b);
    std::filesystem::remove(path);
}

TEST_CASE("chamfer_search on the decoder's own output recovers a near-zero objective") {
    const auto body = small_body();
    Rng rng(72);
    Eigen::VectorXd code = unit_code(*body);
    for (int i = 0; i < SkinnedBody::kPoseDim; ++i) code[i] = 0.2 * rng.normal();
    const TriMesh q = body->decode(code);

    // Start from the rest pose; the optimum value is 0 at the true code.
    const ChamferSearchResult res = chamfer_search(*body, q, unit_code(*body), 60);
    const double init_value = chamfer_sq_dist(q, body->decode(unit_code(*body)));
    CHECK(res.value < 0.2 * init_value);
    CHECK(res.value == chamfer_sq_dist(q, body->decode(res.code)));
    CHECK(res.iterations > 0);
    CHECK(res.seconds >= 0.0);
}

TEST_CASE("chamfer_search at the optimum stays put") {
    const auto body = small_body();
    const TriMesh q = body->decode(unit_code(*body));
    const ChamferSearchResult res = chamfer_search(*body, q, unit_code(*body), 10);
    CHECK(res.value <= chamfer_sq_dist(q, body->decode(unit_code(*body))) + 1e-15);
}

TEST_CASE("evaluate reports finite, self-consistent metrics") {
    const auto body = small_body();
    const VarifoldKernel kernel = body_kernel(*body);
    DatasetConfig dc;
    dc.count = 10;
    dc.frames_per_sequence = 5;
    const Dataset ds = make_dataset(*body, dc, 80);
    VariShapeTrainConfig tc;
    tc.hidden = {32};
    tc.warm_epochs = 30;
    tc.fine_epochs = 0;
    tc.batch_size = 4;
    const VariShapeModel model = train_varishape(body, body, kernel, ds, tc);

    const RetrievalMetrics metrics = evaluate(model, ds, ds.test_indices);
    CHECK(std::isfinite(metrics.mean_vertex_dist));
    CHECK(metrics.mean_vertex_dist > 0.0);
    CHECK(metrics.chamfer_error >= 0.0);
    CHECK(metrics.varifold_error >= 0.0);
    CHECK(metrics.varifold_error_normalized <= metrics.varifold_error / 1e-12 + 1.0);
    CHECK(metrics.wall_time_per_1k > 0.0);
}
