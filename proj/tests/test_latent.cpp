#include "varimotion/latent.hpp"

#include "test_util.hpp"
#include "varimotion/binio.hpp"
#include "varimotion/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace vmo;
using namespace vmo::testutil;

TEST_CASE("wrap_angle maps into [-pi, pi]") {
    constexpr double pi = std::numbers::pi;
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(0.5) == 0.5);
    CHECK(wrap_angle(pi + 0.1) == doctest::Approx(-pi + 0.1).epsilon(1e-12));
    CHECK(wrap_angle(-pi - 0.1) == doctest::Approx(pi - 0.1).epsilon(1e-12));
    CHECK(wrap_angle(4.0 * pi + 0.2) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(wrap_angle(1e6)) <= pi + 1e-9);
}

TEST_CASE("latent code wraps pose but not shape, and round trips concat/split") {
    Eigen::VectorXd pose(2), shape(2);
    pose << 7.0, -7.0;
    shape << 7.0, 0.2;
    const LatentCode code(pose, shape);
    CHECK(std::abs(code.pose[0]) <= std::numbers::pi);
    CHECK(code.shape[0] == 7.0); // shape multipliers are not angles
    const LatentCode back = LatentCode::split(code.concat(), 2);
    CHECK(back.pose == code.pose);
    CHECK(back.shape == code.shape);
    CHECK(code.dim() == 4);
}

TEST_CASE("flatten/unflatten invert each other") {
    Rng rng(20);
    const TriMesh mesh = random_mesh(rng, 8);
    const Eigen::VectorXd flat = flatten_vertices(mesh);
    REQUIRE(flat.size() == 3 * mesh.vertex_count());
    CHECK(flat[3 * 5 + 1] == mesh.vertices[5][1]);
    const TriMesh back = unflatten_vertices(flat, mesh.faces);
    for (int v = 0; v < mesh.vertex_count(); ++v) CHECK(back.vertices[v] == mesh.vertices[v]);
    CHECK(back.faces == mesh.faces);
}

TEST_CASE("affine decoder is mean + basis * code with exact vjp transpose") {
    Rng rng(21);
    const TriMesh base = random_mesh(rng, 6);
    const int n = 3 * base.vertex_count();
    Eigen::VectorXd mean(n);
    Eigen::MatrixXd basis(n, 4);
    for (int i = 0; i < n; ++i) mean[i] = rng.normal();
    for (int i = 0; i < basis.size(); ++i) basis.data()[i] = rng.normal();
    const AffineDecoder dec(mean, basis, base.faces);

    Eigen::VectorXd code(4);
    code << 0.3, -1.2, 0.0, 2.0;
    const TriMesh out = dec.decode(code);
    const Eigen::VectorXd expected = mean + basis * code;
    CHECK((flatten_vertices(out) - expected).norm() < 1e-13 * expected.norm());

    std::vector<Eigen::Vector3d> cot(base.vertex_count());
    Eigen::VectorXd cot_flat(n);
    for (int i = 0; i < n; ++i) cot_flat[i] = rng.normal();
    for (int v = 0; v < base.vertex_count(); ++v) cot[v] = cot_flat.segment<3>(3 * v);
    const Eigen::VectorXd vjp = dec.vjp(code, cot);
    CHECK((vjp - basis.transpose() * cot_flat).norm() < 1e-13 * vjp.norm());
}

TEST_CASE("fit_affine recovers a planted low-rank dataset") {
    Rng rng(22);
    const TriMesh base = sphere_mesh(1);
    const int n = 3 * base.vertex_count();
    Eigen::VectorXd mean = flatten_vertices(base);
    Eigen::MatrixXd directions(n, 3);
    for (int i = 0; i < directions.size(); ++i) directions.data()[i] = rng.normal();

    std::vector<TriMesh> meshes;
    for (int s = 0; s < 30; ++s) {
        Eigen::Vector3d c(rng.normal(), 0.5 * rng.normal(), 0.1 * rng.normal());
        meshes.push_back(unflatten_vertices(mean + directions * c, base.faces));
    }

    const AffineFit fit = fit_affine(meshes, 3);
    CHECK(fit.decoder.latent_dim() == 3);
    // Components are orthonormal.
    const Eigen::MatrixXd gram =
        fit.decoder.basis().transpose() * fit.decoder.basis();
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
    // Explained variance fractions are sorted and nearly exhaustive.
    CHECK(fit.explained_variance.size() == 3);
    CHECK(fit.explained_variance.sum() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(fit.explained_variance[0] >= fit.explained_variance[1]);
    // Every training mesh reconstructs through the 3D code.
    for (const TriMesh& m : meshes) {
        const Eigen::VectorXd x = flatten_vertices(m);
        const Eigen::VectorXd code =
            fit.decoder.basis().transpose() * (x - fit.decoder.mean());
        const TriMesh recon = fit.decoder.decode(code);
        CHECK((flatten_vertices(recon) - x).norm() < 1e-8 * (1.0 + x.norm()));
    }
}

TEST_CASE("fit_affine rejects rank-deficient requests") {
    const TriMesh base = sphere_mesh(0);
    std::vector<TriMesh> meshes = {base, base, base};
    CHECK_THROWS_AS(fit_affine(meshes, 2), std::runtime_error);
}

TEST_CASE("fit_affine rejects inconsistent topology") {
    std::vector<TriMesh> meshes = {sphere_mesh(0), sphere_mesh(1)};
    CHECK_THROWS_AS(fit_affine(meshes, 1), std::runtime_error);
}

TEST_CASE("affine decoder round trips through sections bit-exactly") {
    Rng rng(23);
    const TriMesh base = random_mesh(rng, 5);
    const int n = 3 * base.vertex_count();
    Eigen::VectorXd mean(n);
    Eigen::MatrixXd basis(n, 2);
    for (int i = 0; i < n; ++i) mean[i] = rng.normal();
    for (int i = 0; i < basis.size(); ++i) basis.data()[i] = rng.normal();
    const AffineDecoder dec(mean, basis, base.faces);

    const auto path = std::filesystem::temp_directory_path() / "vmo_affine_roundtrip.bin";
    {
        BinaryWriter writer(path.string());
        dec.save_sections(writer);
    }
    BinaryReader reader(path.string());
    const AffineDecoder loaded = AffineDecoder::load_sections(reader);
    CHECK(loaded.mean() == dec.mean());
    CHECK(loaded.basis() == dec.basis());
    CHECK(loaded.faces() == dec.faces());
    std::filesystem::remove(path);
}
