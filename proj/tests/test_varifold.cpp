#include "varimotion/varifold.hpp"

#include "test_util.hpp"
#include "varimotion/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace vmo;
using namespace vmo::testutil;

namespace {

TriMesh single_triangle(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                        const Eigen::Vector3d& c) {
    TriMesh mesh;
    mesh.vertices = {a, b, c};
    mesh.faces = {{0, 1, 2}};
    return mesh;
}

// Central finite differences of varifold_sq_dist with respect to var's
// vertices.
std::vector<Eigen::Vector3d> fd_gradient(const TriMesh& fixed, TriMesh var,
                                         const VarifoldKernel& kernel, double h) {
    std::vector<Eigen::Vector3d> grad(var.vertices.size());
    for (size_t v = 0; v < var.vertices.size(); ++v) {
        for (int k = 0; k < 3; ++k) {
            const double saved = var.vertices[v][k];
            var.vertices[v][k] = saved + h;
            const double plus = varifold_sq_dist(fixed, var, kernel);
            var.vertices[v][k] = saved - h;
            const double minus = varifold_sq_dist(fixed, var, kernel);
            var.vertices[v][k] = saved;
            grad[v][k] = (plus - minus) / (2.0 * h);
        }
    }
    return grad;
}

} // namespace

TEST_CASE("self distance vanishes relative to the self term") {
    Rng rng(5);
    const TriMesh mesh = random_mesh(rng, 40);
    const VarifoldKernel kernel = VarifoldKernel::single(0.4);
    const double self = varifold_self_term(mesh, kernel);
    CHECK(varifold_sq_dist(mesh, mesh, kernel) <= 1e-9 * self);
}

TEST_CASE("varifold distance is symmetric, exactly") {
    Rng rng(6);
    const TriMesh a = random_mesh(rng, 23);
    const TriMesh b = random_mesh(rng, 31);
    const VarifoldKernel kernel = VarifoldKernel::single(0.5);
    CHECK(varifold_sq_dist(a, b, kernel) == varifold_sq_dist(b, a, kernel));
}

TEST_CASE("single-triangle pair matches a hand evaluation of the formula") {
    const TriMesh a = single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const TriMesh b = single_triangle({0.3, 0.1, 0.5}, {1.1, 0.2, 0.6}, {0.2, 0.9, 0.8});
    const double sigma = 0.7;

    // Hand evaluation: centers, area normals, and the three kernel terms.
    const Eigen::Vector3d ca = (a.vertices[0] + a.vertices[1] + a.vertices[2]) / 3.0;
    const Eigen::Vector3d cb = (b.vertices[0] + b.vertices[1] + b.vertices[2]) / 3.0;
    const Eigen::Vector3d na =
        0.5 * (a.vertices[1] - a.vertices[0]).cross(a.vertices[2] - a.vertices[0]);
    const Eigen::Vector3d nb =
        0.5 * (b.vertices[1] - b.vertices[0]).cross(b.vertices[2] - b.vertices[0]);
    auto term = [&](const Eigen::Vector3d& c1, const Eigen::Vector3d& n1,
                    const Eigen::Vector3d& c2, const Eigen::Vector3d& n2) {
        const double rho = std::exp(-(c1 - c2).squaredNorm() / (2.0 * sigma * sigma));
        const double dot = n1.dot(n2);
        return rho * dot * dot / (n1.norm() * n2.norm());
    };
    const double expected =
        term(ca, na, ca, na) + term(cb, nb, cb, nb) - 2.0 * term(ca, na, cb, nb);

    const double actual = varifold_sq_dist(a, b, VarifoldKernel::single(sigma));
    CHECK(std::abs(actual - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
}

TEST_CASE("multi-scale kernel is the weighted sum of single scales") {
    Rng rng(8);
    const TriMesh a = random_mesh(rng, 12);
    const TriMesh b = random_mesh(rng, 15);
    VarifoldKernel multi;
    multi.sigmas = {0.3, 0.9};
    multi.weights = {1.0, 2.5};
    const VarifoldTerms t = varifold_terms(a, b, multi);
    const VarifoldTerms t1 = varifold_terms(a, b, VarifoldKernel::single(0.3));
    const VarifoldTerms t2 = varifold_terms(a, b, VarifoldKernel::single(0.9));
    CHECK(t.cross == doctest::Approx(t1.cross + 2.5 * t2.cross).epsilon(1e-12));
    CHECK(t.self_a == doctest::Approx(t1.self_a + 2.5 * t2.self_a).epsilon(1e-12));
}

TEST_CASE("degenerate mesh raises an error") {
    TriMesh degenerate = single_triangle({0, 0, 0}, {0, 0, 0}, {1, 1, 1});
    const TriMesh ok = single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    CHECK_THROWS_WITH_AS(varifold_sq_dist(degenerate, ok, VarifoldKernel::single(1.0)),
                         "degenerate mesh", std::runtime_error);
}

TEST_CASE("invalid faces are excluded rather than poisoning the sum") {
    Rng rng(9);
    TriMesh a = random_mesh(rng, 10);
    const TriMesh b = random_mesh(rng, 10);
    const VarifoldKernel kernel = VarifoldKernel::single(0.5);
    const double clean = varifold_sq_dist(a, b, kernel);
    // Append a zero-area face.
    a.faces.push_back({0, 0, 1});
    CHECK(varifold_sq_dist(a, b, kernel) == doctest::Approx(clean).epsilon(1e-14));
}

TEST_CASE("gradient at the minimum is numerically zero") {
    Rng rng(10);
    const TriMesh mesh = random_mesh(rng, 20);
    const VarifoldKernel kernel = VarifoldKernel::single(0.5);
    const auto grad = varifold_grad_vertices(mesh, mesh, kernel);
    const double scale = bbox_diagonal(mesh);
    for (const auto& g : grad) CHECK(g.norm() < 1e-6 * scale);
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(11);
    const TriMesh fixed = random_mesh(rng, 50);
    const TriMesh var = random_mesh(rng, 50);
    const VarifoldKernel kernel = VarifoldKernel::single(0.6);
    const auto grad = varifold_grad_vertices(fixed, var, kernel);
    const auto fd = fd_gradient(fixed, var, kernel, 1e-5 * bbox_diagonal(var));
    CHECK(rel_l2(fd, grad) < 1e-4);
}

TEST_CASE("gradient field is robust to remeshing the fixed side") {
    const TriMesh fixed = sphere_mesh(3);
    const TriMesh var = sphere_mesh(2, 1.1);
    const VarifoldKernel kernel = VarifoldKernel::single(0.3 * bbox_diagonal(var));
    const auto grad = varifold_grad_vertices(fixed, var, kernel);
    const auto grad_fine = varifold_grad_vertices(midpoint_subdivide(fixed), var, kernel);
    double num = 0.0, den = 0.0;
    for (size_t v = 0; v < grad.size(); ++v) {
        num += (grad[v] - grad_fine[v]).squaredNorm();
        den += grad[v].squaredNorm();
    }
    CHECK(std::sqrt(num / den) < 0.05);
}

TEST_CASE("remeshing quasi-invariance of the distance itself") {
    const TriMesh mesh = sphere_mesh(3); // 512 faces
    REQUIRE(mesh.face_count() >= 500);
    const VarifoldKernel kernel = VarifoldKernel::single(0.15 * bbox_diagonal(mesh));
    const double to_remesh = varifold_sq_dist(mesh, midpoint_subdivide(mesh), kernel);
    const double to_shifted =
        varifold_sq_dist(mesh, translated(mesh, {0.1 * bbox_diagonal(mesh), 0, 0}), kernel);
    CHECK(std::abs(to_remesh) <= 1e-3 * to_shifted);
}

TEST_CASE("flipping a face orientation leaves the distance unchanged") {
    Rng rng(13);
    const TriMesh a = random_mesh(rng, 15);
    TriMesh b = random_mesh(rng, 15);
    const VarifoldKernel kernel = VarifoldKernel::single(0.5);
    const double before = varifold_sq_dist(a, b, kernel);
    std::swap(b.faces[4][1], b.faces[4][2]);
    CHECK(varifold_sq_dist(a, b, kernel) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("rigid rotation of both meshes rotates the gradient") {
    Rng rng(14);
    const TriMesh fixed = random_mesh(rng, 18);
    const TriMesh var = random_mesh(rng, 18);
    const VarifoldKernel kernel = VarifoldKernel::single(0.5);
    const Eigen::Matrix3d rot = rotation_xyz(0.3, -0.7, 1.1);
    const auto grad = varifold_grad_vertices(fixed, var, kernel);
    const auto grad_rot = varifold_grad_vertices(rotated(fixed, rot), rotated(var, rot), kernel);
    for (size_t v = 0; v < grad.size(); ++v) {
        CHECK((grad_rot[v] - rot * grad[v]).norm() < 1e-9 * (1.0 + grad[v].norm()));
    }
}

TEST_CASE("template fast path equals the generic gradient") {
    Rng rng(15);
    const TriMesh query = random_mesh(rng, 25);
    const TriMesh tpl_mesh = random_mesh(rng, 30);
    const VarifoldKernel kernel = VarifoldKernel::single(0.5);
    const VarifoldTemplate tpl = make_varifold_template(tpl_mesh, kernel);
    const auto fast = varifold_grad_at_template(query, tpl, kernel);
    const auto slow = varifold_grad_vertices(query, tpl_mesh, kernel);
    REQUIRE(fast.size() == slow.size());
    for (size_t v = 0; v < fast.size(); ++v) CHECK((fast[v] - slow[v]).norm() < 1e-12);
}

TEST_CASE("chamfer: identical vertex sets give zero") {
    Rng rng(16);
    const TriMesh mesh = random_mesh(rng, 10);
    CHECK(chamfer_sq_dist(mesh, mesh) == 0.0);
}

TEST_CASE("chamfer: two single points at distance 2 give 8") {
    TriMesh a, b;
    a.vertices = {{0, 0, 0}};
    a.faces = {{0, 0, 0}};
    b.vertices = {{2, 0, 0}};
    b.faces = {{0, 0, 0}};
    CHECK(chamfer_sq_dist(a, b) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("chamfer matches an independent all-pairs oracle") {
    Rng rng(17);
    TriMesh a, b;
    for (int i = 0; i < 100; ++i) {
        a.vertices.emplace_back(rng.normal(), rng.normal(), rng.normal());
        b.vertices.push_back(a.vertices.back() + Eigen::Vector3d(0.3, -0.1, 0.2));
    }
    a.faces = {{0, 1, 2}};
    b.faces = {{0, 1, 2}};

    auto one_way = [](const TriMesh& from, const TriMesh& to) {
        double total = 0.0;
        for (const auto& p : from.vertices) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to.vertices) best = std::min(best, (p - q).squaredNorm());
            total += best;
        }
        return total / static_cast<double>(from.vertices.size());
    };
    CHECK(chamfer_sq_dist(a, b) == one_way(a, b) + one_way(b, a));
}

TEST_CASE("chamfer gradient matches finite differences away from ties") {
    Rng rng(18);
    TriMesh a, b;
    for (int i = 0; i < 20; ++i) {
        a.vertices.emplace_back(rng.normal(), rng.normal(), rng.normal());
        b.vertices.emplace_back(rng.normal(), rng.normal(), rng.normal());
    }
    a.faces = {{0, 1, 2}};
    b.faces = {{0, 1, 2}};
    const ChamferResult res = chamfer_sq_dist_grad(a, b);
    CHECK(res.value == doctest::Approx(chamfer_sq_dist(a, b)).epsilon(1e-14));
    const double h = 1e-6;
    std::vector<Eigen::Vector3d> fd(b.vertices.size());
    for (size_t v = 0; v < b.vertices.size(); ++v) {
        for (int k = 0; k < 3; ++k) {
            const double saved = b.vertices[v][k];
            b.vertices[v][k] = saved + h;
            const double plus = chamfer_sq_dist(a, b);
            b.vertices[v][k] = saved - h;
            const double minus = chamfer_sq_dist(a, b);
            b.vertices[v][k] = saved;
            fd[v][k] = (plus - minus) / (2.0 * h);
        }
    }
    CHECK(rel_l2(fd, res.grad_b) < 1e-4);
}

TEST_CASE("kernel validation rejects bad parameters") {
    VarifoldKernel kernel;
    CHECK_THROWS_AS(kernel.validate(), std::runtime_error);
    kernel.sigmas = {0.5, -1.0};
    kernel.weights = {1.0, 1.0};
    CHECK_THROWS_AS(kernel.validate(), std::runtime_error);
    kernel.sigmas = {0.5};
    CHECK_THROWS_AS(kernel.validate(), std::runtime_error);
}
