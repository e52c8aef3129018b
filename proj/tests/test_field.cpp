#include <doctest.h>

#include <cstdio>
#include <random>

#include "ppsdf/field.hpp"
#include "support.hpp"

using namespace ppsdf;
using ppsdf::testing::random_weights;
using ppsdf::testing::unit_cube_config;

namespace {

Eigen::Vector3d random_point(std::mt19937_64& rng, int dim, double margin = 0.02) {
    std::uniform_real_distribution<double> uni(margin, 1.0 - margin);
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    for (int d = 0; d < dim; ++d) x(d) = uni(rng);
    return x;
}

}  // namespace

TEST_CASE("param_count formulas") {
    CHECK(param_count(unit_cube_config(3, 6, 3)) == 2744);
    CHECK(param_count(unit_cube_config(3, 4, 3)) == 1000);
    CHECK(param_count(unit_cube_config(3, 1, 1)) == 4);
}

TEST_CASE("features partition of unity and dimension") {
    for (int D : {1, 2, 3}) {
        const BasisConfig cfg = unit_cube_config(3, 3, D);
        FieldModel model(cfg, Eigen::VectorXd::Zero(param_count(cfg)),
                         Eigen::MatrixXd::Identity(param_count(cfg), param_count(cfg)));
        std::mt19937_64 rng(17 + D);
        for (int i = 0; i < 100; ++i) {
            const Eigen::Vector3d x = random_point(rng, D);
            const Eigen::RowVectorXd psi = model.features(x, {0, 0, 0});
            CHECK(psi.size() == param_count(cfg));
            CHECK(psi.sum() == doctest::Approx(1.0).epsilon(1e-12));
            std::array<int, 3> orders{0, 0, 0};
            orders[i % D] = 1;
            CHECK(model.features(x, orders).sum() == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("D=1 features reduce to the 1D basis") {
    const BasisConfig cfg = unit_cube_config(3, 4, 1);
    const long n = param_count(cfg);
    FieldModel model(cfg, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n));
    const Basis1D basis(3, 4, {0.0, 1.0});
    for (double x : {0.05, 0.37, 0.62, 0.99}) {
        const Eigen::RowVectorXd a = model.features({x, 0, 0}, {0, 0, 0});
        const Eigen::RowVectorXd b = basis.row(x, 0);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("constant weights give constant field, zero gradient and Hessian") {
    const BasisConfig cfg = unit_cube_config(3, 3, 3);
    const long n = param_count(cfg);
    const double c = -0.73;
    FieldModel model(cfg, Eigen::VectorXd::Constant(n, c), Eigen::MatrixXd::Identity(n, n));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const Eigen::Vector3d x = random_point(rng, 3);
        const QueryResult q = model.query(x);
        CHECK(q.distance == doctest::Approx(c).epsilon(1e-10));
        CHECK(q.gradient.norm() < 1e-8);
        CHECK(model.query_hessian(x).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("gradient and Hessian match finite differences") {
    for (int D : {2, 3}) {
        const BasisConfig cfg = unit_cube_config(3, 3, D);
        const long n = param_count(cfg);
        FieldModel model(cfg, random_weights(n, 41 + D), Eigen::MatrixXd::Identity(n, n));
        std::mt19937_64 rng(97 + D);
        const double h = 1e-6, hh = 1e-4;
        for (int i = 0; i < 100; ++i) {
            const Eigen::Vector3d x = random_point(rng, D);
            const QueryResult q = model.query(x);
            for (int d = 0; d < D; ++d) {
                Eigen::Vector3d xp = x, xm = x;
                xp(d) += h;
                xm(d) -= h;
                const double fd = (model.query(xp).distance - model.query(xm).distance) / (2 * h);
                CHECK(std::abs(q.gradient(d) - fd) <
                      1e-5 * std::max(1.0, std::abs(q.gradient(d))));
            }
            const Eigen::MatrixXd H = model.query_hessian(x);
            CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
            for (int a = 0; a < D; ++a)
                for (int b = 0; b < D; ++b) {
                    Eigen::Vector3d xp = x, xm = x;
                    xp(b) += hh;
                    xm(b) -= hh;
                    const double fd =
                        (model.query(xp).gradient(a) - model.query(xm).gradient(a)) / (2 * hh);
                    CHECK(std::abs(H(a, b) - fd) < 1e-4 * std::max(1.0, std::abs(H(a, b))));
                }
        }
    }
}

TEST_CASE("spherical prior approximates the sphere SDF") {
    const BasisConfig cfg = unit_cube_config(3, 4, 3);
    const Eigen::Vector3d center(0.5, 0.5, 0.5);
    const double radius = 0.3, rho = 100.0;
    const FieldModel model = init_spherical_prior(cfg, center, radius, rho);

    CHECK(model.query(center).distance == doctest::Approx(-radius).epsilon(0.05));
    CHECK(std::abs(model.query(center + Eigen::Vector3d(radius, 0, 0)).distance) < 1e-2);

    // Gradient points radially outward away from the surface.
    const Eigen::Vector3d p(0.85, 0.6, 0.55);
    const Eigen::Vector3d g = model.query(p).gradient.normalized();
    const Eigen::Vector3d expect = (p - center).normalized();
    CHECK(1.0 - g.dot(expect) < 1e-2);

    // P0 is exactly rho * I.
    CHECK((model.precision() -
           rho * Eigen::MatrixXd::Identity(model.num_params(), model.num_params()))
              .cwiseAbs()
              .maxCoeff() == 0.0);

    CHECK_THROWS(init_spherical_prior(cfg, center, -0.1, rho));
    CHECK_THROWS(init_spherical_prior(cfg, {25.0, 25.0, 25.0}, 0.3, rho));
}

TEST_CASE("model state holds exactly weights plus precision") {
    const BasisConfig cfg = unit_cube_config(3, 2, 2);
    const long n = param_count(cfg);
    FieldModel model(cfg, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n));
    CHECK(model.state_size() == n + n * n);
}

TEST_CASE("snapshot round-trip is bit-exact") {
    const BasisConfig cfg = unit_cube_config(3, 2, 3);
    const long n = param_count(cfg);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) * 3.7;
    P(1, 2) = P(2, 1) = 0.25;
    FieldModel model(cfg, random_weights(n, 77), P);

    const std::string path = "snapshot_test.ppsdf";
    const WorldMapping mapping{2.5, {0.1, -0.2, 0.3}};
    save_model(model, path, mapping);
    WorldMapping back;
    const FieldModel loaded = load_model(path, &back);
    std::remove(path.c_str());

    CHECK(loaded.config().segments == cfg.segments);
    CHECK(back.scale == mapping.scale);
    CHECK(back.offset == mapping.offset);
    CHECK((loaded.weights() - model.weights()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.precision() - model.precision()).cwiseAbs().maxCoeff() == 0.0);
}
