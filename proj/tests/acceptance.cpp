// Acceptance suite: one self-contained check per release criterion,
// each reporting a single PASS/FAIL line. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "ppsdf/field.hpp"
#include "ppsdf/ingest.hpp"
#include "ppsdf/oracle.hpp"
#include "ppsdf/recon.hpp"
#include "ppsdf/solver.hpp"
#include "ppsdf/survey.hpp"
#include "support.hpp"

using namespace ppsdf;
using ppsdf::testing::box_mesh;
using ppsdf::testing::icosphere;
using ppsdf::testing::sphere_samples;
using ppsdf::testing::unit_cube_config;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %-38s %s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void run(int number, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [ok, detail] = body();
        report(number, name, ok, detail);
    } catch (const std::exception& e) {
        report(number, name, false, std::string("exception: ") + e.what());
    }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

RegularizerSpec default_spec(double ray_extent) {
    RegularizerSpec spec;
    spec.ray_extent = ray_extent;
    return spec;
}

FieldModel flat_prior(const BasisConfig& cfg, double rho = 100.0) {
    const long n = param_count(cfg);
    return FieldModel(cfg, Eigen::VectorXd::Zero(n),
                      rho * Eigen::MatrixXd::Identity(n, n));
}

/// Sphere model shared by the reconstruction, timing, and grid criteria:
/// 800 analytic samples on a radius-0.3 sphere, S=4, wrong-radius prior.
const FieldModel& fitted_sphere_model() {
    static const FieldModel model = [] {
        const BasisConfig cfg = unit_cube_config(3, 4, 3);
        const FieldModel prior =
            init_spherical_prior(cfg, {0.5, 0.5, 0.5}, 0.15, 100.0);
        const auto samples = sphere_samples({0.5, 0.5, 0.5}, 0.3, 800, 3, 2024);
        // Auto ray extent: tension control points must reach the domain
        // corners or the flattened far field can dip through zero there.
        return batch_fit(samples, default_spec(0.0), prior);
    }();
    return model;
}

}  // namespace

int main() {
    run(1, "parameter count", []() -> std::pair<bool, std::string> {
        const long a = param_count(unit_cube_config(3, 6, 3));
        const long b = param_count(unit_cube_config(3, 4, 3));
        return {a == 2744 && b == 1000,
                "S=6: " + std::to_string(a) + ", S=4: " + std::to_string(b)};
    });

    run(2, "incremental equals batch solve", []() -> std::pair<bool, std::string> {
        const BasisConfig cfg = unit_cube_config(3, 2, 2);
        const FieldModel prior = flat_prior(cfg);
        const RegularizerSpec spec = default_spec(0.3);
        const auto samples = sphere_samples({0.5, 0.5, 0.0}, 0.3, 200, 2, 7);

        const FieldModel batch = batch_fit(samples, spec, prior);
        const double wnorm = batch.weights().norm();

        FieldModel seq = prior;
        for (const auto& s : samples) ingest(seq, {s}, spec);
        const double err_seq = (seq.weights() - batch.weights()).norm() / wnorm;

        std::vector<SurfaceSample> perm = samples;
        std::shuffle(perm.begin(), perm.end(), std::mt19937_64(1));
        FieldModel shuf = prior;
        for (const auto& s : perm) ingest(shuf, {s}, spec);
        const double err_perm = (shuf.weights() - batch.weights()).norm() / wnorm;

        return {err_seq < 1e-6 && err_perm < 1e-6,
                "rel err sequential " + fmt(err_seq) + ", permuted " + fmt(err_perm)};
    });

    run(3, "gradients and Hessians vs finite diff", []() -> std::pair<bool, std::string> {
        double worst_g = 0, worst_h = 0;
        for (int D : {2, 3}) {
            const BasisConfig cfg = unit_cube_config(3, 3, D);
            const long n = param_count(cfg);
            const FieldModel model(cfg, ppsdf::testing::random_weights(n, 100 + D),
                                   Eigen::MatrixXd::Identity(n, n));
            std::mt19937_64 rng(200 + D);
            std::uniform_real_distribution<double> uni(0.02, 0.98);
            for (int i = 0; i < 100; ++i) {
                Eigen::Vector3d x = Eigen::Vector3d::Zero();
                for (int d = 0; d < D; ++d) x(d) = uni(rng);
                const QueryResult q = model.query(x);
                const double h = 1e-6, hh = 1e-4;
                for (int d = 0; d < D; ++d) {
                    Eigen::Vector3d xp = x, xm = x;
                    xp(d) += h;
                    xm(d) -= h;
                    const double fd =
                        (model.query(xp).distance - model.query(xm).distance) / (2 * h);
                    worst_g = std::max(worst_g, std::abs(q.gradient(d) - fd) /
                                                    std::max(1.0, std::abs(q.gradient(d))));
                }
                const Eigen::MatrixXd H = model.query_hessian(x);
                for (int a = 0; a < D; ++a)
                    for (int b = 0; b < D; ++b) {
                        Eigen::Vector3d xp = x, xm = x;
                        xp(b) += hh;
                        xm(b) -= hh;
                        const double fd = (model.query(xp).gradient(a) -
                                           model.query(xm).gradient(a)) /
                                          (2 * hh);
                        worst_h = std::max(worst_h, std::abs(H(a, b) - fd) /
                                                        std::max(1.0, std::abs(H(a, b))));
                    }
            }
        }
        return {worst_g < 1e-5 && worst_h < 1e-4,
                "max rel err grad " + fmt(worst_g) + ", hess " + fmt(worst_h)};
    });

    run(4, "C1 continuity and partition of unity", []() -> std::pair<bool, std::string> {
        const BasisConfig cfg = unit_cube_config(3, 5, 2);
        const long n = param_count(cfg);
        const FieldModel model(cfg, ppsdf::testing::random_weights(n, 55),
                               Eigen::MatrixXd::Identity(n, n));
        const double eps = 1e-7;
        double worst_f = 0, worst_g = 0, worst_pu = 0;
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        // Probe every interior knot plane of both axes at random offsets.
        // One-sided probes are Taylor-extrapolated onto the plane so the
        // residual measures the jump, not the local variation.
        for (int axis = 0; axis < 2; ++axis)
            for (int k = 1; k < cfg.segments; ++k)
                for (int trial = 0; trial < 40; ++trial) {
                    Eigen::Vector3d x = Eigen::Vector3d::Zero();
                    x(axis) = static_cast<double>(k) / cfg.segments;
                    x(1 - axis) = uni(rng);
                    Eigen::Vector3d lo = x, hi = x;
                    lo(axis) -= eps;
                    hi(axis) += eps;
                    const QueryResult ql = model.query(lo), qh = model.query(hi);
                    const Eigen::MatrixXd Hl = model.query_hessian(lo);
                    const Eigen::MatrixXd Hh = model.query_hessian(hi);
                    const double fl = ql.distance + eps * ql.gradient(axis);
                    const double fh = qh.distance - eps * qh.gradient(axis);
                    worst_f = std::max(worst_f, std::abs(fl - fh));
                    for (int d = 0; d < 2; ++d) {
                        const double gl = ql.gradient(d) + eps * Hl(d, axis);
                        const double gh = qh.gradient(d) - eps * Hh(d, axis);
                        worst_g = std::max(worst_g, std::abs(gl - gh));
                    }
                }
        for (int i = 0; i < 500; ++i) {
            const Eigen::Vector3d x(uni(rng), uni(rng), 0.0);
            worst_pu =
                std::max(worst_pu, std::abs(model.features(x, {0, 0, 0}).sum() - 1.0));
        }
        return {worst_f < 1e-9 && worst_g < 1e-6 && worst_pu < 1e-9,
                "jump f " + fmt(worst_f) + ", grad " + fmt(worst_g) + ", |sum-1| " +
                    fmt(worst_pu)};
    });

    run(5, "sphere reconstruction accuracy", []() -> std::pair<bool, std::string> {
        const FieldModel& model = fitted_sphere_model();
        const Eigen::Vector3d c(0.5, 0.5, 0.5);
        const double r = 0.3;

        std::mt19937_64 rng(31);
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> shell_off(-0.05, 0.05);
        std::uniform_real_distribution<double> cube(0.02, 0.98);

        double near_mae = 0, gcd = 0;
        const int n_near = 2000;
        for (int i = 0; i < n_near; ++i) {
            Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
            dir.normalize();
            const double truth = shell_off(rng);
            const Eigen::Vector3d p = c + (r + truth) * dir;
            const QueryResult q = model.query(p);
            near_mae += std::abs(q.distance - truth);
            gcd += 1.0 - q.gradient.normalized().dot(dir);
        }
        near_mae /= n_near;
        gcd /= n_near;

        double far_mae = 0;
        long n_far = 0;
        while (n_far < 2000) {
            const Eigen::Vector3d p(cube(rng), cube(rng), cube(rng));
            const double truth = (p - c).norm() - r;
            if (std::abs(truth) < 0.05) continue;
            far_mae += std::abs(model.query(p).distance - truth);
            ++n_far;
        }
        far_mae /= n_far;

        return {near_mae < 0.01 && gcd < 0.01 && far_mae < 0.1,
                "near MAE " + fmt(near_mae) + ", GCD " + fmt(gcd) + ", far MAE " +
                    fmt(far_mae)};
    });

    run(6, "mesh oracle", []() -> std::pair<bool, std::string> {
        const TriangleMesh cube = box_mesh({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5});
        const double d_center = cube.signed_distance({0, 0, 0}).first;
        const double d_face = cube.signed_distance({1, 0, 0}).first;
        const double d_corner = cube.signed_distance({1, 1, 1}).first;
        const bool exact = std::abs(d_center + 0.5) < 1e-12 &&
                           std::abs(d_face - 0.5) < 1e-12 &&
                           std::abs(d_corner - std::sqrt(3.0) / 2.0) < 1e-12;

        const TriangleMesh unit_cube = box_mesh({0.2, 0.2, 0.2}, {0.8, 0.8, 0.8});
        const TriangleMesh sphere = icosphere({0.5, 0.5, 0.5}, 0.3, 2);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        long checked = 0, agreed = 0;
        for (int i = 0; i < 1000; ++i) {
            const Eigen::Vector3d p(uni(rng), uni(rng), uni(rng));
            for (const TriangleMesh* mesh : {&unit_cube, &sphere}) {
                const double d = mesh->signed_distance(p).first;
                if (std::abs(d) < 1e-9) continue;
                ++checked;
                if ((d < 0) == mesh->inside_by_ray_parity(p)) ++agreed;
            }
        }
        return {exact && agreed == checked,
                "center " + fmt(d_center) + ", face " + fmt(d_face) + ", corner " +
                    fmt(d_corner) + "; parity " + std::to_string(agreed) + "/" +
                    std::to_string(checked)};
    });

    run(7, "real-time update and query budget", []() -> std::pair<bool, std::string> {
        FieldModel model = fitted_sphere_model();
        const RegularizerSpec spec = default_spec(0.25);
        const auto samples = sphere_samples({0.5, 0.5, 0.5}, 0.3, 20, 3, 99);

        // Warm up allocator/caches on one update before timing.
        ingest(model, {samples[0]}, spec);
        double worst_update = 0;
        for (int i = 1; i < 20; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            ingest(model, {samples[i]}, spec);
            worst_update = std::max(worst_update, ms_since(t0));
        }

        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> uni(0.02, 0.98);
        double sink = 0;
        const auto q0 = std::chrono::steady_clock::now();
        const int n_q = 1000;
        for (int i = 0; i < n_q; ++i)
            sink += model.query({uni(rng), uni(rng), uni(rng)}).distance;
        if (sink == 0.12345) std::puts("");  // keep the loop from being elided
        const double query_ms = ms_since(q0) / n_q;

        return {worst_update < 30.0 && query_ms < 1.5,
                "max update " + fmt(worst_update) + " ms, mean query " + fmt(query_ms) +
                    " ms"};
    });

    run(8, "128^3 grid reconstruction", []() -> std::pair<bool, std::string> {
        const FieldModel& model = fitted_sphere_model();
        const auto t0 = std::chrono::steady_clock::now();
        const ScalarGrid grid = eval_grid(model, {128, 128, 128});
        const double grid_s = ms_since(t0) / 1000.0;

        const LevelSetMesh mesh = extract_isosurface(grid, 0.0);
        const double cell = 1.0 / 127.0;
        double worst = 0;
        for (const auto& v : mesh.vertices)
            worst = std::max(worst,
                             std::abs((v - Eigen::Vector3d(0.5, 0.5, 0.5)).norm() - 0.3));
        return {grid_s < 60.0 && !mesh.vertices.empty() && worst < 1.5 * cell,
                fmt(grid_s) + " s, " + std::to_string(mesh.vertices.size()) +
                    " vertices, max surface dev " + fmt(worst) + " (" +
                    fmt(worst / cell) + " cells)"};
    });

    run(9, "online survey loop", []() -> std::pair<bool, std::string> {
        const Circle circle({0.5, 0.5}, 0.25);
        const BasisConfig cfg = unit_cube_config(3, 4, 2);
        FieldModel prior = init_spherical_prior(cfg, {0.5, 0.5, 0.0}, 0.2, 100.0);

        EpisodeConfig ecfg;
        ecfg.steps = 500;
        ecfg.seed = 5;
        ecfg.sense.noise_sigma = 0.002;
        ecfg.regularizer.ray_extent = 0.2;
        ecfg.metrics_interval = 0;  // timing loop without metric probes

        AgentState start;
        start.position = {0.5, 0.08};
        start.heading = {0.0, 1.0};

        const auto t0 = std::chrono::steady_clock::now();
        const EpisodeResult result = run_episode(circle, std::move(prior), ecfg, start);
        const double per_step = ms_since(t0) / ecfg.steps;

        bool in_band = true;
        double worst_d = 0;
        for (size_t i = 100; i < result.trajectory.size(); ++i) {
            const double d = result.trajectory[i].true_distance;
            worst_d = std::max(worst_d, std::abs(d - ecfg.target_distance));
            if (d < 0.5 * ecfg.target_distance || d > 2.0 * ecfg.target_distance)
                in_band = false;
        }
        return {result.trajectory.size() == 500 && result.final_mae_near < 0.01 &&
                    in_band && per_step < 30.0,
                "final near MAE " + fmt(result.final_mae_near) + ", band " +
                    (in_band ? "held" : "violated") + ", " + fmt(per_step) + " ms/step"};
    });

    run(10, "determinism and incremental equivalence", []() -> std::pair<bool, std::string> {
        const BasisConfig cfg = unit_cube_config(3, 2, 3);
        const FieldModel prior = init_spherical_prior(cfg, {0.5, 0.5, 0.5}, 0.2, 100.0);
        const RegularizerSpec spec = default_spec(0.25);
        const auto samples = sphere_samples({0.5, 0.5, 0.5}, 0.3, 200, 3, 404);

        auto slurp = [](const std::string& p) {
            std::ifstream is(p, std::ios::binary);
            return std::string(std::istreambuf_iterator<char>(is),
                               std::istreambuf_iterator<char>());
        };
        const FieldModel a = batch_fit(samples, spec, prior);
        const FieldModel b = batch_fit(samples, spec, prior);
        save_model(a, "accept_a.ppsdf");
        save_model(b, "accept_b.ppsdf");
        const bool identical = slurp("accept_a.ppsdf") == slurp("accept_b.ppsdf");
        std::remove("accept_a.ppsdf");
        std::remove("accept_b.ppsdf");

        FieldModel split = batch_fit({samples.begin(), samples.begin() + 100}, spec, prior);
        ingest(split, {samples.begin() + 100, samples.end()}, spec);
        const double rel =
            (split.weights() - a.weights()).norm() / a.weights().norm();

        return {identical && rel < 1e-6,
                std::string("snapshots ") + (identical ? "identical" : "differ") +
                    ", split-fit rel err " + fmt(rel)};
    });

    std::printf("%d/10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
