#pragma once

#include <Eigen/Dense>
#include <map>
#include <random>
#include <vector>

#include "ppsdf/oracle.hpp"
#include "ppsdf/solver.hpp"

namespace ppsdf::testing {

inline BasisConfig unit_cube_config(int K, int S, int D) {
    BasisConfig cfg;
    cfg.degree = K;
    cfg.segments = S;
    cfg.dim = D;
    for (int d = 0; d < 3; ++d) cfg.domain[d] = {0.0, 1.0};
    return cfg;
}

/// Analytic samples on a sphere: exact positions and outward normals.
inline std::vector<SurfaceSample> sphere_samples(const Eigen::Vector3d& center,
                                                 double radius, int n, int dim,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<SurfaceSample> out;
    out.reserve(n);
    while (static_cast<int>(out.size()) < n) {
        Eigen::Vector3d dir = Eigen::Vector3d::Zero();
        for (int d = 0; d < dim; ++d) dir(d) = gauss(rng);
        if (dir.norm() < 1e-9) continue;
        dir.normalize();
        SurfaceSample s;
        s.position = center + radius * dir;
        s.normal = dir;
        bool inside = true;
        for (int d = 0; d < dim; ++d)
            if (s.position(d) < 0.0 || s.position(d) > 1.0) inside = false;
        if (inside) out.push_back(s);
    }
    return out;
}

/// Axis-aligned box mesh (12 triangles, outward winding).
inline TriangleMesh box_mesh(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
    std::vector<Eigen::Vector3d> v = {
        {lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()},
        {hi.x(), hi.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
        {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
        {hi.x(), hi.y(), hi.z()}, {lo.x(), hi.y(), hi.z()}};
    std::vector<std::array<int, 3>> f = {
        {0, 2, 1}, {0, 3, 2},   // bottom (z = lo)
        {4, 5, 6}, {4, 6, 7},   // top
        {0, 1, 5}, {0, 5, 4},   // front (y = lo)
        {2, 3, 7}, {2, 7, 6},   // back
        {0, 4, 7}, {0, 7, 3},   // left (x = lo)
        {1, 2, 6}, {1, 6, 5}};  // right
    return TriangleMesh(std::move(v), std::move(f));
}

/// Icosphere by subdividing an icosahedron; vertices projected onto the
/// sphere of given center/radius.
inline TriangleMesh icosphere(const Eigen::Vector3d& center, double radius,
                              int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> v = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            v.push_back(0.5 * (v[a] + v[b]));
            midpoint.emplace(key, static_cast<int>(v.size()) - 1);
            return static_cast<int>(v.size()) - 1;
        };
        std::vector<std::array<int, 3>> next;
        for (const auto& [a, b, c] : f) {
            const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
            next.push_back({a, ab, ca});
            next.push_back({b, bc, ab});
            next.push_back({c, ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    for (auto& p : v) p = center + radius * p.normalized();
    return TriangleMesh(std::move(v), std::move(f));
}

inline Eigen::VectorXd random_weights(long n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-scale, scale);
    Eigen::VectorXd w(n);
    for (long i = 0; i < n; ++i) w(i) = uni(rng);
    return w;
}

}  // namespace ppsdf::testing
