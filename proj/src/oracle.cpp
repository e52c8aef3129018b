#include "ppsdf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ppsdf {

namespace {

enum class Feature { VertA, VertB, VertC, EdgeAB, EdgeBC, EdgeCA, Face };

// Ericson-style region classification; returns the closest point and
// which feature of the triangle it lies on.
std::pair<Eigen::Vector3d, Feature> closest_point_feature(const Eigen::Vector3d& p,
                                                          const Eigen::Vector3d& a,
                                                          const Eigen::Vector3d& b,
                                                          const Eigen::Vector3d& c) {
    const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return {a, Feature::VertA};

    const Eigen::Vector3d bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return {b, Feature::VertB};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        const double v = d1 / (d1 - d3);
        return {a + v * ab, Feature::EdgeAB};
    }

    const Eigen::Vector3d cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return {c, Feature::VertC};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        const double w = d2 / (d2 - d6);
        return {a + w * ac, Feature::EdgeCA};
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {b + w * (c - b), Feature::EdgeBC};
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return {a + v * ab + w * ac, Feature::Face};
}

double vertex_angle(const Eigen::Vector3d& at, const Eigen::Vector3d& u,
                    const Eigen::Vector3d& v) {
    const Eigen::Vector3d e1 = (u - at).normalized(), e2 = (v - at).normalized();
    return std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
}

}  // namespace

Eigen::Vector3d closest_point_on_triangle(const Eigen::Vector3d& p,
                                          const Eigen::Vector3d& a,
                                          const Eigen::Vector3d& b,
                                          const Eigen::Vector3d& c) {
    return closest_point_feature(p, a, b, c).first;
}

TriangleMesh::TriangleMesh(std::vector<Eigen::Vector3d> vertices,
                           std::vector<std::array<int, 3>> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
    if (faces_.empty()) throw std::invalid_argument("TriangleMesh: empty face list");
    for (const auto& [i, j, k] : faces_)
        for (int v : {i, j, k})
            if (v < 0 || v >= static_cast<int>(vertices_.size()))
                throw std::invalid_argument("TriangleMesh: face index out of range");

    face_normals_.resize(faces_.size());
    face_areas_.resize(faces_.size());
    vertex_pseudo_normals_.assign(vertices_.size(), Eigen::Vector3d::Zero());
    std::map<std::pair<int, int>, Eigen::Vector3d> edge_accum;

    for (size_t f = 0; f < faces_.size(); ++f) {
        const auto& [i, j, k] = faces_[f];
        const Eigen::Vector3d &a = vertices_[i], &b = vertices_[j], &c = vertices_[k];
        const Eigen::Vector3d cross = (b - a).cross(c - a);
        const double area = 0.5 * cross.norm();
        face_areas_[f] = area;
        total_area_ += area;
        face_normals_[f] = area > 0 ? (cross / cross.norm()).eval() : Eigen::Vector3d::UnitZ();

        vertex_pseudo_normals_[i] += vertex_angle(a, b, c) * face_normals_[f];
        vertex_pseudo_normals_[j] += vertex_angle(b, c, a) * face_normals_[f];
        vertex_pseudo_normals_[k] += vertex_angle(c, a, b) * face_normals_[f];

        auto key = [](int u, int v) { return std::pair<int, int>(std::min(u, v), std::max(u, v)); };
        // try_emplace: a plain operator[] would leave the Eigen vector
        // default-constructed, i.e. uninitialized.
        for (const auto& e : {key(i, j), key(j, k), key(k, i)})
            edge_accum.try_emplace(e, Eigen::Vector3d::Zero()).first->second +=
                face_normals_[f];
    }

    for (auto& n : vertex_pseudo_normals_)
        if (n.norm() > 0) n.normalize();

    edge_pseudo_normals_.resize(3 * faces_.size());
    for (size_t f = 0; f < faces_.size(); ++f) {
        const auto& [i, j, k] = faces_[f];
        auto key = [](int u, int v) { return std::pair<int, int>(std::min(u, v), std::max(u, v)); };
        const std::pair<int, int> edges[3] = {key(i, j), key(j, k), key(k, i)};
        for (int e = 0; e < 3; ++e) {
            Eigen::Vector3d n = edge_accum.at(edges[e]);
            edge_pseudo_normals_[3 * f + e] =
                n.norm() > 0 ? n.normalized() : face_normals_[f];
        }
    }
}

std::pair<double, Eigen::Vector3d> TriangleMesh::signed_distance(
    const Eigen::Vector3d& point) const {
    double best_d2 = std::numeric_limits<double>::infinity();
    Eigen::Vector3d best_cp = Eigen::Vector3d::Zero();
    Feature best_feat = Feature::Face;
    size_t best_face = 0;

    for (size_t f = 0; f < faces_.size(); ++f) {
        const auto& [i, j, k] = faces_[f];
        auto [cp, feat] = closest_point_feature(point, vertices_[i], vertices_[j], vertices_[k]);
        const double d2 = (point - cp).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_cp = cp;
            best_feat = feat;
            best_face = f;
        }
    }

    Eigen::Vector3d pseudo;
    const auto& [i, j, k] = faces_[best_face];
    switch (best_feat) {
        case Feature::VertA: pseudo = vertex_pseudo_normals_[i]; break;
        case Feature::VertB: pseudo = vertex_pseudo_normals_[j]; break;
        case Feature::VertC: pseudo = vertex_pseudo_normals_[k]; break;
        case Feature::EdgeAB: pseudo = edge_pseudo_normals_[3 * best_face + 0]; break;
        case Feature::EdgeBC: pseudo = edge_pseudo_normals_[3 * best_face + 1]; break;
        case Feature::EdgeCA: pseudo = edge_pseudo_normals_[3 * best_face + 2]; break;
        case Feature::Face: pseudo = face_normals_[best_face]; break;
    }

    const double dist = std::sqrt(best_d2);
    const Eigen::Vector3d diff = point - best_cp;
    const double sign = diff.dot(pseudo) < 0 ? -1.0 : 1.0;
    Eigen::Vector3d grad;
    if (dist > 1e-12)
        grad = sign * diff / dist;
    else
        grad = pseudo;  // on the surface, fall back to the feature normal
    return {sign * dist, grad};
}

std::vector<double> TriangleMesh::signed_distances(
    const std::vector<Eigen::Vector3d>& points) const {
    std::vector<double> out(points.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(points.size()); ++i)
        out[i] = signed_distance(points[i]).first;
    return out;
}

std::vector<double> TriangleMesh::signed_distances_serial(
    const std::vector<Eigen::Vector3d>& points) const {
    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i) out[i] = signed_distance(points[i]).first;
    return out;
}

bool TriangleMesh::inside_by_ray_parity(const Eigen::Vector3d& point) const {
    // Fixed irrational-ish direction to dodge edge/vertex grazing.
    const Eigen::Vector3d dir = Eigen::Vector3d(0.5377, 0.2713, 0.8003).normalized();
    int crossings = 0;
    for (const auto& [i, j, k] : faces_) {
        // Moller-Trumbore
        const Eigen::Vector3d &a = vertices_[i], &b = vertices_[j], &c = vertices_[k];
        const Eigen::Vector3d e1 = b - a, e2 = c - a;
        const Eigen::Vector3d h = dir.cross(e2);
        const double det = e1.dot(h);
        if (std::abs(det) < 1e-14) continue;
        const double inv = 1.0 / det;
        const Eigen::Vector3d s = point - a;
        const double u = inv * s.dot(h);
        if (u < 0 || u > 1) continue;
        const Eigen::Vector3d q = s.cross(e1);
        const double v = inv * dir.dot(q);
        if (v < 0 || u + v > 1) continue;
        const double t = inv * e2.dot(q);
        if (t > 1e-12) ++crossings;
    }
    return crossings % 2 == 1;
}

std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, int n,
                                          std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_surface: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> cdf(mesh.faces().size());
    double acc = 0.0;
    for (size_t f = 0; f < mesh.faces().size(); ++f) {
        const auto& [i, j, k] = mesh.faces()[f];
        acc += 0.5 * (mesh.vertices()[j] - mesh.vertices()[i])
                         .cross(mesh.vertices()[k] - mesh.vertices()[i])
                         .norm();
        cdf[f] = acc;
    }
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<SurfaceSample> samples(n);
    for (int s = 0; s < n; ++s) {
        const double pick = uni(rng) * acc;
        size_t f = std::lower_bound(cdf.begin(), cdf.end(), pick) - cdf.begin();
        f = std::min(f, mesh.faces().size() - 1);
        const auto& [i, j, k] = mesh.faces()[f];
        double u = uni(rng), v = uni(rng);
        if (u + v > 1) { u = 1 - u; v = 1 - v; }
        samples[s].position = mesh.vertices()[i] + u * (mesh.vertices()[j] - mesh.vertices()[i]) +
                              v * (mesh.vertices()[k] - mesh.vertices()[i]);
        samples[s].normal = mesh.face_normals()[f];
    }
    return samples;
}

MetricsReport evaluate(const FieldModel& model, const OracleSDF& oracle,
                       const std::vector<Eigen::Vector3d>& eval_points,
                       double near_threshold) {
    const long n = static_cast<long>(eval_points.size());
    std::vector<double> truth(n), mae(n), gcd(n);
    std::vector<char> has_gcd(n, 0);

#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const Eigen::Vector3d& x = eval_points[i];
        truth[i] = oracle.distance(x);
        const QueryResult q = model.query(x);
        mae[i] = std::abs(q.distance - truth[i]);
        Eigen::Vector3d gt = oracle.gradient(x);
        Eigen::Vector3d gh = q.gradient;
        if (model.config().dim < 3) {
            for (int d = model.config().dim; d < 3; ++d) { gt(d) = 0; gh(d) = 0; }
        }
        if (gh.norm() > 1e-12 && gt.norm() > 1e-12) {
            gcd[i] = 1.0 - gh.dot(gt) / (gh.norm() * gt.norm());
            has_gcd[i] = 1;
        }
    }

    auto mean_std = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.empty()) return {0.0, 0.0};
        double m = 0;
        for (double x : v) m += x;
        m /= v.size();
        double s2 = 0;
        for (double x : v) s2 += (x - m) * (x - m);
        return {m, std::sqrt(s2 / v.size())};
    };

    std::vector<double> all, near, far, gcds;
    for (long i = 0; i < n; ++i) {
        all.push_back(mae[i]);
        (std::abs(truth[i]) < near_threshold ? near : far).push_back(mae[i]);
        if (has_gcd[i]) gcds.push_back(gcd[i]);
    }

    MetricsReport r;
    std::tie(r.mae_mean, r.mae_std) = mean_std(all);
    std::tie(r.mae_near_mean, r.mae_near_std) = mean_std(near);
    std::tie(r.mae_far_mean, r.mae_far_std) = mean_std(far);
    std::tie(r.gcd_mean, r.gcd_std) = mean_std(gcds);
    r.count = n;
    r.near_count = static_cast<long>(near.size());
    r.far_count = static_cast<long>(far.size());
    r.gcd_excluded = n - static_cast<long>(gcds.size());
    return r;
}

std::string MetricsReport::to_text() const {
    std::ostringstream os;
    os.precision(6);
    os << "mae_mean " << mae_mean << "\n"
       << "mae_std " << mae_std << "\n"
       << "mae_near_mean " << mae_near_mean << "\n"
       << "mae_near_std " << mae_near_std << "\n"
       << "mae_far_mean " << mae_far_mean << "\n"
       << "mae_far_std " << mae_far_std << "\n"
       << "gcd_mean " << gcd_mean << "\n"
       << "gcd_std " << gcd_std << "\n"
       << "count " << count << "\n"
       << "near_count " << near_count << "\n"
       << "far_count " << far_count << "\n"
       << "gcd_excluded " << gcd_excluded << "\n";
    return os.str();
}

}  // namespace ppsdf
