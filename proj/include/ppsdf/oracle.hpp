#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ppsdf/field.hpp"
#include "ppsdf/solver.hpp"

namespace ppsdf {

/// Triangle mesh with precomputed angle-weighted pseudo-normals for
/// signing point-to-mesh distances. Assumes consistent outward winding.
class TriangleMesh {
public:
    TriangleMesh(std::vector<Eigen::Vector3d> vertices,
                 std::vector<std::array<int, 3>> faces);

    const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& faces() const { return faces_; }
    const std::vector<Eigen::Vector3d>& face_normals() const { return face_normals_; }
    double total_area() const { return total_area_; }

    /// Signed distance and unit gradient at `point`. |s| is the exact
    /// minimum distance over all triangles; the sign comes from the
    /// pseudo-normal of the closest feature.
    std::pair<double, Eigen::Vector3d> signed_distance(const Eigen::Vector3d& point) const;

    /// Parallel batch version of signed_distance (values only).
    std::vector<double> signed_distances(const std::vector<Eigen::Vector3d>& points) const;
    /// Serial reference for the batch kernel; must agree exactly.
    std::vector<double> signed_distances_serial(const std::vector<Eigen::Vector3d>& points) const;

    /// Inside test by ray-crossing parity; verification fallback for the
    /// pseudo-normal sign.
    bool inside_by_ray_parity(const Eigen::Vector3d& point) const;

private:
    std::vector<Eigen::Vector3d> vertices_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<Eigen::Vector3d> face_normals_;
    std::vector<Eigen::Vector3d> vertex_pseudo_normals_;
    std::vector<Eigen::Vector3d> edge_pseudo_normals_;  // 3 per face: edges (0,1),(1,2),(2,0)
    std::vector<double> face_areas_;
    double total_area_ = 0.0;
};

/// Area-weighted uniform surface samples with face normals.
/// Deterministic under a fixed seed.
std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, int n,
                                          std::uint64_t seed);

/// Accuracy report split at ground-truth |s| = 0.05 (model-domain units).
struct MetricsReport {
    double mae_mean = 0.0, mae_std = 0.0;
    double mae_near_mean = 0.0, mae_near_std = 0.0;
    double mae_far_mean = 0.0, mae_far_std = 0.0;
    double gcd_mean = 0.0, gcd_std = 0.0;
    long count = 0, near_count = 0, far_count = 0;
    long gcd_excluded = 0;  // points with vanishing estimated gradient

    std::string to_text() const;
};

/// Ground-truth evaluator interface: signed distance and unit gradient.
struct OracleSDF {
    virtual ~OracleSDF() = default;
    virtual double distance(const Eigen::Vector3d& x) const = 0;
    virtual Eigen::Vector3d gradient(const Eigen::Vector3d& x) const = 0;
};

/// Mesh-backed oracle.
class MeshOracle : public OracleSDF {
public:
    explicit MeshOracle(const TriangleMesh& mesh) : mesh_(mesh) {}
    double distance(const Eigen::Vector3d& x) const override {
        return mesh_.signed_distance(x).first;
    }
    Eigen::Vector3d gradient(const Eigen::Vector3d& x) const override {
        return mesh_.signed_distance(x).second;
    }

private:
    const TriangleMesh& mesh_;
};

/// MAE and gradient-cosine-distance metrics of `model` against `oracle`
/// at the given evaluation points. The near/far split uses the oracle's
/// |s| against the 0.05 threshold.
MetricsReport evaluate(const FieldModel& model, const OracleSDF& oracle,
                       const std::vector<Eigen::Vector3d>& eval_points,
                       double near_threshold = 0.05);

/// Closest point on a triangle (a, b, c) to p.
Eigen::Vector3d closest_point_on_triangle(const Eigen::Vector3d& p,
                                          const Eigen::Vector3d& a,
                                          const Eigen::Vector3d& b,
                                          const Eigen::Vector3d& c);

}  // namespace ppsdf
