#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "ppsdf/oracle.hpp"
#include "ppsdf/solver.hpp"

namespace ppsdf {

/// Samples in raw file coordinates, plus ingestion diagnostics.
struct PointCloud {
    std::vector<SurfaceSample> samples;
    long dropped = 0;  // records discarded for zero-length normals
};

/// Uniform scale + per-axis offset mapping raw coordinates into the
/// model domain: model = scale * (raw - offset). The scale is the same
/// on all axes so that distances stay isotropic; raw distances are
/// model distances divided by scale.
struct DomainTransform {
    double scale = 1.0;
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();

    Eigen::Vector3d to_model(const Eigen::Vector3d& raw) const {
        return scale * (raw - offset);
    }
    Eigen::Vector3d to_raw(const Eigen::Vector3d& model) const {
        return model / scale + offset;
    }
    SurfaceSample to_model(const SurfaceSample& s) const {
        return {to_model(s.position), s.normal};
    }
};

/// Loads `x y z nx ny nz` records. Format is chosen by extension
/// (.xyz, .ply) unless given explicitly. PLY supports ascii 1.0 and
/// binary_little_endian 1.0 with x,y,z,nx,ny,nz vertex properties.
/// Normals are renormalized; zero-length normals drop the record.
PointCloud load_point_cloud(const std::string& path, const std::string& format = "");

/// Writes the cloud back out in the xyz format.
void write_point_cloud(const PointCloud& cloud, const std::string& path);

/// Loads a triangle mesh from OBJ or PLY; polygons are fan-triangulated
/// and zero-area faces dropped. `dropped_faces`, when given, receives
/// the number of discarded faces.
TriangleMesh load_mesh(const std::string& path, const std::string& format = "",
                       long* dropped_faces = nullptr);

/// Transform mapping the bounding box of `points` (expanded by
/// `margin` * extent per side) into the unit cube, with uniform scale.
/// Coincident points get a fixed epsilon box.
DomainTransform fit_domain(const std::vector<Eigen::Vector3d>& points,
                           double margin = 0.25, int dim = 3);

}  // namespace ppsdf
