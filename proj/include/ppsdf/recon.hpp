#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "ppsdf/field.hpp"

namespace ppsdf {

/// Dense sample grid of a scalar field over the model domain. Values
/// are stored with axis 0 outermost (index = (ix * ny + iy) * nz + iz);
/// 2D grids use nz = 1.
struct ScalarGrid {
    int dim = 3;
    std::array<int, 3> res{2, 2, 2};
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d spacing = Eigen::Vector3d::Ones();
    std::vector<double> values;

    long index(int ix, int iy, int iz) const {
        return (static_cast<long>(ix) * res[1] + iy) * res[2] + iz;
    }
    double at(int ix, int iy, int iz) const { return values[index(ix, iy, iz)]; }
    Eigen::Vector3d node(int ix, int iy, int iz) const {
        return origin + Eigen::Vector3d(ix * spacing.x(), iy * spacing.y(), iz * spacing.z());
    }
    /// Multilinear interpolation at an arbitrary in-grid point.
    double interpolate(const Eigen::Vector3d& p) const;
};

/// Field values at every grid node; value at a node equals
/// query(model, node) exactly. OpenMP-parallel over nodes.
ScalarGrid eval_grid(const FieldModel& model, const std::array<int, 3>& resolution);
/// Serial reference for eval_grid; identical arithmetic per node.
ScalarGrid eval_grid_serial(const FieldModel& model, const std::array<int, 3>& resolution);

/// Triangle soup produced by isosurface extraction.
struct LevelSetMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
};

/// Marching cubes (3D grids) with linear edge interpolation.
LevelSetMesh extract_isosurface(const ScalarGrid& grid, double iso);

/// Marching squares (2D grids); returns line segments of the contour.
std::vector<std::array<Eigen::Vector2d, 2>> extract_contours(const ScalarGrid& grid,
                                                             double iso);

/// Raw little-endian float32 dump plus a text sidecar `<path>.hdr`
/// holding dim, resolution, origin, and spacing.
void write_grid(const ScalarGrid& grid, const std::string& path);
ScalarGrid read_grid(const std::string& path);

/// Ascii OBJ / ascii PLY mesh export; byte-stable for identical input.
void write_mesh(const LevelSetMesh& mesh, const std::string& path,
                const std::string& format = "");

}  // namespace ppsdf
