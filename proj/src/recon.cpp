#include "ppsdf/recon.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mc_tables.hpp"

namespace ppsdf {

namespace {

ScalarGrid make_grid_shell(const FieldModel& model, const std::array<int, 3>& resolution) {
    const BasisConfig& cfg = model.config();
    ScalarGrid g;
    g.dim = cfg.dim;
    long total = 1;
    for (int d = 0; d < 3; ++d) {
        if (d < cfg.dim) {
            if (resolution[d] < 2)
                throw std::invalid_argument("eval_grid: resolution must be >= 2 per axis");
            g.res[d] = resolution[d];
            g.origin(d) = cfg.domain[d].lo;
            g.spacing(d) = cfg.domain[d].width() / (resolution[d] - 1);
        } else {
            g.res[d] = 1;
            g.origin(d) = 0.0;
            g.spacing(d) = 1.0;
        }
        total *= g.res[d];
    }
    g.values.resize(total);
    return g;
}

}  // namespace

double ScalarGrid::interpolate(const Eigen::Vector3d& p) const {
    double acc = 0.0;
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int d = 0; d < 3; ++d) {
        if (res[d] == 1) continue;
        double u = (p(d) - origin(d)) / spacing(d);
        u = std::min(std::max(u, 0.0), static_cast<double>(res[d] - 1));
        base[d] = std::min(static_cast<int>(u), res[d] - 2);
        frac[d] = u - base[d];
    }
    for (int dx = 0; dx < 2; ++dx)
        for (int dy = 0; dy < 2; ++dy)
            for (int dz = 0; dz < 2; ++dz) {
                if ((dx && res[0] == 1) || (dy && res[1] == 1) || (dz && res[2] == 1))
                    continue;
                const double wx = dx ? frac[0] : (res[0] == 1 ? 1.0 : 1.0 - frac[0]);
                const double wy = dy ? frac[1] : (res[1] == 1 ? 1.0 : 1.0 - frac[1]);
                const double wz = dz ? frac[2] : (res[2] == 1 ? 1.0 : 1.0 - frac[2]);
                acc += wx * wy * wz * at(base[0] + dx, base[1] + dy, base[2] + dz);
            }
    return acc;
}

ScalarGrid eval_grid(const FieldModel& model, const std::array<int, 3>& resolution) {
    ScalarGrid g = make_grid_shell(model, resolution);
    const long nxy = static_cast<long>(g.res[0]) * g.res[1];
#pragma omp parallel for schedule(static)
    for (long xy = 0; xy < nxy; ++xy) {
        const int ix = static_cast<int>(xy / g.res[1]);
        const int iy = static_cast<int>(xy % g.res[1]);
        for (int iz = 0; iz < g.res[2]; ++iz)
            g.values[g.index(ix, iy, iz)] = model.query(g.node(ix, iy, iz)).distance;
    }
    return g;
}

ScalarGrid eval_grid_serial(const FieldModel& model, const std::array<int, 3>& resolution) {
    ScalarGrid g = make_grid_shell(model, resolution);
    for (int ix = 0; ix < g.res[0]; ++ix)
        for (int iy = 0; iy < g.res[1]; ++iy)
            for (int iz = 0; iz < g.res[2]; ++iz)
                g.values[g.index(ix, iy, iz)] = model.query(g.node(ix, iy, iz)).distance;
    return g;
}

LevelSetMesh extract_isosurface(const ScalarGrid& grid, double iso) {
    if (grid.dim != 3) throw std::invalid_argument("extract_isosurface: grid must be 3D");
    LevelSetMesh mesh;

    // Cube corner offsets (Bourke numbering) and the (node, axis) of each edge.
    static constexpr int corner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                         {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    static constexpr int edge_node[12][4] = {
        // {di, dj, dk, axis}
        {0, 0, 0, 0}, {1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 0, 1},
        {0, 0, 1, 0}, {1, 0, 1, 1}, {0, 1, 1, 0}, {0, 0, 1, 1},
        {0, 0, 0, 2}, {1, 0, 0, 2}, {1, 1, 0, 2}, {0, 1, 0, 2}};

    std::map<std::tuple<int, int, int, int>, int> edge_vertex;

    auto vertex_on_edge = [&](int i, int j, int k, int e) {
        const int ni = i + edge_node[e][0], nj = j + edge_node[e][1],
                  nk = k + edge_node[e][2], axis = edge_node[e][3];
        const auto key = std::make_tuple(ni, nj, nk, axis);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;

        int oi = ni, oj = nj, ok = nk;
        (axis == 0 ? oi : axis == 1 ? oj : ok) += 1;
        const double v1 = grid.at(ni, nj, nk), v2 = grid.at(oi, oj, ok);
        const Eigen::Vector3d p1 = grid.node(ni, nj, nk), p2 = grid.node(oi, oj, ok);
        double t = 0.5;
        if (std::abs(v2 - v1) > 1e-30) t = std::min(std::max((iso - v1) / (v2 - v1), 0.0), 1.0);
        const int idx = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(p1 + t * (p2 - p1));
        edge_vertex.emplace(key, idx);
        return idx;
    };

    for (int i = 0; i + 1 < grid.res[0]; ++i) {
        for (int j = 0; j + 1 < grid.res[1]; ++j) {
            for (int k = 0; k + 1 < grid.res[2]; ++k) {
                int cube = 0;
                for (int c = 0; c < 8; ++c)
                    if (grid.at(i + corner[c][0], j + corner[c][1], k + corner[c][2]) < iso)
                        cube |= 1 << c;
                if (mc::kEdgeTable[cube] == 0) continue;
                const signed char* tri = mc::kTriTable[cube];
                for (int t = 0; tri[t] != -1; t += 3) {
                    mesh.faces.push_back({vertex_on_edge(i, j, k, tri[t]),
                                          vertex_on_edge(i, j, k, tri[t + 1]),
                                          vertex_on_edge(i, j, k, tri[t + 2])});
                }
            }
        }
    }
    return mesh;
}

std::vector<std::array<Eigen::Vector2d, 2>> extract_contours(const ScalarGrid& grid,
                                                             double iso) {
    if (grid.dim != 2) throw std::invalid_argument("extract_contours: grid must be 2D");
    std::vector<std::array<Eigen::Vector2d, 2>> segments;

    auto interp = [&](int i1, int j1, int i2, int j2) -> Eigen::Vector2d {
        const double v1 = grid.at(i1, j1, 0), v2 = grid.at(i2, j2, 0);
        double t = 0.5;
        if (std::abs(v2 - v1) > 1e-30) t = std::min(std::max((iso - v1) / (v2 - v1), 0.0), 1.0);
        const Eigen::Vector3d p1 = grid.node(i1, j1, 0), p2 = grid.node(i2, j2, 0);
        const Eigen::Vector3d p = p1 + t * (p2 - p1);
        return {p.x(), p.y()};
    };

    for (int i = 0; i + 1 < grid.res[0]; ++i) {
        for (int j = 0; j + 1 < grid.res[1]; ++j) {
            // Corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); bit set when below iso.
            int idx = 0;
            if (grid.at(i, j, 0) < iso) idx |= 1;
            if (grid.at(i + 1, j, 0) < iso) idx |= 2;
            if (grid.at(i + 1, j + 1, 0) < iso) idx |= 4;
            if (grid.at(i, j + 1, 0) < iso) idx |= 8;
            if (idx == 0 || idx == 15) continue;

            const Eigen::Vector2d bottom = interp(i, j, i + 1, j);
            const Eigen::Vector2d right = interp(i + 1, j, i + 1, j + 1);
            const Eigen::Vector2d top = interp(i, j + 1, i + 1, j + 1);
            const Eigen::Vector2d left = interp(i, j, i, j + 1);

            switch (idx) {
                case 1: case 14: segments.push_back({left, bottom}); break;
                case 2: case 13: segments.push_back({bottom, right}); break;
                case 3: case 12: segments.push_back({left, right}); break;
                case 4: case 11: segments.push_back({right, top}); break;
                case 6: case 9:  segments.push_back({bottom, top}); break;
                case 7: case 8:  segments.push_back({left, top}); break;
                case 5: case 10: {
                    // Saddle: disambiguate with the cell-center average.
                    const double center = 0.25 * (grid.at(i, j, 0) + grid.at(i + 1, j, 0) +
                                                  grid.at(i + 1, j + 1, 0) + grid.at(i, j + 1, 0));
                    const bool center_below = center < iso;
                    if ((idx == 5) == center_below) {
                        segments.push_back({left, top});
                        segments.push_back({bottom, right});
                    } else {
                        segments.push_back({left, bottom});
                        segments.push_back({right, top});
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return segments;
}

void write_grid(const ScalarGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_grid: cannot open " + path);
    std::vector<float> raw(grid.values.begin(), grid.values.end());
    os.write(reinterpret_cast<const char*>(raw.data()), raw.size() * sizeof(float));
    if (!os) throw std::runtime_error("write_grid: write failed for " + path);

    std::ofstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("write_grid: cannot open " + path + ".hdr");
    hdr.precision(17);
    hdr << "dim " << grid.dim << "\n"
        << "res " << grid.res[0] << " " << grid.res[1] << " " << grid.res[2] << "\n"
        << "origin " << grid.origin.x() << " " << grid.origin.y() << " " << grid.origin.z()
        << "\n"
        << "spacing " << grid.spacing.x() << " " << grid.spacing.y() << " "
        << grid.spacing.z() << "\n"
        << "format float32_le\n";
}

ScalarGrid read_grid(const std::string& path) {
    std::ifstream hdr(path + ".hdr");
    if (!hdr) throw std::runtime_error("read_grid: cannot open " + path + ".hdr");
    ScalarGrid g;
    std::string key;
    while (hdr >> key) {
        if (key == "dim") hdr >> g.dim;
        else if (key == "res") hdr >> g.res[0] >> g.res[1] >> g.res[2];
        else if (key == "origin") hdr >> g.origin.x() >> g.origin.y() >> g.origin.z();
        else if (key == "spacing") hdr >> g.spacing.x() >> g.spacing.y() >> g.spacing.z();
        else if (key == "format") { std::string f; hdr >> f; }
        else throw std::runtime_error("read_grid: unknown header key " + key);
    }
    const long total = static_cast<long>(g.res[0]) * g.res[1] * g.res[2];
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_grid: cannot open " + path);
    std::vector<float> raw(total);
    is.read(reinterpret_cast<char*>(raw.data()), total * sizeof(float));
    if (!is) throw std::runtime_error("read_grid: truncated data in " + path);
    g.values.assign(raw.begin(), raw.end());
    return g;
}

void write_mesh(const LevelSetMesh& mesh, const std::string& path,
                const std::string& format) {
    std::string fmt = format;
    if (fmt.empty()) {
        const auto dot = path.rfind('.');
        fmt = dot == std::string::npos ? "obj" : path.substr(dot + 1);
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_mesh: cannot open " + path);
    os.precision(9);
    if (fmt == "obj") {
        for (const auto& v : mesh.vertices)
            os << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
        for (const auto& f : mesh.faces)
            os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    } else if (fmt == "ply") {
        os << "ply\nformat ascii 1.0\n"
           << "element vertex " << mesh.vertices.size() << "\n"
           << "property float x\nproperty float y\nproperty float z\n"
           << "element face " << mesh.faces.size() << "\n"
           << "property list uchar int vertex_indices\nend_header\n";
        for (const auto& v : mesh.vertices)
            os << v.x() << " " << v.y() << " " << v.z() << "\n";
        for (const auto& f : mesh.faces)
            os << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
    } else {
        throw std::runtime_error("write_mesh: unsupported format " + fmt);
    }
    if (!os) throw std::runtime_error("write_mesh: write failed for " + path);
}

}  // namespace ppsdf
