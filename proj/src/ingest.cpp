#include "ppsdf/ingest.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ppsdf {

namespace {

std::string guess_format(const std::string& path, const std::string& given) {
    if (!given.empty()) return given;
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) throw std::runtime_error("cannot infer format of " + path);
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext;
}

[[noreturn]] void parse_error(const std::string& path, long line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

struct PlyHeader {
    long vertex_count = 0;
    long face_count = 0;
    bool binary = false;
    std::vector<std::string> vertex_props;
    long header_end_line = 0;
};

PlyHeader read_ply_header(std::istream& is, const std::string& path) {
    PlyHeader h;
    std::string line;
    long lineno = 0;
    std::string element;
    if (!std::getline(is, line) || line.substr(0, 3) != "ply")
        parse_error(path, 1, "not a PLY file");
    ++lineno;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tok;
        ss >> tok;
        if (tok == "format") {
            std::string fmt;
            ss >> fmt;
            if (fmt == "binary_little_endian")
                h.binary = true;
            else if (fmt != "ascii")
                parse_error(path, lineno, "unsupported PLY format " + fmt);
        } else if (tok == "element") {
            std::string name;
            long count;
            ss >> name >> count;
            element = name;
            if (name == "vertex") h.vertex_count = count;
            if (name == "face") h.face_count = count;
        } else if (tok == "property" && element == "vertex") {
            std::string type, name;
            ss >> type >> name;
            if (type == "list") parse_error(path, lineno, "list property on vertex element");
            h.vertex_props.push_back(name);
        } else if (tok == "end_header") {
            h.header_end_line = lineno;
            return h;
        }
    }
    parse_error(path, lineno, "missing end_header");
}

}  // namespace

PointCloud load_point_cloud(const std::string& path, const std::string& format) {
    const std::string fmt = guess_format(path, format);
    PointCloud cloud;

    auto push = [&cloud](const Eigen::Vector3d& p, const Eigen::Vector3d& n) {
        const double len = n.norm();
        if (len < 1e-12) {
            ++cloud.dropped;
            return;
        }
        cloud.samples.push_back({p, n / len});
    };

    if (fmt == "xyz") {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open " + path);
        std::string line;
        long lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            std::istringstream ss(line);
            double x, y, z, nx, ny, nz;
            if (!(ss >> x)) continue;  // blank or comment-only line
            if (!(ss >> y >> z >> nx >> ny >> nz))
                parse_error(path, lineno, "expected x y z nx ny nz");
            push({x, y, z}, {nx, ny, nz});
        }
        return cloud;
    }

    if (fmt == "ply") {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open " + path);
        const PlyHeader h = read_ply_header(is, path);
        std::array<int, 6> field{-1, -1, -1, -1, -1, -1};
        const char* names[6] = {"x", "y", "z", "nx", "ny", "nz"};
        for (size_t i = 0; i < h.vertex_props.size(); ++i)
            for (int f = 0; f < 6; ++f)
                if (h.vertex_props[i] == names[f]) field[f] = static_cast<int>(i);
        for (int f = 0; f < 6; ++f)
            if (field[f] < 0)
                throw std::runtime_error(path + ": missing vertex property " +
                                         std::string(names[f]));
        for (long v = 0; v < h.vertex_count; ++v) {
            std::vector<double> vals(h.vertex_props.size());
            if (h.binary) {
                std::vector<float> raw(vals.size());
                is.read(reinterpret_cast<char*>(raw.data()), raw.size() * sizeof(float));
                if (!is) throw std::runtime_error(path + ": truncated vertex data");
                std::copy(raw.begin(), raw.end(), vals.begin());
            } else {
                std::string line;
                if (!std::getline(is, line))
                    parse_error(path, h.header_end_line + v + 1, "truncated vertex data");
                std::istringstream ss(line);
                for (auto& x : vals)
                    if (!(ss >> x))
                        parse_error(path, h.header_end_line + v + 1, "short vertex record");
            }
            push({vals[field[0]], vals[field[1]], vals[field[2]]},
                 {vals[field[3]], vals[field[4]], vals[field[5]]});
        }
        return cloud;
    }
    throw std::runtime_error("unsupported point cloud format: " + fmt);
}

void write_point_cloud(const PointCloud& cloud, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.precision(12);
    for (const SurfaceSample& s : cloud.samples)
        os << s.position.x() << " " << s.position.y() << " " << s.position.z() << " "
           << s.normal.x() << " " << s.normal.y() << " " << s.normal.z() << "\n";
    if (!os) throw std::runtime_error("write failed for " + path);
}

TriangleMesh load_mesh(const std::string& path, const std::string& format,
                       long* dropped_faces) {
    const std::string fmt = guess_format(path, format);
    std::vector<Eigen::Vector3d> verts;
    std::vector<std::array<int, 3>> faces;
    long dropped = 0;

    auto push_polygon = [&](const std::vector<int>& poly, long lineno) {
        if (poly.size() < 3) parse_error(path, lineno, "face with fewer than 3 vertices");
        for (int v : poly)
            if (v < 0 || v >= static_cast<int>(verts.size()))
                parse_error(path, lineno, "face index out of range");
        for (size_t i = 1; i + 1 < poly.size(); ++i) {  // fan triangulation
            const std::array<int, 3> tri{poly[0], poly[i], poly[i + 1]};
            const double area = 0.5 * (verts[tri[1]] - verts[tri[0]])
                                          .cross(verts[tri[2]] - verts[tri[0]])
                                          .norm();
            if (area < 1e-14)
                ++dropped;
            else
                faces.push_back(tri);
        }
    };

    if (fmt == "obj") {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open " + path);
        std::string line;
        long lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::istringstream ss(line);
            std::string tok;
            if (!(ss >> tok)) continue;
            if (tok == "v") {
                double x, y, z;
                if (!(ss >> x >> y >> z)) parse_error(path, lineno, "bad vertex record");
                verts.emplace_back(x, y, z);
            } else if (tok == "f") {
                std::vector<int> poly;
                std::string ref;
                while (ss >> ref) {
                    // "v", "v/vt", "v//vn", "v/vt/vn" -- only the vertex index matters
                    poly.push_back(std::stoi(ref.substr(0, ref.find('/'))) - 1);
                }
                push_polygon(poly, lineno);
            }
        }
    } else if (fmt == "ply") {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open " + path);
        const PlyHeader h = read_ply_header(is, path);
        if (h.binary)
            throw std::runtime_error(path + ": binary PLY meshes are not supported");
        std::array<int, 3> field{-1, -1, -1};
        const char* names[3] = {"x", "y", "z"};
        for (size_t i = 0; i < h.vertex_props.size(); ++i)
            for (int f = 0; f < 3; ++f)
                if (h.vertex_props[i] == names[f]) field[f] = static_cast<int>(i);
        std::string line;
        for (long v = 0; v < h.vertex_count; ++v) {
            if (!std::getline(is, line)) parse_error(path, 0, "truncated vertex data");
            std::istringstream ss(line);
            std::vector<double> vals(h.vertex_props.size());
            for (auto& x : vals)
                if (!(ss >> x)) parse_error(path, 0, "short vertex record");
            verts.emplace_back(vals[field[0]], vals[field[1]], vals[field[2]]);
        }
        for (long f = 0; f < h.face_count; ++f) {
            if (!std::getline(is, line)) parse_error(path, 0, "truncated face data");
            std::istringstream ss(line);
            int count;
            if (!(ss >> count)) parse_error(path, 0, "bad face record");
            std::vector<int> poly(count);
            for (int& v : poly)
                if (!(ss >> v)) parse_error(path, 0, "short face record");
            push_polygon(poly, 0);
        }
    } else {
        throw std::runtime_error("unsupported mesh format: " + fmt);
    }

    if (dropped_faces) *dropped_faces = dropped;
    return TriangleMesh(std::move(verts), std::move(faces));
}

DomainTransform fit_domain(const std::vector<Eigen::Vector3d>& points, double margin,
                           int dim) {
    if (points.empty()) throw std::invalid_argument("fit_domain: no points");
    if (margin < 0 || margin >= 0.5)
        throw std::invalid_argument("fit_domain: margin must be in [0, 0.5)");

    Eigen::Vector3d lo = points[0], hi = points[0];
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    constexpr double kEps = 1e-6;
    for (int d = 0; d < dim; ++d) {
        const double ext = hi(d) - lo(d);
        const double pad = ext > 0 ? margin * ext : kEps;
        lo(d) -= pad;
        hi(d) += pad;
    }

    double max_ext = 0.0;
    for (int d = 0; d < dim; ++d) max_ext = std::max(max_ext, hi(d) - lo(d));
    DomainTransform t;
    t.scale = 1.0 / max_ext;
    // Center each axis inside [0, 1].
    for (int d = 0; d < dim; ++d) {
        const double slack = (1.0 - t.scale * (hi(d) - lo(d))) / (2.0 * t.scale);
        t.offset(d) = lo(d) - slack;
    }
    return t;
}

}  // namespace ppsdf
