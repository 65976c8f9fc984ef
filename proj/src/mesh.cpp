#include "tdbem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

namespace tdbem {

namespace {

using Edge = std::pair<int, int>;

Edge undirected(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

PanelGeometry make_panel(const Vec3& a, const Vec3& b, const Vec3& c) {
    PanelGeometry p;
    p.vertices = {a, b, c};
    p.centroid = (a + b + c) / 3.0;
    const Vec3 cr = (b - a).cross(c - a);
    p.area = 0.5 * cr.norm();
    p.normal = cr / cr.norm();
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    p.diameter = std::max({la, lb, lc});
    p.circumradius = la * lb * lc / (4.0 * p.area);
    return p;
}

PanelGeometry reflect_panel(const PanelGeometry& p) {
    PanelGeometry r = p;
    for (auto& v : r.vertices) v.z() = -v.z();
    r.centroid.z() = -r.centroid.z();
    r.normal.z() = -r.normal.z();
    return r;
}

SurfaceMesh::SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles,
                         bool flip_orientation)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    if (vertices_.empty() || triangles_.empty()) throw MeshError("mesh has no vertices or no triangles");
    const int nv = static_cast<int>(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (!vertices_[i].allFinite()) throw MeshError("vertex " + std::to_string(i) + " is not finite");
        if (vertices_[i].z() < 0.0)
            throw MeshError("vertex " + std::to_string(i) + " lies below the plane x3 = 0");
    }
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        for (int idx : triangles_[t])
            if (idx < 0 || idx >= nv)
                throw MeshError("triangle " + std::to_string(t) + " references a missing vertex");
        const auto& [a, b, c] = triangles_[t];
        if (a == b || b == c || a == c) throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
        const double area = tri_area(vertices_[a], vertices_[b], vertices_[c]);
        const double scale = std::max({(vertices_[b] - vertices_[a]).squaredNorm(),
                                       (vertices_[c] - vertices_[a]).squaredNorm(), 1e-300});
        if (!(area > 1e-14 * scale)) throw MeshError("triangle " + std::to_string(t) + " is degenerate");
    }
    if (flip_orientation)
        for (auto& t : triangles_) std::swap(t[1], t[2]);

    std::map<Edge, int> edge_count;
    for (const auto& t : triangles_)
        for (int k = 0; k < 3; ++k) ++edge_count[undirected(t[k], t[(k + 1) % 3])];
    is_boundary_.assign(vertices_.size(), false);
    for (const auto& [e, n] : edge_count) {
        if (n > 2) throw MeshError("non-manifold edge shared by more than two triangles");
        if (n == 1) {
            ++boundary_edges_;
            is_boundary_[e.first] = is_boundary_[e.second] = true;
        }
    }
    for (int v = 0; v < nv; ++v)
        if (is_boundary_[v]) boundary_vertices_.push_back(v);

    if (closed()) orient_closed();

    normals_.reserve(triangles_.size());
    for (const auto& t : triangles_) {
        const Vec3 n = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
        normals_.push_back(n.normalized());
        for (int k = 0; k < 3; ++k)
            h_ = std::max(h_, (vertices_[t[k]] - vertices_[t[(k + 1) % 3]]).norm());
    }
    min_height_ = max_height_ = vertices_.front().z();
    for (const auto& v : vertices_) {
        min_height_ = std::min(min_height_, v.z());
        max_height_ = std::max(max_height_, v.z());
    }
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
            diameter_ = std::max(diameter_, (vertices_[i] - vertices_[j]).norm());
}

void SurfaceMesh::orient_closed() {
    // Propagate a consistent orientation across shared edges, then make the
    // enclosed signed volume positive (normals pointing outwards).
    std::map<Edge, std::vector<int>> edge_tris;
    for (std::size_t t = 0; t < triangles_.size(); ++t)
        for (int k = 0; k < 3; ++k)
            edge_tris[undirected(triangles_[t][k], triangles_[t][(k + 1) % 3])].push_back(static_cast<int>(t));

    auto has_directed = [&](int t, int a, int b) {
        const auto& tr = triangles_[t];
        for (int k = 0; k < 3; ++k)
            if (tr[k] == a && tr[(k + 1) % 3] == b) return true;
        return false;
    };

    std::vector<bool> visited(triangles_.size(), false);
    for (std::size_t seed = 0; seed < triangles_.size(); ++seed) {
        if (visited[seed]) continue;
        visited[seed] = true;
        std::queue<int> todo;
        todo.push(static_cast<int>(seed));
        std::vector<int> component;
        while (!todo.empty()) {
            const int t = todo.front();
            todo.pop();
            component.push_back(t);
            for (int k = 0; k < 3; ++k) {
                const int a = triangles_[t][k], b = triangles_[t][(k + 1) % 3];
                for (int nb : edge_tris[undirected(a, b)]) {
                    if (nb == t) continue;
                    if (visited[nb]) {
                        if (has_directed(nb, a, b))
                            throw MeshError("closed mesh is not orientable");
                        continue;
                    }
                    if (has_directed(nb, a, b)) std::swap(triangles_[nb][1], triangles_[nb][2]);
                    visited[nb] = true;
                    todo.push(nb);
                }
            }
        }
        double volume = 0.0;
        for (int t : component) {
            const auto& tr = triangles_[t];
            volume += vertices_[tr[0]].dot(vertices_[tr[1]].cross(vertices_[tr[2]])) / 6.0;
        }
        if (volume < 0.0)
            for (int t : component) std::swap(triangles_[t][1], triangles_[t][2]);
    }
}

double SurfaceMesh::total_area() const {
    double a = 0.0;
    for (const auto& t : triangles_) a += tri_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    return a;
}

PanelGeometry SurfaceMesh::panel(std::size_t i) const {
    if (i >= triangles_.size()) throw MeshError("panel index " + std::to_string(i) + " out of range");
    const auto& t = triangles_[i];
    return make_panel(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
}

SurfaceMesh parse_mesh(const std::string& text, bool flip_orientation) {
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            lines.push_back(line);
        }
    }
    if (lines.empty()) throw MeshError("mesh file is empty");
    auto fail = [](std::size_t n, const std::string& what) {
        throw MeshError("malformed mesh file (record " + std::to_string(n) + "): " + what);
    };
    long nv = -1, nt = -1;
    {
        std::istringstream hdr(lines[0]);
        std::string extra;
        if (!(hdr >> nv >> nt) || (hdr >> extra) || nv <= 0 || nt <= 0) fail(0, "expected header `nv nt`");
    }
    if (static_cast<long>(lines.size()) != 1 + nv + nt) fail(lines.size(), "record count does not match header");
    std::vector<Vec3> verts(nv);
    for (long i = 0; i < nv; ++i) {
        std::istringstream in(lines[1 + i]);
        std::string extra;
        if (!(in >> verts[i].x() >> verts[i].y() >> verts[i].z()) || (in >> extra)) fail(1 + i, "expected `x y z`");
    }
    std::vector<std::array<int, 3>> tris(nt);
    for (long i = 0; i < nt; ++i) {
        std::istringstream in(lines[1 + nv + i]);
        std::string extra;
        if (!(in >> tris[i][0] >> tris[i][1] >> tris[i][2]) || (in >> extra)) fail(1 + nv + i, "expected `i j k`");
    }
    return SurfaceMesh(std::move(verts), std::move(tris), flip_orientation);
}

SurfaceMesh load_mesh(const std::filesystem::path& path, bool flip_orientation) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_mesh(buf.str(), flip_orientation);
}

void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write mesh file " + path.string());
    out.precision(17);
    out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
    for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

SurfaceMesh refine_uniform(const SurfaceMesh& mesh) {
    std::vector<Vec3> verts = mesh.vertices();
    std::map<Edge, int> midpoint;
    auto mid = [&](int a, int b) {
        const Edge e = undirected(a, b);
        if (auto it = midpoint.find(e); it != midpoint.end()) return it->second;
        verts.push_back(0.5 * (verts[a] + verts[b]));
        const int id = static_cast<int>(verts.size()) - 1;
        midpoint.emplace(e, id);
        return id;
    };
    std::vector<std::array<int, 3>> tris;
    tris.reserve(4 * mesh.num_triangles());
    for (const auto& t : mesh.triangles()) {
        const int a = t[0], b = t[1], c = t[2];
        const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
        tris.push_back({a, ab, ca});
        tris.push_back({ab, b, bc});
        tris.push_back({ca, bc, c});
        tris.push_back({ab, bc, ca});
    }
    return SurfaceMesh(std::move(verts), std::move(tris));
}

}  // namespace tdbem
