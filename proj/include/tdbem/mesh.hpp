#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tdbem {

using Vec3 = Eigen::Vector3d;

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact geometry of one flat triangular panel.
struct PanelGeometry {
    std::array<Vec3, 3> vertices;
    Vec3 centroid;
    Vec3 normal;  // unit, points into the exterior domain
    double area = 0.0;
    double circumradius = 0.0;
    double diameter = 0.0;  // longest edge
};

/// Builds PanelGeometry from three points, orienting the normal along (b-a)x(c-a).
PanelGeometry make_panel(const Vec3& a, const Vec3& b, const Vec3& c);

/// Mirror image of a panel in the plane x3 = 0. The normal is mirrored too, so
/// the result is still a valid panel of the reflected surface.
PanelGeometry reflect_panel(const PanelGeometry& p);

/// Triangulated obstacle boundary in the closed upper half-space.
///
/// Closed meshes are reoriented so that every normal points out of the
/// enclosed volume (into the exterior domain). Open screens keep the file
/// orientation, optionally flipped.
class SurfaceMesh {
public:
    SurfaceMesh(std::vector<Vec3> vertices, std::vector<std::array<int, 3>> triangles,
                bool flip_orientation = false);

    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const noexcept { return triangles_; }
    const std::vector<Vec3>& normals() const noexcept { return normals_; }
    const std::vector<int>& boundary_vertices() const noexcept { return boundary_vertices_; }
    const std::vector<bool>& is_boundary_vertex() const noexcept { return is_boundary_; }

    std::size_t num_triangles() const noexcept { return triangles_.size(); }
    std::size_t num_vertices() const noexcept { return vertices_.size(); }
    std::size_t num_boundary_edges() const noexcept { return boundary_edges_; }

    double h() const noexcept { return h_; }
    bool closed() const noexcept { return boundary_edges_ == 0; }
    bool elevated() const noexcept { return min_height_ > 0.0; }
    double min_height() const noexcept { return min_height_; }
    double max_height() const noexcept { return max_height_; }
    double diameter() const noexcept { return diameter_; }
    double total_area() const;

    PanelGeometry panel(std::size_t i) const;

private:
    void orient_closed();

    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<Vec3> normals_;
    std::vector<int> boundary_vertices_;
    std::vector<bool> is_boundary_;
    std::size_t boundary_edges_ = 0;
    double h_ = 0.0;
    double min_height_ = 0.0;
    double max_height_ = 0.0;
    double diameter_ = 0.0;
};

/// Reads the ASCII format: header `nv nt`, nv lines `x y z`, nt lines `i j k`
/// (0-based). Text after `#` is ignored.
SurfaceMesh load_mesh(const std::filesystem::path& path, bool flip_orientation = false);
SurfaceMesh parse_mesh(const std::string& text, bool flip_orientation = false);
void save_mesh(const SurfaceMesh& mesh, const std::filesystem::path& path);

/// Splits every triangle into four through the edge midpoints.
SurfaceMesh refine_uniform(const SurfaceMesh& mesh);

}  // namespace tdbem
