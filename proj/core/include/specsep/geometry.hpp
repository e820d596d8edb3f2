// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "specsep/raster.hpp"
#include "specsep/vec.hpp"

namespace specsep {

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec2> uvs;      // empty or one per vertex, in [0,1]^2
    std::vector<Vec3> normals;  // empty or one unit normal per vertex

    /// Throws if any triangle index is out of range or attribute arrays
    /// have the wrong length.
    void validate() const;
};

/// Triangles with area below this are skipped by normals and rasterization.
inline constexpr double kDegenerateArea = 1e-12;

/// Area-weighted average of incident face normals, renormalized. A vertex
/// with no non-degenerate incident face is a geometry error.
Mesh compute_vertex_normals(Mesh mesh);

/// Equirectangular projection about the vertex centroid:
/// u = 0.5 + atan2(dx, dz) / (2 pi), v = 0.5 - asin(dy / |d|) / pi.
Mesh assign_spherical_uvs(Mesh mesh);

/// Reads the v / vt / vn / f subset of Wavefront OBJ. Polygons are fan
/// triangulated, negative indices are resolved relative to the current
/// count. Missing normals are computed, missing uvs fall back to
/// assign_spherical_uvs.
Mesh load_obj(const std::filesystem::path& path);
void save_obj(const Mesh& mesh, const std::filesystem::path& path);

struct SyntheticFaceParams {
    Vec3 radii{0.9, 1.1, 0.8};
    double nose_amplitude = 0.18;
    double brow_amplitude = 0.05;
    int resolution = 64;
    std::uint64_t seed = 0;
};

/// Front half of an ellipsoid, parameterized by longitude/latitude in
/// [-80, 80] degrees, displaced along +z by smooth nose and brow bumps.
/// Produces (resolution + 1)^2 vertices; uv is the normalized
/// (longitude, latitude) grid coordinate. The seed jitters bump placement.
Mesh make_synthetic_face(const SyntheticFaceParams& params);

/// Subdivided icosahedron on the unit sphere; level 2 has 162 vertices.
/// Normals are radial and uvs spherical.
Mesh make_icosphere(int subdivisions);

/// Orthographic camera. view_dir points from the scene toward the viewer;
/// image x grows along `right`, image y grows against `up`.
struct Camera {
    Vec3 view_dir{0.0, 0.0, 1.0};
    Vec3 up_hint{0.0, 1.0, 0.0};
    double scale = 1.0;   // pixels per object unit
    double center_x = 0.0;  // pixel position of the object origin
    double center_y = 0.0;

    void basis(Vec3& right, Vec3& up) const;

    /// Camera looking at the origin along -view_dir whose window holds a
    /// sphere of the given radius with `margin` pixels to spare.
    static Camera framing(const Vec3& view_dir, double radius, int width,
                          int height, double margin = 0.0);
};

struct GeometryBuffers {
    int width = 0;
    int height = 0;
    Vec3 view_dir{0.0, 0.0, 1.0};
    std::vector<Vec3> normal;          // unit where mask is set
    std::vector<std::uint8_t> mask;    // 1 = covered
    std::vector<Vec2> uv;              // in [0,1]^2 where mask is set
    std::vector<double> depth;         // larger is nearer; -inf where empty

    GeometryBuffers() = default;
    GeometryBuffers(int width, int height);

    std::size_t pixel_count() const
    {
        return std::size_t(width) * std::size_t(height);
    }
    std::size_t covered_count() const;
};

/// Z-buffered rasterization with barycentric interpolation of normals
/// (renormalized) and uvs. Pixel centers sit at (x + 0.5, y + 0.5); edges
/// follow a top-left fill rule so shared edges are covered once.
GeometryBuffers rasterize(const Mesh& mesh, const Camera& camera, int width,
                          int height);

/// Integer texel coordinate of uv in a res x res grid; row index grows with v.
inline int
uv_to_texel(double t, int res)
{
    int i = int(t * res);
    return i < 0 ? 0 : (i >= res ? res - 1 : i);
}

struct FlattenResult {
    Raster image;                      // uv_res x uv_res x channels
    std::vector<std::uint8_t> coverage;  // 0 empty, 1 splatted, 2 hole-filled
};

inline constexpr int kUvFillRadius = 3;

/// Splats every masked pixel into its uv texel, averaging contributors.
/// Empty texels take the value of the nearest splatted texel within
/// kUvFillRadius (Euclidean, ties by scan order), otherwise 0.
FlattenResult uv_flatten_with_coverage(const Raster& image,
                                       const GeometryBuffers& buffers,
                                       int uv_resolution);
Raster uv_flatten(const Raster& image, const GeometryBuffers& buffers,
                  int uv_resolution);

}  // namespace specsep
