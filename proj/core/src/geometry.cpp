// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "specsep/error.hpp"
#include "specsep/random.hpp"

namespace specsep {

void
Mesh::validate() const
{
    const int n = int(vertices.size());
    for (const auto& t : triangles)
        for (int i : t)
            if (i < 0 || i >= n)
                fail(ErrorKind::Geometry,
                     "triangle index " + std::to_string(i)
                         + " out of range (mesh has " + std::to_string(n)
                         + " vertices)");
    if (!uvs.empty() && uvs.size() != vertices.size())
        fail(ErrorKind::Geometry, "uv count does not match vertex count");
    if (!normals.empty() && normals.size() != vertices.size())
        fail(ErrorKind::Geometry, "normal count does not match vertex count");
}

Mesh
compute_vertex_normals(Mesh mesh)
{
    mesh.validate();
    std::vector<Vec3> acc(mesh.vertices.size());
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        // |cross| is twice the area, so summing it weights by area
        const Vec3 n = cross(b - a, c - a);
        if (0.5 * length(n) < kDegenerateArea)
            continue;
        for (int i : t)
            acc[i] += n;
    }
    mesh.normals.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double len = length(acc[i]);
        if (!(len > 0.0))
            fail(ErrorKind::Geometry,
                 "vertex " + std::to_string(i)
                     + " has no non-degenerate incident triangle");
        mesh.normals[i] = (1.0 / len) * acc[i];
    }
    return mesh;
}

Mesh
assign_spherical_uvs(Mesh mesh)
{
    require(!mesh.vertices.empty(), "mesh has no vertices");
    Vec3 centroid;
    for (const Vec3& v : mesh.vertices)
        centroid += v;
    centroid = (1.0 / double(mesh.vertices.size())) * centroid;
    mesh.uvs.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3 d = mesh.vertices[i] - centroid;
        const double len = length(d);
        const double u = 0.5 + std::atan2(d.x, d.z) / (2.0 * std::numbers::pi);
        const double v
            = len > 0.0 ? 0.5 - std::asin(std::clamp(d.y / len, -1.0, 1.0))
                                    / std::numbers::pi
                        : 0.5;
        mesh.uvs[i] = {std::clamp(u, 0.0, 1.0), std::clamp(v, 0.0, 1.0)};
    }
    return mesh;
}

Mesh
make_synthetic_face(const SyntheticFaceParams& params)
{
    require(params.radii.x > 0 && params.radii.y > 0 && params.radii.z > 0,
            "face radii must be positive");
    require(params.resolution >= 2, "face resolution must be at least 2");

    Rng rng(params.seed);
    const double nose_dy = rng.uniform(-0.04, 0.04);
    const double nose_w = rng.uniform(0.9, 1.1);
    const double brow_dy = rng.uniform(-0.03, 0.03);
    const double brow_dx = rng.uniform(-0.03, 0.03);

    const double a = params.radii.x, b = params.radii.y, c = params.radii.z;
    const double max_angle = 80.0 * std::numbers::pi / 180.0;
    const int res = params.resolution;

    const auto bump = [](double x, double y, double cx, double cy, double wx,
                         double wy) {
        const double dx = (x - cx) / wx;
        const double dy = (y - cy) / wy;
        return std::exp(-0.5 * (dx * dx + dy * dy));
    };

    Mesh mesh;
    mesh.vertices.reserve(std::size_t(res + 1) * (res + 1));
    mesh.uvs.reserve(mesh.vertices.capacity());
    for (int j = 0; j <= res; ++j) {
        const double v = double(j) / res;
        const double lat = (1.0 - 2.0 * v) * max_angle;
        for (int i = 0; i <= res; ++i) {
            const double u = double(i) / res;
            const double lon = (2.0 * u - 1.0) * max_angle;
            const double x = a * std::sin(lon) * std::cos(lat);
            const double y = b * std::sin(lat);
            double z = c * std::cos(lon) * std::cos(lat);
            const double xn = x / a, yn = y / b;
            z += params.nose_amplitude
                 * bump(xn, yn, 0.0, -0.05 + nose_dy, 0.16 * nose_w, 0.32);
            z += params.brow_amplitude
                 * (bump(xn, yn, -0.35 + brow_dx, 0.32 + brow_dy, 0.2, 0.07)
                    + bump(xn, yn, 0.35 - brow_dx, 0.32 + brow_dy, 0.2, 0.07));
            mesh.vertices.push_back({x, y, z});
            mesh.uvs.push_back({u, v});
        }
    }
    const auto id = [res](int i, int j) { return j * (res + 1) + i; };
    for (int j = 0; j < res; ++j)
        for (int i = 0; i < res; ++i) {
            mesh.triangles.push_back({id(i, j), id(i, j + 1), id(i + 1, j)});
            mesh.triangles.push_back(
                {id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)});
        }
    return compute_vertex_normals(std::move(mesh));
}

Mesh
make_icosphere(int subdivisions)
{
    require(subdivisions >= 0, "subdivision level must be non-negative");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    Mesh mesh;
    mesh.vertices = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
                     {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
                     {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& v : mesh.vertices)
        v = normalize(v);
    mesh.triangles = {{0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10},
                      {0, 10, 11}, {1, 5, 9},  {5, 11, 4},  {11, 10, 2},
                      {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
                      {3, 2, 6},   {3, 6, 8},  {3, 8, 9},   {4, 9, 5},
                      {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        const auto mid = [&](int i, int j) {
            const auto key = std::minmax(i, j);
            auto it = midpoint.find(key);
            if (it != midpoint.end())
                return it->second;
            const int id = int(mesh.vertices.size());
            mesh.vertices.push_back(
                normalize(mesh.vertices[i] + mesh.vertices[j]));
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(mesh.triangles.size() * 4);
        for (const auto& tri : mesh.triangles) {
            const int a = mid(tri[0], tri[1]);
            const int b = mid(tri[1], tri[2]);
            const int c = mid(tri[2], tri[0]);
            next.push_back({tri[0], a, c});
            next.push_back({tri[1], b, a});
            next.push_back({tri[2], c, b});
            next.push_back({a, b, c});
        }
        mesh.triangles = std::move(next);
    }
    for (auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3 n = cross(mesh.vertices[tri[1]] - a,
                             mesh.vertices[tri[2]] - a);
        if (dot(n, a) < 0.0)
            std::swap(tri[1], tri[2]);
    }
    mesh.normals = mesh.vertices;
    return assign_spherical_uvs(std::move(mesh));
}

void
Camera::basis(Vec3& right, Vec3& up) const
{
    const Vec3 v = normalize(view_dir);
    Vec3 hint = up_hint;
    if (length(cross(hint, v)) < 1e-9)
        hint = std::abs(v.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    right = normalize(cross(hint, v));
    up = cross(v, right);
}

Camera
Camera::framing(const Vec3& view_dir, double radius, int width, int height,
                double margin)
{
    require(radius > 0.0, "framing radius must be positive");
    Camera cam;
    cam.view_dir = normalize(view_dir);
    cam.scale = (0.5 * std::min(width, height) - margin) / radius;
    cam.center_x = 0.5 * width;
    cam.center_y = 0.5 * height;
    return cam;
}

GeometryBuffers::GeometryBuffers(int w, int h) : width(w), height(h)
{
    require(w > 0 && h > 0, "buffer dimensions must be positive");
    const std::size_t n = pixel_count();
    normal.assign(n, Vec3{});
    mask.assign(n, 0);
    uv.assign(n, Vec2{});
    depth.assign(n, -std::numeric_limits<double>::infinity());
}

std::size_t
GeometryBuffers::covered_count() const
{
    return std::size_t(std::count(mask.begin(), mask.end(), 1));
}

}  // namespace specsep
