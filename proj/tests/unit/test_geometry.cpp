// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "specsep/error.hpp"
#include "specsep/geometry.hpp"
#include "specsep/phong.hpp"
#include "specsep/texture.hpp"

using namespace specsep;
namespace fs = std::filesystem;
using specsep::testing::scratch_dir;

namespace {

double
angle_between(const Vec3& a, const Vec3& b)
{
    return std::atan2(length(cross(a, b)), dot(a, b));
}

fs::path
write_text(const fs::path& dir, const std::string& name,
           const std::string& text)
{
    std::ofstream(dir / name) << text;
    return dir / name;
}

Mesh
unit_square()
{
    Mesh m;
    m.vertices = {{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.uvs = {{0, 1}, {1, 1}, {1, 0}, {0, 0}};
    return compute_vertex_normals(m);
}

Camera
window_camera(int size, double half_extent)
{
    Camera cam;
    cam.scale = 0.5 * size / half_extent;
    cam.center_x = cam.center_y = 0.5 * size;
    return cam;
}

// Signed area test on the xy projection with the rasterizer's screen flip.
bool
inside(const Vec3& a, const Vec3& b, const Vec3& c, double x, double y)
{
    const auto e = [](const Vec3& p, const Vec3& q, double px, double py) {
        return (q.x - p.x) * (py - p.y) - (q.y - p.y) * (px - p.x);
    };
    const double s0 = e(a, b, x, y), s1 = e(b, c, x, y), s2 = e(c, a, x, y);
    return (s0 > 0 && s1 > 0 && s2 > 0) || (s0 < 0 && s1 < 0 && s2 < 0);
}

}  // namespace

TEST(Obj, SingleTriangle)
{
    auto dir = scratch_dir("obj1");
    Mesh m = load_obj(write_text(dir, "t.obj",
                                 "# tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n"));
    EXPECT_EQ(m.vertices.size(), 3u);
    EXPECT_EQ(m.triangles.size(), 1u);
}

TEST(Obj, MissingNormalsAreComputedUnit)
{
    auto dir = scratch_dir("obj2");
    Mesh m = load_obj(write_text(
        dir, "t.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0.2\nf 1 2 3\nf 2 4 3\n"));
    ASSERT_EQ(m.normals.size(), 4u);
    for (const Vec3& n : m.normals)
        EXPECT_NEAR(length(n), 1.0, 1e-12);
    ASSERT_EQ(m.uvs.size(), 4u);
}

TEST(Obj, QuadIsFanTriangulated)
{
    auto dir = scratch_dir("obj3");
    Mesh m = load_obj(write_text(dir, "q.obj",
                                 "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
                                 "vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n"
                                 "vn 0 0 2\n"
                                 "f 1/1/1 2/2/1 3/3/1 4/4/1\n"));
    ASSERT_EQ(m.triangles.size(), 2u);
    EXPECT_EQ(m.triangles[0], (std::array<int, 3>{0, 1, 2}));
    EXPECT_EQ(m.triangles[1], (std::array<int, 3>{0, 2, 3}));
    EXPECT_EQ(m.normals[2], (Vec3{0, 0, 1}));
    EXPECT_EQ(m.uvs[2].y, 0.0);
}

TEST(Obj, ErrorsCarryKinds)
{
    auto dir = scratch_dir("obj4");
    try {
        load_obj(dir / "missing.obj");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
        EXPECT_NE(std::string(e.what()).find("missing.obj"), std::string::npos);
    }
    try {
        load_obj(write_text(dir, "bad.obj", "v 0 0 0\nf 1 2 3\n"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Geometry);
    }
}

TEST(Obj, SaveLoadRoundTrip)
{
    auto dir = scratch_dir("obj5");
    Mesh a = make_synthetic_face({.resolution = 6});
    save_obj(a, dir / "f.obj");
    Mesh b = load_obj(dir / "f.obj");
    ASSERT_EQ(a.vertices.size(), b.vertices.size());
    EXPECT_EQ(a.triangles, b.triangles);
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        EXPECT_NEAR(length(a.vertices[i] - b.vertices[i]), 0.0, 1e-9);
        EXPECT_NEAR(a.uvs[i].x, b.uvs[i].x, 1e-9);
        EXPECT_NEAR(a.uvs[i].y, b.uvs[i].y, 1e-9);
    }
}

TEST(Normals, PlanarSquare)
{
    Mesh m = unit_square();
    for (const Vec3& n : m.normals)
        EXPECT_EQ(n, (Vec3{0, 0, 1}));
}

TEST(Normals, IcosphereIsRadial)
{
    Mesh m = compute_vertex_normals(make_icosphere(4));
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        EXPECT_LT(angle_between(m.normals[i], normalize(m.vertices[i])), 1e-2);
}

TEST(Normals, FlippedWindingNegates)
{
    Mesh a = compute_vertex_normals(make_icosphere(1));
    Mesh b = a;
    for (auto& t : b.triangles)
        std::swap(t[1], t[2]);
    b = compute_vertex_normals(b);
    for (std::size_t i = 0; i < a.normals.size(); ++i)
        EXPECT_NEAR(length(a.normals[i] + b.normals[i]), 0.0, 1e-12);
}

TEST(Normals, IsolatedVertexIsAnError)
{
    Mesh m = unit_square();
    m.vertices.push_back({5, 5, 5});
    m.uvs.clear();
    m.normals.clear();
    try {
        compute_vertex_normals(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Geometry);
    }
}

TEST(SyntheticFace, GridSizeAndDeterminism)
{
    SyntheticFaceParams p;
    p.resolution = 64;
    p.seed = 9;
    Mesh a = make_synthetic_face(p);
    Mesh b = make_synthetic_face(p);
    EXPECT_EQ(a.vertices.size(), 65u * 65u);
    EXPECT_EQ(a.triangles.size(), 2u * 64u * 64u);
    EXPECT_EQ(a.vertices, b.vertices);
    EXPECT_EQ(a.normals, b.normals);
    p.seed = 10;
    EXPECT_NE(make_synthetic_face(p).vertices, a.vertices);
}

TEST(SyntheticFace, FlatFaceMatchesEllipsoidNormals)
{
    SyntheticFaceParams p;
    p.nose_amplitude = 0.0;
    p.brow_amplitude = 0.0;
    p.resolution = 64;
    Mesh m = make_synthetic_face(p);
    const Vec3 r = p.radii;
    const int g = p.resolution + 1;
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        const Vec3& v = m.vertices[i];
        const int gi = int(i) % g, gj = int(i) / g;
        EXPECT_NEAR(v.x * v.x / (r.x * r.x) + v.y * v.y / (r.y * r.y)
                        + v.z * v.z / (r.z * r.z),
                    1.0, 1e-12);
        const Vec3 analytic
            = normalize({v.x / (r.x * r.x), v.y / (r.y * r.y), v.z / (r.z * r.z)});
        // border vertices only see triangles on one side
        if (gi == 0 || gj == 0 || gi == g - 1 || gj == g - 1)
            EXPECT_LT(angle_between(m.normals[i], analytic), 5e-2) << i;
        else
            EXPECT_LT(angle_between(m.normals[i], analytic), 1e-2) << i;
    }
}

TEST(Rasterize, FullWindowSquare)
{
    auto buf = rasterize(unit_square(), window_camera(16, 1.0), 16, 16);
    EXPECT_EQ(buf.covered_count(), 256u);
    for (std::size_t p = 0; p < buf.pixel_count(); ++p)
        EXPECT_EQ(buf.normal[p], (Vec3{0, 0, 1}));
}

TEST(Rasterize, NearerTriangleWins)
{
    Mesh m;
    m.vertices = {{-1, -1, 0}, {1, -1, 0}, {0, 1, 0},
                  {-1, 0.8, 0.5}, {1, 0.8, 0.5}, {0, -0.9, 0.5}};
    m.triangles = {{0, 1, 2}, {3, 5, 4}};
    m.normals.assign(6, Vec3{0, 0, 1});
    m.uvs = {{0.25, 0.25}, {0.25, 0.25}, {0.25, 0.25},
             {0.75, 0.75}, {0.75, 0.75}, {0.75, 0.75}};
    const int n = 40;
    Camera cam = window_camera(n, 1.0);
    auto buf = rasterize(m, cam, n, n);
    int both = 0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double ox = (x + 0.5 - cam.center_x) / cam.scale;
            const double oy = -(y + 0.5 - cam.center_y) / cam.scale;
            const bool in_a = inside(m.vertices[0], m.vertices[1], m.vertices[2], ox, oy);
            const bool in_b = inside(m.vertices[3], m.vertices[4], m.vertices[5], ox, oy);
            const std::size_t p = std::size_t(y) * n + x;
            if (in_b) {
                EXPECT_NEAR(buf.uv[p].x, 0.75, 1e-12);
                EXPECT_NEAR(buf.depth[p], 0.5, 1e-12);
            } else if (in_a) {
                EXPECT_NEAR(buf.uv[p].x, 0.25, 1e-12);
            }
            both += in_a && in_b;
        }
    EXPECT_GT(both, 100);
}

TEST(Rasterize, SphereCoversQuarterPi)
{
    Mesh m = compute_vertex_normals(assign_spherical_uvs(make_icosphere(5)));
    const int n = 256;
    auto buf = rasterize(m, Camera::framing({0, 0, 1}, 1.0, n, n, 0.0), n, n);
    const double frac = double(buf.covered_count()) / double(n * n);
    EXPECT_NEAR(frac / (std::numbers::pi / 4.0), 1.0, 0.02);
}

TEST(Rasterize, OffscreenMeshIsAnError)
{
    Camera cam = window_camera(8, 1.0);
    cam.center_x = -1000.0;
    try {
        rasterize(unit_square(), cam, 8, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Geometry);
    }
}

TEST(UvFlatten, ConstantImage)
{
    Mesh face = make_synthetic_face({.resolution = 32});
    auto buf = rasterize(face, Camera::framing({0, 0, 1}, 1.2, 64, 64, 2.0), 64, 64);
    auto flat = uv_flatten_with_coverage(Raster(64, 64, 3, 0.3), buf, 32);
    int covered = 0;
    for (std::size_t t = 0; t < flat.coverage.size(); ++t)
        if (flat.coverage[t]) {
            ++covered;
            for (int c = 0; c < 3; ++c)
                EXPECT_NEAR(flat.image.at(t, c), 0.3, 1e-15);
        } else {
            EXPECT_EQ(flat.image.at(t, 0), 0.0);
        }
    EXPECT_GT(covered, 32 * 32 / 2);
}

TEST(UvFlatten, IdentityMapping)
{
    const int n = 24;
    GeometryBuffers buf(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const std::size_t p = std::size_t(y) * n + x;
            buf.mask[p] = 1;
            buf.normal[p] = {0, 0, 1};
            buf.uv[p] = {(x + 0.5) / n, (y + 0.5) / n};
        }
    Raster img = specsep::testing::random_raster(n, n, 3, 31);
    EXPECT_EQ(uv_flatten(img, buf, n), img);
}

TEST(UvFlatten, TextureIsPoseInvariant)
{
    Mesh face = make_synthetic_face({.resolution = 64});
    Raster tex = make_procedural_albedo(64, {});
    const int n = 256;
    auto a = rasterize(face, Camera::framing({0, 0, 1}, 1.2, n, n, 4.0), n, n);
    const double yaw = 20.0 * std::numbers::pi / 180.0;
    auto b = rasterize(face,
                       Camera::framing({std::sin(yaw), 0, std::cos(yaw)}, 1.2,
                                       n, n, 4.0),
                       n, n);
    auto fa = uv_flatten_with_coverage(sample_texture_image(tex, a), a, 64);
    auto fb = uv_flatten_with_coverage(sample_texture_image(tex, b), b, 64);
    double s = 0.0;
    int k = 0;
    for (std::size_t t = 0; t < fa.coverage.size(); ++t)
        if (fa.coverage[t] == 1 && fb.coverage[t] == 1)
            for (int c = 0; c < 3; ++c, ++k) {
                const double d = fa.image.at(t, c) - fb.image.at(t, c);
                s += d * d;
            }
    ASSERT_GT(k, 3000);
    EXPECT_LT(std::sqrt(s / k), 0.02);
}
