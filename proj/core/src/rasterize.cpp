// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "specsep/error.hpp"
#include "specsep/geometry.hpp"

namespace specsep {

namespace {

struct ScreenVertex {
    double x, y, depth;
};

double
edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py)
{
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// Antisymmetric tie rule: of two triangles sharing an edge (traversed in
// opposite directions) exactly one owns samples lying on it.
bool
owns_edge(const ScreenVertex& a, const ScreenVertex& b)
{
    const double dy = b.y - a.y;
    const double dx = b.x - a.x;
    return dy > 0.0 || (dy == 0.0 && dx > 0.0);
}

}  // namespace

GeometryBuffers
rasterize(const Mesh& mesh, const Camera& camera, int width, int height)
{
    mesh.validate();
    if (mesh.normals.size() != mesh.vertices.size()
        || mesh.uvs.size() != mesh.vertices.size())
        fail(ErrorKind::Geometry, "rasterize needs per-vertex normals and uvs");

    GeometryBuffers buf(width, height);
    buf.view_dir = normalize(camera.view_dir);
    Vec3 right, up;
    camera.basis(right, up);

    std::vector<ScreenVertex> sv(mesh.vertices.size());
    for (std::size_t i = 0; i < sv.size(); ++i) {
        const Vec3& p = mesh.vertices[i];
        sv[i] = {camera.center_x + camera.scale * dot(p, right),
                 camera.center_y - camera.scale * dot(p, up),
                 dot(p, buf.view_dir)};
    }

    for (const auto& tri : mesh.triangles) {
        const Vec3& pa = mesh.vertices[tri[0]];
        if (0.5 * length(cross(mesh.vertices[tri[1]] - pa,
                               mesh.vertices[tri[2]] - pa))
            < kDegenerateArea)
            continue;
        int idx[3] = {tri[0], tri[1], tri[2]};
        double area = edge(sv[idx[0]], sv[idx[1]], sv[idx[2]].x, sv[idx[2]].y);
        if (area == 0.0)
            continue;  // edge-on in this view
        if (area < 0.0) {
            std::swap(idx[1], idx[2]);
            area = -area;
        }
        const ScreenVertex& a = sv[idx[0]];
        const ScreenVertex& b = sv[idx[1]];
        const ScreenVertex& c = sv[idx[2]];
        const int x0 = std::max(0, int(std::floor(std::min({a.x, b.x, c.x}))));
        const int x1 = std::min(width - 1,
                                int(std::ceil(std::max({a.x, b.x, c.x}))));
        const int y0 = std::max(0, int(std::floor(std::min({a.y, b.y, c.y}))));
        const int y1 = std::min(height - 1,
                                int(std::ceil(std::max({a.y, b.y, c.y}))));
        const bool own_bc = owns_edge(b, c);
        const bool own_ca = owns_edge(c, a);
        const bool own_ab = owns_edge(a, b);
        for (int y = y0; y <= y1; ++y) {
            const double py = y + 0.5;
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5;
                const double w0 = edge(b, c, px, py);
                const double w1 = edge(c, a, px, py);
                const double w2 = edge(a, b, px, py);
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0)
                    continue;
                if ((w0 == 0.0 && !own_bc) || (w1 == 0.0 && !own_ca)
                    || (w2 == 0.0 && !own_ab))
                    continue;
                const double l0 = w0 / area, l1 = w1 / area, l2 = w2 / area;
                const double depth = l0 * a.depth + l1 * b.depth
                                     + l2 * c.depth;
                const std::size_t p = std::size_t(y) * width + x;
                if (!(depth > buf.depth[p]))
                    continue;
                const Vec3 n = normalize(l0 * mesh.normals[idx[0]]
                                         + l1 * mesh.normals[idx[1]]
                                         + l2 * mesh.normals[idx[2]]);
                if (!(length(n) > 0.0))
                    continue;
                const Vec2& ua = mesh.uvs[idx[0]];
                const Vec2& ub = mesh.uvs[idx[1]];
                const Vec2& uc = mesh.uvs[idx[2]];
                buf.depth[p] = depth;
                buf.mask[p] = 1;
                buf.normal[p] = n;
                buf.uv[p] = {std::clamp(l0 * ua.x + l1 * ub.x + l2 * uc.x,
                                        0.0, 1.0),
                             std::clamp(l0 * ua.y + l1 * ub.y + l2 * uc.y,
                                        0.0, 1.0)};
            }
        }
    }
    if (buf.covered_count() == 0)
        fail(ErrorKind::Geometry, "mesh projects outside the image window");
    return buf;
}

namespace {

struct Offset {
    int dx, dy, d2;
};

std::vector<Offset>
fill_offsets()
{
    std::vector<Offset> out;
    const int r = kUvFillRadius;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const int d2 = dx * dx + dy * dy;
            if (d2 > 0 && d2 <= r * r)
                out.push_back({dx, dy, d2});
        }
    std::stable_sort(out.begin(), out.end(),
                     [](const Offset& a, const Offset& b) {
                         return a.d2 < b.d2;
                     });
    return out;
}

}  // namespace

FlattenResult
uv_flatten_with_coverage(const Raster& image, const GeometryBuffers& buffers,
                         int uv_resolution)
{
    require(uv_resolution > 0, "uv resolution must be positive");
    require(image.width() == buffers.width && image.height() == buffers.height,
            "image and geometry buffers differ in size");
    const int res = uv_resolution;
    const int channels = image.channels();
    const std::size_t texels = std::size_t(res) * res;

    Raster sum(res, res, channels);
    std::vector<int> count(texels, 0);
    for (std::size_t p = 0; p < buffers.pixel_count(); ++p) {
        if (!buffers.mask[p])
            continue;
        const int tx = uv_to_texel(buffers.uv[p].x, res);
        const int ty = uv_to_texel(buffers.uv[p].y, res);
        const std::size_t t = std::size_t(ty) * res + tx;
        ++count[t];
        for (int c = 0; c < channels; ++c)
            sum.at(t, c) += image.at(p, c);
    }

    FlattenResult out{Raster(res, res, channels), std::vector<std::uint8_t>(texels, 0)};
    for (std::size_t t = 0; t < texels; ++t)
        if (count[t] > 0) {
            out.coverage[t] = 1;
            for (int c = 0; c < channels; ++c)
                out.image.at(t, c) = sum.at(t, c) / count[t];
        }

    static const std::vector<Offset> offsets = fill_offsets();
    for (int ty = 0; ty < res; ++ty)
        for (int tx = 0; tx < res; ++tx) {
            const std::size_t t = std::size_t(ty) * res + tx;
            if (count[t] > 0)
                continue;
            for (const Offset& o : offsets) {
                const int sx = tx + o.dx, sy = ty + o.dy;
                if (sx < 0 || sy < 0 || sx >= res || sy >= res)
                    continue;
                const std::size_t s = std::size_t(sy) * res + sx;
                if (count[s] == 0)
                    continue;
                out.coverage[t] = 2;
                for (int c = 0; c < channels; ++c)
                    out.image.at(t, c) = out.image.at(s, c);
                break;
            }
        }
    return out;
}

Raster
uv_flatten(const Raster& image, const GeometryBuffers& buffers,
           int uv_resolution)
{
    return uv_flatten_with_coverage(image, buffers, uv_resolution).image;
}

}  // namespace specsep
